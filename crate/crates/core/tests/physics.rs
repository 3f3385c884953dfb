use surftrap::eigen::{self, Grid1D, Grid2D, SolveOptions};
use surftrap::trap::{self, AxisLabel, SearchBox, TrapReport};
use surftrap::units::{ELEMENTARY_CHARGE, UEV, UM};
use surftrap::{AtomSpecies, ChargeElement, MirrorSpec, PotentialStack, Vec3};

fn evanescent(decay_length: f64) -> MirrorSpec {
    MirrorSpec::evanescent(1.0 * UEV, 1.0 / decay_length, 1000.0).unwrap()
}

fn magnetic() -> MirrorSpec {
    MirrorSpec::magnetic(6.4 * UEV, 1.0 / (1.5 * UM)).unwrap()
}

fn wire(mirror: MirrorSpec, pc_per_cm: f64) -> PotentialStack {
    let line = ChargeElement::infinite_line(Vec3::zeros(), Vec3::z(), pc_per_cm * 1e-10).unwrap();
    PotentialStack::new(mirror, vec![line]).unwrap()
}

fn dot(mirror: MirrorSpec, electrons: f64) -> PotentialStack {
    let q = ChargeElement::point(Vec3::zeros(), electrons * ELEMENTARY_CHARGE).unwrap();
    PotentialStack::new(mirror, vec![q]).unwrap()
}

fn analyze(stack: &PotentialStack, atom: &AtomSpecies) -> TrapReport {
    trap::analyze(stack, atom, &SearchBox::for_mirror(&stack.mirror)).unwrap()
}

fn quiet() -> SolveOptions {
    SolveOptions { leak_tolerance: None, keep_states: false, ..Default::default() }
}

#[test]
fn dot_in_surface_frequencies_are_equal() {
    let r = analyze(&dot(evanescent(0.1 * UM), 141.0), &AtomSpecies::lithium());
    let (t, a) = (r.frequency(AxisLabel::T).unwrap(), r.frequency(AxisLabel::A).unwrap());
    assert!((t / a - 1.0).abs() < 1e-6, "{t} {a}");
    assert!(r.frequency(AxisLabel::N).unwrap() > t);
}

#[test]
fn van_der_waals_pulls_the_minimum_in() {
    let atom = AtomSpecies::lithium();
    let plain = wire(evanescent(0.1 * UM), 0.33);
    let with = plain.clone().with_vdw(1e-49).unwrap();
    let (a, b) = (analyze(&plain, &atom), analyze(&with, &atom));
    assert!(b.distance_to_surface < a.distance_to_surface);
}

#[test]
fn more_charge_is_deeper_and_closer() {
    let atom = AtomSpecies::rubidium();
    let reports: Vec<TrapReport> = [0.43, 2.0, 10.8].iter().map(|&q| analyze(&wire(magnetic(), q), &atom)).collect();
    for w in reports.windows(2) {
        assert!(w[1].depth < w[0].depth);
        assert!(w[1].distance_to_surface < w[0].distance_to_surface);
    }
}

#[test]
fn strong_magnetic_wire_holds_several_states() {
    let atom = AtomSpecies::lithium();
    let stack = wire(magnetic(), 15.7);
    let r = analyze(&stack, &atom);
    let (sn, st) = (r.ground_size(AxisLabel::N).unwrap(), r.ground_size(AxisLabel::T).unwrap());
    let barrier = r.tunneling.as_ref().unwrap().barrier_position;
    let grid = Grid2D::new(
        Grid1D::new(barrier, r.distance_to_surface + 15.0 * sn, 160).unwrap(),
        Grid1D::new(-15.0 * st, 15.0 * st, 160).unwrap(),
    )
    .unwrap();
    let s = eigen::solve_wire_cross_section(&stack, &atom, &grid, 4, &quiet()).unwrap();
    assert!(s.bound_count >= 2, "{:?}", s.energies);
}

#[test]
fn wire_ground_state_converges_under_refinement() {
    let atom = AtomSpecies::rubidium();
    let stack = wire(evanescent(0.1 * UM), 0.22);
    let r = analyze(&stack, &atom);
    let barrier = r.tunneling.as_ref().unwrap().barrier_position;
    let ground = |points: usize| {
        let grid = Grid2D::new(
            Grid1D::new(barrier, 2.0 * UM, points).unwrap(),
            Grid1D::new(-1.5 * UM, 1.5 * UM, points).unwrap(),
        )
        .unwrap();
        eigen::solve_wire_cross_section(&stack, &atom, &grid, 1, &quiet()).unwrap().energies[0]
    };
    let (e1, e2, e3) = (ground(60), ground(120), ground(240));
    // second order: each halving of the spacing cuts the change by about four
    let rate = (e1 - e2) / (e2 - e3);
    assert!((2.5..6.0).contains(&rate), "{e1} {e2} {e3} rate {rate}");
}

#[test]
fn halving_kappa_lengthens_the_lifetime() {
    let atom = AtomSpecies::lithium();
    let short = analyze(&wire(evanescent(0.1 * UM), 0.33), &atom);
    let long = analyze(&wire(evanescent(0.2 * UM), 0.33), &atom);
    let life = |r: &TrapReport| r.tunneling.as_ref().unwrap().log10_lifetime;
    assert!(life(&short) < life(&long), "{} {}", life(&short), life(&long));
}

#[test]
fn wire_ground_state_is_even_in_t() {
    let atom = AtomSpecies::lithium();
    let stack = wire(evanescent(0.1 * UM), 0.33);
    let grid = Grid2D::new(Grid1D::new(0.15 * UM, 2.0 * UM, 80).unwrap(), Grid1D::new(-1.0 * UM, 1.0 * UM, 81).unwrap()).unwrap();
    let s = eigen::solve_wire_cross_section(&stack, &atom, &grid, 1, &SolveOptions { leak_tolerance: None, ..Default::default() })
        .unwrap();
    let psi = &s.states.as_ref().unwrap()[0];
    let peak = psi.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for i in 0..80 {
        for j in 0..81 {
            let (a, b) = (psi[i * 81 + j], psi[i * 81 + 80 - j]);
            assert!((a - b).abs() < 1e-6 * peak);
        }
    }
}

#[test]
fn evanescent_minimum_scatters_magnetic_does_not() {
    let atom = AtomSpecies::lithium();
    assert!(analyze(&wire(evanescent(0.1 * UM), 0.33), &atom).scattering_rate.unwrap() > 0.0);
    assert!(analyze(&wire(magnetic(), 1.05), &atom).scattering_rate.is_none());
}
