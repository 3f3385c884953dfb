//! Derivative-free minimization.

/// Nelder-Mead simplex search in three dimensions.
///
/// Returns the best vertex and its value. Non-finite objective values are
/// treated as +inf, so the caller can encode constraints that way.
pub fn nelder_mead<F: Fn(&[f64; 3]) -> f64>(
    f: F,
    start: [f64; 3],
    initial_step: f64,
    x_tol: f64,
    max_evals: usize,
) -> ([f64; 3], f64) {
    let eval = |x: &[f64; 3]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, eval(&start)));
    for i in 0..3 {
        let mut x = start;
        x[i] += initial_step;
        simplex.push((x, eval(&x)));
    }
    let mut evals = 4;

    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    };

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                (0..3)
                    .map(|k| (x[k] - simplex[0].0[k]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < x_tol {
            break;
        }

        let mut centroid = [0.0; 3];
        for (x, _) in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += x[k] / 3.0;
            }
        }
        let worst = simplex[3];
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = eval(&reflected);
        evals += 1;

        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = eval(&expanded);
            evals += 1;
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                let c = lerp(&centroid, &worst.0, -0.5);
                let v = eval(&c);
                (c, v)
            } else {
                let c = lerp(&centroid, &worst.0, 0.5);
                let v = eval(&c);
                (c, v)
            };
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[3] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    v.0 = lerp(&best, &v.0, 0.5);
                    v.1 = eval(&v.0);
                }
                evals += 3;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}
