//! Small derivative-free maximizers used by the sup-type functionals:
//! golden-section line search and a Nelder–Mead simplex in ℝ³.

use crate::geom::point::P3;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[a, b]`.
/// Returns (argmax, max). Unimodality is assumed but not required for
/// soundness: the result is always a genuine evaluation point.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub struct SimplexResult {
    pub argmax: P3,
    pub max: f64,
    /// Value spread of the final simplex, a convergence indicator.
    pub spread: f64,
}

/// Nelder–Mead maximization of `f` over ℝ³ from `start`, with an initial
/// simplex of the given edge scale. Stops after `max_evals` evaluations or
/// when the simplex value spread falls below `tol`.
pub fn nelder_mead_max(
    mut f: impl FnMut(&P3) -> f64,
    start: P3,
    scale: f64,
    max_evals: usize,
    tol: f64,
) -> SimplexResult {
    let mut evals = 0usize;
    let mut eval = |p: &P3, evals: &mut usize| {
        *evals += 1;
        f(p)
    };
    let mut pts = vec![
        start,
        start + P3::new(scale, 0.0, 0.0),
        start + P3::new(0.0, scale, 0.0),
        start + P3::new(0.0, 0.0, scale),
    ];
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    while evals < max_evals {
        // order descending by value (best first; we maximize)
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
        let reorder_pts: Vec<P3> = order.iter().map(|&i| pts[i]).collect();
        let reorder_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        pts = reorder_pts;
        vals = reorder_vals;

        let spread = vals[0] - vals[3];
        if spread.abs() < tol {
            break;
        }

        let centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
        let worst = pts[3];
        let reflected = centroid + (centroid - worst);
        let fr = eval(&reflected, &mut evals);

        if fr > vals[0] {
            let expanded = centroid + (centroid - worst) * 2.0;
            let fe = eval(&expanded, &mut evals);
            if fe > fr {
                pts[3] = expanded;
                vals[3] = fe;
            } else {
                pts[3] = reflected;
                vals[3] = fr;
            }
        } else if fr > vals[2] {
            pts[3] = reflected;
            vals[3] = fr;
        } else {
            let contracted = centroid + (worst - centroid) * 0.5;
            let fc = eval(&contracted, &mut evals);
            if fc > vals[3] {
                pts[3] = contracted;
                vals[3] = fc;
            } else {
                // shrink toward the best point
                for i in 1..4 {
                    pts[i] = pts[0] + (pts[i] - pts[0]) * 0.5;
                    vals[i] = eval(&pts[i], &mut evals);
                }
            }
        }
    }

    let (best, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - vals.iter().cloned().fold(f64::INFINITY, f64::min);
    SimplexResult {
        argmax: pts[best],
        max: vals[best],
        spread,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| -(x - 1.3).powi(2), -4.0, 5.0, 60);
        assert!((x - 1.3).abs() < 1e-9);
        assert!(v > -1e-17);
    }

    #[test]
    fn nelder_mead_finds_gaussian_peak() {
        let target = P3::new(0.3, -1.2, 2.0);
        let f = |p: &P3| (-(p.dist_sq(&target))).exp();
        let r = nelder_mead_max(f, P3::new(0.0, 0.0, 0.0), 0.5, 500, 1e-14);
        assert!(r.argmax.dist(&target) < 1e-4, "off by {}", r.argmax.dist(&target));
    }
}
