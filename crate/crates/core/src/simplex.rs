//! Nelder–Mead downhill simplex.
//!
//! Non-finite objective values are treated as `+inf`, so a penalty or a
//! failed evaluation simply repels the simplex.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimplexOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iter: usize,
    pub max_evals: usize,
    /// Converged once every vertex lies within `x_tol` (max norm) of the best
    /// and the vertex losses span at most `f_tol`.
    pub x_tol: f64,
    pub f_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iter: 200,
            max_evals: 400,
            x_tol: 1e-3,
            f_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// False when the run ended on its initial simplex without accepting any
    /// move.
    pub moved: bool,
    /// Best loss on the initial simplex, then after every iteration.
    pub trace: Vec<f64>,
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

/// Minimises `f` from `x0`, building the initial simplex by moving one
/// coordinate at a time by `steps[i]`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], steps: &[f64], opts: &SimplexOptions) -> SimplexOutcome {
    assert_eq!(x0.len(), steps.len(), "one initial step per coordinate");
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    verts.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        verts.push(v);
    }
    let mut fs: Vec<f64> = verts.iter().map(|v| eval(v, &mut evals)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let sort = |order: &mut Vec<usize>, fs: &[f64]| order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]).then(a.cmp(&b)));
    sort(&mut order, &fs);

    let mut trace = vec![fs[order[0]]];
    let mut iterations = 0;
    let mut moved = false;
    let mut converged = false;
    let point = |c: &[f64], toward: &[f64], coef: f64| -> Vec<f64> {
        c.iter().zip(toward).map(|(ci, ti)| ci + coef * (ti - ci)).collect()
    };

    loop {
        let best = order[0];
        let worst = order[n];
        let size =
            verts.iter().flat_map(|v| v.iter().zip(&verts[best]).map(|(a, b)| libm::fabs(a - b))).fold(0.0, f64::max);
        let spread = fs[worst] - fs[best];
        if n == 0 || (size <= opts.x_tol && spread.is_finite() && spread <= opts.f_tol) {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter || evals >= opts.max_evals {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&verts[i]) {
                *c += x / n as f64;
            }
        }
        let second_worst = order[n - 1];
        let xr = point(&centroid, &verts[worst], -opts.reflection);
        let fr = eval(&xr, &mut evals);
        if fr < fs[best] {
            let xe = point(&centroid, &verts[worst], -opts.reflection * opts.expansion);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                verts[worst] = xe;
                fs[worst] = fe;
            } else {
                verts[worst] = xr;
                fs[worst] = fr;
            }
            moved = true;
        } else if fr < fs[second_worst] {
            verts[worst] = xr;
            fs[worst] = fr;
            moved = true;
        } else {
            // contract toward the better of the reflected and worst points
            let (target, f_ref) = if fr < fs[worst] { (xr.clone(), fr) } else { (verts[worst].clone(), fs[worst]) };
            let xc = point(&centroid, &target, opts.contraction);
            let fc = eval(&xc, &mut evals);
            if fc < f_ref {
                verts[worst] = xc;
                fs[worst] = fc;
                moved = true;
            } else {
                let xb = verts[best].clone();
                for &i in &order[1..] {
                    verts[i] = point(&xb, &verts[i], opts.shrink);
                    fs[i] = eval(&verts[i], &mut evals);
                }
                moved = true;
            }
        }
        sort(&mut order, &fs);
        trace.push(fs[order[0]]);
    }

    let best = order[0];
    SimplexOutcome { x: verts[best].clone(), f: fs[best], iterations, evaluations: evals, converged, moved, trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let opts = SimplexOptions { max_iter: 2000, max_evals: 4000, x_tol: 1e-8, f_tol: 1e-14, ..Default::default() };
        let out = minimize(rosenbrock, &[-1.2, 1.0], &[0.1, 0.1], &opts);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4, "{:?}", out.x);
    }

    #[test]
    fn trace_is_monotone() {
        let out = minimize(rosenbrock, &[-1.2, 1.0], &[0.3, 0.3], &SimplexOptions::default());
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.trace.len(), out.iterations + 1);
        assert_eq!(*out.trace.last().unwrap(), out.f);
    }

    #[test]
    fn nan_repels() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) };
        let out = minimize(f, &[0.05], &[-0.1], &SimplexOptions { x_tol: 1e-6, ..Default::default() });
        assert!((out.x[0] - 0.5).abs() < 1e-3, "{out:?}");
    }

    #[test]
    fn degenerate_start_does_not_move() {
        let out = minimize(|x: &[f64]| x[0], &[1.0], &[0.0], &SimplexOptions::default());
        assert!(out.converged);
        assert!(!out.moved);
        assert_eq!(out.iterations, 0);
    }
}
