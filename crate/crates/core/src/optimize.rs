//! Box-constrained maximization and bracketing root finding.
//!
//! [`maximize`] runs a Nelder–Mead simplex whose trial points are projected
//! onto the box, restarts it from the incumbent, then polishes with
//! projected gradient ascent on finite-difference gradients. Objective values
//! that are NaN are treated as -∞, so infeasible evaluations simply lose.

use crate::error::{Error, Result};

/// Closed box `lower[j] <= x[j] <= upper[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l < u),
            "degenerate bounds"
        );
        Bounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn project(&self, x: &mut [f64]) {
        for ((v, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(l, u);
        }
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    /// Coordinate `j` of `x` sits within `tol` (relative to the box width) of a bound.
    pub fn at_bound(&self, x: &[f64], j: usize, tol: f64) -> bool {
        let w = self.width(j);
        (x[j] - self.lower[j]).abs() <= tol * w || (self.upper[j] - x[j]).abs() <= tol * w
    }
}

#[derive(Debug, Clone)]
pub struct MaximizeOptions {
    /// Relative spread of simplex values at convergence.
    pub ftol_rel: f64,
    /// Largest vertex distance (sup norm) at convergence.
    pub xtol: f64,
    /// Evaluation budget for each simplex run.
    pub max_evals: usize,
    /// Simplex runs after the first one, each started from the incumbent.
    pub restarts: usize,
    /// Initial simplex edge as a fraction of the box width.
    pub initial_step: f64,
    /// Maximum projected-gradient polishing iterations.
    pub polish_iters: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            ftol_rel: 1e-10,
            xtol: 1e-8,
            max_evals: 4000,
            restarts: 2,
            initial_step: 0.1,
            polish_iters: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    /// Negated objective for the minimizing simplex; NaN maps to +∞.
    fn neg(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    }
}

/// Maximize `f` over `bounds` starting from `x0` (projected into the box).
pub fn maximize<F>(f: F, x0: &[f64], bounds: &Bounds, opts: &MaximizeOptions) -> Result<Optimum>
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), bounds.dim());
    let mut obj = Counted { f, evals: 0 };
    let mut x = x0.to_vec();
    bounds.project(&mut x);
    let mut fx = obj.neg(&x);

    if !fx.is_finite() {
        // Fallback starts: box centre, then points pulled halfway towards it.
        let centre: Vec<f64> = (0..bounds.dim())
            .map(|j| 0.5 * (bounds.lower[j] + bounds.upper[j]))
            .collect();
        let mut found = false;
        for frac in [0.5, 1.0] {
            let cand: Vec<f64> = x
                .iter()
                .zip(&centre)
                .map(|(a, c)| a + frac * (c - a))
                .collect();
            let fc = obj.neg(&cand);
            if fc.is_finite() {
                x = cand;
                fx = fc;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::OptimizationFailed(
                "objective is not finite at the initial point or any fallback start".into(),
            ));
        }
    }

    let mut converged = false;
    for _ in 0..=opts.restarts {
        let run = nelder_mead(&mut obj, &x, fx, bounds, opts);
        if run.value <= fx {
            x = run.x;
            fx = run.value;
        }
        converged = run.converged;
    }

    let (xp, fp) = polish(&mut obj, x, fx, bounds, opts.polish_iters);

    Ok(Optimum {
        x: xp,
        value: -fp,
        converged: converged && fp.is_finite(),
        evaluations: obj.evals,
    })
}

struct RunResult {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counted<F>,
    x0: &[f64],
    f0: f64,
    bounds: &Bounds,
    opts: &MaximizeOptions,
) -> RunResult {
    let n = x0.len();
    let budget_end = obj.evals + opts.max_evals;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for j in 0..n {
        let mut v = x0.to_vec();
        let step = opts.initial_step * bounds.width(j);
        v[j] = if v[j] + step <= bounds.upper[j] {
            v[j] + step
        } else {
            v[j] - step
        };
        bounds.project(&mut v);
        values.push(obj.neg(&v));
        simplex.push(v);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        let mut p: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect();
        bounds.project(&mut p);
        p
    };

    while obj.evals < budget_end {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];

        let fb = values[best];
        let spread = values[worst] - fb;
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if fb.is_finite() && spread <= opts.ftol_rel * (fb.abs() + 1e-20) && diameter <= opts.xtol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v / n as f64;
            }
        }

        let xr = point(&centroid, &simplex[worst], -1.0);
        let fr = obj.neg(&xr);
        if fr < fb {
            let xe = point(&centroid, &simplex[worst], -2.0);
            let fe = obj.neg(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = point(&centroid, &xr, 0.5);
            let fc = obj.neg(&xc);
            (xc, fc)
        } else {
            let xc = point(&centroid, &simplex[worst], 0.5);
            let fc = obj.neg(&xc);
            (xc, fc)
        };
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let xb = simplex[best].clone();
        for &i in order.iter().skip(1) {
            let v = point(&xb, &simplex[i], 0.5);
            values[i] = obj.neg(&v);
            simplex[i] = v;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    RunResult {
        x: simplex[best].clone(),
        value: values[best],
        converged,
    }
}

/// Projected gradient steps with a backtracking line search. `fx` is the
/// negated objective at `x`; returns the improved pair.
fn polish<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counted<F>,
    mut x: Vec<f64>,
    mut fx: f64,
    bounds: &Bounds,
    iters: usize,
) -> (Vec<f64>, f64) {
    let n = x.len();
    for _ in 0..iters {
        // Ascent direction = -(gradient of the negated objective).
        let mut dir = vec![0.0; n];
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let up = (x[j] + h).min(bounds.upper[j]);
            let dn = (x[j] - h).max(bounds.lower[j]);
            if up <= dn {
                continue;
            }
            let mut xp = x.clone();
            xp[j] = up;
            let fp = obj.neg(&xp);
            xp[j] = dn;
            let fm = obj.neg(&xp);
            let g = -(fp - fm) / (up - dn);
            if !g.is_finite() {
                continue;
            }
            let blocked =
                (x[j] <= bounds.lower[j] && g < 0.0) || (x[j] >= bounds.upper[j] && g > 0.0);
            if !blocked {
                dir[j] = g;
            }
        }
        let gnorm = dir.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let mut t = 0.1 / gnorm;
        let mut improved = false;
        for _ in 0..30 {
            let mut cand: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            bounds.project(&mut cand);
            let fc = obj.neg(&cand);
            if fc < fx {
                let gain = fx - fc;
                x = cand;
                fx = fc;
                improved = gain > 1e-13 * (fx.abs() + 1.0);
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}

/// Brent's method for a root of `f` in `[a, b]`, where `f(a)` and `f(b)` differ in sign.
pub fn brent_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return None;
        }
    }
    Some(b)
}
