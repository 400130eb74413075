//! Observed information and delta-method intervals for SAUC.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{expit, logit, quantile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiResult {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub se_sauc: f64,
}

/// Finite-difference step for coordinate value `v`.
#[inline]
pub fn fd_step(v: f64) -> f64 {
    (1e-5 * v.abs()).max(1e-5)
}

/// Negative Hessian of `loglik` at `at`, restricted to the coordinates in `free`.
///
/// Central differences with step `max(1e-5, 1e-5·|θⱼ|)`, symmetrized. Fails
/// with [`Error::NonInvertibleHessian`] unless the result is positive definite.
pub fn observed_information<F>(mut loglik: F, at: &[f64], free: &[usize]) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    let k = free.len();
    let f0 = loglik(at);
    let mut hess = DMatrix::<f64>::zeros(k, k);
    let mut x = at.to_vec();
    let mut eval = |x: &mut Vec<f64>, moves: &[(usize, f64)]| -> f64 {
        for &(j, d) in moves {
            x[j] += d;
        }
        let v = loglik(x);
        for &(j, _) in moves {
            x[j] = at[j];
        }
        v
    };
    for (a, &i) in free.iter().enumerate() {
        let hi = fd_step(at[i]);
        let fp = eval(&mut x, &[(i, hi)]);
        let fm = eval(&mut x, &[(i, -hi)]);
        hess[(a, a)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (b, &j) in free.iter().enumerate().skip(a + 1) {
            let hj = fd_step(at[j]);
            let fpp = eval(&mut x, &[(i, hi), (j, hj)]);
            let fpm = eval(&mut x, &[(i, hi), (j, -hj)]);
            let fmp = eval(&mut x, &[(i, -hi), (j, hj)]);
            let fmm = eval(&mut x, &[(i, -hi), (j, -hj)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    let info = -(&hess + hess.transpose()) * 0.5;
    if info.iter().any(|v| !v.is_finite()) || info.clone().cholesky().is_none() {
        return Err(Error::NonInvertibleHessian);
    }
    Ok(info)
}

/// Inverse of a positive-definite information matrix.
pub fn covariance(info: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    info.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NonInvertibleHessian)
}

/// Central-difference gradient of `f` in the coordinates `free`.
pub fn gradient<F>(mut f: F, at: &[f64], free: &[usize]) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = at.to_vec();
    free.iter()
        .map(|&j| {
            let h = fd_step(at[j]);
            x[j] = at[j] + h;
            let fp = f(&x);
            x[j] = at[j] - h;
            let fm = f(&x);
            x[j] = at[j];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Logit-scale interval `expit(logit(S) ± z·se/(S(1−S)))`.
pub fn ci_from_se(estimate: f64, se_sauc: f64, level: f64) -> Result<CiResult> {
    if !(estimate > 0.0 && estimate < 1.0) {
        return Err(Error::Domain(format!(
            "SAUC estimate must lie in (0, 1), got {estimate}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if !(se_sauc >= 0.0 && se_sauc.is_finite()) {
        return Err(Error::Domain(format!(
            "standard error must be finite and non-negative, got {se_sauc}"
        )));
    }
    let z = quantile(0.5 + 0.5 * level);
    let centre = logit(estimate);
    let half = z * se_sauc / (estimate * (1.0 - estimate));
    Ok(CiResult {
        estimate,
        lo: expit(centre - half),
        hi: expit(centre + half),
        level,
        se_sauc,
    })
}

/// Delta-method interval from the SAUC gradient and the observed information,
/// both expressed in the same free coordinates.
pub fn sauc_ci(
    estimate: f64,
    sauc_grad: &[f64],
    info: &DMatrix<f64>,
    level: f64,
) -> Result<CiResult> {
    assert_eq!(sauc_grad.len(), info.nrows());
    let cov = covariance(info)?;
    let g = nalgebra::DVector::from_column_slice(sauc_grad);
    let var = (g.transpose() * &cov * &g)[(0, 0)];
    ci_from_se(estimate, var.max(0.0).sqrt(), level)
}
