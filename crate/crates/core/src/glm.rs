//! Binomial logistic regression without intercept, fitted by iteratively
//! reweighted least squares with step halving.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Grouped binomial observations: row `r` of `x` has `successes[r]` out of
/// `trials[r]`.
#[derive(Debug, Clone)]
pub struct BinomialData {
    pub x: DMatrix<f64>,
    pub successes: Vec<f64>,
    pub trials: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct IrlsOptions {
    pub max_iterations: usize,
    /// Converged once `max |beta_new - beta_old|` falls below this.
    pub tol: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        IrlsOptions {
            max_iterations: 200,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GlmFit {
    pub beta: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub deviance: f64,
}

/// Logistic function, written to stay accurate for large `|eta|`.
pub fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn deviance(data: &BinomialData, eta: &DVector<f64>) -> f64 {
    let mut dev = 0.0;
    for r in 0..eta.len() {
        let (y, m) = (data.successes[r], data.trials[r]);
        // -log-likelihood contributions written via softplus for stability
        let e = eta[r];
        let softplus = if e > 0.0 {
            e + (-e).exp().ln_1p()
        } else {
            e.exp().ln_1p()
        };
        dev += m * softplus - y * e;
    }
    2.0 * dev
}

pub fn fit_binomial_logit(data: &BinomialData, opts: &IrlsOptions) -> Result<GlmFit> {
    let (nobs, q) = data.x.shape();
    if data.successes.len() != nobs || data.trials.len() != nobs {
        return Err(Error::ShapeMismatch(
            "response length differs from design rows".into(),
        ));
    }
    let mut beta = DVector::zeros(q);
    let mut eta = DVector::zeros(nobs);
    let mut dev = deviance(data, &eta);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let mut xtwx = DMatrix::zeros(q, q);
        let mut xtwz = DVector::zeros(q);
        for r in 0..nobs {
            let m = data.trials[r];
            let mu = logistic(eta[r]);
            let w = m * mu * (1.0 - mu);
            if w <= 0.0 {
                continue;
            }
            let z = eta[r] + (data.successes[r] - m * mu) / w;
            let row = data.x.row(r);
            for a in 0..q {
                let xa = row[a];
                if xa == 0.0 {
                    continue;
                }
                xtwz[a] += w * xa * z;
                for b in 0..q {
                    xtwx[(a, b)] += w * xa * row[b];
                }
            }
        }
        let target = crate::linalg::cholesky_checked(xtwx)
            .ok_or(Error::SingularSystem)?
            .solve(&xtwz);

        let mut step = 1.0;
        let mut candidate;
        let mut cand_eta;
        let mut cand_dev;
        loop {
            candidate = &beta + (&target - &beta) * step;
            cand_eta = &data.x * &candidate;
            cand_dev = deviance(data, &cand_eta);
            if cand_dev <= dev * (1.0 + 1e-12) + 1e-12 || step < 1e-6 {
                break;
            }
            step *= 0.5;
        }
        let change = (&candidate - &beta).amax();
        beta = candidate;
        eta = cand_eta;
        dev = cand_dev;
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(GlmFit {
        beta,
        iterations,
        converged,
        deviance: dev,
    })
}

/// Pearson dispersion `sum (y - m p)^2 / (m p (1 - p)) / df`; NaN when `df <= 0`.
pub fn pearson_dispersion(data: &BinomialData, beta: &DVector<f64>, df: isize) -> f64 {
    if df <= 0 {
        return f64::NAN;
    }
    let eta = &data.x * beta;
    let mut chi2 = 0.0;
    for r in 0..eta.len() {
        let m = data.trials[r];
        let mu = logistic(eta[r]);
        let var = m * mu * (1.0 - mu);
        if var > 0.0 {
            chi2 += (data.successes[r] - m * mu).powi(2) / var;
        }
    }
    chi2 / df as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_group_closed_form() {
        let data = BinomialData {
            x: DMatrix::from_element(1, 1, 1.0),
            successes: vec![3.0],
            trials: vec![4.0],
        };
        let fit = fit_binomial_logit(&data, &IrlsOptions::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.beta[0] - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn logistic_is_symmetric_and_stable() {
        assert_eq!(logistic(0.0), 0.5);
        assert!((logistic(2.0) + logistic(-2.0) - 1.0).abs() < 1e-15);
        assert!(logistic(-800.0) >= 0.0 && logistic(800.0) <= 1.0);
    }

    #[test]
    fn zero_design_is_singular() {
        let data = BinomialData {
            x: DMatrix::zeros(3, 1),
            successes: vec![1.0, 0.0, 1.0],
            trials: vec![1.0; 3],
        };
        assert!(matches!(
            fit_binomial_logit(&data, &IrlsOptions::default()),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn dispersion_nan_without_residual_df() {
        let data = BinomialData {
            x: DMatrix::from_element(1, 1, 1.0),
            successes: vec![3.0],
            trials: vec![4.0],
        };
        assert!(pearson_dispersion(&data, &DVector::from_element(1, 0.0), 0).is_nan());
        // at beta = 0 every group contributes (y - m/2)^2 / (m/4)
        let phi = pearson_dispersion(&data, &DVector::from_element(1, 0.0), 1);
        assert!((phi - 1.0).abs() < 1e-15);
    }
}
