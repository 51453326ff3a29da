//! Least-squares lines and power laws.

use serde::{Deserialize, Serialize};

use crate::dynamics::ZenoPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub n: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("{n} points")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite input".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
        n,
    })
}

/// Power law `y ≈ C·x^p`, fitted on logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `(x, y)` in input order.
    pub points: Vec<(f64, f64)>,
    pub exponent: f64,
    /// `log C`.
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "power law needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::DegenerateFit(
            "power law needs positive abscissae and ordinates".into(),
        ));
    }
    if points.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::DegenerateFit(
            "abscissae must be strictly decreasing".into(),
        ));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    Ok(ScalingFit {
        points: points.to_vec(),
        exponent: fit.slope,
        intercept: fit.intercept,
        stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
    })
}

/// Order of the projected-vs-symmetrized error in the projection interval.
pub fn convergence_order(study: &[ZenoPoint]) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = study.iter().map(|p| (p.interval, p.error)).collect();
    power_law_fit(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
        assert!(f.slope_stderr < 1e-12);
    }

    #[test]
    fn noisy_line_by_hand() {
        // Residuals about y = 1 + x are (+1, −1, −1, +1): SS_res = 4,
        // SS_tot = 9, Σ(x − x̄)² = 5.
        let f = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[2.0, 1.0, 2.0, 5.0]).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 5.0 / 9.0).abs() < 1e-12);
        assert!((f.slope_stderr - 0.4f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn synthetic_power_laws() {
        for p in [1.0, 2.0, 0.5] {
            let pts: Vec<(f64, f64)> = (0..5)
                .map(|k| 0.5f64.powi(k))
                .map(|x| (x, 3.0 * x.powf(p)))
                .collect();
            let f = power_law_fit(&pts).unwrap();
            assert!((f.exponent - p).abs() < 1e-6);
            assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn order_from_study() {
        let study: Vec<ZenoPoint> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&dt| ZenoPoint {
                interval: dt,
                error: 0.7 * dt,
            })
            .collect();
        assert!((convergence_order(&study).unwrap().exponent - 1.0).abs() < 1e-6);
        assert!(convergence_order(&study[..2]).is_err());
    }

    #[test]
    fn abscissae_must_decrease() {
        assert!(power_law_fit(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(power_law_fit(&[(3.0, 1.0), (2.0, 0.0), (1.0, 3.0)]).is_err());
    }
}
