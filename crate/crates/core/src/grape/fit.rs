//! `y = b x^a` by least squares in log-log coordinates.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    /// Coefficient of determination of the log-log fit; `None` when `ln y`
    /// has no variance.
    pub r2: Option<f64>,
    /// `1/a`, absent for `a = 0`.
    pub inverse_power: Option<f64>,
}

impl PowerLawFit {
    pub fn is_degenerate(&self) -> bool {
        self.r2.is_none()
    }
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidArgument(format!("power-law data must be positive, got {p:?}")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("all x values coincide".into()));
    }
    let a = sxy / sxx;
    let b = (my - a * mx).exp();
    let scale = ly.iter().map(|y| y.abs()).fold(1.0, f64::max);
    let r2 = if syy <= (1e-14 * scale).powi(2) * n {
        None
    } else {
        Some((sxy * sxy / (sxx * syy)).clamp(0.0, 1.0))
    };
    let a = if r2.is_none() { 0.0 } else { a };
    Ok(PowerLawFit { a, b, r2, inverse_power: (a != 0.0).then(|| 1.0 / a) })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn exact_power() {
        let pts: Vec<_> = [0.1, 0.3, 1.0, 2.5].iter().map(|&x: &f64| (x, 2.0 * x.sqrt())).collect();
        let f = power_law_fit(&pts).unwrap();
        assert!((f.a - 0.5).abs() < 1e-12 && (f.b - 2.0).abs() < 1e-12);
        assert!((f.r2.unwrap() - 1.0).abs() < 1e-12);
        assert!((f.inverse_power.unwrap() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn constant_is_degenerate() {
        let f = power_law_fit(&[(0.1, 3.0), (0.2, 3.0), (0.4, 3.0)]).unwrap();
        assert!(f.is_degenerate());
        assert_eq!(f.a, 0.0);
        assert_eq!(f.inverse_power, None);
        assert!((f.b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(power_law_fit(&[(0.1, 1.0), (0.2, 2.0)]).is_err());
        assert!(power_law_fit(&[(0.1, 1.0), (0.2, -2.0), (0.3, 1.0)]).is_err());
        assert!(power_law_fit(&[(0.0, 1.0), (0.2, 2.0), (0.3, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn r2_in_unit_interval(ys in proptest::collection::vec(0.01f64..100.0, 3..12)) {
            let pts: Vec<_> = ys.iter().enumerate().map(|(k, &y)| ((k + 1) as f64, y)).collect();
            let f = power_law_fit(&pts).unwrap();
            if let Some(r2) = f.r2 {
                prop_assert!((0.0..=1.0).contains(&r2));
            }
        }
    }
}
