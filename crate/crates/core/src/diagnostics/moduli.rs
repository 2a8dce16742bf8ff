//! The logarithmic stability moduli `η(s) = exp(−(log(−log s))^{1/2})` and
//! `η₁(ε₀) = exp(−C₁(−log ε₀)^{1/2})`.

use crate::error::{Error, Result};

/// `η(s)` for `0 < s < 1/e`.
pub fn eta(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < (-1.0f64).exp()) {
        return Err(Error::validation(format!("eta needs 0 < s < 1/e, got {s}")));
    }
    Ok((-(-s.ln()).ln().sqrt()).exp())
}

/// `η₁(ε₀)` for `0 < ε₀ < 1` and `C₁ > 0`.
pub fn eta1(eps0: f64, c1: f64) -> Result<f64> {
    if !(eps0 > 0.0 && eps0 < 1.0 && c1 > 0.0 && c1.is_finite()) {
        return Err(Error::validation(format!("eta1 needs 0 < eps0 < 1 and C1 > 0, got {eps0}, {c1}")));
    }
    Ok((-c1 * (-eps0.ln()).sqrt()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn closed_forms() {
        assert!((eta((-E).exp()).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((eta((-E.powi(4)).exp()).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        assert!((eta1((-4.0f64).exp(), 1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        assert!(eta((-1.0f64).exp() * (1.0 - 1e-12)).unwrap() > 0.99);
        assert!(eta1(1.0 - 1e-12, 1.0).unwrap() > 0.99);
        assert!(eta(0.5).is_err() && eta(0.0).is_err());
        assert!(eta1(1.0, 1.0).is_err() && eta1(0.5, 0.0).is_err());
    }

    #[test]
    fn strictly_monotone() {
        let n = 1000;
        let top = (-1.0f64).exp();
        let s: Vec<f64> = (1..=n).map(|i| top * i as f64 / (n + 1) as f64).collect();
        let v: Vec<f64> = s.iter().map(|&x| eta(x).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|&x| x > 0.0 && x < 1.0));
        let e: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let w: Vec<f64> = e.iter().map(|&x| eta1(x, 1.5).unwrap()).collect();
        assert!(w.windows(2).all(|p| p[0] < p[1]));
        for c in [0.5, 1.0, 2.0] {
            assert!(eta1(0.1, c).unwrap() > eta1(0.1, c * 1.1).unwrap());
        }
    }
}
