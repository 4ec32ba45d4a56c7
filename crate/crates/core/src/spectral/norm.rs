use super::{bracket, l1_len, SpectralError, SpectralField};

/// Gevrey norm `(sum e^{2 lambda |k,eta|^s} <k,eta>^{2 sigma} |f|^2 d_eta)^(1/2)`.
///
/// The exponential weights are summed with a log-space shift so large `lambda`
/// does not overflow before the square root.
pub fn gevrey_norm(
    field: &SpectralField,
    lambda: f64,
    sigma: f64,
    s: f64,
) -> Result<f64, SpectralError> {
    if !(lambda >= 0.0 && sigma >= 0.0 && s > 0.0 && s <= 1.0) {
        return Err(SpectralError::InvalidArgument(format!(
            "gevrey_norm needs lambda >= 0, sigma >= 0, s in (0, 1]; got ({lambda}, {sigma}, {s})"
        )));
    }
    field.check_finite()?;
    Ok(weighted_norm(field, |k, eta| {
        lambda * l1_len(k, eta).powf(s) + sigma * bracket(k, eta).ln()
    }))
}

/// `(sum e^{2 g(k, eta)} |f|^2 d_eta)^(1/2)` for a log-weight `g`.
pub fn weighted_norm(field: &SpectralField, log_weight: impl Fn(f64, f64) -> f64) -> f64 {
    let grid = field.grid();
    let terms: Vec<(f64, f64)> = field
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(i, c)| {
            let (k, j) = grid.mode(i);
            (2.0 * log_weight(k as f64, grid.eta(j)), c.norm_sqr())
        })
        .collect();
    let shift = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return 0.0;
    }
    let sum: f64 = terms.iter().map(|(lw, a)| (lw - shift).exp() * a).sum();
    (0.5 * ((sum * grid.d_eta()).ln() + shift)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn zero_field() {
        let g = Grid::new(2, 3.0, PI).unwrap();
        assert_eq!(
            gevrey_norm(&SpectralField::zeros(g), 1.0, 2.0, 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_mode_values() {
        let g = Grid::new(3, 4.0, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 0, Complex64::new(1.0, 0.0));
        let n = gevrey_norm(&f, 0.0, 0.0, 1.0).unwrap();
        assert!((n - g.d_eta().sqrt()).abs() < 1e-15);

        let mut f = SpectralField::zeros(g);
        // eta = 1 sits at j = 2 when d_eta = 1/2
        f.set(2, 2, Complex64::new(1.0, 0.0));
        let n = gevrey_norm(&f, 1.0, 2.0, 0.5).unwrap();
        let expect = ((2.0 * 3f64.sqrt()).exp() * 100.0 * g.d_eta()).sqrt();
        assert!((n - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(1, 1.0, PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 0, Complex64::new(f64::NAN, 0.0));
        assert!(gevrey_norm(&f, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn no_overflow_for_large_lambda() {
        let g = Grid::new(4, 500.0, PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(4, 500, Complex64::new(1.0, 0.0));
        let n = gevrey_norm(&f, 0.5, 12.0, 1.0).unwrap();
        assert!(n.is_finite());
        let expect = 0.5 * 504.0 + 12.0 * (1.0 + 504f64 * 504.0).sqrt().ln() + 0.5 * g.d_eta().ln();
        assert!((n.ln() - expect).abs() < 1e-10);
    }
}
