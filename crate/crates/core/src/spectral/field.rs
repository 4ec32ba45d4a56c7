use super::{Grid, SpectralError};
use num_complex::Complex64;

/// Complex Fourier coefficients on a [`Grid`], tagged with the moving-frame time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            time: 0.0,
        }
    }

    pub fn from_coeffs(
        grid: Grid,
        coeffs: Vec<Complex64>,
        time: f64,
    ) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs, time })
    }

    /// Build a field from a per-mode function of `(k, eta)`.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(i64, f64) -> Complex64) -> Self {
        let coeffs = grid.modes().map(|(k, j)| f(k, grid.eta(j))).collect();
        Self {
            grid,
            coeffs,
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, k: i64, j: i64) -> Complex64 {
        if self.grid.contains(k, j) {
            self.coeffs[self.grid.index(k, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, k: i64, j: i64, v: Complex64) {
        let i = self.grid.index(k, j);
        self.coeffs[i] = v;
    }

    /// Set a mode together with its conjugate partner so the field stays real.
    pub fn set_real_mode(&mut self, k: i64, j: i64, v: Complex64) {
        if k == 0 && j == 0 {
            self.set(0, 0, Complex64::new(v.re, 0.0));
        } else {
            self.set(k, j, v);
            self.set(-k, -j, v.conj());
        }
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<(), SpectralError> {
        if self.grid.same_lattice(&other.grid) {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }

    pub fn check_finite(&self) -> Result<(), SpectralError> {
        match self
            .coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            None => Ok(()),
            Some(i) => {
                let (k, j) = self.grid.mode(i);
                Err(SpectralError::NonFinite { k, j })
            }
        }
    }

    /// Apply a real multiplier `m(k, eta)` to every coefficient.
    pub fn multiplied(&self, m: impl Fn(i64, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let (k, j) = self.grid.mode(i);
            *c *= m(k, self.grid.eta(j));
        }
        out
    }

    /// Apply a complex multiplier `m(k, eta)` to every coefficient.
    pub fn multiplied_complex(&self, m: impl Fn(i64, f64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let (k, j) = self.grid.mode(i);
            *c *= m(k, self.grid.eta(j));
        }
        out
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        debug_assert!(self.grid.same_lattice(&other.grid));
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o * a;
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self, SpectralError> {
        self.check_grid(other)?;
        let mut out = self.clone();
        out.axpy(1.0, other);
        Ok(out)
    }

    /// Discrete L2 norm, `(sum |f|^2 d_eta)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.d_eta()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `<self, other> = sum conj(self) * other * d_eta`.
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        debug_assert!(self.grid.same_lattice(&other.grid));
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.d_eta()
    }

    /// Largest deviation from `f(-k, -eta) = conj(f(k, eta))`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        self.grid
            .modes()
            .map(|(k, j)| (self.get(k, j) - self.get(-k, -j).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// L2 norm of the `k = 0` row.
    pub fn zero_row_norm(&self) -> f64 {
        let n = self.grid.n_eta();
        let start = self.grid.index(0, -(self.grid.j_max() as i64));
        (self.coeffs[start..start + n]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            * self.grid.d_eta())
        .sqrt()
    }

    /// Physical value `(d_eta / 2 pi) sum e^{i(k x + eta y)} f(k, eta)` at one point.
    pub fn eval_at(&self, x: f64, y: f64) -> Complex64 {
        let sum: Complex64 = self
            .grid
            .modes()
            .zip(&self.coeffs)
            .map(|((k, j), c)| c * Complex64::from_polar(1.0, k as f64 * x + self.grid.eta(j) * y))
            .sum();
        sum * (self.grid.d_eta() / (2.0 * std::f64::consts::PI))
    }

    pub fn clear_zero_row(&mut self) {
        let n = self.grid.n_eta();
        let start = self.grid.index(0, -(self.grid.j_max() as i64));
        self.coeffs[start..start + n]
            .iter_mut()
            .for_each(|c| *c = Complex64::new(0.0, 0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_norm() {
        let g = Grid::new(2, 4.0, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 0, Complex64::new(1.0, 0.0));
        assert!((f.l2_norm() - g.d_eta().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn real_mode_is_symmetric() {
        let g = Grid::new(2, 4.0, PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(1, -3, Complex64::new(0.3, -0.7));
        assert_eq!(f.conjugate_asymmetry(), 0.0);
        f.set(2, 1, Complex64::new(1.0, 0.0));
        assert!(f.conjugate_asymmetry() > 0.5);
    }

    #[test]
    fn zero_row() {
        let g = Grid::new(1, 2.0, PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(0, 1, Complex64::new(3.0, 4.0));
        assert!((f.zero_row_norm() - 5.0).abs() < 1e-14);
        f.clear_zero_row();
        assert_eq!(f.zero_row_norm(), 0.0);
    }
}
