use super::SpectralError;
use std::f64::consts::PI;

/// Truncated lattice `k in [-k_max, k_max]`, `eta_j = j * d_eta` with `|j| <= j_max`.
///
/// The vertical direction is periodized to `[-l_y, l_y)`, so `d_eta = pi / l_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    k_max: usize,
    j_max: usize,
    d_eta: f64,
    l_y: f64,
}

impl Grid {
    pub fn new(k_max: usize, eta_max: f64, l_y: f64) -> Result<Self, SpectralError> {
        if k_max == 0 {
            return Err(SpectralError::InvalidGrid(
                "k_max must be at least 1".into(),
            ));
        }
        if !(eta_max.is_finite() && eta_max > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "eta_max must be positive, got {eta_max}"
            )));
        }
        if !(l_y.is_finite() && l_y > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "l_y must be positive, got {l_y}"
            )));
        }
        let d_eta = PI / l_y;
        // tolerate eta_max landing a hair below a lattice point
        let j_max = (eta_max / d_eta * (1.0 + 1e-12)).floor() as usize;
        if j_max == 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "eta_max={eta_max} is below the lattice spacing {d_eta}"
            )));
        }
        Ok(Self {
            k_max,
            j_max,
            d_eta,
            l_y,
        })
    }

    /// Rebuild a grid from its lattice description (used by snapshot readers).
    pub fn from_lattice(k_max: usize, n_eta: usize, d_eta: f64) -> Result<Self, SpectralError> {
        if n_eta.is_multiple_of(2) || n_eta < 3 {
            return Err(SpectralError::InvalidGrid(format!(
                "n_eta must be odd and >= 3, got {n_eta}"
            )));
        }
        if !(d_eta.is_finite() && d_eta > 0.0) || k_max == 0 {
            return Err(SpectralError::InvalidGrid("bad lattice header".into()));
        }
        Ok(Self {
            k_max,
            j_max: (n_eta - 1) / 2,
            d_eta,
            l_y: PI / d_eta,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
    pub fn j_max(&self) -> usize {
        self.j_max
    }
    pub fn d_eta(&self) -> f64 {
        self.d_eta
    }
    pub fn l_y(&self) -> f64 {
        self.l_y
    }
    pub fn eta_max(&self) -> f64 {
        self.j_max as f64 * self.d_eta
    }
    pub fn n_k(&self) -> usize {
        2 * self.k_max + 1
    }
    pub fn n_eta(&self) -> usize {
        2 * self.j_max + 1
    }
    pub fn len(&self) -> usize {
        self.n_k() * self.n_eta()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eta(&self, j: i64) -> f64 {
        j as f64 * self.d_eta
    }

    pub fn contains(&self, k: i64, j: i64) -> bool {
        k.unsigned_abs() as usize <= self.k_max && j.unsigned_abs() as usize <= self.j_max
    }

    /// Flat row-major index of `(k, j)`; rows are `k`, columns are `j`.
    #[inline]
    pub fn index(&self, k: i64, j: i64) -> usize {
        debug_assert!(self.contains(k, j));
        (k + self.k_max as i64) as usize * self.n_eta() + (j + self.j_max as i64) as usize
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let n = self.n_eta();
        (
            (idx / n) as i64 - self.k_max as i64,
            (idx % n) as i64 - self.j_max as i64,
        )
    }

    /// All `(k, j)` pairs in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    /// Largest `|k, eta|` on the lattice.
    pub fn max_l1(&self) -> f64 {
        self.k_max as f64 + self.eta_max()
    }

    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.k_max == other.k_max && self.j_max == other.j_max && self.d_eta == other.d_eta
    }
}

/// `|k, eta| = |k| + |eta|`.
#[inline]
pub fn l1_len(k: f64, eta: f64) -> f64 {
    k.abs() + eta.abs()
}

/// `<k, eta> = (1 + |k, eta|^2)^(1/2)`.
#[inline]
pub fn bracket(k: f64, eta: f64) -> f64 {
    let r = l1_len(k, eta);
    (1.0 + r * r).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid() {
        let g = Grid::new(1, 1.0, PI).unwrap();
        assert_eq!(g.n_eta(), 3);
        assert_eq!(g.d_eta(), 1.0);
        let etas: Vec<f64> = (-(g.j_max() as i64)..=g.j_max() as i64)
            .map(|j| g.eta(j))
            .collect();
        assert_eq!(etas, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn sample_count() {
        assert_eq!(Grid::new(8, 64.0, PI).unwrap().n_eta(), 129);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(0, 1.0, PI).is_err());
        assert!(Grid::new(1, 0.0, PI).is_err());
        assert!(Grid::new(1, 1.0, -1.0).is_err());
        assert!(Grid::new(1, 0.5, PI).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(3, 5.0, PI).unwrap();
        for (i, (k, j)) in g.modes().enumerate() {
            assert_eq!(g.index(k, j), i);
        }
    }
}
