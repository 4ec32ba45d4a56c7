use super::{Grid, SpectralError, SpectralField};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Smallest `m >= n` whose only prime factors are 2, 3 and 5.
fn smooth_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Transform plan between lattice coefficients and a physical sample grid.
///
/// With `dealias` the sample grid has at least `3K+1` by `3J+1` points, which makes
/// every pointwise product an exact truncated lattice convolution. Without it the
/// minimal `(2K+1) x (2J+1)` grid is used and products alias.
pub struct ProductPlan {
    grid: Grid,
    mx: usize,
    my: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ProductPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductPlan")
            .field("mx", &self.mx)
            .field("my", &self.my)
            .finish()
    }
}

impl ProductPlan {
    pub fn new(grid: Grid, dealias: bool) -> Self {
        let (mx, my) = if dealias {
            (
                smooth_len(3 * grid.k_max() + 1),
                smooth_len(3 * grid.j_max() + 1),
            )
        } else {
            (grid.n_k(), grid.n_eta())
        };
        let mut planner = FftPlanner::new();
        Self {
            grid,
            mx,
            my,
            fwd_x: planner.plan_fft_forward(mx),
            inv_x: planner.plan_fft_inverse(mx),
            fwd_y: planner.plan_fft_forward(my),
            inv_y: planner.plan_fft_inverse(my),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.mx, self.my)
    }

    /// Physical sample coordinates `(x_a, y_b)` of the transform grid.
    pub fn sample_point(&self, a: usize, b: usize) -> (f64, f64) {
        (
            2.0 * PI * a as f64 / self.mx as f64,
            2.0 * self.grid.l_y() * b as f64 / self.my as f64,
        )
    }

    /// Unnormalized synthesis `sum_{k,j} c e^{i(k x_a + eta_j y_b)}`, row-major in `a`.
    pub fn synthesize(&self, field: &SpectralField) -> Vec<Complex64> {
        let (mx, my) = (self.mx, self.my);
        let mut buf = vec![Complex64::new(0.0, 0.0); mx * my];
        let g = &self.grid;
        for (i, c) in field.coeffs().iter().enumerate() {
            let (k, j) = g.mode(i);
            let a = k.rem_euclid(mx as i64) as usize;
            let b = j.rem_euclid(my as i64) as usize;
            buf[a * my + b] += *c;
        }
        self.transform(&mut buf, true);
        buf
    }

    /// Inverse of [`synthesize`](Self::synthesize), truncated to the lattice.
    pub fn analyze(&self, mut buf: Vec<Complex64>, time: f64) -> SpectralField {
        let (mx, my) = (self.mx, self.my);
        self.transform(&mut buf, false);
        let norm = 1.0 / (mx * my) as f64;
        let g = self.grid;
        let coeffs = g
            .modes()
            .map(|(k, j)| {
                let a = k.rem_euclid(mx as i64) as usize;
                let b = j.rem_euclid(my as i64) as usize;
                buf[a * my + b] * norm
            })
            .collect();
        SpectralField::from_coeffs(g, coeffs, time).expect("lattice size")
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let (mx, my) = (self.mx, self.my);
        let (fx, fy) = if inverse {
            (&self.inv_x, &self.inv_y)
        } else {
            (&self.fwd_x, &self.fwd_y)
        };
        fy.process(buf);
        let mut col = vec![Complex64::new(0.0, 0.0); mx];
        for b in 0..my {
            for a in 0..mx {
                col[a] = buf[a * my + b];
            }
            fx.process(&mut col);
            for a in 0..mx {
                buf[a * my + b] = col[a];
            }
        }
    }

    /// Lattice convolution `(f * g)_{k,j} = sum f_{k',j'} g_{k-k',j-j'}` through the transform grid.
    pub fn convolve(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let a = self.synthesize(f);
        let mut b = self.synthesize(g);
        b.iter_mut().zip(&a).for_each(|(x, y)| *x *= y);
        self.analyze(b, f.time)
    }

    /// Spectral coefficients of the physical product `f g`, i.e. `(d_eta / 2 pi) (f * g)`.
    pub fn product(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let mut out = self.convolve(f, g);
        out.scale(self.grid.d_eta() / (2.0 * PI));
        out
    }

    /// `sum_i (d_eta / 2 pi) (a_i * b_i)` with a single analysis transform.
    pub fn sum_of_products(
        &self,
        pairs: &[(&SpectralField, &SpectralField)],
        time: f64,
    ) -> SpectralField {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.mx * self.my];
        for (a, b) in pairs {
            let pa = self.synthesize(a);
            let pb = self.synthesize(b);
            acc.iter_mut()
                .zip(pa.iter().zip(&pb))
                .for_each(|(s, (x, y))| *s += x * y);
        }
        let mut out = self.analyze(acc, time);
        out.scale(self.grid.d_eta() / (2.0 * PI));
        out
    }
}

/// Truncated lattice convolution computed through a dealiased transform grid.
pub fn convolve_fields(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    f.check_grid(g)?;
    Ok(ProductPlan::new(*f.grid(), true).convolve(f, g))
}

/// Truncated lattice convolution by direct summation, `O(n^2)`.
pub fn convolve_direct(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    f.check_grid(g)?;
    let grid = *f.grid();
    let (kk, jj) = (grid.k_max() as i64, grid.j_max() as i64);
    let mut out = SpectralField::zeros(grid);
    out.time = f.time;
    let nz: Vec<(i64, i64, Complex64)> = grid
        .modes()
        .zip(f.coeffs())
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|((k, j), c)| (k, j, *c))
        .collect();
    for (k, j) in grid.modes() {
        let mut s = Complex64::new(0.0, 0.0);
        for &(k1, j1, c) in &nz {
            let (k2, j2) = (k - k1, j - j1);
            if k2.abs() <= kk && j2.abs() <= jj {
                s += c * g.get(k2, j2);
            }
        }
        out.set(k, j, s);
    }
    Ok(out)
}
