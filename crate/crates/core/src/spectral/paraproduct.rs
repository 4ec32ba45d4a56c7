use super::{
    convolve_direct, dyadic_project, Dyadic, ProductPlan, Selector, SpectralError, SpectralField,
};
use std::f64::consts::PI;

/// The three paraproduct families of a product `f g`.
#[derive(Debug, Clone)]
pub struct ParaproductSplit {
    /// `f_{<N/8} g_N`, labelled by `N`.
    pub low_high: Vec<(Dyadic, SpectralField)>,
    /// `f_N g_{<N/8}`, labelled by `N`.
    pub high_low: Vec<(Dyadic, SpectralField)>,
    /// `f_N g_{N'}` with `N/8 <= N' <= 8N`, labelled by `(N, N')`.
    pub remainder: Vec<(Dyadic, Dyadic, SpectralField)>,
}

impl ParaproductSplit {
    /// Sum of every member of every family.
    pub fn total(&self) -> SpectralField {
        let mut it = self
            .low_high
            .iter()
            .map(|(_, f)| f)
            .chain(self.high_low.iter().map(|(_, f)| f))
            .chain(self.remainder.iter().map(|(_, _, f)| f));
        let mut acc = it.next().expect("at least one block").clone();
        for f in it {
            acc.axpy(1.0, f);
        }
        acc
    }
}

/// Split the physical product `f g` into low-high, high-low and remainder families.
///
/// Each member is a spectral product computed on a dealiased grid, so their sum is
/// the truncated product exactly.
pub fn paraproduct_split(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<ParaproductSplit, SpectralError> {
    f.check_grid(g)?;
    let plan = ProductPlan::new(*f.grid(), true);
    Ok(split_with(f, g, |a, b| plan.product(a, b)))
}

/// [`paraproduct_split`] with every member computed by direct lattice convolution.
///
/// Transform round-off sits at an absolute floor set by the largest coefficient; the
/// direct sums keep each output mode accurate relative to itself, which matters when
/// the members are later multiplied by steeply growing weights.
pub fn paraproduct_split_direct(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<ParaproductSplit, SpectralError> {
    f.check_grid(g)?;
    let scale = f.grid().d_eta() / (2.0 * PI);
    Ok(split_with(f, g, |a, b| {
        let mut out = convolve_direct(a, b).expect("same lattice");
        out.scale(scale);
        out
    }))
}

fn split_with(
    f: &SpectralField,
    g: &SpectralField,
    product: impl Fn(&SpectralField, &SpectralField) -> SpectralField,
) -> ParaproductSplit {
    let blocks = Dyadic::up_to(f.grid().max_l1());
    let fb: Vec<_> = blocks
        .iter()
        .map(|&n| dyadic_project(f, Selector::Block(n)))
        .collect();
    let gb: Vec<_> = blocks
        .iter()
        .map(|&n| dyadic_project(g, Selector::Block(n)))
        .collect();
    let mut split = ParaproductSplit {
        low_high: vec![],
        high_low: vec![],
        remainder: vec![],
    };
    for (i, &n) in blocks.iter().enumerate() {
        if let Some(lo) = n.eighth().filter(|m| m.0 > -1) {
            let f_lo = dyadic_project(f, Selector::Below(lo));
            let g_lo = dyadic_project(g, Selector::Below(lo));
            split.low_high.push((n, product(&f_lo, &gb[i])));
            split.high_low.push((n, product(&fb[i], &g_lo)));
        }
        for (j, &m) in blocks.iter().enumerate() {
            if (m.0 - n.0).abs() <= 3 {
                split.remainder.push((n, m, product(&fb[i], &gb[j])));
            }
        }
    }
    for member in split
        .low_high
        .iter_mut()
        .map(|x| &mut x.1)
        .chain(split.high_low.iter_mut().map(|x| &mut x.1))
        .chain(split.remainder.iter_mut().map(|x| &mut x.2))
    {
        member.time = f.time;
    }
    split
}
