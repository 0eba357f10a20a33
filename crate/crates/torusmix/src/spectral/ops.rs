use ndarray::{s, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::fft::next_fast_size;
use super::field::SpectralField;

const TAU: f64 = std::f64::consts::TAU;

/// One nonzero Fourier mode of a (vector) field: wavevector plus one
/// complex coefficient per component.
#[derive(Debug, Clone, Copy)]
pub struct SparseMode {
    pub k: [i32; 3],
    pub coeff: [Complex64; 3],
}

/// Pointwise product of two fields with the same cutoff, computed on a
/// zero-padded grid (>= 3/2 padding per axis) and truncated back to the
/// common cutoff. Exact for the retained modes: the padded grid is large
/// enough that no aliased copy of the true convolution lands inside the band.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: g.dim(),
        });
    }
    if f.cutoff() != g.cutoff() {
        return Err(Error::CutoffMismatch {
            left: f.cutoff(),
            right: g.cutoff(),
        });
    }
    product_padded(f, g, f.cutoff())
}

/// General padded-grid product with output cutoff `n_out`. Alias-free for all
/// retained modes provided `m >= n_f + n_g + n_out + 1`.
pub(crate) fn product_padded(
    f: &SpectralField,
    g: &SpectralField,
    n_out: usize,
) -> Result<SpectralField> {
    let required = (f.cutoff() + g.cutoff() + n_out + 1).max(2 * n_out + 1);
    let m = next_fast_size(required);
    let fg = f.to_grid(m)?;
    let gg = g.to_grid(m)?;
    let mut prod = fg.values;
    prod.zip_mut_with(&gg.values, |a, b| *a *= b);
    // The product of zero-mean fields generally has a mean; it is dropped by
    // the zero-mean spectral storage.
    super::grid::GridField::from_raw(f.dim(), m, prod).to_spectral(n_out)
}

/// Exact truncated convolution of a sparse field (given by its nonzero modes)
/// with a dense field: `(fg)_k = (2pi)^{-d/2} sum_m c_m g_{k - k_m}`.
/// Identical to the padded-grid product, at cost `O(#modes * lattice)`.
pub fn product_sparse(
    modes: &[(super::field::Wavevector, Complex64)],
    g: &SpectralField,
    n_out: usize,
) -> SpectralField {
    let mut out = SpectralField::zero(g.dim(), n_out).expect("valid dims");
    let scale = TAU.powf(-(g.dim() as f64) / 2.0);
    for &(km, c) in modes {
        accumulate_shifted(&mut out, g, km, |_kg, gv| gv * (c * scale));
    }
    zero_mean(&mut out);
    out
}

/// Advective convolution `u . grad g` for a sparse vector field `u` given by
/// [`SparseMode`] entries: `(u.grad g)_k = (2pi)^{-d/2} sum_m sum_i c_{m,i}
/// i (k - k_m)_i g_{k - k_m}`. The zero mode of the result is dropped (it
/// vanishes identically for divergence-free `u`).
pub fn advect_sparse(modes: &[SparseMode], g: &SpectralField, n_out: usize) -> SpectralField {
    let mut out = SpectralField::zero(g.dim(), n_out).expect("valid dims");
    let scale = TAU.powf(-(g.dim() as f64) / 2.0);
    for mode in modes {
        let c = mode.coeff;
        accumulate_shifted(&mut out, g, mode.k, |kg, gv| {
            let dot = c[0] * kg[0] as f64 + c[1] * kg[1] as f64 + c[2] * kg[2] as f64;
            gv * (Complex64::new(0.0, 1.0) * dot * scale)
        });
    }
    zero_mean(&mut out);
    out
}

/// Accumulates `out[k] += f(k - km, g[k - km])` over the overlap of the two
/// lattices. The weight closure receives the source wavevector.
fn accumulate_shifted(
    out: &mut SpectralField,
    g: &SpectralField,
    km: [i32; 3],
    weight: impl Fn([i32; 3], Complex64) -> Complex64,
) {
    let no = out.cutoff() as i32;
    let ng = g.cutoff() as i32;
    let d = g.dim();
    // Per-axis overlap: k in [-no, no], k - km in [-ng, ng].
    let mut lo = [0i32; 3];
    let mut hi = [0i32; 3];
    for i in 0..3 {
        if i == 2 && d == 2 {
            if km[2] != 0 {
                return;
            }
            lo[2] = 0;
            hi[2] = 0;
        } else {
            lo[i] = (-no).max(-ng + km[i]);
            hi[i] = no.min(ng + km[i]);
            if lo[i] > hi[i] {
                return;
            }
        }
    }
    let third = if d == 3 {
        ((lo[2] + no) as usize, (lo[2] - km[2] + ng) as usize)
    } else {
        (0, 0)
    };
    let len = [
        (hi[0] - lo[0] + 1) as usize,
        (hi[1] - lo[1] + 1) as usize,
        (hi[2] - lo[2] + 1) as usize,
    ];
    let os = [(lo[0] + no) as usize, (lo[1] + no) as usize, third.0];
    let gs = [
        (lo[0] - km[0] + ng) as usize,
        (lo[1] - km[1] + ng) as usize,
        third.1,
    ];
    let mut out_slice = out.coeffs.slice_mut(s![
        os[0]..os[0] + len[0],
        os[1]..os[1] + len[1],
        os[2]..os[2] + len[2]
    ]);
    let g_slice = g.coeffs.slice(s![
        gs[0]..gs[0] + len[0],
        gs[1]..gs[1] + len[1],
        gs[2]..gs[2] + len[2]
    ]);
    let kg0 = lo[0] - km[0];
    let kg1 = lo[1] - km[1];
    let kg2 = if d == 3 { lo[2] - km[2] } else { 0 };
    Zip::indexed(&mut out_slice)
        .and(&g_slice)
        .for_each(|(r0, r1, r2), o, &gv| {
            if gv.norm_sqr() == 0.0 {
                return;
            }
            let kg = [kg0 + r0 as i32, kg1 + r1 as i32, kg2 + r2 as i32];
            *o += weight(kg, gv);
        });
}

fn zero_mean(f: &mut SpectralField) {
    let n = f.cutoff();
    let mid = if f.dim() == 3 { n } else { 0 };
    f.coeffs[[n, n, mid]] = Complex64::default();
}
