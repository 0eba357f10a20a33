use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::eddy::{eddy_operator_norm, GeneratorA};
use super::family::VelocityFamily;

/// `epsilon`: square root of the top eigenvalue of the Gram matrix
/// `G_{jj'} = <u_j, u_j'>_{L^2}`. This realizes the variational definition
/// `epsilon^2 = sup { sum_j <u_j, v>^2 : ||v||_{L^2} = 1 }`, whose supremum
/// is attained on the span of the family.
pub fn epsilon(fam: &VelocityFamily) -> f64 {
    let g = fam.gram();
    let eig = g.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |m, &v| m.max(v))
        .max(0.0)
        .sqrt()
}

/// Pointwise isotropy summary of `a(x) = sum_j u_j(x) u_j(x)^t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsotropyReport {
    /// Spatial mean of `a(x)` (d x d, embedded in 3 x 3).
    pub mean: [[f64; 3]; 3],
    /// Max entrywise deviation of `a(x)` from its mean over the sample grid.
    pub max_deviation: f64,
    /// `trace(mean) / (2 d)`; equals the eddy-diffusivity coefficient when
    /// the family is isotropic (`a(x) = 2 kappa_bar I`).
    pub kappa_bar: f64,
    /// True when `a(x)` is constant (< 1e-8 deviation) and equal to
    /// `2 kappa_bar I` (< 1e-8 off-diagonal / anisotropy).
    pub isotropic: bool,
}

/// Evaluates `a(x)` on a grid at 4x the Nyquist density of the family cutoff.
pub fn isotropy_matrix(fam: &VelocityFamily) -> IsotropyReport {
    let d = fam.dim() as usize;
    let m = crate::spectral::next_fast_size(4 * (2 * fam.cutoff() + 1));
    let grids: Vec<Vec<_>> = fam
        .fields()
        .iter()
        .map(|f| {
            (0..d)
                .map(|i| f.component(i).to_grid(m).expect("valid family"))
                .collect()
        })
        .collect();
    let shape = grids[0][0].values.dim();
    let points = (shape.0 * shape.1 * shape.2) as f64;
    let mut mean = [[0.0f64; 3]; 3];
    let mut samples = vec![[[0.0f64; 3]; 3]; 0];
    samples.reserve(shape.0 * shape.1 * shape.2);
    for i0 in 0..shape.0 {
        for i1 in 0..shape.1 {
            for i2 in 0..shape.2 {
                let mut a = [[0.0f64; 3]; 3];
                for g in &grids {
                    let u: Vec<f64> = (0..d).map(|i| g[i].values[[i0, i1, i2]]).collect();
                    for r in 0..d {
                        for c in 0..d {
                            a[r][c] += u[r] * u[c];
                        }
                    }
                }
                for r in 0..3 {
                    for c in 0..3 {
                        mean[r][c] += a[r][c];
                    }
                }
                samples.push(a);
            }
        }
    }
    for row in &mut mean {
        for v in row.iter_mut() {
            *v /= points;
        }
    }
    let mut max_deviation: f64 = 0.0;
    for a in &samples {
        for r in 0..3 {
            for c in 0..3 {
                max_deviation = max_deviation.max((a[r][c] - mean[r][c]).abs());
            }
        }
    }
    let trace: f64 = (0..d).map(|i| mean[i][i]).sum();
    let kappa_bar = trace / (2.0 * d as f64);
    let mut anisotropy: f64 = 0.0;
    for r in 0..d {
        for c in 0..d {
            let target = if r == c { 2.0 * kappa_bar } else { 0.0 };
            anisotropy = anisotropy.max((mean[r][c] - target).abs());
        }
    }
    IsotropyReport {
        mean,
        max_deviation,
        kappa_bar,
        isotropic: max_deviation < 1e-8 && anisotropy < 1e-8,
    }
}

/// The three entries of `mu` and their max.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MuBreakdown {
    /// `|J| sum_j ||u_j||_{H^{d/2 - gamma}}` with the effective dimension
    /// `d = 3` (2-d families are lifted; the lift preserves the norms).
    pub sobolev_entry: f64,
    /// `|J| sum_j ||u_j||_{L^inf}` (dense grid sampling, 4x Nyquist).
    pub linf_entry: f64,
    /// `||L||^{1/2}_{H^2 -> L^2}` on the truncated lattice.
    pub eddy_entry: f64,
    pub mu: f64,
    pub gamma: f64,
    /// Truncation used for the operator norm (reported, not hidden).
    pub operator_cutoff: usize,
    /// Grid refinement used for the sup norms.
    pub linf_refine: usize,
}

/// Computes `mu = max{ |J| sum_j ||u_j||_{H^{3/2-gamma}},
/// |J| sum_j ||u_j||_{L^inf}, ||L||^{1/2}_{H^2,L^2} }`.
///
/// Requires `gamma` in `(0, (d-2)/6)` for the effective dimension 3 (2-d
/// families are treated through their norm-preserving 3-d lift).
pub fn mu(
    fam: &VelocityFamily,
    gamma: f64,
    operator_cutoff: usize,
    linf_refine: usize,
) -> Result<MuBreakdown> {
    let bound = 1.0 / 6.0;
    if !(gamma > 0.0 && gamma < bound) {
        return Err(Error::InvalidConfig(format!(
            "gamma = {gamma} outside (0, {bound:.6}) = (0, (d-2)/6) with effective d = 3"
        )));
    }
    let j = fam.len() as f64;
    let exponent = 1.5 - gamma;
    let sobolev_entry = j * fam
        .fields()
        .iter()
        .map(|f| f.sobolev_norm(exponent))
        .sum::<f64>();
    let linf_entry = j * fam.linf_sum(linf_refine);
    let eddy_entry = eddy_operator_norm(fam, operator_cutoff, 1e-8, 10_000)?.sqrt();
    let mu = sobolev_entry.max(linf_entry).max(eddy_entry);
    Ok(MuBreakdown {
        sobolev_entry,
        linf_entry,
        eddy_entry,
        mu,
        gamma,
        operator_cutoff,
        linf_refine,
    })
}

/// All spatial noise parameters of a family, serialized into run manifests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseGeometry {
    pub epsilon: f64,
    pub mu: f64,
    pub mu_breakdown: MuBreakdown,
    pub gamma: f64,
    /// Principal eigenvalue of `-A` with the given `kappa`.
    pub lambda: f64,
    pub kappa: f64,
    pub kappa_bar: f64,
    pub isotropic: bool,
    pub max_isotropy_deviation: f64,
    pub field_count: usize,
    /// The averaging theory assumes `mu > 1`; flagged when violated.
    pub mu_gt_one: bool,
    /// `lambda >= kappa` must hold (`L` is negative semidefinite).
    pub lambda_ge_kappa: bool,
}

pub fn noise_geometry(
    fam: &VelocityFamily,
    gamma: f64,
    kappa: f64,
    operator_cutoff: usize,
) -> Result<NoiseGeometry> {
    let eps = epsilon(fam);
    let mu_b = mu(fam, gamma, operator_cutoff, 4)?;
    let iso = isotropy_matrix(fam);
    let generator = GeneratorA::new(Arc::new(fam.clone()), kappa, operator_cutoff)?;
    let lambda = generator.principal_eigenvalue()?;
    Ok(NoiseGeometry {
        epsilon: eps,
        mu: mu_b.mu,
        gamma,
        lambda,
        kappa,
        kappa_bar: iso.kappa_bar,
        isotropic: iso.isotropic,
        max_isotropy_deviation: iso.max_deviation,
        field_count: fam.len(),
        mu_gt_one: mu_b.mu > 1.0,
        lambda_ge_kappa: lambda >= kappa - 1e-9,
        mu_breakdown: mu_b,
    })
}
