use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SparseMode, SpectralField};

const TAU: f64 = std::f64::consts::TAU;

/// Vector field on `T^d` with `d` spectral components.
#[derive(Debug, Clone)]
pub struct VectorField {
    d: u8,
    components: Vec<SpectralField>,
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let d = components.len() as u8;
        if d != 2 && d != 3 {
            return Err(Error::Dimension(d));
        }
        for c in &components {
            if c.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: c.dim(),
                    right: d,
                });
            }
        }
        Ok(Self { d, components })
    }

    pub fn dim(&self) -> u8 {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.components[0].cutoff()
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    /// Nonzero modes with the full coefficient vector per wavevector.
    pub fn sparse_modes(&self) -> Vec<SparseMode> {
        let mut out = Vec::new();
        for (k, first) in self.components[0].iter() {
            let mut coeff = [Complex64::default(); 3];
            coeff[0] = first;
            let mut nonzero = first.norm_sqr() > 0.0;
            for (i, c) in self.components.iter().enumerate().skip(1) {
                coeff[i] = c.get(k);
                nonzero |= coeff[i].norm_sqr() > 0.0;
            }
            if nonzero {
                out.push(SparseMode { k, coeff });
            }
        }
        out
    }

    /// Max over all stored modes of `|sum_i k_i u_{i,k}|`, scaled by the
    /// largest coefficient: zero for divergence-free fields.
    pub fn divergence_deviation(&self) -> f64 {
        let scale = self
            .components
            .iter()
            .fold(0.0f64, |m, c| m.max(c.max_abs()))
            .max(1e-300);
        let mut dev: f64 = 0.0;
        for mode in self.sparse_modes() {
            let mut div = Complex64::default();
            for i in 0..self.d as usize {
                div += mode.coeff[i] * mode.k[i] as f64;
            }
            dev = dev.max(div.norm());
        }
        dev / scale
    }

    /// L2 inner product of vector fields (sum over components).
    pub fn l2_inner(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    /// `H^s` norm, handled componentwise.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.sobolev_norm_sq(s))
            .sum::<f64>()
            .sqrt()
    }

    /// Sup of the pointwise Euclidean norm, sampled on a refined grid
    /// (`refine` times the Nyquist density of the stored cutoff).
    pub fn linf_norm(&self, refine: usize) -> f64 {
        let m = crate::spectral::next_fast_size(refine.max(1) * (2 * self.cutoff() + 1));
        let grids: Vec<_> = self
            .components
            .iter()
            .map(|c| c.to_grid(m).expect("valid family components"))
            .collect();
        let mut sup: f64 = 0.0;
        let shape = grids[0].values.dim();
        for i0 in 0..shape.0 {
            for i1 in 0..shape.1 {
                for i2 in 0..shape.2 {
                    let mut sq = 0.0;
                    for g in &grids {
                        let v = g.values[[i0, i1, i2]];
                        sq += v * v;
                    }
                    sup = sup.max(sq);
                }
            }
        }
        sup.sqrt()
    }

    /// Componentwise 2-d -> 3-d lift (third component zero); preserves all
    /// `H^s` norms.
    pub fn lift_to_3d(&self) -> Result<Self> {
        if self.d != 2 {
            return Err(Error::Dimension(self.d));
        }
        let n = self.cutoff();
        let mut components: Vec<SpectralField> = self
            .components
            .iter()
            .map(|c| c.lift_to_3d())
            .collect::<Result<_>>()?;
        components.push(SpectralField::zero(3, n)?);
        Self::new(components)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            d: self.d,
            components: self.components.iter().map(|c| c.scaled(a)).collect(),
        }
    }
}

/// Construction pattern for trigonometric families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyPattern {
    /// One cosine field per wavevector, first polarization only.
    Single,
    /// For each wavevector, all requested polarizations times both sine and
    /// cosine phases; over an isotropic wavevector set this yields
    /// `a(x) = 2 kappa_bar I`.
    IsotropicPairs,
}

/// Finite family `{u_j}` of divergence-free velocity fields.
#[derive(Debug, Clone)]
pub struct VelocityFamily {
    d: u8,
    cutoff: usize,
    fields: Vec<VectorField>,
    /// Union of wavevectors across fields, with per-field coefficient
    /// vectors, for fast assembly of `sum_j eta_j u_j`.
    mode_list: Vec<[i32; 3]>,
    field_mode_coeffs: Vec<Vec<[Complex64; 3]>>,
    pub recipe: String,
}

impl VelocityFamily {
    pub fn new(fields: Vec<VectorField>, recipe: String) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidConfig("velocity family is empty".into()));
        }
        let d = fields[0].dim();
        let cutoff = fields.iter().map(|f| f.cutoff()).max().unwrap();
        for f in &fields {
            if f.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: f.dim(),
                    right: d,
                });
            }
        }
        // Union of modes in deterministic order.
        let mut mode_list: Vec<[i32; 3]> = Vec::new();
        for f in &fields {
            for m in f.sparse_modes() {
                if !mode_list.contains(&m.k) {
                    mode_list.push(m.k);
                }
            }
        }
        mode_list.sort_unstable();
        let field_mode_coeffs = fields
            .iter()
            .map(|f| {
                mode_list
                    .iter()
                    .map(|&k| {
                        let mut c = [Complex64::default(); 3];
                        for i in 0..d as usize {
                            c[i] = f.component(i).get(k);
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            d,
            cutoff,
            fields,
            mode_list,
            field_mode_coeffs,
            recipe,
        })
    }

    pub fn dim(&self) -> u8 {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, j: usize) -> &VectorField {
        &self.fields[j]
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    /// Sparse modes of `sum_j etas[j] u_j`.
    pub fn combined_modes(&self, etas: &[f64]) -> Vec<SparseMode> {
        debug_assert_eq!(etas.len(), self.fields.len());
        self.mode_list
            .iter()
            .enumerate()
            .map(|(m, &k)| {
                let mut coeff = [Complex64::default(); 3];
                for (j, &eta) in etas.iter().enumerate() {
                    let c = &self.field_mode_coeffs[j][m];
                    for i in 0..3 {
                        coeff[i] += c[i] * eta;
                    }
                }
                SparseMode { k, coeff }
            })
            .collect()
    }

    /// Worst divergence deviation across fields.
    pub fn divergence_deviation(&self) -> f64 {
        self.fields
            .iter()
            .fold(0.0f64, |m, f| m.max(f.divergence_deviation()))
    }

    /// `sum_j ||u_j||_{L^inf}`, used by the advective CFL rule.
    pub fn linf_sum(&self, refine: usize) -> f64 {
        self.fields.iter().map(|f| f.linf_norm(refine)).sum()
    }

    /// Gram matrix `G_{jj'} = <u_j, u_j'>_{L^2}`.
    pub fn gram(&self) -> nalgebra::DMatrix<f64> {
        let j = self.fields.len();
        let mut g = nalgebra::DMatrix::zeros(j, j);
        for a in 0..j {
            for b in a..j {
                let v = self.fields[a].l2_inner(&self.fields[b]);
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::new(
            self.fields.iter().map(|f| f.scaled(a)).collect(),
            format!("{} (scaled by {a})", self.recipe),
        )
        .expect("scaling preserves validity")
    }
}

/// Wavevectors with `|k|^2 = radius_sq`, one representative per `{k, -k}`
/// pair (first nonzero component positive). For `radius_sq = 1` this is the
/// canonical isotropic shell `{e_1, ..., e_d}`.
pub fn half_shell(d: u8, radius_sq: i64) -> Vec<[i32; 3]> {
    let r = (radius_sq as f64).sqrt().ceil() as i32;
    let mut out = Vec::new();
    for k0 in -r..=r {
        for k1 in -r..=r {
            let range2 = if d == 3 { -r..=r } else { 0..=0 };
            for k2 in range2 {
                let k = [k0, k1, k2];
                let sq = (k0 as i64) * (k0 as i64) + (k1 as i64) * (k1 as i64) + (k2 as i64) * (k2 as i64);
                if sq == radius_sq && crate::spectral::positive_representative(k) {
                    out.push(k);
                }
            }
        }
    }
    out
}

fn polarization_basis(k: [i32; 3], d: u8) -> Vec<[f64; 3]> {
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    let norm = (kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2]).sqrt();
    let kh = [kf[0] / norm, kf[1] / norm, kf[2] / norm];
    if d == 2 {
        return vec![[-kh[1], kh[0], 0.0]];
    }
    // Reference axis least aligned with k, then Gram-Schmidt.
    let dots = [kh[0].abs(), kh[1].abs(), kh[2].abs()];
    let mut axis = 0;
    for i in 1..3 {
        if dots[i] < dots[axis] {
            axis = i;
        }
    }
    let mut r = [0.0; 3];
    r[axis] = 1.0;
    let proj = r[0] * kh[0] + r[1] * kh[1] + r[2] * kh[2];
    let mut s1 = [r[0] - proj * kh[0], r[1] - proj * kh[1], r[2] - proj * kh[2]];
    let s1n = (s1[0] * s1[0] + s1[1] * s1[1] + s1[2] * s1[2]).sqrt();
    for v in &mut s1 {
        *v /= s1n;
    }
    let s2 = [
        kh[1] * s1[2] - kh[2] * s1[1],
        kh[2] * s1[0] - kh[0] * s1[2],
        kh[0] * s1[1] - kh[1] * s1[0],
    ];
    vec![s1, s2]
}

/// Builds a trigonometric divergence-free family.
///
/// Every wavevector in `mode_set` contributes fields of the form
/// `a sigma cos(k.x + phase)` (and the sine counterpart for
/// [`FamilyPattern::IsotropicPairs`]) with `sigma . k = 0`. `polarizations`
/// limits how many of the `d - 1` orthonormal polarizations are used
/// (`None` = all).
pub fn build_trig_family(
    d: u8,
    mode_set: &[[i32; 3]],
    amplitude: f64,
    pattern: FamilyPattern,
    polarizations: Option<usize>,
    phases: Option<&[f64]>,
) -> Result<VelocityFamily> {
    if d != 2 && d != 3 {
        return Err(Error::Dimension(d));
    }
    if mode_set.is_empty() {
        return Err(Error::InvalidConfig("mode set is empty".into()));
    }
    if !amplitude.is_finite() {
        return Err(Error::InvalidConfig("amplitude must be finite".into()));
    }
    let max_pol = (d - 1) as usize;
    let n_pol = match pattern {
        FamilyPattern::Single => 1,
        FamilyPattern::IsotropicPairs => polarizations.unwrap_or(max_pol),
    };
    if n_pol == 0 || n_pol > max_pol {
        return Err(Error::InvalidConfig(format!(
            "requested {n_pol} polarizations, but d - 1 = {max_pol} are available"
        )));
    }
    let mut cutoff = 1usize;
    for k in mode_set {
        if *k == [0, 0, 0] {
            return Err(Error::InvalidConfig(
                "mode set contains k = 0 (no divergence-free polarization exists)".into(),
            ));
        }
        if d == 2 && k[2] != 0 {
            return Err(Error::InvalidConfig(format!(
                "wavevector {k:?} has a third component but d = 2"
            )));
        }
        cutoff = cutoff.max(k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap());
    }
    let base = TAU.powf(d as f64 / 2.0) / 2.0;
    let mut fields = Vec::new();
    let mut phase_idx = 0usize;
    let mut next_phase = || -> f64 {
        let p = phases.map_or(0.0, |ps| ps[phase_idx % ps.len()]);
        phase_idx += 1;
        p
    };
    for &k in mode_set {
        let sigmas = polarization_basis(k, d);
        for sigma in sigmas.iter().take(n_pol) {
            let phase = next_phase();
            let rot = Complex64::new(0.0, phase).exp();
            // cos(k.x + phase): coefficient (2pi)^{d/2}/2 e^{i phase} at +k.
            let cos_coeff = rot * base * amplitude;
            // sin(k.x + phase): cos coefficient times -i.
            let sin_coeff = cos_coeff * Complex64::new(0.0, -1.0);
            let make = |coeff: Complex64| -> Result<VectorField> {
                let comps = (0..d as usize)
                    .map(|i| {
                        SpectralField::from_pairs(d, cutoff, &[(k, coeff * sigma[i])])
                    })
                    .collect::<Result<Vec<_>>>()?;
                VectorField::new(comps)
            };
            fields.push(make(cos_coeff)?);
            if pattern == FamilyPattern::IsotropicPairs {
                fields.push(make(sin_coeff)?);
            }
        }
    }
    let recipe = format!(
        "trig d={d} amplitude={amplitude} pattern={pattern:?} modes={mode_set:?} polarizations={n_pol}"
    );
    VelocityFamily::new(fields, recipe)
}
