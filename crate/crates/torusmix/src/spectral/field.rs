use ndarray::Array3;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Integer wavevector on `Z^d`, padded to three components (`k[2] = 0` when
/// `d = 2`). The zero vector is never stored with a nonzero coefficient.
pub type Wavevector = [i32; 3];

pub(crate) fn norm_sq(k: Wavevector) -> i64 {
    let (a, b, c) = (k[0] as i64, k[1] as i64, k[2] as i64);
    a * a + b * b + c * c
}

/// Zero-mean real scalar field on `T^d`, stored as Fourier coefficients with
/// respect to the orthonormal basis `e_k = (2pi)^{-d/2} exp(i k.x)` on the
/// full truncated lattice `max_i |k_i| <= n`. Both `k` and `-k` are stored;
/// the Hermitian symmetry `f_k = conj(f_{-k})` is an enforced invariant.
#[derive(Debug, Clone)]
pub struct SpectralField {
    d: u8,
    n: usize,
    pub(crate) coeffs: Array3<Complex64>,
}

impl SpectralField {
    pub fn zero(d: u8, n: usize) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(Error::Dimension(d));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("cutoff n must be >= 1".into()));
        }
        let side = 2 * n + 1;
        let depth = if d == 3 { side } else { 1 };
        Ok(Self {
            d,
            n,
            coeffs: Array3::zeros((side, side, depth)),
        })
    }

    /// Builds a field from `(k, value)` pairs; each pair also sets the
    /// conjugate coefficient at `-k`, so only one representative per
    /// conjugate pair needs to be given.
    pub fn from_pairs(d: u8, n: usize, pairs: &[(Wavevector, Complex64)]) -> Result<Self> {
        let mut f = Self::zero(d, n)?;
        for &(k, v) in pairs {
            f.set_pair(k, v)?;
        }
        Ok(f)
    }

    /// Builds a field from raw per-mode coefficients (no implicit mirroring),
    /// validating Hermitian symmetry and zero mean. This is the entry point
    /// for deserialized data.
    pub fn from_coefficients(
        d: u8,
        n: usize,
        entries: &[(Wavevector, Complex64)],
    ) -> Result<Self> {
        let mut f = Self::zero(d, n)?;
        for &(k, v) in entries {
            if k == [0, 0, 0] {
                if v.norm() > 0.0 {
                    return Err(Error::NonzeroMean(v.norm()));
                }
                continue;
            }
            let idx = f.index_of(k).ok_or(Error::InvalidConfig(format!(
        "wavevector {k:?} outside lattice (d = {d}, n = {n})"
            )))?;
            f.coeffs[idx] = v;
        }
        f.validate_hermitian()?;
        Ok(f)
    }

    /// Gaussian random field supported on `1 <= |k|_inf <= n`, Hermitian by
    /// construction. Used by the validation suite and tests.
    pub fn random<R: Rng>(d: u8, n: usize, rng: &mut R) -> Result<Self> {
        let mut f = Self::zero(d, n)?;
        let n_i = n as i32;
        for k0 in -n_i..=n_i {
            for k1 in -n_i..=n_i {
                for k2 in f.k2_range() {
                    let k = [k0, k1, k2];
                    if !positive_representative(k) {
                        continue;
                    }
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    f.set_pair(k, Complex64::new(re, im)).unwrap();
                }
            }
        }
        Ok(f)
    }

    /// Random field rescaled to unit L2 norm.
    pub fn random_unit<R: Rng>(d: u8, n: usize, rng: &mut R) -> Result<Self> {
        let mut f = Self::random(d, n, rng)?;
        let norm = f.sobolev_norm(0.0);
        if norm > 0.0 {
            f.scale(1.0 / norm);
        }
        Ok(f)
    }

    pub fn dim(&self) -> u8 {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.n
    }

    fn k2_range(&self) -> std::ops::RangeInclusive<i32> {
        if self.d == 3 {
            -(self.n as i32)..=self.n as i32
        } else {
            0..=0
        }
    }

    fn index_of(&self, k: Wavevector) -> Option<(usize, usize, usize)> {
        let n = self.n as i32;
        if k[0].abs() > n || k[1].abs() > n {
            return None;
        }
        let i2 = if self.d == 3 {
            if k[2].abs() > n {
                return None;
            }
            (k[2] + n) as usize
        } else {
            if k[2] != 0 {
                return None;
            }
            0
        };
        Some(((k[0] + n) as usize, (k[1] + n) as usize, i2))
    }

    /// Coefficient at `k` (zero outside the lattice).
    pub fn get(&self, k: Wavevector) -> Complex64 {
        match self.index_of(k) {
            Some(idx) => self.coeffs[idx],
            None => Complex64::default(),
        }
    }

    /// Sets `f_k = v` and `f_{-k} = conj(v)`. Rejects `k = 0`.
    pub fn set_pair(&mut self, k: Wavevector, v: Complex64) -> Result<()> {
        if k == [0, 0, 0] {
            return Err(Error::NonzeroMean(v.norm()));
        }
        let idx = self.index_of(k).ok_or(Error::InvalidConfig(format!(
            "wavevector {:?} outside lattice (d = {}, n = {})",
            k, self.d, self.n
        )))?;
        let midx = self.index_of([-k[0], -k[1], -k[2]]).unwrap();
        self.coeffs[idx] = v;
        self.coeffs[midx] = v.conj();
        Ok(())
    }

    /// Iterates over all lattice wavevectors (including `k = 0`, whose
    /// coefficient is always zero) with their coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (Wavevector, Complex64)> + '_ {
        let n = self.n as i32;
        self.coeffs.indexed_iter().map(move |((i0, i1, i2), &v)| {
            let k2 = if self.d == 3 { i2 as i32 - n } else { 0 };
            ([i0 as i32 - n, i1 as i32 - n, k2], v)
        })
    }

    /// Nonzero modes, for sparse convolution.
    pub fn nonzero_modes(&self) -> Vec<(Wavevector, Complex64)> {
        self.iter().filter(|(_, v)| v.norm_sqr() > 0.0).collect()
    }

    /// Largest deviation from Hermitian symmetry, `max_k |f_k - conj(f_{-k})|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.n as i32;
        let mut dev: f64 = 0.0;
        for (k, v) in self.iter() {
            if k[0] < -n {
                continue;
            }
            let w = self.get([-k[0], -k[1], -k[2]]);
            dev = dev.max((v - w.conj()).norm());
        }
        dev
    }

    /// Errors unless the field is Hermitian-symmetric to roundoff
    /// (tolerance relative to the largest coefficient).
    pub fn validate_hermitian(&self) -> Result<()> {
        let scale = self.max_abs().max(1e-300);
        for (k, v) in self.iter() {
            let w = self.get([-k[0], -k[1], -k[2]]);
            let dev = (v - w.conj()).norm();
            if dev > 1e-12 * scale {
                return Err(Error::NonHermitian {
                    k: [k[0], k[1], k[2]],
                    deviation: dev / scale,
                });
            }
        }
        let zero = self.get([0, 0, 0]).norm();
        if zero > 1e-12 * scale {
            return Err(Error::NonzeroMean(zero));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Homogeneous Sobolev norm `(sum_{k != 0} |k|^{2s} |f_k|^2)^{1/2}`.
    /// `s = 0` is the L2 norm (Parseval).
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        let mut sum = 0.0;
        for (k, v) in self.iter() {
            let e = v.norm_sqr();
            if e == 0.0 || k == [0, 0, 0] {
                continue;
            }
            sum += weight(norm_sq(k) as f64, s) * e;
        }
        sum
    }

    /// L2 duality pairing `<f, g> = sum_k f_k g_{-k}` (real for real fields).
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.d, other.d);
        debug_assert_eq!(self.n, other.n);
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    /// `H^s` inner product `sum_k |k|^{2s} f_k conj(g_k)`.
    pub fn sobolev_inner(&self, other: &Self, s: f64) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut sum = 0.0;
        for ((k, a), (_, b)) in self.iter().zip(other.iter()) {
            if k == [0, 0, 0] {
                continue;
            }
            let p = (a * b.conj()).re;
            if p != 0.0 {
                sum += weight(norm_sq(k) as f64, s) * p;
            }
        }
        sum
    }

    /// Partial derivative along axis `axis` (multiplier `i k_axis`).
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = self.clone();
        let n = self.n as i32;
        for ((i0, i1, i2), v) in out.coeffs.indexed_iter_mut() {
            let k = match axis {
                0 => i0 as i32 - n,
                1 => i1 as i32 - n,
                _ => {
                    if self.d == 3 {
                        i2 as i32 - n
                    } else {
                        0
                    }
                }
            };
            *v *= Complex64::new(0.0, k as f64);
        }
        out
    }

    /// Laplacian (multiplier `-|k|^2`).
    pub fn laplacian(&self) -> Self {
        let mut out = self.clone();
        out.map_multiplier(|k2| -k2);
        out
    }

    /// Fractional power `(-Laplacian)^{s/2}` (multiplier `|k|^s`); the zero
    /// mode stays zero, so negative `s` is well-defined on zero-mean fields.
    pub fn fractional_laplacian(&self, s: f64) -> Self {
        let mut out = self.clone();
        let n = self.n as i32;
        for ((i0, i1, i2), v) in out.coeffs.indexed_iter_mut() {
            let k0 = i0 as i32 - n;
            let k1 = i1 as i32 - n;
            let k2 = if self.d == 3 { i2 as i32 - n } else { 0 };
            let k = [k0, k1, k2];
            if k == [0, 0, 0] {
                *v = Complex64::default();
            } else {
                *v *= weight(norm_sq(k) as f64, s / 2.0);
            }
        }
        out
    }

    fn map_multiplier(&mut self, f: impl Fn(f64) -> f64) {
        let n = self.n as i32;
        let d = self.d;
        for ((i0, i1, i2), v) in self.coeffs.indexed_iter_mut() {
            let k0 = i0 as i32 - n;
            let k1 = i1 as i32 - n;
            let k2 = if d == 3 { i2 as i32 - n } else { 0 };
            *v *= f(norm_sq([k0, k1, k2]) as f64);
        }
    }

    /// Euclidean-norm mode projection: keeps exactly the modes `|k| <= n_cut`.
    pub fn project(&self, n_cut: usize) -> Self {
        let mut out = self.clone();
        let n = self.n as i32;
        let cut = (n_cut * n_cut) as i64;
        for ((i0, i1, i2), v) in out.coeffs.indexed_iter_mut() {
            let k0 = i0 as i32 - n;
            let k1 = i1 as i32 - n;
            let k2 = if self.d == 3 { i2 as i32 - n } else { 0 };
            if norm_sq([k0, k1, k2]) > cut {
                *v = Complex64::default();
            }
        }
        out
    }

    /// Reinterprets a 2-d field as a field on `T^3` supported on the
    /// `k_3 = 0` plane, keeping the coefficient values: `g_{(k1,k2,0)} =
    /// f_{(k1,k2)}`. All homogeneous `H^s` norms are preserved exactly.
    pub fn lift_to_3d(&self) -> Result<Self> {
        if self.d != 2 {
            return Err(Error::Dimension(self.d));
        }
        let mut out = Self::zero(3, self.n)?;
        let n = self.n as i32;
        for k0 in -n..=n {
            for k1 in -n..=n {
                let v = self.get([k0, k1, 0]);
                if v.norm_sqr() > 0.0 {
                    let idx = out.index_of([k0, k1, 0]).unwrap();
                    out.coeffs[idx] = v;
                }
            }
        }
        Ok(out)
    }

    /// Truncates or zero-extends to a new max-norm cutoff.
    pub fn with_cutoff(&self, n_new: usize) -> Self {
        let mut out = Self::zero(self.d, n_new).expect("valid dims");
        let keep = self.n.min(n_new) as i32;
        for k0 in -keep..=keep {
            for k1 in -keep..=keep {
                for k2 in if self.d == 3 { -keep..=keep } else { 0..=0 } {
                    let v = self.get([k0, k1, k2]);
                    if v.norm_sqr() > 0.0 {
                        let idx = out.index_of([k0, k1, k2]).unwrap();
                        out.coeffs[idx] = v;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&mut self, c: f64) {
        self.coeffs.mapv_inplace(|v| v * c);
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other` (same lattice required).
    pub fn add_scaled(&mut self, other: &Self, c: f64) {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.d, other.d);
        self.coeffs.zip_mut_with(&other.coeffs, |a, b| *a += b * c);
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    /// Fraction of L2 energy carried by modes with `|k| > n_cut` (Euclidean).
    /// Used as a spectral resolution health metric.
    pub fn tail_fraction(&self, n_cut: usize) -> f64 {
        let total = self.sobolev_norm_sq(0.0);
        if total == 0.0 {
            return 0.0;
        }
        let low = self.project(n_cut).sobolev_norm_sq(0.0);
        (total - low).max(0.0) / total
    }

    /// Shell-averaged energy spectrum: `spec[r] = sum_{r <= |k| < r+1} |f_k|^2`.
    pub fn shell_spectrum(&self) -> Vec<f64> {
        let max_shell = (((self.d as usize).min(3) as f64).sqrt() * self.n as f64).ceil() as usize;
        let mut spec = vec![0.0; max_shell + 2];
        for (k, v) in self.iter() {
            let e = v.norm_sqr();
            if e == 0.0 || k == [0, 0, 0] {
                continue;
            }
            let r = (norm_sq(k) as f64).sqrt().floor() as usize;
            spec[r.min(max_shell + 1)] += e;
        }
        spec
    }
}

/// `|k|^{2s}` with the hot exponents special-cased.
#[inline]
fn weight(k2: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        k2
    } else if s == -1.0 {
        1.0 / k2
    } else if s == 2.0 {
        k2 * k2
    } else {
        k2.powf(s)
    }
}

/// Canonical representative of a conjugate pair: first nonzero component > 0.
pub fn positive_representative(k: Wavevector) -> bool {
    if k[0] != 0 {
        return k[0] > 0;
    }
    if k[1] != 0 {
        return k[1] > 0;
    }
    k[2] > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const TAU: f64 = std::f64::consts::TAU;

    /// f(x) = sin(x1) on T^d in the orthonormal basis:
    /// f_{(1,0,..)} = (2pi)^{d/2} / (2i), mirrored.
    pub(crate) fn sin_x1(d: u8, n: usize) -> SpectralField {
        let c = Complex64::new(0.0, -TAU.powf(d as f64 / 2.0) / 2.0);
        SpectralField::from_pairs(d, n, &[([1, 0, 0], c)]).unwrap()
    }

    #[test]
    fn sin_norm_matches_quadrature_of_sin_squared() {
        // int sin^2(x1) dx over T^3 = (2pi)^3 / 2, independent of s since all
        // energy sits at |k| = 1.
        let f = sin_x1(3, 4);
        let expected = (TAU.powi(3) / 2.0).sqrt();
        for s in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            assert!((f.sobolev_norm(s) - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn zero_field_has_zero_norm_for_all_s() {
        let f = SpectralField::zero(2, 3).unwrap();
        for s in [-2.0, -1.0, 0.0, 1.5] {
            assert_eq!(f.sobolev_norm(s), 0.0);
        }
    }

    #[test]
    fn single_pair_at_radius_two_dual_norms() {
        // L2-normalized pair at |k| = 2: ||f||_{H^-1} = 1/2, ||f||_{H^1} = 2.
        let v = Complex64::new(0.5f64.sqrt(), 0.0);
        let f = SpectralField::from_pairs(3, 2, &[([2, 0, 0], v)]).unwrap();
        assert!((f.sobolev_norm(0.0) - 1.0).abs() < 1e-14);
        assert!((f.sobolev_norm(-1.0) - 0.5).abs() < 1e-14);
        assert!((f.sobolev_norm(1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn laplacian_of_sin_is_minus_sin() {
        let f = sin_x1(3, 2);
        let g = f.laplacian();
        for (k, v) in g.iter() {
            assert!((v + f.get(k)).norm() < 1e-14 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn fractional_laplacian_roundtrip_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let f = SpectralField::random(2, 4, &mut rng).unwrap();
        let g = f.fractional_laplacian(1.0).fractional_laplacian(-1.0);
        for ((_, a), (_, b)) in f.iter().zip(g.iter()) {
            assert!((a - b).norm() < 1e-12 * f.max_abs());
        }
    }

    #[test]
    fn fractional_laplacian_realizes_sobolev_isometry() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for d in [2u8, 3] {
            let f = SpectralField::random(d, 3, &mut rng).unwrap();
            for s in [-1.0, 0.5, 2.0] {
                let lhs = f.fractional_laplacian(s).sobolev_norm(0.0);
                let rhs = f.sobolev_norm(s);
                assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn projection_keeps_euclidean_ball_only() {
        // Modes only at |k| = 3 vanish under projection to 2.
        let f = SpectralField::from_pairs(2, 3, &[([3, 0, 0], Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(f.project(2).sobolev_norm(0.0), 0.0);
        // n_cut >= n*sqrt(d) keeps everything.
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let g = SpectralField::random(3, 3, &mut rng).unwrap();
        let kept = g.project(6);
        assert!((kept.sobolev_norm(0.0) - g.sobolev_norm(0.0)).abs() < 1e-14);
    }

    #[test]
    fn projection_l2_bounded_by_n_times_hm1() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        for _ in 0..200 {
            let f = SpectralField::random(2, 5, &mut rng).unwrap();
            for n_cut in [1usize, 2, 4] {
                let lhs = f.project(n_cut).sobolev_norm(0.0);
                let rhs = n_cut as f64 * f.sobolev_norm(-1.0);
                assert!(lhs <= rhs * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn lift_preserves_all_sobolev_norms() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let f = SpectralField::random(2, 4, &mut rng).unwrap();
        let g = f.lift_to_3d().unwrap();
        for s in [-1.0, 0.0, 1.0] {
            assert!((f.sobolev_norm(s) - g.sobolev_norm(s)).abs() < 1e-12 * f.sobolev_norm(s));
        }
        let z = SpectralField::zero(2, 4).unwrap().lift_to_3d().unwrap();
        assert_eq!(z.sobolev_norm(0.0), 0.0);
        let s2 = sin_x1(2, 4);
        let l = s2.lift_to_3d().unwrap();
        for s in [-1.0, 0.0, 1.0] {
            assert!((l.sobolev_norm(s) - s2.sobolev_norm(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_inequality_holds_with_tiny_slack() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        for trial in 0..1000 {
            let d = if trial % 2 == 0 { 2 } else { 3 };
            let f = SpectralField::random(d, 3, &mut rng).unwrap();
            let (s1, s2, th) = (-1.5, 2.0, 0.3);
            let s_mid = th * s1 + (1.0 - th) * s2;
            let lhs = f.sobolev_norm(s_mid);
            let rhs = f.sobolev_norm(s1).powf(th) * f.sobolev_norm(s2).powf(1.0 - th);
            assert!(lhs <= rhs * (1.0 + 1e-10));
        }
    }

    #[test]
    fn hermitian_violation_is_detected() {
        let mut f = sin_x1(2, 2);
        let idx = (3usize, 2usize, 0usize); // k = (1, 0)
        f.coeffs[idx] += Complex64::new(0.5, 0.0);
        assert!(f.validate_hermitian().is_err());
    }

    #[test]
    fn rejects_mean_coefficient() {
        let mut f = SpectralField::zero(2, 2).unwrap();
        assert!(f.set_pair([0, 0, 0], Complex64::new(1.0, 0.0)).is_err());
        let out = SpectralField::from_coefficients(
            2,
            2,
            &[([0, 0, 0], Complex64::new(1e-3, 0.0))],
        );
        assert!(out.is_err());
    }
}
