use ndarray::Array3;
use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};

use super::fft::fft_nd;
use super::field::SpectralField;

const TAU: f64 = std::f64::consts::TAU;

/// Real samples of a field on the uniform grid `x_i = 2pi i / m` of `T^d`.
#[derive(Debug, Clone)]
pub struct GridField {
    d: u8,
    m: usize,
    pub values: Array3<f64>,
}

impl GridField {
    pub(crate) fn from_raw(d: u8, m: usize, values: Array3<f64>) -> Self {
        Self { d, m, values }
    }

    /// Wraps raw samples, enforcing the zero-mean invariant (tolerance
    /// relative to the max amplitude).
    pub fn new(d: u8, m: usize, values: Array3<f64>) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(Error::Dimension(d));
        }
        let expected = (m, m, if d == 3 { m } else { 1 });
        if values.dim() != expected {
            return Err(Error::InvalidConfig(format!(
                "grid shape {:?} does not match m = {m}, d = {d}",
                values.dim()
            )));
        }
        let mean = values.mean().unwrap_or(0.0);
        let amp = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if mean.abs() > 1e-12 * amp.max(1e-300) {
            return Err(Error::NonzeroMean(mean.abs()));
        }
        Ok(Self { d, m, values })
    }

    pub fn dim(&self) -> u8 {
        self.d
    }

    pub fn samples_per_axis(&self) -> usize {
        self.m
    }

    /// Rectangle-rule quadrature of `f^2` over the torus, `(2pi/m)^d sum f^2`
    /// (spectrally accurate for band-limited fields).
    pub fn quadrature_l2_sq(&self) -> f64 {
        let cell = (TAU / self.m as f64).powi(self.d as i32);
        self.values.iter().map(|v| v * v).sum::<f64>() * cell
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Projects onto the truncated lattice `|k_i|_inf <= n`. Exact when the
    /// samples come from a field band-limited within the cutoff.
    pub fn to_spectral(&self, n: usize) -> Result<SpectralField> {
        if self.m < 2 * n + 1 {
            return Err(Error::GridCutoff { m: self.m, n });
        }
        let mut data = self.values.mapv(|v| Complex64::new(v, 0.0));
        fft_nd(&mut data, FftDirection::Forward);
        let scale = TAU.powf(self.d as f64 / 2.0) / (self.m as f64).powi(self.d as i32);
        let mut out = SpectralField::zero(self.d, n)?;
        let n_i = n as i32;
        let m = self.m as i32;
        for k0 in -n_i..=n_i {
            for k1 in -n_i..=n_i {
                let range2 = if self.d == 3 { -n_i..=n_i } else { 0..=0 };
                for k2 in range2 {
                    if (k0, k1, k2) == (0, 0, 0) {
                        continue;
                    }
                    let idx = (
                        k0.rem_euclid(m) as usize,
                        k1.rem_euclid(m) as usize,
                        if self.d == 3 { k2.rem_euclid(m) as usize } else { 0 },
                    );
                    out.set_pair([k0, k1, k2], data[idx] * scale).ok();
                }
            }
        }
        // Forward DFT of real samples is Hermitian to roundoff; set_pair wrote
        // each conjugate pair twice, last writer wins, so symmetrize exactly.
        symmetrize(&mut out);
        Ok(out)
    }
}

fn symmetrize(f: &mut SpectralField) {
    let n = f.cutoff() as i32;
    let d = f.dim();
    for k0 in -n..=n {
        for k1 in -n..=n {
            let range2 = if d == 3 { -n..=n } else { 0..=0 };
            for k2 in range2 {
                let k = [k0, k1, k2];
                if !super::field::positive_representative(k) {
                    continue;
                }
                let a = f.get(k);
                let b = f.get([-k0, -k1, -k2]);
                let avg = (a + b.conj()) * 0.5;
                f.set_pair(k, avg).ok();
            }
        }
    }
}

impl SpectralField {
    /// Synthesizes grid samples via inverse FFT. Requires `m >= 2n+1` and a
    /// Hermitian-symmetric field; the imaginary residue of the synthesis is
    /// checked against 1e-12 of the max amplitude.
    pub fn to_grid(&self, m: usize) -> Result<GridField> {
        if m < 2 * self.cutoff() + 1 {
            return Err(Error::GridCutoff {
                m,
                n: self.cutoff(),
            });
        }
        self.validate_hermitian()?;
        let d = self.dim();
        let shape = (m, m, if d == 3 { m } else { 1 });
        let mut data = Array3::<Complex64>::zeros(shape);
        let scale = TAU.powf(-(d as f64) / 2.0);
        let m_i = m as i32;
        for (k, v) in self.iter() {
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let idx = (
                k[0].rem_euclid(m_i) as usize,
                k[1].rem_euclid(m_i) as usize,
                if d == 3 { k[2].rem_euclid(m_i) as usize } else { 0 },
            );
            data[idx] = v * scale;
        }
        fft_nd(&mut data, FftDirection::Inverse);
        let amp = data.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let residue = data.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
        if residue > 1e-12 * amp.max(1e-300) {
            return Err(Error::NonHermitian {
                k: [0, 0, 0],
                deviation: residue / amp.max(1e-300),
            });
        }
        let values = data.mapv(|v| v.re);
        Ok(GridField { d, m, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Direct O(N^d M^d) evaluation of the Fourier series; the independent
    /// oracle for the FFT synthesis path.
    fn eval_series(f: &SpectralField, m: usize) -> Array3<f64> {
        let d = f.dim();
        let shape = (m, m, if d == 3 { m } else { 1 });
        let mut out = Array3::<f64>::zeros(shape);
        let scale = TAU.powf(-(d as f64) / 2.0);
        for ((i0, i1, i2), v) in out.indexed_iter_mut() {
            let x = [
                TAU * i0 as f64 / m as f64,
                TAU * i1 as f64 / m as f64,
                TAU * i2 as f64 / m as f64,
            ];
            let mut acc = Complex64::default();
            for (k, c) in f.iter() {
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let phase = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                acc += c * Complex64::new(0.0, phase).exp();
            }
            *v = (acc * scale).re;
        }
        out
    }

    #[test]
    fn single_pair_synthesis_matches_direct_series() {
        // Conjugate pair at k = (1,0,0) with value 1/2 on both sides:
        // f(x) = cos(x1) / (2pi)^{3/2}.
        let f = SpectralField::from_pairs(3, 2, &[([1, 0, 0], Complex64::new(0.5, 0.0))]).unwrap();
        let m = 8;
        let grid = f.to_grid(m).unwrap();
        let oracle = eval_series(&f, m);
        for (a, b) in grid.values.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
        // Pointwise value: cos(x1) * (2pi)^{-3/2}.
        let expected = TAU.powf(-1.5);
        assert!((grid.values[[0, 0, 0]] - expected).abs() < 1e-13);
    }

    #[test]
    fn zero_field_synthesizes_to_zeros() {
        let f = SpectralField::zero(2, 3).unwrap();
        let grid = f.to_grid(8).unwrap();
        assert!(grid.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn roundtrip_is_identity_to_1e12() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let f = SpectralField::random(2, 4, &mut rng).unwrap();
        let back = f.to_grid(12).unwrap().to_spectral(4).unwrap();
        let scale = f.max_abs();
        for ((_, a), (_, b)) in f.iter().zip(back.iter()) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
        // Also through a 3-d roundtrip.
        let f3 = SpectralField::random(3, 3, &mut rng).unwrap();
        let back3 = f3.to_grid(9).unwrap().to_spectral(3).unwrap();
        let scale3 = f3.max_abs();
        for ((_, a), (_, b)) in f3.iter().zip(back3.iter()) {
            assert!((a - b).norm() < 1e-12 * scale3);
        }
    }

    #[test]
    fn grid_too_small_is_rejected() {
        let f = SpectralField::zero(2, 4).unwrap();
        assert!(matches!(f.to_grid(8), Err(Error::GridCutoff { .. })));
        let g = GridField::new(2, 8, Array3::zeros((8, 8, 1))).unwrap();
        assert!(matches!(g.to_spectral(4), Err(Error::GridCutoff { .. })));
    }

    #[test]
    fn parseval_l2_norm_equals_grid_quadrature() {
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        for d in [2u8, 3] {
            let f = SpectralField::random(d, 3, &mut rng).unwrap();
            let grid = f.to_grid(10).unwrap();
            let lhs = f.sobolev_norm_sq(0.0);
            let rhs = grid.quadrature_l2_sq();
            assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0));
        }
    }
}
