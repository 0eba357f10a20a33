use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::spectral::{advect_sparse, SpectralField};

use super::family::VelocityFamily;

/// Eddy diffusivity `L f = (1/2) sum_j u_j . grad (u_j . grad f)`.
///
/// The inner advection is kept on the extended lattice `n + n_u` (the exact
/// support of the product), so the outer truncation to `n` equals the exact
/// projection of the continuum operator. For isotropic families this makes
/// `L f = kappa_bar Laplacian f` hold to roundoff on every retained mode.
pub fn apply_eddy_diffusivity(fam: &VelocityFamily, f: &SpectralField) -> SpectralField {
    let n = f.cutoff();
    let n_ext = n + fam.cutoff();
    let mut acc = SpectralField::zero(f.dim(), n).expect("valid dims");
    for field in fam.fields() {
        let modes = field.sparse_modes();
        let inner = advect_sparse(&modes, f, n_ext);
        let outer = advect_sparse(&modes, &inner, n);
        acc.add_scaled(&outer, 0.5);
    }
    acc
}

/// Operator norm `||L||_{H^2 -> L^2}` on the truncated lattice, via power
/// iteration on the symmetric operator `(-Lap)^{-1} L L (-Lap)^{-1}` (whose
/// top eigenvalue is the squared norm; `L` is self-adjoint).
pub fn eddy_operator_norm(
    fam: &VelocityFamily,
    cutoff: usize,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xEDD1);
    let mut v = SpectralField::random(fam.dim(), cutoff, &mut rng)?;
    let norm = v.sobolev_norm(0.0);
    v.scale(1.0 / norm);
    let apply = |x: &SpectralField| -> SpectralField {
        let y = apply_eddy_diffusivity(fam, &x.fractional_laplacian(-2.0));
        apply_eddy_diffusivity(fam, &y).fractional_laplacian(-2.0)
    };
    let mut lambda = 0.0f64;
    for it in 0..max_iter {
        let w = apply(&v);
        let new_lambda = v.inner(&w);
        let w_norm = w.sobolev_norm(0.0);
        if w_norm == 0.0 {
            return Ok(0.0);
        }
        let residual = {
            let mut r = w.clone();
            r.add_scaled(&v, -new_lambda);
            r.sobolev_norm(0.0)
        };
        let converged = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300)
            && residual <= tol.sqrt() * w_norm;
        lambda = new_lambda;
        v = w;
        v.scale(1.0 / w_norm);
        if converged && it > 0 {
            return Ok(lambda.max(0.0).sqrt());
        }
    }
    Err(Error::EigenNoConvergence {
        iterations: max_iter,
        residual: lambda,
    })
}

/// Generator `A f = kappa Laplacian f + L f` on the truncated zero-mean
/// space. Symmetric negative semidefinite.
#[derive(Debug, Clone)]
pub struct GeneratorA {
    pub family: Arc<VelocityFamily>,
    pub kappa: f64,
    pub cutoff: usize,
}

impl GeneratorA {
    pub fn new(family: Arc<VelocityFamily>, kappa: f64, cutoff: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::InvalidConfig(format!(
                "kappa = {kappa} outside [0, 1]"
            )));
        }
        Ok(Self {
            family,
            kappa,
            cutoff,
        })
    }

    /// `A f = kappa Lap f + L f`.
    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let mut out = apply_eddy_diffusivity(&self.family, f);
        out.add_scaled(&f.laplacian(), self.kappa);
        out
    }

    /// `-A f` (symmetric positive semidefinite).
    fn apply_neg(&self, f: &SpectralField) -> SpectralField {
        self.apply(f).scaled(-1.0)
    }

    /// Principal eigenvalue of `-A`: smallest eigenvalue on the truncated
    /// zero-mean space, by inverse power iteration (shift 0) with
    /// preconditioned CG solves. Satisfies `lambda >= kappa`.
    pub fn principal_eigenvalue(&self) -> Result<f64> {
        let tol = 1e-8;
        let max_iter = 200;
        let mut rng = ChaCha12Rng::seed_from_u64(0xA17);
        let mut x = SpectralField::random(self.family.dim(), self.cutoff, &mut rng)?;
        let nx = x.sobolev_norm(0.0);
        x.scale(1.0 / nx);
        let mut lambda = f64::INFINITY;
        let mut residual = f64::INFINITY;
        for _ in 0..max_iter {
            let y = self.solve_neg_a(&x)?;
            let ny = y.sobolev_norm(0.0);
            if !ny.is_finite() || ny == 0.0 {
                return Err(Error::EigenNoConvergence {
                    iterations: max_iter,
                    residual: ny,
                });
            }
            x = y.scaled(1.0 / ny);
            let bx = self.apply_neg(&x);
            let new_lambda = x.inner(&bx);
            residual = {
                let mut r = bx;
                r.add_scaled(&x, -new_lambda);
                r.sobolev_norm(0.0)
            };
            let done = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300);
            lambda = new_lambda;
            if done && residual <= 1e-6 * lambda.abs().max(1e-300) {
                return Ok(lambda);
            }
        }
        Err(Error::EigenNoConvergence {
            iterations: max_iter,
            residual,
        })
    }

    /// Solves `(-A) y = b` by CG preconditioned with `(-Lap)^{-1}`.
    fn solve_neg_a(&self, b: &SpectralField) -> Result<SpectralField> {
        let mut y = SpectralField::zero(b.dim(), b.cutoff())?;
        let mut r = b.clone();
        let mut z = r.fractional_laplacian(-2.0);
        let mut p = z.clone();
        let mut rz = r.inner(&z);
        let b_norm = b.sobolev_norm(0.0);
        if b_norm == 0.0 {
            return Ok(y);
        }
        for _ in 0..2000 {
            let ap = self.apply_neg(&p);
            let p_ap = p.inner(&ap);
            if p_ap <= 0.0 {
                return Err(Error::EigenNoConvergence {
                    iterations: 0,
                    residual: p_ap,
                });
            }
            let alpha = rz / p_ap;
            y.add_scaled(&p, alpha);
            r.add_scaled(&ap, -alpha);
            if r.sobolev_norm(0.0) <= 1e-12 * b_norm {
                return Ok(y);
            }
            z = r.fractional_laplacian(-2.0);
            let rz_new = r.inner(&z);
            let beta = rz_new / rz;
            rz = rz_new;
            let mut p_new = z.clone();
            p_new.add_scaled(&p, beta);
            p = p_new;
        }
        Err(Error::EigenNoConvergence {
            iterations: 2000,
            residual: r.sobolev_norm(0.0) / b_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity::family::{build_trig_family, half_shell, FamilyPattern};
    use crate::velocity::geometry::isotropy_matrix;
    use num_complex::Complex64;

    const TAU: f64 = std::f64::consts::TAU;

    fn isotropic_family_3d(kappa_bar: f64) -> VelocityFamily {
        // For the |k| = 1 half shell in 3-d, kappa_bar = a^2.
        build_trig_family(
            3,
            &half_shell(3, 1),
            kappa_bar.sqrt(),
            FamilyPattern::IsotropicPairs,
            None,
            None,
        )
        .unwrap()
    }

    fn sin_axis(d: u8, n: usize, axis: usize, freq: i32) -> SpectralField {
        let mut k = [0i32; 3];
        k[axis] = freq;
        let c = Complex64::new(0.0, -TAU.powf(d as f64 / 2.0) / 2.0);
        SpectralField::from_pairs(d, n, &[(k, c)]).unwrap()
    }

    #[test]
    fn eddy_on_isotropic_family_is_kappa_bar_laplacian() {
        let fam = isotropic_family_3d(0.1);
        let report = isotropy_matrix(&fam);
        assert!(report.isotropic);
        let f = sin_axis(3, 4, 1, 2); // sin(2 x2)
        let lf = apply_eddy_diffusivity(&fam, &f);
        let expected = f.laplacian().scaled(report.kappa_bar);
        let scale = expected.max_abs();
        for ((_, a), (_, b)) in lf.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn eddy_of_zero_is_zero() {
        let fam = isotropic_family_3d(0.2);
        let z = SpectralField::zero(3, 3).unwrap();
        assert_eq!(apply_eddy_diffusivity(&fam, &z).sobolev_norm(0.0), 0.0);
    }

    #[test]
    fn eddy_single_field_matches_symbolic_grid_oracle() {
        // u = (0, cos x1, 0), f = sin(x2): L f = -(1/2) cos^2(x1) sin(x2).
        let fam = build_trig_family(3, &[[1, 0, 0]], 1.0, FamilyPattern::Single, None, None)
            .unwrap();
        let f = sin_axis(3, 4, 1, 1);
        let lf = apply_eddy_diffusivity(&fam, &f);
        let m = 16;
        let grid = lf.to_grid(m).unwrap();
        for i0 in 0..m {
            for i1 in 0..m {
                let x1 = TAU * i0 as f64 / m as f64;
                let x2 = TAU * i1 as f64 / m as f64;
                let expected = -0.5 * x1.cos().powi(2) * x2.sin();
                assert!((grid.values[[i0, i1, 0]] - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eddy_is_self_adjoint_and_negative_semidefinite() {
        use rand::SeedableRng;
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let fam = build_trig_family(
            2,
            &[[1, 0, 0], [1, 1, 0], [0, 2, 0]],
            0.8,
            FamilyPattern::IsotropicPairs,
            None,
            None,
        )
        .unwrap();
        for _ in 0..5 {
            let f = SpectralField::random(2, 5, &mut rng).unwrap();
            let g = SpectralField::random(2, 5, &mut rng).unwrap();
            let lf = apply_eddy_diffusivity(&fam, &f);
            let lg = apply_eddy_diffusivity(&fam, &g);
            let asym = (lf.inner(&g) - f.inner(&lg)).abs();
            assert!(asym <= 1e-10 * f.sobolev_norm(2.0) * g.sobolev_norm(2.0));
            assert!(lf.inner(&f) <= 1e-10 * f.sobolev_norm(1.0).powi(2));
        }
    }

    #[test]
    fn eddy_operator_norm_of_isotropic_family_is_kappa_bar() {
        let fam = isotropic_family_3d(0.3);
        let report = isotropy_matrix(&fam);
        let norm = eddy_operator_norm(&fam, 4, 1e-8, 10_000).unwrap();
        assert!((norm - report.kappa_bar).abs() < 1e-7 * report.kappa_bar);
    }

    #[test]
    fn generator_matches_scaled_laplacian_for_isotropic_family() {
        let fam = Arc::new(isotropic_family_3d(0.5));
        let a = GeneratorA::new(fam, 1.0, 3).unwrap();
        // On a single conjugate pair e_k: A f = -(kappa + kappa_bar) |k|^2 f.
        for k in [[1, 0, 0], [1, 2, 0], [0, 1, 2]] {
            let f = SpectralField::from_pairs(3, 3, &[(k, Complex64::new(0.4, 0.7))]).unwrap();
            let af = a.apply(&f);
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            let expected = f.scaled(-1.5 * k2);
            let scale = expected.max_abs();
            for ((_, x), (_, y)) in af.iter().zip(expected.iter()) {
                assert!((x - y).norm() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn zero_amplitude_family_gives_zero_generator_at_zero_kappa() {
        let fam = Arc::new(
            build_trig_family(2, &half_shell(2, 1), 0.0, FamilyPattern::IsotropicPairs, None, None)
                .unwrap(),
        );
        let a = GeneratorA::new(fam, 0.0, 3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let f = SpectralField::random(2, 3, &mut rng).unwrap();
        assert_eq!(a.apply(&f).sobolev_norm(0.0), 0.0);
    }

    #[test]
    fn generator_is_negative_semidefinite_on_random_fields() {
        let fam = Arc::new(
            build_trig_family(
                2,
                &[[1, 0, 0], [2, 1, 0]],
                0.9,
                FamilyPattern::IsotropicPairs,
                None,
                None,
            )
            .unwrap(),
        );
        let a = GeneratorA::new(fam, 0.3, 4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        for _ in 0..10 {
            let f = SpectralField::random(2, 4, &mut rng).unwrap();
            let quad = a.apply(&f).inner(&f);
            assert!(quad <= 1e-10 * f.sobolev_norm(1.0).powi(2));
        }
    }

    #[test]
    fn principal_eigenvalue_of_effective_laplacian() {
        // A = (kappa + kappa_bar) Lap: lambda = kappa + kappa_bar at |k| = 1.
        let fam = Arc::new(isotropic_family_3d(0.5));
        let a = GeneratorA::new(fam, 0.01, 3).unwrap();
        let lambda = a.principal_eigenvalue().unwrap();
        assert!((lambda - 0.51).abs() < 1e-8);
    }

    #[test]
    fn principal_eigenvalue_of_pure_laplacian_is_kappa() {
        let fam = Arc::new(
            build_trig_family(2, &half_shell(2, 1), 0.0, FamilyPattern::IsotropicPairs, None, None)
                .unwrap(),
        );
        let a = GeneratorA::new(fam, 1.0, 4).unwrap();
        let lambda = a.principal_eigenvalue().unwrap();
        assert!((lambda - 1.0).abs() < 1e-8);
        assert!(lambda >= a.kappa - 1e-12);
    }

    #[test]
    fn principal_eigenvalue_dominates_kappa_for_generic_family() {
        let fam = Arc::new(
            build_trig_family(
                2,
                &[[1, 0, 0], [1, 1, 0]],
                0.6,
                FamilyPattern::IsotropicPairs,
                None,
                None,
            )
            .unwrap(),
        );
        let a = GeneratorA::new(fam, 0.05, 4).unwrap();
        let lambda = a.principal_eigenvalue().unwrap();
        assert!(lambda >= 0.05 - 1e-10);
    }

    #[test]
    fn duplicating_fields_at_reduced_amplitude_preserves_eddy_and_epsilon() {
        // {u_j} -> {u_j/sqrt2} twice: L and the Gram top eigenvalue (hence
        // epsilon) are both unchanged.
        let fam = isotropic_family_3d(0.25);
        let mut doubled = Vec::new();
        for f in fam.fields() {
            doubled.push(f.scaled(1.0 / 2.0f64.sqrt()));
            doubled.push(f.scaled(1.0 / 2.0f64.sqrt()));
        }
        let fam2 = VelocityFamily::new(doubled, "doubled".into()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(45);
        let f = SpectralField::random(3, 3, &mut rng).unwrap();
        let l1 = apply_eddy_diffusivity(&fam, &f);
        let l2 = apply_eddy_diffusivity(&fam2, &f);
        let scale = l1.max_abs().max(1e-300);
        for ((_, a), (_, b)) in l1.iter().zip(l2.iter()) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
        let e1 = crate::velocity::geometry::epsilon(&fam);
        let e2 = crate::velocity::geometry::epsilon(&fam2);
        assert!((e1 - e2).abs() < 1e-10 * e1);
    }
}
