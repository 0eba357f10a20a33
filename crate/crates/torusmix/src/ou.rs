//! Exact simulation of stationary Ornstein-Uhlenbeck processes.
//!
//! Each process solves `d eta = -alpha eta dt + alpha dW` with the stationary
//! marginal `N(0, alpha/2)` and covariance `(alpha/2) exp(-alpha |t-s|)`.
//! Transitions are sampled exactly from the explicit solution
//! `eta(t+h) = e^{-alpha h} eta(t) + alpha int_t^{t+h} e^{-alpha(t+h-s)} dW_s`,
//! jointly with the plain Brownian increment over the same substep (the pair
//! is Gaussian with known 2x2 covariance), so the recorded `(eta, W)` data is
//! bias-free at any substep size.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration for one family of i.i.d. stationary OU processes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OuConfig {
    /// Inverse correlation time; the theory requires `alpha > 1`.
    pub alpha: f64,
    /// Number of independent processes (the index set size `|J|`).
    pub process_count: usize,
    /// Substep of the sample grid; must resolve the correlation time:
    /// `alpha * dt_sub <= 0.2`.
    pub dt_sub: f64,
    /// Horizon; the grid is `0, dt_sub, ..., horizon`.
    pub horizon: f64,
    pub seed: u64,
}

impl OuConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha = {} but the stationary OU construction requires alpha > 1",
                self.alpha
            )));
        }
        if self.dt_sub <= 0.0 || !self.dt_sub.is_finite() {
            return Err(Error::InvalidConfig("dt_sub must be positive".into()));
        }
        if self.alpha * self.dt_sub > 0.2 + 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "alpha * dt_sub = {:.3} exceeds 0.2; the substep must resolve the correlation time",
                self.alpha * self.dt_sub
            )));
        }
        if self.process_count == 0 {
            return Err(Error::InvalidConfig("process_count must be >= 1".into()));
        }
        let steps = self.horizon / self.dt_sub;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "horizon / dt_sub = {steps} is not an integer"
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt_sub).round() as usize
    }
}

/// Exact one-step transition coefficients, including the joint law of the
/// OU increment and the underlying Brownian increment.
#[derive(Debug, Clone, Copy)]
pub struct Transition {
    pub alpha: f64,
    pub dt: f64,
    /// `e^{-alpha h}`.
    pub decay: f64,
    /// Std of the OU noise term, `sqrt((alpha/2)(1 - e^{-2 alpha h}))`.
    pub noise_std: f64,
    // Internals for the joint (X, W) draw where
    // X = int e^{-alpha(t+h-s)} dW_s and W is the plain increment:
    // X = sx z1, W = w_on_x z1 + w_resid z2.
    sx: f64,
    w_on_x: f64,
    w_resid: f64,
}

impl Transition {
    pub fn new(alpha: f64, dt: f64) -> Self {
        let u = (-alpha * dt).exp();
        let var_x = (1.0 - u * u) / (2.0 * alpha);
        let cov_xw = (1.0 - u) / alpha;
        let sx = var_x.sqrt();
        let (w_on_x, w_resid) = if sx > 0.0 {
            let on = cov_xw / sx;
            (on, (dt - on * on).max(0.0).sqrt())
        } else {
            (0.0, dt.sqrt())
        };
        Self {
            alpha,
            dt,
            decay: u,
            noise_std: alpha * sx,
            sx,
            w_on_x,
            w_resid,
        }
    }

    /// `eta_{t+h} = e^{-alpha h} eta_t + noise_std * xi` for a standard
    /// normal draw `xi`. Exact for any `h >= 0`.
    pub fn step(&self, eta: f64, xi: f64) -> f64 {
        self.decay * eta + self.noise_std * xi
    }

    /// Joint exact draw of the next value and the Brownian increment over
    /// the substep, from two independent standard normals.
    pub fn step_joint(&self, eta: f64, xi1: f64, xi2: f64) -> (f64, f64) {
        let x = self.sx * xi1;
        let dw = self.w_on_x * xi1 + self.w_resid * xi2;
        (self.decay * eta + self.alpha * x, dw)
    }
}

/// Exact single transition (the simple, increment-free form).
pub fn exact_step(eta: f64, alpha: f64, dt: f64, xi: f64) -> f64 {
    Transition::new(alpha, dt).step(eta, xi)
}

/// Stationary initial draws: i.i.d. `N(0, alpha/2)` per process.
pub fn sample_initial<R: Rng>(alpha: f64, process_count: usize, rng: &mut R) -> Vec<f64> {
    let std = (alpha / 2.0).sqrt();
    (0..process_count)
        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// One realization of the OU family on the substep grid, with the underlying
/// Brownian increments retained.
#[derive(Debug, Clone)]
pub struct OuPath {
    alpha: f64,
    dt: f64,
    /// `values[j][i]` = eta_j(i * dt), i = 0..=steps.
    values: Vec<Vec<f64>>,
    /// `dw[j][i]` = W_j((i+1) dt) - W_j(i dt).
    dw: Vec<Vec<f64>>,
}

impl OuPath {
    /// Samples the stationary family on the grid defined by `cfg`.
    pub fn generate(cfg: &OuConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        Self::generate_with(cfg, &mut rng)
    }

    pub fn generate_with<R: Rng>(cfg: &OuConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let steps = cfg.steps();
        let tr = Transition::new(cfg.alpha, cfg.dt_sub);
        let init = sample_initial(cfg.alpha, cfg.process_count, rng);
        let mut values = Vec::with_capacity(cfg.process_count);
        let mut dw = Vec::with_capacity(cfg.process_count);
        for eta0 in init {
            let mut v = Vec::with_capacity(steps + 1);
            let mut w = Vec::with_capacity(steps);
            v.push(eta0);
            let mut eta = eta0;
            for _ in 0..steps {
                let xi1: f64 = rng.sample(StandardNormal);
                let xi2: f64 = rng.sample(StandardNormal);
                let (next, inc) = tr.step_joint(eta, xi1, xi2);
                v.push(next);
                w.push(inc);
                eta = next;
            }
            values.push(v);
            dw.push(w);
        }
        Ok(Self {
            alpha: cfg.alpha,
            dt: cfg.dt_sub,
            values,
            dw,
        })
    }

    /// Wraps externally supplied values (degenerate/synthetic paths for
    /// diagnostics and tests).
    pub fn from_raw(alpha: f64, dt: f64, values: Vec<Vec<f64>>, dw: Vec<Vec<f64>>) -> Self {
        Self {
            alpha,
            dt,
            values,
            dw,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn process_count(&self) -> usize {
        self.values.len()
    }

    pub fn steps(&self) -> usize {
        self.values[0].len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn eta(&self, j: usize, idx: usize) -> f64 {
        self.values[j][idx]
    }

    pub fn etas_at(&self, idx: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[idx]).collect()
    }

    pub fn brownian_increment(&self, j: usize, idx: usize) -> f64 {
        self.dw[j][idx]
    }

    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }
}

/// Trapezoidal value of `c_{j,j'}(k) = int_{k delta}^{(k+1) delta}
/// int_{k delta}^{s} eta_j(s) eta_j'(r) dr ds` on the substep grid, together
/// with an order-of-magnitude quadrature error bound `O(dt^2 alpha^2 delta)`.
#[derive(Debug, Clone, Copy)]
pub struct IteratedIntegral {
    pub value: f64,
    pub quadrature_error_bound: f64,
}

pub fn iterated_integral_c(
    path: &OuPath,
    j: usize,
    jp: usize,
    interval: usize,
    delta: f64,
) -> Result<IteratedIntegral> {
    let per = delta / path.dt();
    if (per - per.round()).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "delta = {delta} is not a multiple of the substep {}",
            path.dt()
        )));
    }
    let per = per.round() as usize;
    let start = interval * per;
    let end = start + per;
    if end > path.steps() {
        return Err(Error::OutsideHorizon {
            start: start as f64 * path.dt(),
            end: end as f64 * path.dt(),
            horizon: path.horizon(),
        });
    }
    let dt = path.dt();
    // Cumulative inner integral of eta_j' from k delta, then the outer
    // trapezoid of eta_j(s) * inner(s). inner(start) = 0.
    let mut inner = 0.0;
    let mut acc = 0.0;
    let mut prev_outer = 0.0;
    for i in start..end {
        let inner_next = inner + 0.5 * dt * (path.eta(jp, i) + path.eta(jp, i + 1));
        let outer_next = path.eta(j, i + 1) * inner_next;
        acc += 0.5 * dt * (prev_outer + outer_next);
        inner = inner_next;
        prev_outer = outer_next;
    }
    Ok(IteratedIntegral {
        value: acc,
        quadrature_error_bound: dt * dt * path.alpha() * path.alpha() * delta,
    })
}

/// Closed-form conditional expectation of `c_{j,j'}(k)` given the state at
/// the start of the interval:
///
/// `E[c | F] = eta_j eta_j' (alpha^{-2}/2)(1 - e^{-alpha delta})^2
///  + [j = j'] (delta/2 + alpha^{-1}(e^{-alpha delta} - 1
///  + (1/4)(1 - e^{-2 alpha delta})))`.
///
/// As `alpha -> infinity` the `j = j'` value tends to `delta/2`, the
/// Stratonovich corrector.
pub fn conditional_mean_c(eta_j: f64, eta_jp: f64, alpha: f64, delta: f64, same: bool) -> f64 {
    let u = (-alpha * delta).exp();
    let cross = eta_j * eta_jp * (1.0 - u) * (1.0 - u) / (2.0 * alpha * alpha);
    let auto = if same {
        delta / 2.0 + (u - 1.0 + 0.25 * (1.0 - u * u)) / alpha
    } else {
        0.0
    };
    cross + auto
}

/// Row of the sup-moment scaling study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupMomentRow {
    pub alpha: f64,
    pub mean_sup_p: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupMomentTable {
    pub p: f64,
    pub rows: Vec<SupMomentRow>,
    /// Slope of `log E[sup |eta|^p]` against
    /// `log(alpha^{p/2} log^{p/2}(1 + alpha))`; near 1 when the moment bound
    /// is sharp in order.
    pub fitted_slope: f64,
}

/// Empirical `E[sup_{[0,1]} |eta|^p]` over a geometric `alpha` grid, with the
/// fitted slope against the theoretical rate.
pub fn sup_moment_scaling(
    alphas: &[f64],
    p: f64,
    ensemble: usize,
    seed: u64,
) -> Result<SupMomentTable> {
    if ensemble < 2 {
        return Err(Error::InvalidConfig("ensemble must be >= 2".into()));
    }
    let mut rows = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (ai, &alpha) in alphas.iter().enumerate() {
        let dt = 0.1 / alpha;
        let steps = (1.0 / dt).ceil() as usize;
        let dt = 1.0 / steps as f64;
        let cfg = OuConfig {
            alpha,
            process_count: 1,
            dt_sub: dt,
            horizon: 1.0,
            seed: seed ^ ((ai as u64 + 1) << 32),
        };
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        for _ in 0..ensemble {
            let path = OuPath::generate_with(&cfg, &mut rng)?;
            let v = path.sup_abs().powf(p);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / ensemble as f64;
        let var = (sum_sq / ensemble as f64 - mean * mean).max(0.0);
        rows.push(SupMomentRow {
            alpha,
            mean_sup_p: mean,
            standard_error: (var / ensemble as f64).sqrt(),
        });
        xs.push((p / 2.0) * (alpha.ln() + (1.0 + alpha).ln().ln()));
        ys.push(mean.max(1e-300).ln());
    }
    let fitted_slope = if p == 0.0 { 0.0 } else { slope(&xs, &ys) };
    Ok(SupMomentTable {
        p,
        rows,
        fitted_slope,
    })
}

/// Least-squares slope of `y` on `x`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
