//! Jump-diffusion model for the driving process `X_t = gamma t + sigma W_t + L_t`
//! with compound Poisson jumps `L`, and its distributional layer:
//! characteristic function, density, distribution function, return law and
//! drawdown probabilities.
//!
//! Under normal jump amplitudes the law of `X_t` is a Poisson-weighted
//! mixture of normals; that series backs the density/CDF routes and the
//! exponential-moment series. Fourier inversion of the characteristic
//! function covers both normal and exponential amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::poisson::poisson_weights;
use crate::numerics::quad::{integrate_finite, QuadResult};
use crate::numerics::{normal_cdf, normal_pdf};

/// Jump amplitude law of the compound Poisson part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JumpSpec {
    /// Amplitudes `Y ~ N(mu, delta^2)`; `delta = 0` collapses to a point
    /// mass at `mu` (the mixture variance stays positive since sigma > 0).
    Normal { mu: f64, delta: f64 },
    /// Amplitudes `Y ~ Exp(alpha)` on `[0, inf)`.
    Exponential { alpha: f64 },
}

impl JumpSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            JumpSpec::Normal { mu, delta } => {
                if !mu.is_finite() || !delta.is_finite() || delta < 0.0 {
                    return Err(Error::InvalidParam(format!(
                        "normal jumps need finite mu and delta >= 0, got mu={mu}, delta={delta}"
                    )));
                }
            }
            JumpSpec::Exponential { alpha } => {
                if !(alpha > 0.0) {
                    return Err(Error::InvalidParam(format!(
                        "exponential jumps need alpha > 0, got {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `E[e^Y] - 1`, the compensator integrand mean, when it exists.
    fn exp_compensator(&self) -> Result<f64> {
        match *self {
            JumpSpec::Normal { mu, delta } => Ok((mu + 0.5 * delta * delta).exp_m1()),
            JumpSpec::Exponential { alpha } => {
                if alpha <= 1.0 {
                    Err(Error::DivergentExponentialMoment { alpha })
                } else {
                    Ok(1.0 / (alpha - 1.0))
                }
            }
        }
    }

    /// `E[Y]`.
    pub fn mean(&self) -> f64 {
        match *self {
            JumpSpec::Normal { mu, .. } => mu,
            JumpSpec::Exponential { alpha } => 1.0 / alpha,
        }
    }
}

/// Truncation and tolerance policy for the Poisson-mixture series and the
/// quadrature kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    /// Poisson tail mass left out of the mixture series.
    pub series_eps: f64,
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
    /// Hard cap on mixture terms.
    pub max_terms: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            series_eps: 1e-12,
            quad_tol: 1e-9,
            max_terms: 200,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_eps > 0.0 && self.series_eps < 1.0) {
            return Err(Error::InvalidParam(format!(
                "series_eps must lie in (0,1), got {}",
                self.series_eps
            )));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::InvalidParam(format!(
                "quad_tol must be positive, got {}",
                self.quad_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParam("max_terms must be >= 1".into()));
        }
        Ok(())
    }
}

/// Model parameters of the driving process. `gamma = eta - sigma^2/2` holds
/// by construction; use [`ModelParams::risk_neutral`] for the martingale
/// drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    r: f64,
    sigma: f64,
    lambda: f64,
    jumps: JumpSpec,
    eta: f64,
    gamma: f64,
}

impl ModelParams {
    /// Risk-neutral construction: `eta = r - lambda (E[e^Y] - 1)` so the
    /// discounted stock is a martingale.
    pub fn risk_neutral(r: f64, sigma: f64, lambda: f64, jumps: JumpSpec) -> Result<Self> {
        Self::check_base(r, sigma, lambda, &jumps)?;
        let eta = r - lambda * jumps.exp_compensator()?;
        Ok(ModelParams {
            r,
            sigma,
            lambda,
            jumps,
            eta,
            gamma: eta - 0.5 * sigma * sigma,
        })
    }

    /// Explicit-drift construction (no martingale restriction). Used by the
    /// finite-difference Greeks, which bump one parameter while freezing
    /// the others.
    pub fn with_drift(eta: f64, r: f64, sigma: f64, lambda: f64, jumps: JumpSpec) -> Result<Self> {
        Self::check_base(r, sigma, lambda, &jumps)?;
        if !eta.is_finite() {
            return Err(Error::InvalidParam(format!(
                "eta must be finite, got {eta}"
            )));
        }
        Ok(ModelParams {
            r,
            sigma,
            lambda,
            jumps,
            eta,
            gamma: eta - 0.5 * sigma * sigma,
        })
    }

    fn check_base(r: f64, sigma: f64, lambda: f64, jumps: &JumpSpec) -> Result<()> {
        if !r.is_finite() {
            return Err(Error::InvalidParam(format!("rate must be finite, got {r}")));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParam(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "lambda must be >= 0, got {lambda}"
            )));
        }
        jumps.validate()
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn jumps(&self) -> JumpSpec {
        self.jumps
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn require_normal(&self, what: &str) -> Result<(f64, f64)> {
        match self.jumps {
            JumpSpec::Normal { mu, delta } => Ok((mu, delta)),
            JumpSpec::Exponential { .. } => Err(Error::UnsupportedJumpLaw(format!(
                "{what} requires normally distributed jump amplitudes"
            ))),
        }
    }

    /// Levy-Khinchin characteristic exponent `psi(u)`.
    pub fn char_exponent(&self, u: f64) -> Complex64 {
        let iu = Complex64::new(0.0, u);
        let diffusion = iu * self.gamma - 0.5 * self.sigma * self.sigma * u * u;
        let jump = match self.jumps {
            JumpSpec::Normal { mu, delta } => (iu * mu - 0.5 * delta * delta * u * u).exp() - 1.0,
            JumpSpec::Exponential { alpha } => alpha / (alpha - iu) - 1.0,
        };
        diffusion + jump * self.lambda
    }

    /// Characteristic function `E[e^{iu X_t}] = e^{psi(u) t}`.
    pub fn char_function(&self, u: f64, t: f64) -> Complex64 {
        assert!(t >= 0.0, "char_function requires t >= 0");
        (self.char_exponent(u) * t).exp()
    }

    /// `gamma + sigma^2/2 + lambda (E[e^Y]-1) - r`; zero (to rounding) iff
    /// the drift is risk-neutral. Equivalent to `psi(-i) - r`.
    pub fn martingale_defect(&self) -> Result<f64> {
        Ok(self.gamma
            + 0.5 * self.sigma * self.sigma
            + self.lambda * self.jumps.exp_compensator()?
            - self.r)
    }

    /// Damped exponential moment `E[e^{-(a+iy) X_tau}]` (normal jumps).
    ///
    /// Evaluated both as the Poisson-mixture series and in the closed
    /// Levy-Khinchin exponential form; the two must agree to 1e-10
    /// relative (the check is skipped below 1e-250 where both underflow),
    /// and the closed form is returned.
    pub fn exp_moment(&self, a: f64, y: f64, tau: f64, policy: &SeriesPolicy) -> Result<Complex64> {
        if !(a > 0.0) {
            return Err(Error::InvalidParam(format!(
                "dampening parameter must be positive, got {a}"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParam(format!(
                "tau must be positive, got {tau}"
            )));
        }
        let (mu, delta) = self.require_normal("exp_moment")?;
        policy.validate()?;
        let s = Complex64::new(a, y);

        let closed = (Complex64::from(tau)
            * (-s * self.gamma
                + 0.5 * self.sigma * self.sigma * s * s
                + self.lambda * ((s * (s * delta * delta / 2.0 - mu)).exp() - 1.0)))
            .exp();

        let weights = poisson_weights(self.lambda * tau, policy.series_eps, policy.max_terms)?;
        let mut series = Complex64::new(0.0, 0.0);
        for (m, &w) in weights.iter().enumerate() {
            let var = self.sigma * self.sigma * tau + m as f64 * delta * delta;
            let mean = self.gamma * tau + m as f64 * mu;
            let term = w * (s * (s * var / 2.0 - mean)).exp();
            series += term;
            // terms can keep growing before the factorial wins; stop only
            // once they are negligible against the partial sum
            if m + 1 == weights.len() && term.norm() > 1e-12 * series.norm() {
                // extend beyond the probability-mass cut until the term
                // magnitude is negligible too
                let mut wm = w;
                let mut mm = m;
                while mm < policy.max_terms {
                    mm += 1;
                    wm *= self.lambda * tau / mm as f64;
                    let var = self.sigma * self.sigma * tau + mm as f64 * delta * delta;
                    let mean = self.gamma * tau + mm as f64 * mu;
                    let t2 = wm * (s * (s * var / 2.0 - mean)).exp();
                    series += t2;
                    if t2.norm() <= 1e-14 * series.norm() {
                        break;
                    }
                }
            }
        }
        if closed.norm() > 1e-250 {
            let rel = (closed - series).norm() / closed.norm();
            if rel > 1e-10 {
                return Err(Error::InternalInvariant(format!(
                    "exp_moment series vs closed form disagree: rel {rel:.3e} at a={a}, y={y}"
                )));
            }
        }
        Ok(closed)
    }

    /// Closed form of [`Self::exp_moment`] without the series cross-check;
    /// quadrature loops call this after the check has run on a probe grid.
    pub(crate) fn exp_moment_unchecked(&self, a: f64, y: f64, tau: f64) -> Complex64 {
        let (mu, delta) = match self.jumps {
            JumpSpec::Normal { mu, delta } => (mu, delta),
            JumpSpec::Exponential { .. } => unreachable!("checked by exp_moment"),
        };
        let s = Complex64::new(a, y);
        (Complex64::from(tau)
            * (-s * self.gamma
                + 0.5 * self.sigma * self.sigma * s * s
                + self.lambda * ((s * (s * delta * delta / 2.0 - mu)).exp() - 1.0)))
            .exp()
    }

    /// Poisson-mixture density of `X_t` (normal jumps).
    pub fn density(&self, x: f64, t: f64, policy: &SeriesPolicy) -> Result<f64> {
        let mix = NormalMixture::build(self, t, policy)?;
        Ok(mix.pdf(x))
    }

    /// Density of `X_t` by Fourier inversion of the characteristic
    /// function; supports both jump laws. The `u`-range is truncated where
    /// the diffusion factor falls below `e^{-80}`.
    pub fn density_fourier(&self, x: f64, t: f64, policy: &SeriesPolicy) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParam(format!("t must be positive, got {t}")));
        }
        policy.validate()?;
        let u_max = (160.0 / (t * self.sigma * self.sigma)).sqrt();
        let r: QuadResult = integrate_finite(
            |u| (Complex64::new(0.0, -u * x) + self.char_exponent(u) * t).exp(),
            -u_max,
            u_max,
            policy.quad_tol,
        )?;
        let value = r.value / (2.0 * std::f64::consts::PI);
        if value.im.abs() > policy.quad_tol {
            return Err(Error::QuadratureFailure(format!(
                "density inversion imaginary residual {:.3e} exceeds quad_tol",
                value.im.abs()
            )));
        }
        Ok(value.re)
    }

    /// `Q(X_t <= a)` via the mixture series (normal jumps). Clamped to
    /// `[0,1]`; truncation excursions beyond `10 * series_eps` are an
    /// internal error rather than silently hidden.
    pub fn cdf(&self, a: f64, t: f64, policy: &SeriesPolicy) -> Result<f64> {
        let mix = NormalMixture::build(self, t, policy)?;
        let v = mix.cdf(a);
        if v < -10.0 * policy.series_eps || v > 1.0 + 10.0 * policy.series_eps {
            return Err(Error::InternalInvariant(format!(
                "cdf value {v} strays outside [0,1] beyond truncation tolerance"
            )));
        }
        Ok(v.clamp(0.0, 1.0))
    }

    /// `Q(R_k <= xi)` for the per-period simple return `R_k = e^{X_tau}-1`.
    pub fn return_cdf(&self, xi: f64, tau: f64, policy: &SeriesPolicy) -> Result<f64> {
        if !(xi > -1.0) {
            return Err(Error::InvalidParam(format!(
                "returns live on (-1, inf); got xi = {xi}"
            )));
        }
        self.cdf(xi.ln_1p(), tau, policy)
    }

    /// `Q(S_{t+h} <= kappa S_t) = Q(X_h <= ln kappa)`.
    pub fn drawdown_prob(&self, kappa: f64, horizon: f64, policy: &SeriesPolicy) -> Result<f64> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidParam(format!(
                "drawdown percentile must be positive, got {kappa}"
            )));
        }
        self.cdf(kappa.ln(), horizon, policy)
    }

    /// Mean and variance of `X_t` (normal jumps).
    pub fn mean_variance(&self, t: f64) -> Result<(f64, f64)> {
        let (mu, delta) = self.require_normal("mean_variance")?;
        if !(t >= 0.0) {
            return Err(Error::InvalidParam(format!("t must be >= 0, got {t}")));
        }
        let mean = t * (self.gamma + self.lambda * mu);
        let var = t * (self.sigma * self.sigma + self.lambda * (delta * delta + mu * mu));
        Ok((mean, var))
    }
}

/// Poisson-weighted normal mixture representing the law of `X_t` under
/// normal jump amplitudes: component `m` is `N(gamma t + m mu, sigma^2 t + m delta^2)`.
#[derive(Debug, Clone)]
pub(crate) struct NormalMixture {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub sigma: f64,
    pub t: f64,
}

impl NormalMixture {
    pub fn build(model: &ModelParams, t: f64, policy: &SeriesPolicy) -> Result<Self> {
        let (mu, delta) = model.require_normal("mixture series")?;
        if !(t > 0.0) {
            return Err(Error::InvalidParam(format!("t must be positive, got {t}")));
        }
        policy.validate()?;
        let weights = poisson_weights(model.lambda * t, policy.series_eps, policy.max_terms)?;
        let base_var = model.sigma * model.sigma * t;
        let means = (0..weights.len())
            .map(|m| model.gamma * t + m as f64 * mu)
            .collect();
        let sds = (0..weights.len())
            .map(|m| (base_var + m as f64 * delta * delta).sqrt())
            .collect();
        Ok(NormalMixture {
            weights,
            means,
            sds,
            sigma: model.sigma,
            t,
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for ((&w, &m), &s) in self.weights.iter().zip(&self.means).zip(&self.sds) {
            acc += w * normal_pdf((x - m) / s) / s;
        }
        acc
    }

    /// d/dx of the mixture density.
    pub fn pdf_prime(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for ((&w, &m), &s) in self.weights.iter().zip(&self.means).zip(&self.sds) {
            let z = (x - m) / s;
            acc += -w * z * normal_pdf(z) / (s * s);
        }
        acc
    }

    pub fn cdf(&self, a: f64) -> f64 {
        let mut acc = 0.0;
        for ((&w, &m), &s) in self.weights.iter().zip(&self.means).zip(&self.sds) {
            acc += w * normal_cdf((a - m) / s);
        }
        acc
    }

    /// Partial derivative of the density in `sigma` with the drift frozen
    /// (the reading under which the paper differentiates the mixture).
    pub fn dpdf_dsigma(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for ((&w, &m), &s) in self.weights.iter().zip(&self.means).zip(&self.sds) {
            let v = s * s;
            let d = x - m;
            acc += w * (d * d - v) / (v * v) * normal_pdf(d / s) / s;
        }
        acc * self.sigma * self.t
    }

    /// d/du of [`Self::dpdf_dsigma`]; per component with `z = (u-m)/s`,
    /// `d/du [sigma t (z^2-1)/s^2 * pdf] = sigma t z (3 - z^2)/s^3 * pdf`.
    pub fn dpdf_dsigma_prime(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for ((&w, &m), &s) in self.weights.iter().zip(&self.means).zip(&self.sds) {
            let z = (u - m) / s;
            acc += w * z * (3.0 - z * z) / (s * s * s) * normal_pdf(z) / s;
        }
        acc * self.sigma * self.t
    }

    /// Same partial in `sigma` of the mixture CDF at `a`.
    pub fn dcdf_dsigma(&self, a: f64) -> f64 {
        let mut acc = 0.0;
        for ((&w, &m), &s) in self.weights.iter().zip(&self.means).zip(&self.sds) {
            let z = (a - m) / s;
            acc += -w * normal_pdf(z) * z / (s * s);
        }
        acc * self.sigma * self.t
    }

    /// Support bounds covering all components out to `k` standard deviations.
    pub fn support(&self, k: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (&m, &s) in self.means.iter().zip(&self.sds) {
            lo = lo.min(m - k * s);
            hi = hi.max(m + k * s);
        }
        (lo, hi)
    }
}
