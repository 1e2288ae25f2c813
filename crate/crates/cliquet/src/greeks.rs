//! Sensitivities of the cliquet price.
//!
//! Rho is `-T C_0` (only the discount factor carries the valuation rate
//! once the drift is frozen). Delta and Gamma vanish identically: with
//! `t0 > 0` the spot cancels from every return ratio, so the price never
//! references `S_0`. Vega comes in two analytic representations, one per
//! price route, plus a central finite-difference validator.
//!
//! Bump conventions. The analytic Vega differentiates the period density
//! through its explicit `sigma` appearances with the drift `gamma` held
//! fixed; the finite-difference oracle therefore offers both conventions:
//! `Sigma` recomputes `gamma = eta - sigma^2/2` under a frozen `eta`, while
//! `SigmaFrozenGamma` freezes `gamma` itself. The frozen-`gamma` variant is
//! the one that reproduces the analytic Vega (the other mixes in the
//! `gamma`-sensitivity through the drift identity); tests pin that reading.
//! Rate bumps freeze `eta` (and hence `gamma`); jump-parameter bumps
//! re-derive the risk-neutral drift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{JumpSpec, ModelParams, SeriesPolicy};
use crate::numerics::quad::{integrate_semi_infinite, Tail};
use crate::pricing::{price_fourier, CliquetEngine, ContractTerms};

use std::f64::consts::PI;

/// Which machinery produced a [`GreeksReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreekMethod {
    Fourier,
    DistributionFn,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GreeksReport {
    pub rho: f64,
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
    pub method: GreekMethod,
}

/// `rho = dC0/dr = -T C0` with `C0` from the Fourier route.
pub fn rho(terms: &ContractTerms, model: &ModelParams, policy: &SeriesPolicy) -> Result<f64> {
    Ok(-terms.maturity() * price_fourier(terms, model, policy)?.price)
}

/// Delta and Gamma of the cliquet: identically zero. The first reset lies
/// strictly after the valuation date (`t0 > 0`, enforced by
/// [`ContractTerms`]), so `S_0` cancels from every return `R_k`.
pub fn delta_gamma(terms: &ContractTerms) -> (f64, f64) {
    debug_assert!(terms.first_reset() > 0.0);
    (0.0, 0.0)
}

/// Parameter selector for the finite-difference validator, together with
/// its freeze rule (see module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BumpParam {
    /// Valuation rate; `eta` and `gamma` frozen.
    Rate,
    /// Volatility; `eta` frozen, `gamma = eta - sigma^2/2` recomputed.
    Sigma,
    /// Volatility with `gamma` frozen too (the analytic-Vega convention).
    SigmaFrozenGamma,
    /// Jump intensity; risk-neutral drift re-derived.
    Lambda,
    /// Normal jump mean; risk-neutral drift re-derived.
    JumpMean,
    /// Normal jump standard deviation; risk-neutral drift re-derived.
    JumpSd,
}

fn bumped(model: &ModelParams, param: BumpParam, eps: f64) -> Result<ModelParams> {
    let (mu, delta) = match model.jumps() {
        JumpSpec::Normal { mu, delta } => (mu, delta),
        JumpSpec::Exponential { .. } => {
            if matches!(param, BumpParam::JumpMean | BumpParam::JumpSd) {
                return Err(Error::UnsupportedJumpLaw(
                    "jump-parameter bumps are defined for normal amplitudes".into(),
                ));
            }
            (0.0, 0.0)
        }
    };
    match param {
        BumpParam::Rate => ModelParams::with_drift(
            model.eta(),
            model.r() + eps,
            model.sigma(),
            model.lambda(),
            model.jumps(),
        ),
        BumpParam::Sigma => ModelParams::with_drift(
            model.eta(),
            model.r(),
            model.sigma() + eps,
            model.lambda(),
            model.jumps(),
        ),
        BumpParam::SigmaFrozenGamma => {
            let s = model.sigma() + eps;
            // with_drift derives gamma = eta - s^2/2; choosing eta so that
            // gamma stays put freezes it
            ModelParams::with_drift(
                model.gamma() + 0.5 * s * s,
                model.r(),
                s,
                model.lambda(),
                model.jumps(),
            )
        }
        BumpParam::Lambda => ModelParams::risk_neutral(
            model.r(),
            model.sigma(),
            model.lambda() + eps,
            model.jumps(),
        ),
        BumpParam::JumpMean => ModelParams::risk_neutral(
            model.r(),
            model.sigma(),
            model.lambda(),
            JumpSpec::Normal {
                mu: mu + eps,
                delta,
            },
        ),
        BumpParam::JumpSd => ModelParams::risk_neutral(
            model.r(),
            model.sigma(),
            model.lambda(),
            JumpSpec::Normal {
                mu,
                delta: delta + eps,
            },
        ),
    }
}

/// Central finite difference `(C(p+h) - C(p-h)) / 2h` of the Fourier-route
/// price under the documented freeze rule for `param`.
pub fn fd_greek(
    param: BumpParam,
    terms: &ContractTerms,
    model: &ModelParams,
    policy: &SeriesPolicy,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParam(format!(
            "bump size must be positive, got {h}"
        )));
    }
    let up = price_fourier(terms, &bumped(model, param, h)?, policy)?.price;
    let down = price_fourier(terms, &bumped(model, param, -h)?, policy)?.price;
    Ok((up - down) / (2.0 * h))
}

/// Vega from the Fourier price representation.
///
/// Differentiating the exact Fourier route in `sigma` (at frozen `gamma`)
/// gives, with `F(y) = E[e^{-iy(c-R)^+}]`, `F' = dF/dsigma`,
/// `p+ = Q(R > c)` and `q0 = p+^n`:
///
/// `V = (nK e^{-rT}/pi) int_0^inf Re[(1+iy rho - e^{iy rho})/y^2
///      (F^{n-1} F' - p+^{n-1} p+')] dy  +  K e^{-rT} rho n p+^{n-1} p+'`
///
/// The subtracted constant `p+^{n-1} p+'` (the `sigma`-derivative of the
/// all-periods-capped atom) makes the integrand absolutely integrable; its
/// contribution returns through the closed atom term.
pub fn vega_fourier(
    terms: &ContractTerms,
    model: &ModelParams,
    policy: &SeriesPolicy,
) -> Result<f64> {
    policy.validate()?;
    let rho_cap = terms.rho_cap();
    let n = terms.periods();
    let df = terms.notional() * (-model.r() * terms.maturity()).exp();
    if rho_cap <= 0.0 {
        // guarantee always binds; price is volatility-insensitive
        return Ok(0.0);
    }
    let engine = CliquetEngine::new(terms, model, policy)?;
    let rho_profile = engine.capped_return_density_profile()?;
    let dpdf = |u: f64| engine.mix.dpdf_dsigma(u);
    let dpdf_prime = |u: f64| engine.mix.dpdf_dsigma_prime(u);
    let sigma_profile = engine.u_density_profile(&dpdf, &dpdf_prime)?;

    let p_plus = 1.0 - rho_profile.mass();
    let pw = |k: i32| p_plus.powi(k);
    // p+' = -d/dsigma Q(X <= ln(1+c)) at frozen gamma
    let pp_prime = -engine.mix.dcdf_dsigma(engine.b);
    let rho0 = engine.mix.pdf(engine.b) / engine.cap1;
    let rho_sigma0 = engine.mix.dpdf_dsigma(engine.b) / engine.cap1;
    // leading 1/y coefficient of F^{n-1} F' - p+^{n-1} p+'
    let lead = pw(n as i32 - 1) * rho_sigma0
        + pp_prime * (n as f64 - 1.0) * pw(n as i32 - 2).max(0.0) * rho0;
    let mean_tail = rho_cap * lead;

    let quad = integrate_semi_infinite(
        |y| {
            let t_rho = rho_profile.transform(y);
            let t_sigma = sigma_profile.transform(y);
            // F^{n-1} F' - p+^{n-1} p+'
            //   = F^{n-1} (F' - p+') + p+' (F^{n-1} - p+^{n-1})
            let f_pow_diff = crate::pricing::pow_diff(t_rho, p_plus, n - 1);
            let combo = (f_pow_diff + pw(n as i32 - 1)) * t_sigma + pp_prime * f_pow_diff;
            Complex64::new((crate::pricing::put_kernel(y, rho_cap) * combo).re, 0.0)
        },
        policy.quad_tol,
        Tail::OscillatoryMean {
            mean: mean_tail,
            omega: rho_cap,
        },
    )?;
    Ok(df * (n as f64 / PI) * quad.re() + df * rho_cap * n as f64 * pw(n as i32 - 1) * pp_prime)
}

/// Vega from the distribution-function price representation.
///
/// The double integral (weight `Psi` over cap levels `w`, Gil-Pelaez style
/// frequency integral inside) is evaluated with the integration order
/// exchanged: the `w`-integral becomes one oscillatory transform `T_Psi(x)`
/// of the fixed weight profile, leaving a single frequency integral
///
/// `V = n tau sigma K e^{-rT} [ T_Psi(0)/2
///      - (1/pi) int_0^inf Re(i e^{-ix(1+g/n)} phi_{Z1}(x)^{n-1} T_Psi(x)) / x dx ]`.
pub fn vega_distribution(
    terms: &ContractTerms,
    model: &ModelParams,
    policy: &SeriesPolicy,
) -> Result<f64> {
    policy.validate()?;
    let rho_cap = terms.rho_cap();
    let n = terms.periods();
    if rho_cap <= 0.0 {
        return Ok(0.0);
    }
    let engine = CliquetEngine::new(terms, model, policy)?;
    let cdf_profile = engine.cdf_profile()?;

    // Psi-mixture: sum_m w_m pdf(z_m) z_m / s_m^2 at z_m = (ln w - M_m)/s_m
    let mix = &engine.mix;
    let psi = |w: f64| {
        let lw = w.ln();
        let mut acc = 0.0;
        for ((&wt, &m), &s) in mix.weights.iter().zip(&mix.means).zip(&mix.sds) {
            let z = (lw - m) / s;
            acc += wt * crate::numerics::normal_pdf(z) * z / (s * s);
        }
        acc
    };
    let dpsi = |w: f64| {
        let lw = w.ln();
        let mut acc = 0.0;
        for ((&wt, &m), &s) in mix.weights.iter().zip(&mix.means).zip(&mix.sds) {
            let z = (lw - m) / s;
            acc += wt * crate::numerics::normal_pdf(z) * (1.0 - z * z) / (s * s * s * w);
        }
        acc
    };
    let w_lo = mix.support(12.0).0.exp().max(1e-12).min(0.5 * engine.cap1);
    let psi_profile =
        crate::numerics::filon::OscProfile::build(&psi, &dpsi, w_lo, engine.cap1, 1e-12)?;

    let theta = 1.0 + terms.guarantee() / n as f64;
    let quad = integrate_semi_infinite(
        |x| {
            let phi_pow = (engine.phi_z1_minus_one(x, &cdf_profile) + 1.0).powu(n - 1);
            let t_psi = psi_profile.transform(x);
            let v =
                Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, -x * theta) * phi_pow * t_psi;
            Complex64::new(v.re / x, 0.0)
        },
        policy.quad_tol,
        Tail::OscillatoryMean {
            mean: 0.0,
            omega: rho_cap,
        },
    )?;
    let df = terms.notional() * (-model.r() * terms.maturity()).exp();
    let scale = n as f64 * terms.period_length() * model.sigma() * df;
    Ok(scale * (0.5 * psi_profile.mass() - quad.re() / PI))
}

/// Assemble the full report under one method.
pub fn greeks_report(
    terms: &ContractTerms,
    model: &ModelParams,
    policy: &SeriesPolicy,
    method: GreekMethod,
) -> Result<GreeksReport> {
    let (delta, gamma) = delta_gamma(terms);
    let (rho_v, vega) = match method {
        GreekMethod::Fourier => (
            rho(terms, model, policy)?,
            vega_fourier(terms, model, policy)?,
        ),
        GreekMethod::DistributionFn => (
            rho(terms, model, policy)?,
            vega_distribution(terms, model, policy)?,
        ),
        GreekMethod::FiniteDifference => (
            fd_greek(BumpParam::Rate, terms, model, policy, 1e-5)?,
            fd_greek(BumpParam::SigmaFrozenGamma, terms, model, policy, 1e-4)?,
        ),
    };
    Ok(GreeksReport {
        rho: rho_v,
        delta,
        gamma,
        vega,
        method,
    })
}
