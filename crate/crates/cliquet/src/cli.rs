//! Command-line support: JSON run configuration, command dispatch, and
//! machine-readable reports.
//!
//! One self-describing JSON document configures a run:
//!
//! ```json
//! {
//!   "model":    { "r": 0.03, "sigma": 0.2, "lambda": 0.5,
//!                 "jump": { "kind": "normal", "mu": -0.1, "delta": 0.15 } },
//!   "contract": { "K": 1000.0, "T": 1.0833333333333333, "g": 0.0, "c": 0.01,
//!                 "n": 12, "t0": 0.0833333333333333, "tau": 0.0833333333333333 },
//!   "policy":   { "series_eps": 1e-12, "quad_tol": 1e-9, "max_terms": 200 },
//!   "mc":       { "n_paths": 1000000, "seed": 7, "antithetic": true }
//! }
//! ```
//!
//! Rates are annual and times are in years. `policy` and `mc` are optional.
//! Reports embed the resolved sections plus per-result diagnostics, carry
//! no timestamps, and serialize with a fixed key order, so identical run
//! specs produce byte-identical output. CSV rows render numbers through
//! the same serializer as JSON.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::greeks::{greeks_report, GreekMethod};
use crate::levy::{JumpSpec, ModelParams, SeriesPolicy};
use crate::mc::{mc_ez1, mc_increment_statistic, mc_price, McConfig};
use crate::pricing::{
    ez_closed, ez_distribution, ez_fourier, phi_z1_density, phi_z1_distribution,
    price_distribution, price_fourier, ContractTerms, PriceResult,
};

// ---------------------------------------------------------------------------
// configuration schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub contract: ContractSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub mc: McSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub r: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub jump: JumpSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractSection {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub g: f64,
    pub c: f64,
    pub n: u32,
    pub t0: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub series_eps: f64,
    pub quad_tol: f64,
    pub max_terms: usize,
}

impl Default for PolicySection {
    fn default() -> Self {
        let p = SeriesPolicy::default();
        PolicySection {
            series_eps: p.series_eps,
            quad_tol: p.quad_tol,
            max_terms: p.max_terms,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub n_paths: u64,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for McSection {
    fn default() -> Self {
        let m = McConfig::default();
        McSection {
            n_paths: m.n_paths,
            seed: m.seed,
            antithetic: m.antithetic,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<(ModelParams, ContractTerms, SeriesPolicy, McConfig)> {
        let jumps = match self.model.jump.kind.as_str() {
            "normal" => JumpSpec::Normal {
                mu: self.model.jump.mu.ok_or_else(|| {
                    Error::Config("model.jump.mu: required for kind \"normal\"".into())
                })?,
                delta: self.model.jump.delta.ok_or_else(|| {
                    Error::Config("model.jump.delta: required for kind \"normal\"".into())
                })?,
            },
            "exponential" => JumpSpec::Exponential {
                alpha: self.model.jump.alpha.ok_or_else(|| {
                    Error::Config("model.jump.alpha: required for kind \"exponential\"".into())
                })?,
            },
            other => {
                return Err(Error::Config(format!(
                    "model.jump.kind: expected \"normal\" or \"exponential\", got \"{other}\""
                )))
            }
        };
        let model =
            ModelParams::risk_neutral(self.model.r, self.model.sigma, self.model.lambda, jumps)
                .map_err(|e| Error::Config(format!("model: {e}")))?;
        let c = &self.contract;
        let terms = ContractTerms::new(c.k, c.t, c.g, c.c, c.n, c.t0, c.tau)
            .map_err(|e| Error::Config(format!("contract: {e}")))?;
        let policy = SeriesPolicy {
            series_eps: self.policy.series_eps,
            quad_tol: self.policy.quad_tol,
            max_terms: self.policy.max_terms,
        };
        policy
            .validate()
            .map_err(|e| Error::Config(format!("policy: {e}")))?;
        let mc = McConfig {
            n_paths: self.mc.n_paths,
            seed: self.mc.seed,
            antithetic: self.mc.antithetic,
        };
        mc.validate()
            .map_err(|e| Error::Config(format!("mc: {e}")))?;
        Ok((model, terms, policy, mc))
    }
}

// ---------------------------------------------------------------------------
// run specification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Price,
    Greeks,
    Density,
    Cdf,
    Returns,
    Drawdown,
    Mc,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// One-parameter sweep `param=start:stop:steps`. For the distribution
/// queries (`density`, `cdf`, `returns`, `drawdown`) the parameter is the
/// query coordinate (`x`, `xi`, `kappa`); for the pricing commands it is a
/// model or contract field.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (param, range) = text.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "--grid: expected param=start:stop:steps, got \"{text}\""
            ))
        })?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "--grid: expected start:stop:steps, got \"{range}\""
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Config(format!("--grid: bad start \"{}\"", parts[0])))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Config(format!("--grid: bad stop \"{}\"", parts[1])))?;
        let steps: u32 = parts[2]
            .parse()
            .map_err(|_| Error::Config(format!("--grid: bad steps \"{}\"", parts[2])))?;
        if steps < 1 {
            return Err(Error::Config("--grid: steps must be >= 1".into()));
        }
        Ok(GridSpec {
            param: param.to_string(),
            start,
            stop,
            steps,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        (0..self.steps)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub command: Command,
    pub config: RunConfig,
    pub output: OutputFormat,
    pub grid: Option<GridSpec>,
    pub seed_override: Option<u64>,
    pub paths_override: Option<u64>,
}

/// Structured report; `rows` is one flat object per result.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    pub header: Map<String, Value>,
    pub rows: Vec<Map<String, Value>>,
    /// Set by `validate` when a check fails.
    pub failed_checks: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert(
            "command".into(),
            serde_json::to_value(self.command).expect("command serializes"),
        );
        for (k, v) in &self.header {
            root.insert(k.clone(), v.clone());
        }
        root.insert(
            "results".into(),
            Value::Array(self.rows.iter().cloned().map(Value::Object).collect()),
        );
        serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes")
    }

    /// CSV with one line per result row; numbers render exactly as in the
    /// JSON output so the two formats agree to full printed precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.rows.is_empty() {
            return out;
        }
        let columns: Vec<&String> = self.rows[0].keys().collect();
        out.push_str(
            &columns
                .iter()
                .map(|c| c.as_str())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = columns
                .iter()
                .map(|&c| match row.get(c) {
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                    None => String::new(),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn header_for(config: &RunConfig, model: &ModelParams, include_mc: bool) -> Map<String, Value> {
    let mut h = Map::new();
    let mut model_v = serde_json::to_value(&config.model).expect("model serializes");
    // embed the derived drift so reports are self-contained
    if let Value::Object(ref mut m) = model_v {
        m.insert("eta".into(), num(model.eta()));
        m.insert("gamma".into(), num(model.gamma()));
    }
    h.insert("model".into(), model_v);
    h.insert(
        "contract".into(),
        serde_json::to_value(&config.contract).expect("contract serializes"),
    );
    h.insert(
        "policy".into(),
        serde_json::to_value(&config.policy).expect("policy serializes"),
    );
    if include_mc {
        h.insert(
            "mc".into(),
            serde_json::to_value(&config.mc).expect("mc serializes"),
        );
    }
    h
}

fn price_row(prefix: &[(&str, f64)], r: &PriceResult) -> Map<String, Value> {
    let mut row = Map::new();
    for (k, v) in prefix {
        row.insert((*k).into(), num(*v));
    }
    row.insert(
        "method".into(),
        Value::String(
            match r.method {
                crate::pricing::PriceMethod::DistributionFn => "distribution_fn",
                crate::pricing::PriceMethod::Fourier => "fourier",
            }
            .into(),
        ),
    );
    row.insert("price".into(), num(r.price));
    row.insert("ez1".into(), num(r.ez1));
    row.insert("imag_residual".into(), num(r.imag_residual));
    row.insert("tail_bound".into(), num(r.tail_bound));
    row
}

/// Rebuild (model, terms) with one named parameter replaced.
fn with_param(config: &RunConfig, param: &str, value: f64) -> Result<(ModelParams, ContractTerms)> {
    let mut cfg = config.clone();
    match param {
        "r" => cfg.model.r = value,
        "sigma" => cfg.model.sigma = value,
        "lambda" => cfg.model.lambda = value,
        "mu" => cfg.model.jump.mu = Some(value),
        "delta" => cfg.model.jump.delta = Some(value),
        "alpha" => cfg.model.jump.alpha = Some(value),
        "K" => cfg.contract.k = value,
        "g" => cfg.contract.g = value,
        "c" => cfg.contract.c = value,
        "t0" => cfg.contract.t0 = value,
        "tau" => cfg.contract.tau = value,
        other => {
            return Err(Error::Config(format!(
                "--grid: unknown parameter \"{other}\" (expected one of r, sigma, lambda, mu, delta, alpha, K, g, c, t0, tau)"
            )))
        }
    }
    let (model, terms, _, _) = cfg.resolve()?;
    Ok((model, terms))
}

/// Execute a run specification.
pub fn run(spec: &RunSpec) -> Result<Report> {
    let mut config = spec.config.clone();
    if let Some(seed) = spec.seed_override {
        config.mc.seed = seed;
    }
    if let Some(paths) = spec.paths_override {
        config.mc.n_paths = paths;
    }
    let (model, terms, policy, mc) = config.resolve()?;
    let include_mc = matches!(spec.command, Command::Mc | Command::Validate);
    let mut report = Report {
        command: spec.command,
        header: header_for(&config, &model, include_mc),
        rows: Vec::new(),
        failed_checks: 0,
    };

    match spec.command {
        Command::Price => {
            type SweepPoint = (Option<(String, f64)>, ModelParams, ContractTerms);
            let sweep: Vec<SweepPoint> = match &spec.grid {
                None => vec![(None, model, terms)],
                Some(grid) => {
                    let mut v = Vec::new();
                    for x in grid.points() {
                        let (m, t) = with_param(&config, &grid.param, x)?;
                        v.push((Some((grid.param.clone(), x)), m, t));
                    }
                    v
                }
            };
            for (tag, m, t) in sweep {
                for r in [
                    price_distribution(&t, &m, &policy)?,
                    price_fourier(&t, &m, &policy)?,
                ] {
                    let mut row = match &tag {
                        Some((p, x)) => price_row(&[(p.as_str(), *x)], &r),
                        None => price_row(&[], &r),
                    };
                    row.insert("discount_factor".into(), num((-m.r() * t.maturity()).exp()));
                    report.rows.push(row);
                }
            }
        }
        Command::Greeks => {
            for method in [
                GreekMethod::Fourier,
                GreekMethod::DistributionFn,
                GreekMethod::FiniteDifference,
            ] {
                let g = greeks_report(&terms, &model, &policy, method)?;
                let mut row = Map::new();
                row.insert(
                    "method".into(),
                    Value::String(
                        match method {
                            GreekMethod::Fourier => "fourier",
                            GreekMethod::DistributionFn => "distribution_fn",
                            GreekMethod::FiniteDifference => "finite_difference",
                        }
                        .into(),
                    ),
                );
                row.insert("rho".into(), num(g.rho));
                row.insert("delta".into(), num(g.delta));
                row.insert("gamma".into(), num(g.gamma));
                row.insert("vega".into(), num(g.vega));
                report.rows.push(row);
            }
        }
        Command::Density | Command::Cdf => {
            let t = terms.period_length();
            let grid = query_grid(&spec.grid, "x", || default_x_grid(&model, t))?;
            let series_available = matches!(model.jumps(), JumpSpec::Normal { .. });
            for x in grid {
                let mut row = Map::new();
                row.insert("x".into(), num(x));
                row.insert("t".into(), num(t));
                if spec.command == Command::Density {
                    if series_available {
                        row.insert("density_series".into(), num(model.density(x, t, &policy)?));
                    }
                    row.insert(
                        "density_fourier".into(),
                        num(model.density_fourier(x, t, &policy)?),
                    );
                } else {
                    if !series_available {
                        return Err(Error::UnsupportedJumpLaw(
                            "cdf requires normal jump amplitudes".into(),
                        ));
                    }
                    row.insert("cdf".into(), num(model.cdf(x, t, &policy)?));
                }
                report.rows.push(row);
            }
        }
        Command::Returns => {
            let tau = terms.period_length();
            let grid = query_grid(&spec.grid, "xi", || {
                default_x_grid(&model, tau)
                    .into_iter()
                    .map(|x| x.exp() - 1.0)
                    .collect()
            })?;
            for xi in grid {
                let mut row = Map::new();
                row.insert("xi".into(), num(xi));
                row.insert("tau".into(), num(tau));
                row.insert("prob".into(), num(model.return_cdf(xi, tau, &policy)?));
                report.rows.push(row);
            }
        }
        Command::Drawdown => {
            // horizon: the full reset window of the contract
            let horizon = terms.periods() as f64 * terms.period_length();
            let grid = query_grid(&spec.grid, "kappa", || {
                (0..11).map(|i| 0.5 + 0.05 * i as f64).collect()
            })?;
            for kappa in grid {
                let mut row = Map::new();
                row.insert("kappa".into(), num(kappa));
                row.insert("horizon".into(), num(horizon));
                row.insert(
                    "prob".into(),
                    num(model.drawdown_prob(kappa, horizon, &policy)?),
                );
                report.rows.push(row);
            }
        }
        Command::Mc => {
            // analytic references exist for normal jump amplitudes only;
            // the sampler itself supports both laws
            let analytic_price = match price_fourier(&terms, &model, &policy) {
                Ok(r) => num(r.price),
                Err(Error::UnsupportedJumpLaw(_)) => Value::Null,
                Err(e) => return Err(e),
            };
            let analytic_ez = match ez_closed(&terms, &model, &policy) {
                Ok(v) => num(v),
                Err(Error::UnsupportedJumpLaw(_)) => Value::Null,
                Err(e) => return Err(e),
            };
            let price_est = mc_price(&terms, &model, &mc)?;
            let mut row = Map::new();
            row.insert("quantity".into(), Value::String("price".into()));
            row.insert("mean".into(), num(price_est.mean));
            row.insert("stderr".into(), num(price_est.stderr));
            row.insert("n_paths".into(), Value::from(price_est.n_paths));
            row.insert("seed".into(), Value::from(price_est.seed));
            row.insert("analytic".into(), analytic_price);
            report.rows.push(row);

            let ez_est = mc_ez1(&terms, &model, &mc)?;
            let mut row = Map::new();
            row.insert("quantity".into(), Value::String("ez1".into()));
            row.insert("mean".into(), num(ez_est.mean));
            row.insert("stderr".into(), num(ez_est.stderr));
            row.insert("n_paths".into(), Value::from(ez_est.n_paths));
            row.insert("seed".into(), Value::from(ez_est.seed));
            row.insert("analytic".into(), analytic_ez);
            report.rows.push(row);
        }
        Command::Validate => {
            let checks = validate_suite(&terms, &model, &policy, &mc)?;
            report.failed_checks = checks.iter().filter(|c| !c.passed).count();
            for c in checks {
                let mut row = Map::new();
                row.insert("check".into(), Value::String(c.name));
                row.insert("passed".into(), Value::Bool(c.passed));
                row.insert("observed".into(), num(c.observed));
                row.insert("threshold".into(), num(c.threshold));
                report.rows.push(row);
            }
        }
    }
    Ok(report)
}

fn query_grid(
    grid: &Option<GridSpec>,
    expected: &str,
    default: impl FnOnce() -> Vec<f64>,
) -> Result<Vec<f64>> {
    match grid {
        None => Ok(default()),
        Some(g) if g.param == expected => Ok(g.points()),
        Some(g) => Err(Error::Config(format!(
            "--grid: this command sweeps \"{expected}\", got \"{}\"",
            g.param
        ))),
    }
}

fn default_x_grid(model: &ModelParams, t: f64) -> Vec<f64> {
    // mean +- 6 sd window; for exponential amplitudes use E[Y^2] = 2/alpha^2
    let (mean, var) = match model.jumps() {
        JumpSpec::Normal { .. } => model.mean_variance(t).expect("normal jumps"),
        JumpSpec::Exponential { alpha } => (
            t * (model.gamma() + model.lambda() / alpha),
            t * (model.sigma() * model.sigma() + 2.0 * model.lambda() / (alpha * alpha)),
        ),
    };
    let sd = var.sqrt();
    (0..25)
        .map(|i| mean - 6.0 * sd + 12.0 * sd * i as f64 / 24.0)
        .collect()
}

// ---------------------------------------------------------------------------
// validation suite
// ---------------------------------------------------------------------------

struct Check {
    name: String,
    passed: bool,
    observed: f64,
    threshold: f64,
}

impl Check {
    fn below(name: &str, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: observed <= threshold,
            observed,
            threshold,
        }
    }
}

/// Cross-method and Monte Carlo invariant suite behind the `validate`
/// command; runs at the configured path count.
fn validate_suite(
    terms: &ContractTerms,
    model: &ModelParams,
    policy: &SeriesPolicy,
    mc: &McConfig,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let tau = terms.period_length();

    checks.push(Check::below(
        "martingale_defect",
        model.martingale_defect()?.abs(),
        1e-12,
    ));
    let emart = mc_increment_statistic(tau, model, mc, |x| x.exp())?;
    checks.push(Check::below(
        "mc_exp_moment_sigmas",
        emart.sigmas_from((model.r() * tau).exp()),
        3.0,
    ));

    if let JumpSpec::Exponential { .. } = model.jumps() {
        // remaining checks need the mixture series; the Fourier density is
        // still verified to integrate to one
        let u = default_x_grid(model, tau);
        let step = u[1] - u[0];
        let mut total = 0.0;
        for &x in &u {
            total += model.density_fourier(x, tau, policy)? * step;
        }
        checks.push(Check::below(
            "density_fourier_mass_window",
            (total - 1.0).abs(),
            2e-2,
        ));
        return Ok(checks);
    }

    // cross-method price
    let pd = price_distribution(terms, model, policy)?;
    let pf = price_fourier(terms, model, policy)?;
    checks.push(Check::below(
        "price_cross_method_rel",
        (pd.price - pf.price).abs() / pf.price.abs().max(1e-300),
        1e-5,
    ));

    // E[Z1] triple agreement + dampening invariance
    let ez_c = ez_closed(terms, model, policy)?;
    let ez_d = ez_distribution(terms, model, policy)?;
    checks.push(Check::below(
        "ez_closed_vs_distribution",
        (ez_c - ez_d).abs(),
        1e-6,
    ));
    let ez_f1 = ez_fourier(terms, model, policy, 1.0)?;
    checks.push(Check::below(
        "ez_closed_vs_fourier",
        (ez_c - ez_f1).abs(),
        1e-6,
    ));
    let mut spread: f64 = 0.0;
    for a in [0.5, 2.0] {
        spread = spread.max((ez_fourier(terms, model, policy, a)? - ez_f1).abs());
    }
    checks.push(Check::below("ez_dampening_invariance", spread, 1e-7));

    // characteristic-function duality
    let mut phi_gap: f64 = 0.0;
    let mut phi_mod: f64 = 0.0;
    for x in [0.5, 1.0, 5.0, 20.0, 50.0] {
        let a = phi_z1_distribution(x, terms, model, policy)?;
        let b = phi_z1_density(x, terms, model, policy)?;
        phi_gap = phi_gap.max((a - b).norm());
        phi_mod = phi_mod.max(a.norm());
    }
    checks.push(Check::below("phi_z1_duality_sup", phi_gap, 1e-7));
    checks.push(Check::below(
        "phi_z1_modulus_excess",
        (phi_mod - 1.0).max(0.0),
        1e-8,
    ));

    // density layer
    let (mean, var) = model.mean_variance(tau)?;
    let sd = var.sqrt();
    let mut gap: f64 = 0.0;
    for i in 0..9 {
        let x = mean - 6.0 * sd + 12.0 * sd * i as f64 / 8.0;
        gap = gap
            .max((model.density(x, tau, policy)? - model.density_fourier(x, tau, policy)?).abs());
    }
    checks.push(Check::below("density_series_vs_fourier_sup", gap, 1e-7));

    // MC brackets
    let p_est = mc_price(terms, model, mc)?;
    checks.push(Check::below(
        "mc_price_sigmas",
        p_est.sigmas_from(pf.price),
        3.0,
    ));
    let ez_est = mc_ez1(terms, model, mc)?;
    checks.push(Check::below("mc_ez1_sigmas", ez_est.sigmas_from(ez_c), 3.0));

    // greeks identities
    let rho = crate::greeks::rho(terms, model, policy)?;
    checks.push(Check::below(
        "rho_identity",
        (rho / pf.price + terms.maturity()).abs(),
        1e-14,
    ));
    let vega_gap = {
        let vf = crate::greeks::vega_fourier(terms, model, policy)?;
        let vd = crate::greeks::vega_distribution(terms, model, policy)?;
        (vf - vd).abs() / vf.abs().max(1e-300)
    };
    checks.push(Check::below("vega_cross_method_rel", vega_gap, 1e-4));

    // degenerate exactness: g = n c binds the guarantee
    let degen = ContractTerms::new(
        terms.notional(),
        terms.maturity(),
        terms.periods() as f64 * terms.cap(),
        terms.cap(),
        terms.periods(),
        terms.first_reset(),
        terms.period_length(),
    )?;
    let expect =
        terms.notional() * (-model.r() * terms.maturity()).exp() * (1.0 + degen.guarantee());
    let worst = [
        price_distribution(&degen, model, policy)?.price,
        price_fourier(&degen, model, policy)?.price,
    ]
    .iter()
    .map(|p| (p - expect).abs() / expect)
    .fold(0.0f64, f64::max);
    checks.push(Check::below("degenerate_rho_zero_rel", worst, 1e-10));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const REFERENCE_CONFIG: &str = r#"{
        "model": {
            "r": 0.03, "sigma": 0.2, "lambda": 0.5,
            "jump": { "kind": "normal", "mu": -0.1, "delta": 0.15 }
        },
        "contract": {
            "K": 1000.0, "T": 1.0833333333333333, "g": 0.0, "c": 0.01,
            "n": 12, "t0": 0.0833333333333333, "tau": 0.0833333333333333
        },
        "mc": { "n_paths": 40000, "seed": 7, "antithetic": true }
    }"#;

    #[test]
    fn config_roundtrip_and_resolution() {
        let cfg = RunConfig::from_json(REFERENCE_CONFIG).unwrap();
        let (model, terms, policy, mc) = cfg.resolve().unwrap();
        assert_eq!(model.r(), 0.03);
        assert_eq!(terms.periods(), 12);
        assert_eq!(policy.max_terms, 200);
        assert_eq!(mc.n_paths, 40_000);
    }

    #[test]
    fn malformed_cap_is_a_config_error() {
        let cfg =
            RunConfig::from_json(&REFERENCE_CONFIG.replace("\"c\": 0.01", "\"c\": -0.01")).unwrap();
        let err = cfg.resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("contract"));
    }

    #[test]
    fn unknown_field_is_a_config_error() {
        let bad = REFERENCE_CONFIG.replace("\"r\": 0.03", "\"r\": 0.03, \"typo\": 1");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn grid_parsing() {
        let g = GridSpec::parse("sigma=0.1:0.4:4").unwrap();
        assert_eq!(g.points(), vec![0.1, 0.2, 0.30000000000000004, 0.4]);
        assert!(GridSpec::parse("sigma=0.1:0.4").is_err());
        assert!(GridSpec::parse("sigma=0.1:0.4:0").is_err());
        assert_eq!(
            GridSpec::parse("c=0.01:0.05:1").unwrap().points(),
            vec![0.01]
        );
    }

    #[test]
    fn price_report_is_deterministic_and_reparses() {
        let spec = RunSpec {
            command: Command::Price,
            config: RunConfig::from_json(REFERENCE_CONFIG).unwrap(),
            output: OutputFormat::Json,
            grid: None,
            seed_override: None,
            paths_override: None,
        };
        let a = run(&spec).unwrap().to_json();
        let b = run(&spec).unwrap().to_json();
        assert_eq!(a, b);
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["results"].as_array().unwrap().len(), 2);
        // degenerate rho = 0 configuration prices at the guarantee exactly
        let degen =
            RunConfig::from_json(&REFERENCE_CONFIG.replace("\"g\": 0.0", "\"g\": 0.12")).unwrap();
        let spec = RunSpec {
            command: Command::Price,
            config: degen,
            output: OutputFormat::Json,
            grid: None,
            seed_override: None,
            paths_override: None,
        };
        let rep = run(&spec).unwrap();
        let price = rep.rows[0]["price"].as_f64().unwrap();
        let expect = 1000.0 * (-0.03f64 * 13.0 / 12.0).exp() * 1.12;
        assert!((price - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn csv_numbers_match_json_rendering() {
        let spec = RunSpec {
            command: Command::Greeks,
            config: RunConfig::from_json(
                &REFERENCE_CONFIG.replace("\"quad_tol\": 1e-9", "\"quad_tol\": 1e-8"),
            )
            .unwrap(),
            output: OutputFormat::Csv,
            grid: None,
            seed_override: None,
            paths_override: None,
        };
        let rep = run(&spec).unwrap();
        let csv = rep.to_csv();
        let json = rep.to_json();
        // every numeric cell of the CSV appears verbatim in the JSON
        for line in csv.lines().skip(1) {
            for cell in line.split(',') {
                if cell.parse::<f64>().is_ok() {
                    assert!(json.contains(cell), "cell {cell} not found in JSON");
                }
            }
        }
    }

    #[test]
    fn query_grid_rejects_wrong_parameter() {
        let spec = RunSpec {
            command: Command::Density,
            config: RunConfig::from_json(REFERENCE_CONFIG).unwrap(),
            output: OutputFormat::Json,
            grid: Some(GridSpec::parse("sigma=0.1:0.2:3").unwrap()),
            seed_override: None,
            paths_override: None,
        };
        assert!(matches!(run(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_rebuilds_model_per_point() {
        let spec = RunSpec {
            command: Command::Price,
            config: RunConfig::from_json(REFERENCE_CONFIG).unwrap(),
            output: OutputFormat::Json,
            grid: Some(GridSpec::parse("sigma=0.15:0.25:2").unwrap()),
            seed_override: None,
            paths_override: None,
        };
        let rep = run(&spec).unwrap();
        assert_eq!(rep.rows.len(), 4); // 2 sigmas x 2 methods
        let p_low = rep.rows[1]["price"].as_f64().unwrap();
        let p_high = rep.rows[3]["price"].as_f64().unwrap();
        assert_ne!(p_low, p_high);
    }
}
