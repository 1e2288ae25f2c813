//! Price a monthly-sum-cap cliquet by both semi-analytic routes and show
//! the numerical diagnostics that come with each result.
//!
//! ```bash
//! cargo run --release -p cliquet --example price_both_routes
//! ```

use cliquet::pricing::{price_distribution, price_fourier, ContractTerms};
use cliquet::{JumpSpec, ModelParams, SeriesPolicy};

fn main() -> cliquet::Result<()> {
    // annual parameters: 3% rates, 20% diffusion vol, one jump every two
    // years averaging -10% with 15% spread
    let model = ModelParams::risk_neutral(
        0.03,
        0.2,
        0.5,
        JumpSpec::Normal {
            mu: -0.1,
            delta: 0.15,
        },
    )?;
    // 12 monthly periods capped at 1% each, zero guarantee, 1000 notional
    let terms = ContractTerms::new(1000.0, 13.0 / 12.0, 0.0, 0.01, 12, 1.0 / 12.0, 1.0 / 12.0)?;
    let policy = SeriesPolicy::default();

    println!(
        "model: eta = {:.6}, gamma = {:.6}",
        model.eta(),
        model.gamma()
    );
    println!(
        "contract: K = {}, T = {:.4}, g = {}, c = {}, n = {}, rho = nc - g = {:.4}",
        terms.notional(),
        terms.maturity(),
        terms.guarantee(),
        terms.cap(),
        terms.periods(),
        terms.rho_cap()
    );
    println!();
    println!(
        "{:<16} {:>16} {:>14} {:>12}",
        "route", "price", "E[Z1]", "tail bound"
    );
    for result in [
        price_distribution(&terms, &model, &policy)?,
        price_fourier(&terms, &model, &policy)?,
    ] {
        println!(
            "{:<16} {:>16.8} {:>14.9} {:>12.2e}",
            format!("{:?}", result.method),
            result.price,
            result.ez1,
            result.tail_bound
        );
    }
    let a = price_distribution(&terms, &model, &policy)?.price;
    let b = price_fourier(&terms, &model, &policy)?.price;
    println!();
    println!("cross-route relative gap: {:.2e}", (a - b).abs() / b);
    Ok(())
}
