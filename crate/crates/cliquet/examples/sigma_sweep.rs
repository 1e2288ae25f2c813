//! Sweep the diffusion volatility: prices fall as vol rises (the local
//! caps clip the upside while the downside stays open) and the analytic
//! Vega tracks the slope. Grid points price concurrently.
//!
//! ```bash
//! cargo run --release -p cliquet --example sigma_sweep
//! ```

use cliquet::greeks::vega_fourier;
use cliquet::pricing::{price_fourier, ContractTerms};
use cliquet::{JumpSpec, ModelParams, SeriesPolicy};
use rayon::prelude::*;

fn main() -> cliquet::Result<()> {
    let terms = ContractTerms::new(1000.0, 13.0 / 12.0, 0.0, 0.01, 12, 1.0 / 12.0, 1.0 / 12.0)?;
    let policy = SeriesPolicy {
        quad_tol: 1e-8,
        ..Default::default()
    };
    let sigmas: Vec<f64> = (0..7).map(|i| 0.10 + 0.05 * i as f64).collect();
    let rows: Vec<(f64, f64, f64)> = sigmas
        .par_iter()
        .map(|&sigma| {
            let model = ModelParams::risk_neutral(
                0.03,
                sigma,
                0.5,
                JumpSpec::Normal {
                    mu: -0.1,
                    delta: 0.15,
                },
            )
            .unwrap();
            let price = price_fourier(&terms, &model, &policy).unwrap().price;
            let vega = vega_fourier(&terms, &model, &policy).unwrap();
            (sigma, price, vega)
        })
        .collect();

    println!("{:>7} {:>14} {:>12}", "sigma", "price", "vega");
    for (sigma, price, vega) in &rows {
        println!("{sigma:>7.2} {price:>14.6} {vega:>12.6}");
    }
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1);
    println!();
    println!("price monotone decreasing in sigma: {monotone}");
    Ok(())
}
