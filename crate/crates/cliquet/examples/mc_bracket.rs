//! Monte Carlo convergence against the analytic price, with and without
//! antithetic variates, at increasing path counts.
//!
//! ```bash
//! cargo run --release -p cliquet --example mc_bracket
//! ```

use cliquet::mc::{mc_price, McConfig};
use cliquet::pricing::{price_fourier, ContractTerms};
use cliquet::{JumpSpec, ModelParams, SeriesPolicy};

fn main() -> cliquet::Result<()> {
    let model = ModelParams::risk_neutral(
        0.03,
        0.2,
        0.5,
        JumpSpec::Normal {
            mu: -0.1,
            delta: 0.15,
        },
    )?;
    let terms = ContractTerms::new(1000.0, 13.0 / 12.0, 0.0, 0.01, 12, 1.0 / 12.0, 1.0 / 12.0)?;
    let analytic = price_fourier(&terms, &model, &SeriesPolicy::default())?.price;
    println!("analytic price: {analytic:.6}");
    println!();
    println!(
        "{:>9} {:>12} {:>14} {:>10} {:>8}",
        "paths", "antithetic", "estimate", "stderr", "sigmas"
    );
    for &n in &[10_000u64, 100_000, 1_000_000] {
        for antithetic in [false, true] {
            let est = mc_price(
                &terms,
                &model,
                &McConfig {
                    n_paths: n,
                    seed: 7,
                    antithetic,
                },
            )?;
            println!(
                "{n:>9} {antithetic:>12} {:>14.6} {:>10.4} {:>8.2}",
                est.mean,
                est.stderr,
                est.sigmas_from(analytic)
            );
        }
    }
    Ok(())
}
