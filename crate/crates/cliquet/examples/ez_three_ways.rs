//! Compute the expected capped period return `E[Z_1]` by all three
//! analytic routes and bracket them with Monte Carlo.
//!
//! ```bash
//! cargo run --release -p cliquet --example ez_three_ways
//! ```

use cliquet::mc::{mc_ez1, McConfig};
use cliquet::pricing::{ez_closed, ez_distribution, ez_fourier, ContractTerms};
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
    let policy = SeriesPolicy::default();

    let closed = ez_closed(&terms, &model, &policy)?;
    let dist = ez_distribution(&terms, &model, &policy)?;
    println!("closed series          : {closed:.12}");
    println!(
        "distribution function  : {dist:.12}   (gap {:.1e})",
        (dist - closed).abs()
    );
    for a in [0.5, 1.0, 2.0] {
        let f = ez_fourier(&terms, &model, &policy, a)?;
        println!(
            "damped Fourier (a={a:>3}) : {f:.12}   (gap {:.1e})",
            (f - closed).abs()
        );
    }

    let mc = McConfig {
        n_paths: 2_000_000,
        seed: 7,
        antithetic: true,
    };
    let est = mc_ez1(&terms, &model, &mc)?;
    println!(
        "monte carlo ({} paths): {:.12} +- {:.2e}  ({:.2} sigma from closed)",
        est.n_paths,
        est.mean,
        est.stderr,
        est.sigmas_from(closed)
    );
    Ok(())
}
