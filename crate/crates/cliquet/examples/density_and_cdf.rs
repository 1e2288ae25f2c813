//! Distributional layer of the driving process: the Poisson-mixture
//! density series against Fourier inversion, the distribution function,
//! the per-period return law, and a drawdown probability.
//!
//! ```bash
//! cargo run --release -p cliquet --example density_and_cdf
//! ```

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
    let policy = SeriesPolicy::default();
    let tau = 1.0 / 12.0;

    let (mean, var) = model.mean_variance(tau)?;
    let sd = var.sqrt();
    println!("one-month law of X: mean {mean:.6}, sd {sd:.6}");
    println!();
    println!(
        "{:>9} {:>14} {:>14} {:>10} {:>9}",
        "x", "density", "fourier", "gap", "cdf"
    );
    for i in 0..9 {
        let x = mean - 4.0 * sd + 8.0 * sd * i as f64 / 8.0;
        let series = model.density(x, tau, &policy)?;
        let fourier = model.density_fourier(x, tau, &policy)?;
        let cdf = model.cdf(x, tau, &policy)?;
        println!(
            "{x:>9.4} {series:>14.8} {fourier:>14.8} {:>10.1e} {cdf:>9.6}",
            (series - fourier).abs()
        );
    }

    println!();
    println!("per-period return distribution Q(R <= xi):");
    for xi in [-0.05, -0.02, 0.0, 0.01, 0.02, 0.05] {
        println!(
            "  Q(R <= {xi:>5.2}) = {:.6}",
            model.return_cdf(xi, tau, &policy)?
        );
    }

    println!();
    let kappa = 0.6;
    let horizon = 1.0;
    println!(
        "drawdown: Q(S falls below {:.0}% of today within {horizon} year) = {:.6e}",
        kappa * 100.0,
        model.drawdown_prob(kappa, horizon, &policy)?
    );
    Ok(())
}
