//! Exponentially distributed (one-sided, positive) jump amplitudes: the
//! mixture series does not apply, but the Fourier-inversion density, the
//! characteristic exponent and the Monte Carlo sampler all do.
//!
//! ```bash
//! cargo run --release -p cliquet --example exponential_jumps
//! ```

use cliquet::mc::{mc_increment_statistic, McConfig};
use cliquet::{JumpSpec, ModelParams, SeriesPolicy};

fn main() -> cliquet::Result<()> {
    let model = ModelParams::risk_neutral(0.03, 0.2, 0.8, JumpSpec::Exponential { alpha: 6.0 })?;
    let policy = SeriesPolicy::default();
    let t = 0.5;

    println!(
        "risk-neutral drift: eta = {:.6} (compensates mean jump {:.4})",
        model.eta(),
        1.0 / 6.0
    );
    println!("martingale defect: {:.2e}", model.martingale_defect()?);
    println!();

    // density by Fourier inversion, sanity-checked against a histogram
    let mc = McConfig {
        n_paths: 400_000,
        seed: 3,
        antithetic: false,
    };
    println!(
        "{:>8} {:>14} {:>14} {:>8}",
        "x", "density", "mc histogram", "sigmas"
    );
    let width = 0.08;
    for i in -3i32..=4 {
        let x = 0.05 * i as f64;
        let dens = model.density_fourier(x, t, &policy)?;
        let (lo, hi) = (x - width / 2.0, x + width / 2.0);
        let bin = mc_increment_statistic(t, &model, &mc, |u| (u > lo && u <= hi) as u8 as f64)?;
        // compare the bin mass against the exact integral over the bin
        let mass = cliquet::numerics::integrate_finite_real(
            |u| model.density_fourier(u, t, &policy).unwrap(),
            lo,
            hi,
            1e-9,
        )?;
        let sigmas = bin.sigmas_from(mass);
        println!(
            "{x:>8.2} {dens:>14.6} {:>14.6} {sigmas:>8.2}",
            bin.mean / width
        );
    }
    println!();
    println!("MC mean of e^X over half a year vs e^(r t):");
    let est = mc_increment_statistic(t, &model, &mc, |x| x.exp())?;
    println!(
        "  {:.6} +- {:.1e} vs {:.6} ({:.2} sigma)",
        est.mean,
        est.stderr,
        (model.r() * t).exp(),
        est.sigmas_from((model.r() * t).exp())
    );
    Ok(())
}
