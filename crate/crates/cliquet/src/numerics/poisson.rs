//! Truncated Poisson weights for the jump-count mixture series.

use crate::error::{Error, Result};

/// Weights `w_m = e^{-rate} rate^m / m!` for `m = 0..=M`, truncated at the
/// smallest `M` with cumulative mass `>= 1 - eps`.
///
/// For moderate rates the forward recurrence `w_{m+1} = w_m rate/(m+1)` is
/// exact to rounding. Above `rate = 600` the leading weight underflows, so
/// weights switch to log space; entries below the f64 underflow threshold
/// come back as zero, which is harmless since they are < 1e-300.
pub fn poisson_weights(rate: f64, eps: f64, max_terms: usize) -> Result<Vec<f64>> {
    if !(rate >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "poisson rate must be >= 0, got {rate}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParam(format!(
            "truncation eps must be in (0,1), got {eps}"
        )));
    }
    if max_terms == 0 {
        return Err(Error::InvalidParam("max_terms must be >= 1".into()));
    }
    if rate == 0.0 {
        return Ok(vec![1.0]);
    }

    let log_space = rate > 600.0;
    let mut weights = Vec::with_capacity(16);
    let mut cum = 0.0;
    let mut w = if log_space { 0.0 } else { (-rate).exp() };
    for m in 0..max_terms {
        if log_space {
            w = (-rate + m as f64 * rate.ln() - ln_factorial(m)).exp();
        } else if m > 0 {
            w *= rate / m as f64;
        }
        weights.push(w);
        cum += w;
        if cum >= 1.0 - eps {
            return Ok(weights);
        }
    }
    Err(Error::TruncationBudgetExceeded(format!(
        "poisson series: {max_terms} terms leave tail mass {:.3e} > {eps:.3e} at rate {rate}",
        1.0 - cum
    )))
}

/// `ln(m!)` — cumulative sum for small `m`, Stirling series beyond.
pub fn ln_factorial(m: usize) -> f64 {
    if m < 2 {
        return 0.0;
    }
    if m <= 256 {
        let mut acc = 0.0;
        for k in 2..=m {
            acc += (k as f64).ln();
        }
        return acc;
    }
    // Stirling: ln m! = m ln m - m + 0.5 ln(2 pi m) + 1/(12m) - 1/(360 m^3)
    let x = m as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rate_zero_is_point_mass() {
        assert_eq!(poisson_weights(0.0, 1e-12, 10).unwrap(), vec![1.0]);
    }

    #[test]
    fn rate_one_matches_direct_summation() {
        let w = poisson_weights(1.0, 1e-12, 200).unwrap();
        // direct-summation oracle: e^{-1}/m!
        let mut fact = 1.0;
        for (m, &wm) in w.iter().enumerate() {
            if m > 0 {
                fact *= m as f64;
            }
            assert_abs_diff_eq!(wm, (-1.0f64).exp() / fact, epsilon = 1e-16);
        }
        let total: f64 = w.iter().sum();
        assert!(total >= 1.0 - 1e-12);
        // mpmath: 15 terms reach 1 - 1e-12 at rate 1
        assert_eq!(w.len(), 15);
    }

    #[test]
    fn weights_nonnegative_and_substochastic() {
        for rate in [0.04, 0.5, 3.0, 40.0] {
            let w = poisson_weights(rate, 1e-10, 500).unwrap();
            assert!(w.iter().all(|&x| x >= 0.0));
            let s: f64 = w.iter().sum();
            assert!((1.0 - 1e-10..=1.0 + 1e-14).contains(&s));
        }
    }

    #[test]
    fn large_rate_uses_log_space_without_overflow() {
        let w = poisson_weights(1e4, 1e-10, 12_000).unwrap();
        let s: f64 = w.iter().sum();
        assert!(s >= 1.0 - 1e-10 && s.is_finite());
        assert!(w.iter().all(|&x| x.is_finite()));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        assert!(matches!(
            poisson_weights(50.0, 1e-12, 10),
            Err(Error::TruncationBudgetExceeded(_))
        ));
    }

    #[test]
    fn ln_factorial_consistent_across_branch() {
        // compare Stirling (m > 256) against exact cumulative at the seam
        let exact: f64 = (2..=300u64).map(|k| (k as f64).ln()).sum();
        assert_abs_diff_eq!(ln_factorial(300), exact, epsilon = 1e-9);
    }
}
