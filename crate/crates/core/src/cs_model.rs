//! The compressed-sensing redundancy bound `R > -2 log(R * Ss)` and a
//! Monte-Carlo estimate of how often random subsampling misidentifies the
//! frequencies of a sparse signal.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::seed;
use crate::spectrum::magnitude_order;
use crate::transforms::Dct1Plan;

/// Relative frequencies (fractions of the baseband) used for Monte-Carlo
/// test signals.
pub const MC_RELATIVE_FREQUENCIES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Base10,
    Base2,
}

impl LogBase {
    pub const ALL: [LogBase; 3] = [LogBase::Natural, LogBase::Base10, LogBase::Base2];

    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Base10 => x.log10(),
            LogBase::Base2 => x.log2(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Base10 => "base10",
            LogBase::Base2 => "base2",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "natural" | "e" | "ln" => Ok(LogBase::Natural),
            "base10" | "10" | "log10" => Ok(LogBase::Base10),
            "base2" | "2" | "log2" => Ok(LogBase::Base2),
            other => Err(invalid(format!("unknown log base '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsBoundQuery {
    pub sparsity: f64,
    pub redundancy: f64,
    pub log_base: LogBase,
}

impl CsBoundQuery {
    pub fn new(sparsity: f64, redundancy: f64) -> Self {
        Self {
            sparsity,
            redundancy,
            log_base: LogBase::Natural,
        }
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_sparsity(self.sparsity)?;
        if !(self.redundancy > 0.0) || !self.redundancy.is_finite() {
            return Err(invalid(format!("redundancy must be > 0, got {}", self.redundancy)));
        }
        Ok(())
    }
}

fn check_sparsity(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("sparsity must lie in (0, 1), got {s}")));
    }
    Ok(())
}

fn margin(sparsity: f64, redundancy: f64, base: LogBase) -> f64 {
    redundancy + 2.0 * base.log(redundancy * sparsity)
}

/// Whether `R > -2 log(R * Ss)`, with the margin `R + 2 log(R * Ss)`.
pub fn bound_satisfied(q: &CsBoundQuery) -> Result<(bool, f64)> {
    q.validate()?;
    let m = margin(q.sparsity, q.redundancy, q.log_base);
    Ok((m > 0.0, m))
}

/// Smallest redundancy allowed by the bound: the root of
/// `R + 2 log(R * Ss) = 0`, by bisection.
///
/// The margin is strictly increasing in `R`, so the root is unique. Values
/// at or below one mean the bound asks for no more measurements than
/// unknowns (see [`bound_is_vacuous`]).
pub fn min_redundancy(sparsity: f64, base: LogBase) -> Result<f64> {
    check_sparsity(sparsity)?;
    let f = |r: f64| margin(sparsity, r, base);
    let mut lo = 1e-12;
    let mut hi = 1.0 / sparsity;
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-13 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn bound_is_vacuous(sparsity: f64, base: LogBase) -> Result<bool> {
    Ok(min_redundancy(sparsity, base)? <= 1.0)
}

/// `(sparsity, min_redundancy)` on `steps` log-spaced sparsities from `min`
/// to `max` inclusive.
pub fn redundancy_curve(min: f64, max: f64, steps: usize, base: LogBase) -> Result<Vec<(f64, f64)>> {
    check_sparsity(min)?;
    check_sparsity(max)?;
    if min > max || steps == 0 || (steps == 1 && min != max) {
        return Err(invalid(format!(
            "need min <= max and steps >= 2 (or one step with min == max), got {min}..{max} in {steps}"
        )));
    }
    let (a, b) = (min.ln(), max.ln());
    (0..steps)
        .map(|i| {
            let t = if steps == 1 { 0.0 } else { i as f64 / (steps - 1) as f64 };
            let s = match i {
                0 => min,
                _ if i + 1 == steps => max,
                _ => (a + t * (b - a)).exp(),
            };
            Ok((s, min_redundancy(s, base)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McExperiment {
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub trials: usize,
    pub seed: u64,
}

impl McExperiment {
    /// Number of samples per trial, `floor(rate * n)`.
    pub fn samples(&self) -> usize {
        (self.rate * self.n as f64 + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("signal length must be >= 2"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(invalid(format!("component count {} outside 1..={}", self.k, self.n)));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(invalid(format!("rate must lie in (0, 1], got {}", self.rate)));
        }
        if self.samples() < self.k {
            return Err(invalid(format!(
                "rate {} keeps {} of {} samples, fewer than k = {}",
                self.rate,
                self.samples(),
                self.n,
                self.k
            )));
        }
        if self.trials == 0 {
            return Err(invalid("need at least one trial"));
        }
        Ok(())
    }
}

/// DCT index of a relative frequency on a length-`n` baseband.
pub fn frequency_index(relative: f64, n: usize) -> usize {
    ((relative * n as f64).round() as usize).min(n - 1)
}

/// Fraction of trials in which the `k` largest DCT magnitudes of the
/// zero-filled, randomly subsampled signal miss the true frequencies.
///
/// Each trial draws `k` distinct frequencies from
/// [`MC_RELATIVE_FREQUENCIES`] (uniformly random distinct indices when `k`
/// exceeds five), builds the sum of the corresponding unit DCT basis vectors,
/// and keeps `floor(rate * n)` positions drawn without replacement. Trial `t`
/// uses its own stream derived from `(seed, t)`.
pub fn freq_error_probability(e: &McExperiment) -> Result<f64> {
    e.validate()?;
    let plan = Dct1Plan::new(e.n);
    let mut scratch = vec![0.0; plan.scratch_len()];
    let mut signal = vec![0.0; e.n];
    let mut buf = vec![0.0; e.n];
    let m = e.samples();
    let mut errors = 0usize;
    for t in 0..e.trials {
        let mut rng = seed::indexed_stream(e.seed, "cs/mc", t as u64);
        let mut truth: Vec<usize> = if e.k <= MC_RELATIVE_FREQUENCIES.len() {
            rand::seq::index::sample(&mut rng, MC_RELATIVE_FREQUENCIES.len(), e.k)
                .into_iter()
                .map(|i| frequency_index(MC_RELATIVE_FREQUENCIES[i], e.n))
                .collect()
        } else {
            rand::seq::index::sample(&mut rng, e.n, e.k).into_vec()
        };
        truth.sort_unstable();

        signal.iter_mut().for_each(|v| *v = 0.0);
        for &f in &truth {
            signal[f] = 1.0;
        }
        plan.inverse_with_scratch(&mut signal, &mut scratch);

        buf.iter_mut().for_each(|v| *v = 0.0);
        for i in rand::seq::index::sample(&mut rng, e.n, m) {
            buf[i] = signal[i];
        }
        plan.forward_with_scratch(&mut buf, &mut scratch);
        let mut found: Vec<usize> = magnitude_order(&buf).into_iter().take(e.k).collect();
        found.sort_unstable();
        if found != truth {
            errors += 1;
        }
    }
    Ok(errors as f64 / e.trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_of_256_satisfies_the_bound() {
        let (ok, m) = bound_satisfied(&CsBoundQuery::new(3.0 / 256.0, 38.0 / 3.0)).unwrap();
        assert!(ok);
        let expected = 38.0 / 3.0 + 2.0 * (38.0f64 / 256.0).ln();
        assert!((m - expected).abs() < 1e-12);
    }

    #[test]
    fn unit_product_has_zero_log_term() {
        let (ok, m) = bound_satisfied(&CsBoundQuery::new(0.25, 4.0)).unwrap();
        assert!(ok);
        assert!((m - 4.0).abs() < 1e-12);
    }

    #[test]
    fn low_redundancy_fails() {
        let (ok, m) = bound_satisfied(&CsBoundQuery::new(0.1, 1.0)).unwrap();
        assert!(!ok);
        assert!((m - (1.0 + 2.0 * 0.1f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn root_at_exp_minus_half_is_one() {
        let r = min_redundancy((-0.5f64).exp(), LogBase::Natural).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!(bound_is_vacuous(0.7, LogBase::Natural).unwrap());
        assert!(!bound_is_vacuous(0.1, LogBase::Natural).unwrap());
    }

    #[test]
    fn root_brackets_the_bound() {
        for base in LogBase::ALL {
            for s in [1e-4, 1e-3, 0.01, 0.1, 0.3] {
                let r = min_redundancy(s, base).unwrap();
                assert!(bound_satisfied(&CsBoundQuery::new(s, r + 1e-6).with_base(base)).unwrap().0);
                assert!(!bound_satisfied(&CsBoundQuery::new(s, r - 1e-6).with_base(base)).unwrap().0);
            }
        }
    }

    #[test]
    fn curve_has_requested_rows_and_endpoints() {
        let c = redundancy_curve(1e-3, 0.5, 50, LogBase::Natural).unwrap();
        assert_eq!(c.len(), 50);
        assert_eq!(c[0].0, 1e-3);
        assert_eq!(c[49].0, 0.5);
        assert!(c.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn full_rate_never_errs() {
        let e = McExperiment { n: 128, k: 2, rate: 1.0, trials: 50, seed: 1 };
        assert_eq!(freq_error_probability(&e).unwrap(), 0.0);
    }

    #[test]
    fn rate_below_k_rejected() {
        let e = McExperiment { n: 100, k: 3, rate: 0.02, trials: 5, seed: 1 };
        assert!(freq_error_probability(&e).is_err());
    }

    #[test]
    fn probability_is_deterministic() {
        let e = McExperiment { n: 256, k: 1, rate: 0.05, trials: 200, seed: 9 };
        assert_eq!(freq_error_probability(&e).unwrap(), freq_error_probability(&e).unwrap());
    }

    #[test]
    fn base_parsing() {
        assert_eq!("ln".parse::<LogBase>().unwrap(), LogBase::Natural);
        assert_eq!("log2".parse::<LogBase>().unwrap(), LogBase::Base2);
        assert!("log7".parse::<LogBase>().is_err());
    }
}
