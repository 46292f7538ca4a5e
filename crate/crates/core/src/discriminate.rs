//! The single-shot guessing game: was the absorber in place or not?
//!
//! Both hypotheses are equally likely a priori. The outcome set is the
//! output basis plus the absorption event, which can only happen with the
//! absorber present.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counterfactual::GainSummary;
use crate::error::{Error, Result};
use crate::scenarios::Scenario;
use crate::tolerances::TIE_BAND;

/// Label of the absorption event.
pub const ABSORBED: &str = "absorbed";

/// Name of the generator recorded in every [`GameEstimate`].
pub const GENERATOR: &str = "ChaCha8";

/// Trials per independent random stream. Batch `k` always draws from
/// stream `k` of the seed, so the tally does not depend on how batches are
/// spread over threads.
pub const BATCH: u64 = 1 << 16;

/// Probabilities over a labelled outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::LabelMismatch(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::domain(format!("invalid outcome probability {p}")));
        }
        Ok(Self { labels, probs })
    }

    /// Output distribution without the absorber, absorption included at
    /// zero.
    pub fn unblocked(summary: &GainSummary) -> Self {
        let mut labels: Vec<String> = summary.outcomes.iter().map(|o| o.label.clone()).collect();
        let mut probs: Vec<f64> = summary.outcomes.iter().map(|o| o.p_m).collect();
        labels.push(ABSORBED.into());
        probs.push(0.0);
        Self { labels, probs }
    }

    /// Output distribution with the absorber in place.
    pub fn blocked(summary: &GainSummary) -> Self {
        let mut labels: Vec<String> = summary.outcomes.iter().map(|o| o.label.clone()).collect();
        let mut probs: Vec<f64> = summary.outcomes.iter().map(|o| o.p_m_given_block).collect();
        labels.push(ABSORBED.into());
        probs.push(summary.p_a);
        Self { labels, probs }
    }

    fn cumulative(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

fn same_labels(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<()> {
    if p.labels == q.labels {
        Ok(())
    } else {
        Err(Error::LabelMismatch(format!(
            "outcome sets differ: [{}] vs [{}]",
            p.labels.join(", "),
            q.labels.join(", ")
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Present,
    Absent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuessMap {
    pub labels: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

impl GuessMap {
    pub fn verdict(&self, label: &str) -> Option<Verdict> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.verdicts[k])
    }
}

/// Guess "present" exactly where the outcome is more likely with the
/// absorber. Ties, up to [`TIE_BAND`], go to "absent".
pub fn optimal_guess_map(
    p: &OutcomeDistribution,
    p_blocked: &OutcomeDistribution,
) -> Result<GuessMap> {
    same_labels(p, p_blocked)?;
    let verdicts = p
        .probs
        .iter()
        .zip(&p_blocked.probs)
        .map(|(u, b)| {
            if b - u > TIE_BAND {
                Verdict::Present
            } else {
                Verdict::Absent
            }
        })
        .collect();
    Ok(GuessMap {
        labels: p.labels.clone(),
        verdicts,
    })
}

/// `½ Σ min(P(m), P(m|X_a))` over all outcomes including absorption.
pub fn error_probability(p: &OutcomeDistribution, p_blocked: &OutcomeDistribution) -> Result<f64> {
    same_labels(p, p_blocked)?;
    Ok(0.5
        * p.probs
            .iter()
            .zip(&p_blocked.probs)
            .map(|(u, b)| u.min(*b))
            .sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameEstimate {
    pub trials: u64,
    pub errors: u64,
    pub empirical_error: f64,
    /// Binomial standard error at the analytic rate.
    pub std_error: f64,
    pub analytic_error: f64,
    pub seed: u64,
    pub generator: &'static str,
}

impl GameEstimate {
    /// `|empirical − analytic|` in units of `std_error`.
    pub fn deviation_sigmas(&self) -> f64 {
        let d = (self.empirical_error - self.analytic_error).abs();
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn sample(cdf: &[f64], probs: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cdf.last().expect("non-empty outcome set");
    let u = rng.random::<f64>() * total;
    cdf.iter()
        .position(|&c| u < c)
        // rounding at the top end: fall back to the last outcome that can occur
        .unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap_or(0))
}

/// Monte Carlo run of the game between two explicit distributions.
pub fn simulate_distributions(
    p: &OutcomeDistribution,
    p_blocked: &OutcomeDistribution,
    trials: u64,
    seed: u64,
) -> Result<GameEstimate> {
    if trials == 0 {
        return Err(Error::domain("the game needs at least one trial"));
    }
    let guess = optimal_guess_map(p, p_blocked)?;
    let analytic = error_probability(p, p_blocked)?;
    if p.probs.iter().sum::<f64>() <= 0.0 || p_blocked.probs.iter().sum::<f64>() <= 0.0 {
        return Err(Error::domain("outcome distribution carries no probability"));
    }
    let (cdf_absent, cdf_present) = (p.cumulative(), p_blocked.cumulative());
    let batches = trials.div_ceil(BATCH);
    let errors: u64 = (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = BATCH.min(trials - k * BATCH);
            let mut wrong = 0u64;
            for _ in 0..n {
                let present = rng.random::<bool>();
                let m = if present {
                    sample(&cdf_present, &p_blocked.probs, &mut rng)
                } else {
                    sample(&cdf_absent, &p.probs, &mut rng)
                };
                if (guess.verdicts[m] == Verdict::Present) != present {
                    wrong += 1;
                }
            }
            wrong
        })
        .sum();
    Ok(GameEstimate {
        trials,
        errors,
        empirical_error: errors as f64 / trials as f64,
        std_error: (analytic * (1.0 - analytic) / trials as f64).sqrt(),
        analytic_error: analytic,
        seed,
        generator: GENERATOR,
    })
}

/// Monte Carlo run of the game for a scenario.
pub fn simulate_game(scenario: &Scenario, trials: u64, seed: u64) -> Result<GameEstimate> {
    let summary = scenario.report()?;
    simulate_distributions(
        &OutcomeDistribution::unblocked(&summary),
        &OutcomeDistribution::blocked(&summary),
        trials,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{classical_mixture_scenario, kd_scenario, three_path_scenario};

    fn dists(s: &Scenario) -> (OutcomeDistribution, OutcomeDistribution, GainSummary) {
        let r = s.report().unwrap();
        (
            OutcomeDistribution::unblocked(&r),
            OutcomeDistribution::blocked(&r),
            r,
        )
    }

    fn present(map: &GuessMap) -> Vec<&str> {
        map.labels
            .iter()
            .zip(&map.verdicts)
            .filter(|(_, v)| **v == Verdict::Present)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    #[test]
    fn guess_maps() {
        let (p, q, _) = dists(&kd_scenario());
        assert_eq!(
            present(&optimal_guess_map(&p, &q).unwrap()),
            ["m1", ABSORBED]
        );
        let (p, q, _) = dists(&classical_mixture_scenario(4).unwrap());
        assert_eq!(present(&optimal_guess_map(&p, &q).unwrap()), [ABSORBED]);
        let (p, q, _) = dists(&three_path_scenario());
        assert_eq!(
            present(&optimal_guess_map(&p, &q).unwrap()),
            ["3", ABSORBED]
        );
    }

    #[test]
    fn error_probabilities() {
        let (p, q, r) = dists(&kd_scenario());
        let e = error_probability(&p, &q).unwrap();
        assert!((e - 1.0 / 6.0).abs() < 1e-12);
        assert!((e - (0.5 - r.delta_a / 2.0)).abs() < 1e-12);
        let (p, q, _) = dists(&three_path_scenario());
        assert!((error_probability(&p, &q).unwrap() - 17.0 / 54.0).abs() < 1e-12);
        for n in 2..=6 {
            let (p, q, r) = dists(&classical_mixture_scenario(n).unwrap());
            let e = error_probability(&p, &q).unwrap();
            assert!((e - (1.0 - r.p_a) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn label_mismatch_is_rejected() {
        let (p, mut q, _) = dists(&kd_scenario());
        q.labels[0] = "x".into();
        assert!(matches!(
            optimal_guess_map(&p, &q),
            Err(Error::LabelMismatch(_))
        ));
        assert!(matches!(
            error_probability(&p, &q),
            Err(Error::LabelMismatch(_))
        ));
        assert!(OutcomeDistribution::new(vec!["a".into()], vec![]).is_err());
    }

    #[test]
    fn single_trial_is_zero_or_one() {
        for seed in 0..20 {
            let e = simulate_game(&kd_scenario(), 1, seed).unwrap();
            assert!(e.empirical_error == 0.0 || e.empirical_error == 1.0);
        }
        assert!(simulate_game(&kd_scenario(), 0, 0).is_err());
    }

    #[test]
    fn deterministic_and_partition_independent() {
        let s = three_path_scenario();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_game(&s, 300_000, 42).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(3));
        assert_ne!(one.errors, simulate_game(&s, 300_000, 43).unwrap().errors);
        assert_eq!(one.generator, GENERATOR);
    }

    #[test]
    fn mixture_estimate_within_band() {
        let e = simulate_game(&classical_mixture_scenario(2).unwrap(), 200_000, 1).unwrap();
        assert!((e.analytic_error - 0.25).abs() < 1e-12);
        assert!(e.deviation_sigmas() <= 5.0, "{e:?}");
    }
}
