//! Output statistics with and without an ideal absorber on path `a`.
//!
//! For an input `ρ`, a blocked path `|a⟩` and an outcome `|m⟩`:
//!
//! * `P(m)       = ⟨m|ρ|m⟩`
//! * `P(m|X_a)   = ⟨m|(𝟙−|a⟩⟨a|) ρ (𝟙−|a⟩⟨a|)|m⟩`
//! * `ϱ(a,m)     = Re[⟨m|a⟩⟨a|ρ|m⟩]`      (Kirkwood–Dirac term)
//! * `EV(a,m)    = |⟨m|a⟩|² P(a)`         (Elitzur–Vaidman term)
//! * `χ_B(m|a)   = 2 (EV − ϱ)`            (back-action)
//!
//! so that `P(m|X_a) = P(m) − 2ϱ + EV = (P(m) − ϱ) + χ_B/2`. The absorption
//! event is treated as one more outcome, with probability `P(a)` when the
//! absorber is present and zero otherwise.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hilbert::{
    born_probability, project_out, DensityMatrix, OutcomeBasis, Projector, PureState,
};
use crate::tolerances;

/// Kirkwood–Dirac term `Re[⟨m|a⟩⟨a|ρ|m⟩]`.
pub fn kd_term(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<f64> {
    let ma = m.inner(a)?;
    let arm = rho.element(a, m)?;
    Ok((ma * arm).re)
}

/// Elitzur–Vaidman term `|⟨m|a⟩|² ⟨a|ρ|a⟩`.
pub fn ev_term(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<f64> {
    let overlap = m.overlap(a)?;
    Ok(overlap * born_probability(rho, a)?.get())
}

/// Full back-action `χ_B(m|a) = 2(EV − ϱ)`.
pub fn backaction_total(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<f64> {
    Ok(2.0 * backaction_share(rho, a, m)?)
}

/// Half of the back-action, `EV − ϱ`: the share carried by photons that do
/// not pass through `a`.
pub fn backaction_share(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<f64> {
    Ok(ev_term(rho, a, m)? - kd_term(rho, a, m)?)
}

/// `P(m|X_a)` for any vector `m`, complete basis or not.
pub fn blocked_probability(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<f64> {
    let blocked = project_out(rho, a)?;
    Ok(born_probability(&blocked.survivor, m)?.get())
}

/// Output probability at `m` when every path except `a` is blocked,
/// `⟨m|a⟩⟨a|ρ|a⟩⟨a|m⟩`.
pub fn transmit_only(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<f64> {
    let kept = Projector::onto(a).sandwich(rho)?;
    Ok(born_probability(&kept, m)?.get())
}

/// True when the change `EV − 2ϱ` is strictly positive, outside the tie band.
pub fn gain_condition(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<bool> {
    Ok(ev_term(rho, a, m)? - 2.0 * kd_term(rho, a, m)? > tolerances::TIE_BAND)
}

/// `ρ|a⟩ = P(a)|a⟩` within `tol`.
pub fn is_eigenstate(rho: &DensityMatrix, a: &PureState, tol: f64) -> Result<bool> {
    let p_a = born_probability(rho, a)?.get();
    let residual = rho.apply(a)? - a.vector() * num_complex::Complex64::new(p_a, 0.0);
    Ok(residual.norm() <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    pub p_a: f64,
    /// `P(m|X_a)` in basis order.
    pub given_block: Vec<f64>,
}

pub fn conditional_distribution(
    rho: &DensityMatrix,
    a: &PureState,
    basis: &OutcomeBasis,
) -> Result<ConditionalDistribution> {
    let blocked = project_out(rho, a)?;
    let given_block = basis
        .states()
        .iter()
        .map(|m| Ok(born_probability(&blocked.survivor, m)?.get()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalDistribution {
        p_a: blocked.absorbed.get(),
        given_block,
    })
}

fn unblocked(rho: &DensityMatrix, basis: &OutcomeBasis) -> Result<Vec<f64>> {
    basis
        .states()
        .iter()
        .map(|m| Ok(born_probability(rho, m)?.get()))
        .collect()
}

/// Total variation distance between `{0, P(m)}` and `{P(a), P(m|X_a)}`.
pub fn statistical_distance(
    rho: &DensityMatrix,
    a: &PureState,
    basis: &OutcomeBasis,
) -> Result<f64> {
    let cond = conditional_distribution(rho, a, basis)?;
    let p = unblocked(rho, basis)?;
    let spread: f64 = p
        .iter()
        .zip(&cond.given_block)
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(0.5 * cond.p_a + 0.5 * spread)
}

/// Sum of the probability increases over outcomes made more likely by the
/// absorber.
pub fn counterfactual_gain(
    rho: &DensityMatrix,
    a: &PureState,
    basis: &OutcomeBasis,
) -> Result<f64> {
    Ok(full_report(rho, a, basis)?.gain)
}

/// Per-outcome entry of a [`GainSummary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeReport {
    pub label: String,
    pub p_m: f64,
    pub p_m_given_block: f64,
    pub kd: f64,
    pub ev: f64,
    /// Full back-action `χ_B`.
    pub chi_b: f64,
    /// `χ_B / 2`.
    pub chi_b_share: f64,
    /// `P(m) − ϱ`: the part of `P(m|X_a)` left after removing the photons
    /// that went through `a`.
    pub removal: f64,
    pub gain_contribution: f64,
    pub contributes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSummary {
    pub p_a: f64,
    pub delta_a: f64,
    pub gain: f64,
    pub p_error: f64,
    pub outcomes: Vec<OutcomeReport>,
    /// Non-basis vectors (internal ports and the like) evaluated with the
    /// same formulas. They do not enter the aggregates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<OutcomeReport>,
}

impl GainSummary {
    pub fn outcome(&self, label: &str) -> Option<&OutcomeReport> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    pub fn probe(&self, label: &str) -> Option<&OutcomeReport> {
        self.probes.iter().find(|o| o.label == label)
    }
}

fn outcome_report(
    rho: &DensityMatrix,
    survivor: &DensityMatrix,
    a: &PureState,
    label: &str,
    m: &PureState,
) -> Result<OutcomeReport> {
    let p_m = born_probability(rho, m)?.get();
    let p_m_given_block = born_probability(survivor, m)?.get();
    let kd = kd_term(rho, a, m)?;
    let ev = ev_term(rho, a, m)?;
    let share = ev - kd;
    let contributes = ev - 2.0 * kd > tolerances::TIE_BAND;
    Ok(OutcomeReport {
        label: label.to_owned(),
        p_m,
        p_m_given_block,
        kd,
        ev,
        chi_b: 2.0 * share,
        chi_b_share: share,
        removal: p_m - kd,
        gain_contribution: if contributes {
            (p_m_given_block - p_m).max(0.0)
        } else {
            0.0
        },
        contributes,
    })
}

pub fn full_report(
    rho: &DensityMatrix,
    a: &PureState,
    basis: &OutcomeBasis,
) -> Result<GainSummary> {
    full_report_with_probes(rho, a, basis, &[])
}

/// Builds the report. `delta_a` comes from the total-variation sum,
/// `gain` from the positive-part sum and `p_error` from the min-sum, so the
/// identities between them are genuine cross-checks.
pub fn full_report_with_probes(
    rho: &DensityMatrix,
    a: &PureState,
    basis: &OutcomeBasis,
    probes: &[(String, PureState)],
) -> Result<GainSummary> {
    let blocked = project_out(rho, a)?;
    let p_a = blocked.absorbed.get();
    let outcomes = basis
        .iter()
        .map(|(label, m)| outcome_report(rho, &blocked.survivor, a, label, m))
        .collect::<Result<Vec<_>>>()?;
    let probes = probes
        .iter()
        .map(|(label, m)| outcome_report(rho, &blocked.survivor, a, label, m))
        .collect::<Result<Vec<_>>>()?;

    let spread: f64 = outcomes
        .iter()
        .map(|o| (o.p_m - o.p_m_given_block).abs())
        .sum();
    let delta_a = (0.5 * p_a + 0.5 * spread).clamp(0.0, 1.0);
    let gain = outcomes.iter().map(|o| o.gain_contribution).sum();
    // absorption never happens without the absorber, so its min term is zero
    let overlap: f64 = outcomes.iter().map(|o| o.p_m.min(o.p_m_given_block)).sum();
    let p_error = 0.5 * overlap;

    Ok(GainSummary {
        p_a,
        delta_a,
        gain,
        p_error,
        outcomes,
        probes,
    })
}

/// A failed identity found by [`check_identities`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityViolation {
    pub identity: &'static str,
    pub label: Option<String>,
    pub deviation: f64,
}

/// Re-checks every identity a [`GainSummary`] is supposed to satisfy.
/// Works on deserialized reports as well as freshly computed ones.
pub fn check_identities(s: &GainSummary, tol: f64) -> Vec<IdentityViolation> {
    let mut out = Vec::new();
    let mut check = |identity: &'static str, label: Option<&str>, deviation: f64| {
        if deviation.is_nan() || deviation.abs() > tol {
            out.push(IdentityViolation {
                identity,
                label: label.map(str::to_owned),
                deviation,
            });
        }
    };

    for o in s.outcomes.iter().chain(&s.probes) {
        let l = Some(o.label.as_str());
        check(
            "blocked = p_m - 2 kd + ev",
            l,
            o.p_m_given_block - (o.p_m - 2.0 * o.kd + o.ev),
        );
        check(
            "blocked + ev = p_m + chi_b",
            l,
            o.p_m_given_block + o.ev - (o.p_m + o.chi_b),
        );
        check("chi_b = 2 (ev - kd)", l, o.chi_b - 2.0 * (o.ev - o.kd));
        check("chi_b_share = chi_b / 2", l, o.chi_b_share - 0.5 * o.chi_b);
        check("removal = p_m - kd", l, o.removal - (o.p_m - o.kd));
        check(
            "blocked = removal + chi_b_share",
            l,
            o.p_m_given_block - (o.removal + o.chi_b_share),
        );
        check("ev >= 0", l, o.ev.min(0.0));
        for p in [o.p_m, o.p_m_given_block] {
            check("probability in [0, 1]", l, p.min(0.0) + (p - 1.0).max(0.0));
        }
        let expected = if o.contributes {
            (o.p_m_given_block - o.p_m).max(0.0)
        } else {
            0.0
        };
        check("gain contribution", l, o.gain_contribution - expected);
    }

    let sum = |f: fn(&OutcomeReport) -> f64| s.outcomes.iter().map(f).sum::<f64>();
    check("sum p_m = 1", None, sum(|o| o.p_m) - 1.0);
    check(
        "sum blocked = 1 - p_a",
        None,
        sum(|o| o.p_m_given_block) - (1.0 - s.p_a),
    );
    check("sum kd = p_a", None, sum(|o| o.kd) - s.p_a);
    check("sum chi_b = 0", None, sum(|o| o.chi_b));
    check(
        "gain = sum of contributions",
        None,
        s.gain - sum(|o| o.gain_contribution),
    );
    let spread = sum(|o| (o.p_m - o.p_m_given_block).abs());
    check(
        "delta_a = p_a/2 + spread/2",
        None,
        s.delta_a - (0.5 * s.p_a + 0.5 * spread),
    );
    check("gain = delta_a - p_a", None, s.gain - (s.delta_a - s.p_a));
    check(
        "p_error = 1/2 - delta_a/2",
        None,
        s.p_error - (0.5 - 0.5 * s.delta_a),
    );
    check("gain >= 0", None, s.gain.min(0.0));
    out
}
