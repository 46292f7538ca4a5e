use std::fmt;
use std::fs;
use std::path::Path;

use cfgain::bounds::{optimize_gain_with, sweep, FalsePositives};
use cfgain::counterfactual::{check_identities, full_report_with_probes, GainSummary};
use cfgain::discriminate::{simulate_distributions, simulate_game, OutcomeDistribution};
use cfgain::hilbert::{DensityMatrix, OutcomeBasis, PureState};
use cfgain::network::InterferometerDescription;
use cfgain::scenarios::{self, Scenario};
use cfgain::tolerances::{GOLDEN, SERIALIZED};
use cfgain::Error;
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{
    DiscriminateArgs, Format, OptimizeArgs, ReportArgs, ScenarioArgs, Source, SweepArgs,
};
use crate::output::{cell, csv, json, r12, round_summary, Table};

/// Why a command did not succeed. `Usage` covers anything wrong with the
/// user's input (exit 2), `Consistency` a failed internal check (exit 3).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Consistency(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Consistency(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Consistency(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonUnitaryComposition { .. } => Failure::Consistency(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// What a command produced: the text to emit and, possibly, a failure to
/// report after emitting it.
pub struct Outcome {
    pub text: String,
    pub failure: Option<Failure>,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

struct Problem {
    name: String,
    rho: DensityMatrix,
    a: PureState,
    basis: OutcomeBasis,
    probes: Vec<(String, PureState)>,
}

impl Problem {
    fn report(&self) -> Result<GainSummary, Failure> {
        Ok(full_report_with_probes(
            &self.rho,
            &self.a,
            &self.basis,
            &self.probes,
        )?)
    }
}

impl From<Scenario> for Problem {
    fn from(s: Scenario) -> Self {
        Self {
            name: s.name,
            rho: s.rho,
            a: s.a,
            basis: s.basis,
            probes: s.probes,
        }
    }
}

fn load_description(path: &Path) -> Result<InterferometerDescription, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    InterferometerDescription::parse(&text).map_err(|e| match e {
        Error::Parse {
            line,
            column,
            message,
        } => Failure::Usage(format!("{}:{line}:{column}: {message}", path.display())),
        other => Failure::Usage(format!("{}: {other}", path.display())),
    })
}

fn resolve(src: &Source) -> Result<Problem, Failure> {
    match (&src.scenario, &src.input) {
        (Some(name), None) => Ok(scenarios::by_name(name, src.pa, src.paths)?.into()),
        (None, Some(path)) => {
            if src.pa.is_some() || src.paths.is_some() {
                return Err(Failure::Usage(
                    "--pa and --paths only apply to named scenarios".into(),
                ));
            }
            let block = src
                .block
                .as_deref()
                .expect("clap requires --block with --input");
            let desc = load_description(path)?;
            let net = desc
                .build()
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let psi = net.output_state()?;
            let a = net.spec.backpropagate(block)?;
            let probes = net
                .spec
                .tagged_paths()
                .iter()
                .filter(|t| t.name != block)
                .map(|t| Ok((t.name.clone(), net.spec.backpropagate_path(t)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Problem {
                name: path.display().to_string(),
                rho: psi.density(),
                a,
                basis: net.spec.output_basis(),
                probes,
            })
        }
        _ => Err(Failure::Usage(
            "give either --scenario or --input with --block".into(),
        )),
    }
}

#[derive(Serialize)]
struct ReportRow<'a> {
    label: &'a str,
    kind: &'static str,
    p_m: f64,
    p_m_given_block: f64,
    kd: f64,
    ev: f64,
    chi_b: f64,
    chi_b_share: f64,
    removal: f64,
    gain_contribution: f64,
}

fn report_table(s: &GainSummary) -> String {
    let mut t = Table::new([
        "outcome", "P(m)", "P(m|X)", "kd", "ev", "chi_B", "chi_B/2", "P(m)-kd", "gain",
    ]);
    let rows = s
        .outcomes
        .iter()
        .map(|o| (o, ""))
        .chain(s.probes.iter().map(|o| (o, " (probe)")));
    for (o, tag) in rows {
        t.row(vec![
            format!("{}{tag}", o.label),
            cell(o.p_m),
            cell(o.p_m_given_block),
            cell(o.kd),
            cell(o.ev),
            cell(o.chi_b),
            cell(o.chi_b_share),
            cell(o.removal),
            cell(o.gain_contribution),
        ]);
    }
    let mut out = t.render();
    out += &format!(
        "\nP(a) = {}   delta_a = {}   gain = {}   P_error = {}\n",
        cell(s.p_a),
        cell(s.delta_a),
        cell(s.gain),
        cell(s.p_error)
    );
    out
}

/// Serializes the rounded report, reads it back and re-checks every
/// identity on what was actually emitted.
fn self_check(rounded: &GainSummary) -> Result<(), Failure> {
    let emitted = json(rounded);
    let parsed: GainSummary = serde_json::from_str(&emitted)
        .map_err(|e| Failure::Consistency(format!("emitted report does not parse: {e}")))?;
    let bad = check_identities(&parsed, SERIALIZED);
    match bad.first() {
        None => Ok(()),
        Some(v) => Err(Failure::Consistency(format!(
            "self-check failed: {} violation(s), first `{}`{} off by {:e}",
            bad.len(),
            v.identity,
            v.label
                .as_ref()
                .map(|l| format!(" at {l}"))
                .unwrap_or_default(),
            v.deviation
        ))),
    }
}

pub fn report(args: &ReportArgs, format: Format) -> Result<Outcome, Failure> {
    let problem = resolve(&args.source)?;
    let summary = round_summary(&problem.report()?);
    if args.self_check {
        self_check(&summary)?;
    }
    let text = match format {
        Format::Json => json(&summary),
        Format::Table => format!("{}\n\n{}", problem.name, report_table(&summary)),
        Format::Csv => {
            let kinds = summary
                .outcomes
                .iter()
                .map(|o| (o, "outcome"))
                .chain(summary.probes.iter().map(|o| (o, "probe")));
            let rows: Vec<ReportRow> = kinds
                .map(|(o, kind)| ReportRow {
                    label: &o.label,
                    kind,
                    p_m: o.p_m,
                    p_m_given_block: o.p_m_given_block,
                    kd: o.kd,
                    ev: o.ev,
                    chi_b: o.chi_b,
                    chi_b_share: o.chi_b_share,
                    removal: o.removal,
                    gain_contribution: o.gain_contribution,
                })
                .collect();
            csv(&rows)
        }
    };
    Ok(text.into())
}

#[derive(Serialize)]
struct ComparisonRow {
    quantity: String,
    expected: String,
    expected_value: f64,
    computed: Option<f64>,
    ok: bool,
}

#[derive(Serialize)]
struct ScenarioOut<'a> {
    scenario: &'a str,
    pass: bool,
    comparisons: &'a [ComparisonRow],
}

pub fn scenario(args: &ScenarioArgs, format: Format) -> Result<Outcome, Failure> {
    let s = scenarios::by_name(&args.scenario, args.pa, args.paths)?;
    let report = s.report()?;
    let rows: Vec<ComparisonRow> = s
        .compare(&report, GOLDEN)
        .into_iter()
        .map(|c| ComparisonRow {
            quantity: c.quantity.to_string(),
            expected: c.expected.to_string(),
            expected_value: r12(c.expected.value()),
            computed: c.computed.map(r12),
            ok: c.ok,
        })
        .collect();
    let failed = rows.iter().filter(|r| !r.ok).count();
    let text = match format {
        Format::Json => json(&ScenarioOut {
            scenario: &s.name,
            pass: failed == 0,
            comparisons: &rows,
        }),
        Format::Csv => csv(&rows),
        Format::Table => {
            let mut t = Table::new(["quantity", "expected", "computed", "ok"]);
            for r in &rows {
                t.row(vec![
                    r.quantity.clone(),
                    r.expected.clone(),
                    r.computed.map(cell).unwrap_or_else(|| "missing".into()),
                    if r.ok { "yes" } else { "NO" }.into(),
                ]);
            }
            format!("scenario {}\n\n{}", s.name, t.render())
        }
    };
    let failure = (failed > 0).then(|| {
        Failure::Consistency(format!(
            "scenario {}: {failed} value(s) off reference",
            s.name
        ))
    });
    Ok(Outcome { text, failure })
}

fn policy(cap: Option<f64>) -> Result<FalsePositives, Failure> {
    match cap {
        None => Ok(FalsePositives::Allowed),
        Some(c) if !c.is_finite() => {
            Err(Failure::Usage(format!("--fp-cap must be finite, got {c}")))
        }
        Some(c) if c <= 0.0 => Ok(FalsePositives::Forbidden),
        Some(c) => Ok(FalsePositives::Capped(c)),
    }
}

#[derive(Serialize)]
struct SweepOut {
    p_a: f64,
    max_bound: f64,
    ev_bound: f64,
    achieved: f64,
    saturated: bool,
}

pub fn sweep_cmd(args: &SweepArgs, format: Format) -> Result<Outcome, Failure> {
    let rows: Vec<SweepOut> = sweep(&args.grid, args.paths, policy(args.fp_cap)?)?
        .into_iter()
        .map(|r| SweepOut {
            p_a: r12(r.p_a),
            max_bound: r12(r.bound),
            ev_bound: r12(r.ev_bound),
            achieved: r12(r.achieved),
            saturated: r.saturated,
        })
        .collect();
    let text = match format {
        Format::Csv => csv(&rows),
        Format::Json => json(&rows),
        Format::Table => {
            let mut t = Table::new(["P(a)", "max bound", "ev bound", "achieved", "saturated"]);
            for r in &rows {
                t.row(vec![
                    cell(r.p_a),
                    cell(r.max_bound),
                    cell(r.ev_bound),
                    cell(r.achieved),
                    if r.saturated { "yes" } else { "no" }.into(),
                ]);
            }
            t.render()
        }
    };
    Ok(text.into())
}

fn amplitudes(s: &PureState) -> Vec<[f64; 2]> {
    s.amplitudes()
        .iter()
        .map(|z: &Complex64| [r12(z.re), r12(z.im)])
        .collect()
}

#[derive(Serialize)]
struct WitnessOutput {
    label: String,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct OptimizeOut {
    p_a: f64,
    bound: f64,
    achieved: f64,
    saturated: bool,
    ratio: f64,
    theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocked: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<WitnessOutput>>,
}

pub fn optimize(args: &OptimizeArgs, format: Format) -> Result<Outcome, Failure> {
    let r = optimize_gain_with(args.pa, args.paths, policy(args.fp_cap)?)?;
    let w = &r.witness;
    let mut out = OptimizeOut {
        p_a: r12(r.p_a),
        bound: r12(r.bound_value),
        achieved: r12(r.achieved_value),
        saturated: r.saturated,
        ratio: r12(r.ratio),
        theta: r12(w.theta),
        state: Some(amplitudes(&w.state)),
        blocked: Some(amplitudes(&w.a)),
        outputs: Some(
            w.basis
                .iter()
                .map(|(label, s)| WitnessOutput {
                    label: label.to_owned(),
                    amplitudes: amplitudes(s),
                })
                .collect(),
        ),
    };
    let text = match format {
        Format::Json => json(&out),
        Format::Csv => {
            out.state = None;
            out.blocked = None;
            out.outputs = None;
            csv(&[out])
        }
        Format::Table => {
            let mut t = Table::new(["quantity", "value"]);
            for (k, v) in [
                ("P(a)", cell(out.p_a)),
                ("bound", cell(out.bound)),
                ("achieved", cell(out.achieved)),
                ("ratio", cell(out.ratio)),
                ("theta", cell(out.theta)),
                ("saturated", if out.saturated { "yes" } else { "no" }.into()),
            ] {
                t.row(vec![k.into(), v]);
            }
            t.render()
        }
    };
    Ok(text.into())
}

#[derive(Serialize)]
struct GameOut {
    scenario: String,
    trials: u64,
    errors: u64,
    empirical: f64,
    analytic: f64,
    sigma: f64,
    deviation_sigmas: f64,
    seed: u64,
    generator: &'static str,
}

pub fn discriminate(args: &DiscriminateArgs, format: Format) -> Result<Outcome, Failure> {
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let estimate = match (&args.source.scenario, &args.source.input) {
        (Some(name), None) => simulate_game(
            &scenarios::by_name(name, args.source.pa, args.source.paths)?,
            args.trials,
            args.seed,
        )?,
        _ => {
            let summary = resolve(&args.source)?.report()?;
            simulate_distributions(
                &OutcomeDistribution::unblocked(&summary),
                &OutcomeDistribution::blocked(&summary),
                args.trials,
                args.seed,
            )?
        }
    };
    let name = match (&args.source.scenario, &args.source.input) {
        (Some(n), _) => n.clone(),
        (_, Some(p)) => p.display().to_string(),
        _ => unreachable!("resolve rejects a missing source"),
    };
    let row = GameOut {
        scenario: name,
        trials: estimate.trials,
        errors: estimate.errors,
        empirical: r12(estimate.empirical_error),
        analytic: r12(estimate.analytic_error),
        sigma: r12(estimate.std_error),
        deviation_sigmas: r12(estimate.deviation_sigmas()),
        seed: estimate.seed,
        generator: estimate.generator,
    };
    let text = match format {
        Format::Json => json(&row),
        Format::Csv => csv(&[row]),
        Format::Table => {
            let mut t = Table::new([
                "scenario",
                "trials",
                "empirical",
                "analytic",
                "sigma",
                "seed",
            ]);
            t.row(vec![
                row.scenario.clone(),
                row.trials.to_string(),
                cell(row.empirical),
                cell(row.analytic),
                cell(row.sigma),
                row.seed.to_string(),
            ]);
            t.render()
        }
    };
    Ok(text.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let f: Failure = Error::NonUnitaryComposition { deviation: 1e-3 }.into();
        assert_eq!(f.exit_code(), 3);
        let f: Failure = Error::UnknownPath("Q".into()).into();
        assert_eq!(f.exit_code(), 2);
    }

    #[test]
    fn self_check_catches_tampering() {
        let s = scenarios::kd_scenario().report().unwrap();
        let mut rounded = round_summary(&s);
        self_check(&rounded).unwrap();
        rounded.outcomes[0].p_m_given_block += 1e-6;
        assert_eq!(self_check(&rounded).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn fp_cap_policy() {
        assert_eq!(policy(None).unwrap(), FalsePositives::Allowed);
        assert_eq!(policy(Some(0.0)).unwrap(), FalsePositives::Forbidden);
        assert_eq!(policy(Some(0.01)).unwrap(), FalsePositives::Capped(0.01));
        assert!(policy(Some(f64::INFINITY)).is_err());
    }
}
