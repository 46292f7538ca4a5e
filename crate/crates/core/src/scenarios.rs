//! Named configurations with golden values.
//!
//! * `ev`: Elitzur–Vaidman style, one dark output `m₁` with `P(m₁) = 0`.
//! * `kd9`: nine equiprobable outputs, `m₁` carrying a negative
//!   Kirkwood–Dirac term.
//! * `three-path`: the five-beamsplitter three-path interferometer with the
//!   internal path `F` blocked.
//! * `mixture`: maximally mixed input, where nothing counterfactual happens.
//!
//! In `ev` and `kd9`, `|a⟩` is the first path and `|b⟩` the equal
//! superposition of the others. The auxiliary outputs are a Fourier
//! rotation of the complement of `m₁`, which spreads the residual
//! probability evenly over them.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::counterfactual::{full_report_with_probes, GainSummary, OutcomeReport};
use crate::error::{Error, Result};
use crate::hilbert::{flat_completion, normalize, DensityMatrix, OutcomeBasis, PureState};
use crate::network;

pub const SCENARIO_NAMES: [&str; 4] = ["ev", "kd9", "three-path", "mixture"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl Fraction {
    pub const fn new(num: i64, den: i64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Golden value: an exact fraction, or a closed-form real for scenarios
/// built from an arbitrary absorption probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expected {
    Exact(Fraction),
    Closed(f64),
}

impl Expected {
    pub fn value(self) -> f64 {
        match self {
            Expected::Exact(f) => f.value(),
            Expected::Closed(x) => x,
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Exact(q) => q.fmt(f),
            Expected::Closed(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    PM,
    Blocked,
    Kd,
    Ev,
    ChiB,
    ChiBShare,
    Removal,
    GainContribution,
    /// Bayesian probability that the absorber is present given this
    /// outcome, with an even prior.
    Posterior,
}

impl Field {
    fn read(self, o: &OutcomeReport) -> f64 {
        match self {
            Field::PM => o.p_m,
            Field::Blocked => o.p_m_given_block,
            Field::Kd => o.kd,
            Field::Ev => o.ev,
            Field::ChiB => o.chi_b,
            Field::ChiBShare => o.chi_b_share,
            Field::Removal => o.removal,
            Field::GainContribution => o.gain_contribution,
            Field::Posterior => posterior_presence(o),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Field::PM => "p_m",
            Field::Blocked => "p_m_given_block",
            Field::Kd => "kd",
            Field::Ev => "ev",
            Field::ChiB => "chi_b",
            Field::ChiBShare => "chi_b_share",
            Field::Removal => "removal",
            Field::GainContribution => "gain_contribution",
            Field::Posterior => "posterior",
        }
    }
}

/// `P(m|X_a) / (P(m|X_a) + P(m))`.
pub fn posterior_presence(o: &OutcomeReport) -> f64 {
    let total = o.p_m_given_block + o.p_m;
    if total > 0.0 {
        o.p_m_given_block / total
    } else {
        0.5
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    PA,
    DeltaA,
    Gain,
    PError,
    Outcome(String, Field),
    Probe(String, Field),
}

impl Quantity {
    pub fn read(&self, s: &GainSummary) -> Option<f64> {
        match self {
            Quantity::PA => Some(s.p_a),
            Quantity::DeltaA => Some(s.delta_a),
            Quantity::Gain => Some(s.gain),
            Quantity::PError => Some(s.p_error),
            Quantity::Outcome(l, f) => s.outcome(l).map(|o| f.read(o)),
            Quantity::Probe(l, f) => s.probe(l).map(|o| f.read(o)),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::PA => f.write_str("p_a"),
            Quantity::DeltaA => f.write_str("delta_a"),
            Quantity::Gain => f.write_str("gain"),
            Quantity::PError => f.write_str("p_error"),
            Quantity::Outcome(l, field) => write!(f, "{}[{l}]", field.name()),
            Quantity::Probe(l, field) => write!(f, "probe {}[{l}]", field.name()),
        }
    }
}

/// One row of a golden comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: Quantity,
    pub expected: Expected,
    pub computed: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub rho: DensityMatrix,
    pub a: PureState,
    pub a_label: String,
    pub basis: OutcomeBasis,
    pub probes: Vec<(String, PureState)>,
    pub expected: Vec<(Quantity, Expected)>,
}

impl Scenario {
    pub fn report(&self) -> Result<GainSummary> {
        full_report_with_probes(&self.rho, &self.a, &self.basis, &self.probes)
    }

    pub fn compare(&self, summary: &GainSummary, tol: f64) -> Vec<Comparison> {
        self.expected
            .iter()
            .map(|(q, e)| {
                let computed = q.read(summary);
                let ok = computed.is_some_and(|c| (c - e.value()).abs() <= tol);
                Comparison {
                    quantity: q.clone(),
                    expected: *e,
                    computed,
                    ok,
                }
            })
            .collect()
    }
}

fn frac(num: i64, den: i64) -> Expected {
    Expected::Exact(Fraction::new(num, den))
}

fn outcome(label: &str, field: Field) -> Quantity {
    Quantity::Outcome(label.into(), field)
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "absorption probability must lie in (0, 1), got {p}"
        )))
    }
}

/// `|a⟩` = first path, `|b⟩` = equal superposition of the remaining paths.
fn split_paths(n: usize) -> (PureState, PureState) {
    let a = PureState::basis(n, 0).expect("n >= 1");
    let mut b = vec![1.0; n];
    b[0] = 0.0;
    (a, PureState::from_real(&b).expect("n >= 2"))
}

fn combine(x: f64, a: &PureState, y: f64, b: &PureState) -> PureState {
    let v: Vec<Complex64> = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(p, q)| p * x + q * y)
        .collect();
    normalize(&v).expect("a and b are orthonormal")
}

fn output_labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("m{k}")).collect()
}

/// Dark-output family: `|ψ⟩ = √p|a⟩ + √(1−p)|b⟩` and
/// `m₁ = √(1−p)|a⟩ − √p|b⟩`, so `P(m₁) = 0`.
pub fn ev_scenario(p_a: f64, n_outputs: usize) -> Result<Scenario> {
    check_probability(p_a)?;
    if n_outputs < 2 {
        return Err(Error::domain("the ev scenario needs at least two outputs"));
    }
    let n = n_outputs;
    let (a, b) = split_paths(n);
    let q = 1.0 - p_a;
    let psi = combine(p_a.sqrt(), &a, q.sqrt(), &b);
    let m1 = combine(q.sqrt(), &a, -p_a.sqrt(), &b);
    let basis = OutcomeBasis::new(output_labels(n), flat_completion(&m1, &psi)?)?;

    let aux = (n - 1) as f64;
    let mut expected = vec![
        (Quantity::PA, Expected::Closed(p_a)),
        (Quantity::Gain, Expected::Closed(p_a * q)),
        (Quantity::DeltaA, Expected::Closed(p_a + p_a * q)),
        (outcome("m1", Field::PM), Expected::Closed(0.0)),
        (outcome("m1", Field::Kd), Expected::Closed(0.0)),
        (outcome("m1", Field::Ev), Expected::Closed(p_a * q)),
        (outcome("m1", Field::Blocked), Expected::Closed(p_a * q)),
    ];
    for label in &output_labels(n)[1..] {
        expected.push((outcome(label, Field::PM), Expected::Closed(1.0 / aux)));
        expected.push((
            outcome(label, Field::Blocked),
            Expected::Closed(q * q / aux),
        ));
    }
    Ok(Scenario {
        name: "ev".into(),
        rho: psi.density(),
        a,
        a_label: "a".into(),
        basis,
        probes: Vec::new(),
        expected,
    })
}

/// Nine equiprobable outputs with `m₁ = (1/√3)|a⟩ − √(2/3)|b⟩`.
pub fn kd_scenario() -> Scenario {
    let n = 9;
    let (a, b) = split_paths(n);
    let third: f64 = 1.0 / 3.0;
    let psi = combine(third.sqrt(), &a, (2.0 * third).sqrt(), &b);
    let m1 = combine(third.sqrt(), &a, -(2.0 * third).sqrt(), &b);
    let rest = combine((2.0 * third).sqrt(), &a, third.sqrt(), &b);
    let basis = OutcomeBasis::new(
        output_labels(n),
        flat_completion(&m1, &rest).expect("rest is orthogonal to m1"),
    )
    .expect("flat completion is a basis");

    let mut expected = vec![
        (Quantity::PA, frac(1, 3)),
        (Quantity::Gain, frac(1, 3)),
        (Quantity::DeltaA, frac(2, 3)),
        (Quantity::PError, frac(1, 6)),
        (outcome("m1", Field::Kd), frac(-1, 9)),
        (outcome("m1", Field::Ev), frac(1, 9)),
        (outcome("m1", Field::Blocked), frac(4, 9)),
        (outcome("m1", Field::Posterior), frac(4, 5)),
    ];
    for label in output_labels(n) {
        expected.push((outcome(&label, Field::PM), frac(1, 9)));
        if label != "m1" {
            expected.push((outcome(&label, Field::Blocked), frac(1, 36)));
        }
    }
    Scenario {
        name: "kd9".into(),
        rho: psi.density(),
        a,
        a_label: "a".into(),
        basis,
        probes: Vec::new(),
        expected,
    }
}

/// Three-path interferometer with `F` blocked. The other tagged internal
/// paths (`P2`, `S2`, `D2`) are carried as probes.
pub fn three_path_scenario() -> Scenario {
    let spec = network::three_path_spec();
    let psi = spec
        .propagate(&network::three_path_input())
        .expect("frozen network is unitary");
    let a = spec.backpropagate("F").expect("F is tagged");
    let probes = spec
        .tagged_paths()
        .iter()
        .filter(|t| t.name != "F")
        .map(|t| {
            (
                t.name.clone(),
                spec.backpropagate_path(t).expect("tag is valid"),
            )
        })
        .collect();

    let mut expected = vec![
        (Quantity::PA, frac(1, 9)),
        (Quantity::Gain, frac(7, 27)),
        (Quantity::DeltaA, frac(10, 27)),
        (Quantity::PError, frac(17, 54)),
    ];
    let rows = [
        ("1", 1, -4, -2, 4, 2, 0),
        ("2", 1, -4, -2, 4, 2, 0),
        ("3", -1, 8, 4, 16, 4, 7),
    ];
    for (label, kd, chi, share, blocked, removal_ninths, gain) in rows {
        expected.push((outcome(label, Field::PM), frac(1, 3)));
        expected.push((outcome(label, Field::Kd), frac(kd, 9)));
        expected.push((outcome(label, Field::Ev), frac(1, 27)));
        expected.push((outcome(label, Field::ChiB), frac(chi, 27)));
        expected.push((outcome(label, Field::ChiBShare), frac(share, 27)));
        expected.push((outcome(label, Field::Blocked), frac(blocked, 27)));
        expected.push((outcome(label, Field::Removal), frac(removal_ninths, 9)));
        expected.push((outcome(label, Field::GainContribution), frac(gain, 27)));
    }
    expected.extend([
        (Quantity::Probe("D2".into(), Field::PM), frac(0, 1)),
        (Quantity::Probe("D2".into(), Field::Kd), frac(0, 1)),
        (Quantity::Probe("D2".into(), Field::Ev), frac(2, 27)),
        (Quantity::Probe("D2".into(), Field::Blocked), frac(2, 27)),
    ]);
    Scenario {
        name: "three-path".into(),
        rho: psi.density(),
        a,
        a_label: "F".into(),
        basis: spec.output_basis(),
        probes,
        expected,
    }
}

/// Photon in a maximal mixture of `n` paths, first path blocked, outputs
/// in the balanced Fourier basis.
pub fn classical_mixture_scenario(n_paths: usize) -> Result<Scenario> {
    if n_paths < 2 {
        return Err(Error::domain(
            "the mixture scenario needs at least two paths",
        ));
    }
    let n = n_paths;
    let states = (0..n)
        .map(|j| {
            let v: Vec<Complex64> = (0..n)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / n as f64))
                .collect();
            normalize(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
    let basis = OutcomeBasis::new(labels.clone(), states)?;
    let nn = n as i64;
    let mut expected = vec![
        (Quantity::PA, frac(1, nn)),
        (Quantity::Gain, frac(0, 1)),
        (Quantity::DeltaA, frac(1, nn)),
        (Quantity::PError, frac(nn - 1, 2 * nn)),
    ];
    for label in &labels {
        expected.push((outcome(label, Field::PM), frac(1, nn)));
        expected.push((outcome(label, Field::Blocked), frac(nn - 1, nn * nn)));
        expected.push((outcome(label, Field::ChiB), frac(0, 1)));
    }
    Ok(Scenario {
        name: "mixture".into(),
        rho: DensityMatrix::maximally_mixed(n),
        a: PureState::basis(n, 0)?,
        a_label: "1".into(),
        basis,
        probes: Vec::new(),
        expected,
    })
}

/// Resolves a scenario by name. `p_a` and `paths` only apply to `ev`
/// (defaults 1/3 and 9) and `mixture` (default 2 paths).
pub fn by_name(name: &str, p_a: Option<f64>, paths: Option<usize>) -> Result<Scenario> {
    match name {
        "ev" => ev_scenario(p_a.unwrap_or(1.0 / 3.0), paths.unwrap_or(9)),
        "kd9" => Ok(kd_scenario()),
        "three-path" => Ok(three_path_scenario()),
        "mixture" => classical_mixture_scenario(paths.unwrap_or(2)),
        other => Err(Error::domain(format!(
            "unknown scenario `{other}` (expected one of {})",
            SCENARIO_NAMES.join(", ")
        ))),
    }
}
