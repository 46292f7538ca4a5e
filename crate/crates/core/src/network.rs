//! Interferometers as ordered two-mode beamsplitter networks.
//!
//! Element `k` acts on the amplitudes after elements `0..k` have acted, so
//! the total transfer matrix is `U = E_n ⋯ E_2 E_1`. An internal path is
//! addressed by `(stage, mode)`: `stage` elements have already acted on it.
//! Its vector in the output basis is obtained by pushing a unit amplitude
//! on `mode` through the remaining elements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{normalize, OutcomeBasis, PureState};
use crate::tolerances;

/// Two-mode mixing element. The 2×2 block on `(mode_i, mode_j)` is
/// `[[cos θ, e^{iφ} sin θ], [−e^{−iφ} sin θ, cos θ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsplitterElement {
    #[serde(rename = "i")]
    pub mode_i: usize,
    #[serde(rename = "j")]
    pub mode_j: usize,
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl BeamsplitterElement {
    pub fn new(mode_i: usize, mode_j: usize, theta: f64, phi: f64) -> Self {
        Self {
            mode_i,
            mode_j,
            theta,
            phi,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        for index in [self.mode_i, self.mode_j] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        if self.mode_i == self.mode_j {
            return Err(Error::DegenerateElement(self.mode_i));
        }
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return Err(Error::domain("beamsplitter angles must be finite"));
        }
        Ok(())
    }
}

pub fn element_unitary(e: &BeamsplitterElement, dim: usize) -> Result<DMatrix<Complex64>> {
    e.validate(dim)?;
    let (s, c) = e.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, e.phi);
    let mut u = DMatrix::identity(dim, dim);
    u[(e.mode_i, e.mode_i)] = Complex64::new(c, 0.0);
    u[(e.mode_i, e.mode_j)] = phase * s;
    u[(e.mode_j, e.mode_i)] = -phase.conj() * s;
    u[(e.mode_j, e.mode_j)] = Complex64::new(c, 0.0);
    Ok(u)
}

/// Named internal path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedPath {
    pub name: String,
    pub stage: usize,
    pub mode: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    dim: usize,
    elements: Vec<BeamsplitterElement>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    tagged_paths: Vec<TaggedPath>,
}

impl InterferometerSpec {
    pub fn new(
        dim: usize,
        elements: Vec<BeamsplitterElement>,
        tagged_paths: Vec<TaggedPath>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("interferometer needs at least one path"));
        }
        for e in &elements {
            e.validate(dim)?;
        }
        let spec = Self {
            dim,
            input_labels: (1..=dim).map(|k| format!("in{k}")).collect(),
            output_labels: (1..=dim).map(|k| k.to_string()).collect(),
            elements,
            tagged_paths: Vec::new(),
        };
        spec.with_tagged_paths(tagged_paths)
    }

    pub fn with_tagged_paths(mut self, tagged: Vec<TaggedPath>) -> Result<Self> {
        for t in &tagged {
            self.check_tag(t)?;
        }
        self.tagged_paths = tagged;
        Ok(self)
    }

    pub fn with_labels(mut self, input: Vec<String>, output: Vec<String>) -> Result<Self> {
        for labels in [&input, &output] {
            if labels.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: labels.len(),
                });
            }
        }
        self.input_labels = input;
        self.output_labels = output;
        Ok(self)
    }

    fn check_tag(&self, t: &TaggedPath) -> Result<()> {
        if t.stage > self.elements.len() {
            return Err(Error::StageOutOfRange {
                name: t.name.clone(),
                stage: t.stage,
                elements: self.elements.len(),
            });
        }
        if t.mode >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: t.mode,
                dim: self.dim,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[BeamsplitterElement] {
        &self.elements
    }

    pub fn tagged_paths(&self) -> &[TaggedPath] {
        &self.tagged_paths
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn output_basis(&self) -> OutcomeBasis {
        let canonical = OutcomeBasis::computational(self.dim);
        OutcomeBasis::new(self.output_labels.clone(), canonical.states().to_vec())
            .expect("computational basis is complete")
    }

    /// Looks a path up among the tagged paths, then among the input labels
    /// (which are stage-0 paths).
    pub fn path(&self, name: &str) -> Result<TaggedPath> {
        if let Some(t) = self.tagged_paths.iter().find(|t| t.name == name) {
            return Ok(t.clone());
        }
        self.input_labels
            .iter()
            .position(|l| l == name)
            .map(|mode| TaggedPath {
                name: name.to_owned(),
                stage: 0,
                mode,
            })
            .ok_or_else(|| Error::UnknownPath(name.to_owned()))
    }

    /// Output-basis vector of a named path.
    pub fn backpropagate(&self, name: &str) -> Result<PureState> {
        self.backpropagate_path(&self.path(name)?)
    }

    pub fn backpropagate_path(&self, path: &TaggedPath) -> Result<PureState> {
        self.check_tag(path)?;
        let mut v = DVector::from_element(self.dim, Complex64::new(0.0, 0.0));
        v[path.mode] = Complex64::new(1.0, 0.0);
        for e in &self.elements[path.stage..] {
            v = element_unitary(e, self.dim)? * v;
        }
        normalize(v.as_slice())
    }

    /// Transfer matrix from input paths to outputs.
    pub fn compose(&self) -> Result<DMatrix<Complex64>> {
        let mut u = DMatrix::identity(self.dim, self.dim);
        for e in &self.elements {
            u = element_unitary(e, self.dim)? * u;
        }
        let deviation = unitarity_defect(&u);
        if deviation.is_nan() || deviation > tolerances::NETWORK_UNITARITY {
            return Err(Error::NonUnitaryComposition { deviation });
        }
        Ok(u)
    }

    /// Propagates an input-path state to the output basis.
    pub fn propagate(&self, input: &PureState) -> Result<PureState> {
        if input.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: input.dim(),
            });
        }
        let out = self.compose()? * input.vector();
        normalize(out.as_slice())
    }
}

pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::identity(n, n)).camax()
}

/// Angles of the five-element three-path network: input `(1,1,1)/√3`
/// leaves as an equal superposition of the outputs, and internal path `F`
/// reads `(|1⟩+|2⟩−|3⟩)/√3` on the outputs. Found by solving for the
/// first three rotations given the fixed final `F`/`P2` and `D2`/`S2`
/// mixers, so that the whole network is the cyclic relabelling
/// `in1→2, in2→3, in3→1`.
const THREE_PATH_ANGLES: [(usize, usize, f64); 5] = [
    (0, 1, std::f64::consts::FRAC_PI_4),
    (1, 2, 2.5261129449194057),
    (0, 2, -2.6179938779914944),
    (0, 1, 0.9553166181245093),
    (0, 2, std::f64::consts::FRAC_PI_4),
];

/// Stage after which `P2`, `F` and `S2` are the three internal modes.
pub const THREE_PATH_INNER_STAGE: usize = 3;

pub fn three_path_spec() -> InterferometerSpec {
    let elements = THREE_PATH_ANGLES
        .iter()
        .map(|&(i, j, theta)| BeamsplitterElement::new(i, j, theta, 0.0))
        .collect();
    let tag = |name: &str, stage, mode| TaggedPath {
        name: name.into(),
        stage,
        mode,
    };
    InterferometerSpec::new(
        3,
        elements,
        vec![
            tag("P2", THREE_PATH_INNER_STAGE, 0),
            tag("F", THREE_PATH_INNER_STAGE, 1),
            tag("S2", THREE_PATH_INNER_STAGE, 2),
            tag("D2", THREE_PATH_INNER_STAGE + 1, 0),
        ],
    )
    .expect("three-path network is well formed")
}

/// Input state of the three-path network, `(|1⟩+|2⟩+|3⟩)/√3` on the input paths.
pub fn three_path_input() -> PureState {
    PureState::from_real(&[1.0, 1.0, 1.0]).expect("non-zero")
}

/// On-disk interferometer description.
///
/// ```json
/// { "dim": 3,
///   "elements": [ { "i": 0, "j": 1, "theta": 0.785, "phi": 0.0 } ],
///   "tagged_paths": [ { "name": "F", "stage": 1, "mode": 1 } ],
///   "input": [ [0.577, 0.0], [0.577, 0.0], [0.577, 0.0] ] }
/// ```
///
/// `input_labels` and `output_labels` are optional. Unknown fields are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerDescription {
    pub dim: usize,
    pub elements: Vec<BeamsplitterElement>,
    #[serde(default)]
    pub tagged_paths: Vec<TaggedPath>,
    pub input: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_labels: Option<Vec<String>>,
}

/// An interferometer together with the state fed into its input paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    pub spec: InterferometerSpec,
    pub input: PureState,
}

impl Interferometer {
    pub fn output_state(&self) -> Result<PureState> {
        self.spec.propagate(&self.input)
    }
}

impl InterferometerDescription {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn parse_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn build(&self) -> Result<Interferometer> {
        if self.dim == 0 || self.dim > 64 {
            return Err(Error::domain(format!(
                "dim must be between 1 and 64, got {}",
                self.dim
            )));
        }
        for (k, e) in self.elements.iter().enumerate() {
            e.validate(self.dim)
                .map_err(|err| Error::domain(format!("elements[{k}]: {err}")))?;
        }
        let mut spec =
            InterferometerSpec::new(self.dim, self.elements.clone(), self.tagged_paths.clone())?;
        if self.input_labels.is_some() || self.output_labels.is_some() {
            let input = self
                .input_labels
                .clone()
                .unwrap_or_else(|| spec.input_labels.clone());
            let output = self
                .output_labels
                .clone()
                .unwrap_or_else(|| spec.output_labels.clone());
            spec = spec.with_labels(input, output)?;
        }
        let mut names: Vec<&str> = spec.tagged_paths.iter().map(|t| t.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate tagged path `{}`", w[0])));
        }
        if self.input.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.input.len(),
            });
        }
        let amps: Vec<Complex64> = self
            .input
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let input = normalize(&amps)?;
        Ok(Interferometer { spec, input })
    }

    pub fn from_spec(spec: &InterferometerSpec, input: &PureState) -> Self {
        Self {
            dim: spec.dim,
            elements: spec.elements.clone(),
            tagged_paths: spec.tagged_paths.clone(),
            input: input.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            input_labels: Some(spec.input_labels.clone()),
            output_labels: Some(spec.output_labels.clone()),
        }
    }
}
