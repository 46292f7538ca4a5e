//! Dense complex state and operator arithmetic over a finite path space.
//!
//! Everything here is small (dimension ≤ ~32) and immutable once built.
//! Values wrap `nalgebra` vectors and matrices; the wrappers carry the
//! physical invariants (unit norm, Hermitian, trace, positivity).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

pub mod random;

pub type Amplitude = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A probability that has been clamped to `[0, 1]`.
///
/// The unclamped value is kept so callers can tell rounding noise from a
/// logic error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    value: f64,
    raw: f64,
}

impl Probability {
    pub fn from_raw(raw: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            raw,
        }
    }

    pub fn get(self) -> f64 {
        self.value
    }

    pub fn raw(self) -> f64 {
        self.raw
    }

    /// True when the raw value left `[0, 1]` by more than rounding.
    pub fn out_of_range(self) -> bool {
        self.raw < -tolerances::PROBABILITY_EXCESS
            || self.raw > 1.0 + tolerances::PROBABILITY_EXCESS
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let amps = DVector::from_vec(amps);
        if amps.is_empty() {
            return Err(Error::ZeroVector { norm: 0.0 });
        }
        check_finite(amps.iter())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > tolerances::NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        normalize(
            &amps
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// Computational basis vector `k` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut amps = DVector::from_element(dim, ZERO);
        amps[k] = ONE;
        Ok(Self { amps })
    }

    pub(crate) fn from_vector_unchecked(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            m: &self.amps * self.amps.adjoint(),
        }
    }

    /// Same ray with the first non-negligible amplitude made real positive.
    pub fn with_canonical_phase(&self) -> PureState {
        let lead = self
            .amps
            .iter()
            .find(|z| z.norm() > tolerances::SPECTRAL)
            .copied()
            .unwrap_or(ONE);
        let phase = lead.conj() / lead.norm();
        Self {
            amps: self.amps.map(|z| z * phase),
        }
    }

    /// Equality as rays: `|⟨self|other⟩| = 1` within `tol`.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a = self.with_canonical_phase();
        let b = other.with_canonical_phase();
        (a.amps - b.amps).camax() <= tol
    }
}

/// Normalizes a raw amplitude sequence, preserving its direction.
pub fn normalize(v: &[Complex64]) -> Result<PureState> {
    check_finite(v.iter())?;
    let amps = DVector::from_column_slice(v);
    let norm = amps.norm();
    if norm.is_nan() || norm < tolerances::ZERO_VECTOR {
        return Err(Error::ZeroVector { norm });
    }
    Ok(PureState {
        amps: amps.unscale(norm),
    })
}

/// Positive semidefinite Hermitian operator with trace at most one.
///
/// `DensityMatrix::new` insists on unit trace; the unnormalized survivors
/// produced by [`project_out`] share the type but have trace `1 - P(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        check_finite(m.iter())?;
        let herm = (&m - m.adjoint()).camax();
        if herm > tolerances::ALGEBRAIC {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let rho = Self { m };
        let trace = rho.trace();
        if (trace - 1.0).abs() > tolerances::ALGEBRAIC {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} != 1")));
        }
        let min = rho.min_eigenvalue();
        if min < -tolerances::NEGATIVE_EIGENVALUE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.density()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            m: DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    /// Convex combination `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`; weights must be non-negative and
    /// sum to one.
    pub fn mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidDensityMatrix("empty mixture".into()));
        };
        let dim = first.dim();
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for (w, psi) in components {
            same_dim(dim, psi.dim())?;
            if *w < 0.0 {
                return Err(Error::InvalidDensityMatrix(format!("negative weight {w}")));
            }
            m += psi.density().m * Complex64::new(*w, 0.0);
        }
        Self::new(m)
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// `⟨bra|ρ|ket⟩`.
    pub fn element(&self, bra: &PureState, ket: &PureState) -> Result<Complex64> {
        same_dim(self.dim(), bra.dim())?;
        same_dim(self.dim(), ket.dim())?;
        Ok(bra.amps.dotc(&(&self.m * &ket.amps)))
    }

    /// `ρ|ket⟩` as a raw vector.
    pub fn apply(&self, ket: &PureState) -> Result<DVector<Complex64>> {
        same_dim(self.dim(), ket.dim())?;
        Ok(&self.m * &ket.amps)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.m - self.m.adjoint()).camax()
    }

    /// Unitary conjugation `U ρ U†`.
    pub fn transformed(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        same_dim(self.dim(), u.nrows())?;
        Ok(Self {
            m: u * &self.m * u.adjoint(),
        })
    }
}

/// Orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    m: DMatrix<Complex64>,
    rank: usize,
}

impl Projector {
    /// `|a⟩⟨a|`.
    pub fn onto(a: &PureState) -> Self {
        Self {
            m: &a.amps * a.amps.adjoint(),
            rank: 1,
        }
    }

    /// `𝟙 − |a⟩⟨a|`.
    pub fn complement_of(a: &PureState) -> Self {
        let dim = a.dim();
        Self {
            m: DMatrix::identity(dim, dim) - &a.amps * a.amps.adjoint(),
            rank: dim - 1,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// `max |P² − P|`.
    pub fn idempotency_defect(&self) -> f64 {
        (&self.m * &self.m - &self.m).camax()
    }

    /// `P ρ P`, generally unnormalized.
    pub fn sandwich(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        same_dim(self.m.nrows(), rho.dim())?;
        Ok(DensityMatrix::from_matrix_unchecked(
            &self.m * &rho.m * &self.m,
        ))
    }
}

/// `⟨m|ρ|m⟩`, clamped to `[0, 1]`.
pub fn born_probability(state: &DensityMatrix, outcome: &PureState) -> Result<Probability> {
    Ok(Probability::from_raw(state.element(outcome, outcome)?.re))
}

/// Result of removing the component along a blocked path.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocked {
    /// `(𝟙−|a⟩⟨a|) ρ (𝟙−|a⟩⟨a|)`, with trace `1 − absorbed`.
    pub survivor: DensityMatrix,
    /// `⟨a|ρ|a⟩`.
    pub absorbed: Probability,
}

pub fn project_out(state: &DensityMatrix, a: &PureState) -> Result<Blocked> {
    let absorbed = born_probability(state, a)?;
    let survivor = Projector::complement_of(a).sandwich(state)?;
    Ok(Blocked { survivor, absorbed })
}

/// Labelled orthonormal outcome basis spanning the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeBasis {
    labels: Vec<String>,
    states: Vec<PureState>,
}

impl OutcomeBasis {
    pub fn new(labels: Vec<String>, states: Vec<PureState>) -> Result<Self> {
        if labels.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: labels.len(),
            });
        }
        let Some(first) = states.first() else {
            return Err(Error::IncompleteBasis { deviation: 1.0 });
        };
        let dim = first.dim();
        for s in &states {
            same_dim(dim, s.dim())?;
        }
        let mut sum = DMatrix::from_element(dim, dim, ZERO);
        for s in &states {
            sum += &s.amps * s.amps.adjoint();
        }
        let deviation = (sum - DMatrix::identity(dim, dim)).camax();
        if states.len() != dim || deviation > tolerances::BASIS_COMPLETENESS {
            return Err(Error::IncompleteBasis {
                deviation: deviation.max(if states.len() == dim { 0.0 } else { 1.0 }),
            });
        }
        Ok(Self { labels, states })
    }

    /// Computational basis labelled `1..=dim`.
    pub fn computational(dim: usize) -> Self {
        Self {
            labels: (1..=dim).map(|k| k.to_string()).collect(),
            states: (0..dim)
                .map(|k| PureState::basis(dim, k).expect("index below dim"))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PureState)> {
        self.labels.iter().map(String::as_str).zip(&self.states)
    }

    pub fn get(&self, label: &str) -> Option<&PureState> {
        self.iter().find(|(l, _)| *l == label).map(|(_, s)| s)
    }
}

/// Extends an orthonormal set to a full basis by Gram–Schmidt over the
/// computational basis vectors, in index order.
pub fn gram_schmidt_completion(fixed: &[PureState], dim: usize) -> Result<Vec<PureState>> {
    let mut out: Vec<PureState> = fixed.to_vec();
    for s in &out {
        same_dim(dim, s.dim())?;
    }
    for k in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut v = PureState::basis(dim, k)?.amps;
        // two passes keep the residual orthogonal to working precision
        for _ in 0..2 {
            for u in &out {
                let c = u.amps.dotc(&v);
                v -= &u.amps * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            out.push(PureState {
                amps: v.unscale(norm),
            });
        }
    }
    if out.len() != dim {
        return Err(Error::IncompleteBasis { deviation: 1.0 });
    }
    Ok(out)
}

/// Basis `{first, m₂, …, m_dim}` in which every `mᵢ` has the same overlap
/// `1/(dim−1)` with `pivot`.
///
/// `pivot` must be orthogonal to `first`. The orthogonal complement of
/// `first` is spanned by `pivot` followed by a Gram–Schmidt completion, and
/// the auxiliary outputs are the discrete Fourier rotation of that frame.
pub fn flat_completion(first: &PureState, pivot: &PureState) -> Result<Vec<PureState>> {
    let dim = first.dim();
    let ip = first.inner(pivot)?;
    if ip.norm() > tolerances::SPECTRAL {
        return Err(Error::domain(format!(
            "pivot is not orthogonal to the first output (overlap {:e})",
            ip.norm()
        )));
    }
    let frame = gram_schmidt_completion(&[first.clone(), pivot.clone()], dim)?;
    let rest = &frame[1..];
    let n = rest.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(dim);
    out.push(first.clone());
    for j in 0..n {
        let mut v = DVector::from_element(dim, ZERO);
        for (k, u) in rest.iter().enumerate() {
            let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
            v += &u.amps * Complex64::from_polar(scale, angle);
        }
        out.push(PureState { amps: v });
    }
    Ok(out)
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn check_finite<'a>(mut it: impl Iterator<Item = &'a Complex64>) -> Result<()> {
    if it.all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain("non-finite amplitude"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalize_equal_superposition() {
        let s = normalize(&[c(1.0, 0.0); 3]).unwrap();
        let k = 1.0 / 3f64.sqrt();
        for z in s.amplitudes() {
            assert!((z - c(k, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn normalize_already_unit() {
        let s = normalize(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn normalize_three_four_five() {
        let s = normalize(&[c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.amplitudes()[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn normalize_rejects_zero() {
        assert!(matches!(
            normalize(&[c(0.0, 0.0), c(1e-15, 0.0)]),
            Err(Error::ZeroVector { .. })
        ));
        assert!(normalize(&[]).is_err());
    }

    #[test]
    fn pure_state_rejects_unnormalized() {
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn born_on_equal_superposition() {
        let nf = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let f = PureState::from_real(&[1.0, 1.0, -1.0]).unwrap();
        let rho = nf.density();
        let p1 = born_probability(&rho, &PureState::basis(3, 0).unwrap()).unwrap();
        assert!((p1.get() - 1.0 / 3.0).abs() < 1e-15);
        let pf = born_probability(&rho, &f).unwrap();
        assert!((pf.get() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn born_eigenstate_and_mixed() {
        let e0 = PureState::basis(2, 0).unwrap();
        assert_eq!(born_probability(&e0.density(), &e0).unwrap().get(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(2);
        let m = PureState::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        assert!((born_probability(&mixed, &m).unwrap().get() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn born_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(2);
        let m = PureState::basis(3, 0).unwrap();
        assert!(matches!(
            born_probability(&rho, &m),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn probability_flag() {
        let p = Probability::from_raw(1.0 + 1e-9);
        assert_eq!(p.get(), 1.0);
        assert!(p.out_of_range());
        let q = Probability::from_raw(-1e-14);
        assert_eq!(q.get(), 0.0);
        assert!(!q.out_of_range());
    }

    #[test]
    fn project_out_first_path() {
        // √(1/3)|a⟩ + √(2/3)|b⟩ with a the first basis vector
        let b = PureState::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let mut v = vec![c((1.0f64 / 3.0).sqrt(), 0.0)];
        v.extend(
            b.amplitudes()[1..]
                .iter()
                .map(|z| z * (2.0f64 / 3.0).sqrt()),
        );
        let psi = PureState::new(v).unwrap();
        let a = PureState::basis(3, 0).unwrap();
        let blocked = project_out(&psi.density(), &a).unwrap();
        assert!((blocked.absorbed.get() - 1.0 / 3.0).abs() < 1e-15);
        assert!((blocked.survivor.trace() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn project_out_eigenvector() {
        let e0 = PureState::basis(2, 0).unwrap();
        let e1 = PureState::basis(2, 1).unwrap();
        let rho = DensityMatrix::mixture(&[(0.3, e0.clone()), (0.7, e1)]).unwrap();
        let blocked = project_out(&rho, &e0).unwrap();
        assert!((blocked.absorbed.get() - 0.3).abs() < 1e-15);
        let expected = rho.matrix() - e0.density().matrix() * c(0.3, 0.0);
        assert!((blocked.survivor.matrix() - expected).camax() < 1e-15);
    }

    #[test]
    fn project_out_blocked_interferometer_path() {
        let nf = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let f = PureState::from_real(&[1.0, 1.0, -1.0]).unwrap();
        let blocked = project_out(&nf.density(), &f).unwrap();
        assert!((blocked.absorbed.get() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let bad =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(DensityMatrix::new(bad).is_err());
        let neg =
            DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(neg).is_err());
        let nonherm =
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(nonherm).is_err());
    }

    #[test]
    fn projector_properties() {
        let a = PureState::from_real(&[1.0, 2.0, -1.0]).unwrap();
        let p = Projector::onto(&a);
        let q = Projector::complement_of(&a);
        assert_eq!(p.rank(), 1);
        assert_eq!(q.rank(), 2);
        assert!(p.idempotency_defect() < 1e-15);
        assert!(q.idempotency_defect() < 1e-15);
    }

    #[test]
    fn canonical_phase_and_rays() {
        let a = PureState::new(vec![c(0.0, FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2, 0.0)]).unwrap();
        let canon = a.with_canonical_phase();
        assert!((canon.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(a.same_ray(&canon, 1e-12));
        let b = PureState::from_real(&[1.0, 1.0]).unwrap();
        assert!(!a.same_ray(&b, 1e-6));
    }

    #[test]
    fn basis_validation() {
        let b = OutcomeBasis::computational(3);
        assert_eq!(b.labels(), &["1", "2", "3"]);
        let partial = OutcomeBasis::new(
            vec!["x".into(), "y".into()],
            vec![
                PureState::basis(3, 0).unwrap(),
                PureState::basis(3, 1).unwrap(),
            ],
        );
        assert!(matches!(partial, Err(Error::IncompleteBasis { .. })));
        let skew = OutcomeBasis::new(
            vec!["x".into(), "y".into()],
            vec![
                PureState::basis(2, 0).unwrap(),
                PureState::from_real(&[1.0, 1.0]).unwrap(),
            ],
        );
        assert!(matches!(skew, Err(Error::IncompleteBasis { .. })));
    }

    #[test]
    fn flat_completion_spreads_pivot_evenly() {
        let first = PureState::from_real(&[1.0, -1.0, -1.0, -1.0, -1.0]).unwrap();
        let pivot = PureState::from_real(&[4.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let basis = flat_completion(&first, &pivot).unwrap();
        let labels = (0..5).map(|k| k.to_string()).collect();
        OutcomeBasis::new(labels, basis.clone()).unwrap();
        for m in &basis[1..] {
            assert!((m.overlap(&pivot).unwrap() - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_completion_rejects_non_orthogonal_pivot() {
        let first = PureState::basis(3, 0).unwrap();
        let pivot = PureState::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(flat_completion(&first, &pivot).is_err());
    }
}
