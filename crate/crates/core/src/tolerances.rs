//! Comparison tolerances used across the crate.
//!
//! Algebraic identities between exact rationals hold to roughly machine
//! precision in `f64`, so they are checked at `ALGEBRAIC`. Anything that goes
//! through a decomposition or a long sum uses `SPECTRAL`.

/// Identities that are exact in real arithmetic.
pub const ALGEBRAIC: f64 = 1e-12;

/// Spectral checks, completeness sums and unitarity of composed networks.
pub const SPECTRAL: f64 = 1e-10;

/// Norm deviation accepted for a `PureState`.
pub const NORM: f64 = 1e-12;

/// Below this norm a vector cannot be normalized.
pub const ZERO_VECTOR: f64 = 1e-14;

/// Most negative eigenvalue accepted for a density matrix.
pub const NEGATIVE_EIGENVALUE: f64 = 1e-10;

/// A raw probability outside `[0, 1]` by more than this raises the
/// out-of-range flag on `Probability`.
pub const PROBABILITY_EXCESS: f64 = 1e-10;

/// Unitarity of a single beamsplitter block.
pub const ELEMENT_UNITARITY: f64 = 1e-12;

/// Unitarity of a composed network.
pub const NETWORK_UNITARITY: f64 = 1e-10;

/// Orthonormality and completeness of an outcome basis.
pub const BASIS_COMPLETENESS: f64 = 1e-10;

/// Band around zero inside which a change in outcome probability counts as
/// no change. Outcomes inside the band contribute no gain and map to the
/// "absent" verdict.
pub const TIE_BAND: f64 = 1e-12;

/// Slack on the geometric-mean bound of the Kirkwood-Dirac term.
pub const KD_BOUND_SLACK: f64 = 1e-10;

/// Slack on the closed-form gain bounds.
pub const GAIN_BOUND_SLACK: f64 = 1e-9;

/// |bound - achieved| below which an optimizer result counts as saturated.
pub const SATURATION: f64 = 1e-6;

/// Residual probability treated as "no false positive".
pub const FALSE_POSITIVE: f64 = 1e-12;

/// Agreement between scenario golden values and computed reports.
pub const GOLDEN: f64 = 1e-10;

/// Monte Carlo acceptance band, in binomial standard errors.
pub const MONTE_CARLO_SIGMAS: f64 = 5.0;

/// Agreement of identities re-checked on a serialized report. Values are
/// rounded to 12 significant digits on output, so the band is wider than
/// `ALGEBRAIC`.
pub const SERIALIZED: f64 = 1e-10;
