//! Closed-form limits on counterfactual gain and a numerical maximizer that
//! checks how close they can be approached.
//!
//! The maximizer works on the one-parameter family
//! `|ψ⟩ = √p|a⟩ + √(1−p)|b⟩`, `m₁ = cos θ|a⟩ − sin θ|b⟩`, `θ ∈ [0, π/2]`,
//! with the remaining outputs spread evenly over the complement of `m₁`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::counterfactual::{counterfactual_gain, ev_term, full_report, kd_term};
use crate::error::{Error, Result};
use crate::hilbert::{born_probability, flat_completion, DensityMatrix, OutcomeBasis, PureState};
use crate::tolerances::{FALSE_POSITIVE, SATURATION};

/// Grid points used by [`optimize_gain`] before refinement.
pub const GRID_POINTS: usize = 10_001;

const GOLDEN_ITERATIONS: usize = 200;

fn check_unit(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "probability must lie in [0, 1], got {p}"
        )))
    }
}

/// `½(√((4−3p)p) − p)`, the largest gain reachable with absorption
/// probability `p` when false positives are allowed.
pub fn max_gain_bound(p_a: f64) -> Result<f64> {
    check_unit(p_a)?;
    Ok(0.5 * (((4.0 - 3.0 * p_a) * p_a).sqrt() - p_a))
}

/// `p(1−p)`, the largest gain reachable without false positives.
pub fn ev_gain_bound(p_a: f64) -> Result<f64> {
    check_unit(p_a)?;
    Ok(p_a * (1.0 - p_a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdBound {
    /// `|ϱ(a, m)|`
    pub lhs: f64,
    /// `√(P(m)·EV)`
    pub rhs: f64,
    pub holds: bool,
}

pub fn kd_bound_check(rho: &DensityMatrix, a: &PureState, m: &PureState) -> Result<KdBound> {
    let lhs = kd_term(rho, a, m)?.abs();
    let p_m = born_probability(rho, m)?.get();
    let rhs = (p_m * ev_term(rho, a, m)?).sqrt();
    Ok(KdBound {
        lhs,
        rhs,
        holds: lhs <= rhs + crate::tolerances::KD_BOUND_SLACK,
    })
}

/// `P(m) < ¼|⟨m|a⟩|²P(a)`. Implies the gain condition but is not implied
/// by it.
pub fn sufficient_gain_condition(
    rho: &DensityMatrix,
    a: &PureState,
    m: &PureState,
) -> Result<bool> {
    let p_m = born_probability(rho, m)?.get();
    Ok(p_m < 0.25 * ev_term(rho, a, m)?)
}

/// How much probability a gaining outcome may carry without the absorber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FalsePositives {
    Allowed,
    Forbidden,
    /// Every gaining outcome has `P(m) ≤ cap`. A cap of zero or less is the
    /// same as `Forbidden`.
    Capped(f64),
}

/// Optimal configuration found by the maximizer.
#[derive(Debug, Clone)]
pub struct Witness {
    pub theta: f64,
    pub state: PureState,
    pub a: PureState,
    pub basis: OutcomeBasis,
}

#[derive(Debug, Clone)]
pub struct BoundResult {
    pub p_a: f64,
    pub bound_value: f64,
    pub achieved_value: f64,
    pub saturated: bool,
    /// `achieved / bound`, or 1 when both vanish.
    pub ratio: f64,
    pub witness: Witness,
}

struct Family {
    dim: usize,
    p: f64,
    a: PureState,
    state: PureState,
    rho: DensityMatrix,
}

impl Family {
    fn new(p: f64, dim: usize) -> Result<Self> {
        let a = PureState::basis(dim, 0)?;
        let state = Self::mix(dim, p.sqrt(), (1.0 - p).sqrt());
        let rho = state.density();
        Ok(Self {
            dim,
            p,
            a,
            state,
            rho,
        })
    }

    /// `x|a⟩ + y|b⟩` with `|b⟩` uniform on the paths other than `a`.
    fn mix(dim: usize, x: f64, y: f64) -> PureState {
        let mut v = vec![y / ((dim - 1) as f64).sqrt(); dim];
        v[0] = x;
        PureState::from_real(&v).expect("unit vector")
    }

    fn basis(&self, theta: f64) -> Result<OutcomeBasis> {
        let (s, c) = theta.sin_cos();
        let m1 = Self::mix(self.dim, c, -s);
        let rest = Self::mix(self.dim, s, c);
        let labels = (1..=self.dim).map(|k| format!("m{k}")).collect();
        OutcomeBasis::new(labels, flat_completion(&m1, &rest)?)
    }

    fn gain(&self, theta: f64) -> f64 {
        self.basis(theta)
            .and_then(|basis| counterfactual_gain(&self.rho, &self.a, &basis))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Angle range on which `P(m₁) = (√p cos θ − √(1−p) sin θ)² ≤ cap`.
    /// The other outputs never gain on `[0, π/2]`, so this is the whole
    /// feasibility constraint.
    fn feasible(&self, cap: f64) -> (f64, f64) {
        let dark = self.p.sqrt().atan2((1.0 - self.p).sqrt());
        if cap <= 0.0 {
            return (dark, dark);
        }
        if cap >= 1.0 {
            return (0.0, FRAC_PI_2);
        }
        // √p cos θ − √(1−p) sin θ = sin(dark − θ)
        let half = cap.sqrt().asin();
        ((dark - half).max(0.0), (dark + half).min(FRAC_PI_2))
    }
}

fn maximize(f: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let (best, _) = (0..GRID_POINTS)
        .into_par_iter()
        .map(|k| (k, f(lo + step * k as f64)))
        // earliest index wins ties, independent of scheduling
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |x, y| {
                if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                    y
                } else {
                    x
                }
            },
        );
    let centre = lo + step * best as f64;
    let (mut l, mut r) = ((centre - step).max(lo), (centre + step).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = r - inv_phi * (r - l);
    let mut x2 = l + inv_phi * (r - l);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if r - l < 1e-14 {
            break;
        }
        if f1 < f2 {
            l = x1;
            x1 = x2;
            f1 = f2;
            x2 = l + inv_phi * (r - l);
            f2 = f(x2);
        } else {
            r = x2;
            x2 = x1;
            f2 = f1;
            x1 = r - inv_phi * (r - l);
            f1 = f(x1);
        }
    }
    [(centre, f(centre)), (x1, f1), (x2, f2)]
        .into_iter()
        .fold(
            (lo, f64::NEG_INFINITY),
            |acc, c| if c.1 > acc.1 { c } else { acc },
        )
}

/// Largest gain over the single-special-output family, false positives
/// allowed.
pub fn optimize_gain(p_a: f64, dim: usize) -> Result<BoundResult> {
    optimize_gain_with(p_a, dim, FalsePositives::Allowed)
}

/// As [`optimize_gain`] under a false-positive policy. The bound reported
/// is the unconstrained one for `Allowed` and `Capped`, and `p(1−p)` for
/// `Forbidden`.
pub fn optimize_gain_with(p_a: f64, dim: usize, policy: FalsePositives) -> Result<BoundResult> {
    if !(p_a > 0.0 && p_a < 1.0) {
        return Err(Error::domain(format!(
            "optimization needs p_a in (0, 1), got {p_a}"
        )));
    }
    if dim < 2 {
        return Err(Error::domain("optimization needs at least two paths"));
    }
    // Outputs other than m₁ never gain on this family, so the search runs
    // in the plane of |a⟩ and |b⟩ and the witness is rebuilt in `dim`.
    let plane = Family::new(p_a, 2)?;
    let family = Family::new(p_a, dim)?;
    let cap = match policy {
        FalsePositives::Allowed => 1.0,
        FalsePositives::Forbidden => 0.0,
        FalsePositives::Capped(c) => c,
    };
    let (lo, hi) = plane.feasible(cap);
    let (theta, _) = maximize(|t| plane.gain(t), lo, hi);

    let basis = family.basis(theta)?;
    let report = full_report(&family.rho, &family.a, &basis)?;
    let achieved = report.gain;
    if cap < 1.0 {
        let limit = cap.max(FALSE_POSITIVE);
        let violation = report
            .outcomes
            .iter()
            .find(|o| o.contributes && o.p_m > limit + FALSE_POSITIVE);
        if let Some(o) = violation {
            return Err(Error::domain(format!(
                "witness outcome {} has P(m) = {:e} above the cap",
                o.label, o.p_m
            )));
        }
    }
    let bound = match policy {
        FalsePositives::Forbidden => ev_gain_bound(p_a)?,
        _ => max_gain_bound(p_a)?,
    };
    Ok(BoundResult {
        p_a,
        bound_value: bound,
        achieved_value: achieved,
        saturated: (bound - achieved).abs() < SATURATION,
        ratio: if bound > 0.0 { achieved / bound } else { 1.0 },
        witness: Witness {
            theta,
            state: family.state.clone(),
            a: family.a.clone(),
            basis,
        },
    })
}

/// `start:stop:steps`, with `steps` points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::domain("grid ends must be finite"));
        }
        if steps == 0 {
            return Err(Error::domain("grid needs at least one point"));
        }
        if steps == 1 && start != stop {
            return Err(Error::domain("a one-point grid needs start == stop"));
        }
        Ok(Self { start, stop, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + h * k as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(Error::domain(format!("grid `{s}` is not start:stop:steps")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("grid bound `{t}` is not a number")))
        };
        let steps = steps
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::domain(format!("grid steps `{steps}` is not a count")))?;
        Grid::new(num(start)?, num(stop)?, steps)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p_a: f64,
    pub bound: f64,
    pub ev_bound: f64,
    pub achieved: f64,
    pub saturated: bool,
}

/// Bounds and optimizer output at every grid point. The ends `p = 0` and
/// `p = 1` admit no gain and are filled in directly.
pub fn sweep(grid: &Grid, dim: usize, policy: FalsePositives) -> Result<Vec<SweepRow>> {
    grid.points()
        .into_iter()
        .map(|p| {
            let bound = max_gain_bound(p)?;
            let ev_bound = ev_gain_bound(p)?;
            let achieved = if p == 0.0 || p == 1.0 {
                0.0
            } else {
                optimize_gain_with(p, dim, policy)?.achieved_value
            };
            let reference = if policy == FalsePositives::Forbidden {
                ev_bound
            } else {
                bound
            };
            Ok(SweepRow {
                p_a: p,
                bound,
                ev_bound,
                achieved,
                saturated: (reference - achieved).abs() < SATURATION,
            })
        })
        .collect()
}
