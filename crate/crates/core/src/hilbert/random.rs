//! Random states, mixed states and Haar-random bases for property sweeps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, OutcomeBasis, PureState};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return PureState::from_vector_unchecked(v.unscale(norm));
        }
    }
}

/// Random mixed state of the given rank, `G G† / tr(G G†)` with `G` a
/// complex Ginibre `dim × rank` matrix.
pub fn density_matrix(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = DMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let mut m = &g * g.adjoint();
    let tr = m.trace();
    m /= tr;
    // symmetrize away rounding so the Hermitian check is exact
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::from_matrix_unchecked(m)
}

/// Haar-random unitary via QR of a Ginibre matrix with the phases of R's
/// diagonal folded back into Q.
pub fn unitary(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Outcome basis given by the columns of a Haar-random unitary.
pub fn basis(dim: usize, rng: &mut impl Rng) -> OutcomeBasis {
    let u = unitary(dim, rng);
    let states = (0..dim)
        .map(|j| {
            let col = u.column(j).into_owned();
            let norm = col.norm();
            PureState::from_vector_unchecked(col.unscale(norm))
        })
        .collect();
    let labels = (1..=dim).map(|k| format!("m{k}")).collect();
    OutcomeBasis::new(labels, states).expect("columns of a unitary are a complete basis")
}
