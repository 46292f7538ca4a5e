use cfgain::bounds::{ev_gain_bound, kd_bound_check, max_gain_bound, sufficient_gain_condition};
use cfgain::counterfactual::{check_identities, full_report, gain_condition, is_eigenstate};
use cfgain::discriminate::{
    error_probability, optimal_guess_map, simulate_game, OutcomeDistribution, Verdict,
};
use cfgain::hilbert::{flat_completion, random, OutcomeBasis, PureState};
use cfgain::scenarios::kd_scenario;
use cfgain::tolerances::TIE_BAND;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random `(ρ, a, basis)` from a seed; odd seeds give mixed states.
fn triple(dim: usize, seed: u64) -> (cfgain::hilbert::DensityMatrix, PureState, OutcomeBasis) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = if seed.is_multiple_of(2) {
        random::pure_state(dim, &mut rng).density()
    } else {
        random::density_matrix(dim, 1 + (seed as usize / 2) % dim, &mut rng)
    };
    (
        rho,
        random::pure_state(dim, &mut rng),
        random::basis(dim, &mut rng),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn report_identities_hold(dim in 2usize..=9, seed in any::<u64>()) {
        let (rho, a, basis) = triple(dim, seed);
        let r = full_report(&rho, &a, &basis).unwrap();
        let bad = check_identities(&r, 1e-12);
        prop_assert!(bad.is_empty(), "{:?}", bad);
        prop_assert!(r.gain <= max_gain_bound(r.p_a).unwrap() + 1e-9);
    }

    #[test]
    fn outcome_bounds_hold(dim in 2usize..=9, seed in any::<u64>()) {
        let (rho, a, basis) = triple(dim, seed);
        for m in basis.states() {
            prop_assert!(kd_bound_check(&rho, &a, m).unwrap().holds);
            if sufficient_gain_condition(&rho, &a, m).unwrap() {
                prop_assert!(gain_condition(&rho, &a, m).unwrap());
            }
        }
    }

    #[test]
    fn guess_map_agrees_with_gain_condition(dim in 2usize..=9, seed in any::<u64>()) {
        let (rho, a, basis) = triple(dim, seed);
        let r = full_report(&rho, &a, &basis).unwrap();
        let p = OutcomeDistribution::unblocked(&r);
        let q = OutcomeDistribution::blocked(&r);
        let map = optimal_guess_map(&p, &q).unwrap();
        for (o, m) in r.outcomes.iter().zip(basis.states()) {
            let present = map.verdict(&o.label) == Some(Verdict::Present);
            let margin = o.p_m_given_block - o.p_m;
            if margin.abs() > 10.0 * TIE_BAND {
                prop_assert_eq!(present, gain_condition(&rho, &a, m).unwrap());
            }
        }
        let e = error_probability(&p, &q).unwrap();
        prop_assert!((e - (0.5 - r.delta_a / 2.0)).abs() < 1e-12);
    }

    /// States whose gaining outputs are all dark stay under `p(1−p)`.
    #[test]
    fn dark_gain_below_ev_bound(dim in 2usize..=9, p in 0.001f64..0.999, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::pure_state(dim, &mut rng);
        let b = loop {
            let x = random::pure_state(dim, &mut rng);
            let ip = a.inner(&x).unwrap();
            let v: Vec<_> = x.amplitudes().iter().zip(a.amplitudes()).map(|(y, z)| y - z * ip).collect();
            if let Ok(b) = cfgain::hilbert::normalize(&v) { break b; }
        };
        let mix = |x: f64, y: f64| {
            let v: Vec<_> = a.amplitudes().iter().zip(b.amplitudes()).map(|(s, t)| s * x + t * y).collect();
            cfgain::hilbert::normalize(&v).unwrap()
        };
        let psi = mix(p.sqrt(), (1.0 - p).sqrt());
        let m1 = mix((1.0 - p).sqrt(), -p.sqrt());
        let labels = (1..=dim).map(|k| format!("m{k}")).collect();
        let basis = OutcomeBasis::new(labels, flat_completion(&m1, &psi).unwrap()).unwrap();
        let r = full_report(&psi.density(), &a, &basis).unwrap();
        prop_assert!(r.outcomes.iter().filter(|o| o.contributes).all(|o| o.p_m < 1e-12));
        prop_assert!(r.gain <= ev_gain_bound(r.p_a).unwrap() + 1e-9);
    }

    #[test]
    fn blocking_an_eigenvector_is_classical(dim in 2usize..=9, k in 0usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::density_matrix(dim, dim, &mut rng);
        let u = random::unitary(dim, &mut rng);
        // a diagonal state rotated by u has the columns of u as eigenvectors
        let diag = nalgebra::DMatrix::from_diagonal(&rho.matrix().diagonal());
        let rho = cfgain::hilbert::DensityMatrix::new(diag).unwrap().transformed(&u).unwrap();
        let col = u.column(k % dim).into_owned();
        let a = PureState::new(col.iter().copied().collect()).unwrap();
        prop_assert!(is_eigenstate(&rho, &a, 1e-10).unwrap());
        let r = full_report(&rho, &a, &random::basis(dim, &mut rng)).unwrap();
        prop_assert!(r.gain.abs() < 1e-10);
        prop_assert!((r.delta_a - r.p_a).abs() < 1e-10);
    }
}

/// Deviations from the analytic error rate, measured in standard errors,
/// stay of order one as the trial count grows, i.e. shrink like `1/√N`.
#[test]
fn monte_carlo_converges_like_inverse_sqrt() {
    let s = kd_scenario();
    let mut mean_abs = Vec::new();
    for n in [1u64 << 14, 1 << 15, 1 << 16, 1 << 17] {
        let mut sq = 0.0;
        let mut abs = 0.0;
        for seed in 0..10 {
            let e = simulate_game(&s, n, seed).unwrap();
            sq += e.deviation_sigmas().powi(2);
            abs += (e.empirical_error - e.analytic_error).abs();
        }
        let rms = (sq / 10.0).sqrt();
        assert!((0.3..=2.0).contains(&rms), "n = {n}: rms {rms} sigma");
        mean_abs.push(abs / 10.0);
    }
    // four-fold more trials halves the error, within sampling noise
    let ratio = mean_abs[3] / mean_abs[1];
    assert!((0.2..=1.0).contains(&ratio), "ratio {ratio}");
}
