use proptest::prelude::*;

use ircgain::comp::{generate_realization, spectral_mean, ScenarioConfig};
use ircgain::linalg::{hermitian_inverse, rank_one_inverse_update, ComplexMatrix};
use ircgain::random::{self, substream};
use ircgain::selection::{greedy_select, rank_candidates, CandidatePool};
use ircgain::{cumulative_gain, init_state, irc_sinr_direct, AntennaRow, UserChannelSet};

fn instance(seed: u64, n_r: usize, n_int: usize, sigma2: f64) -> UserChannelSet {
    random::channel_set(&mut substream(seed, 0, 0), n_r, n_int, sigma2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_times_matrix_is_identity(seed in any::<u64>(), n in 1usize..=8, shift in 0.01f64..2.0) {
        let m = random::positive_definite(&mut substream(seed, 0, 0), n, shift);
        let a = hermitian_inverse(&m).unwrap();
        let err = a.matmul(&m).unwrap().max_abs_diff(&ComplexMatrix::identity(n)).unwrap();
        prop_assert!(err <= 1e-9, "residual {err}");
    }

    #[test]
    fn rank_one_update_stays_hermitian_pd(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = substream(seed, 0, 0);
        let a = hermitian_inverse(&random::positive_definite(&mut rng, n, 0.1)).unwrap();
        let rho = random::gaussian_vector(&mut rng, n);
        let t = a.row_quadratic_form(&rho).unwrap();
        prop_assert!(t.im.abs() <= 1e-12 * t.re.max(1.0));
        prop_assert!(t.re >= 0.0);
        let a1 = rank_one_inverse_update(&a, &rho).unwrap();
        prop_assert_eq!(a1.hermitian_deviation().unwrap(), 0.0);
        prop_assert!(ircgain::linalg::Cholesky::factor(&a1).is_ok());
    }

    #[test]
    fn state_tracks_cached_formula(seed in any::<u64>(), n_r in 1usize..=6, n_int in 0usize..=6, a in 0usize..=8) {
        let full = instance(seed, n_r + a, n_int, 0.1);
        let mut state = init_state(&full.first_antennas(n_r)).unwrap();
        for row in full.antenna_rows_from(n_r) {
            let next = state.add_antenna(&row).unwrap();
            prop_assert!(next.sinr() >= state.sinr() - 1e-12);
            let cached = next.sinr_from_cache();
            prop_assert!((next.sinr() - cached).abs() <= 1e-9 * cached.max(1.0));
            state = next;
        }
        prop_assert_eq!(state.n_antennas(), n_r + a);
    }

    #[test]
    fn gain_equals_direct_difference(seed in any::<u64>(), n_r in 1usize..=8, n_int in 0usize..=7, s in 0usize..3) {
        let sigma2 = [0.01, 0.1, 1.0][s];
        let full = instance(seed, n_r + 1, n_int, sigma2);
        let base = full.first_antennas(n_r);
        let xi = init_state(&base).unwrap().gain(&full.antenna_row(n_r)).unwrap().xi;
        let diff = irc_sinr_direct(&full).unwrap() - irc_sinr_direct(&base).unwrap();
        prop_assert!(xi >= 0.0);
        prop_assert!((xi - diff).abs() <= 1e-9 * diff.abs().max(1.0), "{} vs {}", xi, diff);
    }

    #[test]
    fn ranking_scores_are_independent_gains(seed in any::<u64>(), n_int in 0usize..=4, pool_size in 1usize..=6) {
        let mut rng = substream(seed, 0, 0);
        let base = random::channel_set(&mut rng, 3, n_int, 0.1);
        let state = init_state(&base).unwrap();
        let rows: Vec<AntennaRow> = (0..pool_size).map(|_| random::antenna_row(&mut rng, n_int)).collect();
        let pool = CandidatePool::from_rows(rows.clone());
        for (id, xi) in rank_candidates(&state, &pool).unwrap() {
            prop_assert_eq!(xi, state.gain(&rows[id]).unwrap().xi);
        }
    }

    #[test]
    fn full_selection_is_order_invariant(seed in any::<u64>(), n_int in 0usize..=4, pool_size in 1usize..=5) {
        let mut rng = substream(seed, 0, 0);
        let base = random::channel_set(&mut rng, 2, n_int, 0.1);
        let state = init_state(&base).unwrap();
        let rows: Vec<AntennaRow> = (0..pool_size).map(|_| random::antenna_row(&mut rng, n_int)).collect();
        let (greedy, _) = greedy_select(&state, &mut CandidatePool::from_rows(rows.clone()), pool_size).unwrap();
        let mut reversed = rows.clone();
        reversed.reverse();
        let (_, chained) = cumulative_gain(&state, &reversed).unwrap();
        prop_assert!((greedy.sinr() - chained.sinr()).abs() <= 1e-9 * chained.sinr().max(1.0));
    }

    #[test]
    fn spectral_mean_is_bounded_and_symmetric(mut snrs in prop::collection::vec(0.0f64..1e3, 1..30)) {
        let sm = spectral_mean(&snrs).unwrap();
        let lo = snrs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = snrs.iter().copied().fold(0.0, f64::max);
        prop_assert!(sm >= lo * (1.0 - 1e-12) - 1e-12 && sm <= hi * (1.0 + 1e-12) + 1e-12);
        snrs.reverse();
        let rev = spectral_mean(&snrs).unwrap();
        prop_assert!((rev - sm).abs() <= 1e-12 * sm.max(1.0));
        snrs[0] += 1.0;
        prop_assert!(spectral_mean(&snrs).unwrap() > sm);
    }

    #[test]
    fn generated_channels_meet_norm_constraints(seed in any::<u64>(), sir_db in -20.0f64..30.0) {
        let cfg = ScenarioConfig::default();
        let real = generate_realization(&cfg, sir_db, &mut substream(seed, 0, 0)).unwrap();
        let cross = 10f64.powf(-sir_db / 10.0);
        for ue in 0..real.n_ues() {
            for bs in 0..real.n_cells() {
                let n2 = real.channel(ue, bs).unwrap().norm_sqr();
                let want = if bs == real.own_cell(ue).unwrap() { 1.0 } else { cross };
                prop_assert!((n2 - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }
}
