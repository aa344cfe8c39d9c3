use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

use super::*;
use crate::linalg::{SpectralMode, CMat};
use crate::logfp::{log_objective, run_log};
use crate::model::{objective, Blocks};
use crate::scalar::C;
use crate::solvers::{step_conventional, step_nonhomogeneous, SolverId, SolverOptions};
use crate::testkit::hermitian_eigenvalues;

fn small_isac() -> IsacParams {
    IsacParams {
        tx_antennas: 6,
        user_antennas: 2,
        radar_antennas: 8,
        ..IsacParams::default()
    }
}

fn small_mimo(cells: usize, q: usize) -> MimoParams {
    MimoParams {
        cells,
        users_per_cell: q,
        tx_antennas: 6,
        rx_antennas: 2,
        ..MimoParams::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn unit_conversions() {
    assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
    assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-15);
    assert!(rel(dbm_to_watts(-90.0), 1e-12) < 1e-12);
    assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    assert!((mimo_path_loss_db(1.0) - 128.1).abs() < 1e-12);
    assert!((mimo_path_loss_db(10.0) - 165.7).abs() < 1e-12);
    assert!((isac_path_loss_db(1.0) - 32.6).abs() < 1e-12);
    assert!((isac_path_loss_db(100.0) - 106.0).abs() < 1e-12);
}

#[test]
fn steering_examples() {
    let a0 = steering_vector(0.0f64, 4);
    assert!(a0.max_abs_diff(&CMat::ones(4, 1)) < 1e-15);
    // sin(π/6) = 1/2, so consecutive entries rotate by −π/2.
    let a = steering_vector(FRAC_PI_6, 4);
    let expect = CMat::column(vec![C::new(1.0, 0.0), C::new(0.0, -1.0), C::new(-1.0, 0.0), C::new(0.0, 1.0)]);
    assert!(a.max_abs_diff(&expect) < 1e-12);
    let m = steering_matrix(0.3f64, 3, 5);
    assert_eq!(m.shape(), (5, 3));
    assert!((m[(4, 2)] - steering_vector(0.3, 5)[(4, 0)] * steering_vector(0.3, 3)[(2, 0)]).norm() < 1e-15);
}

#[test]
fn steering_derivative_matches_finite_difference() {
    let h = 1e-6;
    for &theta in &[-1.1, 0.0, 0.4, FRAC_PI_4] {
        let fd = steering_matrix(theta + h, 5, 7).sub(&steering_matrix(theta - h, 5, 7)).scale(0.5 / h);
        let an = steering_derivative(theta, 5, 7);
        assert!(an.max_abs_diff(&fd) < 1e-7, "theta {theta}");
        let fdv = steering_vector(theta + h, 6).sub(&steering_vector(theta - h, 6)).scale(0.5 / h);
        assert!(steering_vector_derivative(theta, 6).max_abs_diff(&fdv) < 1e-7);
    }
}

#[test]
fn target_angle_and_positions() {
    let s = IsacScenario::generate(&IsacParams::default(), 1).unwrap();
    assert!((s.theta - FRAC_PI_4).abs() < 1e-15);
    assert!(rel(s.power, 0.1) < 1e-14);
    assert!(rel(s.radar_noise, 1e-11) < 1e-12);
    assert!((broadside_angle([0.0, 0.0], [0.0, 5.0])).abs() < 1e-15);
    assert!((broadside_angle([0.0, 0.0], [5.0, 0.0]) - PI / 2.0).abs() < 1e-15);
}

#[test]
fn hex_sites_are_mutual_neighbours_on_the_torus() {
    let lay = HexLayout::new(0.8);
    for a in 0..HexLayout::CELLS {
        assert!(lay.wrapped_distance(lay.site(a), lay.site(a)) < 1e-12);
        for b in 0..HexLayout::CELLS {
            if a != b {
                let d = lay.wrapped_distance(lay.site(a), lay.site(b));
                assert!((d - 0.8).abs() < 1e-12, "sites {a},{b}: {d}");
            }
        }
    }
}

#[test]
fn wrapped_distance_is_translation_invariant() {
    let lay = HexLayout::new(0.8);
    let [c1, c2] = lay.cluster_vectors();
    assert!(((c1[0].hypot(c1[1])) - 0.8 * 7f64.sqrt()).abs() < 1e-12);
    let mut rng = crate::model::random::seeded_rng(3);
    for _ in 0..200 {
        let a = lay.sample_user(rng.random_range(0..7), 0.01, &mut rng);
        let b = lay.sample_user(rng.random_range(0..7), 0.01, &mut rng);
        let d = lay.wrapped_distance(a, b);
        assert!(d <= super::geometry::distance(a, b) + 1e-12);
        for (i, j) in [(1.0, 0.0), (0.0, 1.0), (-2.0, 3.0)] {
            let bt = [b[0] + i * c1[0] + j * c2[0], b[1] + i * c1[1] + j * c2[1]];
            assert!((lay.wrapped_distance(a, bt) - d).abs() < 1e-9);
        }
        assert!((lay.wrapped_distance(b, a) - d).abs() < 1e-12);
    }
}

use rand::Rng;

#[test]
fn sampled_users_stay_in_their_cell() {
    let lay = HexLayout::new(0.8);
    let mut rng = crate::model::random::seeded_rng(9);
    for c in 0..7 {
        for _ in 0..100 {
            let p = lay.sample_user(c, 0.05, &mut rng);
            let s = lay.site(c);
            let rel_p = [p[0] - s[0], p[1] - s[1]];
            assert!(lay.in_cell(rel_p));
            assert!(rel_p[0].hypot(rel_p[1]) >= 0.05);
            // Closest site (wrapped) is the serving one.
            let own = lay.wrapped_distance(p, s);
            for o in 0..7 {
                assert!(own <= lay.wrapped_distance(p, lay.site(o)) + 1e-12);
            }
        }
    }
}

#[test]
fn isac_compiled_objective_matches_direct_formulas() {
    let s = IsacScenario::generate(&small_isac(), 5).unwrap();
    let p = compile_isac(&s).unwrap();
    assert_eq!(p.num_ratios(), 3);
    for seed in 0..5 {
        let v = s.random_precoders(seed);
        let direct = isac_objective(&s, &v).unwrap();
        let compiled = objective(&p, &v).unwrap();
        assert!(rel(direct, compiled) < 1e-10, "{direct} vs {compiled}");
    }
}

#[test]
fn fisher_information_oracle_and_phase_invariance() {
    let s = IsacScenario::generate(&small_isac(), 2).unwrap();
    let v = s.random_precoders(4);
    let j = fisher_information(&s, &v[0], &v[1]).unwrap();
    // Independent route: explicit inverse by LU.
    let gv = s.g.matmul(&v[1]);
    let q = CMat::identity(gv.rows()).scale(s.radar_noise).add(&gv.matmul(&gv.adjoint()));
    let qi = crate::testkit::lu_inverse(&q).unwrap();
    let av = s.a_dot.matmul(&v[0]);
    let oracle = s.alpha * av.adj_mul(&qi.matmul(&av))[(0, 0)].re;
    assert!(rel(j, oracle) < 1e-9);
    let rot = C::from_polar(1.0, 1.234);
    let j2 = fisher_information(&s, &v[0].cscale(rot), &v[1].cscale(rot.conj())).unwrap();
    assert!(rel(j, j2) < 1e-12);
    assert!(j > 0.0);
}

#[test]
fn zero_weights_leave_only_sensing() {
    let params = IsacParams { sinr_weights: [0.0, 0.0], ..small_isac() };
    let s = IsacScenario::generate(&params, 8).unwrap();
    let p = compile_isac(&s).unwrap();
    assert_eq!(p.num_ratios(), 1);
    let v = s.random_precoders(1);
    assert!(rel(objective(&p, &v).unwrap(), fisher_information(&s, &v[0], &v[1]).unwrap()) < 1e-10);
}

#[test]
fn specialized_isac_steps_match_generic_steps() {
    let s = IsacScenario::generate(&small_isac(), 11).unwrap();
    let p = compile_isac(&s).unwrap();
    let mut v = s.random_precoders(2);
    for _ in 0..5 {
        let a = isac_step_conventional(&s, &v, 1e-12).unwrap();
        let b = step_conventional(&p, &v, 1e-12).unwrap();
        let scale = a.norm();
        assert!(a.max_abs_diff(&b) <= 1e-9 * scale, "conventional {}", a.max_abs_diff(&b) / scale);
        let c = isac_step_nonhomogeneous(&s, &v, SpectralMode::Frobenius).unwrap();
        let d = step_nonhomogeneous(&p, &v, SpectralMode::Frobenius).unwrap();
        assert!(c.max_abs_diff(&d) <= 1e-9 * c.norm());
        v = a;
    }
}

#[test]
fn isac_solvers_increase_the_objective() {
    let s = IsacScenario::generate(&small_isac(), 12).unwrap();
    let opts = SolverOptions::with_iters(30, 1e-15);
    for id in [SolverId::Conventional, SolverId::Nonhomogeneous] {
        let tr = solve_isac(&s, id, None, &opts).unwrap();
        let objs = tr.objectives();
        assert!(objs.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)), "{id}");
        assert!(tr.final_objective() > tr.initial_objective);
        assert!(p_feasible(&s, &tr.final_iterate));
    }
}

fn p_feasible(s: &IsacScenario, v: &Blocks<f64>) -> bool {
    v.iter().all(|b| b.norm_sq() <= s.power * (1.0 + 1e-9))
}

#[test]
fn mimo_generation_is_deterministic() {
    let params = small_mimo(3, 2);
    let a = MimoNetwork::generate(&params, 42).unwrap();
    let b = MimoNetwork::generate(&params, 42).unwrap();
    let c = MimoNetwork::generate(&params, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.users, c.users);
    assert_eq!(a.random_precoders(1), b.random_precoders(1));
}

#[test]
fn mimo_large_scale_gains_follow_the_path_loss_model() {
    let params = MimoParams { shadowing_std_db: 0.0, ..small_mimo(7, 2) };
    let net = MimoNetwork::generate(&params, 7).unwrap();
    for (u, pos) in net.users.iter().enumerate() {
        for c in 0..7 {
            let d = net.layout.wrapped_distance(*pos, net.layout.site(c));
            let expect = 10f64.powf(-(128.1 + 37.6 * d.log10()) / 10.0);
            assert!(rel(net.gains[u][c], expect) < 1e-12);
        }
        // The serving BS is the nearest one, so without shadowing it is the strongest.
        let own = net.gains[u][u / 2];
        assert!(net.gains[u].iter().all(|&g| g <= own * (1.0 + 1e-12)));
    }
}

#[test]
fn mimo_compiled_rate_matches_direct_rate() {
    let net = MimoNetwork::generate(&small_mimo(3, 2), 1).unwrap();
    let p = compile_mimo(&net).unwrap();
    assert_eq!(p.num_ratios(), 6);
    assert!(p.base().groups().len() == 3);
    for seed in 0..3 {
        let v = net.random_precoders(seed);
        for g in 0..3 {
            let total: f64 = (0..2).map(|q| v[g * 2 + q].norm_sq()).sum();
            assert!(rel(total, net.power) < 1e-12);
        }
        let direct = mimo_sum_rate(&net, &v).unwrap();
        let compiled = log_objective(&p, &v).unwrap();
        assert!(rel(direct, compiled) < 1e-10);
    }
}

#[test]
fn single_link_reaches_the_beamforming_capacity() {
    let params = MimoParams { shadowing_std_db: 0.0, ..small_mimo(1, 1) };
    let net = MimoNetwork::generate(&params, 3).unwrap();
    let h = &net.channels[0][0];
    let lam = hermitian_eigenvalues(&h.adj_mul(h)).into_iter().fold(f64::MIN, f64::max);
    let capacity = (net.power * lam / net.noise).ln_1p();
    for id in [SolverId::WmmseClassic, SolverId::GeneralizedConventional] {
        let tr = solve_mimo(&net, id, None, &SolverOptions::with_iters(200, 1e-15)).unwrap();
        assert!(rel(tr.final_objective(), capacity) < 1e-8, "{id}: {} vs {capacity}", tr.final_objective());
    }
}

#[test]
fn single_cell_users_without_interference_term() {
    // One cell: interference only comes from co-cell users, never from other sites.
    let net = MimoNetwork::generate(&small_mimo(1, 3), 4).unwrap();
    let p = compile_mimo(&net).unwrap();
    for r in p.base().ratios() {
        assert_eq!(r.terms.len(), 2);
        assert!(r.terms.iter().all(|t| std::sync::Arc::ptr_eq(&t.coeff, &r.numerator)));
    }
    let tr = run_log(&p, &net.random_precoders(0), SolverId::GeneralizedNonhomogeneous, &SolverOptions::with_iters(20, 1e-15)).unwrap();
    assert!(tr.final_objective() >= tr.initial_objective);
}

#[test]
fn steering_edge_examples() {
    let a = steering_vector(PI / 2.0, 2);
    assert!(a.max_abs_diff(&CMat::column_real(&[1.0, -1.0])) < 1e-15);
    let b = steering_vector(FRAC_PI_6, 3);
    assert!(b.max_abs_diff(&CMat::column(vec![C::new(1.0, 0.0), C::new(0.0, -1.0), C::new(-1.0, 0.0)])) < 1e-15);
    assert!(steering_vector(0.77f64, 9).as_slice().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    assert!(steering_derivative(0.3f64, 1, 1).is_zero());
    assert!(steering_derivative(PI / 2.0, 4, 5).max_abs() < 1e-14);
}

#[test]
fn fisher_information_vanishes_without_sensing_beam() {
    let s = IsacScenario::generate(&small_isac(), 2).unwrap();
    let v = s.random_precoders(4);
    assert_eq!(fisher_information(&s, &CMat::zeros(6, 1), &v[1]).unwrap(), 0.0);
    let tiny = IsacParams { tx_antennas: 1, radar_antennas: 1, ..small_isac() };
    let s1 = IsacScenario::generate(&tiny, 2).unwrap();
    let v1 = s1.random_precoders(0);
    assert_eq!(fisher_information(&s1, &v1[0], &v1[1]).unwrap(), 0.0);
}

fn scalar_network(h: f64, power: f64, noise: f64) -> MimoNetwork {
    let params = MimoParams {
        cells: 1,
        users_per_cell: 1,
        tx_antennas: 1,
        rx_antennas: 1,
        ..MimoParams::default()
    };
    MimoNetwork {
        weights: params.weights(),
        params,
        seed: 0,
        layout: HexLayout::new(0.8),
        users: vec![[0.1, 0.0]],
        power,
        noise,
        channels: vec![vec![std::sync::Arc::new(CMat::column_real(&[h]))]],
        gains: vec![vec![h * h]],
    }
}

#[test]
fn scalar_sinr_example() {
    let net = scalar_network(1.0, 2.0, 0.5);
    let v = Blocks(vec![CMat::column_real(&[2f64.sqrt()])]);
    assert!((mimo_sinr(&net, &v, 0, 0).unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(mimo_sinr(&net, &Blocks(vec![CMat::zeros(1, 1)]), 0, 0).unwrap(), 0.0);
    assert!(mimo_sinr(&net, &v, 1, 0).is_err());
}

fn assert_matched_filter(net: &MimoNetwork, id: SolverId, iters: usize) {
    let h = &net.channels[0][0];
    let hn = h.norm_sq();
    let matched = h.adjoint().scale((net.power / hn).sqrt());
    let rate = (net.power * hn / net.noise).ln_1p();
    let tr = solve_mimo(net, id, None, &SolverOptions::with_iters(iters, 1e-15)).unwrap();
    assert!(rel(tr.final_objective(), rate) < 1e-6, "{id}: {} vs {rate}", tr.final_objective());
    let v = &tr.final_iterate[0];
    let phase = matched.inner(v);
    let aligned = v.cscale(phase.conj() / phase.norm());
    assert!(aligned.max_abs_diff(&matched) <= 1e-6 * matched.frobenius(), "{id}");
}

#[test]
fn miso_link_converges_to_matched_filter() {
    let params = MimoParams { rx_antennas: 1, tx_antennas: 5, ..small_mimo(1, 1) };
    let net = MimoNetwork::generate(&params, 21).unwrap();
    // On a single link every method grows the on-channel amplitude by only (1 + 1/SNR) per
    // iteration, and the inverse-free ones shrink the off-channel part at the same rate.
    assert_matched_filter(&net, SolverId::WmmseClassic, 6000);
    assert_matched_filter(&net, SolverId::GeneralizedConventional, 6000);
    let low_snr = MimoNetwork::generate(&MimoParams { noise_dbm: -60.0, ..params }, 21).unwrap();
    assert!(low_snr.power * low_snr.channels[0][0].norm_sq() / low_snr.noise < 10.0);
    assert_matched_filter(&low_snr, SolverId::GeneralizedNonhomogeneous, 3000);
    assert_matched_filter(&low_snr, SolverId::GeneralizedExtrapolated, 3000);
}

#[test]
fn single_weighted_user_reduces_to_one_link() {
    let mut params = small_mimo(2, 2);
    params.shadowing_std_db = 0.0;
    params.user_weights = Some(vec![0.0, 0.0, 1.0, 0.0]);
    let net = MimoNetwork::generate(&params, 6).unwrap();
    let p = compile_mimo(&net).unwrap();
    assert_eq!(p.num_ratios(), 1);
    let h = &net.channels[2][1];
    let lam = hermitian_eigenvalues(&h.adj_mul(h)).into_iter().fold(f64::MIN, f64::max);
    let capacity = (net.power * lam / net.noise).ln_1p();
    let tr = solve_mimo(&net, SolverId::WmmseClassic, None, &SolverOptions::with_iters(300, 1e-15)).unwrap();
    assert!(rel(tr.final_objective(), capacity) < 1e-8);
    for u in [0, 1, 3] {
        assert!(tr.final_iterate[u].norm_sq() < 1e-20, "user {u}");
    }
    params.user_weights = Some(vec![0.0; 4]);
    assert!(MimoNetwork::generate(&params, 6).is_err());
}

#[test]
fn mimo_solvers_agree_at_small_scale() {
    let params = MimoParams { tx_antennas: 8, ..small_mimo(2, 2) };
    let net = MimoNetwork::generate(&params, 2).unwrap();
    let x0 = net.random_precoders(0);
    let finals: Vec<f64> = [SolverId::WmmseClassic, SolverId::GeneralizedNonhomogeneous, SolverId::GeneralizedExtrapolated]
        .into_iter()
        .map(|id| solve_mimo(&net, id, Some(&x0), &SolverOptions::with_iters(3000, 1e-13)).unwrap().final_objective())
        .collect();
    let best = finals.iter().cloned().fold(f64::MIN, f64::max);
    assert!(finals.iter().all(|f| (best - f) / best <= 0.01), "{finals:?}");
}

#[test]
fn vanishing_budget_gives_vanishing_objective() {
    let params = IsacParams { power_dbm: -90.0, ..small_isac() };
    let s = IsacScenario::generate(&params, 3).unwrap();
    let tr = solve_isac(&s, SolverId::Conventional, None, &SolverOptions::with_iters(5, 1e-12)).unwrap();
    let full = solve_isac(&IsacScenario::generate(&small_isac(), 3).unwrap(), SolverId::Conventional, None, &SolverOptions::with_iters(5, 1e-12)).unwrap();
    assert!(tr.final_objective() < 1e-10 * full.final_objective());
}
