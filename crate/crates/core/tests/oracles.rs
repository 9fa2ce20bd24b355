//! Golden values computed once by independent evaluators (exact rational
//! arithmetic or elementary formulas) and frozen here.

mod common;

use approx::assert_relative_eq;
use common::*;
use formctl::dynamics::{errors, lyapunov, z21_closed_form, AgentState};
use formctl::gains::{
    admissible_ratio_windows, corollary_quartic, gamma_lower_bound, has_real_root, discriminant_triple,
    stationary_points, GainSchedule,
};
use formctl::geometry::{chi, desired_area_from_distances, heron_area, Orientation};
use formctl::graph::triangles_of;
use formctl::rigidity::{numeric_rank, rigidity_matrix, DEFAULT_RANK_TOL};
use formctl::sim::{simulate, SimOptions, Verdict};
use formctl::{build_lff, Framework, Point, TriangleSides};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Exact evaluation of the symmetric-parameter quartic at (1, 3, 2.1), ratio 12.
const QUARTIC_1_3_21_AT_12: [f64; 5] = [
    -200.0,
    305.183_944_531_818_383_796_051_2,
    639.36,
    -456.729_571_845_047_055_521_061_8,
    -1026.4104,
];

// Largest real root of the discriminant factors for (2, 2.2, 1.9), from
// exact real-root isolation of the expanded polynomials.
const GAMMA_BAR_2_22_19: f64 = 6.676_241_305_258_482_6;

// Roots of the discriminant in ratio for (1, 3, 2.1) above 2.
const ROOT_FREE_WINDOW: (f64, f64) = (10.418_880_179_780_114, 13.553_550_524_859_793);

#[test]
fn quartic_golden_coefficients() {
    let q = corollary_quartic(1.0, 3.0, 2.1, 12.0).unwrap();
    let got = [q.a, q.b, q.c, q.d, q.e];
    for (g, want) in got.iter().zip(QUARTIC_1_3_21_AT_12) {
        assert_relative_eq!(*g, want, max_relative = 1e-12);
    }
}

#[test]
fn quartic_matches_follower_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let (d21, d31, d32) = random_triangle(&mut rng, 0.3, 5.0);
        let ratio = rng.gen_range(0.05..40.0);
        let q = corollary_quartic(d21, d32, d31, ratio).unwrap();
        let want = follower_quartic(d21, d31, d32, ratio);
        for (g, w) in [q.a, q.b, q.c, q.d, q.e].iter().zip(want) {
            assert_relative_eq!(*g, w, max_relative = 1e-12, epsilon = 1e-12 * want.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
    }
}

#[test]
fn gamma_bound_golden() {
    let b = gamma_lower_bound(2.0, 2.2, 1.9).unwrap();
    assert_relative_eq!(b.gamma_bar, GAMMA_BAR_2_22_19, max_relative = 1e-9);
    assert_relative_eq!(b.threshold(), GAMMA_BAR_2_22_19, max_relative = 1e-9);
}

#[test]
fn root_free_window_matches_exact_endpoints() {
    let sides = TriangleSides {
        d_ji: 1.0,
        d_ki: 2.1,
        d_kj: 3.0,
    };
    let w = admissible_ratio_windows(sides, 2.0 + 1e-6, 40.0, 0.05).unwrap();
    assert_eq!(w.len(), 1, "{w:?}");
    assert_relative_eq!(w[0].0, ROOT_FREE_WINDOW.0, max_relative = 1e-8);
    assert_relative_eq!(w[0].1, ROOT_FREE_WINDOW.1, max_relative = 1e-8);
    let inside = corollary_quartic(1.0, 3.0, 2.1, 12.0).unwrap();
    assert!(!oracle_has_real_root([inside.a, inside.b, inside.c, inside.d, inside.e]));
    for g in [9.0, 14.5] {
        let q = corollary_quartic(1.0, 3.0, 2.1, g).unwrap();
        assert!(oracle_has_real_root([q.a, q.b, q.c, q.d, q.e]));
        assert!(has_real_root(&q));
    }
}

#[test]
fn discriminant_triple_on_golden_quartic() {
    let q = corollary_quartic(1.0, 3.0, 2.1, 12.0).unwrap();
    let t = discriminant_triple(&q).unwrap();
    assert!(t.lambda > 0.0);
    assert!(!has_real_root(&q));
}

#[test]
fn stationary_points_against_companion_oracle() {
    let s = heron_area(1.0, 2.1, 3.0).unwrap();
    for ratio in [3.0, 8.0, 10.0, 12.0, 13.0, 15.0, 25.0] {
        let pts = stationary_points(1.0, 2.1, 3.0, s, ratio).unwrap();
        let want = follower_quartic(1.0, 2.1, 3.0, ratio);
        let extra = companion_real_roots(&want).len();
        assert!(pts.len() <= 1 + extra, "ratio {ratio}: {pts:?}");
        assert_eq!(pts.len() == 1, extra == 0, "ratio {ratio}: {pts:?}");
        let desired = Point::new((2.1f64.powi(2) - 9.0) / 2.0, 2.0 * s);
        assert!((pts[0] - desired).norm() < 1e-9);
    }
}

#[test]
fn heron_against_embedding() {
    assert_relative_eq!(desired_area_from_distances(3.0, 4.0, 5.0, Orientation::CounterClockwise).unwrap(), 6.0, max_relative = 1e-15);
    assert_relative_eq!(
        desired_area_from_distances(2.0, 2.0, 2.0, Orientation::CounterClockwise).unwrap(),
        SQRT3,
        max_relative = 1e-15
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (a, b, c) = random_triangle(&mut rng, 0.1, 10.0);
        let p = embed_triangle(a, b, c);
        assert_relative_eq!(shoelace(&p), heron_area(a, b, c).unwrap(), max_relative = 1e-9);
    }
}

#[test]
fn rank_against_elimination() {
    let tri = Framework::new(
        build_lff(3, &[(1, 2)]).unwrap(),
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
    )
    .unwrap();
    let r = rigidity_matrix(&tri);
    assert_eq!(r.row(0).iter().copied().collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    assert_eq!(rank_by_elimination(&r, 1e-9), 3);
    assert_eq!(numeric_rank(&r, DEFAULT_RANK_TOL), 3);

    let line = Framework::new(
        build_lff(3, &[(1, 2)]).unwrap(),
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
    )
    .unwrap();
    assert_eq!(rank_by_elimination(&rigidity_matrix(&line), 1e-9), 2);
    assert_eq!(numeric_rank(&rigidity_matrix(&line), DEFAULT_RANK_TOL), 2);

    let chain = chain5_spec().desired_framework();
    assert_eq!(rank_by_elimination(&rigidity_matrix(&chain), 1e-9), 7);
    assert_eq!(numeric_rank(&rigidity_matrix(&chain), DEFAULT_RANK_TOL), 7);
}

#[test]
fn chain_area_vector() {
    let spec = chain5_spec();
    let c = chi(&spec.desired_framework(), &triangles_of(spec.graph()).unwrap()).unwrap();
    assert!(c[0] > 0.0 && c[1] < 0.0 && c[2] > 0.0);
    for v in &c {
        assert_relative_eq!(v.abs(), SQRT3, max_relative = 1e-12);
    }
}

#[test]
fn two_agent_hand_values() {
    let g = build_lff(2, &[]).unwrap();
    let spec = formctl::FormationSpec::from_distances(g, vec![1.0], vec![]).unwrap();
    let gains = GainSchedule::explicit(2, &[1.0], &[0.0]).unwrap();
    let state = AgentState::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)]);
    assert_eq!(errors(&spec, &state.positions).z, vec![3.0]);
    assert_relative_eq!(lyapunov(&spec, &gains, &state).unwrap().total, 2.25);
}

#[test]
fn closed_form_golden() {
    // 1 / (2 e^2 - 1)
    assert_relative_eq!(z21_closed_form(1.0, 1.0, 1.0, 1.0).unwrap(), 0.072_578_883_495_753_84, max_relative = 1e-12);
    assert_eq!(z21_closed_form(1.7, 1.3, 0.4, 0.0).unwrap(), 1.7);
    assert!(z21_closed_form(5.0, 1.0, 1.0, 100.0).unwrap().abs() < 1e-12);
}

#[test]
fn seeded_equilateral_run_is_frozen() {
    let spec = equilateral_spec();
    let gains = GainSchedule::uniform_ratio(3, 1.0, 0.825).unwrap();
    let init = formctl::sim::sample_initial(3, &formctl::sim::SampleBox::square(5.0), 7).unwrap();
    let out = simulate(&spec, &gains, &init, &SimOptions::default()).unwrap();
    assert_eq!(out.verdict, Verdict::ConvergedStrongCongruent);
    assert!(out.final_errors.max_abs() < 1e-6);
    // Regression fixture: the same seed always takes the same number of steps.
    let again = simulate(&spec, &gains, &init, &SimOptions::default()).unwrap();
    assert_eq!(out.steps, again.steps);
    assert_eq!(out.final_state, again.final_state);
}

#[test]
fn closed_form_matches_integration_for_non_unit_distance() {
    let (d, alpha) = (1.7, 0.6);
    let g = build_lff(2, &[]).unwrap();
    let spec = formctl::FormationSpec::from_distances(g, vec![d], vec![]).unwrap();
    let gains = GainSchedule::explicit(2, &[alpha], &[0.0]).unwrap();
    let mut state = AgentState::new(vec![Point::new(0.3, -0.2), Point::new(2.9, 1.1)]);
    let z0 = errors(&spec, &state.positions).z[0];
    assert_relative_eq!(z21_closed_form(z0, d, alpha, 0.0).unwrap(), z0, max_relative = 1e-15);
    let h = 1e-3;
    for step in 1..=3000 {
        state = formctl::dynamics::step_rk4(&spec, &gains, &state, h).unwrap();
        let z = errors(&spec, &state.positions).z[0];
        let want = z21_closed_form(z0, d, alpha, step as f64 * h).unwrap();
        assert!((z - want).abs() < 1e-8, "t = {}: {z} vs {want}", step as f64 * h);
    }
}
