use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{build_lattice_domain, EdgeBc, HoleGeometry, PeriodSpec, WindowSpec};

#[test]
fn theta_of_cubic() {
    let f = Reaction::cubic(0.3);
    let t = compute_theta(&f, 1e-3);
    assert!((t.theta - 0.3).abs() < 1e-6);
    assert!(!t.no_zero_found);
    assert!(t.refinement_change < 1e-5);
}

#[test]
fn theta_of_combustion_is_plateau_edge() {
    let f = Reaction::new(Nonlinearity::Combustion { ignition: 0.4, scale: 1.0 }).unwrap();
    assert!((compute_theta(&f, 1e-3).theta - 0.4).abs() < 1e-6);
    assert_eq!(f.kind, ReactionKind::Combustion);
}

#[test]
fn theta_of_kpp_flags_no_zero() {
    let f = Reaction::new(Nonlinearity::Kpp { scale: 1.0 }).unwrap();
    let t = compute_theta(&f, 1e-3);
    assert!(t.no_zero_found);
    assert_eq!(t.theta, 0.0);
    assert_eq!(f.kind, ReactionKind::Monostable);
}

#[test]
fn theta_of_heterogeneous_cubic_matches_brute_scan() {
    let nl = Nonlinearity::PeriodicCubic { theta_min: 0.2, theta_max: 0.35, period: [1.0, 1.0], scale: 1.0 };
    let f = Reaction::new(nl.clone()).unwrap();
    // brute force: largest s with some x giving f(x,s) <= 0
    let mut brute: f64 = 0.0;
    for i in 0..64 {
        for j in 0..64 {
            let x = [i as f64 / 64.0, j as f64 / 64.0];
            for k in 1..4000 {
                let s = k as f64 / 4000.0;
                if nl.value(x, s) <= 0.0 {
                    brute = brute.max(s);
                }
            }
        }
    }
    let t = compute_theta(&f, 1e-3).theta;
    assert!((t - 0.35).abs() < 1e-6);
    assert!((t - brute).abs() < 1e-3);
    assert_eq!(f.kind, ReactionKind::Bistable);
}

#[test]
fn rectangle_of_plateau() {
    let step = 1e-3;
    let n = 1000;
    let values: Vec<f64> = (1..n).map(|_| 0.1).collect();
    let (area, _, _) = largest_rectangle(&values, step);
    assert!((area - 0.1 * (1.0 - 2.0 * step)).abs() < 1e-12);
}

#[test]
fn rectangle_of_cubic_matches_brute_force() {
    let f = Reaction::cubic(0.25);
    let step = 1e-3;
    let values: Vec<f64> = (1..1000).map(|i| f.nl.min_over_x(i as f64 * step)).collect();
    let (area, _, _) = largest_rectangle(&values, step);
    assert_eq!(area, largest_rectangle_brute(&values, step));
    let est = compute_r(&f, step);
    assert_eq!(est.area, area);
    assert!(est.converged);
    assert!(est.lower > 0.25 && est.upper < 1.0);
}

#[test]
fn rectangle_of_nonpositive_g_is_zero() {
    let values = vec![-1.0, -0.5, 0.0, -0.2];
    assert_eq!(largest_rectangle(&values, 0.1).0, 0.0);
}

#[test]
fn trapezoid_rectangle_is_plateau() {
    let f = Reaction::new(Nonlinearity::Trapezoid { a: 0.25, b: 0.3, c: 0.9, height: 0.1 }).unwrap();
    let r = compute_r(&f, 1e-3);
    assert!((r.area - 0.06).abs() < 1e-9, "{}", r.area);
    assert!((r.lower - 0.3).abs() < 1e-9 && (r.upper - 0.9).abs() < 1e-9);
}

#[test]
fn rectangle_is_invariant_under_spatial_rescaling() {
    let a = Reaction::new(Nonlinearity::PeriodicCubic { theta_min: 0.1, theta_max: 0.3, period: [1.0, 1.0], scale: 1.0 }).unwrap();
    let b = Reaction::new(Nonlinearity::PeriodicCubic { theta_min: 0.1, theta_max: 0.3, period: [3.0, 0.5], scale: 1.0 }).unwrap();
    assert_eq!(compute_r(&a, 1e-3).area, compute_r(&b, 1e-3).area);
}

#[test]
fn mean_positive_quadrature() {
    let period = PeriodSpec::new(vec![1.0, 1.0], 16).unwrap();
    let window = WindowSpec::periods(&period, [0, 0], [2, 1], [EdgeBc::Periodic, EdgeBc::Periodic]);
    let mask = build_lattice_domain(HoleGeometry::None, period.clone(), &window).unwrap();
    // 1D oracle: ∫ s(1-s)(s-θ) at step 1e-6
    let theta: f64 = 0.25;
    let n = 1_000_000;
    let oracle: f64 = (0..n)
        .map(|k| {
            let s = (k as f64 + 0.5) / n as f64;
            s * (1.0 - s) * (s - theta)
        })
        .sum::<f64>()
        / n as f64;
    let v = check_mean_positive(&Reaction::cubic(theta), &mask);
    assert!((v - oracle).abs() < 1e-5, "{v} vs {oracle}");
    let balanced = check_mean_positive(&Reaction::cubic(0.5), &mask);
    assert!(balanced.abs() < 1e-9);
    let comb = Reaction::new(Nonlinearity::Combustion { ignition: 0.5, scale: 1.0 }).unwrap();
    assert!(check_mean_positive(&comb, &mask) > 0.0);
}

#[test]
fn primitive_matches_quadrature() {
    let nls = vec![
        Nonlinearity::cubic(0.3),
        Nonlinearity::Kpp { scale: 2.0 },
        Nonlinearity::Combustion { ignition: 0.2, scale: 1.5 },
        Nonlinearity::Trapezoid { a: 0.25, b: 0.3, c: 0.9, height: 0.1 },
        Nonlinearity::PiecewiseLinear { knots: vec![[0.0, 0.0], [0.3, -0.1], [0.6, 0.2], [1.0, 0.0]] },
    ];
    for nl in nls {
        let f = Reaction::new(nl).unwrap();
        for s in [0.1, 0.27, 0.5, 0.95, 1.0, 1.2, -0.1] {
            let n = 20_000;
            let q: f64 = (0..n).map(|k| f.eval([0.0, 0.0], s * (k as f64 + 0.5) / n as f64)).sum::<f64>() * s / n as f64;
            let p = f.primitive([0.0, 0.0], s);
            assert!((p - q).abs() < 1e-7, "{:?} at {s}: {p} vs {q}", f.nl);
        }
    }
}

#[test]
fn extension_signs() {
    let f = Reaction::cubic(0.25);
    assert!(f.eval([0.0, 0.0], 1.2) < 0.0);
    assert_eq!(f.eval([0.0, 0.0], 0.0), 0.0);
    assert_eq!(f.eval([0.0, 0.0], 1.0), 0.0);
    assert!((f.eval([0.0, 0.0], -0.1) - (-0.1 * f.lipschitz)).abs() < 1e-15);
}

#[test]
fn lipschitz_bounds_sampled_slopes() {
    let f = Reaction::cubic(0.25);
    // exact sup |f'| on [0,1] for s(1-s)(s-θ): max(|f'(0)|, |f'(1)|) = max(θ, 1-θ)
    assert!(f.lipschitz >= 0.75 && f.lipschitz < 0.76);
}

#[test]
fn combustion_minorant_is_dominated() {
    let f = Reaction::cubic(0.25);
    let m = make_combustion_minorant(&f, 0.05, 0.05).unwrap();
    assert_eq!(m.kind, ReactionKind::Combustion);
    assert_eq!(m.eval([0.0, 0.0], 0.25 + 0.025), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        // domination is only required above the dead zone, where min f > 0
        let s: f64 = 0.3 + 0.7 * rng.gen::<f64>();
        assert!(m.eval([0.0, 0.0], s) <= f.nl.min_over_x(s));
        if s > 0.31 && s < 0.999 {
            assert!(m.eval([0.0, 0.0], s) > 0.0);
        }
    }
    assert!(matches!(make_combustion_minorant(&f, 0.8, 0.05), Err(ReactionError::EpsTooLarge { .. })));
}

#[test]
fn combustion_minorant_of_combustion() {
    let f = Reaction::new(Nonlinearity::Combustion { ignition: 0.3, scale: 1.0 }).unwrap();
    let m = make_combustion_minorant(&f, 0.02, 0.05).unwrap();
    assert_eq!(m.kind, ReactionKind::Combustion);
    for k in 0..=1000 {
        let s = k as f64 / 1000.0;
        assert!(m.eval([0.0, 0.0], s) <= f.eval([0.0, 0.0], s));
    }
}

#[test]
fn front_minorant_properties() {
    let f = Reaction::cubic(0.25);
    let m = make_front_minorant(&f, 0.05).unwrap();
    assert!(m.eval(m.lower()).abs() < 1e-15);
    assert!(m.eval(m.upper()).abs() < 1e-12);
    for k in 1..1000 {
        let s = m.lower() + (m.upper() - m.lower()) * k as f64 / 1000.0;
        if s < m.theta {
            assert!(m.eval(s) < m.dominating(s), "s = {s}");
        } else if s > m.theta {
            assert!(m.eval(s) > 0.0 && m.eval(s) <= m.dominating(s) / 1.05 + 1e-15);
        }
    }
    assert!(m.integral() > 0.0);
}

#[test]
fn ode_envelope_behaviour() {
    let f = Reaction::cubic(0.25);
    let eq = ode_envelope(&f, 0.25, 50.0, 0.01, EnvelopeSide::Min);
    assert!(eq.iter().all(|(_, z)| (z - 0.25).abs() < 1e-12));
    let up = ode_envelope(&f, 0.3, 200.0, 0.01, EnvelopeSide::Min);
    assert!(up.windows(2).all(|w| w[1].1 >= w[0].1));
    assert!((up.last().unwrap().1 - 1.0).abs() < 1e-6);
    let down = ode_envelope(&f, 1.2, 50.0, 0.01, EnvelopeSide::Min);
    assert!(down.windows(2).all(|w| w[1].1 <= w[0].1));
    assert!((down.last().unwrap().1 - 1.0).abs() < 1e-6);
}

#[test]
fn tabulated_csv_round_trip() {
    let nl = parse_tabulated("s,f\n0,0\n0.5,-0.01\n0.7,0.05\n1,0\n").unwrap();
    let f = Reaction::new(nl).unwrap();
    assert_eq!(f.kind, ReactionKind::Bistable);
    assert!(matches!(parse_tabulated("0,0\n0.5\n"), Err(ReactionError::Parse { line: 2, .. })));
}

fn piecewise_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #[test]
    fn stack_rectangle_equals_brute_force(knots in piecewise_values(12)) {
        // piecewise-linear g through random knot values, sampled at step 1e-2
        let step = 1e-2;
        let values: Vec<f64> = (1..100).map(|i| {
            let s = i as f64 * step * 11.0;
            let k = (s.floor() as usize).min(10);
            let t = s - k as f64;
            knots[k] * (1.0 - t) + knots[k + 1] * t
        }).collect();
        prop_assert_eq!(largest_rectangle(&values, step).0, largest_rectangle_brute(&values, step));
    }

    #[test]
    fn ode_envelope_is_monotone_in_initial_value(z0 in 0.0f64..1.3, dz in 0.0f64..0.3) {
        let f = Reaction::cubic(0.3);
        let a = ode_envelope(&f, z0, 20.0, 0.05, EnvelopeSide::Min);
        let b = ode_envelope(&f, z0 + dz, 20.0, 0.05, EnvelopeSide::Min);
        for (p, q) in a.iter().zip(&b) {
            prop_assert!(p.1 <= q.1 + 1e-12);
        }
    }

    #[test]
    fn theta_postcondition(theta in 0.05f64..0.9) {
        let f = Reaction::cubic(theta);
        let t = compute_theta(&f, 1e-3).theta;
        let tol = 1e-3;
        prop_assert!(f.nl.min_over_x(t) <= tol);
        for k in 1..200 {
            let s = t + tol + (1.0 - 2.0 * tol - t) * k as f64 / 200.0;
            if s < 1.0 - tol {
                prop_assert!(f.nl.min_over_x(s) > 0.0);
            }
        }
    }
}
