use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::probe::Side;
use super::*;
use crate::geometry::{build_interval, build_lattice_domain, EdgeBc, HoleGeometry, PeriodSpec, WindowSpec};
use crate::reaction::{Nonlinearity, Reaction};

fn interval(n: u32) -> Arc<DomainMask> {
    Arc::new(build_interval(0.0, 1.0, n, EdgeBc::Periodic).unwrap())
}

fn perforated(res: u32, count: [usize; 2]) -> Arc<DomainMask> {
    let period = PeriodSpec::new(vec![1.0, 1.0], res).unwrap();
    let w = WindowSpec::periods(&period, [0, 0], count, [EdgeBc::Periodic, EdgeBc::Periodic]);
    let hole = HoleGeometry::RectHole { center: [0.5, 0.5], size: [0.5, 0.25] };
    Arc::new(build_lattice_domain(hole, period, &w).unwrap())
}

fn cosine_amplitude(u: &Field) -> f64 {
    let n = u.values.len() as f64;
    u.values.iter().enumerate().map(|(k, v)| (v - 0.5) * (TAU * u.mask.fluid_center(k)[0]).cos()).sum::<f64>() * 2.0 / n
}

fn heat_mode_error(n: u32, scheme: Scheme) -> f64 {
    let mask = interval(n);
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::zero(), scheme).unwrap();
    let u0 = Field::from_fn(mask, |x| 0.5 + 0.1 * (TAU * x[0]).cos());
    let t_end = 0.1;
    let cfg = SolverConfig { scheme, ..SolverConfig::explicit(t_end, t_end) };
    let probes = ProbeSet::new(st.mask(), &[]);
    let (u, _) = run(u0, &mut st, &cfg, &probes).unwrap();
    let exact = 0.1 * (-(TAU * TAU) * t_end).exp();
    (cosine_amplitude(&u) - exact).abs() / exact
}

#[test]
fn constant_is_steady_without_reaction() {
    let mask = perforated(16, [2, 2]);
    let coeff = Coefficients::from_fn(&mask, |x| ([1.0 + 0.5 * (TAU * x[0]).sin(), 0.0, 2.0], [0.3, -0.2])).unwrap();
    let u = Field::constant(mask, 0.37);
    let dt = Stepper::new(u.mask.clone(), &coeff, &Reaction::zero(), Scheme::ExplicitEuler).unwrap().dt_max();
    let v = step(&u, &coeff, &Reaction::zero(), dt, Scheme::ExplicitEuler).unwrap();
    assert!(v.values.iter().all(|x| *x == 0.37));
}

#[test]
fn heat_mode_decays_at_fourier_rate() {
    let err = heat_mode_error(256, Scheme::ExplicitEuler);
    assert!(err < 0.01, "relative error {err}");
}

#[test]
fn heat_mode_error_is_second_order() {
    let e1 = heat_mode_error(32, Scheme::ExplicitEuler);
    let e2 = heat_mode_error(64, Scheme::ExplicitEuler);
    let e3 = heat_mode_error(128, Scheme::ExplicitEuler);
    for ratio in [e1 / e2, e2 / e3] {
        assert!((ratio - 4.0).abs() < 0.5, "ratios {} {}", e1 / e2, e2 / e3);
    }
}

#[test]
fn imex_heat_mode() {
    let err = heat_mode_error(128, Scheme::ImexDiffusion);
    assert!(err < 0.05, "relative error {err}");
}

#[test]
fn zero_flux_conserves_mass() {
    let mask = perforated(16, [3, 2]);
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut u = Field::from_fn(mask.clone(), |_| rng.gen());
    for scheme in [Scheme::ExplicitEuler, Scheme::ImexDiffusion] {
        let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::zero(), scheme).unwrap();
        let dt = st.auto_dt();
        for _ in 0..50 {
            let m0 = u.mass();
            st.step(&mut u, dt).unwrap();
            assert!((u.mass() - m0).abs() < 1e-10, "{scheme:?}");
        }
    }
}

#[test]
fn uniform_threshold_is_steady() {
    let mask = perforated(16, [2, 2]);
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let f = Reaction::cubic(0.25);
    let mut st = Stepper::new(mask.clone(), &coeff, &f, Scheme::ExplicitEuler).unwrap();
    let probes = ProbeSet::new(&mask, &[("max".into(), Probe::GlobalMax)]);
    let (_, traj) = run(Field::constant(mask, 0.25), &mut st, &SolverConfig::explicit(5.0, 0.5), &probes).unwrap();
    for v in traj.column("max").unwrap() {
        assert!((v - 0.25).abs() < 1e-9);
    }
}

#[test]
fn bistable_front_advances() {
    let mask = Arc::new(build_interval(0.0, 40.0, 20, EdgeBc::Wall).unwrap());
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::cubic(0.25), Scheme::ExplicitEuler).unwrap();
    let u0 = make_front_like(mask.clone(), [1.0, 0.0], 10.0, 2.0);
    let probes = ProbeSet::new(&mask, &[("front".into(), Probe::FrontPosition { level: 0.5, side: Side::Right })]);
    let (_, traj) = run(u0, &mut st, &SolverConfig::explicit(40.0, 5.0), &probes).unwrap();
    let x = traj.column("front").unwrap();
    assert!(x.windows(2).skip(1).all(|w| w[1] > w[0]), "{x:?}");
    // exact speed (1 - 2θ)/√2 for the cubic
    let speed = (x[8] - x[4]) / 20.0;
    assert!((speed - 0.5 / 2f64.sqrt()).abs() < 0.02, "{speed}");
}

fn ordered_pair_stays_ordered(seed: u64, scheme: Scheme) {
    let mask = perforated(16, [1, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qx: f64 = rng.gen_range(-1.0..1.0);
    let coeff = Coefficients::from_fn(&mask, |x| ([1.0 + 0.5 * (TAU * x[1]).cos(), 0.0, 1.0], [qx, 0.5 * (TAU * x[0]).sin()])).unwrap();
    let f = Reaction::new(Nonlinearity::PeriodicCubic { theta_min: 0.2, theta_max: 0.4, period: [1.0, 1.0], scale: 3.0 }).unwrap();
    let mut st = Stepper::new(mask.clone(), &coeff, &f, scheme).unwrap();
    let mut u = Field::from_fn(mask.clone(), |_| rng.gen());
    let mut v = u.clone();
    for x in v.values.iter_mut() {
        *x = (*x + rng.gen_range(0.0..0.3)).min(1.0);
    }
    let dt = st.auto_dt();
    for _ in 0..400 {
        st.step(&mut u, dt).unwrap();
        st.step(&mut v, dt).unwrap();
        for (a, b) in u.values.iter().zip(&v.values) {
            assert!(*a <= *b + 1e-12, "seed {seed}: {a} > {b}");
            assert!(*a >= -1e-12 && *b <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn comparison_principle_on_random_pairs() {
    for seed in 0..200 {
        ordered_pair_stays_ordered(seed, Scheme::ExplicitEuler);
    }
}

#[test]
fn comparison_principle_imex() {
    for seed in 0..20 {
        ordered_pair_stays_ordered(1000 + seed, Scheme::ImexDiffusion);
    }
}

#[test]
fn periodic_data_stays_periodic() {
    let mask = perforated(16, [2, 1]);
    let coeff = Coefficients::from_fn(&mask, |x| ([1.0 + 0.3 * (TAU * x[0]).sin(), 0.0, 1.0], [0.2, 0.0])).unwrap();
    let f = Reaction::new(Nonlinearity::PeriodicCubic { theta_min: 0.2, theta_max: 0.4, period: [1.0, 1.0], scale: 1.0 }).unwrap();
    let mut st = Stepper::new(mask.clone(), &coeff, &f, Scheme::ExplicitEuler).unwrap();
    let mut u = Field::from_fn(mask.clone(), |x| 0.5 + 0.4 * (TAU * x[0]).cos() * (PI * x[1]).sin());
    let dt = st.dt_max();
    for _ in 0..500 {
        st.step(&mut u, dt).unwrap();
    }
    for k in 0..mask.n_fluid() {
        let c = mask.fluid_center(k);
        if c[0] < 1.0 {
            let v = u.at([c[0] + 1.0, c[1]]).unwrap();
            assert!((u.values[k] - v).abs() < 1e-12);
        }
    }
}

#[test]
fn rejects_unstable_step_and_nan() {
    let mask = interval(32);
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::cubic(0.3), Scheme::ExplicitEuler).unwrap();
    let mut u = Field::constant(mask.clone(), 0.5);
    assert!(matches!(st.step(&mut u, 2.0 * st.dt_max()), Err(SolverError::CflViolation { .. })));
    u.values[3] = f64::NAN;
    let dt = st.dt_max();
    assert!(matches!(st.step(&mut u, dt), Err(SolverError::NonFiniteValue { .. })));
}

#[test]
fn cfl_bound_matches_formula() {
    let mask = perforated(16, [2, 2]);
    let coeff = Coefficients::from_fn(&mask, |_| ([2.0, 0.0, 2.0], [0.5, 0.0])).unwrap();
    let st = Stepper::new(mask.clone(), &coeff, &Reaction::zero(), Scheme::ExplicitEuler).unwrap();
    let h = mask.grid.h;
    let bound = CFL_SAFETY * h * h / (2.0 * 2.0 * 2.0 + 0.5 * h);
    assert!((st.dt_max() - bound).abs() < 1e-15 * bound.max(1.0), "{} vs {bound}", st.dt_max());
}

#[test]
fn cross_terms_keep_constants_and_drop_when_not_dominant() {
    let mask = perforated(16, [2, 2]);
    let coeff = Coefficients::from_fn(&mask, |_| ([1.0, 0.4, 1.0], [0.0, 0.0])).unwrap().with_cross_terms(true);
    let st = Stepper::new(mask.clone(), &coeff, &Reaction::zero(), Scheme::ExplicitEuler).unwrap();
    assert!(st.cross_terms_dropped < mask.n_fluid());
    let u = Field::constant(mask.clone(), 0.2);
    assert!(st.residual(&u.values).iter().all(|r| *r == 0.0));
    // u = xy has ∂xy u = 1, so 2 a12 ∂xy = 0.8 away from holes and seams
    let w = Field::from_fn(mask.clone(), |x| x[0] * x[1]);
    let r = st.residual(&w.values);
    let c = mask.cells_in_rect([0.3, 1.05], [0.7, 1.2]);
    assert!(!c.is_empty());
    for k in c {
        assert!((r[k] - 0.8).abs() < 1e-9, "{}", r[k]);
    }
    let bad = Coefficients::from_fn(&mask, |_| ([1.0, 0.6, 0.5], [0.0, 0.0])).unwrap().with_cross_terms(true);
    let st = Stepper::new(mask.clone(), &bad, &Reaction::zero(), Scheme::ExplicitEuler).unwrap();
    assert_eq!(st.cross_terms_dropped, mask.n_fluid());
}

#[test]
fn front_like_ramp() {
    let mask = interval(100);
    let u = make_front_like(mask.clone(), [1.0, 0.0], 0.5, 0.2);
    for (k, v) in u.values.iter().enumerate() {
        let x = mask.fluid_center(k)[0];
        if x < 0.4 {
            assert_eq!(*v, 1.0);
        }
        if x > 0.6 {
            assert_eq!(*v, 0.0);
        }
    }
    assert!(u.values.windows(2).all(|w| w[1] <= w[0]));
    let ind = make_front_like(mask.clone(), [1.0, 0.0], 0.5, 0.0);
    for (k, v) in ind.values.iter().enumerate() {
        assert_eq!(*v, if mask.fluid_center(k)[0] < 0.5 { 1.0 } else { 0.0 });
    }
}

#[test]
fn bump_plateau_support_range() {
    let mask = perforated(32, [3, 3]);
    let u = make_bump(mask.clone(), [1.5, 1.5], 0.6, 0.8);
    let h = mask.grid.h;
    for (k, v) in u.values.iter().enumerate() {
        let c = mask.fluid_center(k);
        let r = (c[0] - 1.5).hypot(c[1] - 1.5);
        if r <= 0.6 {
            assert_eq!(*v, 0.8);
        }
        if r >= 0.6 + h {
            assert_eq!(*v, 0.0);
        }
        assert!((0.0..=0.8).contains(v));
    }
}

#[test]
fn csv_and_pgm_output() {
    let mask = perforated(16, [2, 1]);
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::cubic(0.25), Scheme::ExplicitEuler).unwrap();
    let probes = ProbeSet::new(&mask, &[("max".into(), Probe::GlobalMax), ("min".into(), Probe::GlobalMin)]);
    let cfg = SolverConfig { snapshot_every: Some(0.5), ..SolverConfig::explicit(1.0, 0.25) };
    let (_, traj) = run(make_bump(mask.clone(), [1.0, 0.5], 0.3, 1.0), &mut st, &cfg, &probes).unwrap();
    assert_eq!(traj.len(), 5);
    assert_eq!(traj.snapshots.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    write_probes_csv(&traj, &dir.path().join("p.csv")).unwrap();
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(text.starts_with("time,max,min\n0,"));
    assert_eq!(text.lines().count(), 6);
    let files = write_snapshots(&mask, &traj, dir.path()).unwrap();
    let bytes = std::fs::read(&files[0]).unwrap();
    let header = format!("P5\n{} {}\n255\n", mask.grid.nx, mask.grid.ny);
    assert!(bytes.starts_with(header.as_bytes()));
    assert_eq!(bytes.len(), header.len() + mask.grid.len());
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("snapshots.json")).unwrap()).unwrap();
    assert_eq!(side.as_array().unwrap().len(), 3);
}

#[test]
fn ray_front_of_disc() {
    let period = PeriodSpec::new(vec![1.0, 1.0], 16).unwrap();
    let w = WindowSpec::periods(&period, [-4, -4], [8, 8], [EdgeBc::Wall, EdgeBc::Wall]);
    let mask = Arc::new(build_lattice_domain(HoleGeometry::None, period, &w).unwrap());
    let u = Field::from_fn(mask.clone(), |x| if x[0].hypot(x[1]) < 2.0 { 1.0 } else { 0.0 });
    let p = ProbeSet::new(&mask, &[("r".into(), Probe::RayFront { center: [0.0, 0.0], level: 0.5, directions: 8 })]);
    let r = p.sample(&u)[0];
    assert!((r - 2.0).abs() < 2.0 * mask.grid.h, "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn range_is_preserved(seed in 0u64..10_000, theta in 0.05f64..0.6, qx in -2.0f64..2.0) {
        let mask = perforated(16, [1, 1]);
        let coeff = Coefficients::from_fn(&mask, |_| ([1.0, 0.0, 1.0], [qx, 0.0])).unwrap();
        let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::cubic(theta), Scheme::ExplicitEuler).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = Field::from_fn(mask, |_| if rng.gen_bool(0.3) { rng.gen_range(0.0..=1.0) } else if rng.gen_bool(0.5) { 1.0 } else { 0.0 });
        let dt = st.dt_max();
        for _ in 0..200 {
            st.step(&mut u, dt).unwrap();
            prop_assert!(u.min() >= -1e-12 && u.max() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn ramp_is_monotone(shift in -0.5f64..1.5, width in 0.0f64..0.8) {
        let mask = interval(64);
        let u = make_front_like(mask, [1.0, 0.0], shift, width);
        prop_assert!(u.values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(u.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn tridiagonal_solve_matches_cg() {
    let mask = Arc::new(build_interval(0.0, 4.0, 16, EdgeBc::Wall).unwrap());
    let coeff = Coefficients::from_fn(&mask, |x| ([1.0 + 0.5 * x[0].sin(), 0.0, 1.0], [0.0, 0.0])).unwrap();
    let mut st = Stepper::new(mask.clone(), &coeff, &Reaction::zero(), Scheme::ImexDiffusion).unwrap();
    assert!(st.tridiagonal);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b: Vec<f64> = (0..mask.n_fluid()).map(|_| rng.gen()).collect();
    let mut direct = b.clone();
    st.implicit_diffusion(&mut direct, 0.3).unwrap();
    st.tridiagonal = false;
    let mut cg = b;
    st.implicit_diffusion(&mut cg, 0.3).unwrap();
    for (a, c) in direct.iter().zip(&cg) {
        assert!((a - c).abs() < 1e-10, "{a} vs {c}");
    }
    assert!(!Stepper::new(interval(16), &Coefficients::isotropic(&interval(16), 1.0), &Reaction::zero(), Scheme::ImexDiffusion).unwrap().tridiagonal);
}
