use chemotaxis::dynamics::{
    reconstruct_v, run, step_uv, step_uw, suggest_dt, Formulation, ModelParams, RunSettings, SimState, StateUV,
    StateUW,
};
use chemotaxis::grid::{integrate, Field, Grid};
use chemotaxis::monitors::MonitorConfig;
use chemotaxis::Error;
use proptest::prelude::*;

fn quiet(t_end: f64) -> RunSettings {
    RunSettings { t_end, monitors: MonitorConfig { enabled: false, ..MonitorConfig::default() }, ..RunSettings::default() }
}

fn data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (8usize..24).prop_flat_map(|n| (prop::collection::vec(0.0f64..4.0, n), prop::collection::vec(0.05f64..2.0, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adaptive_steps_keep_the_order_structure((u0, v0) in data(), chi in 0.1f64..2.0, mu in 0.1f64..2.0) {
        let g = Grid::interval(1.0, u0.len()).unwrap();
        let u = Field::new(g, u0).unwrap();
        let v = Field::new(g, v0).unwrap();
        let v_sup = v.max();
        let params = ModelParams::logistic(chi, 1.0, mu, v.min()).unwrap();
        let mut s = StateUV::new(u, v).unwrap();
        let mut prev_max = v_sup;
        for _ in 0..200 {
            let dt = suggest_dt(&s, &params, 0.2).unwrap();
            let (next, diag) = step_uv(&s, &params, dt).unwrap();
            prop_assert!(diag.diffusion_number + diag.advection_number + diag.source_number <= 1.0);
            prop_assert!(next.u.min() >= 0.0);
            prop_assert!(next.v.min() > 0.0);
            prop_assert!(next.v.max() <= prev_max * (1.0 + 1e-12));
            prev_max = next.v.max();
            s = next;
        }
    }

    #[test]
    fn log_depth_stays_nonnegative((u0, v0) in data(), chi in 0.1f64..2.0) {
        let g = Grid::interval(2.0, u0.len()).unwrap();
        let s0 = StateUW::from_signal(Field::new(g, u0).unwrap(), Field::new(g, v0).unwrap()).unwrap();
        let params = ModelParams::logistic(chi, 1.0, 1.0, 1.0).unwrap();
        let mut s = s0;
        for _ in 0..200 {
            let dt = suggest_dt(&s, &params, 0.2).unwrap();
            s = step_uw(&s, &params, dt).unwrap().0;
            prop_assert!(s.w.min() >= 0.0);
            prop_assert!(s.u.min() >= 0.0);
        }
    }
}

#[test]
fn taxis_alone_conserves_mass() {
    let g = Grid::rectangle(2.0, 1.0, 24, 12).unwrap();
    let u = Field::from_fn(g, |x| 1.0 + (-(x[0] - 1.0).powi(2) * 8.0).exp()).unwrap();
    let v = Field::from_fn(g, |x| 1.0 + 0.5 * (std::f64::consts::PI * x[1]).cos()).unwrap();
    // κ = 0 and a negligible μ leave only the conservative terms
    let params = ModelParams::logistic(0.9, 0.0, 1e-14, v.min()).unwrap();
    let m0 = integrate(&u);
    let out = run(StateUV::new(u, v).unwrap(), &params, &quiet(0.2)).unwrap();
    let clipped = out.trajectory.total_u_clip();
    let m1 = integrate(&out.trajectory.last().u);
    assert!((m1 - m0 - clipped).abs() <= 1e-10 * m0, "mass drift {}", m1 - m0);
}

#[test]
fn homogeneous_data_follow_the_ode() {
    // u stays at κ/μ, v decays like e^{-(κ/μ)t}; error is first order in dt
    let g = Grid::interval(1.0, 8).unwrap();
    let params = ModelParams::logistic(1.0, 2.0, 1.0, 1.0).unwrap();
    let s = StateUV::new(Field::constant(g, 2.0), Field::constant(g, 1.0)).unwrap();
    let settings = RunSettings { fixed_dt: Some(1e-4), ..quiet(1.0) };
    let out = run(s, &params, &settings).unwrap();
    let last = out.trajectory.last();
    assert!((last.u.max() - 2.0).abs() < 1e-12);
    let exact = (-2.0f64).exp();
    assert!((last.v.max() / exact - 1.0).abs() < 1e-3);
}

#[test]
fn formulations_track_each_other() {
    let g = Grid::interval(1.0, 32).unwrap();
    let u = Field::from_fn(g, |x| 1.0 + 0.5 * (std::f64::consts::PI * x[0]).cos()).unwrap();
    let v = Field::from_fn(g, |x| 1.0 + 0.3 * (2.0 * std::f64::consts::PI * x[0]).cos()).unwrap();
    let params = ModelParams::logistic(0.5, 1.0, 1.0, v.min()).unwrap();
    let settings = RunSettings { fixed_dt: Some(2e-4), ..quiet(0.25) };
    let a = run(StateUV::new(u.clone(), v.clone()).unwrap(), &params, &settings).unwrap();
    let b = run(StateUW::from_signal(u, v).unwrap(), &params, &settings).unwrap();
    assert_eq!(a.trajectory.formulation, Formulation::Uv);
    assert_eq!(b.trajectory.formulation, Formulation::Uw);
    let va = &a.trajectory.last().v;
    let vb = &b.trajectory.last().v;
    let gap = va.values().iter().zip(vb.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-3, "gap {gap}");
}

#[test]
fn log_depth_round_trips() {
    let g = Grid::interval(1.0, 16).unwrap();
    let v = Field::from_fn(g, |x| 0.2 + x[0]).unwrap();
    let s = StateUW::from_signal(Field::constant(g, 1.0), v.clone()).unwrap();
    assert_eq!(s.w.min(), 0.0);
    for (a, b) in reconstruct_v(&s).values().iter().zip(v.values()) {
        assert!((a - b).abs() <= 1e-14 * b);
    }
    assert_eq!(s.log_depth().map(|w| w.max()), Some(s.w.max()));
}

#[test]
fn oversized_step_is_refused() {
    let g = Grid::interval(1.0, 16).unwrap();
    let params = ModelParams::logistic(1.0, 1.0, 1.0, 1.0).unwrap();
    let s = StateUV::new(Field::constant(g, 1.0), Field::constant(g, 1.0)).unwrap();
    let dt = suggest_dt(&s, &params, 1.0).unwrap();
    assert!(matches!(step_uv(&s, &params, 2.0 * dt), Err(Error::CflViolation { .. })));
}

#[test]
fn invalid_initial_data_is_rejected() {
    let g = Grid::interval(1.0, 4).unwrap();
    let u = Field::constant(g, 1.0);
    assert!(matches!(StateUV::new(u.clone(), Field::constant(g, 0.0)), Err(Error::InvalidInitialData(_))));
    let neg = Field::new(g, vec![1.0, -0.1, 1.0, 1.0]).unwrap();
    assert!(matches!(StateUV::new(neg, Field::constant(g, 1.0)), Err(Error::InvalidInitialData(_))));
    assert!(ModelParams::logistic(0.0, 1.0, 1.0, 1.0).is_err());
    assert!(ModelParams::logistic(1.0, 1.0, 1.0, 1.0).unwrap().with_alpha(1.5).is_err());
}
