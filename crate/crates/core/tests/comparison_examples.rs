use std::sync::Arc;

use chemotaxis::comparison::{canonical_barriers, running_sup_u, verify_ordering, Candidate, EvolutionProblem, OrderingTolerance};
use chemotaxis::dynamics::{run, ModelParams, RunSettings, StateUV, StateUW};
use chemotaxis::grid::{Field, Grid};
use chemotaxis::Error;
use proptest::prelude::*;

fn short_run_uv() -> chemotaxis::dynamics::RunOutcome {
    let g = Grid::rectangle(2.0, 2.0, 16, 16).unwrap();
    let u = Field::from_fn(g, |x| 0.5 + 2.0 * (-((x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2)) * 4.0).exp()).unwrap();
    let v = Field::from_fn(g, |x| 1.0 + 0.5 * (std::f64::consts::PI * x[0] / 2.0).cos()).unwrap();
    let params = ModelParams::logistic(0.8, 1.0, 0.5, v.min()).unwrap();
    run(StateUV::new(u, v).unwrap(), &params, &RunSettings { t_end: 0.5, ..RunSettings::default() }).unwrap()
}

#[test]
fn canonical_barriers_hold_along_a_simulation() {
    let out = short_run_uv();
    let pairs = canonical_barriers(&out.trajectory);
    let names: Vec<&str> = pairs.iter().map(|p| p.name).collect();
    assert_eq!(names, ["u_nonnegative", "v_lower_exponential", "v_upper_constant"]);
    for pair in &pairs {
        let rep = pair.verify(OrderingTolerance::absolute(1e-6)).unwrap();
        assert!(rep.passed(), "{}: {}", pair.name, rep.min_gap);
        assert_eq!(rep.samples, out.trajectory.snapshots.len());
    }
}

#[test]
fn canonical_barriers_hold_in_log_depth_form() {
    let g = Grid::interval(4.0, 64).unwrap();
    let u = Field::from_fn(g, |x| 1.0 + (-(x[0] - 2.0).powi(2)).exp()).unwrap();
    let v = Field::from_fn(g, |x| 1.0 + 0.5 * (std::f64::consts::PI * x[0] / 4.0).cos()).unwrap();
    let params = ModelParams::logistic(1.5, 1.0, 0.5, v.min()).unwrap();
    let out = run(StateUW::from_signal(u, v).unwrap(), &params, &RunSettings { t_end: 1.0, ..RunSettings::default() }).unwrap();
    for pair in canonical_barriers(&out.trajectory) {
        assert!(pair.verify(OrderingTolerance::absolute(1e-6)).unwrap().passed(), "{}", pair.name);
    }
}

#[test]
fn running_sup_is_nondecreasing() {
    let out = short_run_uv();
    let c = running_sup_u(&out.trajectory);
    assert_eq!(c.len(), out.trajectory.snapshots.len());
    assert!(c.windows(2).all(|w| w[1] >= w[0]));
    assert!(c[0] >= out.trajectory.initial().u.max());
}

#[test]
fn slack_grows_with_time() {
    let tol = OrderingTolerance { absolute: 1e-8, per_unit_time: 1e-3 };
    assert_eq!(tol.at(0.0), 1e-8);
    assert!((tol.at(2.0) - (1e-8 + 2e-3)).abs() < 1e-18);
    let g = Grid::interval(1.0, 4).unwrap();
    let p = EvolutionProblem::heat(g, 1.0);
    // a crossing of 5e-4 at t = 1 is inside the slack
    let sub = Candidate::ClosedForm(Arc::new(|t, _| t * 5e-4));
    let rep = verify_ordering(&p, &[0.0, 1.0], &sub, &Candidate::constant(0.0), tol).unwrap();
    assert!(rep.passed());
    let strict = verify_ordering(&p, &[0.0, 1.0], &sub, &Candidate::constant(0.0), OrderingTolerance::default()).unwrap();
    assert!(!strict.passed());
}

#[test]
fn malformed_inputs_are_rejected() {
    let g = Grid::interval(1.0, 4).unwrap();
    let p = EvolutionProblem::heat(g, 1.0);
    let zero = Candidate::constant(0.0);
    let tol = OrderingTolerance::default();
    assert!(matches!(verify_ordering(&p, &[], &zero, &zero, tol), Err(Error::InvalidParams(_))));
    assert!(matches!(verify_ordering(&p, &[0.5, 0.2], &zero, &zero, tol), Err(Error::InvalidParams(_))));
    assert!(matches!(verify_ordering(&p, &[0.0, 2.0], &zero, &zero, tol), Err(Error::InvalidParams(_))));
    let short = Candidate::Sampled(vec![Field::zeros(g)]);
    assert!(matches!(verify_ordering(&p, &[0.0, 0.5], &short, &zero, tol), Err(Error::LengthMismatch { .. })));
}

proptest! {
    #[test]
    fn negation_is_symmetric(a in -2.0f64..2.0, b in -2.0f64..2.0, slope in -1.0f64..1.0) {
        let g = Grid::interval(1.0, 6).unwrap();
        let p = EvolutionProblem::heat(g, 1.0);
        let times = [0.0, 0.25, 0.5, 1.0];
        let (lo, hi) = (a.min(b), a.max(b));
        let sub = Candidate::ClosedForm(Arc::new(move |t, x| lo + slope * t * x[0]));
        let sup = Candidate::constant(hi);
        let tol = OrderingTolerance::default();
        let direct = verify_ordering(&p, &times, &sub, &sup, tol).unwrap();
        let mirrored = verify_ordering(&p, &times, &sup.negated(), &sub.negated(), tol).unwrap();
        prop_assert_eq!(direct.passed(), mirrored.passed());
        prop_assert!((direct.min_gap - mirrored.min_gap).abs() <= 1e-12);
    }
}
