use cmpairs::dynamics::{flow_rhs_into, integrate_flow, CMState, Flow, Integrator};
use cmpairs::pair_manifold::study::loglog_slope;
use cmpairs::{Complex64, Lattice};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pair_state() -> CMState {
    CMState::new(vec![c(0.1, 0.05), c(0.7, 0.45)], vec![c(0.3, -0.2), c(-0.25, 0.15)]).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

#[test]
fn exponential_flow_closes_the_circle() {
    let tol = 1e-10;
    let traj = Integrator::new(tol)
        .unwrap()
        .integrate(
            |_, y, dy| {
                dy[0] = Complex64::i() * y[0];
                Ok(())
            },
            &[c(1.0, 0.0)],
            std::f64::consts::TAU,
        )
        .unwrap();
    assert!((traj.last_state()[0] - c(1.0, 0.0)).norm() <= 10.0 * tol);
}

#[test]
fn self_convergence_order_on_two_particle_t3_flow() {
    let lat = Lattice::lemniscatic();
    let s0 = pair_state();
    let reference = integrate_flow(&lat, Flow::T3, &s0, 1.0, 1e-14, None).unwrap();
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    let mut tol = 1e-6;
    for _ in 0..5 {
        let tr = integrate_flow(&lat, Flow::T3, &s0, 1.0, tol, None).unwrap();
        steps.push(1.0 / tr.stats.accepted as f64);
        errors.push(max_diff(tr.last_state(), reference.last_state()));
        tol /= 2.0;
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    let order = loglog_slope(&steps, &errors);
    assert!(order >= 4.0, "order {order}, errors {errors:?}");
}

#[test]
fn time_reversal_returns_home() {
    let lat = Lattice::lemniscatic();
    let s0 = pair_state();
    let tol = 1e-10;
    let fwd = integrate_flow(&lat, Flow::T3, &s0, 1.0, tol, None).unwrap();
    let n = s0.n_particles();
    let back = Integrator::new(tol)
        .unwrap()
        .integrate(
            |_, y, dy| {
                let (x, p) = y.split_at(n);
                let (dx, dp) = dy.split_at_mut(n);
                flow_rhs_into(&lat, Flow::T3, x, p, dx, dp)?;
                dy.iter_mut().for_each(|v| *v = -*v);
                Ok(())
            },
            fwd.last_state(),
            1.0,
        )
        .unwrap();
    let err = max_diff(back.last_state(), &s0.to_flat());
    assert!(err <= 10.0 * tol, "round trip error {err:e}");
}

#[test]
fn sampled_and_stepwise_runs_agree_at_the_end() {
    let lat = Lattice::lemniscatic();
    let s0 = pair_state();
    let a = integrate_flow(&lat, Flow::T2, &s0, 0.5, 1e-11, None).unwrap();
    let b = integrate_flow(&lat, Flow::T2, &s0, 0.5, 1e-11, Some(&[0.25, 0.5])).unwrap();
    assert_eq!(b.times, vec![0.25, 0.5]);
    assert!(max_diff(a.last_state(), b.last_state()) < 1e-13);
}
