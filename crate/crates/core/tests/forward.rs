mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use richards_core::forward::step_residual;
use richards_core::*;

/// Heat equation on (0, 1) from a linear profile `a + (b − a)z` with the
/// ends held at `top` and `bottom`, by separation of variables.
fn heat_series(z: f64, t: f64, d: f64, (a, b): (f64, f64), (top, bottom): (f64, f64)) -> f64 {
    let c0 = a - top;
    let c1 = (b - a) - (bottom - top);
    let mut s = top + (bottom - top) * z;
    for k in 1..200_000 {
        let kf = k as f64;
        let decay = (-d * kf * kf * PI * PI * t).exp();
        if decay < 1e-20 {
            break;
        }
        let odd = if k % 2 == 1 { 1.0 } else { -1.0 };
        let bk = 2.0 * (c0 * (1.0 + odd) + c1 * odd) / (kf * PI);
        s += bk * decay * (kf * PI * z).sin();
    }
    s
}

fn heat_error(n: usize) -> f64 {
    let (d, horizon) = (1.0, 0.1);
    let (ic_ends, bc) = ((0.3, 0.7), (0.1, 0.9));
    let g = Grid1D::new(1.0, horizon, n, n).unwrap();
    let m = FrozenModel { diffusivity: d, advection: 0.0 };
    let ic: Vec<f64> = (0..n).map(|i| ic_ends.0 + (ic_ends.1 - ic_ends.0) * g.z(i)).collect();
    let data = BoundaryData { top: vec![bc.0; n], bottom: vec![bc.1; n] };
    let s = solve_forward(&m, &g, &ic, &data, &ForwardSettings::default()).unwrap();
    (0..n)
        .map(|i| (s.theta.at(i, n - 1) - heat_series(g.z(i), horizon, d, ic_ends, bc)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn frozen_diffusion_matches_series() {
    let coarse = heat_error(101);
    let fine = heat_error(201);
    assert!(coarse <= 1e-3, "error {coarse}");
    // implicit Euler: the time error dominates and halves
    assert!(coarse / fine > 1.8, "ratio {}", coarse / fine);
}

#[test]
fn constant_state_without_uptake() {
    let mut up = FeddesUptake::standard(70.0);
    up.varphi = 0.0;
    let p = ex1_with(31, 21, up, &PgdConfig::default());
    let c = 0.15;
    let ic = vec![c; 31];
    let bc = BoundaryData { top: vec![c; 21], bottom: vec![c; 21] };
    let s = solve_forward(&p.model, &p.grid, &ic, &bc, &p.settings).unwrap();
    assert!(s.theta.as_slice().iter().all(|&v| (v - c).abs() < 1e-10));
    assert!(s.picard_iterations.iter().skip(1).all(|&k| k <= 2));
}

#[test]
fn ex1_bounds_and_mass_balance() {
    let p = ex1(141, 241);
    let u = vec![0.0; 241];
    let s = p.solve_state(&u).unwrap();
    let (lo, hi) = (EX1_SOIL.theta_r, EX1_SOIL.theta_s - 0.5e-3);
    assert!(s.theta.min() >= lo && s.theta.max() <= hi);
    assert!(!s.saturation_breach());
    assert_eq!(s.total_clamp_events(), 0);
    let r = mass_balance_residual(&p.model, &s);
    assert!(r < 0.01, "mass residual {r}");
    for n in 1..241 {
        assert!(step_residual(&p.model, &s, n) < 1e-4);
    }
}

#[test]
fn mass_balance_improves_under_refinement() {
    let coarse = ex1(71, 61);
    let fine = ex1(141, 121);
    let rc = mass_balance_residual(&coarse.model, &coarse.solve_state(&vec![0.0; 61]).unwrap());
    let rf = mass_balance_residual(&fine.model, &fine.solve_state(&vec![0.0; 121]).unwrap());
    assert!(rf < rc, "coarse {rc}, fine {rf}");
}

#[test]
fn boundary_and_initial_rows_are_exact() {
    let p = ex1(41, 31);
    let mut rng = Lcg(7);
    let u: Vec<f64> = (0..31).map(|_| 0.05 * rng.next()).collect();
    let s = p.solve_state(&u).unwrap();
    let (ic, _) = p.initial_state(u[0]);
    let bc = p.boundary_data(&u).unwrap();
    assert_eq!(s.theta.level(0), &ic[..]);
    for n in 1..31 {
        assert_eq!(s.theta.at(0, n), bc.top[n]);
        assert_eq!(s.theta.at(40, n), bc.bottom[n]);
    }
}

#[test]
fn maximum_principle_and_determinism() {
    let p = berino(61, 41);
    let mut rng = Lcg(11);
    let u: Vec<f64> = (0..41).map(|_| 0.2 * rng.next()).collect();
    let a = p.solve_state(&u).unwrap();
    let b = p.solve_state(&u).unwrap();
    assert_eq!(a, b);
    let (ic, _) = p.initial_state(u[0]);
    let bc = p.boundary_data(&u).unwrap();
    let floor = ic.iter().chain(&bc.top).chain(&bc.bottom).copied().fold(f64::INFINITY, f64::min);
    assert!(a.theta.min() >= floor - 1e-8);
}

#[test]
fn rejects_boundary_outside_range() {
    let p = ex1(21, 11);
    let mut bc = p.boundary_data(&[0.0; 11]).unwrap();
    bc.bottom[3] = EX1_SOIL.theta_s;
    let (ic, _) = p.initial_state(0.0);
    let err = solve_forward(&p.model, &p.grid, &ic, &bc, &p.settings).unwrap_err();
    assert!(matches!(err, Error::InvalidBoundary { level: 3, .. }));
    bc.bottom[3] = EX1_SOIL.theta_r;
    assert!(solve_forward(&p.model, &p.grid, &ic, &bc, &p.settings).is_err());
}

#[test]
fn picard_cap_is_reported() {
    let mut p = ex1(41, 11);
    p.settings.picard_maxit = 1;
    let err = p.solve_state(&[0.1; 11]).unwrap_err();
    assert!(matches!(err, Error::PicardDivergence { level: 1, iterations: 1, .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frozen_steps_solve_the_scheme(d in 0.05f64..5.0, a in 0.0f64..3.0, top in 0.0f64..1.0, bottom in 0.0f64..1.0) {
        let g = Grid1D::new(1.0, 0.2, 21, 11).unwrap();
        let m = FrozenModel { diffusivity: d, advection: a };
        let ic: Vec<f64> = (0..21).map(|i| 0.5 + 0.4 * (7.0 * g.z(i)).sin()).collect();
        let bc = BoundaryData { top: vec![top; 11], bottom: vec![bottom; 11] };
        let s = solve_forward(&m, &g, &ic, &bc, &ForwardSettings::default()).unwrap();
        for n in 1..11 {
            prop_assert!(step_residual(&m, &s, n) < 1e-9);
        }
        // linear M-matrix steps keep values within the data range
        let lo = ic.iter().copied().fold(top.min(bottom), f64::min);
        let hi = ic.iter().copied().fold(top.max(bottom), f64::max);
        prop_assert!(s.theta.min() >= lo - 1e-12 && s.theta.max() <= hi + 1e-12);
    }
}
