#![allow(dead_code)]

use richards_core::*;

pub const EX1_SOIL: HaverkampSoil = HaverkampSoil {
    theta_r: 0.075,
    theta_s: 0.287,
    alpha: 1.611e6,
    beta2: 3.96,
    a: 1.175e6,
    beta1: 4.74,
    k_s: 34.0,
};

pub const BERINO: VanGenuchtenSoil =
    VanGenuchtenSoil { theta_r: 0.0286, theta_s: 0.3658, alpha: 0.0280, n: 2.2390, k_s: 22.5416 };

pub fn ex1(nz: usize, nt: usize) -> ControlProblem {
    ex1_with(nz, nt, FeddesUptake::standard(70.0), &PgdConfig::default())
}

pub fn ex1_with(nz: usize, nt: usize, uptake: FeddesUptake, cfg: &PgdConfig) -> ControlProblem {
    let s = EX1_SOIL;
    ControlProblem::richards(
        SoilModel::Haverkamp(s),
        uptake,
        TrackingTarget::Scaled,
        Grid1D::new(70.0, 3.0, nz, nt).unwrap(),
        InitialProfile::Blend { power: 1 },
        BottomBoundary::Constant(0.9 * s.theta_r + 0.1 * s.theta_s),
        cfg,
    )
    .unwrap()
}

pub fn berino(nz: usize, nt: usize) -> ControlProblem {
    let s = BERINO;
    ControlProblem::richards(
        SoilModel::VanGenuchten(s),
        FeddesUptake::standard(50.0),
        TrackingTarget::Scaled,
        Grid1D::new(50.0, 12.0, nz, nt).unwrap(),
        InitialProfile::Blend { power: 2 },
        BottomBoundary::Linear { start: 0.3 * s.theta_r + 0.7 * s.theta_s, end: 0.1 * s.theta_r + 0.9 * s.theta_s },
        &PgdConfig::default(),
    )
    .unwrap()
}

/// Small deterministic generator for test directions.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn inner(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum()
}

pub fn ex2(nz: usize, nt: usize) -> ControlProblem {
    let s = EX1_SOIL;
    ControlProblem::richards(
        SoilModel::Haverkamp(s),
        FeddesUptake::standard(70.0),
        TrackingTarget::Scaled,
        Grid1D::new(70.0, 3.0, nz, nt).unwrap(),
        InitialProfile::Reflected,
        BottomBoundary::Linear { start: 0.9 * s.theta_r + 0.1 * s.theta_s, end: 0.7 * s.theta_r + 0.3 * s.theta_s },
        &PgdConfig::default(),
    )
    .unwrap()
}
