//! Soil hydraulic constitutive relations.
//!
//! Two families are supported, both parametrised by the residual and
//! saturated water contents `θ_r < θ_S`:
//!
//! * Haverkamp: `θ(h) = θ_r + α(θ_S − θ_r)/(α + |h|^β₂)`,
//!   `K(h) = K_S·A/(A + |h|^β₁)`;
//! * Van Genuchten–Mualem: `θ(h) = θ_r + (θ_S − θ_r)(1 + |αh|ⁿ)^(−m)`,
//!   `K(h) = K_S·φ^(m/2)·[1 − (1 − φ)^m]²` with `φ = 1/(1 + |αh|ⁿ)` and
//!   `m = 1 − 1/n`.
//!
//! Pressure heads are in cm and negative in the unsaturated zone. The water
//! diffusivity is `β(θ) = K(h)/C(h)` with `C = dθ/dh`. A soil is
//! *quasi-unsaturated* when `β` blows up at `θ_S`, which holds iff `β₂ > 1`
//! (Haverkamp) or `n > 1` (Van Genuchten).
//!
//! The public functions validate their argument. The solvers call the
//! `pub(crate)` raw evaluators on already-clamped values.

use alloc::vec::Vec;
use core::fmt;

use crate::math::{abs, exp, exp_m1, ln, ln_1p, powf};
use crate::{Error, Result};

/// Haverkamp retention and conductivity parameters (cm, h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaverkampSoil {
    pub theta_r: f64,
    pub theta_s: f64,
    pub alpha: f64,
    pub beta2: f64,
    pub a: f64,
    pub beta1: f64,
    pub k_s: f64,
}

/// Van Genuchten–Mualem parameters. `alpha` is in 1/cm, `k_s` in cm/h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanGenuchtenSoil {
    pub theta_r: f64,
    pub theta_s: f64,
    pub alpha: f64,
    pub n: f64,
    pub k_s: f64,
}

impl VanGenuchtenSoil {
    /// Mualem exponent `m = 1 − 1/n`.
    #[inline]
    pub fn m(&self) -> f64 {
        1.0 - 1.0 / self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SoilModel {
    Haverkamp(HaverkampSoil),
    VanGenuchten(VanGenuchtenSoil),
}

/// Truncation margin `ε` for the water diffusivity: `β_ε(θ) = β(min(θ, θ_S − ε))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusivityRegularization {
    pub epsilon: f64,
}

impl DiffusivityRegularization {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    pub fn validate_for(&self, soil: &SoilModel) -> Result<()> {
        let span = soil.theta_s() - soil.theta_r();
        if self.epsilon > 0.0 && self.epsilon < span {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "regularization epsilon = {} must lie in (0, theta_s - theta_r = {})",
                self.epsilon,
                span
            )))
        }
    }
}

/// Outcome of [`SoilModel::validate_quasi_unsaturated`]: the list of violated
/// conditions, empty when the parameter set is admissible.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidityReport {
    pub violations: Vec<&'static str>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn names(&self, condition: &str) -> bool {
        self.violations.contains(&condition)
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        f.write_str("violated ")?;
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(v)?;
        }
        Ok(())
    }
}

impl SoilModel {
    pub fn theta_r(&self) -> f64 {
        match self {
            SoilModel::Haverkamp(s) => s.theta_r,
            SoilModel::VanGenuchten(s) => s.theta_r,
        }
    }

    pub fn theta_s(&self) -> f64 {
        match self {
            SoilModel::Haverkamp(s) => s.theta_s,
            SoilModel::VanGenuchten(s) => s.theta_s,
        }
    }

    pub fn k_s(&self) -> f64 {
        match self {
            SoilModel::Haverkamp(s) => s.k_s,
            SoilModel::VanGenuchten(s) => s.k_s,
        }
    }

    /// Checks positivity invariants and the family-specific exponent
    /// condition. Never fails; every violated condition is listed.
    pub fn validate_quasi_unsaturated(&self) -> ValidityReport {
        let mut violations = Vec::new();
        let mut check = |ok: bool, name: &'static str| {
            if !ok {
                violations.push(name);
            }
        };
        let (tr, ts) = (self.theta_r(), self.theta_s());
        check(tr >= 0.0, "theta_r>=0");
        check(tr < ts, "theta_r<theta_s");
        check(ts < 1.0, "theta_s<1");
        check(self.k_s() > 0.0, "k_s>0");
        match self {
            SoilModel::Haverkamp(s) => {
                check(s.alpha > 0.0, "alpha>0");
                check(s.a > 0.0, "a>0");
                check(s.beta1 > 0.0, "beta1>0");
                check(s.beta2 > 1.0, "beta2>1");
            }
            SoilModel::VanGenuchten(s) => {
                check(s.alpha > 0.0, "alpha>0");
                check(s.n > 1.0, "n>1");
            }
        }
        ValidityReport { violations }
    }

    /// Returns the soil unchanged if it is admissible.
    pub fn checked(self) -> Result<Self> {
        let report = self.validate_quasi_unsaturated();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InadmissibleSoil(report))
        }
    }

    fn check_head(h: f64) -> Result<()> {
        if h > 0.0 || h.is_nan() {
            Err(Error::PositiveHead(h))
        } else {
            Ok(())
        }
    }

    fn check_open(&self, theta: f64) -> Result<()> {
        let (lower, upper) = (self.theta_r(), self.theta_s());
        if theta > lower && theta < upper {
            Ok(())
        } else {
            Err(Error::WaterContentOutOfRange { value: theta, lower, upper })
        }
    }

    /// Retention curve `θ(h)`.
    pub fn water_content(&self, h: f64) -> Result<f64> {
        Self::check_head(h)?;
        Ok(self.theta_raw(h))
    }

    /// Inverse retention curve `h(θ)` for `θ_r < θ < θ_S`.
    pub fn pressure_head(&self, theta: f64) -> Result<f64> {
        self.check_open(theta)?;
        Ok(self.head_raw(theta))
    }

    pub fn hydraulic_conductivity(&self, h: f64) -> Result<f64> {
        Self::check_head(h)?;
        Ok(self.k_raw(h))
    }

    /// Specific water capacity `C(h) = dθ/dh`, defined for `h < 0`.
    pub fn specific_capacity(&self, h: f64) -> Result<f64> {
        Self::check_head(h)?;
        if h == 0.0 {
            return Err(Error::SingularHead(h));
        }
        Ok(self.c_raw(h))
    }

    /// `K` as a function of water content.
    pub fn conductivity_of_theta(&self, theta: f64) -> Result<f64> {
        self.check_open(theta)?;
        Ok(self.k_raw(self.head_raw(theta)))
    }

    /// Water diffusivity `β(θ) = K/C`.
    pub fn diffusivity(&self, theta: f64) -> Result<f64> {
        self.check_open(theta)?;
        Ok(self.diffusivity_raw(theta))
    }

    /// `dβ/dθ`.
    pub fn diffusivity_slope(&self, theta: f64) -> Result<f64> {
        self.check_open(theta)?;
        Ok(self.diffusivity_slope_raw(theta))
    }

    /// Truncated diffusivity `β_ε`. Accepts any `θ > θ_r`, including values
    /// at or above `θ_S`.
    pub fn diffusivity_regularized(&self, reg: &DiffusivityRegularization, theta: f64) -> Result<f64> {
        reg.validate_for(self)?;
        if !(theta > self.theta_r()) {
            return Err(Error::WaterContentOutOfRange {
                value: theta,
                lower: self.theta_r(),
                upper: f64::INFINITY,
            });
        }
        let cap = self.theta_s() - reg.epsilon;
        Ok(self.diffusivity_raw(if theta <= cap { theta } else { cap }))
    }

    /// `dK/dθ = (dK/dh)/C`.
    pub fn dk_dtheta(&self, theta: f64) -> Result<f64> {
        self.check_open(theta)?;
        Ok(self.dk_dtheta_raw(theta))
    }

    // Raw evaluators. Callers guarantee h <= 0 and θ_r < θ < θ_S.

    pub(crate) fn theta_raw(&self, h: f64) -> f64 {
        let s = abs(h);
        match self {
            SoilModel::Haverkamp(p) => {
                p.theta_r + p.alpha * (p.theta_s - p.theta_r) / (p.alpha + powf(s, p.beta2))
            }
            SoilModel::VanGenuchten(p) => {
                let x = powf(p.alpha * s, p.n);
                p.theta_r + (p.theta_s - p.theta_r) * exp(-p.m() * ln_1p(x))
            }
        }
    }

    pub(crate) fn head_raw(&self, theta: f64) -> f64 {
        match self {
            SoilModel::Haverkamp(p) => {
                // |h|^β₂ = α(θ_S − θ)/(θ − θ_r), written without cancellation near θ_S
                let ratio = p.alpha * (p.theta_s - theta) / (theta - p.theta_r);
                -powf(ratio, 1.0 / p.beta2)
            }
            SoilModel::VanGenuchten(p) => {
                let span = p.theta_s - p.theta_r;
                let se = (theta - p.theta_r) / span;
                let ln_se = if se < 0.5 { ln(se) } else { ln_1p(-(p.theta_s - theta) / span) };
                let x = exp_m1(-ln_se / p.m());
                -powf(x, 1.0 / p.n) / p.alpha
            }
        }
    }

    pub(crate) fn k_raw(&self, h: f64) -> f64 {
        let s = abs(h);
        match self {
            SoilModel::Haverkamp(p) => p.k_s * p.a / (p.a + powf(s, p.beta1)),
            SoilModel::VanGenuchten(p) => {
                let m = p.m();
                let x = powf(p.alpha * s, p.n);
                if x == 0.0 {
                    return p.k_s;
                }
                let lp = ln_1p(x);
                let b = -exp_m1(-m * ln_1p(1.0 / x));
                p.k_s * exp(-0.5 * m * lp) * b * b
            }
        }
    }

    pub(crate) fn c_raw(&self, h: f64) -> f64 {
        let s = abs(h);
        match self {
            SoilModel::Haverkamp(p) => {
                let d = p.alpha + powf(s, p.beta2);
                p.alpha * (p.theta_s - p.theta_r) * p.beta2 * powf(s, p.beta2 - 1.0) / (d * d)
            }
            SoilModel::VanGenuchten(p) => {
                let m = p.m();
                let x = powf(p.alpha * s, p.n);
                (p.theta_s - p.theta_r) * m * p.n * p.alpha * powf(p.alpha * s, p.n - 1.0)
                    * exp(-(m + 1.0) * ln_1p(x))
            }
        }
    }

    /// `d ln K / dh`.
    pub(crate) fn dlnk_dh(&self, h: f64) -> f64 {
        let s = abs(h);
        match self {
            SoilModel::Haverkamp(p) => p.beta1 * powf(s, p.beta1 - 1.0) / (p.a + powf(s, p.beta1)),
            SoilModel::VanGenuchten(p) => {
                let m = p.m();
                let x = powf(p.alpha * s, p.n);
                let phi = 1.0 / (1.0 + x);
                let g = p.n * x / s;
                let b = -exp_m1(-m * ln_1p(1.0 / x));
                // (1 − φ)^(m−1)
                let one_minus_phi_pow = exp(-(m - 1.0) * ln_1p(1.0 / x));
                phi * g * (0.5 * m + 2.0 * m * one_minus_phi_pow * phi / b)
            }
        }
    }

    /// `d ln C / dh`.
    pub(crate) fn dlnc_dh(&self, h: f64) -> f64 {
        let s = abs(h);
        match self {
            SoilModel::Haverkamp(p) => {
                let sb = powf(s, p.beta2);
                -((p.beta2 - 1.0) / s - 2.0 * p.beta2 * sb / (s * (p.alpha + sb)))
            }
            SoilModel::VanGenuchten(p) => {
                let m = p.m();
                let x = powf(p.alpha * s, p.n);
                let phi = 1.0 / (1.0 + x);
                -((p.n - 1.0) / s - (m + 1.0) * phi * p.n * x / s)
            }
        }
    }

    pub(crate) fn diffusivity_raw(&self, theta: f64) -> f64 {
        let h = self.head_raw(theta);
        self.k_raw(h) / self.c_raw(h)
    }

    pub(crate) fn diffusivity_slope_raw(&self, theta: f64) -> f64 {
        let h = self.head_raw(theta);
        let c = self.c_raw(h);
        let beta = self.k_raw(h) / c;
        beta * (self.dlnk_dh(h) - self.dlnc_dh(h)) / c
    }

    pub(crate) fn dk_dtheta_raw(&self, theta: f64) -> f64 {
        let h = self.head_raw(theta);
        self.k_raw(h) * self.dlnk_dh(h) / self.c_raw(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ex1() -> SoilModel {
        SoilModel::Haverkamp(HaverkampSoil {
            theta_r: 0.075,
            theta_s: 0.287,
            alpha: 1.611e6,
            beta2: 3.96,
            a: 1.175e6,
            beta1: 4.74,
            k_s: 34.0,
        })
    }

    fn berino() -> SoilModel {
        SoilModel::VanGenuchten(VanGenuchtenSoil {
            theta_r: 0.0286,
            theta_s: 0.3658,
            alpha: 0.0280,
            n: 2.2390,
            k_s: 22.5416,
        })
    }

    fn glendale() -> SoilModel {
        SoilModel::VanGenuchten(VanGenuchtenSoil {
            theta_r: 0.1060,
            theta_s: 0.4686,
            alpha: 0.0104,
            n: 1.3954,
            k_s: 0.5458,
        })
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn sweep(soil: &SoilModel, margin: f64, count: usize) -> impl Iterator<Item = f64> {
        let lo = soil.theta_r() + margin;
        let hi = soil.theta_s() - margin;
        (0..count).map(move |k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
    }

    #[test]
    fn saturation_and_residual_limits() {
        let soil = ex1();
        assert_eq!(soil.water_content(0.0).unwrap(), 0.287);
        let dry = soil.water_content(-1e12).unwrap();
        assert!((dry - 0.075).abs() < 1e-12);
        assert!(soil.water_content(1.0).is_err());
    }

    // Regression constants from an independent 40-digit mpmath evaluation.
    #[test]
    fn closed_form_values() {
        let vg = berino();
        assert!(rel(vg.water_content(-100.0).unwrap(), 0.117_933_189_851_208_52) < 1e-13);
        assert!(rel(glendale().water_content(-100.0).unwrap(), 0.401_606_852_727_847_07) < 1e-13);
        let soil = ex1();
        assert!(rel(soil.water_content(-100.0).unwrap(), 0.079_028_099_602_088_565) < 1e-13);
        assert!(rel(soil.hydraulic_conductivity(-1000.0).unwrap(), 2.407_225_529_323_721_6e-7) < 1e-12);
        assert!(rel(soil.specific_capacity(-200.0).unwrap(), 5.211_196_716_148_847e-6) < 1e-12);
        let theta = soil.water_content(-100.0).unwrap();
        assert!(rel(soil.diffusivity(theta).unwrap(), 84.505_243_125_237_65) < 1e-10);
        let mid = 0.5 * (0.075 + 0.287);
        assert!(rel(soil.pressure_head(mid).unwrap(), -36.935_873_044_363_73) < 1e-12);
    }

    #[test]
    fn saturated_conductivity() {
        assert_eq!(ex1().hydraulic_conductivity(0.0).unwrap(), 34.0);
        assert_eq!(glendale().hydraulic_conductivity(0.0).unwrap(), 0.5458);
    }

    #[test]
    fn pressure_head_rejects_endpoints() {
        let soil = ex1();
        assert!(soil.pressure_head(0.287).is_err());
        assert!(soil.pressure_head(0.075).is_err());
        assert!(soil.pressure_head(f64::NAN).is_err());
        assert!(soil.diffusivity(0.3).is_err());
        assert!(soil.specific_capacity(0.0).is_err());
    }

    #[test]
    fn round_trip_through_head() {
        for soil in [ex1(), berino(), glendale()] {
            let theta = soil.water_content(-50.0).unwrap();
            assert!(rel(soil.pressure_head(theta).unwrap(), -50.0) < 1e-10);
            for theta in sweep(&soil, 1e-6, 1000) {
                let back = soil.water_content(soil.pressure_head(theta).unwrap()).unwrap();
                assert!(rel(back, theta) < 1e-10, "{theta} -> {back}");
            }
        }
    }

    #[test]
    fn haverkamp_inverse_matches_closed_form() {
        let p = match ex1() {
            SoilModel::Haverkamp(p) => p,
            _ => unreachable!(),
        };
        let theta = 0.5 * (p.theta_r + p.theta_s);
        let expected = (p.alpha * (p.theta_s - p.theta_r) / (theta - p.theta_r) - p.alpha).powf(1.0 / p.beta2);
        let h = ex1().pressure_head(theta).unwrap();
        assert!(rel(-h, expected) < 1e-12);
    }

    #[test]
    fn capacity_matches_finite_difference() {
        for soil in [ex1(), berino(), glendale()] {
            for h in [-0.5f64, -3.0, -50.0, -200.0, -900.0, -5000.0] {
                let step = 1e-3 * h.abs();
                let fd = (soil.water_content(h + step).unwrap() - soil.water_content(h - step).unwrap())
                    / (2.0 * step);
                let c = soil.specific_capacity(h).unwrap();
                assert!(rel(c, fd) < 1e-5, "h={h} c={c} fd={fd}");
            }
        }
        let soil = ex1();
        let p = match soil {
            SoilModel::Haverkamp(p) => p,
            _ => unreachable!(),
        };
        let s: f64 = 200.0;
        let expected = p.alpha * (p.theta_s - p.theta_r) * p.beta2 * s.powf(p.beta2 - 1.0)
            / (p.alpha + s.powf(p.beta2)).powi(2);
        assert!(rel(soil.specific_capacity(-200.0).unwrap(), expected) < 1e-13);
    }

    #[test]
    fn capacity_positive_over_range() {
        for soil in [ex1(), berino(), glendale()] {
            for k in 0..=70 {
                let h = -(10f64.powf(-3.0 + k as f64 * 0.1));
                assert!(soil.specific_capacity(h).unwrap() > 0.0, "h={h}");
            }
        }
    }

    #[test]
    fn diffusivity_consistency() {
        for soil in [ex1(), berino(), glendale()] {
            for h in [-1.0, -10.0, -100.0, -400.0] {
                let theta = soil.water_content(h).unwrap();
                let lhs = soil.diffusivity(theta).unwrap() * soil.specific_capacity(h).unwrap();
                let err = rel(lhs, soil.hydraulic_conductivity(h).unwrap());
                assert!(err < 1e-8, "h={h} err={err}");
            }
        }
    }

    #[test]
    fn haverkamp_closed_form_diffusivity() {
        let p = match ex1() {
            SoilModel::Haverkamp(p) => p,
            _ => unreachable!(),
        };
        let s: f64 = 100.0;
        let expected = p.k_s * p.a * (p.alpha + s.powf(p.beta2)).powi(2)
            / ((p.a + s.powf(p.beta1)) * p.alpha * (p.theta_s - p.theta_r) * p.beta2 * s.powf(p.beta2 - 1.0));
        let theta = ex1().water_content(-100.0).unwrap();
        assert!(rel(ex1().diffusivity(theta).unwrap(), expected) < 1e-10);
    }

    #[test]
    fn vg_closed_form_diffusivity() {
        let p = match glendale() {
            SoilModel::VanGenuchten(p) => p,
            _ => unreachable!(),
        };
        let m = p.m();
        let h: f64 = -60.0;
        let phi = 1.0 / (1.0 + (p.alpha * h).abs().powf(p.n));
        let expected = p.k_s * (1.0 - (1.0 - phi).powf(m)).powi(2)
            / (m * p.n * p.alpha.powf(p.n) * (p.theta_s - p.theta_r) * h.abs().powf(p.n - 1.0)
                * phi.powf(0.5 * m + 1.0));
        let theta = glendale().water_content(h).unwrap();
        assert!(rel(glendale().diffusivity(theta).unwrap(), expected) < 1e-10);
    }

    #[test]
    fn vg_monotone_over_full_sweep() {
        for soil in [berino(), glendale()] {
            let values: Vec<(f64, f64, f64)> = sweep(&soil, 1e-4, 1000)
                .map(|t| {
                    let h = soil.pressure_head(t).unwrap();
                    (t, soil.hydraulic_conductivity(h).unwrap(), soil.diffusivity(t).unwrap())
                })
                .collect();
            for w in values.windows(2) {
                assert!(w[1].1 > w[0].1 && w[1].2 > w[0].2, "not monotone near {}", w[0].0);
            }
        }
    }

    #[test]
    fn haverkamp_monotone_above_dry_turning_point() {
        let soil = ex1();
        let lo = soil.water_content(-80.0).unwrap();
        let hi = soil.theta_s() - 1e-4;
        let mut prev = soil.diffusivity(lo).unwrap();
        for k in 1..1000 {
            let t = lo + (hi - lo) * k as f64 / 999.0;
            let b = soil.diffusivity(t).unwrap();
            assert!(b > prev, "theta {t}");
            prev = b;
        }
    }

    #[test]
    fn haverkamp_diffusivity_rises_again_at_dry_end() {
        // β ~ |h|^(β₂ + 1 − β₁) as h → −∞ with β₁ < β₂ + 1.
        let soil = ex1();
        let turning = soil.diffusivity(soil.water_content(-90.0).unwrap()).unwrap();
        let dry = soil.diffusivity(soil.theta_r() + 1e-4).unwrap();
        assert!(dry > turning);
        assert!(soil.diffusivity_slope(soil.theta_r() + 1e-4).unwrap() < 0.0);
    }

    #[test]
    fn glendale_diverges_near_saturation() {
        let soil = glendale();
        let base = soil.diffusivity(soil.theta_r() + 0.01).unwrap();
        let wet = soil.diffusivity(soil.theta_s() - 1e-4).unwrap();
        assert!(wet > 1e6 * base, "ratio {}", wet / base);
    }

    #[test]
    fn lower_bound_on_sampled_grid() {
        for soil in [berino(), glendale()] {
            let floor = soil.diffusivity(soil.theta_r() + 1e-6).unwrap();
            assert!(floor > 0.0);
            for t in sweep(&soil, 1e-6, 200) {
                assert!(soil.diffusivity(t).unwrap() >= floor);
            }
        }
    }

    #[test]
    fn regularized_truncation() {
        let reg = DiffusivityRegularization::new(1e-3);
        for soil in [ex1(), berino(), glendale()] {
            let cap = soil.theta_s() - 1e-3;
            let top = soil.diffusivity(cap).unwrap();
            assert_eq!(soil.diffusivity_regularized(&reg, soil.theta_s() - 5e-4).unwrap(), top);
            assert_eq!(soil.diffusivity_regularized(&reg, soil.theta_s() + 0.1).unwrap(), top);
            let below = soil.theta_s() - 2e-3;
            assert_eq!(
                soil.diffusivity_regularized(&reg, below).unwrap(),
                soil.diffusivity(below).unwrap()
            );
            let left = soil.diffusivity_regularized(&reg, cap - 1e-12).unwrap();
            let right = soil.diffusivity_regularized(&reg, cap + 1e-12).unwrap();
            assert!(rel(left, right) < 1e-6);
            let sup = sweep(&soil, 1e-6, 500)
                .map(|t| soil.diffusivity_regularized(&reg, t).unwrap())
                .fold(0.0, f64::max);
            if !matches!(soil, SoilModel::Haverkamp(_)) {
                assert_eq!(sup, top);
            }
            assert!(soil.diffusivity_regularized(&reg, soil.theta_r()).is_err());
        }
        assert!(ex1().diffusivity_regularized(&DiffusivityRegularization::new(0.5), 0.1).is_err());
    }

    #[test]
    fn conductivity_slope_matches_finite_difference() {
        for soil in [ex1(), berino(), glendale()] {
            for t in sweep(&soil, 1e-3, 20) {
                let step = f64::EPSILON.sqrt() * t;
                let fd = (soil.conductivity_of_theta(t + step).unwrap()
                    - soil.conductivity_of_theta(t - step).unwrap())
                    / (2.0 * step);
                let dk = soil.dk_dtheta(t).unwrap();
                assert!(dk >= 0.0);
                assert!(rel(dk, fd) < 1e-5, "theta={t} dk={dk} fd={fd}");
            }
        }
    }

    #[test]
    fn diffusivity_slope_matches_finite_difference() {
        for soil in [ex1(), berino(), glendale()] {
            for t in sweep(&soil, 1e-3, 20) {
                let step = f64::EPSILON.sqrt() * t;
                let fd = (soil.diffusivity(t + step).unwrap() - soil.diffusivity(t - step).unwrap()) / (2.0 * step);
                let db = soil.diffusivity_slope(t).unwrap();
                assert!((db - fd).abs() <= 1e-5 * fd.abs().max(1e-8 * db.abs()), "theta={t} db={db} fd={fd}");
            }
        }
    }

    #[test]
    fn vg_conductivity_flat_at_residual() {
        for soil in [berino(), glendale()] {
            let dk = soil.dk_dtheta(soil.theta_r() + 1e-6).unwrap();
            let wet = soil.dk_dtheta(soil.theta_s() - 0.05).unwrap();
            assert!(dk < 1e-6 * wet, "dk={dk}");
        }
    }

    #[test]
    fn admissibility_gate() {
        assert!(ex1().validate_quasi_unsaturated().is_valid());
        assert!(berino().validate_quasi_unsaturated().is_valid());
        assert!(glendale().validate_quasi_unsaturated().is_valid());

        let mut vg = match glendale() {
            SoilModel::VanGenuchten(p) => p,
            _ => unreachable!(),
        };
        vg.n = 1.0;
        let report = SoilModel::VanGenuchten(vg).validate_quasi_unsaturated();
        assert!(!report.is_valid() && report.names("n>1"));

        let mut hv = match ex1() {
            SoilModel::Haverkamp(p) => p,
            _ => unreachable!(),
        };
        hv.beta2 = 1.0;
        hv.k_s = -1.0;
        let report = SoilModel::Haverkamp(hv).validate_quasi_unsaturated();
        assert!(report.names("beta2>1") && report.names("k_s>0"));
        assert_eq!(alloc::format!("{report}"), "violated k_s>0, beta2>1");
        assert!(SoilModel::Haverkamp(hv).checked().is_err());
    }

    proptest::proptest! {
        #[test]
        fn retention_monotone_in_head(a in -1e4f64..-1e-3, b in -1e4f64..-1e-3) {
            for soil in [ex1(), berino(), glendale()] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                proptest::prop_assume!(hi - lo > 1e-9 * lo.abs());
                let (tl, th) = (soil.water_content(lo).unwrap(), soil.water_content(hi).unwrap());
                proptest::prop_assert!(tl <= th);
                proptest::prop_assert!(tl >= soil.theta_r() && th <= soil.theta_s());
                let (kl, kh) = (soil.hydraulic_conductivity(lo).unwrap(), soil.hydraulic_conductivity(hi).unwrap());
                proptest::prop_assert!(kl <= kh && kh <= soil.k_s() && kl > 0.0);
            }
        }
    }
}
