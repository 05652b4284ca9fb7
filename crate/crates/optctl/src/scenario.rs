//! Scenario documents (TOML) and the built-in examples.

use richards_core::{
    BottomBoundary, ControlProblem, FeddesUptake, ForwardSettings, Grid1D, HaverkampSoil, InitialProfile,
    LineSearchConfig, PgdConfig, SoilModel, TrackingTarget, VanGenuchtenSoil,
};
use serde::{Deserialize, Serialize};

use crate::AppError;

pub const BUILTIN_NAMES: [&str; 4] = ["haverkamp-ex1", "haverkamp-ex2", "berino-ex3", "glendale-ex4"];

pub const DEFAULT_NZ: usize = 141;
pub const DEFAULT_NT: usize = 241;

/// A fully validated control problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub soil: SoilModel,
    pub uptake: FeddesUptake,
    pub tracking: TrackingTarget,
    pub grid: Grid1D,
    pub ic: InitialProfile,
    pub bc_bottom: BottomBoundary,
    /// Constant initial control.
    pub u0: f64,
    pub pgd: PgdConfig,
}

impl Scenario {
    pub fn problem(&self) -> Result<ControlProblem, AppError> {
        Ok(ControlProblem::richards(
            self.soil,
            self.uptake,
            self.tracking,
            self.grid,
            self.ic.clone(),
            self.bc_bottom,
            &self.pgd,
        )?)
    }

    pub fn initial_control(&self) -> Vec<f64> {
        vec![self.u0; self.grid.nt]
    }

    pub fn to_document(&self) -> ScenarioDocument {
        let soil = match self.soil {
            SoilModel::Haverkamp(s) => SoilSection::Haverkamp {
                theta_r: s.theta_r,
                theta_s: s.theta_s,
                alpha: s.alpha,
                beta2: s.beta2,
                a: s.a,
                beta1: s.beta1,
                k_s: s.k_s,
            },
            SoilModel::VanGenuchten(s) => SoilSection::VanGenuchten {
                theta_r: s.theta_r,
                theta_s: s.theta_s,
                alpha: s.alpha,
                n: s.n,
                k_s: s.k_s,
            },
        };
        let ic = match &self.ic {
            InitialProfile::Blend { power: 1 } => IcSection::Linear,
            InitialProfile::Blend { power: 2 } => IcSection::Quadratic,
            InitialProfile::Blend { power } => IcSection::Power { power: *power },
            InitialProfile::Reflected => IcSection::Reflected { paper_literal_ic: true },
            InitialProfile::Table(points) => IcSection::Table { points: points.iter().map(|&(z, v)| [z, v]).collect() },
        };
        let bc_bottom = match self.bc_bottom {
            BottomBoundary::Constant(value) => BottomSection::Constant { value },
            BottomBoundary::Linear { start, end } => BottomSection::Linear { start, end },
        };
        let p = &self.pgd;
        ScenarioDocument {
            name: self.name.clone(),
            soil,
            uptake: UptakeSection {
                h1: self.uptake.h1,
                h2: self.uptake.h2,
                h3: self.uptake.h3,
                h4: self.uptake.h4,
                varphi: Varphi::Value(self.uptake.varphi),
                tracking: match self.tracking {
                    TrackingTarget::Scaled => Tracking::Scaled,
                    TrackingTarget::Normalized => Tracking::Normalized,
                },
            },
            grid: GridSection { depth: self.grid.depth, horizon: self.grid.horizon, nz: self.grid.nz, nt: self.grid.nt },
            ic,
            bc_bottom,
            control: ControlSection { u0: self.u0 },
            pgd: PgdSection {
                maxit: p.maxit,
                tol: p.tol,
                lambda: p.lambda,
                epsilon: p.epsilon,
                picard_tol: p.picard.picard_tol,
                picard_maxit: p.picard.picard_maxit,
                linesearch_budget: p.linesearch.budget,
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_document()).expect("scenario documents always serialize")
    }
}

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub maxit: Option<usize>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub nz: Option<usize>,
    pub nt: Option<usize>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Re-validates the scenario with the overrides applied.
    pub fn apply(&self, scenario: &Scenario) -> Result<Scenario, AppError> {
        let mut doc = scenario.to_document();
        let pgd = &mut doc.pgd;
        pgd.maxit = self.maxit.unwrap_or(pgd.maxit);
        pgd.tol = self.tol.unwrap_or(pgd.tol);
        pgd.epsilon = self.epsilon.unwrap_or(pgd.epsilon);
        pgd.lambda = self.lambda.unwrap_or(pgd.lambda);
        doc.grid.nz = self.nz.unwrap_or(doc.grid.nz);
        doc.grid.nt = self.nt.unwrap_or(doc.grid.nt);
        doc.into_scenario()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub soil: SoilSection,
    #[serde(default)]
    pub uptake: UptakeSection,
    pub grid: GridSection,
    pub ic: IcSection,
    pub bc_bottom: BottomSection,
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub pgd: PgdSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SoilSection {
    Haverkamp {
        theta_r: f64,
        theta_s: f64,
        alpha: f64,
        beta2: f64,
        #[serde(rename = "A")]
        a: f64,
        beta1: f64,
        k_s: f64,
    },
    VanGenuchten {
        theta_r: f64,
        theta_s: f64,
        alpha: f64,
        n: f64,
        k_s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Varphi {
    Value(f64),
    Keyword(Auto),
}

/// `"auto"`: `φ = 0.1/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tracking {
    #[default]
    Scaled,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UptakeSection {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub varphi: Varphi,
    pub tracking: Tracking,
}

impl Default for UptakeSection {
    fn default() -> Self {
        let s = FeddesUptake::standard(1.0);
        Self { h1: s.h1, h2: s.h2, h3: s.h3, h4: s.h4, varphi: Varphi::Keyword(Auto::Auto), tracking: Tracking::Scaled }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "Z")]
    pub depth: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "Nz", default = "default_nz")]
    pub nz: usize,
    #[serde(rename = "Nt", default = "default_nt")]
    pub nt: usize,
}

fn default_nz() -> usize {
    DEFAULT_NZ
}

fn default_nt() -> usize {
    DEFAULT_NT
}

fn literal() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IcSection {
    /// Linear between the top and bottom values at `t = 0`.
    Linear,
    /// `top + (bottom − top)(z/Z)²`.
    Quadratic,
    Power {
        power: i32,
    },
    /// `top + (top − bottom)z/Z`, or the linear profile when
    /// `paper_literal_ic = false`.
    Reflected {
        #[serde(default = "literal")]
        paper_literal_ic: bool,
    },
    Table {
        points: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BottomSection {
    Constant { value: f64 },
    Linear { start: f64, end: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSection {
    pub u0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PgdSection {
    pub maxit: usize,
    pub tol: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub picard_tol: f64,
    pub picard_maxit: usize,
    pub linesearch_budget: usize,
}

impl Default for PgdSection {
    fn default() -> Self {
        let p = PgdConfig::default();
        Self {
            maxit: p.maxit,
            tol: p.tol,
            lambda: p.lambda,
            epsilon: p.epsilon,
            picard_tol: p.picard.picard_tol,
            picard_maxit: p.picard.picard_maxit,
            linesearch_budget: p.linesearch.budget,
        }
    }
}

impl ScenarioDocument {
    /// Validates every section and collects all violations.
    pub fn into_scenario(self) -> Result<Scenario, AppError> {
        let mut errors = Vec::new();

        let soil = match self.soil {
            SoilSection::Haverkamp { theta_r, theta_s, alpha, beta2, a, beta1, k_s } => {
                SoilModel::Haverkamp(HaverkampSoil { theta_r, theta_s, alpha, beta2, a, beta1, k_s })
            }
            SoilSection::VanGenuchten { theta_r, theta_s, alpha, n, k_s } => {
                SoilModel::VanGenuchten(VanGenuchtenSoil { theta_r, theta_s, alpha, n, k_s })
            }
        };
        let report = soil.validate_quasi_unsaturated();
        for v in &report.violations {
            errors.push(format!("soil: quasi-unsaturated condition violated: {v}"));
        }

        let g = &self.grid;
        let grid = match Grid1D::new(g.depth, g.horizon, g.nz, g.nt) {
            Ok(grid) => Some(grid),
            Err(e) => {
                errors.push(format!("grid: {e}"));
                None
            }
        };

        let u = &self.uptake;
        let varphi = match u.varphi {
            Varphi::Value(v) => v,
            Varphi::Keyword(Auto::Auto) => 0.1 / g.depth,
        };
        let uptake = FeddesUptake { h1: u.h1, h2: u.h2, h3: u.h3, h4: u.h4, varphi };
        if let Err(e) = uptake.validate() {
            errors.push(format!("uptake: {e}"));
        }
        let tracking = match u.tracking {
            Tracking::Scaled => TrackingTarget::Scaled,
            Tracking::Normalized => TrackingTarget::Normalized,
        };

        let p = &self.pgd;
        let pgd = PgdConfig {
            maxit: p.maxit,
            tol: p.tol,
            lambda: p.lambda,
            epsilon: p.epsilon,
            picard: ForwardSettings { picard_tol: p.picard_tol, picard_maxit: p.picard_maxit },
            linesearch: LineSearchConfig { budget: p.linesearch_budget },
        };
        if let Err(e) = pgd.validate() {
            errors.push(format!("pgd: {e}"));
        }
        let (lo, hi) = (soil.theta_r(), soil.theta_s());
        if report.is_valid() && !(pgd.epsilon < hi - lo) {
            errors.push(format!("pgd: epsilon = {} must be below theta_s - theta_r = {}", pgd.epsilon, hi - lo));
        }

        let ic = match self.ic {
            IcSection::Linear => InitialProfile::Blend { power: 1 },
            IcSection::Quadratic => InitialProfile::Blend { power: 2 },
            IcSection::Power { power } => InitialProfile::Blend { power },
            IcSection::Reflected { paper_literal_ic: true } => InitialProfile::Reflected,
            IcSection::Reflected { paper_literal_ic: false } => InitialProfile::Blend { power: 1 },
            IcSection::Table { points } => InitialProfile::Table(points.into_iter().map(|[z, v]| (z, v)).collect()),
        };
        if let Err(e) = ic.validate() {
            errors.push(format!("ic: {e}"));
        }
        if let InitialProfile::Table(points) = &ic {
            for &(z, v) in points {
                if !(v >= lo && v < hi) {
                    errors.push(format!("ic: value {v} at z = {z} outside [theta_r, theta_s) = [{lo}, {hi})"));
                }
            }
        }

        let bc_bottom = match self.bc_bottom {
            BottomSection::Constant { value } => BottomBoundary::Constant(value),
            BottomSection::Linear { start, end } => BottomBoundary::Linear { start, end },
        };
        let anchors = match bc_bottom {
            BottomBoundary::Constant(v) => vec![v],
            BottomBoundary::Linear { start, end } => vec![start, end],
        };
        for v in anchors {
            if !(v > lo && v < hi) {
                errors.push(format!("bc_bottom: value {v} outside (theta_r, theta_s) = ({lo}, {hi})"));
            }
        }

        let u0 = self.control.u0;
        let upper = hi - lo - pgd.epsilon;
        if !(u0 >= 0.0 && u0 <= upper) {
            errors.push(format!("control: u0 = {u0} outside the admissible box [0, {upper}]"));
        }
        if self.name.trim().is_empty() {
            errors.push("name: must not be empty".into());
        }

        match grid {
            Some(grid) if errors.is_empty() => Ok(Scenario {
                name: self.name,
                soil,
                uptake,
                tracking,
                grid,
                ic,
                bc_bottom,
                u0,
                pgd,
            }),
            _ => Err(AppError::Validation(errors)),
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, AppError> {
    let doc: ScenarioDocument = toml::from_str(text).map_err(|e| AppError::Schema(e.to_string()))?;
    doc.into_scenario()
}

/// Weighted blend `(1 − w)θ_r + wθ_S`.
fn blend(soil: &SoilModel, w: f64) -> f64 {
    (1.0 - w) * soil.theta_r() + w * soil.theta_s()
}

pub fn builtin_scenario(name: &str) -> Result<Scenario, AppError> {
    let sandy = SoilModel::Haverkamp(HaverkampSoil {
        theta_r: 0.075,
        theta_s: 0.287,
        alpha: 1.611e6,
        beta2: 3.96,
        a: 1.175e6,
        beta1: 4.74,
        k_s: 34.0,
    });
    let (soil, depth, horizon, ic, bc_bottom) = match name {
        "haverkamp-ex1" => {
            (sandy, 70.0, 3.0, InitialProfile::Blend { power: 1 }, BottomBoundary::Constant(blend(&sandy, 0.1)))
        }
        "haverkamp-ex2" => (
            sandy,
            70.0,
            3.0,
            InitialProfile::Reflected,
            BottomBoundary::Linear { start: blend(&sandy, 0.1), end: blend(&sandy, 0.3) },
        ),
        "berino-ex3" => {
            let soil = SoilModel::VanGenuchten(VanGenuchtenSoil {
                theta_r: 0.0286,
                theta_s: 0.3658,
                alpha: 0.0280,
                n: 2.2390,
                k_s: 22.5416,
            });
            let bc = BottomBoundary::Linear { start: blend(&soil, 0.7), end: blend(&soil, 0.9) };
            (soil, 50.0, 12.0, InitialProfile::Blend { power: 2 }, bc)
        }
        "glendale-ex4" => {
            let soil = SoilModel::VanGenuchten(VanGenuchtenSoil {
                theta_r: 0.1060,
                theta_s: 0.4686,
                alpha: 0.0104,
                n: 1.3954,
                k_s: 0.5458,
            });
            let bc = BottomBoundary::Linear { start: blend(&soil, 0.5), end: blend(&soil, 0.3) };
            (soil, 30.0, 36.0, InitialProfile::Blend { power: 2 }, bc)
        }
        _ => return Err(AppError::UnknownScenario(name.to_string())),
    };
    Ok(Scenario {
        name: name.to_string(),
        soil,
        uptake: FeddesUptake::standard(depth),
        tracking: TrackingTarget::Scaled,
        grid: Grid1D::new(depth, horizon, DEFAULT_NZ, DEFAULT_NT)?,
        ic,
        bc_bottom,
        u0: 0.0,
        pgd: PgdConfig::default(),
    })
}

/// A built-in name, or a path to a scenario document.
pub fn load_scenario(target: &str) -> Result<Scenario, AppError> {
    if BUILTIN_NAMES.contains(&target) {
        return builtin_scenario(target);
    }
    let path = std::path::Path::new(target);
    if !path.exists() {
        return Err(AppError::UnknownScenario(target.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| AppError::Read { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}
