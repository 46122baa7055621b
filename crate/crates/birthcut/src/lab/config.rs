use std::path::{Path, PathBuf};

use ini::Ini;

use crate::equilibrium::{
    detect_critical_point, solve_one_cut, synthesize_birth_potential, CriticalReport, Potential,
};
use crate::numerics::{Interval, PrecisionContext};
use crate::{Error, Result};

/// Largest `n` accepted without `allow_large`.
pub const DESK_MAX_N: u64 = 48;

/// Coupling of `t = n/N` to `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingRegime {
    /// `δt = U₊ log n / n`
    Supercritical { u_plus: f64 },
    /// `δt = U₋ n^{−k}` with `U₋ ≤ 0`
    Subcritical { k: f64, u_minus: f64 },
    /// `t = 1`
    Critical,
}

impl ScalingRegime {
    pub fn new_supercritical(u_plus: f64) -> Result<Self> {
        if !(u_plus > 0.0) {
            return Err(Error::Config(format!("U+ must be positive, got {u_plus}")));
        }
        Ok(Self::Supercritical { u_plus })
    }

    pub fn new_subcritical(k: f64, u_minus: f64) -> Result<Self> {
        if !(u_minus <= 0.0) || !k.is_finite() {
            return Err(Error::Config(format!("need U- <= 0 and finite k, got U- = {u_minus}, k = {k}")));
        }
        Ok(Self::Subcritical { k, u_minus })
    }

    /// `t` before rounding `N`.
    pub fn nominal_t(&self, n: u64) -> f64 {
        let nf = n as f64;
        match *self {
            Self::Supercritical { u_plus } => 1.0 + u_plus * nf.ln() / nf,
            Self::Subcritical { k, u_minus } => 1.0 + u_minus * nf.powf(-k),
            Self::Critical => 1.0,
        }
    }

    /// Subcritical exponents must satisfy `k ≥ 1 − 1/2ν`.
    pub fn check_nu(&self, nu: u32) -> Result<()> {
        if let Self::Subcritical { k, .. } = *self {
            let bound = 1.0 - 1.0 / (2.0 * nu as f64);
            if k < bound - 1e-12 {
                return Err(Error::Config(format!("k = {k} is below 1 - 1/(2nu) = {bound}")));
            }
        }
        Ok(())
    }

    /// `u = 2νφ(x*)U₊` (zero outside the supercritical regime).
    pub fn filling(&self, nu: u32, phi: f64) -> f64 {
        match *self {
            Self::Supercritical { u_plus } => 2.0 * nu as f64 * phi * u_plus,
            _ => 0.0,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Self::Supercritical { u_plus } => format!("supercritical U+={u_plus}"),
            Self::Subcritical { k, u_minus } => format!("subcritical k={k} U-={u_minus}"),
            Self::Critical => "critical t=1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSource {
    File(PathBuf),
    Synthesize { x_star: f64, nu: u32 },
}

impl PotentialSource {
    /// The potential with the critical report of its `t = 1` measure.
    pub fn resolve(&self, ctx: &PrecisionContext) -> Result<(Potential, CriticalReport)> {
        match self {
            Self::Synthesize { x_star, nu } => synthesize_birth_potential(*x_star, *nu, ctx),
            Self::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
                let v = Potential::from_text(&text)?;
                let m = solve_one_cut(&v, 1.0, ctx)?;
                let width = m.support().width();
                let right = Interval::new(m.b(), m.b() + 4.0 * width)?;
                let report = detect_critical_point(&m, &v, right, ctx).or_else(|_| {
                    detect_critical_point(&m, &v, Interval::new(m.a() - 4.0 * width, m.a())?, ctx)
                })?;
                Ok((v, report))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::File(p) => format!("file {}", p.display()),
            Self::Synthesize { x_star, nu } => format!("synthesized x*={x_star} nu={nu}"),
        }
    }
}

/// Equispaced `z` grid, shared by both kernel arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { lo: -2.0, hi: 2.0, points: 17 }
    }
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        let h = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo + h * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub potential: PotentialSource,
    pub regime: ScalingRegime,
    pub n_list: Vec<u64>,
    pub grid: GridSpec,
    /// Working precision; `None` follows the degree schedule.
    pub bits: Option<u32>,
    pub out_dir: PathBuf,
    /// Lift the desk-scale cap on `n`.
    pub allow_large: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSource::Synthesize { x_star: 3.0, nu: 1 },
            regime: ScalingRegime::Critical,
            n_list: vec![16, 32, 48],
            grid: GridSpec::default(),
            bits: None,
            out_dir: PathBuf::from("out"),
            allow_large: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("cannot parse {key} = {v:?}")))
}

pub(crate) fn parse_n_list(s: &str) -> Result<Vec<u64>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| parse("n", p)).collect()
}

impl ExperimentConfig {
    /// Reads `[potential]`, `[regime]`, `[sweep]` and `[output]` sections.
    /// `u` in `[regime]` is accepted in place of `uplus` and is converted once
    /// `φ(x*)` is known.
    pub fn from_ini_str(text: &str) -> Result<(Self, Option<f64>)> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self::default();
        let get = |sec: &str, key: &str| ini.section(Some(sec)).and_then(|s| s.get(key)).map(str::to_owned);

        if let Some(file) = get("potential", "file") {
            cfg.potential = PotentialSource::File(PathBuf::from(file));
        } else {
            let x_star = get("potential", "xstar").map_or(Ok(3.0), |v| parse("xstar", &v))?;
            let nu = get("potential", "nu").map_or(Ok(1), |v| parse("nu", &v))?;
            cfg.potential = PotentialSource::Synthesize { x_star, nu };
        }

        let mut u_target = None;
        let kind = get("regime", "kind").unwrap_or_else(|| "critical".into());
        cfg.regime = match kind.trim() {
            "supercritical" => {
                if let Some(u) = get("regime", "u") {
                    u_target = Some(parse("u", &u)?);
                    ScalingRegime::Supercritical { u_plus: f64::NAN }
                } else {
                    let up = get("regime", "uplus").ok_or_else(|| Error::Config("supercritical needs uplus or u".into()))?;
                    ScalingRegime::new_supercritical(parse("uplus", &up)?)?
                }
            }
            "subcritical" => {
                let k = get("regime", "k").map_or(Ok(0.5), |v| parse("k", &v))?;
                let um = get("regime", "uminus").map_or(Ok(-1.0), |v| parse("uminus", &v))?;
                ScalingRegime::new_subcritical(k, um)?
            }
            "critical" => ScalingRegime::Critical,
            other => return Err(Error::Config(format!("unknown regime {other:?}"))),
        };

        if let Some(n) = get("sweep", "n") {
            cfg.n_list = parse_n_list(&n)?;
        }
        if let Some(v) = get("sweep", "grid_lo") {
            cfg.grid.lo = parse("grid_lo", &v)?;
        }
        if let Some(v) = get("sweep", "grid_hi") {
            cfg.grid.hi = parse("grid_hi", &v)?;
        }
        if let Some(v) = get("sweep", "grid_points") {
            cfg.grid.points = parse("grid_points", &v)?;
        }
        if let Some(v) = get("sweep", "bits") {
            cfg.bits = Some(parse("bits", &v)?);
        }
        if let Some(v) = get("sweep", "allow_large") {
            cfg.allow_large = parse("allow_large", &v)?;
        }
        if let Some(v) = get("output", "dir") {
            cfg.out_dir = PathBuf::from(v);
        }
        Ok((cfg, u_target))
    }

    pub fn load(path: &Path) -> Result<(Self, Option<f64>)> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_ini_str(&text)
    }

    /// Checks that do not need the potential.
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::Config("n list is empty".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) || self.n_list[0] == 0 {
            return Err(Error::Config(format!("n list must be positive and strictly increasing: {:?}", self.n_list)));
        }
        if !self.allow_large {
            if let Some(&n) = self.n_list.iter().find(|&&n| n > DESK_MAX_N) {
                return Err(Error::Config(format!("n = {n} exceeds the desk cap {DESK_MAX_N}; set allow_large")));
            }
        }
        if self.grid.points == 0 || !(self.grid.lo <= self.grid.hi) {
            return Err(Error::Config("grid needs at least one point and lo <= hi".into()));
        }
        if let ScalingRegime::Supercritical { u_plus } = self.regime {
            if !(u_plus > 0.0) {
                return Err(Error::Config("U+ is unset".into()));
            }
        }
        Ok(())
    }

    /// Supercritical filling must stay 0.1 away from `ℕ + ½`.
    pub fn check_filling(&self, nu: u32, phi: f64) -> Result<f64> {
        let u = self.regime.filling(nu, phi);
        if matches!(self.regime, ScalingRegime::Supercritical { .. }) {
            let frac = u - u.floor();
            if (frac - 0.5).abs() < 0.1 {
                return Err(Error::HalfInteger { u });
            }
        }
        Ok(u)
    }

    pub fn header(&self) -> String {
        format!(
            "potential: {}; regime: {}; n: {:?}; grid: [{}, {}] x {}; bits: {}",
            self.potential.describe(),
            self.regime.describe(),
            self.n_list,
            self.grid.lo,
            self.grid.hi,
            self.grid.points,
            self.bits.map_or_else(|| "schedule".to_string(), |b| b.to_string())
        )
    }
}
