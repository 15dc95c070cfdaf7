//! Scan specifications assembled from a key-value map (config file overlaid by flags).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use qlidar::detection::Scheme;
use qlidar::metrology::{PeakSide, Setup, SnlConvention, SweepMetric};
use qlidar::states::{alpha_for_mean_photons, make_state, StateKind, SuperposedState};
use qlidar::Complex64;

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "state-a",
    "alpha2",
    "alpha-phase",
    "mean-photons",
    "state-b",
    "zeta2",
    "zeta-phase",
    "scheme",
    "phi-min",
    "phi-max",
    "phi-steps",
    "phi",
    "loss-r",
    "sweep",
    "grid",
    "metric",
    "snl",
    "window",
    "side",
    "half-width",
    "resolution",
    "reduced",
    "tolerance",
    "quick",
    "out",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Signal,
    Sensitivity,
    Fwhm,
    Wigner,
    Loss,
    Peaks,
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Parameter on the x axis of an `fwhm` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Alpha2,
    MeanPhotons,
    Zeta2,
    LossR,
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "alpha2" => Ok(SweepVar::Alpha2),
            "mean-photons" | "n" => Ok(SweepVar::MeanPhotons),
            "zeta2" => Ok(SweepVar::Zeta2),
            "loss-r" => Ok(SweepVar::LossR),
            other => Err(format!("unknown sweep variable '{other}' (expected alpha2, mean-photons, zeta2 or loss-r)")),
        }
    }
}

/// How the first input's energy is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Energy {
    Alpha2(f64),
    MeanPhotons(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub command: Command,
    pub states: Vec<StateKind>,
    pub energy: Energy,
    pub alpha_phase: f64,
    /// `None` is vacuum.
    pub state_b: Option<StateKind>,
    pub zeta2: f64,
    pub zeta_phase: f64,
    pub scheme: Scheme,
    pub phi_min: f64,
    pub phi_max: f64,
    pub phi_steps: usize,
    pub phi: f64,
    pub loss_r: f64,
    pub sweep: SweepVar,
    pub grid: Vec<f64>,
    pub metric: SweepMetric,
    pub snl: SnlConvention,
    pub window: (f64, f64),
    pub side: PeakSide,
    pub half_width: Option<f64>,
    pub resolution: usize,
    pub reduced: bool,
    pub tolerance: f64,
    pub quick: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Reads a float, also accepting multiples of pi such as `pi`, `-pi`, `0.75pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.strip_suffix("pi") {
        Some(k) => {
            let k = k.trim().trim_end_matches('*');
            let k = match k {
                "" | "+" => 1.0,
                "-" => -1.0,
                k => k.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?,
            };
            k * PI
        }
        None => t.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if !v.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(v)
}

/// `v1,v2,...` or `start:stop:count` (inclusive); strictly increasing.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.len() {
        1 => s.split(',').map(parse_angle).collect::<Result<Vec<_>, _>>()?,
        3 => {
            let (a, b) = (parse_angle(parts[0])?, parse_angle(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| format!("bad count {:?}", parts[2]))?;
            if n == 1 && a == b {
                vec![a]
            } else if n < 2 || n > 1_000_000 {
                return Err(format!("count must lie in 2..=1000000, got {n}"));
            } else {
                (0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
            }
        }
        _ => return Err(format!("expected a comma list or start:stop:count, got {s:?}")),
    };
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(grid)
}

/// `all` or a comma list of state kinds.
pub fn parse_states(s: &str) -> Result<Vec<StateKind>, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(StateKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let k: StateKind = part.parse()?;
        if out.contains(&k) {
            return Err(format!("state {k} listed twice"));
        }
        out.push(k);
    }
    Ok(out)
}

/// `vacuum` or a state kind.
pub fn parse_second(s: &str) -> Result<Option<StateKind>, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "vacuum" | "vac" | "none" => Ok(None),
        other => other.parse().map(Some),
    }
}

pub fn parse_side(s: &str) -> Result<PeakSide, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "upper" => Ok(PeakSide::Upper),
        "lower" => Ok(PeakSide::Lower),
        "either" | "both" => Ok(PeakSide::Either),
        "dominant" => Ok(PeakSide::Dominant),
        other => Err(format!("unknown side '{other}' (expected upper, lower, either or dominant)")),
    }
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("expected a boolean, got '{other}'")),
    }
}

fn parse_metric(s: &str) -> Result<SweepMetric, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "fwhm" => Ok(SweepMetric::Fwhm),
        "ratio" => Ok(SweepMetric::Ratio),
        other => Err(format!("unknown metric '{other}' (expected fwhm or ratio)")),
    }
}

fn parse_snl(s: &str) -> Result<SnlConvention, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "total" => Ok(SnlConvention::TotalInput),
        "first" => Ok(SnlConvention::FirstInput),
        other => Err(format!("unknown SNL convention '{other}' (expected total or first)")),
    }
}

struct Fields<'a>(&'a BTreeMap<String, String>);

impl Fields<'_> {
    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        self.0.get(key).map(|v| parse(v).map_err(|m| CliError::spec(key, m))).transpose()
    }

    fn or<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        Ok(self.get(key, parse)?.unwrap_or(default))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, CliError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::spec(key, format!("must be non-negative, got {v}")))
    }
}

fn loss_value(key: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::spec(key, format!("must lie in [0, 1), got {v}")))
    }
}

impl ScanSpec {
    pub fn from_map(command: Command, map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::spec(k.as_str(), "unknown key"));
        }
        let f = Fields(map);
        let all_states = matches!(command, Command::Fwhm | Command::Loss | Command::Peaks | Command::OracleCheck);
        let states = f.or("state-a", if all_states { StateKind::ALL.to_vec() } else { vec![StateKind::Cs] }, parse_states)?;
        if command == Command::Fwhm && states != StateKind::ALL {
            return Err(CliError::spec("state-a", "fwhm always tabulates all six states"));
        }

        let alpha2 = f.get("alpha2", parse_angle)?.map(|v| non_negative("alpha2", v)).transpose()?;
        let mean = f.get("mean-photons", parse_angle)?.map(|v| non_negative("mean-photons", v)).transpose()?;
        let energy = match (alpha2, mean) {
            (Some(_), Some(_)) => return Err(CliError::spec("mean-photons", "give either alpha2 or mean-photons")),
            (_, Some(n)) => Energy::MeanPhotons(n),
            (a, None) => Energy::Alpha2(a.unwrap_or(2.0)),
        };
        let zeta2 = non_negative("zeta2", f.or("zeta2", 0.0, parse_angle)?)?;
        let state_b = match f.get("state-b", parse_second)? {
            Some(b) => b,
            None if zeta2 > 0.0 => Some(StateKind::Cs),
            None => None,
        };

        let dense = matches!(command, Command::Fwhm | Command::Loss | Command::Peaks);
        let phi_min = f.or("phi-min", -PI, parse_angle)?;
        let phi_max = f.or("phi-max", PI, parse_angle)?;
        if !(phi_max > phi_min) {
            return Err(CliError::spec("phi-max", format!("must exceed phi-min ({phi_min})")));
        }
        let phi_steps = f.or("phi-steps", if dense { 4097 } else { 401 }, |s| {
            s.trim().parse::<usize>().map_err(|_| format!("not a count: {s:?}"))
        })?;
        let min_steps = if dense { 3 } else { 2 };
        if !(min_steps..=1_000_000).contains(&phi_steps) {
            return Err(CliError::spec("phi-steps", format!("must lie in {min_steps}..=1000000, got {phi_steps}")));
        }

        let sweep = f.or("sweep", SweepVar::Alpha2, |s| s.parse())?;
        if command == Command::Loss && map.contains_key("sweep") && sweep != SweepVar::LossR {
            return Err(CliError::spec("sweep", "loss always sweeps loss-r"));
        }
        let sweep = if command == Command::Loss { SweepVar::LossR } else { sweep };
        let default_grid = match sweep {
            SweepVar::Alpha2 | SweepVar::MeanPhotons => vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            SweepVar::Zeta2 => vec![0.0, 1.0, 2.0, 4.0, 8.0],
            SweepVar::LossR => (0..10).map(|k| k as f64 / 10.0).collect(),
        };
        let grid = f.or("grid", default_grid, parse_grid)?;
        for &v in &grid {
            match sweep {
                SweepVar::LossR => loss_value("grid", v).map(|_| ())?,
                _ => non_negative("grid", v).map(|_| ())?,
            }
        }

        let window = f.or("window", (-PI, PI), |s| {
            let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
            let (a, b) = (parse_angle(a)?, parse_angle(b)?);
            if b > a {
                Ok((a, b))
            } else {
                Err(format!("window upper bound {b} must exceed {a}"))
            }
        })?;

        let half_width = f.get("half-width", parse_angle)?;
        if let Some(h) = half_width {
            if !(h > 0.0) {
                return Err(CliError::spec("half-width", format!("must be positive, got {h}")));
            }
        }
        let resolution = f.or("resolution", 201, |s| s.trim().parse::<usize>().map_err(|_| format!("not a count: {s:?}")))?;
        if !(2..=4001).contains(&resolution) {
            return Err(CliError::spec("resolution", format!("must lie in 2..=4001, got {resolution}")));
        }
        let tolerance = f.or("tolerance", 1e-8, parse_angle)?;
        if !(tolerance > 0.0) {
            return Err(CliError::spec("tolerance", format!("must be positive, got {tolerance}")));
        }

        Ok(ScanSpec {
            command,
            states,
            energy,
            alpha_phase: f.or("alpha-phase", 0.0, parse_angle)?,
            state_b,
            zeta2,
            zeta_phase: f.or("zeta-phase", 0.0, parse_angle)?,
            scheme: f.or("scheme", Scheme::Parity, |s| s.parse())?,
            phi_min,
            phi_max,
            phi_steps,
            phi: f.or("phi", 0.02, parse_angle)?,
            loss_r: loss_value("loss-r", f.or("loss-r", 0.0, parse_angle)?)?,
            sweep,
            grid,
            metric: f.or("metric", SweepMetric::Fwhm, parse_metric)?,
            snl: f.or("snl", SnlConvention::TotalInput, parse_snl)?,
            window,
            side: f.or("side", PeakSide::Either, parse_side)?,
            half_width,
            resolution,
            reduced: f.or("reduced", false, parse_bool)?,
            tolerance,
            quick: f.or("quick", false, parse_bool)?,
            out: f.get("out", |s| Ok(PathBuf::from(s.trim())))?,
            format: f.or("format", Format::Csv, |s| s.parse())?,
        })
    }

    /// The phase grid `phi_min..=phi_max` with `phi_steps` points.
    pub fn phis(&self) -> Vec<f64> {
        let n = self.phi_steps;
        (0..n)
            .map(|k| if k == n - 1 { self.phi_max } else { self.phi_min + (self.phi_max - self.phi_min) * k as f64 / (n - 1) as f64 })
            .collect()
    }

    pub fn alpha(&self, kind: StateKind, energy: Energy) -> Result<Complex64, CliError> {
        let r = match energy {
            Energy::Alpha2(a2) => a2.sqrt(),
            Energy::MeanPhotons(n) => alpha_for_mean_photons(kind, n)?,
        };
        Ok(Complex64::from_polar(r, self.alpha_phase))
    }

    pub fn first_input(&self, kind: StateKind, energy: Energy) -> Result<SuperposedState, CliError> {
        Ok(make_state(kind, self.alpha(kind, energy)?)?)
    }

    pub fn second_input(&self, zeta2: f64) -> Result<SuperposedState, CliError> {
        match self.state_b {
            None => Ok(SuperposedState::vacuum()),
            Some(kind) => Ok(make_state(kind, Complex64::from_polar(zeta2.sqrt(), self.zeta_phase))?),
        }
    }

    pub fn setup(&self, kind: StateKind) -> Result<Setup, CliError> {
        self.setup_with(kind, self.energy, self.zeta2, self.loss_r)
    }

    pub fn setup_with(&self, kind: StateKind, energy: Energy, zeta2: f64, loss_r: f64) -> Result<Setup, CliError> {
        Ok(Setup::new(self.first_input(kind, energy)?, self.second_input(zeta2)?, loss_r)?)
    }
}
