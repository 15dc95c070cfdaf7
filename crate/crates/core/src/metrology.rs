//! Figures of merit from observable curves: phase sensitivity, SNL ratio,
//! FWHM, peak count, loss sweeps and the phase-to-range conversion.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::detection::{expectation, expectation_derivative, Scheme};
use crate::error::{Error, Result};
use crate::interferometer::{propagate, MziConfig};
use crate::states::{mean_photon_number, SuperposedState};

const NOISE: f64 = 1e-9;
const STATIONARY: f64 = 1e-14;
const PHI_TOL: f64 = 1e-8;

/// The two inputs and the arm loss; everything but the phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub state_a: SuperposedState,
    pub state_b: SuperposedState,
    pub loss_r: f64,
}

impl Setup {
    pub fn new(state_a: SuperposedState, state_b: SuperposedState, loss_r: f64) -> Result<Self> {
        MziConfig::new(0.0, loss_r)?;
        Ok(Setup { state_a, state_b, loss_r })
    }

    pub fn config(&self, phi: f64) -> MziConfig {
        MziConfig::new(phi, self.loss_r).expect("loss_r validated at construction")
    }

    pub fn value(&self, phi: f64, scheme: Scheme) -> f64 {
        expectation(&propagate(&self.state_a, &self.state_b, &self.config(phi)), scheme)
    }

    pub fn derivative(&self, phi: f64, scheme: Scheme) -> f64 {
        expectation_derivative(&self.state_a, &self.state_b, &self.config(phi), scheme)
    }

    pub fn with_loss(&self, loss_r: f64) -> Result<Self> {
        Setup::new(self.state_a.clone(), self.state_b.clone(), loss_r)
    }
}

/// Sampled `<X>(phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalCurve {
    pub phis: Vec<f64>,
    pub values: Vec<f64>,
    pub scheme: Scheme,
    /// When present, crossings and extrema are refined on the continuous observable.
    pub provenance: Option<Setup>,
}

impl SignalCurve {
    pub fn new(phis: Vec<f64>, values: Vec<f64>, scheme: Scheme) -> Result<Self> {
        if phis.len() != values.len() {
            return Err(Error::InvalidCurve(format!("{} phases but {} values", phis.len(), values.len())));
        }
        if phis.len() < 3 {
            return Err(Error::InvalidCurve("need at least 3 samples".into()));
        }
        if phis.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve("phases must be strictly increasing".into()));
        }
        let (lo, hi) = scheme.range();
        if let Some(v) = values.iter().find(|v| !(**v >= lo - 1e-9 && **v <= hi + 1e-9)) {
            return Err(Error::InvalidCurve(format!("value {v} outside the {scheme} range")));
        }
        Ok(SignalCurve { phis, values, scheme, provenance: None })
    }

    /// `n` evenly spaced samples on `[phi_min, phi_max]`, endpoints included.
    pub fn sample(setup: &Setup, scheme: Scheme, phi_min: f64, phi_max: f64, n: usize) -> Result<Self> {
        if n < 3 || !(phi_max > phi_min) {
            return Err(Error::InvalidCurve(format!("bad sampling [{phi_min}, {phi_max}] x {n}")));
        }
        let step = (phi_max - phi_min) / (n - 1) as f64;
        let phis: Vec<f64> = (0..n).map(|k| if k == n - 1 { phi_max } else { phi_min + step * k as f64 }).collect();
        let values = phis.par_iter().map(|&phi| setup.value(phi, scheme)).collect();
        Ok(SignalCurve { phis, values, scheme, provenance: Some(setup.clone()) })
    }

    /// One full period `[-pi, pi]` at 4096 intervals.
    pub fn sample_period(setup: &Setup, scheme: Scheme) -> Result<Self> {
        Self::sample(setup, scheme, -PI, PI, 4097)
    }

    /// True when the samples cover exactly one period, first and last point coinciding.
    pub fn is_periodic(&self) -> bool {
        let span = self.phis[self.phis.len() - 1] - self.phis[0];
        (span - 2.0 * PI).abs() < 1e-9
    }

    fn eval(&self, phi: f64) -> Option<f64> {
        self.provenance.as_ref().map(|s| s.value(phi, self.scheme))
    }
}

/// Index arithmetic over the samples, wrapping for periodic curves.
struct Walker<'a> {
    phis: &'a [f64],
    values: &'a [f64],
    periodic: bool,
}

impl<'a> Walker<'a> {
    fn new(curve: &'a SignalCurve) -> Self {
        let periodic = curve.is_periodic();
        let m = if periodic { curve.phis.len() - 1 } else { curve.phis.len() };
        Walker { phis: &curve.phis[..m], values: &curve.values[..m], periodic }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn step(&self, k: usize, dir: isize) -> Option<usize> {
        let m = self.len() as isize;
        let next = k as isize + dir;
        if self.periodic {
            Some(next.rem_euclid(m) as usize)
        } else if next < 0 || next >= m {
            None
        } else {
            Some(next as usize)
        }
    }

    /// Phase of sample `k` reached after `steps` moves in `dir` from `origin`, unwrapped.
    fn unwrapped(&self, origin: usize, dir: isize, steps: usize) -> f64 {
        let m = self.len() as isize;
        let raw = origin as isize + dir * steps as isize;
        let period = 2.0 * PI;
        let base = self.phis[raw.rem_euclid(m) as usize];
        base + period * raw.div_euclid(m) as f64
    }

    /// Local extrema: `sign = 1` for maxima, `-1` for minima.
    fn extrema(&self, sign: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| match (self.step(k, -1), self.step(k, 1)) {
                (Some(l), Some(r)) => {
                    sign * self.values[k] > sign * self.values[l] && sign * self.values[k] >= sign * self.values[r]
                }
                _ => false,
            })
            .collect()
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > PHI_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Extremum location and value, refined when the curve has provenance.
fn refine_extremum(curve: &SignalCurve, w: &Walker, k: usize, sign: f64) -> (f64, f64) {
    let (l, r) = (w.unwrapped(k, -1, 1), w.unwrapped(k, 1, 1));
    match &curve.provenance {
        Some(setup) => {
            let (x, fx) = golden_section(|phi| sign * setup.value(phi, curve.scheme), l, r);
            if sign * w.values[k] > fx {
                (w.phis[k], w.values[k])
            } else {
                (x, sign * fx)
            }
        }
        None => (w.phis[k], w.values[k]),
    }
}

/// Which side of the scheme midline a peak must sit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakSide {
    /// Maxima above the midline.
    Upper,
    /// Minima below the midline.
    Lower,
    /// Both of the above.
    Either,
    /// Whichever side holds the largest excursion from the midline.
    Dominant,
}

/// Midline separating upper from lower peaks: 0 for parity, 1/2 for Z.
pub fn midline(scheme: Scheme) -> f64 {
    let (lo, hi) = scheme.range();
    0.5 * (lo + hi)
}

/// Counts peaks with `|value - midline| > 1e-9` whose phase lies in `window`
/// (inclusive, taken modulo 2 pi for periodic curves).
pub fn peak_count(curve: &SignalCurve, window: (f64, f64), side: PeakSide) -> usize {
    let w = Walker::new(curve);
    let mid = midline(curve.scheme);
    let refined = |sign: f64| -> Vec<(f64, f64)> {
        w.extrema(sign).into_iter().map(|k| refine_extremum(curve, &w, k, sign)).collect()
    };
    let (maxima, minima) = (refined(1.0), refined(-1.0));
    let side = match side {
        PeakSide::Dominant => {
            let up = maxima.iter().map(|(_, v)| v - mid).fold(0.0, f64::max);
            let down = minima.iter().map(|(_, v)| mid - v).fold(0.0, f64::max);
            if down > up {
                PeakSide::Lower
            } else {
                PeakSide::Upper
            }
        }
        s => s,
    };
    let in_window = |phi: f64| {
        let phi = if w.periodic { window.0 + (phi - window.0).rem_euclid(2.0 * PI) } else { phi };
        let tol = 1e-6;
        (phi >= window.0 - tol && phi <= window.1 + tol)
            || (w.periodic && (phi - 2.0 * PI - window.0).abs() <= tol)
    };
    let upper = maxima.iter().filter(|(phi, v)| v - mid > NOISE && in_window(*phi)).count();
    let lower = minima.iter().filter(|(phi, v)| mid - v > NOISE && in_window(*phi)).count();
    match side {
        PeakSide::Upper => upper,
        PeakSide::Lower => lower,
        _ => upper + lower,
    }
}

/// Running extreme walking away from `k` until the curve turns back by more than the noise level.
fn lobe_floor(w: &Walker, k: usize, dir: isize, sign: f64) -> (f64, usize) {
    let mut best = sign * w.values[k];
    let mut cur = k;
    let mut steps = 0;
    while let Some(next) = w.step(cur, dir) {
        if steps >= w.len() - 1 {
            break;
        }
        let v = sign * w.values[next];
        if v > best + NOISE {
            break;
        }
        best = best.min(v);
        cur = next;
        steps += 1;
    }
    (sign * best, steps)
}

/// Full width at half maximum of the principal peak, in radians.
///
/// Each extremum's baseline is the higher of the two lobe floors reached by
/// walking downhill from it; the principal peak has the deepest lobe, ties going
/// to the extremum nearest the centre of the domain. Parity peaks of opposite
/// sign are separate fringes, so a parity baseline stops at zero.
pub fn fwhm(curve: &SignalCurve) -> Result<f64> {
    let w = Walker::new(curve);
    let center = 0.5 * (curve.phis[0] + curve.phis[curve.phis.len() - 1]);
    let mut best: Option<(f64, f64, usize, f64, f64)> = None; // depth, distance, k, sign, baseline
    for sign in [1.0, -1.0] {
        for k in w.extrema(sign) {
            let (fl, _) = lobe_floor(&w, k, -1, sign);
            let (fr, _) = lobe_floor(&w, k, 1, sign);
            let mut baseline = if sign > 0.0 { fl.max(fr) } else { fl.min(fr) };
            if curve.scheme == Scheme::Parity && sign * w.values[k] > 0.0 && sign * baseline < 0.0 {
                baseline = 0.0;
            }
            let depth = sign * (w.values[k] - baseline);
            let dist = (w.phis[k] - center).abs();
            let better = match best {
                None => true,
                Some((d, dd, ..)) => depth > d + 1e-12 || ((depth - d).abs() <= 1e-12 && dist < dd),
            };
            if better {
                best = Some((depth, dist, k, sign, baseline));
            }
        }
    }
    let (depth, _, k, sign, baseline) = best.ok_or(Error::NoPeak)?;
    if depth <= NOISE {
        return Err(Error::NoPeak);
    }
    let (_, peak) = refine_extremum(curve, &w, k, sign);
    let half = 0.5 * (peak + baseline);
    let above = |v: f64| sign * (v - half) > 0.0;

    let crossing = |dir: isize| -> f64 {
        let mut steps = 0;
        let mut cur = k;
        loop {
            let next = w.step(cur, dir).expect("lobe floor lies beyond the half level");
            steps += 1;
            if !above(w.values[next]) {
                let (inside, outside) = (w.unwrapped(k, dir, steps - 1), w.unwrapped(k, dir, steps));
                let (vi, vo) = (w.values[cur], w.values[next]);
                return match curve.provenance {
                    Some(_) => bisect(|phi| curve.eval(phi).unwrap(), half, inside, outside, &above),
                    None => inside + (outside - inside) * (vi - half) / (vi - vo),
                };
            }
            cur = next;
        }
    };
    Ok(crossing(1) - crossing(-1))
}

fn bisect(f: impl Fn(f64) -> f64, _half: f64, mut inside: f64, mut outside: f64, above: &impl Fn(f64) -> bool) -> f64 {
    while (outside - inside).abs() > PHI_TOL {
        let mid = 0.5 * (inside + outside);
        if above(f(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// How the shot-noise limit counts input energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnlConvention {
    /// Mean photon number of both inputs together.
    #[default]
    TotalInput,
    /// Mean photon number of the first input only.
    FirstInput,
}

/// `1 / sqrt(N)` with `N` per the convention.
pub fn snl_with(state_a: &SuperposedState, state_b: &SuperposedState, convention: SnlConvention) -> Result<f64> {
    let n = match convention {
        SnlConvention::TotalInput => mean_photon_number(state_a) + mean_photon_number(state_b),
        SnlConvention::FirstInput => mean_photon_number(state_a),
    };
    if !(n >= 1e-12) {
        return Err(Error::ZeroEnergy(n));
    }
    Ok(1.0 / n.sqrt())
}

pub fn snl(state_a: &SuperposedState, state_b: &SuperposedState) -> Result<f64> {
    snl_with(state_a, state_b, SnlConvention::TotalInput)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub phi: f64,
    /// `+inf` at stationary points of the signal.
    pub delta_phi: f64,
    pub snl: f64,
    pub ratio: f64,
}

impl SensitivityPoint {
    pub fn is_defined(&self) -> bool {
        self.delta_phi.is_finite()
    }
}

/// Error-propagation phase uncertainty for a single binary measurement.
pub fn delta_phi(value: f64, derivative: f64, scheme: Scheme) -> f64 {
    if derivative.abs() < STATIONARY {
        return f64::INFINITY;
    }
    let variance = match scheme {
        Scheme::Parity => 1.0 - value * value,
        Scheme::Z => value - value * value,
    };
    variance.max(0.0).sqrt() / derivative.abs()
}

pub fn phase_sensitivity(setup: &Setup, phi: f64, scheme: Scheme) -> Result<SensitivityPoint> {
    phase_sensitivity_with(setup, phi, scheme, SnlConvention::TotalInput)
}

pub fn phase_sensitivity_with(
    setup: &Setup,
    phi: f64,
    scheme: Scheme,
    convention: SnlConvention,
) -> Result<SensitivityPoint> {
    let snl = snl_with(&setup.state_a, &setup.state_b, convention)?;
    let d = delta_phi(setup.value(phi, scheme), setup.derivative(phi, scheme), scheme);
    Ok(SensitivityPoint { phi, delta_phi: d, snl, ratio: d / snl })
}

/// Sensitivity at each phase, in order.
pub fn sensitivity_sweep(setup: &Setup, phis: &[f64], scheme: Scheme, convention: SnlConvention) -> Result<Vec<SensitivityPoint>> {
    phis.par_iter().map(|&phi| phase_sensitivity_with(setup, phi, scheme, convention)).collect()
}

/// What a loss sweep recomputes at each `loss_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMetric {
    /// FWHM of the curve sampled over one period.
    Fwhm,
    /// `delta_phi / snl` at the sweep phase.
    Ratio,
}

pub fn loss_sweep(setup: &Setup, phi: f64, scheme: Scheme, r_grid: &[f64], metric: SweepMetric) -> Result<Vec<(f64, f64)>> {
    r_grid
        .iter()
        .map(|&r| {
            let s = setup.with_loss(r)?;
            let m = match metric {
                SweepMetric::Fwhm => fwhm(&SignalCurve::sample_period(&s, scheme)?)?,
                SweepMetric::Ratio => phase_sensitivity(&s, phi, scheme)?.ratio,
            };
            Ok((r, m))
        })
        .collect()
}

/// Target distance `f = phi * wavelength / (4 pi)` from `phi = 2 k f`.
pub fn range_from_phase(phi: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::InvalidConfig(format!("wavelength must be positive, got {wavelength}")));
    }
    Ok(phi * wavelength / (4.0 * PI))
}
