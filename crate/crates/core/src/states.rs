//! Finite superpositions of coherent states.
//!
//! Every input state (coherent, even cat, the four multi-photonic states and
//! arbitrary custom superpositions) is a list of `(weight, amplitude)` pairs.
//! Normalization and moments are computed from the Gram matrix of the terms,
//! so there is a single code path for all of them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Threshold below which a Gram norm is treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Smallest |alpha|^2 accepted for MPS_1..3, whose normalization diverges at the origin.
pub const MIN_MPS_ALPHA2: f64 = 1e-6;

/// `<a|b>` for coherent states `|a>` and `|b>`.
#[inline]
pub fn overlap(a: Complex64, b: Complex64) -> Complex64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// Returns the real part of a Hermitian pair-sum, panicking if the imaginary
/// residue is larger than rounding can explain.
///
/// `scale` is the sum of the magnitudes of the individual summands.
pub(crate) fn hermitian_real(z: Complex64, scale: f64, what: &str) -> f64 {
    let tol = 1e-12 * scale.max(1.0).max(z.re.abs());
    assert!(
        z.im.abs() <= tol,
        "{what}: imaginary residue {:e} exceeds {:e} (real part {:e})",
        z.im,
        tol,
        z.re
    );
    z.re
}

fn check_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// One summand `w |alpha>` of a coherent superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentTerm {
    pub weight: Complex64,
    pub amplitude: Complex64,
}

impl CoherentTerm {
    pub fn new(weight: Complex64, amplitude: Complex64) -> Result<Self> {
        check_finite(weight, "term weight")?;
        check_finite(amplitude, "term amplitude")?;
        Ok(Self { weight, amplitude })
    }
}

/// The six named input states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// Coherent state `|alpha>`.
    Cs,
    /// Even coherent superposition `|i alpha> + |-i alpha>`.
    Ecss,
    Mps0,
    Mps1,
    Mps2,
    Mps3,
}

impl StateKind {
    pub const ALL: [StateKind; 6] = [
        StateKind::Cs,
        StateKind::Ecss,
        StateKind::Mps0,
        StateKind::Mps1,
        StateKind::Mps2,
        StateKind::Mps3,
    ];

    /// The MPS index `j`, if this is a multi-photonic state.
    pub fn mps_index(self) -> Option<u8> {
        match self {
            StateKind::Mps0 => Some(0),
            StateKind::Mps1 => Some(1),
            StateKind::Mps2 => Some(2),
            StateKind::Mps3 => Some(3),
            _ => None,
        }
    }

    pub fn mps(j: u8) -> Option<Self> {
        match j {
            0 => Some(StateKind::Mps0),
            1 => Some(StateKind::Mps1),
            2 => Some(StateKind::Mps2),
            3 => Some(StateKind::Mps3),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StateKind::Cs => "cs",
            StateKind::Ecss => "ecss",
            StateKind::Mps0 => "mps0",
            StateKind::Mps1 => "mps1",
            StateKind::Mps2 => "mps2",
            StateKind::Mps3 => "mps3",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cs" | "coherent" => Ok(StateKind::Cs),
            "ecss" => Ok(StateKind::Ecss),
            "mps0" => Ok(StateKind::Mps0),
            "mps1" => Ok(StateKind::Mps1),
            "mps2" => Ok(StateKind::Mps2),
            "mps3" => Ok(StateKind::Mps3),
            other => Err(format!(
                "unknown state kind '{other}' (expected cs, ecss, mps0, mps1, mps2, mps3)"
            )),
        }
    }
}

/// A finite superposition `sum_i w_i |alpha_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposedState {
    terms: Vec<CoherentTerm>,
    normalized: bool,
}

impl SuperposedState {
    /// Wraps a raw term list without normalizing it.
    pub fn from_terms(terms: Vec<CoherentTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(Self { terms, normalized: false })
    }

    /// Builds a normalized custom superposition.
    pub fn custom(terms: Vec<CoherentTerm>) -> Result<Self> {
        Self::from_terms(terms)?.normalize()
    }

    pub fn vacuum() -> Self {
        Self::coherent(Complex64::new(0.0, 0.0))
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            terms: vec![CoherentTerm { weight: Complex64::new(1.0, 0.0), amplitude: alpha }],
            normalized: true,
        }
    }

    /// Rescales the weights so that the Gram sum is one.
    pub fn normalize(mut self) -> Result<Self> {
        let n = normalization_constant(&self.terms)?;
        for term in &mut self.terms {
            term.weight *= n;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Multiplies every weight by `e^{i theta}`.
    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        for term in &mut self.terms {
            term.weight *= phase;
        }
        self
    }

    /// Largest |alpha_i| over the terms.
    pub fn max_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm()).fold(0.0, f64::max)
    }
}

/// `sum_{i,j} w_i^* w_j <alpha_i|alpha_j>`.
pub fn gram_sum(terms: &[CoherentTerm]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for ti in terms {
        for tj in terms {
            let z = ti.weight.conj() * tj.weight * overlap(ti.amplitude, tj.amplitude);
            scale += z.norm();
            acc += z;
        }
    }
    hermitian_real(acc, scale, "gram sum")
}

/// `(sum_{i,j} w_i^* w_j <alpha_i|alpha_j>)^{-1/2}`.
pub fn normalization_constant(terms: &[CoherentTerm]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::EmptyState);
    }
    for t in terms {
        check_finite(t.weight, "term weight")?;
        check_finite(t.amplitude, "term amplitude")?;
    }
    let gram = gram_sum(terms);
    if !(gram >= DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateState { gram });
    }
    Ok(gram.powf(-0.5))
}

/// Pre-normalization weights `(-i)^{j m}` of MPS_j for `m = 0..3`.
pub fn mps_weights(j: u8) -> [Complex64; 4] {
    let minus_i = Complex64::new(0.0, -1.0);
    std::array::from_fn(|m| minus_i.powu(j as u32 * m as u32))
}

/// The amplitudes `i^m alpha` for `m = 0..3`.
pub fn mps_amplitudes(alpha: Complex64) -> [Complex64; 4] {
    let i = Complex64::new(0.0, 1.0);
    std::array::from_fn(|m| i.powu(m as u32) * alpha)
}

/// Builds and normalizes one of the named states.
pub fn make_state(kind: StateKind, alpha: Complex64) -> Result<SuperposedState> {
    check_finite(alpha, "alpha")?;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let terms = match kind {
        StateKind::Cs => return Ok(SuperposedState::coherent(alpha)),
        StateKind::Ecss => vec![
            CoherentTerm { weight: one, amplitude: i * alpha },
            CoherentTerm { weight: one, amplitude: -i * alpha },
        ],
        _ => {
            let j = kind.mps_index().expect("mps kind");
            if j != 0 && alpha.norm_sqr() < MIN_MPS_ALPHA2 {
                return Err(Error::AmplitudeTooSmall { kind: kind.label(), alpha2: alpha.norm_sqr() });
            }
            mps_weights(j)
                .into_iter()
                .zip(mps_amplitudes(alpha))
                .map(|(weight, amplitude)| CoherentTerm { weight, amplitude })
                .collect()
        }
    };
    SuperposedState::from_terms(terms)?.normalize()
}

/// `<a^dagger a> = sum_{i,j} w_i^* w_j alpha_i^* alpha_j <alpha_i|alpha_j>`.
pub fn mean_photon_number(state: &SuperposedState) -> f64 {
    let terms = state.terms();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for ti in terms {
        for tj in terms {
            let z = ti.weight.conj()
                * tj.weight
                * ti.amplitude.conj()
                * tj.amplitude
                * overlap(ti.amplitude, tj.amplitude);
            scale += z.norm();
            acc += z;
        }
    }
    hermitian_real(acc, scale, "mean photon number").max(0.0)
}

/// Real `alpha` at which `kind` carries `target` mean photons, by bisection.
pub fn alpha_for_mean_photons(kind: StateKind, target: f64) -> Result<f64> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::NonFinite("target mean photon number"));
    }
    let n_at = |a: f64| make_state(kind, Complex64::new(a, 0.0)).map(|s| mean_photon_number(&s));
    let mut lo = if kind.mps_index().unwrap_or(0) == 0 { 0.0 } else { 0.5 };
    if n_at(lo)? > target {
        return Err(Error::InvalidConfig(format!("{kind} cannot carry fewer than {:.6} photons", n_at(lo)?)));
    }
    let mut hi = target.sqrt().max(1.0);
    while n_at(hi)? < target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if n_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
