//! Lossy Mach-Zehnder propagation of coherent superpositions.
//!
//! The interferometer is a passive linear network, so a product of coherent
//! states `|alpha>_a |zeta>_b` leaves it as a product of coherent states over
//! the two output ports and the two loss-environment modes. The amplitudes are
//! a fixed 4x2 linear map of `(alpha, zeta)`:
//!
//! ```text
//! BS1 -> phase e^{i phi} on arm 1 -> loss (t, r) on both arms -> BS2
//! ```
//!
//! Both beam splitters are 50:50 with reflection phase `i`. Each loss splitter
//! keeps `t` of the arm amplitude and sends `i r` of it into its environment mode.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{overlap, SuperposedState};

/// Output mode indices.
pub const PORT_A: usize = 0;
pub const PORT_B: usize = 1;
pub const ENV_A: usize = 2;
pub const ENV_B: usize = 3;

/// Phase shift and arm loss of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziConfig {
    pub phi: f64,
    pub loss_t: f64,
    pub loss_r: f64,
}

impl MziConfig {
    /// Configuration with reflectivity `loss_r` and `loss_t = sqrt(1 - loss_r^2)`.
    pub fn new(phi: f64, loss_r: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidConfig(format!("phi must be finite, got {phi}")));
        }
        if !(0.0..=1.0).contains(&loss_r) {
            return Err(Error::InvalidConfig(format!("loss_r must lie in [0, 1], got {loss_r}")));
        }
        Ok(Self { phi, loss_t: (1.0 - loss_r * loss_r).sqrt(), loss_r })
    }

    pub fn lossless(phi: f64) -> Self {
        Self { phi, loss_t: 1.0, loss_r: 0.0 }
    }

    /// Explicit `(t, r)` pair; rejected unless `t^2 + r^2 = 1` within 1e-12.
    pub fn with_t_r(phi: f64, loss_t: f64, loss_r: f64) -> Result<Self> {
        let cfg = Self { phi, loss_t, loss_r };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.phi.is_finite() {
            return Err(Error::InvalidConfig(format!("phi must be finite, got {}", self.phi)));
        }
        for (name, v) in [("loss_t", self.loss_t), ("loss_r", self.loss_r)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        let s = self.loss_t.powi(2) + self.loss_r.powi(2);
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("t^2 + r^2 = {s}, expected 1")));
        }
        Ok(())
    }

    pub fn at_phase(&self, phi: f64) -> Self {
        Self { phi, ..*self }
    }
}

/// Linear map from input amplitudes `(alpha, zeta)` to `(port_a, port_b, E_a, E_b)`.
pub type ModeTransform = [[Complex64; 2]; 4];

fn balanced_splitter() -> [[Complex64; 2]; 2] {
    let s = FRAC_1_SQRT_2;
    [[Complex64::new(s, 0.0), Complex64::new(0.0, s)], [Complex64::new(0.0, s), Complex64::new(s, 0.0)]]
}

/// Composes `BS2 . loss . U(phi) . BS1` with arm factors `(arm1, arm2)`:
/// `(e^{i phi}, 1)` gives the map, `(i e^{i phi}, 0)` its phi-derivative.
fn compose(cfg: &MziConfig, arm1: Complex64, arm2: Complex64) -> ModeTransform {
    let bs = balanced_splitter();
    let i = Complex64::new(0.0, 1.0);
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 4];
    for input in 0..2 {
        // arms after BS1, phase shifter
        let arm = [bs[0][input] * arm1, bs[1][input] * arm2];
        let kept = [arm[0] * cfg.loss_t, arm[1] * cfg.loss_t];
        out[PORT_A][input] = bs[0][0] * kept[0] + bs[0][1] * kept[1];
        out[PORT_B][input] = bs[1][0] * kept[0] + bs[1][1] * kept[1];
        out[ENV_A][input] = i * cfg.loss_r * arm[0];
        out[ENV_B][input] = i * cfg.loss_r * arm[1];
    }
    out
}

/// The 4x2 isometry sending `(alpha, zeta)` to the output mode amplitudes.
pub fn mode_transform(cfg: &MziConfig) -> ModeTransform {
    compose(cfg, Complex64::from_polar(1.0, cfg.phi), Complex64::new(1.0, 0.0))
}

/// Element-wise `d/dphi` of [`mode_transform`].
pub fn mode_transform_derivative(cfg: &MziConfig) -> ModeTransform {
    compose(cfg, Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, cfg.phi), Complex64::new(0.0, 0.0))
}

pub fn apply(map: &ModeTransform, alpha: Complex64, zeta: Complex64) -> [Complex64; 4] {
    std::array::from_fn(|m| map[m][0] * alpha + map[m][1] * zeta)
}

/// One weighted four-mode coherent product `w |a, b, E_a, E_b>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourModeTerm {
    pub weight: Complex64,
    pub amps: [Complex64; 4],
}

/// The interferometer output as a superposition of four-mode coherent products.
#[derive(Debug, Clone, PartialEq)]
pub struct FourModeOutput {
    pub terms: Vec<FourModeTerm>,
    pub config: MziConfig,
}

/// Product of single-mode overlaps over the modes selected by `modes`.
pub(crate) fn product_overlap(x: &[Complex64; 4], y: &[Complex64; 4], modes: &[usize]) -> Complex64 {
    modes.iter().map(|&m| overlap(x[m], y[m])).product()
}

impl FourModeOutput {
    /// `sum_{i,j} w_i^* w_j prod_m <amps_i[m]|amps_j[m]>`.
    pub fn norm(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for ti in &self.terms {
            for tj in &self.terms {
                let z = ti.weight.conj() * tj.weight * product_overlap(&ti.amps, &tj.amps, &[0, 1, 2, 3]);
                scale += z.norm();
                acc += z;
            }
        }
        crate::states::hermitian_real(acc, scale, "four-mode norm")
    }

    /// Mean photon number in each of the four output modes.
    pub fn mode_mean_photons(&self) -> [f64; 4] {
        std::array::from_fn(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut scale = 0.0;
            for ti in &self.terms {
                for tj in &self.terms {
                    let z = ti.weight.conj()
                        * tj.weight
                        * ti.amps[m].conj()
                        * tj.amps[m]
                        * product_overlap(&ti.amps, &tj.amps, &[0, 1, 2, 3]);
                    scale += z.norm();
                    acc += z;
                }
            }
            crate::states::hermitian_real(acc, scale, "mode mean photons")
        })
    }
}

/// Propagates `state_a (x) state_b` through the interferometer.
///
/// The output has one term per pair of input terms, in row-major order over
/// `(terms_a, terms_b)`.
pub fn propagate(state_a: &SuperposedState, state_b: &SuperposedState, config: &MziConfig) -> FourModeOutput {
    let map = mode_transform(config);
    let terms = state_a
        .terms()
        .iter()
        .flat_map(|ta| {
            state_b.terms().iter().map(move |tb| FourModeTerm {
                weight: ta.weight * tb.weight,
                amps: apply(&map, ta.amplitude, tb.amplitude),
            })
        })
        .collect();
    FourModeOutput { terms, config: *config }
}

/// Like [`propagate`], also returning `d amps / d phi` for each term.
pub fn propagate_with_derivative(
    state_a: &SuperposedState,
    state_b: &SuperposedState,
    config: &MziConfig,
) -> (FourModeOutput, Vec<[Complex64; 4]>) {
    let out = propagate(state_a, state_b, config);
    let dmap = mode_transform_derivative(config);
    let damps = state_a
        .terms()
        .iter()
        .flat_map(|ta| state_b.terms().iter().map(move |tb| apply(&dmap, ta.amplitude, tb.amplitude)))
        .collect();
    (out, damps)
}
