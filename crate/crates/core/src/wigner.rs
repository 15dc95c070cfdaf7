//! Wigner function of single-mode states built from coherent dyads.
//!
//! A state is held as `rho = sum_k c_k |ket_k><bra_k|`. Each dyad contributes
//! `(2/pi) c_k <bra_k|ket_k> exp(-2 (lambda^* - bra_k^*)(lambda - ket_k))`,
//! so `|W| <= 2/pi` and `W(0) = (2/pi) <(-1)^n>`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::interferometer::{product_overlap, FourModeOutput, PORT_A};
use crate::states::{hermitian_real, overlap, SuperposedState};

pub const WIGNER_BOUND: f64 = 2.0 / PI;

/// `lambda = y1 + i y2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub y1: f64,
    pub y2: f64,
}

impl PhasePoint {
    pub fn new(y1: f64, y2: f64) -> Self {
        PhasePoint { y1, y2 }
    }

    pub fn lambda(self) -> Complex64 {
        Complex64::new(self.y1, self.y2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyad {
    pub coef: Complex64,
    pub ket: Complex64,
    pub bra: Complex64,
}

/// Single-mode density operator as a sum of coherent dyads.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadState {
    pub dyads: Vec<Dyad>,
}

impl DyadState {
    pub fn from_pure(state: &SuperposedState) -> Self {
        let terms = state.terms();
        let mut dyads = Vec::with_capacity(terms.len() * terms.len());
        for ti in terms {
            for tj in terms {
                dyads.push(Dyad { coef: tj.weight * ti.weight.conj(), ket: tj.amplitude, bra: ti.amplitude });
            }
        }
        DyadState { dyads }
    }

    /// Port-a state with modes b, E_a, E_b traced out.
    pub fn reduced_port_a(out: &FourModeOutput) -> Self {
        let mut dyads = Vec::with_capacity(out.terms.len().pow(2));
        for ti in &out.terms {
            for tj in &out.terms {
                let rest = product_overlap(&ti.amps, &tj.amps, &[1, 2, 3]);
                dyads.push(Dyad {
                    coef: tj.weight * ti.weight.conj() * rest,
                    ket: tj.amps[PORT_A],
                    bra: ti.amps[PORT_A],
                });
            }
        }
        DyadState { dyads }
    }

    pub fn trace(&self) -> f64 {
        let (acc, scale) = self.dyads.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(acc, scale), d| {
            let v = d.coef * overlap(d.bra, d.ket);
            (acc + v, scale + v.norm())
        });
        hermitian_real(acc, scale, "trace")
    }

    pub fn max_amplitude(&self) -> f64 {
        self.dyads.iter().map(|d| d.ket.norm().max(d.bra.norm())).fold(0.0, f64::max)
    }
}

pub fn wigner_point(state: &DyadState, point: PhasePoint) -> f64 {
    let lambda = point.lambda();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for d in &state.dyads {
        let e = -2.0 * (lambda.conj() - d.bra.conj()) * (lambda - d.ket);
        let v = d.coef * overlap(d.bra, d.ket) * e.exp();
        scale += v.norm();
        acc += v;
    }
    WIGNER_BOUND * hermitian_real(acc, scale, "wigner")
}

/// Uniform axis of `n` points on `[lo, hi]`.
pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub y1_axis: Vec<f64>,
    pub y2_axis: Vec<f64>,
    /// `values[i2 * y1_axis.len() + i1]`.
    pub values: Vec<f64>,
    pub cell_area: f64,
}

impl WignerGrid {
    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.values[i2 * self.y1_axis.len() + i1]
    }

    /// `sum W * cell_area`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area
    }
}

/// Evaluates on `resolution x resolution` points over the given ranges.
pub fn wigner_grid(state: &DyadState, y1_range: (f64, f64), y2_range: (f64, f64), resolution: usize) -> WignerGrid {
    assert!(resolution >= 2, "resolution must be at least 2");
    let y1_axis = axis(y1_range.0, y1_range.1, resolution);
    let y2_axis = axis(y2_range.0, y2_range.1, resolution);
    let cell_area = (y1_axis[1] - y1_axis[0]) * (y2_axis[1] - y2_axis[0]);
    let values = y2_axis
        .par_iter()
        .flat_map_iter(|&y2| y1_axis.iter().map(move |&y1| wigner_point(state, PhasePoint::new(y1, y2))))
        .collect();
    WignerGrid { y1_axis, y2_axis, values, cell_area }
}

/// Half-width `max|amplitude| + 5` of the default square window.
pub fn default_half_width(state: &DyadState) -> f64 {
    state.max_amplitude() + 5.0
}

/// Default window and 201 points per axis.
pub fn default_grid(state: &DyadState) -> WignerGrid {
    let h = default_half_width(state);
    wigner_grid(state, (-h, h), (-h, h), 201)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativitySummary {
    pub min_value: f64,
    pub min_location: PhasePoint,
    /// `sum_{W < 0} |W| cell_area`.
    pub negative_volume: f64,
}

pub fn negativity_summary(grid: &WignerGrid) -> NegativitySummary {
    let n1 = grid.y1_axis.len();
    let (k, &min_value) = grid
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid has at least four points");
    let negative_volume = grid.values.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>() * grid.cell_area;
    NegativitySummary {
        min_value,
        min_location: PhasePoint::new(grid.y1_axis[k % n1], grid.y2_axis[k / n1]),
        negative_volume,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::closed_form::{norm_sq, Coefficients, Variant};
    use crate::detection::parity_expectation;
    use crate::interferometer::{propagate, MziConfig};
    use crate::states::{make_state, StateKind};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pure(kind: StateKind, alpha: Complex64) -> DyadState {
        DyadState::from_pure(&make_state(kind, alpha).unwrap())
    }

    /// Closed-form expression for `A|a> + B|ia> + C|-a> + D|-ia>`.
    fn closed_wigner(coef: &Coefficients, alpha: Complex64, lambda: Complex64, variant: Variant) -> f64 {
        let Coefficients { a, b, c, d, j } = *coef;
        let (x1, x2, y1, y2) = (alpha.re, alpha.im, lambda.re, lambda.im);
        let (a2, l2) = (alpha.norm_sqr(), lambda.norm_sqr());
        let p1 = x1 * y1 + x2 * y2;
        let q1 = x1 * y2 - x2 * y1;
        let jpi = j as f64 * PI;
        let u = 2.0 * (p1 - q1);
        let v = -2.0 * l2 - a2;
        let up = a2 + jpi / 2.0;
        let s = -2.0 * (a2 + l2);
        let (ab, cd_phase, prefactor) = match variant {
            Variant::Printed => (
                (u + v).exp() * (u + up).cos(),
                u - 4.0 * p1 - a2 + jpi / 2.0,
                2.0 * norm_sq(coef, a2, Variant::Printed).sqrt() / PI,
            ),
            Variant::Corrected => {
                let w = 2.0 * (p1 + q1);
                ((w + v).exp() * (w - up).cos(), u - 4.0 * p1 - up, 2.0 * norm_sq(coef, a2, Variant::Corrected) / PI)
            }
        };
        let body = s.exp()
            * (a * a * (4.0 * p1).exp() + b * b * (4.0 * q1).exp() + c * c * (-4.0 * p1).exp() + d * d * (-4.0 * q1).exp())
            + 2.0 * (a * b * ab + a * d * (u + v).exp() * (-u + up).cos())
            + 2.0 * (-2.0 * l2).exp() * (a * c * (4.0 * q1 - jpi).cos() + b * d * (4.0 * p1 - jpi).cos())
            + 2.0 * c * d * (u - 4.0 * p1 + v).exp() * cd_phase.cos()
            + 2.0 * b * c * (-u + v).exp() * (u + up).cos();
        prefactor * body
    }

    #[test]
    fn coherent_peak_and_vacuum() {
        let alpha = c(1.0, 1.0);
        let cs = DyadState::from_pure(&SuperposedState::coherent(alpha));
        assert!((wigner_point(&cs, PhasePoint::new(1.0, 1.0)) - WIGNER_BOUND).abs() < 1e-15);
        let vac = DyadState::from_pure(&SuperposedState::vacuum());
        assert!((wigner_point(&vac, PhasePoint::new(0.0, 0.0)) - WIGNER_BOUND).abs() < 1e-15);
    }

    #[test]
    fn grids_are_normalized_and_bounded() {
        for kind in StateKind::ALL {
            let st = pure(kind, c(1.0, 1.0));
            let grid = default_grid(&st);
            assert!((grid.integral() - 1.0).abs() < 1e-3, "{kind}: {}", grid.integral());
            assert!(grid.values.iter().all(|w| w.abs() <= WIGNER_BOUND + 1e-9));
        }
        let cs = wigner_grid(&pure(StateKind::Cs, c(1.0, 1.0)), (-5.0, 5.0), (-5.0, 5.0), 201);
        assert!((cs.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn negativity_pattern() {
        let summary = |kind| negativity_summary(&default_grid(&pure(kind, c(1.0, 1.0))));
        let cs = summary(StateKind::Cs);
        assert!(cs.min_value >= -1e-12 && cs.negative_volume < 1e-12);
        let m0 = summary(StateKind::Mps0);
        let m1 = summary(StateKind::Mps1);
        let m3 = summary(StateKind::Mps3);
        assert!(m0.min_value < 0.0 && m1.min_value < 0.0 && m3.min_value < 0.0);
        assert!(m1.min_value.abs() > m0.min_value.abs());
        assert!(m1.negative_volume > 0.0);
    }

    #[test]
    fn matches_closed_form_for_mps() {
        for j in 0..4u8 {
            let st = pure(StateKind::mps(j).unwrap(), c(1.0, 1.0));
            let coef = Coefficients::mps(j);
            for &(y1, y2) in &[(0.0, 0.0), (0.3, -1.2), (1.5, 0.7), (-0.8, 2.2)] {
                let lam = c(y1, y2);
                let w = wigner_point(&st, PhasePoint::new(y1, y2));
                let closed = closed_wigner(&coef, c(1.0, 1.0), lam, Variant::Corrected);
                assert!((w - closed).abs() < 1e-10, "j={j} at ({y1},{y2}): {w} vs {closed}");
            }
            let printed = closed_wigner(&coef, c(1.0, 1.0), c(0.3, -1.2), Variant::Printed);
            assert!((printed - wigner_point(&st, PhasePoint::new(0.3, -1.2))).abs() > 1e-3);
        }
    }

    #[test]
    fn parity_identity_on_fixed_points() {
        let b = SuperposedState::coherent(c(0.8, 0.0));
        for kind in StateKind::ALL {
            let a = make_state(kind, c(1.3, 0.2)).unwrap();
            let out = propagate(&a, &b, &MziConfig::new(0.9, 0.3).unwrap());
            let reduced = DyadState::reduced_port_a(&out);
            assert!((reduced.trace() - 1.0).abs() < 1e-12);
            let w0 = wigner_point(&reduced, PhasePoint::new(0.0, 0.0));
            assert!((PI / 2.0 * w0 - parity_expectation(&out)).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn parity_identity(kind in 0usize..6, a2 in 0.2f64..6.0, z2 in 0.0f64..4.0, phi in -3.1f64..3.1, r in 0.0f64..0.9) {
            let kind = StateKind::ALL[kind];
            let a = make_state(kind, c(a2.sqrt(), 0.0)).unwrap();
            let b = SuperposedState::coherent(c(z2.sqrt(), 0.0));
            let out = propagate(&a, &b, &MziConfig::new(phi, r).unwrap());
            let w0 = wigner_point(&DyadState::reduced_port_a(&out), PhasePoint::new(0.0, 0.0));
            prop_assert!((PI / 2.0 * w0 - parity_expectation(&out)).abs() < 1e-10);
        }

        #[test]
        fn bounded_everywhere(kind in 0usize..6, re in -2.0f64..2.0, im in -2.0f64..2.0, y1 in -4.0f64..4.0, y2 in -4.0f64..4.0) {
            prop_assume!(re * re + im * im > 0.05);
            let st = pure(StateKind::ALL[kind], c(re, im));
            prop_assert!(wigner_point(&st, PhasePoint::new(y1, y2)).abs() <= WIGNER_BOUND + 1e-9);
        }
    }
}
