//! Port-a photon statistics and the two binary-outcome observables.
//!
//! Everything here is a pair-sum over the four-mode output terms. For terms
//! `i, j` with port-a amplitudes `a_i, a_j` the kernels are
//!
//! | quantity | port-a factor                                         |
//! |----------|-------------------------------------------------------|
//! | `P(n)`   | `(a_i^* a_j)^n / n! * e^{-(|a_i|^2+|a_j|^2)/2}`       |
//! | parity   | `<a_i|-a_j>`                                          |
//! | `Z`      | `e^{-(|a_i|^2+|a_j|^2)/2}`                            |
//!
//! multiplied by `w_i^* w_j` and the overlaps of the remaining three modes.

pub mod closed_form;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::{propagate_with_derivative, FourModeOutput, MziConfig, PORT_A};
use crate::states::{hermitian_real, SuperposedState};

const OTHER_MODES: [usize; 3] = [1, 2, 3];

/// Binary-outcome detection scheme at port a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Photon-number parity `(-1)^n`.
    Parity,
    /// Zero / non-zero photon counting, observable `|0><0|`.
    Z,
}

impl Scheme {
    /// Range of the expectation value.
    pub fn range(self) -> (f64, f64) {
        match self {
            Scheme::Parity => (-1.0, 1.0),
            Scheme::Z => (0.0, 1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Parity => "parity",
            Scheme::Z => "z",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parity" | "pi" => Ok(Scheme::Parity),
            "z" | "zero" => Ok(Scheme::Z),
            other => Err(format!("unknown scheme '{other}' (expected parity or z)")),
        }
    }
}

/// `P(n)` at port a for `n = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortDistribution {
    pub probs: Vec<f64>,
    pub cutoff: usize,
    /// Upper bound on `sum_{n > cutoff} P(n)`.
    pub tail_bound: f64,
}

impl PortDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn port_factor(scheme: Scheme, ai: Complex64, aj: Complex64) -> Complex64 {
    let base = -0.5 * (ai.norm_sqr() + aj.norm_sqr());
    match scheme {
        Scheme::Parity => Complex64::new(base, 0.0) - ai.conj() * aj,
        Scheme::Z => Complex64::new(base, 0.0),
    }
}

fn log_rest_overlap(x: &[Complex64; 4], y: &[Complex64; 4]) -> Complex64 {
    OTHER_MODES
        .iter()
        .map(|&m| -0.5 * (x[m].norm_sqr() + y[m].norm_sqr()) + x[m].conj() * y[m])
        .sum()
}

/// Smallest cutoff with sub-1e-12 Poisson tails at the largest port-a amplitude.
pub fn default_cutoff(out: &FourModeOutput) -> usize {
    out.terms
        .iter()
        .map(|t| {
            let mu = t.amps[PORT_A].norm_sqr();
            (mu + 10.0 * mu.sqrt() + 20.0).ceil() as usize
        })
        .max()
        .unwrap_or(20)
}

/// Chernoff bound on `P(X > cutoff)` for `X ~ Poisson(mu)`.
pub fn poisson_tail_bound(mu: f64, cutoff: usize) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let k = (cutoff + 1) as f64;
    if k <= mu {
        return 1.0;
    }
    (-mu + k * (1.0 + (mu / k).ln())).exp().min(1.0)
}

/// `P(n)` at port a.
pub fn photon_probability(out: &FourModeOutput, n: usize) -> Result<f64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    for ti in &out.terms {
        for tj in &out.terms {
            let (ai, aj) = (ti.amps[PORT_A], tj.amps[PORT_A]);
            let z = ai.conj() * aj;
            let log_pow = if n == 0 {
                Complex64::new(0.0, 0.0)
            } else if z.norm() == 0.0 {
                continue;
            } else {
                n as f64 * z.ln()
            };
            let e = port_factor(Scheme::Z, ai, aj) + log_rest_overlap(&ti.amps, &tj.amps) + log_pow - log_fact;
            let v = ti.weight.conj() * tj.weight * e.exp();
            scale += v.norm();
            acc += v;
        }
    }
    checked_probability(n, hermitian_real(acc, scale, "P(n)"))
}

fn checked_probability(n: usize, p: f64) -> Result<f64> {
    if p < -1e-10 {
        return Err(Error::NegativeProbability { n, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `P(n)` for `n = 0..=cutoff`, with `cutoff` from [`default_cutoff`].
pub fn port_distribution(out: &FourModeOutput) -> Result<PortDistribution> {
    port_distribution_to(out, default_cutoff(out))
}

pub fn port_distribution_to(out: &FourModeOutput, cutoff: usize) -> Result<PortDistribution> {
    // P(n) = sum_ij B_ij z_ij^n / n!, accumulated with the running power.
    let mut base = Vec::with_capacity(out.terms.len().pow(2));
    for ti in &out.terms {
        for tj in &out.terms {
            let (ai, aj) = (ti.amps[PORT_A], tj.amps[PORT_A]);
            let b = ti.weight.conj()
                * tj.weight
                * (port_factor(Scheme::Z, ai, aj) + log_rest_overlap(&ti.amps, &tj.amps)).exp();
            base.push((b, ai.conj() * aj));
        }
    }
    let mut probs = Vec::with_capacity(cutoff + 1);
    let mut running: Vec<Complex64> = base.iter().map(|(b, _)| *b).collect();
    for n in 0..=cutoff {
        if n > 0 {
            for (r, (_, z)) in running.iter_mut().zip(&base) {
                *r *= z / n as f64;
            }
        }
        let acc: Complex64 = running.iter().sum();
        let scale: f64 = running.iter().map(|r| r.norm()).sum();
        probs.push(checked_probability(n, hermitian_real(acc, scale, "P(n)"))?);
    }
    let amp_tail: f64 = out
        .terms
        .iter()
        .map(|t| t.weight.norm() * poisson_tail_bound(t.amps[PORT_A].norm_sqr(), cutoff).sqrt())
        .sum();
    Ok(PortDistribution { probs, cutoff, tail_bound: (amp_tail * amp_tail).min(1.0) })
}

fn expectation_sum(out: &FourModeOutput, scheme: Scheme) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for ti in &out.terms {
        for tj in &out.terms {
            let e = port_factor(scheme, ti.amps[PORT_A], tj.amps[PORT_A]) + log_rest_overlap(&ti.amps, &tj.amps);
            let v = ti.weight.conj() * tj.weight * e.exp();
            scale += v.norm();
            acc += v;
        }
    }
    hermitian_real(acc, scale, scheme.label())
}

/// `<(-1)^n>` at port a, in closed form (no sum over n).
pub fn parity_expectation(out: &FourModeOutput) -> f64 {
    expectation_sum(out, Scheme::Parity).clamp(-1.0, 1.0)
}

/// `<|0><0|>` at port a, i.e. `P(0)`.
pub fn z_expectation(out: &FourModeOutput) -> f64 {
    expectation_sum(out, Scheme::Z).clamp(0.0, 1.0)
}

pub fn expectation(out: &FourModeOutput, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Parity => parity_expectation(out),
        Scheme::Z => z_expectation(out),
    }
}

/// `(P(+), P(-))`: probabilities of an even and an odd count at port a.
pub fn binary_probabilities(out: &FourModeOutput) -> (f64, f64) {
    let norm = out.norm();
    let parity = expectation_sum(out, Scheme::Parity);
    (((norm + parity) / 2.0).clamp(0.0, 1.0), ((norm - parity) / 2.0).clamp(0.0, 1.0))
}

/// Analytic `d<X>/dphi` for the given inputs and scheme.
///
/// Each term's amplitudes are linear in the interferometer map, so the
/// derivative of every pair kernel `exp(E_ij)` is `exp(E_ij) dE_ij/dphi`.
pub fn expectation_derivative(
    state_a: &SuperposedState,
    state_b: &SuperposedState,
    config: &MziConfig,
    scheme: Scheme,
) -> f64 {
    let (out, damps) = propagate_with_derivative(state_a, state_b, config);
    let port_sign = match scheme {
        Scheme::Parity => -1.0,
        Scheme::Z => 0.0,
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (ti, dxi) in out.terms.iter().zip(&damps) {
        for (tj, dxj) in out.terms.iter().zip(&damps) {
            let (xi, xj) = (&ti.amps, &tj.amps);
            let e = port_factor(scheme, xi[PORT_A], xj[PORT_A]) + log_rest_overlap(xi, xj);
            let mut de = Complex64::new(0.0, 0.0);
            for m in 0..4 {
                de -= (xi[m].conj() * dxi[m]).re + (xj[m].conj() * dxj[m]).re;
            }
            for &m in &OTHER_MODES {
                de += dxi[m].conj() * xj[m] + xi[m].conj() * dxj[m];
            }
            de += port_sign * (dxi[PORT_A].conj() * xj[PORT_A] + xi[PORT_A].conj() * dxj[PORT_A]);
            let v = ti.weight.conj() * tj.weight * e.exp() * de;
            scale += v.norm();
            acc += v;
        }
    }
    hermitian_real(acc, scale, "expectation derivative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::propagate;
    use crate::states::{make_state, StateKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poisson(mu: f64, n: usize) -> f64 {
        let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        (-mu + n as f64 * mu.ln() - lf).exp()
    }

    #[test]
    fn coherent_input_gives_poisson_counts() {
        let alpha = 1.7;
        for &(phi, r) in &[(0.4, 0.0), (1.9, 0.3)] {
            let cfg = MziConfig::new(phi, r).unwrap();
            let out = propagate(&SuperposedState::coherent(c(alpha, 0.0)), &SuperposedState::vacuum(), &cfg);
            let p = alpha * alpha * cfg.loss_t.powi(2) * (phi / 2.0).sin().powi(2);
            let dist = port_distribution(&out).unwrap();
            for n in 0..15 {
                assert!((dist.probs[n] - poisson(p, n)).abs() < 1e-14);
                assert!((photon_probability(&out, n).unwrap() - poisson(p, n)).abs() < 1e-14);
            }
            assert!((parity_expectation(&out) - (-2.0 * p).exp()).abs() < 1e-14);
            assert!((z_expectation(&out) - (-p).exp()).abs() < 1e-14);
            let (pp, pm) = binary_probabilities(&out);
            assert!((pp - (1.0 + (-2.0 * p).exp()) / 2.0).abs() < 1e-14);
            assert!((pm - (1.0 - (-2.0 * p).exp()) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_phase_with_vacuum_second_port_is_dark() {
        for kind in StateKind::ALL {
            let a = make_state(kind, c(1.3, 0.4)).unwrap();
            let out = propagate(&a, &SuperposedState::vacuum(), &MziConfig::lossless(0.0));
            let dist = port_distribution(&out).unwrap();
            assert!((dist.probs[0] - 1.0).abs() < 1e-12);
            assert!(dist.probs[1..].iter().all(|p| *p < 1e-12));
            let (pp, pm) = binary_probabilities(&out);
            assert!((pp - 1.0).abs() < 1e-12 && pm.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_phase_with_coherent_second_port() {
        let zeta2: f64 = 2.3;
        for kind in StateKind::ALL {
            let a = make_state(kind, c(1.1, 0.0)).unwrap();
            let b = SuperposedState::coherent(c(0.0, zeta2.sqrt()));
            let out = propagate(&a, &b, &MziConfig::lossless(0.0));
            assert!((parity_expectation(&out) - (-2.0 * zeta2).exp()).abs() < 1e-12);
            assert!((z_expectation(&out) - (-zeta2).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_matches_alternating_sum() {
        let b = SuperposedState::coherent(c(0.0, 1.2));
        for kind in StateKind::ALL {
            let a = make_state(kind, c(1.5, 0.0)).unwrap();
            for &(phi, r) in &[(0.3, 0.0), (1.1, 0.2), (2.7, 0.5)] {
                let out = propagate(&a, &b, &MziConfig::new(phi, r).unwrap());
                let dist = port_distribution(&out).unwrap();
                let alt: f64 = dist.probs.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum();
                assert!((alt - parity_expectation(&out)).abs() < 1e-10);
                assert_eq!(z_expectation(&out), z_expectation(&out));
                assert!((dist.probs[0] - z_expectation(&out)).abs() < 1e-12);
                let total = dist.total();
                assert!(total <= 1.0 + 1e-10 && total >= 1.0 - dist.tail_bound - 1e-10);
                assert!(dist.tail_bound < 1e-12);
                let (pp, pm) = binary_probabilities(&out);
                assert!((pp + pm - 1.0).abs() < 1e-10);
                assert!((pp - pm - parity_expectation(&out)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_vanishes_at_zero_phase_with_vacuum() {
        for kind in StateKind::ALL {
            let a = make_state(kind, c(1.4, 0.0)).unwrap();
            for scheme in [Scheme::Parity, Scheme::Z] {
                let d = expectation_derivative(&a, &SuperposedState::vacuum(), &MziConfig::new(0.0, 0.3).unwrap(), scheme);
                assert!(d.abs() < 1e-12, "{kind} {scheme}: {d}");
            }
        }
    }

    #[test]
    fn coherent_parity_derivative_closed_form() {
        let alpha2: f64 = 2.0;
        for &phi in &[0.2, 0.9, 2.5] {
            let cfg = MziConfig::new(phi, 0.25).unwrap();
            let t2 = cfg.loss_t.powi(2);
            let p = alpha2 * t2 * (phi / 2.0).sin().powi(2);
            let expect = -alpha2 * t2 * phi.sin() * (-2.0 * p).exp();
            let d = expectation_derivative(
                &SuperposedState::coherent(c(alpha2.sqrt(), 0.0)),
                &SuperposedState::vacuum(),
                &cfg,
                Scheme::Parity,
            );
            assert!((d - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_probability_is_reported() {
        assert!(matches!(checked_probability(3, -2e-10), Err(Error::NegativeProbability { n: 3, .. })));
        assert_eq!(checked_probability(0, -5e-11).unwrap(), 0.0);
        assert_eq!(checked_probability(0, 1.0 + 1e-14).unwrap(), 1.0);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("parity".parse::<Scheme>().unwrap(), Scheme::Parity);
        assert_eq!("Z".parse::<Scheme>().unwrap(), Scheme::Z);
        assert!("counts".parse::<Scheme>().is_err());
    }
}
