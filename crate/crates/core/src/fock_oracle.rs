//! Truncated two-mode Fock-space simulation of the interferometer.
//!
//! The basis holds every `|n_a, n_b>` with `n_a + n_b <= cutoff`, stored block
//! by block in total photon number `N`. Beam splitters act within a block. Loss
//! is a pure-loss Kraus channel on each arm; [`simulate`] unravels it into one
//! pure branch per pair of Kraus indices, [`FockDensity`] applies it to a
//! density matrix.
//!
//! Nothing here uses the coherent-state pair sums.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::MziConfig;
use crate::states::SuperposedState;

const TAIL_LIMIT: f64 = 1e-10;
const AUTO_TAIL: f64 = 1e-14;
const BRANCH_FLOOR: f64 = 1e-22;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Offset of block `N` in the flattened basis.
fn block_start(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Basis size for a total-number cutoff.
pub fn basis_len(cutoff: usize) -> usize {
    block_start(cutoff + 1)
}

/// Index of `|n_a, n_b>`.
pub fn index(n_a: usize, n_b: usize) -> usize {
    block_start(n_a + n_b) + n_a
}

/// Fock coefficients `<n|psi>` for `n = 0..len` of a coherent superposition.
pub fn single_mode_coefficients(state: &SuperposedState, len: usize) -> Vec<Complex64> {
    let mut out = vec![zero(); len];
    for term in state.terms() {
        let alpha = term.amplitude;
        let mut c = term.weight * (-0.5 * alpha.norm_sqr()).exp();
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                c *= alpha / (n as f64).sqrt();
            }
            *slot += c;
        }
    }
    out
}

fn single_mode_len(state: &SuperposedState) -> usize {
    let mu = state.max_amplitude().powi(2);
    (mu + 14.0 * mu.sqrt() + 40.0).ceil() as usize
}

/// Two-mode pure state in the total-number-truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub cutoff: usize,
    pub amplitudes: Vec<Complex64>,
    /// Probability mass outside the basis.
    pub tail: f64,
}

impl FockVector {
    pub fn vacuum(cutoff: usize) -> Self {
        let mut amplitudes = vec![zero(); basis_len(cutoff)];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        FockVector { cutoff, amplitudes, tail: 0.0 }
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> Complex64 {
        if n_a + n_b > self.cutoff {
            return zero();
        }
        self.amplitudes[index(n_a, n_b)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `P(n)` for mode a, `n = 0..=cutoff`.
    pub fn mode_a_distribution(&self) -> Vec<f64> {
        let mut probs = vec![0.0; self.cutoff + 1];
        accumulate_mode_a(&self.amplitudes, self.cutoff, &mut probs);
        probs
    }

    pub fn mean_photons(&self) -> (f64, f64) {
        let (mut na, mut nb) = (0.0, 0.0);
        for n in 0..=self.cutoff {
            for p in 0..=n {
                let w = self.amplitudes[block_start(n) + p].norm_sqr();
                na += p as f64 * w;
                nb += (n - p) as f64 * w;
            }
        }
        (na, nb)
    }

    /// Multiplies `|n_a, n_b>` by `e^{i phi n_a}`.
    pub fn apply_phase(&mut self, phi: f64) {
        for n in 0..=self.cutoff {
            for p in 0..=n {
                self.amplitudes[block_start(n) + p] *= Complex64::from_polar(1.0, phi * p as f64);
            }
        }
    }
}

fn accumulate_mode_a(amps: &[Complex64], cutoff: usize, probs: &mut [f64]) {
    for n in 0..=cutoff {
        let block = &amps[block_start(n)..block_start(n + 1)];
        for (p, c) in block.iter().enumerate() {
            probs[p] += c.norm_sqr();
        }
    }
}

/// Smallest total-number cutoff whose truncated mass is below `1e-14`.
pub fn auto_cutoff(state_a: &SuperposedState, state_b: &SuperposedState) -> usize {
    let ca = single_mode_coefficients(state_a, single_mode_len(state_a));
    let cb = single_mode_coefficients(state_b, single_mode_len(state_b));
    let total = total_number_distribution(&ca, &cb);
    let mut kept = 0.0;
    for (n, w) in total.iter().enumerate() {
        kept += w;
        if 1.0 - kept < AUTO_TAIL && n >= 4 {
            return n;
        }
    }
    total.len() - 1
}

fn total_number_distribution(ca: &[Complex64], cb: &[Complex64]) -> Vec<f64> {
    let mut total = vec![0.0; ca.len() + cb.len() - 1];
    for (i, a) in ca.iter().enumerate() {
        for (j, b) in cb.iter().enumerate() {
            total[i + j] += a.norm_sqr() * b.norm_sqr();
        }
    }
    total
}

/// Product state `state_a (x) state_b` truncated at total number `cutoff`.
pub fn encode(state_a: &SuperposedState, state_b: &SuperposedState, cutoff: usize) -> Result<FockVector> {
    let ca = single_mode_coefficients(state_a, (cutoff + 1).max(single_mode_len(state_a)));
    let cb = single_mode_coefficients(state_b, (cutoff + 1).max(single_mode_len(state_b)));
    let mut amplitudes = vec![zero(); basis_len(cutoff)];
    for n in 0..=cutoff {
        for p in 0..=n {
            amplitudes[block_start(n) + p] = ca[p] * cb[n - p];
        }
    }
    let v = FockVector { cutoff, tail: 0.0, amplitudes };
    let tail = (1.0 - v.norm_sqr()).max(0.0);
    if tail > TAIL_LIMIT {
        return Err(Error::CutoffTooSmall { cutoff, tail });
    }
    Ok(FockVector { tail, ..v })
}

/// 50:50 beam splitter `a -> (a + i b)/sqrt2`, `b -> (i a + b)/sqrt2`, one
/// dense block per total photon number.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    pub cutoff: usize,
    /// `blocks[N][p_out * (N + 1) + p_in]`.
    blocks: Vec<Vec<Complex64>>,
}

/// Applies `(u a^dag + v b^dag)` to a block-`N-1` vector, giving block `N`.
fn raise(src: &[Complex64], u: Complex64, v: Complex64) -> Vec<Complex64> {
    let n = src.len();
    let mut out = vec![zero(); n + 1];
    for (p, c) in src.iter().enumerate() {
        out[p + 1] += u * ((p + 1) as f64).sqrt() * c;
        out[p] += v * ((n - p) as f64).sqrt() * c;
    }
    out
}

pub fn beam_splitter_unitary(cutoff: usize) -> BeamSplitter {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (one, i) = (Complex64::new(s, 0.0), Complex64::new(0.0, s));
    // columns[N][p] = U|p, N - p>
    let mut columns: Vec<Vec<Vec<Complex64>>> = vec![vec![vec![Complex64::new(1.0, 0.0)]]];
    for n in 1..=cutoff {
        let prev = &columns[n - 1];
        let mut cols = Vec::with_capacity(n + 1);
        // |0, n>: raise |0, n-1> with b^dag
        cols.push(raise(&prev[0], i, one).into_iter().map(|c| c / (n as f64).sqrt()).collect::<Vec<_>>());
        for p in 1..=n {
            let col = raise(&prev[p - 1], one, i);
            cols.push(col.into_iter().map(|c| c / (p as f64).sqrt()).collect());
        }
        columns.push(cols);
    }
    let blocks = columns
        .into_iter()
        .enumerate()
        .map(|(n, cols)| {
            let mut m = vec![zero(); (n + 1) * (n + 1)];
            for (p_in, col) in cols.iter().enumerate() {
                for (p_out, c) in col.iter().enumerate() {
                    m[p_out * (n + 1) + p_in] = *c;
                }
            }
            m
        })
        .collect();
    BeamSplitter { cutoff, blocks }
}

impl BeamSplitter {
    pub fn block(&self, n: usize) -> &[Complex64] {
        &self.blocks[n]
    }

    /// `U` applied to a flattened vector of cutoff `<= self.cutoff`.
    pub fn apply_slice(&self, amps: &[Complex64], cutoff: usize) -> Vec<Complex64> {
        let mut out = vec![zero(); amps.len()];
        for n in 0..=cutoff {
            let (s, d) = (block_start(n), n + 1);
            let m = &self.blocks[n];
            for p_out in 0..d {
                let row = &m[p_out * d..(p_out + 1) * d];
                out[s + p_out] = row.iter().zip(&amps[s..s + d]).map(|(u, c)| u * c).sum();
            }
        }
        out
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector { cutoff: v.cutoff, amplitudes: self.apply_slice(&v.amplitudes, v.cutoff), tail: v.tail }
    }
}

/// `K_k |n> = sqrt(C(n, k)) t^{n-k} r^k |n - k>` as a table `[k][n]`.
fn kraus_table(cutoff: usize, t: f64, r: f64) -> Vec<Vec<f64>> {
    let mut log_fact = vec![0.0; cutoff + 1];
    for n in 1..=cutoff {
        log_fact[n] = log_fact[n - 1] + (n as f64).ln();
    }
    (0..=cutoff)
        .map(|k| {
            (0..=cutoff)
                .map(|n| {
                    if n < k {
                        0.0
                    } else {
                        (0.5 * (log_fact[n] - log_fact[k] - log_fact[n - k])).exp() * t.powi((n - k) as i32) * r.powi(k as i32)
                    }
                })
                .collect()
        })
        .collect()
}

/// Output of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `P(n)` at port a, `n = 0..=cutoff`.
    pub probs: Vec<f64>,
    pub parity: f64,
    pub z: f64,
    pub cutoff: usize,
    /// Input truncation mass plus the mass of dropped Kraus branches.
    pub discarded: f64,
}

/// Full interferometer: BS1, phase on arm 1, loss on both arms, BS2.
pub fn simulate(
    state_a: &SuperposedState,
    state_b: &SuperposedState,
    config: &MziConfig,
    cutoff: Option<usize>,
) -> Result<OracleResult> {
    config.validate()?;
    let cutoff = cutoff.unwrap_or_else(|| auto_cutoff(state_a, state_b));
    let bs = beam_splitter_unitary(cutoff);
    let mut v = bs.apply(&encode(state_a, state_b, cutoff)?);
    v.apply_phase(config.phi);

    let kraus = kraus_table(cutoff, config.loss_t, config.loss_r);
    let mut probs = vec![0.0; cutoff + 1];
    let mut discarded = v.tail;
    let mut branch = vec![zero(); basis_len(cutoff)];
    for k in 0..=cutoff {
        for l in 0..=cutoff - k {
            let out_cut = cutoff - k - l;
            let len = basis_len(out_cut);
            branch[..len].iter_mut().for_each(|c| *c = zero());
            let mut weight = 0.0;
            for n in (k + l)..=cutoff {
                for p in k..=(n - l) {
                    let c = v.amplitudes[block_start(n) + p] * (kraus[k][p] * kraus[l][n - p]);
                    branch[block_start(n - k - l) + p - k] = c;
                    weight += c.norm_sqr();
                }
            }
            if weight < BRANCH_FLOOR {
                discarded += weight;
                continue;
            }
            let out = bs.apply_slice(&branch[..len], out_cut);
            accumulate_mode_a(&out, out_cut, &mut probs);
        }
    }
    let parity = probs.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum();
    Ok(OracleResult { z: probs[0], probs, parity, cutoff, discarded })
}

/// Which arm a loss channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    A,
    B,
}

/// Two-mode density matrix in the same basis as [`FockVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    pub cutoff: usize,
    /// Row-major `dim x dim`.
    pub matrix: Vec<Complex64>,
}

impl FockDensity {
    pub fn dim(&self) -> usize {
        basis_len(self.cutoff)
    }

    pub fn from_vector(v: &FockVector) -> Self {
        let d = v.amplitudes.len();
        let mut matrix = vec![zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                matrix[i * d + j] = v.amplitudes[i] * v.amplitudes[j].conj();
            }
        }
        FockDensity { cutoff: v.cutoff, matrix }
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.matrix[i * d + i].re).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix[i * d + j] - self.matrix[j * d + i].conj()).norm());
            }
        }
        worst
    }

    /// `U rho U^dag` for a block-diagonal unitary.
    pub fn apply_beam_splitter(&self, bs: &BeamSplitter) -> Self {
        let d = self.dim();
        let mut tmp = vec![zero(); d * d];
        // U rho, column by column
        let mut col = vec![zero(); d];
        for j in 0..d {
            for i in 0..d {
                col[i] = self.matrix[i * d + j];
            }
            let out = bs.apply_slice(&col, self.cutoff);
            for i in 0..d {
                tmp[i * d + j] = out[i];
            }
        }
        // (U (U rho)^dag)^dag
        let mut matrix = vec![zero(); d * d];
        for i in 0..d {
            let row: Vec<Complex64> = (0..d).map(|j| tmp[i * d + j].conj()).collect();
            let out = bs.apply_slice(&row, self.cutoff);
            for j in 0..d {
                matrix[i * d + j] = out[j].conj();
            }
        }
        FockDensity { cutoff: self.cutoff, matrix }
    }

    pub fn apply_phase(&self, phi: f64) -> Self {
        let d = self.dim();
        let na: Vec<usize> = (0..=self.cutoff).flat_map(|n| 0..=n).collect();
        let mut matrix = self.matrix.clone();
        for i in 0..d {
            for j in 0..d {
                matrix[i * d + j] *= Complex64::from_polar(1.0, phi * (na[i] as f64 - na[j] as f64));
            }
        }
        FockDensity { cutoff: self.cutoff, matrix }
    }

    /// Mode-a marginal `P(n)`.
    pub fn mode_a_distribution(&self) -> Vec<f64> {
        let d = self.dim();
        let mut probs = vec![0.0; self.cutoff + 1];
        for n in 0..=self.cutoff {
            for p in 0..=n {
                let i = block_start(n) + p;
                probs[p] += self.matrix[i * d + i].re;
            }
        }
        probs
    }
}

/// Pure-loss channel with transmissivity `1 - loss_r^2` on one arm.
pub fn loss_channel(rho: &FockDensity, arm: Arm, loss_r: f64) -> FockDensity {
    let cutoff = rho.cutoff;
    let d = rho.dim();
    let t = (1.0 - loss_r * loss_r).sqrt();
    let kraus = kraus_table(cutoff, t, loss_r);
    let states: Vec<(usize, usize)> = (0..=cutoff).flat_map(|n| (0..=n).map(move |p| (p, n - p))).collect();
    let mut matrix = vec![zero(); d * d];
    for k in 0..=cutoff {
        for (i, &(ai, bi)) in states.iter().enumerate() {
            let (ni, keep_i) = match arm {
                Arm::A => (ai, (ai >= k).then(|| index(ai - k, bi))),
                Arm::B => (bi, (bi >= k).then(|| index(ai, bi - k))),
            };
            let Some(oi) = keep_i else { continue };
            let ki = kraus[k][ni];
            if ki == 0.0 {
                continue;
            }
            for (j, &(aj, bj)) in states.iter().enumerate() {
                let (nj, keep_j) = match arm {
                    Arm::A => (aj, (aj >= k).then(|| index(aj - k, bj))),
                    Arm::B => (bj, (bj >= k).then(|| index(aj, bj - k))),
                };
                let Some(oj) = keep_j else { continue };
                matrix[oi * d + oj] += rho.matrix[i * d + j] * (ki * kraus[k][nj]);
            }
        }
    }
    FockDensity { cutoff, matrix }
}

/// Density-matrix version of [`simulate`]; returns port-a `P(n)`.
pub fn simulate_density(
    state_a: &SuperposedState,
    state_b: &SuperposedState,
    config: &MziConfig,
    cutoff: usize,
) -> Result<Vec<f64>> {
    config.validate()?;
    let bs = beam_splitter_unitary(cutoff);
    let rho = FockDensity::from_vector(&encode(state_a, state_b, cutoff)?);
    let rho = rho.apply_beam_splitter(&bs).apply_phase(config.phi);
    let rho = loss_channel(&loss_channel(&rho, Arm::A, config.loss_r), Arm::B, config.loss_r);
    Ok(rho.apply_beam_splitter(&bs).mode_a_distribution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{apply, mode_transform};
    use crate::states::{make_state, StateKind};
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poisson(mu: f64, n: usize) -> f64 {
        let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        if mu == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        (-mu + n as f64 * mu.ln() - lf).exp()
    }

    #[test]
    fn vacuum_encodes_to_single_amplitude() {
        let v = encode(&SuperposedState::vacuum(), &SuperposedState::vacuum(), 5).unwrap();
        assert_eq!(v.get(0, 0), c(1.0, 0.0));
        assert!(v.amplitudes[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(v.tail, 0.0);
    }

    #[test]
    fn coherent_coefficients_are_poisson() {
        let cs = SuperposedState::coherent(c(1.0, 0.0));
        let coef = single_mode_coefficients(&cs, 30);
        for (n, a) in coef.iter().enumerate() {
            assert!((a.norm_sqr() - poisson(1.0, n)).abs() < 1e-14);
        }
    }

    #[test]
    fn mps2_populates_residue_class_two() {
        let s = make_state(StateKind::Mps2, c(2f64.sqrt(), 0.0)).unwrap();
        let v = encode(&s, &SuperposedState::vacuum(), 40).unwrap();
        for n in 0..=40 {
            if n % 4 != 2 {
                assert!(v.get(n, 0).norm() < 1e-12);
            }
        }
        assert!(v.tail < 1e-12);
    }

    #[test]
    fn small_cutoff_is_rejected() {
        let cs = SuperposedState::coherent(c(3.0, 0.0));
        assert!(matches!(encode(&cs, &SuperposedState::vacuum(), 8), Err(Error::CutoffTooSmall { cutoff: 8, .. })));
    }

    #[test]
    fn beam_splitter_is_unitary_per_block() {
        let bs = beam_splitter_unitary(30);
        for n in [0usize, 1, 7, 30] {
            let d = n + 1;
            let m = bs.block(n);
            for a in 0..d {
                for b in 0..d {
                    let dot: Complex64 = (0..d).map(|r| m[r * d + a].conj() * m[r * d + b]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - expect).norm() < 1e-12, "block {n}");
                }
            }
        }
    }

    #[test]
    fn single_photon_splits_evenly() {
        let bs = beam_splitter_unitary(1);
        let mut v = FockVector::vacuum(1);
        v.amplitudes = vec![zero(), zero(), c(1.0, 0.0)];
        let out = bs.apply(&v);
        assert!((out.get(1, 0) - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((out.get(0, 1) - c(0.0, std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn beam_splitter_preserves_total_number() {
        let s = make_state(StateKind::Mps1, c(1.2, 0.3)).unwrap();
        let v = encode(&s, &SuperposedState::coherent(c(0.7, -0.4)), 40).unwrap();
        let out = beam_splitter_unitary(40).apply(&v);
        let (a0, b0) = v.mean_photons();
        let (a1, b1) = out.mean_photons();
        assert!((a0 + b0 - a1 - b1).abs() < 1e-12);
    }

    #[test]
    fn beam_splitter_matches_coherent_mode_map() {
        let (alpha, zeta) = (c(1.1, 0.4), c(-0.6, 0.9));
        let cutoff = 45;
        let out = beam_splitter_unitary(cutoff).apply(&encode(
            &SuperposedState::coherent(alpha),
            &SuperposedState::coherent(zeta),
            cutoff,
        )
        .unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (ea, eb) = ((alpha + c(0.0, 1.0) * zeta) * s, (c(0.0, 1.0) * alpha + zeta) * s);
        let expect = encode(&SuperposedState::coherent(ea), &SuperposedState::coherent(eb), cutoff).unwrap();
        let worst = out.amplitudes.iter().zip(&expect.amplitudes).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");

        // full lossless pipeline against the interferometer's port amplitudes
        let cfg = MziConfig::lossless(0.8);
        let bs = beam_splitter_unitary(cutoff);
        let mut v = bs.apply(&encode(&SuperposedState::coherent(alpha), &SuperposedState::coherent(zeta), cutoff).unwrap());
        v.apply_phase(cfg.phi);
        let v = bs.apply(&v);
        let amps = apply(&mode_transform(&cfg), alpha, zeta);
        let expect =
            encode(&SuperposedState::coherent(amps[0]), &SuperposedState::coherent(amps[1]), cutoff).unwrap();
        let worst = v.amplitudes.iter().zip(&expect.amplitudes).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");
    }

    #[test]
    fn zero_loss_channel_is_identity() {
        let v = encode(&SuperposedState::coherent(c(0.8, 0.2)), &SuperposedState::coherent(c(0.3, 0.0)), 12).unwrap();
        let rho = FockDensity::from_vector(&v);
        let out = loss_channel(&rho, Arm::A, 0.0);
        let worst = rho.matrix.iter().zip(&out.matrix).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-15);
    }

    #[test]
    fn loss_maps_coherent_to_coherent() {
        let (alpha, r) = (c(1.0, 0.5), 0.4);
        let t = (1.0f64 - r * r).sqrt();
        let cutoff = 24;
        let rho = FockDensity::from_vector(&encode(&SuperposedState::coherent(alpha), &SuperposedState::vacuum(), cutoff).unwrap());
        let out = loss_channel(&rho, Arm::A, r);
        let expect = FockDensity::from_vector(
            &encode(&SuperposedState::coherent(alpha * t), &SuperposedState::vacuum(), cutoff).unwrap(),
        );
        let worst = out.matrix.iter().zip(&expect.matrix).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");
        assert!((out.trace() - rho.trace()).abs() < 1e-12);
    }

    #[test]
    fn loss_scales_mean_photons() {
        let s = make_state(StateKind::Mps0, c(1.3, 0.0)).unwrap();
        let r = 0.5;
        let rho = FockDensity::from_vector(&encode(&SuperposedState::vacuum(), &s, 30).unwrap());
        let out = loss_channel(&rho, Arm::B, r);
        let mean_b = |m: &FockDensity| {
            let d = m.dim();
            let mut acc = 0.0;
            for n in 0..=m.cutoff {
                for p in 0..=n {
                    let i = block_start(n) + p;
                    acc += (n - p) as f64 * m.matrix[i * d + i].re;
                }
            }
            acc
        };
        assert!((mean_b(&out) - (1.0 - r * r) * mean_b(&rho)).abs() < 1e-10);
    }

    #[test]
    fn density_path_stays_physical() {
        let s = make_state(StateKind::Mps1, c(1.0, 0.0)).unwrap();
        let cutoff = 16;
        let bs = beam_splitter_unitary(cutoff);
        let rho = FockDensity::from_vector(&encode(&s, &SuperposedState::coherent(c(0.5, 0.0)), cutoff).unwrap());
        let rho = rho.apply_beam_splitter(&bs).apply_phase(1.3);
        let rho = loss_channel(&loss_channel(&rho, Arm::A, 0.3), Arm::B, 0.3);
        let rho = rho.apply_beam_splitter(&bs);
        assert!(rho.hermitian_defect() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        let d = rho.dim();
        let m = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
            let z = rho.matrix[(i % d) * d + (j % d)];
            match (i < d, j < d) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let min = m.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-10, "{min:e}");
    }

    #[test]
    fn vector_and_density_paths_agree() {
        let s = make_state(StateKind::Ecss, c(0.9, 0.0)).unwrap();
        let b = SuperposedState::coherent(c(0.6, 0.0));
        for &(phi, r) in &[(0.7, 0.0), (2.1, 0.35)] {
            let cfg = MziConfig::new(phi, r).unwrap();
            let vec = simulate(&s, &b, &cfg, Some(18)).unwrap();
            let dens = simulate_density(&s, &b, &cfg, 18).unwrap();
            for (x, y) in vec.probs.iter().zip(&dens) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_input_gives_poisson() {
        let alpha2: f64 = 3.0;
        let cs = SuperposedState::coherent(c(alpha2.sqrt(), 0.0));
        for &phi in &[0.0, 0.9, 2.5] {
            let res = simulate(&cs, &SuperposedState::vacuum(), &MziConfig::lossless(phi), None).unwrap();
            let mu = alpha2 * (phi / 2.0).sin().powi(2);
            for (n, p) in res.probs.iter().enumerate().take(25) {
                assert!((p - poisson(mu, n)).abs() < 1e-10);
            }
            if phi == 0.0 {
                assert!((res.z - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn total_probability_is_conserved_under_loss() {
        let s = make_state(StateKind::Mps3, c(1.4, 0.0)).unwrap();
        let res = simulate(&s, &SuperposedState::coherent(c(1.0, 0.0)), &MziConfig::new(1.2, 0.5).unwrap(), None).unwrap();
        let total: f64 = res.probs.iter().sum();
        assert!((total + res.discarded - 1.0).abs() < 1e-12);
        assert!(res.discarded < 1e-12);
    }
}
