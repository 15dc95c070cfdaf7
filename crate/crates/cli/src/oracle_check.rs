//! Engine versus Fock-oracle regression over a parameter grid.

use std::fmt;

use rayon::prelude::*;

use qlidar::detection::{parity_expectation, port_distribution, z_expectation};
use qlidar::fock_oracle;
use qlidar::interferometer::{propagate, MziConfig};
use qlidar::states::{make_state, StateKind, SuperposedState};
use qlidar::{Complex64, Result};

use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub kind: StateKind,
    pub alpha2: f64,
    /// 0 means a vacuum second input, otherwise a coherent state.
    pub zeta2: f64,
    pub phi: f64,
    pub loss_r: f64,
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = if self.zeta2 == 0.0 { "vacuum".to_string() } else { format!("cs(zeta2={})", self.zeta2) };
        write!(f, "{} alpha2={} b={} phi={} loss_r={}", self.kind, self.alpha2, b, self.phi, self.loss_r)
    }
}

fn grid(states: &[StateKind], alpha2: &[f64], zeta2: &[f64], phis: &[f64], losses: &[f64]) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &kind in states {
        for &a in alpha2 {
            for &z in zeta2 {
                for &phi in phis {
                    for &loss_r in losses {
                        out.push(GridPoint { kind, alpha2: a, zeta2: z, phi, loss_r });
                    }
                }
            }
        }
    }
    out
}

/// Six states x |alpha|^2 {0.5, 2, 8} x second input {vacuum, CS 2, CS 25}
/// x phi {0.3, 1.1, 2.7} x loss_r {0, 0.2, 0.5}.
pub fn default_grid(states: &[StateKind]) -> Vec<GridPoint> {
    grid(states, &[0.5, 2.0, 8.0], &[0.0, 2.0, 25.0], &[0.3, 1.1, 2.7], &[0.0, 0.2, 0.5])
}

/// A small corner of the default grid.
pub fn quick_grid(states: &[StateKind]) -> Vec<GridPoint> {
    grid(states, &[0.5, 2.0], &[0.0, 2.0], &[1.1], &[0.0, 0.2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub point: GridPoint,
    pub cutoff: usize,
    pub parity_diff: f64,
    pub z_diff: f64,
    /// Largest `|P_engine(n) - P_oracle(n)|` over the compared range.
    pub pn_diff: f64,
    pub pn_worst_n: usize,
    pub discarded: f64,
}

impl PointReport {
    pub fn max_diff(&self) -> f64 {
        self.parity_diff.max(self.z_diff).max(self.pn_diff)
    }

    /// Name of the quantity holding the largest difference.
    pub fn worst_quantity(&self) -> String {
        if self.pn_diff >= self.parity_diff && self.pn_diff >= self.z_diff {
            format!("P({})", self.pn_worst_n)
        } else if self.parity_diff >= self.z_diff {
            "parity".into()
        } else {
            "z".into()
        }
    }
}

fn inputs(p: &GridPoint) -> Result<(SuperposedState, SuperposedState)> {
    let a = make_state(p.kind, Complex64::new(p.alpha2.sqrt(), 0.0))?;
    let b = if p.zeta2 == 0.0 { SuperposedState::vacuum() } else { SuperposedState::coherent(Complex64::new(p.zeta2.sqrt(), 0.0)) };
    Ok((a, b))
}

pub fn check_point(p: &GridPoint) -> Result<PointReport> {
    let (a, b) = inputs(p)?;
    let cfg = MziConfig::new(p.phi, p.loss_r)?;
    let out = propagate(&a, &b, &cfg);
    let oracle = fock_oracle::simulate(&a, &b, &cfg, None)?;
    let dist = port_distribution(&out)?;
    let n_max = dist.probs.len().min(oracle.probs.len());
    let (pn_worst_n, pn_diff) = (0..n_max)
        .map(|n| (n, (dist.probs[n] - oracle.probs[n]).abs()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(PointReport {
        point: *p,
        cutoff: n_max - 1,
        parity_diff: (parity_expectation(&out) - oracle.parity).abs(),
        z_diff: (z_expectation(&out) - oracle.z).abs(),
        pn_diff,
        pn_worst_n,
        discarded: oracle.discarded,
    })
}

/// Reports in grid order.
pub fn check_grid(points: &[GridPoint]) -> Result<Vec<PointReport>> {
    points.par_iter().map(check_point).collect()
}

pub fn worst(reports: &[PointReport]) -> Option<&PointReport> {
    reports.iter().fold(None, |acc: Option<&PointReport>, r| match acc {
        Some(w) if w.max_diff() >= r.max_diff() => Some(w),
        _ => Some(r),
    })
}

pub fn report_table(reports: &[PointReport]) -> Table {
    let cols = ["state", "alpha2", "zeta2", "phi", "loss_r", "cutoff", "parity_diff", "z_diff", "pn_diff", "discarded"];
    let mut t = Table::new(cols.iter().map(|s| s.to_string()).collect());
    for r in reports {
        let p = &r.point;
        t.rows.push(vec![
            Cell::Text(p.kind.to_string()),
            Cell::Num(p.alpha2),
            Cell::Num(p.zeta2),
            Cell::Num(p.phi),
            Cell::Num(p.loss_r),
            Cell::Int(r.cutoff as i64),
            Cell::Num(r.parity_diff),
            Cell::Num(r.z_diff),
            Cell::Num(r.pn_diff),
            Cell::Num(r.discarded),
        ]);
    }
    t
}
