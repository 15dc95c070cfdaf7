//! One function per subcommand, each producing a [`Table`].

use rayon::prelude::*;

use qlidar::interferometer::propagate;
use qlidar::metrology::{fwhm, loss_sweep, peak_count, phase_sensitivity_with, SignalCurve, SweepMetric};
use qlidar::states::StateKind;
use qlidar::wigner::{default_half_width, wigner_grid, DyadState};
use qlidar::Error;

use crate::error::CliError;
use crate::oracle_check::{check_grid, default_grid, quick_grid, report_table, worst};
use crate::spec::{Energy, ScanSpec, SweepVar};
use crate::table::{Cell, Table};

fn columns(first: &str, prefixes: &[&str], states: &[StateKind]) -> Vec<String> {
    let mut cols = vec![first.to_string()];
    for s in states {
        for p in prefixes {
            cols.push(if states.len() == 1 && prefixes.len() > 1 { p.to_string() } else { format!("{p}_{s}") });
        }
    }
    cols
}

pub fn signal(spec: &ScanSpec) -> Result<Table, CliError> {
    let setups = spec.states.iter().map(|k| spec.setup(*k)).collect::<Result<Vec<_>, _>>()?;
    let mut t = if spec.states.len() == 1 {
        Table::new(vec!["phi".into(), "value".into()])
    } else {
        Table::new(columns("phi", &["value"], &spec.states))
    };
    t.rows = spec
        .phis()
        .par_iter()
        .map(|&phi| {
            let mut row = vec![Cell::Num(phi)];
            row.extend(setups.iter().map(|s| Cell::Num(s.value(phi, spec.scheme))));
            row
        })
        .collect();
    Ok(t)
}

pub fn sensitivity(spec: &ScanSpec) -> Result<Table, CliError> {
    let setups = spec.states.iter().map(|k| spec.setup(*k)).collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(columns("phi", &["delta_phi", "snl", "ratio"], &spec.states));
    t.rows = spec
        .phis()
        .par_iter()
        .map(|&phi| {
            let mut row = vec![Cell::Num(phi)];
            for s in &setups {
                let p = phase_sensitivity_with(s, phi, spec.scheme, spec.snl)?;
                row.extend([Cell::Num(p.delta_phi), Cell::Num(p.snl), Cell::Num(p.ratio)]);
            }
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

/// FWHM, or NaN when the curve has no peak.
fn width_or_nan(curve: &SignalCurve) -> Result<f64, CliError> {
    match fwhm(curve) {
        Ok(w) => Ok(w),
        Err(Error::NoPeak) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

pub fn fwhm_table(spec: &ScanSpec) -> Result<Table, CliError> {
    let mut t = Table::new(columns("x", &["fwhm"], &StateKind::ALL));
    t.rows = spec
        .grid
        .par_iter()
        .map(|&x| {
            let mut row = vec![Cell::Num(x)];
            for kind in StateKind::ALL {
                let setup = match spec.sweep {
                    SweepVar::Alpha2 => spec.setup_with(kind, Energy::Alpha2(x), spec.zeta2, spec.loss_r)?,
                    SweepVar::MeanPhotons => spec.setup_with(kind, Energy::MeanPhotons(x), spec.zeta2, spec.loss_r)?,
                    SweepVar::Zeta2 => spec.setup_with(kind, spec.energy, x, spec.loss_r)?,
                    SweepVar::LossR => spec.setup_with(kind, spec.energy, spec.zeta2, x)?,
                };
                let curve = SignalCurve::sample(&setup, spec.scheme, spec.phi_min, spec.phi_max, spec.phi_steps)?;
                row.push(Cell::Num(width_or_nan(&curve)?));
            }
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

pub fn loss(spec: &ScanSpec) -> Result<Table, CliError> {
    let name = match spec.metric {
        SweepMetric::Fwhm => "fwhm",
        SweepMetric::Ratio => "ratio",
    };
    let mut t = Table::new(columns("loss_r", &[name], &spec.states));
    let cols = spec
        .states
        .par_iter()
        .map(|&kind| {
            let setup = spec.setup(kind)?;
            match spec.metric {
                SweepMetric::Ratio => Ok(loss_sweep(&setup, spec.phi, spec.scheme, &spec.grid, SweepMetric::Ratio)?
                    .into_iter()
                    .map(|(_, v)| v)
                    .collect()),
                SweepMetric::Fwhm => spec
                    .grid
                    .iter()
                    .map(|&r| {
                        let s = setup.with_loss(r)?;
                        width_or_nan(&SignalCurve::sample(&s, spec.scheme, spec.phi_min, spec.phi_max, spec.phi_steps)?)
                    })
                    .collect::<Result<Vec<f64>, CliError>>(),
            }
        })
        .collect::<Result<Vec<Vec<f64>>, CliError>>()?;
    for (i, &r) in spec.grid.iter().enumerate() {
        let mut row = vec![Cell::Num(r)];
        row.extend(cols.iter().map(|c| Cell::Num(c[i])));
        t.rows.push(row);
    }
    Ok(t)
}

pub fn peaks(spec: &ScanSpec) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["state".into(), "count".into()]);
    t.rows = spec
        .states
        .par_iter()
        .map(|&kind| {
            let curve = SignalCurve::sample(&spec.setup(kind)?, spec.scheme, spec.phi_min, spec.phi_max, spec.phi_steps)?;
            Ok(vec![Cell::Text(kind.to_string()), Cell::Int(peak_count(&curve, spec.window, spec.side) as i64)])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

pub fn wigner(spec: &ScanSpec) -> Result<Table, CliError> {
    let kind = spec.states[0];
    if spec.states.len() != 1 {
        return Err(CliError::spec("state-a", "wigner takes a single state"));
    }
    let state = if spec.reduced {
        let setup = spec.setup(kind)?;
        DyadState::reduced_port_a(&propagate(&setup.state_a, &setup.state_b, &setup.config(spec.phi)))
    } else {
        DyadState::from_pure(&spec.first_input(kind, spec.energy)?)
    };
    let h = spec.half_width.unwrap_or_else(|| default_half_width(&state));
    let grid = wigner_grid(&state, (-h, h), (-h, h), spec.resolution);
    let mut t = Table::new(vec!["y1".into(), "y2".into(), "w".into()]);
    for (i1, &y1) in grid.y1_axis.iter().enumerate() {
        for (i2, &y2) in grid.y2_axis.iter().enumerate() {
            t.rows.push(vec![Cell::Num(y1), Cell::Num(y2), Cell::Num(grid.get(i1, i2))]);
        }
    }
    Ok(t)
}

/// Runs the regression grid. On disagreement the table is still returned
/// alongside the worst offender's description.
pub fn oracle_check(spec: &ScanSpec) -> Result<(Table, Option<String>, String), CliError> {
    let points = if spec.quick { quick_grid(&spec.states) } else { default_grid(&spec.states) };
    let reports = check_grid(&points)?;
    let w = worst(&reports).expect("grid is non-empty");
    let summary = format!("worst: {} {} diff={:e} ({} points)", w.point, w.worst_quantity(), w.max_diff(), reports.len());
    let failure = (w.max_diff() > spec.tolerance).then(|| summary.clone());
    Ok((report_table(&reports), failure, summary))
}
