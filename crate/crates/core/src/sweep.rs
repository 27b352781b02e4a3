//! Parameter sweeps over a `(p_d, p_c)` grid.
//!
//! Cells run in parallel; each gets the seed `mix_seed(master, index)` with
//! `index` counting row-major over the grid, so a cell reproduces on its own
//! and the output order never depends on scheduling.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{run_session, ProtocolError, SessionConfig};
use crate::report::Report;
use crate::rng::mix_seed;

/// Agreement band, in standard errors, for the PASS flags.
pub const PASS_SIGMAS: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub p_d: Vec<f64>,
    pub p_c: Vec<f64>,
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.p_d
            .iter()
            .flat_map(|d| self.p_c.iter().map(move |c| (*d, *c)))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("the grid has no cells")]
    EmptyGrid,
    #[error("cell {index} (p_d = {p_d}, p_c = {p_c}): {source}")]
    Cell {
        index: usize,
        p_d: f64,
        p_c: f64,
        source: ProtocolError,
    },
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub p_d: f64,
    pub p_c: f64,
    pub seed: u64,
    pub eta_q: f64,
    pub eta_q_stderr: f64,
    pub eta_q_theory: f64,
    pub eta_q_pass: bool,
    pub eta_t: f64,
    pub eta_t_stderr: f64,
    pub eta_t_theory: f64,
    pub eta_t_pass: bool,
    pub qber_first_bob: Option<f64>,
    pub qber_first_charlie: Option<f64>,
    pub qber_second: Option<f64>,
    pub leakage: f64,
    pub aborted: bool,
}

impl SweepRow {
    fn from_report(index: usize, report: &Report) -> SweepRow {
        let e = &report.efficiency;
        SweepRow {
            index,
            p_d: report.config.p_d,
            p_c: report.config.p_c,
            seed: report.seed,
            eta_q: e.eta_q.value,
            eta_q_stderr: e.eta_q.stderr,
            eta_q_theory: e.eta_q_theory,
            eta_q_pass: e.eta_q.within(e.eta_q_theory, PASS_SIGMAS),
            eta_t: e.eta_t.value,
            eta_t_stderr: e.eta_t.stderr,
            eta_t_theory: e.eta_t_theory,
            eta_t_pass: e.eta_t.within(e.eta_t_theory, PASS_SIGMAS),
            qber_first_bob: report.qber.first_check.bob.qber,
            qber_first_charlie: report.qber.first_check.charlie.qber,
            qber_second: report.qber.second_check.qber,
            leakage: report.leakage.fraction,
            aborted: report.aborted,
        }
    }
}

/// Runs one session per grid cell on top of `base`.
pub fn run_sweep(base: &SessionConfig, grid: &SweepGrid, master_seed: u64) -> Result<Vec<SweepRow>, SweepError> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    cells
        .par_iter()
        .enumerate()
        .map(|(index, &(p_d, p_c))| {
            let config = SessionConfig {
                p_d,
                p_c,
                seed: mix_seed(master_seed, index as u64),
                ..base.clone()
            };
            let outcome = run_session(&config).map_err(|source| SweepError::Cell {
                index,
                p_d,
                p_c,
                source,
            })?;
            Ok(SweepRow::from_report(index, &Report::from_outcome(&outcome)))
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |q| format!("{q:.4}"))
}

/// Fixed-width table for terminals.
pub fn write_table<W: Write>(rows: &[SweepRow], mut out: W) -> Result<(), SweepError> {
    writeln!(
        out,
        "{:>5} {:>6} {:>6} {:>8} {:>8} {:>4} {:>8} {:>8} {:>4} {:>8} {:>8} {:>8} {:>7}",
        "cell", "p_d", "p_c", "eta_q", "theory", "ok", "eta_t", "theory", "ok", "qber_b", "qber_c", "qber_2", "abort"
    )?;
    for r in rows {
        let ok = |b: bool| if b { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{:>5} {:>6.3} {:>6.3} {:>8.5} {:>8.5} {:>4} {:>8.5} {:>8.5} {:>4} {:>8} {:>8} {:>8} {:>7}",
            r.index,
            r.p_d,
            r.p_c,
            r.eta_q,
            r.eta_q_theory,
            ok(r.eta_q_pass),
            r.eta_t,
            r.eta_t_theory,
            ok(r.eta_t_pass),
            cell(r.qber_first_bob),
            cell(r.qber_first_charlie),
            cell(r.qber_second),
            r.aborted
        )?;
    }
    Ok(())
}
