//! Incremental gain chain vs. full recomputation per added antenna.

use std::fmt::Write as _;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use ircgain::random::{self, substream};
use ircgain::{init_state, irc_sinr_direct, IrcError};
use thiserror::Error;

pub const DEFAULT_GRID: &str = "4:0:8,4:12:8,8:24:8,16:48:16,32:32:32";

/// One grid cell: start at `n_r` antennas, add `a`, with `z` UEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub n_r: usize,
    pub a: usize,
    pub z: usize,
}

impl FromStr for GridPoint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [n_r, a, z] = parts.as_slice() else {
            return Err(format!("grid entry '{s}' is not N_R:A:Z"));
        };
        let num = |v: &str, what: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("grid entry '{s}': {what} '{v}': {e}"))
        };
        let p = GridPoint {
            n_r: num(n_r, "N_R")?,
            a: num(a, "A")?,
            z: num(z, "Z")?,
        };
        if p.n_r == 0 || p.z == 0 {
            return Err(format!("grid entry '{s}': N_R and Z must be at least 1"));
        }
        Ok(p)
    }
}

pub fn parse_grid(spec: &str) -> Result<Vec<GridPoint>, String> {
    let grid: Vec<GridPoint> = spec
        .split(',')
        .filter(|e| !e.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("paths disagree at N_R={n_r} A={a} Z={z}: step {step} error {error:.3e}")]
    Disagreement {
        n_r: usize,
        a: usize,
        z: usize,
        step: usize,
        error: f64,
    },
    #[error(transparent)]
    Irc(#[from] IrcError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub point: GridPoint,
    pub reps: u32,
    pub incremental_us: f64,
    pub recompute_us: f64,
    pub final_sinr: f64,
    pub max_error: f64,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.recompute_us / self.incremental_us
    }
}

pub fn run_point(point: GridPoint, reps: u32, seed: u64) -> Result<BenchRow, BenchError> {
    let GridPoint { n_r, a, z } = point;
    let full = random::channel_set(&mut substream(seed, 0, 0), n_r + a, z - 1, 0.1);
    let base = full.first_antennas(n_r);
    let rows = full.antenna_rows_from(n_r);

    // Agreement first: every intermediate SINR of the chain against a
    // fresh direct evaluation.
    let mut state = init_state(&base)?;
    let mut max_error = 0.0_f64;
    let mut check = |step: usize, incremental: f64, direct: f64| {
        let err = (incremental - direct).abs() / direct.max(1.0);
        max_error = max_error.max(err);
        if err > 1e-9 {
            return Err(BenchError::Disagreement { n_r, a, z, step, error: err });
        }
        Ok(())
    };
    check(0, state.sinr(), irc_sinr_direct(&base)?)?;
    for (i, row) in rows.iter().enumerate() {
        state = state.add_antenna(row)?;
        check(i + 1, state.sinr(), irc_sinr_direct(&full.first_antennas(n_r + i + 1))?)?;
    }
    let final_sinr = state.sinr();

    let prefixes: Vec<_> = if a == 0 {
        vec![base.clone()]
    } else {
        (1..=a).map(|i| full.first_antennas(n_r + i)).collect()
    };

    let start = Instant::now();
    for _ in 0..reps {
        let mut st = init_state(black_box(&base))?;
        for row in &rows {
            st = st.add_antenna(black_box(row))?;
        }
        black_box(st.sinr());
    }
    let incremental_us = start.elapsed().as_secs_f64() * 1e6 / reps as f64;

    let start = Instant::now();
    for _ in 0..reps {
        for sys in &prefixes {
            black_box(irc_sinr_direct(black_box(sys))?);
        }
    }
    let recompute_us = start.elapsed().as_secs_f64() * 1e6 / reps as f64;

    Ok(BenchRow {
        point,
        reps,
        incremental_us,
        recompute_us,
        final_sinr,
        max_error,
    })
}

pub fn run(grid: &[GridPoint], reps: u32, seed: u64) -> Result<Vec<BenchRow>, BenchError> {
    grid.iter().map(|&p| run_point(p, reps, seed)).collect()
}

pub fn render(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>5} {:>5} {:>7} {:>16} {:>16} {:>9} {:>14} {:>11}",
        "n_r", "a", "z", "reps", "incremental_us", "recompute_us", "speedup", "final_sinr", "max_err"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>5} {:>5} {:>5} {:>7} {:>16.3} {:>16.3} {:>9.2} {:>14.6} {:>11.2e}",
            r.point.n_r,
            r.point.a,
            r.point.z,
            r.reps,
            r.incremental_us,
            r.recompute_us,
            r.speedup(),
            r.final_sinr,
            r.max_error
        );
    }
    s
}
