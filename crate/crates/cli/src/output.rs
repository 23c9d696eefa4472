use std::io::Write;

use ircgain::comp::{ScenarioConfig, SweepRow};
use serde_json::json;

pub const CSV_HEADER: [&str; 4] = [
    "sir_db",
    "single_cell_sm_db",
    "multi_cell_sim_sm_db",
    "multi_cell_theory_sm_db",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// 17 significant digits.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// 6 significant digits, positional notation.
pub fn six_digits(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            full_precision(r.sir_db),
            full_precision(r.single_cell_sm_db),
            full_precision(r.multi_cell_sim_sm_db),
            full_precision(r.multi_cell_theory_sm_db),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(cfg: &ScenarioConfig, rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    let doc = json!({
        "metadata": {
            "config": cfg,
            "seed": cfg.seed,
            "columns": CSV_HEADER,
        },
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")
}
