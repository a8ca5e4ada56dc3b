//! CSV output.
//!
//! Real values are written with six significant digits and a decimal point,
//! independent of locale, so identical runs give identical bytes.

use std::io::Write;

use crate::engine::SweepRow;
use crate::stability::{ContourRow, EquilibriumSet};

pub const SWEEP_HEADER: [&str; 17] = [
    "scheme",
    "dist",
    "G",
    "snr_db",
    "slots",
    "sent",
    "decoded",
    "lost",
    "plr",
    "plr_ci_low",
    "plr_ci_high",
    "throughput",
    "mean_degree",
    "D",
    "eta",
    "mean_delay_slots",
    "seed",
];

pub const STABILITY_HEADER: [&str; 7] =
    ["n_b", "g_tx", "g_retx", "g_total", "throughput", "kind", "globally_stable"];

/// Six significant digits in fixed notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding up may have added a digit, e.g. 9.999996 -> 10.00000.
    let rounded: f64 = s.parse().expect("formatted float parses");
    if decimals > 0 && rounded.abs() >= 10f64.powi(magnitude + 1) {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    s
}

fn csv_error(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_error)?;
    for r in rows {
        let s = &r.stats;
        let e = &r.efficiency;
        w.write_record([
            r.scheme.id().to_string(),
            r.dist.clone(),
            sig6(s.offered_load),
            sig6(e.snr_db),
            s.measured_slots.to_string(),
            s.packets_sent.to_string(),
            s.packets_decoded.to_string(),
            s.packets_lost.to_string(),
            sig6(s.plr),
            sig6(s.plr_ci.0),
            sig6(s.plr_ci.1),
            sig6(s.throughput),
            sig6(r.mean_degree),
            sig6(e.power_ratio),
            sig6(e.eta),
            sig6(s.mean_delay_slots),
            r.seed.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}

/// Writes the equilibria, preceded by the contour rows (kind `contour`) when
/// a contour is given.
pub fn write_stability_csv<W: Write>(
    out: W,
    contour: &[ContourRow],
    equilibria: &EquilibriumSet,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STABILITY_HEADER).map_err(csv_error)?;
    let global = equilibria.globally_stable.to_string();
    for row in contour {
        w.write_record([
            sig6(row.n_b),
            sig6(row.loads.new_traffic),
            sig6(row.loads.retransmissions),
            sig6(row.loads.total),
            sig6(row.throughput),
            "contour".to_string(),
            global.clone(),
        ])
        .map_err(csv_error)?;
    }
    for p in &equilibria.points {
        w.write_record([
            sig6(p.n_b),
            sig6(p.loads.new_traffic),
            sig6(p.loads.retransmissions),
            sig6(p.loads.total),
            sig6(p.throughput),
            p.kind.as_str().to_string(),
            global.clone(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}
