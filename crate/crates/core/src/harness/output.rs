//! CSV emission. Floats carry 17 significant digits so identical runs give
//! identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::run::{RegretRow, RunTrace};
use super::sweep::SweepRow;

pub fn fmt_f64(v: f64) -> String {
    // Print -0 as 0.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn trace_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "optimizer".to_string()];
    h.extend((0..dim).map(|i| format!("x{i}")));
    h.extend(
        ["f", "grad_norm", "V", "W", "delta_V", "decrease_bound", "certified", "diverged"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

pub fn write_trace<W: Write>(out: W, trace: &RunTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(trace.dim))?;
    for r in &trace.rows {
        let mut rec = vec![r.t.to_string(), r.optimizer.clone()];
        rec.extend(r.x.iter().map(|v| fmt_f64(*v)));
        rec.push(fmt_f64(r.f));
        rec.push(fmt_f64(r.grad_norm));
        rec.push(fmt_opt(r.v));
        rec.push(fmt_opt(r.w));
        rec.push(fmt_opt(r.delta_v));
        rec.push(fmt_opt(r.decrease_bound));
        rec.push(r.certified.to_string());
        rec.push(r.diverged.to_string());
        w.write_record(rec)?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

pub fn trace_to_string(trace: &RunTrace) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, trace).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Regret columns. `T` is the number of steps summed (`t = 0..T`), so the
/// row with `T` covers trace rows `t <= T - 1`.
pub fn regret_header(dim: usize) -> Vec<String> {
    let mut h = vec!["T".to_string(), "optimizer".to_string()];
    h.extend((0..dim).map(|i| format!("x_bar{i}")));
    h.extend((0..dim).map(|i| format!("x_star{i}")));
    h.extend(
        [
            "cumulative_cost",
            "comparator_cost",
            "average_cost",
            "average_regret",
            "pointwise_lower_bound",
            "pointwise_regret",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    h
}

pub fn write_regret<W: Write>(out: W, trace: &RunTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(regret_header(trace.dim))?;
    for RegretRow { optimizer, report } in &trace.regret {
        let mut rec = vec![report.horizon.to_string(), optimizer.clone()];
        rec.extend(report.x_bar.iter().map(|v| fmt_f64(*v)));
        match trace.optima.get(report.horizon - 1) {
            Some(x) => rec.extend(x.iter().map(|v| fmt_f64(*v))),
            None => rec.extend((0..trace.dim).map(|_| String::new())),
        }
        let t = report.horizon as f64;
        rec.push(fmt_f64(report.cumulative_cost));
        rec.push(fmt_f64(report.comparator_cost));
        rec.push(fmt_f64(report.cumulative_cost / t));
        rec.push(fmt_f64(report.average_regret));
        rec.push(fmt_opt(report.pointwise_lower_bound));
        rec.push(fmt_opt(report.pointwise_regret));
        w.write_record(rec)?;
    }
    w.flush().map_err(|e| Error::io("<regret>", e))?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "c5", "c6", "c7", "discriminant", "verdict"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.gamma),
            fmt_f64(r.c5),
            fmt_f64(r.c6),
            fmt_f64(r.c7),
            fmt_f64(r.discriminant),
            r.verdict.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<sweep>", e))?;
    Ok(())
}

/// `out.csv` -> `out.<tag>.csv`.
pub fn companion_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

fn retag(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

/// Writes the trace, and the regret table next to it when present.
/// Returns the paths written.
pub fn save_trace(path: &Path, trace: &RunTrace) -> Result<Vec<PathBuf>> {
    write_trace(create(path)?, trace).map_err(|e| retag(e, path))?;
    let mut written = vec![path.to_path_buf()];
    if !trace.regret.is_empty() {
        let rp = companion_path(path, "regret");
        write_regret(create(&rp)?, trace).map_err(|e| retag(e, &rp))?;
        written.push(rp);
    }
    Ok(written)
}

pub fn save_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_sweep(create(path)?, rows).map_err(|e| retag(e, path))
}
