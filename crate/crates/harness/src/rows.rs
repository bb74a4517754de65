use std::io::Write;
use std::path::Path;

/// One aggregated measurement, one CSV line.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub task: String,
    pub algorithm: String,
    pub oracle: String,
    pub seed: u64,
    pub h: usize,
    pub params_json: String,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub n: u64,
    pub notes: String,
}

pub const CSV_HEADER: [&str; 11] = [
    "task",
    "algorithm",
    "oracle",
    "seed",
    "H",
    "params_json",
    "metric",
    "value",
    "stderr",
    "n",
    "notes",
];

/// 17 significant digits: enough for a lossless f64 round trip.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Deterministic row order, independent of how rows were produced.
pub fn sort_rows(rows: &mut [CsvRow]) {
    rows.sort_by(|a, b| {
        (
            &a.task,
            &a.algorithm,
            &a.oracle,
            a.h,
            &a.params_json,
            &a.metric,
            a.seed,
        )
            .cmp(&(
                &b.task,
                &b.algorithm,
                &b.oracle,
                b.h,
                &b.params_json,
                &b.metric,
                b.seed,
            ))
    });
}

pub fn write_rows<W: Write>(out: W, rows: &[CsvRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.task.as_str(),
            r.algorithm.as_str(),
            r.oracle.as_str(),
            &r.seed.to_string(),
            &r.h.to_string(),
            r.params_json.as_str(),
            r.metric.as_str(),
            &fmt17(r.value),
            &r.stderr.map(fmt17).unwrap_or_default(),
            &r.n.to_string(),
            r.notes.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_string(rows: &[CsvRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn write_rows_to_path(path: &Path, rows: &[CsvRow]) -> std::io::Result<()> {
    std::fs::write(path, rows_to_string(rows))
}
