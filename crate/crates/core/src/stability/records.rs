//! Stability records, their CSV form, and the descriptive statistics over sweeps.

use std::fmt::Write as _;

use crate::diagnostics::eta;
use crate::error::{Error, Result};
use crate::geometry::ScattererKind;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord {
    pub case_id: String,
    pub t: f64,
    pub d: f64,
    pub d_hat: f64,
    pub d_tilde: f64,
    /// `max_j ‖E_A − E_B‖_{L²(B_ρ̃(x₀))}`.
    pub eps_near: f64,
    /// The same for the magnetic field.
    pub eps_near_h: f64,
    /// `max_j ‖E∞_A − E∞_B‖_{L²(S²)}`.
    pub eps_far: f64,
    /// `η(eps_near)`, present when `0 < eps_near < 1/e`.
    pub eta_of_eps: Option<f64>,
    pub k: f64,
    pub n_waves: usize,
    pub ndof_a: usize,
    pub ndof_b: usize,
    pub kind: ScattererKind,
    pub b0: Option<f64>,
}

/// `η(ε)` where defined.
pub fn eta_of(eps: f64) -> Option<f64> {
    eta(eps).ok()
}

pub const SCHEMA_VERSION: u32 = 1;
pub const RECORD_CSV_HEADER: &str = "case_id,t,d,d_hat,d_tilde,eps_near,eps_far,eta_of_eps,k,n_waves,ndof_a,ndof_b";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl StabilityRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.case_id,
            num(self.t),
            num(self.d),
            num(self.d_hat),
            num(self.d_tilde),
            num(self.eps_near),
            num(self.eps_far),
            self.eta_of_eps.map(num).unwrap_or_default(),
            num(self.k),
            self.n_waves,
            self.ndof_a,
            self.ndof_b
        )
    }
}

/// A complete CSV document: schema line, `key=value` metadata comments, header, rows.
pub fn records_csv(records: &[StabilityRecord], metadata: &[(&str, String)]) -> String {
    let mut s = format!("# schema_version={SCHEMA_VERSION}\n");
    for (k, v) in metadata {
        let _ = writeln!(s, "# {k}={v}");
    }
    let _ = writeln!(s, "{RECORD_CSV_HEADER}");
    for r in records {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Appends rows to `path`, writing the schema and header first if the file is new or empty.
/// An existing file must carry the same schema version and header.
pub fn append_records_csv(path: &std::path::Path, records: &[StabilityRecord], metadata: &[(&str, String)]) -> Result<()> {
    use std::io::Write as _;
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let existing = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(io(e)),
    };
    let text = if existing.is_empty() {
        records_csv(records, metadata)
    } else {
        let schema = format!("# schema_version={SCHEMA_VERSION}");
        let mut lines = existing.lines();
        if lines.next() != Some(schema.as_str()) || !existing.lines().any(|l| l == RECORD_CSV_HEADER) {
            return Err(Error::validation(format!("{} is not a schema {SCHEMA_VERSION} record file", path.display())));
        }
        let mut s = String::new();
        for r in records {
            let _ = writeln!(s, "{}", r.csv_row());
        }
        s
    };
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)
}

/// Descriptive fit `log d = log A + C log η(ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityFit {
    pub a: f64,
    pub c: f64,
    /// RMS of the residuals in `log d`.
    pub residual: f64,
    pub n_used: usize,
}

/// Least-squares fit over the records with `d > 0` and `η(ε)` defined.
pub fn fit_stability_curve(records: &[StabilityRecord]) -> Result<StabilityFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.d > 0.0)
        .filter_map(|r| r.eta_of_eps.map(|e| (e.ln(), r.d.ln())))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Insufficient(format!(
            "stability fit needs at least 3 records with d > 0 and eps < 1/e, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Insufficient("all records share the same eta value".into()));
    }
    let c = sxy / sxx;
    let log_a = my - c * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - log_a - c * p.0).powi(2)).sum();
    Ok(StabilityFit {
        a: log_a.exp(),
        c,
        residual: (rss / n).sqrt(),
        n_used: pts.len(),
    })
}

/// Ranks starting at 1, ties receiving their average rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &id in &idx[i..=j] {
            out[id] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` with fewer than two points or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let m = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m).powi(2);
        syy += (b - m).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
