// Licensed under the Apache-2.0 license

use std::collections::BTreeMap;

use super::{BenchmarkReport, PhaseLabel};
use crate::SimError;

pub const CSV_HEADER: [&str; 14] = [
    "algorithm",
    "payload_bytes",
    "location",
    "variant",
    "total_cycles",
    "clks_per_byte",
    "phase_pct.Configure",
    "phase_pct.Digest",
    "phase_pct.Wait",
    "phase_pct.Finalize",
    "phase_pct.Cipher",
    "phase_pct.Dma",
    "phase_pct.DmaWait",
    "digest_hex",
];

/// Flatten reports to CSV, one row per report, `phase_pct.<Label>` columns.
pub fn reports_to_csv(reports: &[BenchmarkReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        let mut row = vec![
            r.algorithm.to_string(),
            r.payload_bytes.to_string(),
            r.location.to_string(),
            r.variant.to_string(),
            r.total_cycles.to_string(),
            r.clks_per_byte.to_string(),
        ];
        row.extend(PhaseLabel::ALL.iter().map(|l| r.phase(*l).to_string()));
        row.push(r.digest_hex.clone());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

/// Inverse of [`reports_to_csv`]; columns are matched by header name.
pub fn reports_from_csv(text: &str) -> Result<Vec<BenchmarkReport>, SimError> {
    let bad = |m: String| SimError::Config(format!("csv: {m}"));
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let idx: Vec<usize> = CSV_HEADER.iter().map(|h| col(h)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| rec.get(idx[i]).unwrap_or("");
        let num = |i: usize| f(i).parse::<f64>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[i])));
        let int = |i: usize| f(i).parse::<u64>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[i])));
        let mut phase_pct = BTreeMap::new();
        for (k, label) in PhaseLabel::ALL.iter().enumerate() {
            phase_pct.insert(*label, num(6 + k)?);
        }
        out.push(BenchmarkReport {
            algorithm: f(0).parse().map_err(bad)?,
            payload_bytes: int(1)?,
            location: f(2).parse().map_err(bad)?,
            variant: f(3).parse().map_err(bad)?,
            total_cycles: int(4)?,
            clks_per_byte: num(5)?,
            phase_pct,
            digest_hex: f(13).to_string(),
        });
    }
    Ok(out)
}
