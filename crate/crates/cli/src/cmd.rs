// Licensed under the Apache-2.0 license

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use rotsim_core::bench::{reports_from_csv, reports_to_csv, validate, DEFAULT_SEED};
use rotsim_core::bootflow::image::{verify_manifest, FlashImage, ManifestStatus};
use rotsim_core::bootflow::jtag::parse_script;
use rotsim_core::bootflow::lifecycle::CREATOR_KEY;
use rotsim_core::bootflow::HaltReason;
use rotsim_core::{
    reference_grid, run_benchmark, software_speedup, speedup, Algorithm, ArchVariant, BenchmarkReport, BenchmarkSpec,
    BootMode, BootResult, BootSources, Location, MemoryMap, PhaseLabel, SoftwareBaseline,
};

use crate::config::SweepConfig;
use crate::output::{emit, read, stdout, write_atomic};
use crate::{Failure, ReportFormat, ViewFormat};

fn render(reports: &[BenchmarkReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => reports_to_csv(reports),
        ReportFormat::Json if reports.len() == 1 => reports[0].to_json(),
        ReportFormat::Json => serde_json::to_string_pretty(reports).expect("reports serialize"),
    }
}

pub fn run(
    alg: Algorithm,
    size: u64,
    mem: Location,
    arch: ArchVariant,
    seed: Option<u64>,
    out: Option<&Path>,
    format: ReportFormat,
) -> Result<(), Failure> {
    let spec = BenchmarkSpec::new(alg, size, mem, arch).with_seed(seed.unwrap_or(DEFAULT_SEED));
    validate(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = run_benchmark(&spec).map_err(|e| Failure::Internal(e.to_string()))?;
    emit(out, &render(&[report], format))
}

pub fn sweep(
    config: Option<&Path>,
    reference: bool,
    out: Option<&Path>,
    format: ReportFormat,
    summary_out: Option<&Path>,
) -> Result<(), Failure> {
    let specs = match (config, reference) {
        (Some(_), true) => return Err(Failure::Usage("give either a sweep file or --reference-grid".into())),
        (None, _) => reference_grid(),
        (Some(p), false) => {
            let text =
                String::from_utf8(read(p)?).map_err(|_| Failure::Usage(format!("{}: not UTF-8", p.display())))?;
            let cfg = SweepConfig::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            cfg.specs()
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
    };
    let reports = specs
        .par_iter()
        .map(run_benchmark)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    emit(out, &render(&reports, format))?;
    let rows = summarize(&reports);
    eprint!("{}", summary_table(&rows));
    if let Some(p) = summary_out {
        write_atomic(p, summary_csv(&rows).as_bytes())?;
    }
    Ok(())
}

/// One extended-variant run with its speedups.
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub payload_bytes: u64,
    pub location: Location,
    pub extended: f64,
    pub base: Option<f64>,
    pub base_over_extended: Option<f64>,
    pub software_over_extended: f64,
}

pub fn summarize(reports: &[BenchmarkReport]) -> Vec<SummaryRow> {
    let sw = SoftwareBaseline::default();
    reports
        .iter()
        .filter(|r| r.variant == ArchVariant::Extended)
        .map(|e| {
            let base = reports.iter().find(|b| {
                b.variant == ArchVariant::Base
                    && b.algorithm == e.algorithm
                    && b.payload_bytes == e.payload_bytes
                    && b.location == e.location
            });
            SummaryRow {
                algorithm: e.algorithm,
                payload_bytes: e.payload_bytes,
                location: e.location,
                extended: e.clks_per_byte,
                base: base.map(|b| b.clks_per_byte),
                base_over_extended: base.and_then(|b| speedup(b, e).ok()),
                software_over_extended: software_speedup(e, &sw),
            }
        })
        .collect()
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"))
}

fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<7} {:>6} {:<4} {:>9} {:>9} {:>9} {:>9}\n",
        "alg", "bytes", "mem", "ext", "base", "base/ext", "sw/ext"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<7} {:>6} {:<4} {:>9.2} {:>9} {:>9} {:>9.1}",
            r.algorithm.name(),
            r.payload_bytes,
            r.location,
            r.extended,
            opt(r.base, 2),
            opt(r.base_over_extended, 2),
            r.software_over_extended
        );
    }
    s
}

fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("algorithm,payload_bytes,location,extended_clks_per_byte,base_clks_per_byte,speedup_base_over_extended,speedup_software_over_extended\n");
    for r in rows {
        let o = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.algorithm.name(),
            r.payload_bytes,
            r.location,
            r.extended,
            o(r.base),
            o(r.base_over_extended),
            r.software_over_extended
        );
    }
    s
}

pub fn boot(mode: BootMode, image: Option<&Path>, script: Option<&Path>, json: bool) -> Result<(), Failure> {
    let mut sources = BootSources::default();
    if let Some(p) = image {
        sources.spi_image = Some(read(p)?);
    }
    if let Some(p) = script {
        let text = String::from_utf8(read(p)?).map_err(|_| Failure::Usage(format!("{}: not UTF-8", p.display())))?;
        let cmds = parse_script(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        sources.jtag_script = Some(cmds);
        sources.script_dir = p.parent().map(Path::to_path_buf);
    }
    let (outcome, _soc) = rotsim_core::run_boot(mode, &sources).map_err(|e| Failure::Internal(e.to_string()))?;

    if json {
        stdout(&serde_json::to_string_pretty(&outcome).expect("outcome serializes"));
    } else {
        let mut s = String::new();
        for rec in &outcome.stage_log {
            let tag = if rec.ok { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "{tag} {:<15} {}", rec.stage.to_string(), rec.detail);
        }
        let _ = match &outcome.result {
            BootResult::HostBooted(addr) => writeln!(s, "outcome: HostBooted entry={addr:#x}"),
            BootResult::DebugComplete { pc } => writeln!(s, "outcome: DebugComplete pc={pc:#x}"),
            BootResult::Halted(r) => writeln!(s, "outcome: Halted ({r})"),
        };
        stdout(&s);
    }

    match (&outcome.result, mode) {
        (BootResult::HostBooted(_), BootMode::Secure | BootMode::Hybrid) => Ok(()),
        (BootResult::DebugComplete { .. }, BootMode::Debug) => Ok(()),
        (BootResult::Halted(HaltReason::MissingSource(m)), _) => Err(Failure::Usage(m.clone())),
        (BootResult::Halted(r), _) => Err(Failure::Boot(match outcome.failing_stage() {
            Some(stage) => format!("{r} at {stage}"),
            None => r.to_string(),
        })),
        (other, _) => Err(Failure::Boot(format!("{mode:?} boot ended in {other:?}"))),
    }
}

fn load_key(path: &Path) -> Result<[u8; 32], Failure> {
    let raw = std::fs::read(path).map_err(|e| Failure::Usage(format!("key {}: {e}", path.display())))?;
    if let Ok(k) = <[u8; 32]>::try_from(raw.as_slice()) {
        return Ok(k);
    }
    let text = std::str::from_utf8(&raw).unwrap_or("").trim();
    let bytes = hex::decode(text).map_err(|_| {
        Failure::Usage(format!(
            "key {}: expected 32 raw bytes or 64 hex characters",
            path.display()
        ))
    })?;
    <[u8; 32]>::try_from(bytes.as_slice()).map_err(|_| {
        Failure::Usage(format!(
            "key {}: decodes to {} bytes, expected 32",
            path.display(),
            bytes.len()
        ))
    })
}

pub fn pack_image(body: &Path, entry: u64, key: &Path, out: &Path) -> Result<(), Failure> {
    let key = load_key(key)?;
    let body = read(body)?;
    let image = FlashImage::pack(entry, &body, &key).map_err(|e| Failure::Usage(e.to_string()))?;
    let bytes = image.to_bytes();
    // Self-check before the file lands.
    let reparsed = FlashImage::parse(&bytes).map_err(|e| Failure::Internal(e.to_string()))?;
    if verify_manifest(&reparsed, &key) != ManifestStatus::Ok {
        return Err(Failure::Internal("packed image fails its own verification".into()));
    }
    write_atomic(out, &bytes)?;
    let signer = if key == CREATOR_KEY {
        "creator key"
    } else {
        "custom key"
    };
    eprintln!(
        "{}: {} bytes, entry {entry:#x}, signed with {signer}",
        out.display(),
        bytes.len()
    );
    Ok(())
}

fn load_reports(path: &Path) -> Result<Vec<BenchmarkReport>, Failure> {
    let text = String::from_utf8(read(path)?).map_err(|_| Failure::Usage(format!("{}: not UTF-8", path.display())))?;
    let bad = |m: String| Failure::Usage(format!("{}: {m}", path.display()));
    let t = text.trim_start();
    if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| bad(e.to_string()))
    } else if t.starts_with('{') {
        BenchmarkReport::from_json(t)
            .map(|r| vec![r])
            .map_err(|e| bad(e.to_string()))
    } else {
        reports_from_csv(&text).map_err(|e| bad(e.to_string()))
    }
}

pub fn report(input: &Path, format: ViewFormat) -> Result<(), Failure> {
    let reports = load_reports(input)?;
    match format {
        ViewFormat::Csv => stdout(&reports_to_csv(&reports)),
        ViewFormat::Table => {
            let mut s = format!(
                "{:<7} {:>6} {:<4} {:<8} {:>9} {:>8}",
                "alg", "bytes", "mem", "arch", "cycles", "clks/B"
            );
            for l in PhaseLabel::ALL {
                let _ = write!(s, " {:>9}", l.to_string());
            }
            s.push('\n');
            for r in &reports {
                let _ = write!(
                    s,
                    "{:<7} {:>6} {:<4} {:<8} {:>9} {:>8.2}",
                    r.algorithm.name(),
                    r.payload_bytes,
                    r.location,
                    r.variant,
                    r.total_cycles,
                    r.clks_per_byte
                );
                for l in PhaseLabel::ALL {
                    let _ = write!(s, " {:>8.1}%", r.phase(l));
                }
                s.push('\n');
            }
            stdout(&s);
        }
    }
    Ok(())
}

pub fn memory_map() -> Result<(), Failure> {
    stdout(&serde_json::to_string_pretty(&MemoryMap::default()).expect("map serializes"));
    Ok(())
}
