//! Batch scans. Families are visited in `(n, weights, d)` order with weights
//! as nondecreasing tuples; records are computed in parallel per batch and
//! written in that order.
//!
//! With `--output`, a cursor file next to the output records how many
//! families and bytes are done. It is replaced atomically after every
//! batch, so an interrupted scan resumes by truncating the output to the
//! recorded length and continuing from the recorded family.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use wpaut::ambient::well_formed;
use wpaut::orders::Status;
use wpaut::WeightedFamily;

use crate::report::{QueryReport, Timings};
use crate::{orders_report, BudgetArgs, EXIT_UNRESOLVED};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Clone, Debug)]
pub struct Range(pub RangeInclusive<u64>);

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let bad = || format!("expected N or A..B, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: u64 = lo.parse().map_err(|_| bad())?;
    let hi: u64 = hi.parse().map_err(|_| bad())?;
    Ok(Range(lo..=hi))
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Dimension n (number of weights is n + 2), e.g. 3 or 1..3
    #[arg(long, value_parser = parse_range)]
    dim: Range,
    /// Weights range over 1..=MAX_WEIGHT
    #[arg(long)]
    max_weight: u64,
    /// Degrees 3..=MAX_DEGREE unless --degree is given
    #[arg(long)]
    max_degree: Option<u64>,
    /// Degree range, e.g. 4..4 or 3..12
    #[arg(long, value_parser = parse_range)]
    degree: Option<Range>,
    /// Only families with every weight dividing d
    #[arg(long, conflicts_with = "coprime")]
    divides_d: bool,
    /// Only families with every weight coprime to d
    #[arg(long)]
    coprime: bool,
    /// Largest order examined per family (default: per-family limit)
    #[arg(long)]
    max_order: Option<u64>,
    /// Skip prime powers p^r with r >= 2
    #[arg(long)]
    primes_only: bool,
    /// JSON-lines output file; standard output when absent (no cursor)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cursor file (default: OUTPUT.cursor)
    #[arg(long)]
    cursor: Option<PathBuf>,
    /// Discard an existing output and cursor instead of resuming
    #[arg(long)]
    restart: bool,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    /// Families per batch between cursor updates
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct Cursor {
    /// Identifies the scan parameters the cursor belongs to.
    key: String,
    next: usize,
    bytes: u64,
    total: usize,
}

impl ScanArgs {
    fn degrees(&self) -> Result<RangeInclusive<u64>> {
        match (&self.degree, self.max_degree) {
            (Some(r), Some(m)) => Ok(*r.0.start()..=(*r.0.end()).min(m)),
            (Some(r), None) => Ok(r.0.clone()),
            (None, Some(m)) => Ok(3..=m),
            (None, None) => bail!(UsageError("one of --max-degree or --degree is required".into())),
        }
    }

    fn key(&self) -> String {
        let b = self.budget.budgets();
        format!(
            "dim={:?} max_weight={} degrees={:?} divides_d={} coprime={} max_order={:?} primes_only={} budgets={},{},{} seed={} v={}",
            self.dim.0,
            self.max_weight,
            self.degrees().ok(),
            self.divides_d,
            self.coprime,
            self.max_order,
            self.primes_only,
            b.oracle_classes,
            b.monomials,
            b.cycles,
            self.budget.seed,
            crate::report::VERSION,
        )
    }
}

/// Families of the scan, in output order.
pub fn families(
    dims: RangeInclusive<u64>,
    max_weight: u64,
    degrees: RangeInclusive<u64>,
    divides_d: bool,
    coprime: bool,
) -> Vec<WeightedFamily> {
    let mut out = Vec::new();
    for n in dims {
        for w in wpaut_suite::weight_multisets(n as usize + 2, max_weight) {
            for d in degrees.clone() {
                if divides_d && w.iter().any(|&a| d % a != 0) {
                    continue;
                }
                if coprime && w.iter().any(|&a| num_integer::gcd(a, d) != 1) {
                    continue;
                }
                let Ok(f) = WeightedFamily::new(w.clone(), d) else { continue };
                if well_formed(&f) {
                    out.push(f);
                }
            }
        }
    }
    out
}

pub fn run(a: &ScanArgs, timings: bool) -> Result<u8> {
    if a.batch == 0 {
        bail!(UsageError("--batch must be positive".into()));
    }
    let degrees = a.degrees()?;
    let fams = families(a.dim.0.clone(), a.max_weight, degrees, a.divides_d, a.coprime);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .context("worker pool")?;

    let record = |f: &WeightedFamily| -> Result<(String, bool)> {
        let start = Instant::now();
        let mut r: QueryReport = orders_report(f, a.max_order, a.primes_only, &a.budget);
        if timings {
            r.timings = Some(Timings {
                total_ms: start.elapsed().as_millis(),
            });
        }
        let unresolved = r.any_status(Status::Unresolved);
        Ok((serde_json::to_string(&r)?, unresolved))
    };

    let mut unresolved = false;
    match &a.output {
        None => {
            let stdout = io::stdout();
            for chunk in fams.chunks(a.batch) {
                let lines: Vec<(String, bool)> =
                    pool.install(|| chunk.par_iter().map(record).collect::<Result<_>>())?;
                let mut out = stdout.lock();
                for (line, u) in lines {
                    unresolved |= u;
                    writeln!(out, "{line}")?;
                }
                out.flush()?;
            }
        }
        Some(path) => {
            let cursor_path = a.cursor.clone().unwrap_or_else(|| with_suffix(path, ".cursor"));
            let key = a.key();
            let mut cursor = start_cursor(path, &cursor_path, &key, fams.len(), a.restart)?;
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            while cursor.next < fams.len() {
                let end = (cursor.next + a.batch).min(fams.len());
                let chunk = &fams[cursor.next..end];
                let lines: Vec<(String, bool)> =
                    pool.install(|| chunk.par_iter().map(record).collect::<Result<_>>())?;
                let mut buf = String::new();
                for (line, u) in lines {
                    unresolved |= u;
                    buf.push_str(&line);
                    buf.push('\n');
                }
                file.write_all(buf.as_bytes())?;
                file.sync_data()?;
                cursor.next = end;
                cursor.bytes += buf.len() as u64;
                write_cursor(&cursor_path, &cursor)?;
            }
            // a resumed scan reports unresolved records from earlier runs too
            if !unresolved {
                unresolved = fs::read_to_string(path)?.contains("\"status\":\"unresolved\"");
            }
            eprintln!("{} families written to {}", fams.len(), path.display());
        }
    }
    Ok(if unresolved { EXIT_UNRESOLVED } else { 0 })
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn start_cursor(output: &Path, cursor_path: &Path, key: &str, total: usize, restart: bool) -> Result<Cursor> {
    let fresh = Cursor {
        key: key.to_string(),
        next: 0,
        bytes: 0,
        total,
    };
    let existing = if restart {
        None
    } else {
        match fs::read_to_string(cursor_path) {
            Ok(s) => Some(serde_json::from_str::<Cursor>(&s).with_context(|| {
                format!("unreadable cursor {}", cursor_path.display())
            })?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) => return Err(e.into()),
        }
    };
    let cursor = match existing {
        Some(c) if c.key == key && c.total == total => c,
        Some(_) => bail!(UsageError(format!(
            "{} belongs to a scan with other parameters; pass --restart to discard it",
            cursor_path.display()
        ))),
        None => fresh,
    };
    // drop whatever an interrupted batch left after the last recorded byte
    let f = OpenOptions::new().create(true).write(true).truncate(false).open(output)?;
    f.set_len(cursor.bytes)?;
    f.sync_all()?;
    write_cursor(cursor_path, &cursor)?;
    Ok(cursor)
}

fn write_cursor(path: &Path, cursor: &Cursor) -> Result<()> {
    let tmp = with_suffix(path, ".tmp");
    {
        let mut f = File::create(&tmp)?;
        serde_json::to_writer(&mut f, cursor)?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}
