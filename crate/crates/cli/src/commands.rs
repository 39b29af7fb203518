use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use gunrock_core::analytics::{load_logs, run_engagement_analyses, write_synthetic_log, AnalysisReport, SynthConfig};
use gunrock_core::phonetic::{load_gazetteer, Corrector, PhoneticIndex, RateBounds, TimedToken};
use gunrock_core::{load_components, DataSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

pub fn data_source(dir: Option<&Path>) -> DataSource {
    dir.map_or(DataSource::Bundled, |d| DataSource::Dir(d.to_path_buf()))
}

/// One input line: a bare token array or an object with a `tokens` field.
#[derive(serde::Deserialize)]
#[serde(untagged)]
enum TokenLine {
    Bare(Vec<TimedToken>),
    Wrapped { tokens: Vec<TimedToken> },
}

/// Correct every utterance in a JSONL file against the given gazetteers,
/// writing one JSON object per input line.
pub fn correct(kb: &[PathBuf], input: &Path, config: Option<&Path>, out: &mut impl Write) -> anyhow::Result<usize> {
    let components = load_components(&data_source(config))?;
    let mut indexes = Vec::new();
    for path in kb {
        let rows = load_gazetteer(path).with_context(|| format!("reading {}", path.display()))?;
        indexes.push(Arc::new(PhoneticIndex::build(rows)));
    }
    let corrector = Corrector::new(indexes, Arc::clone(&components.pipeline.chunker), RateBounds::default());
    let reader = std::io::BufReader::new(std::fs::File::open(input).with_context(|| format!("opening {}", input.display()))?);
    let mut n = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tokens = match serde_json::from_str(&line).with_context(|| format!("{}:{}", input.display(), i + 1))? {
            TokenLine::Bare(t) | TokenLine::Wrapped { tokens: t } => t,
        };
        for t in &tokens {
            t.validate().with_context(|| format!("{}:{}", input.display(), i + 1))?;
        }
        let outcome = corrector.correct(&tokens);
        serde_json::to_writer(&mut *out, &serde_json::json!({ "text": outcome.text, "corrections": outcome.applied }))?;
        writeln!(out)?;
        n += 1;
    }
    Ok(n)
}

pub fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
        Format::Csv => {
            let mut out = String::from("analysis,x,y\n");
            for a in &report.analyses {
                for (x, y) in &a.points {
                    let _ = writeln!(out, "{},{x},{y}", a.id);
                }
            }
            out
        }
    }
}

pub fn analyze(log: &Path, min_turns: u32, out_dir: Option<&Path>) -> anyhow::Result<AnalysisReport> {
    if !log.exists() {
        bail!("log file {} does not exist", log.display());
    }
    let loaded = load_logs(log, min_turns)?;
    log::info!(
        "{} sessions, {} kept, {} below {min_turns} user turns, {} malformed lines",
        loaded.sessions_seen,
        loaded.metrics.len(),
        loaded.excluded_short,
        loaded.skipped_lines
    );
    let report = run_engagement_analyses(&loaded.metrics);
    if let Some(dir) = out_dir {
        for p in report.write_outputs(dir)? {
            log::info!("wrote {}", p.display());
        }
    }
    Ok(report)
}

pub fn synth(out: &Path, conversations: usize, seed: u64) -> anyhow::Result<String> {
    let cfg = SynthConfig { conversations, seed, ..Default::default() };
    let summary = write_synthetic_log(out, &cfg)?;
    Ok(serde_json::to_string_pretty(&summary)?)
}
