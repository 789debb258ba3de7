use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use senselaw::report::{
    checkpoint_report_json, panel_csvs, panels_from_trajectory_json, per_word_csv, sweep_report_json,
    to_canonical_json, trajectory_report_json, PanelRow,
};
use senselaw::{
    analyze as analyze_corpus, build_trajectory, epsilon_sweep_corpus, generate_corpus, parse_eps_range,
    read_corpus, read_corpus_jsonl, write_corpus, EmbeddingCorpus, Error, Result,
};

use crate::{AnalyzeArgs, ExportArgs, SweepArgs, SynthArgs, TrajectoryArgs};

fn is_jsonl(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

fn load(path: &Path) -> Result<EmbeddingCorpus> {
    let file = File::open(path).map_err(|e| with_path(e, path))?;
    let reader = BufReader::new(file);
    let corpus = if is_jsonl(path) {
        read_corpus_jsonl(reader)
    } else {
        read_corpus(reader)
    };
    corpus.map_err(|e| match e {
        Error::Format(f) => Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("{}: {f}", path.display()),
        )),
        other => other,
    })
}

fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| with_path(e, path))
}

/// `<dir>/<stem>.<panel>.csv` for a report written to `path`.
fn panel_path(path: &Path, panel: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{panel}.csv"))
}

fn write_panels(prefix: &Path, rows: &[PanelRow]) -> Result<()> {
    for (name, csv) in panel_csvs(rows) {
        write_text(&panel_path(prefix, name), &csv)?;
    }
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let config = args.selection.config(args.eps);
    config.validate()?;
    let corpus = load(&args.input)?;
    let analysis = analyze_corpus(&corpus, &config)?;
    write_text(&args.output, &checkpoint_report_json(&analysis))?;
    if let Some(csv) = &args.per_word_csv {
        write_text(csv, &per_word_csv(&analysis.words))?;
    }
    Ok(())
}

fn checkpoint_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| with_path(e, dir))? {
        let path = entry.map_err(|e| with_path(e, dir))?.path();
        let wanted = path.extension().is_some_and(|e| e == "lexl" || e == "jsonl");
        if wanted && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn trajectory(args: &TrajectoryArgs) -> Result<()> {
    let config = args.selection.config(args.eps);
    config.validate()?;
    let thresholds = args.thresholds();
    thresholds.validate()?;
    let files = checkpoint_files(&args.inputs)?;
    if files.len() < 2 {
        return Err(Error::InsufficientCheckpoints(files.len()));
    }
    let mut summaries = Vec::with_capacity(files.len());
    for path in &files {
        let corpus = load(path)?;
        summaries.push(analyze_corpus(&corpus, &config)?.summary);
    }
    let report = build_trajectory(summaries, &thresholds)?;
    write_text(&args.output, &trajectory_report_json(&report))?;
    let rows: Vec<PanelRow> = report.summaries.iter().map(PanelRow::from).collect();
    write_panels(&args.output, &rows)
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let config = args.selection.config(0.3);
    config.validate()?;
    let eps_values = parse_eps_range(&args.eps)?;
    let corpus = load(&args.input)?;
    let result = epsilon_sweep_corpus(&corpus, &eps_values, &config)?;
    write_text(&args.output, &sweep_report_json(&result))
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let spec = args.spec();
    spec.validate()?;
    let (corpus, truth) = generate_corpus(&spec)?;
    let file = File::create(&args.output).map_err(|e| with_path(e, &args.output))?;
    let mut out = BufWriter::new(file);
    write_corpus(&corpus, &mut out)?;
    out.flush().map_err(|e| with_path(e, &args.output))?;
    if let Some(path) = &args.ground_truth {
        write_text(path, &to_canonical_json(&truth))?;
    }
    Ok(())
}

pub fn export(args: &ExportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).map_err(|e| with_path(e, &args.input))?;
    let rows = panels_from_trajectory_json(&text)?;
    write_panels(&args.output, &rows)
}
