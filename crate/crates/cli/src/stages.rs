//! The four pipeline stages and the resumable `bench` driver.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use iqa_core::dataset::{read_image_png, sample_images, write_image_png};
use iqa_core::stats::{
    builtin_group_specs, emit_boxplot_svg, emit_table_csv, full_precision_path, read_scores_file, summarize,
    write_scores_file, ScoreIndex,
};
use iqa_core::{
    apply_condition, psnr, BrisqueModel, Condition, DatasetId, ImageKey, Metric, SampleManifest, ScoreRecord,
};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{BenchConfig, Command};
use crate::failure::{Failure, Outcome};
use crate::raw;
use crate::stamp::{hash_dir, ContentHash, Stamp};

/// Standalone commands trust nothing but verified stamps; `Resume` may
/// skip a stage whose stamp and outputs are current.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Standalone,
    Resume,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRun {
    pub stage: String,
    pub dataset: DatasetId,
    pub skipped: bool,
}

pub const MANIFEST: &str = "manifest.json";
pub const PRISTINE_DIR: &str = "pristine";
pub const CORRUPTED_DIR: &str = "corrupted";
pub const SCORES_DIR: &str = "scores";
pub const REPORT_DIR: &str = "report";

pub fn corrupted_file_name(dataset: DatasetId, image_id: u64, condition: &str) -> String {
    format!("{dataset}_{image_id}_{condition}.png")
}

pub fn scores_path(dataset_dir: &Path, dataset: DatasetId, metric: Metric) -> PathBuf {
    dataset_dir.join(SCORES_DIR).join(format!("{dataset}_{metric}.csv"))
}

fn score_stage(metric: Metric) -> String {
    format!("score_{metric}")
}

fn report_stage(metric: Metric) -> String {
    format!("report_{metric}")
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure::config(format!("{}: {e}", path.display()))
}

/// Removes `dir` if present and creates it empty.
fn fresh_dir(dir: &Path) -> Outcome<()> {
    if dir.exists() {
        std::fs::remove_dir_all(dir).map_err(|e| io_fail(dir, e))?;
    }
    std::fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))
}

fn thread_pool(jobs: usize) -> Outcome<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::config(format!("cannot start {jobs} worker threads: {e}")))
}

fn provenance(stage: &str, what: &str) -> Failure {
    Failure::incomplete(format!(
        "provenance mismatch in `{stage}`: {what}; re-run the upstream stages (or `bench`)"
    ))
}

/// Checks that the files a stamp describes are still the ones on disk.
fn verify_output(stamp: &Stamp, actual: &str) -> Outcome<()> {
    if stamp.output_hash != actual {
        return Err(provenance(
            &stamp.stage,
            "outputs on disk differ from the recorded hash",
        ));
    }
    Ok(())
}

/// In resume mode, whether the stage can be skipped.
fn up_to_date(
    mode: Mode,
    dir: &Path,
    stage: &str,
    input: &str,
    current_output: impl FnOnce() -> Outcome<String>,
) -> bool {
    if mode != Mode::Resume {
        return false;
    }
    match Stamp::read(dir, stage) {
        Ok(Some(s)) if s.input_hash == input => matches!(current_output(), Ok(h) if h == s.output_hash),
        _ => false,
    }
}

// ---- sample ---------------------------------------------------------------

fn sample_output_hash(dir: &Path) -> Outcome<String> {
    Ok(ContentHash::new("sample-output")
        .file(&dir.join(MANIFEST), MANIFEST)?
        .text(&hash_dir(&dir.join(PRISTINE_DIR))?)
        .hex())
}

pub fn sample(cfg: &BenchConfig, d: DatasetId, mode: Mode) -> Outcome<StageRun> {
    let dir = cfg.dataset_dir(d);
    let files = raw::locate(d, &cfg.data_dir)?;
    let mut h = ContentHash::new("sample")
        .text(d.name())
        .text(&cfg.n.to_string())
        .text(&cfg.seed.to_string());
    for f in &files {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        h = h.file(f, &name)?;
    }
    let input = h.hex();
    let run = |skipped| StageRun {
        stage: "sample".into(),
        dataset: d,
        skipped,
    };
    if up_to_date(mode, &dir, "sample", &input, || sample_output_hash(&dir)) {
        info!("{d}: sample is up to date");
        return Ok(run(true));
    }

    let raw = raw::load(d, &cfg.data_dir)?;
    info!(
        "{d}: drawing {} of {} images (seed {})",
        cfg.n,
        raw.images.len(),
        cfg.seed
    );
    let (manifest, chosen) = sample_images(d, &raw.images, &raw.labels, cfg.n, cfg.seed)?;
    fresh_dir(&dir.join(PRISTINE_DIR))?;
    for (entry, img) in manifest.entries.iter().zip(&chosen) {
        write_image_png(img, &dir.join(&entry.file))?;
    }
    manifest.write(&dir.join(MANIFEST))?;

    Stamp {
        stage: "sample".into(),
        input_hash: input,
        output_hash: sample_output_hash(&dir)?,
        details: BTreeMap::from([("n".into(), cfg.n.to_string()), ("seed".into(), cfg.seed.to_string())]),
    }
    .write(&dir)?;
    Ok(run(false))
}

/// The verified sample stamp and manifest.
fn checked_sample(cfg: &BenchConfig, d: DatasetId) -> Outcome<(Stamp, SampleManifest)> {
    let dir = cfg.dataset_dir(d);
    let stamp = Stamp::require(&dir, "sample")?;
    verify_output(&stamp, &sample_output_hash(&dir)?)?;
    let manifest = SampleManifest::read(&dir.join(MANIFEST))?;
    if manifest.seed != cfg.seed {
        return Err(provenance(
            "sample",
            &format!(
                "the sample was drawn with seed {} but --seed is {}",
                manifest.seed, cfg.seed
            ),
        ));
    }
    Ok((stamp, manifest))
}

// ---- corrupt --------------------------------------------------------------

pub fn corrupt(cfg: &BenchConfig, d: DatasetId, mode: Mode) -> Outcome<StageRun> {
    let dir = cfg.dataset_dir(d);
    let (sample_stamp, manifest) = checked_sample(cfg, d)?;
    let names: Vec<&str> = cfg.conditions.iter().map(Condition::name).collect();
    let joined = names.join(",");
    let input = ContentHash::new("corrupt")
        .text(&sample_stamp.output_hash)
        .text(&cfg.seed.to_string())
        .text(cfg.gauss_mode.name())
        .text(&joined)
        .hex();
    let out_dir = dir.join(CORRUPTED_DIR);
    let run = |skipped| StageRun {
        stage: "corrupt".into(),
        dataset: d,
        skipped,
    };
    if up_to_date(mode, &dir, "corrupt", &input, || hash_dir(&out_dir)) {
        info!("{d}: corrupt is up to date");
        return Ok(run(true));
    }

    let pristine = manifest
        .entries
        .iter()
        .map(|e| read_image_png(&dir.join(&e.file)))
        .collect::<iqa_core::Result<Vec<_>>>()?;
    fresh_dir(&out_dir)?;
    let work: Vec<(usize, &Condition)> = (0..pristine.len())
        .flat_map(|i| cfg.conditions.iter().map(move |c| (i, c)))
        .collect();
    info!("{d}: writing {} corrupted images", work.len());
    thread_pool(cfg.jobs)?.install(|| {
        work.par_iter().try_for_each(|&(i, cond)| -> Outcome<()> {
            let id = manifest.entries[i].image_id;
            let key = ImageKey {
                seed: cfg.seed,
                dataset: d.name(),
                image_id: id,
            };
            let img = apply_condition(&pristine[i], cond, key, cfg.gauss_mode)?;
            write_image_png(&img, &out_dir.join(corrupted_file_name(d, id, cond.name())))?;
            Ok(())
        })
    })?;

    Stamp {
        stage: "corrupt".into(),
        input_hash: input,
        output_hash: hash_dir(&out_dir)?,
        details: BTreeMap::from([
            ("conditions".into(), joined),
            ("gauss_mode".into(), cfg.gauss_mode.name().into()),
            ("seed".into(), cfg.seed.to_string()),
        ]),
    }
    .write(&dir)?;
    Ok(run(false))
}

// ---- score ----------------------------------------------------------------

pub fn score(cfg: &BenchConfig, d: DatasetId, metric: Metric, mode: Mode) -> Outcome<StageRun> {
    let dir = cfg.dataset_dir(d);
    let (sample_stamp, manifest) = checked_sample(cfg, d)?;
    let corrupt_stamp = Stamp::require(&dir, "corrupt")?;
    let corrupted = dir.join(CORRUPTED_DIR);
    verify_output(&corrupt_stamp, &hash_dir(&corrupted)?)?;
    let conditions: Vec<String> = corrupt_stamp
        .detail("conditions")?
        .split(',')
        .map(str::to_string)
        .collect();

    let mut h = ContentHash::new("score")
        .text(metric.name())
        .text(&sample_stamp.output_hash)
        .text(&corrupt_stamp.output_hash);
    let model = match metric {
        Metric::Psnr => None,
        Metric::Brisque => {
            let (m, r) = cfg.model_paths()?;
            h = h.file(&m, "model")?.file(&r, "range")?;
            Some((m, r))
        }
    };
    let input = h.hex();
    let stage = score_stage(metric);
    let csv = scores_path(&dir, d, metric);
    let run = |skipped| StageRun {
        stage: stage.clone(),
        dataset: d,
        skipped,
    };
    if up_to_date(mode, &dir, &stage, &input, || {
        Ok(ContentHash::new("scores").file(&csv, "scores")?.hex())
    }) {
        info!("{d}: {stage} is up to date");
        return Ok(run(true));
    }

    let model = match model {
        Some((m, r)) => Some(BrisqueModel::load(&m, &r)?),
        None => None,
    };
    let pristine = match metric {
        Metric::Psnr => manifest
            .entries
            .iter()
            .map(|e| read_image_png(&dir.join(&e.file)))
            .collect::<iqa_core::Result<Vec<_>>>()?,
        Metric::Brisque => Vec::new(),
    };
    let work: Vec<(usize, &str)> = (0..manifest.entries.len())
        .flat_map(|i| conditions.iter().map(move |c| (i, c.as_str())))
        .collect();
    info!("{d}: {metric} on {} images", work.len());
    let records: Vec<ScoreRecord> = thread_pool(cfg.jobs)?.install(|| {
        work.par_iter()
            .map(|&(i, cond)| -> Outcome<ScoreRecord> {
                let id = manifest.entries[i].image_id;
                let img = read_image_png(&corrupted.join(corrupted_file_name(d, id, cond)))?;
                let score = match &model {
                    None => psnr(&pristine[i], &img)?.value(),
                    Some(m) => Some(m.score(&img)?),
                };
                Ok(ScoreRecord {
                    dataset: d,
                    image_id: id,
                    condition: cond.to_string(),
                    metric,
                    score,
                })
            })
            .collect::<Outcome<Vec<_>>>()
    })?;

    std::fs::create_dir_all(csv.parent().expect("scores dir")).map_err(|e| io_fail(&csv, e))?;
    write_scores_file(&csv, &records)?;
    Stamp {
        stage: stage.clone(),
        input_hash: input,
        output_hash: ContentHash::new("scores").file(&csv, "scores")?.hex(),
        details: BTreeMap::from([("rows".into(), records.len().to_string())]),
    }
    .write(&dir)?;
    Ok(run(false))
}

// ---- report ---------------------------------------------------------------

/// Files written by one report run, in a fixed order.
pub fn report_files(dataset_dir: &Path, d: DatasetId, metric: Metric) -> Vec<PathBuf> {
    let rep = dataset_dir.join(REPORT_DIR);
    builtin_group_specs(d, metric)
        .iter()
        .flat_map(|t| {
            let csv = rep.join(format!("{}.csv", t.stem()));
            [full_precision_path(&csv), rep.join(format!("{}.svg", t.stem())), csv]
        })
        .collect()
}

fn report_output_hash(dataset_dir: &Path, d: DatasetId, metric: Metric) -> Outcome<String> {
    let mut h = ContentHash::new("report");
    for f in report_files(dataset_dir, d, metric) {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        h = h.file(&f, &name)?;
    }
    Ok(h.hex())
}

pub fn report(cfg: &BenchConfig, d: DatasetId, metric: Metric, mode: Mode) -> Outcome<StageRun> {
    let dir = cfg.dataset_dir(d);
    let stage = report_stage(metric);
    let score_stamp = Stamp::require(&dir, &score_stage(metric))?;
    let csv = scores_path(&dir, d, metric);
    verify_output(&score_stamp, &ContentHash::new("scores").file(&csv, "scores")?.hex())?;
    let input = ContentHash::new("report").text(&score_stamp.output_hash).hex();
    let run = |skipped| StageRun {
        stage: stage.clone(),
        dataset: d,
        skipped,
    };
    if up_to_date(mode, &dir, &stage, &input, || report_output_hash(&dir, d, metric)) {
        info!("{d}: {stage} is up to date");
        return Ok(run(true));
    }

    let records = read_scores_file(&csv)?;
    if let Some(r) = records.iter().find(|r| r.dataset != d || r.metric != metric) {
        return Err(Failure::data(format!(
            "{} holds a {}/{} row",
            csv.display(),
            r.dataset,
            r.metric
        )));
    }
    let index = ScoreIndex::new(&records)?;
    let rep = dir.join(REPORT_DIR);
    std::fs::create_dir_all(&rep).map_err(|e| io_fail(&rep, e))?;
    for table in builtin_group_specs(d, metric) {
        let mut labels = Vec::new();
        let mut stats = Vec::new();
        let mut series = Vec::new();
        for g in &table.groups {
            let avg = index.average(g)?;
            if avg.na_excluded > 0 {
                warn!("{d}/{metric}: {} excluded {} NA scores", g.label, avg.na_excluded);
            }
            let st = summarize(&avg.values)
                .map_err(|_| Failure::incomplete(format!("{d}/{metric}: group {} has no defined scores", g.label)))?;
            labels.push(g.label.clone());
            stats.push(st);
            series.push((g.label.clone(), avg.values));
        }
        let stem = table.stem();
        emit_table_csv(&labels, &stats, &rep.join(format!("{stem}.csv")))?;
        let title = format!(
            "Statistics Analysis on Sample-{} of {}: {} with {} corruptions",
            index.images().len(),
            d.display_name(),
            metric.display_name(),
            table.family.title()
        );
        let y_label = format!("{} ({})", metric.display_name(), metric.unit());
        emit_boxplot_svg(&title, &y_label, &series, &rep.join(format!("{stem}.svg")))?;
    }

    Stamp {
        stage: stage.clone(),
        input_hash: input,
        output_hash: report_output_hash(&dir, d, metric)?,
        details: BTreeMap::new(),
    }
    .write(&dir)?;
    Ok(run(false))
}

// ---- driver ---------------------------------------------------------------

pub fn run(cmd: Command, cfg: &BenchConfig) -> Outcome<Vec<StageRun>> {
    let mut runs = Vec::new();
    for &d in &cfg.datasets {
        let ctx = |f: Failure| f.context(d.display_name());
        match cmd {
            Command::Sample => runs.push(sample(cfg, d, Mode::Standalone).map_err(ctx)?),
            Command::Corrupt => runs.push(corrupt(cfg, d, Mode::Standalone).map_err(ctx)?),
            Command::Score => {
                for &m in &cfg.metrics {
                    runs.push(score(cfg, d, m, Mode::Standalone).map_err(ctx)?);
                }
            }
            Command::Report => {
                for &m in &cfg.metrics {
                    runs.push(report(cfg, d, m, Mode::Standalone).map_err(ctx)?);
                }
            }
            Command::Bench => {
                runs.push(sample(cfg, d, Mode::Resume).map_err(ctx)?);
                runs.push(corrupt(cfg, d, Mode::Resume).map_err(ctx)?);
                for &m in &cfg.metrics {
                    runs.push(score(cfg, d, m, Mode::Resume).map_err(ctx)?);
                }
                for &m in &cfg.metrics {
                    runs.push(report(cfg, d, m, Mode::Resume).map_err(ctx)?);
                }
            }
        }
    }
    Ok(runs)
}
