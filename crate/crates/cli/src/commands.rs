use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lexiscreen_core::dataset::{read_feature_rows, write_rows_csv};
use lexiscreen_core::eval::{
    calibrate_threshold_with_step, cross_validate_scores, evaluate_pooled, question_importance,
    ranked, synth_generate, type_importance, Calibration, GroupImportance, PooledScores,
    ThresholdChoice,
};
use lexiscreen_core::forest::{self, check_threshold, class_weights};
use lexiscreen_core::{
    extract_features, read_dataset, AgeVariant, Dataset, FeatureVector, ForestModel,
    ParticipantRecord, QuestionManifest, SessionLog, TrainConfig,
};
use serde::Serialize;

use crate::error::{CliError, Context};
use crate::io::{emit, read_file, read_input, write_output};
use crate::{
    CalibrateArgs, CvArgs, DataArgs, EvaluateArgs, ExtractArgs, ForestArgs, Grouping,
    ImportanceArgs, PredictArgs, ServeArgs, SweepArgs, SynthArgs, TrainArgs,
};

fn load_dataset(args: &DataArgs) -> Result<Dataset, CliError> {
    let bytes = read_input(&args.data)?;
    let source = if args.data == "-" {
        "standard input"
    } else {
        &args.data
    };
    read_dataset(bytes.as_slice(), args.variant).context(format!("reading {source}"))
}

fn load_model(path: &Path) -> Result<ForestModel, CliError> {
    let bytes = read_file(path)?;
    ForestModel::from_bytes(&bytes).context(format!("loading model {}", path.display()))
}

fn load_manifest(path: Option<&Path>) -> Result<QuestionManifest, CliError> {
    match path {
        None => Ok(QuestionManifest::builtin()),
        Some(p) => {
            let text = String::from_utf8(read_file(p)?)
                .map_err(|_| CliError::Usage(format!("manifest {} is not UTF-8", p.display())))?;
            QuestionManifest::from_json(&text).context(format!("loading manifest {}", p.display()))
        }
    }
}

fn train_config(f: &ForestArgs) -> TrainConfig {
    TrainConfig {
        n_trees: f.trees,
        max_depth: f.depth,
        mtry: f.mtry,
        seed: f.seed,
        ..TrainConfig::default()
    }
}

fn pooled_scores(data: &Dataset, f: &ForestArgs, cv: &CvArgs) -> Result<PooledScores, CliError> {
    cross_validate_scores(data, &train_config(f), cv.k, f.seed).context("cross-validation")
}

fn check_fixed(threshold: Option<f64>) -> Result<(), CliError> {
    if let Some(t) = threshold {
        check_threshold(t).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<(), CliError> {
    check_fixed(a.threshold)?;
    let data = load_dataset(&a.data)?;
    let threshold = match a.threshold {
        Some(t) => t,
        None => {
            let pooled = pooled_scores(&data, &a.forest, &a.cv)?;
            let choice = ThresholdChoice::Calibrated {
                grid_step: a.cv.threshold_grid,
            };
            evaluate_pooled(&pooled, choice)
                .context("calibrating threshold")?
                .chosen_threshold
        }
    };
    let model = forest::train(&data, &train_config(&a.forest))
        .and_then(|m| m.with_threshold(threshold))
        .context("training")?;
    tracing::info!(
        variant = %model.variant,
        trees = model.trees.len(),
        threshold,
        "trained model"
    );
    write_output(a.out.as_deref(), &model.to_bytes())
}

pub fn evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    check_fixed(a.threshold)?;
    let data = load_dataset(&a.data)?;
    let pooled = pooled_scores(&data, &a.forest, &a.cv)?;
    let choice = match a.threshold {
        Some(t) => ThresholdChoice::Fixed(t),
        None => ThresholdChoice::Calibrated {
            grid_step: a.cv.threshold_grid,
        },
    };
    let report = evaluate_pooled(&pooled, choice).context("evaluation")?;
    if let Some(path) = &a.pr_curve {
        write_output(Some(path), report.pr_curve_csv().as_bytes())?;
    }
    emit(
        &report,
        || report.to_string(),
        a.output.format,
        a.output.out.as_deref(),
    )
}

#[derive(Serialize)]
struct CalibrationOutput {
    #[serde(flatten)]
    calibration: Calibration,
    fold_sizes: Vec<usize>,
}

pub fn calibrate(a: CalibrateArgs) -> Result<(), CliError> {
    let data = load_dataset(&a.data)?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    if let Some(m) = &model {
        if m.variant != data.variant {
            return Err(CliError::Usage(format!(
                "model is for {} but the data uses the {} layout",
                m.variant, data.variant
            )));
        }
    }
    let pooled = pooled_scores(&data, &a.forest, &a.cv)?;
    let weights = class_weights(&pooled.labels)
        .context("class weights")?
        .expand(&pooled.labels);
    let calibration = calibrate_threshold_with_step(
        &pooled.scores,
        &pooled.labels,
        &weights,
        a.cv.threshold_grid,
    )
    .context("calibration")?;
    if let (Some(m), Some(out)) = (model, &a.model_out) {
        let m = m
            .with_threshold(calibration.threshold)
            .context("updating threshold")?;
        write_output(Some(out), &m.to_bytes())?;
    }
    let output = CalibrationOutput {
        calibration,
        fold_sizes: pooled.fold_sizes,
    };
    emit(
        &output,
        || {
            format!(
                "threshold {:.4}  FNR {:.4}  FPR {:.4}  gap {:.4}",
                calibration.threshold, calibration.fnr, calibration.fpr, calibration.gap
            )
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}

#[derive(Serialize)]
struct ImportanceOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    questions: Option<Vec<GroupImportance>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    types: Option<Vec<GroupImportance>>,
}

fn importance_table(title: &str, groups: &[GroupImportance], out: &mut String) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:<10} {:>10} {:>9}", "group", "mean gain", "relative");
    for g in groups {
        let _ = writeln!(
            out,
            "{:<10} {:>10.5} {:>9.1}",
            g.group.to_string(),
            g.mean_gain,
            g.relative
        );
    }
}

pub fn importance(a: ImportanceArgs) -> Result<(), CliError> {
    let data = load_dataset(&a.data)?;
    let order = |g: Vec<GroupImportance>| if a.ranked { ranked(g) } else { g };
    let questions = match a.by {
        Grouping::Question | Grouping::Both => Some(order(
            question_importance(&data).context("question importance")?,
        )),
        Grouping::Type => None,
    };
    let types = match a.by {
        Grouping::Type | Grouping::Both => {
            Some(order(type_importance(&data).context("type importance")?))
        }
        Grouping::Question => None,
    };
    let output = ImportanceOutput { questions, types };
    emit(
        &output,
        || {
            let mut s = String::new();
            if let Some(q) = &output.questions {
                importance_table("by question", q, &mut s);
            }
            if let Some(t) = &output.types {
                if !s.is_empty() {
                    s.push('\n');
                }
                importance_table("by measure type", t, &mut s);
            }
            s
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let data = load_dataset(&a.data)?;
    let cells = lexiscreen_core::eval::sweep(
        &data,
        &train_config(&a.forest),
        &a.depths,
        &a.mtrys,
        a.cv.k,
        a.forest.seed,
    )
    .context("sweep")?;
    emit(
        &cells,
        || {
            let mut s = format!(
                "{:>6} {:>6} {:>8} {:>9} {:>10}\n",
                "depth", "mtry", "ROC AUC", "bal. acc", "threshold"
            );
            for c in &cells {
                let _ = writeln!(
                    s,
                    "{:>6} {:>6} {:>8.4} {:>9.4} {:>10.4}",
                    c.depth, c.mtry, c.roc_auc, c.balanced_accuracy, c.threshold
                );
            }
            s
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}

#[derive(Serialize)]
struct Scored {
    id: String,
    score: f64,
    flagged: bool,
    threshold: f64,
}

pub fn predict(a: PredictArgs) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let vectors: Vec<(String, FeatureVector)> = if let Some(path) = &a.session {
        let manifest = load_manifest(a.manifest.as_deref())?;
        let log = SessionLog::read_jsonl(read_file(path)?.as_slice())
            .context(format!("reading {}", path.display()))?;
        let fv = extract_features(&log, &manifest).context("extracting features")?;
        vec![(log.session_id, fv)]
    } else {
        let spec = a.features.as_deref().unwrap_or("-");
        read_feature_rows(read_input(spec)?.as_slice(), model.variant)
            .context(format!("reading {spec}"))?
            .into_iter()
            .map(|(r, fv)| (r.id, fv))
            .collect()
    };
    let mut scored = Vec::with_capacity(vectors.len());
    for (id, fv) in vectors {
        if fv.variant != model.variant {
            return Err(CliError::Usage(format!(
                "`{id}` uses the {} layout but the model expects {}",
                fv.variant, model.variant
            )));
        }
        let score = model
            .predict_score(&fv.values)
            .context(format!("scoring `{id}`"))?;
        scored.push(Scored {
            id,
            score,
            flagged: score >= model.threshold,
            threshold: model.threshold,
        });
    }
    emit(
        &scored,
        || {
            let mut s = format!("{:<24} {:>8} {:>8}\n", "id", "score", "flagged");
            for p in &scored {
                let _ = writeln!(s, "{:<24} {:>8.4} {:>8}", p.id, p.score, p.flagged);
            }
            s
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}

pub fn synth(a: SynthArgs) -> Result<(), CliError> {
    let data = synth_generate(a.n, a.prevalence, a.separation, a.seed, a.variant)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut bytes = Vec::new();
    data.write_csv(&mut bytes).context("writing CSV")?;
    write_output(a.out.as_deref(), &bytes)
}

/// Expand directories into their `*.jsonl` files, sorted by name.
fn session_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input).map_err(|source| CliError::Input {
                path: input.clone(),
                source,
            })?;
            let mut found = Vec::new();
            for entry in entries {
                let path = entry
                    .map_err(|source| CliError::Input {
                        path: input.clone(),
                        source,
                    })?
                    .path();
                if path.extension().is_some_and(|e| e == "jsonl") {
                    found.push(path);
                }
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

pub fn extract(a: ExtractArgs) -> Result<(), CliError> {
    let manifest = load_manifest(a.manifest.as_deref())?;
    let mut variant: Option<AgeVariant> = a.variant;
    let mut rows: Vec<(ParticipantRecord, FeatureVector)> = Vec::new();
    for path in session_files(&a.sessions)? {
        let log = SessionLog::read_jsonl(read_file(&path)?.as_slice())
            .context(format!("reading {}", path.display()))?;
        let fv = extract_features(&log, &manifest).context(format!("{}", path.display()))?;
        let target = *variant.get_or_insert(fv.variant);
        let fv = if fv.variant == target {
            fv
        } else {
            fv.project(target).context(format!("{}", path.display()))?
        };
        let mut record = log.participant.clone();
        record.id = log.session_id.clone();
        rows.push((record, fv));
    }
    let variant = variant.unwrap_or(AgeVariant::Full);
    let mut bytes = Vec::new();
    write_rows_csv(&mut bytes, variant, &rows).context("writing CSV")?;
    tracing::info!(rows = rows.len(), %variant, "extracted sessions");
    write_output(a.out.as_deref(), &bytes)
}

pub fn serve(a: ServeArgs) -> Result<(), CliError> {
    let config = lexiscreen_service::ServiceConfig {
        data_dir: a.data_dir,
        manifest_path: a.manifest,
        api_token: a.api_token,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    runtime
        .block_on(lexiscreen_service::serve(a.listen, config))
        .map_err(|e| CliError::Internal(format!("service stopped: {e}")))
}
