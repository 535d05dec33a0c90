//! Subcommand implementations: orchestration only, no algorithm logic.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::amelo::{fit_joint_with, JointFitResult, JointInit, JointOptions};
use crate::arena::{ArenaConfig, ArenaState};
use crate::classic::{shuffled_mean, ClassicConfig};
use crate::core::{
    AnnotatorId, Dataset, RatingVector, ScaleConstant, DISPLAY_OFFSET, DISPLAY_SLOPE,
};
use crate::melo::{fit_gd, fit_newton};
use crate::metrics::{auc, detection_f1, mse, multi_run_consistency, ranking_consistency, Ranking};
use crate::numeric::{fisher_yates, stream_rng};
use crate::perturb::{apply, PerturbationPlan, PerturbationStrategy};
use crate::sim::{generate, spaced_ratings, Sampling, SyntheticConfig};
use crate::{amelo, win_prob};

use super::io::{parse_records, ParseReport};
use super::reports::{
    ability_rows, ensure_dir, leaderboard_rows, write_abilities, write_csv, write_leaderboard,
    write_trace, write_win_matrix, Manifest,
};
use super::{
    ArenaEvaluateArgs, ArenaIngestArgs, ArenaInitArgs, ArenaStatusArgs, ArenaUnbanArgs, CliError,
    ConsistencyArgs, DetectArgs, FitArgs, Method, PredictArgs, RunConfig, SimulateArgs, Solver,
    WinmatrixArgs,
};

pub fn fit(args: FitArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    let data = load_filtered(&args.input, args.run.delta)?;
    let mut outputs = Vec::new();

    match args.method {
        Method::Elo => {
            let summary = shuffled_mean(&data, &ClassicConfig::default(), args.run.shuffles, args.run.seed)?;
            let natural = display_to_natural(&summary.mean);
            outputs.extend(write_leaderboard(&args.out, &leaderboard_rows(&natural, &data))?);
        }
        Method::Melo => {
            let cfg = args.run.optim();
            let fit = match args.solver {
                Solver::Gd => fit_gd(&data, &cfg, ScaleConstant::NATURAL)?,
                Solver::Newton => fit_newton(&data, &cfg, ScaleConstant::NATURAL)?,
            };
            report_warnings(&fit.warnings);
            outputs.extend(write_leaderboard(&args.out, &leaderboard_rows(&fit.ratings, &data))?);
            outputs.push(write_trace(&args.out, &fit.loss_trace)?);
        }
        Method::Amelo => {
            let opts = JointOptions { normalize: !args.run.no_norm, ..JointOptions::default() };
            let (fit, _) = fit_joint_with(&data, &args.run.optim(), &opts)?;
            report_warnings(&fit.warnings);
            let natural = amelo_natural_ratings(&fit);
            outputs.extend(write_leaderboard(&args.out, &leaderboard_rows(&natural, &data))?);
            outputs.push(write_trace(&args.out, &fit.loss_trace)?);
            outputs.push(write_abilities(
                &args.out,
                &ability_rows(&fit.abilities, &data, args.run.epsilon),
            )?);
        }
    }

    let mut manifest = Manifest::new(
        "fit",
        json!({"method": args.method, "solver": args.solver, "run": args.run}),
    );
    manifest.record_input(&args.input)?;
    manifest.record_outputs(&outputs);
    manifest.write(&args.out)?;
    println!(
        "fit ({}): {} models, {} records -> {}",
        args.method,
        data.n_models(),
        data.n_records(),
        args.out.display()
    );
    Ok(())
}

/// Per-split held-out scores for one method.
#[derive(Debug, Clone, Serialize)]
pub struct PredictionRow {
    pub method: Method,
    pub split: usize,
    pub mse: f64,
    pub auc: f64,
}

/// Mean and sample standard deviation over splits.
#[derive(Debug, Clone, Serialize)]
pub struct PredictionSummary {
    pub method: Method,
    pub mse_mean: f64,
    pub mse_std: f64,
    pub auc_mean: f64,
    pub auc_std: f64,
}

/// Scores every method on seeded 80/20 record splits. Shared by the
/// `predict` subcommand and the reproduction tests.
pub fn evaluate_predictions(
    data: &Dataset,
    run: &RunConfig,
    splits: usize,
) -> Result<(Vec<PredictionRow>, Vec<PredictionSummary>), CliError> {
    let n = data.n_records();
    if n < 5 {
        return Err(CliError::Invalid(format!("need at least 5 records to split, have {n}")));
    }
    if splits == 0 {
        return Err(CliError::Invalid("need at least 1 split".to_string()));
    }
    let mut rows = Vec::new();
    for split in 0..splits {
        let mut order: Vec<usize> = (0..n).collect();
        fisher_yates(&mut order, &mut stream_rng(run.seed, split as u64));
        let train_n = n * 4 / 5;
        let pick = |indices: &[usize]| {
            Dataset::from_records(
                indices.iter().map(|&i| data.records()[i].clone()).collect(),
            )
        };
        let train = pick(&order[..train_n]);
        let test = pick(&order[train_n..]);

        for method in [Method::Elo, Method::Melo, Method::Amelo] {
            let predicted = predict_method(method, &train, &test, run)?;
            let observed: Vec<f64> = test.records().iter().map(|r| r.outcome.value()).collect();
            rows.push(PredictionRow {
                method,
                split,
                mse: mse(&predicted, &observed)?,
                auc: auc(&predicted, &observed)?,
            });
        }
    }

    let mut summaries = Vec::new();
    for method in [Method::Elo, Method::Melo, Method::Amelo] {
        let of_method: Vec<&PredictionRow> = rows.iter().filter(|r| r.method == method).collect();
        let stats = |pick: &dyn Fn(&PredictionRow) -> f64| {
            let values: Vec<f64> = of_method.iter().map(|r| pick(r)).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let std = if values.len() < 2 {
                0.0
            } else {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (values.len() - 1) as f64)
                    .sqrt()
            };
            (mean, std)
        };
        let (mse_mean, mse_std) = stats(&|r| r.mse);
        let (auc_mean, auc_std) = stats(&|r| r.auc);
        summaries.push(PredictionSummary { method, mse_mean, mse_std, auc_mean, auc_std });
    }
    Ok((rows, summaries))
}

fn predict_method(
    method: Method,
    train: &Dataset,
    test: &Dataset,
    run: &RunConfig,
) -> Result<Vec<f64>, CliError> {
    match method {
        Method::Elo => {
            let summary = shuffled_mean(train, &ClassicConfig::default(), run.shuffles, run.seed)?;
            let cfg = ClassicConfig::default();
            let ratings = &summary.mean;
            test.records()
                .iter()
                .map(|rec| {
                    let r_i = ratings.get(&rec.first).unwrap_or(cfg.r_init);
                    let r_j = ratings.get(&rec.second).unwrap_or(cfg.r_init);
                    Ok(win_prob(r_i, r_j, cfg.scale)?)
                })
                .collect()
        }
        Method::Melo => {
            let fit = fit_gd(train, &run.optim(), ScaleConstant::NATURAL)?;
            test.records()
                .iter()
                .map(|rec| {
                    let r_i = fit.ratings.get(&rec.first).unwrap_or(0.0);
                    let r_j = fit.ratings.get(&rec.second).unwrap_or(0.0);
                    Ok(win_prob(r_i, r_j, ScaleConstant::NATURAL)?)
                })
                .collect()
        }
        Method::Amelo => {
            let (fit, _) = fit_joint_with(train, &run.optim(), &JointOptions::default())?;
            let mean_theta = fit.abilities.values().iter().sum::<f64>()
                / fit.abilities.len().max(1) as f64;
            Ok(test
                .records()
                .iter()
                .map(|rec| {
                    let r_i = fit.ratings.get(&rec.first).unwrap_or(0.0);
                    let r_j = fit.ratings.get(&rec.second).unwrap_or(0.0);
                    let theta = fit.abilities.get(&rec.annotator).unwrap_or(mean_theta);
                    amelo::win_prob_annotator(r_i, r_j, theta)
                })
                .collect())
        }
    }
}

pub fn predict(args: PredictArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    let data = load_filtered(&args.input, args.run.delta)?;
    let (rows, summaries) = evaluate_predictions(&data, &args.run, args.splits)?;
    let metrics_path = args.out.join("metrics.csv");
    write_csv(&metrics_path, &rows)?;
    let summary_path = args.out.join("summary.csv");
    write_csv(&summary_path, &summaries)?;

    let mut manifest = Manifest::new("predict", json!({"splits": args.splits, "run": args.run}));
    manifest.record_input(&args.input)?;
    manifest.record_outputs(&[metrics_path, summary_path]);
    manifest.write(&args.out)?;
    for s in &summaries {
        println!(
            "predict ({}): mse {:.4} +/- {:.4}, auc {:.4} +/- {:.4}",
            s.method, s.mse_mean, s.mse_std, s.auc_mean, s.auc_std
        );
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ConsistencyCell {
    strategy: String,
    ratio: f64,
    n_targets: usize,
    elo: f64,
    melo: f64,
    amelo: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DetectionCell {
    strategy: String,
    ratio: f64,
    n_targets: usize,
    #[serde(rename = "f1_eps_0")]
    f1_eps_0: f64,
    #[serde(rename = "f1_eps_0.005")]
    f1_eps_005: f64,
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    let (data, input_digested) = match &args.input {
        Some(path) => (load_filtered(path, args.run.delta)?, Some(path.clone())),
        None => {
            let cfg = synthetic_arena(args.models, args.annotators, args.records, args.run.seed)?;
            let (data, _) = generate(&cfg)?;
            (data, None)
        }
    };
    if data.n_annotators() < 2 {
        return Err(CliError::Invalid("perturbation sweep needs at least 2 annotators".to_string()));
    }

    let strategies: Vec<PerturbationStrategy> = match args.strategy {
        Some(s) => vec![s.into()],
        None => vec![
            PerturbationStrategy::Random,
            PerturbationStrategy::Equal,
            PerturbationStrategy::Flip,
            PerturbationStrategy::Mixed,
        ],
    };
    let ratios: Vec<f64> = match args.ratio {
        Some(r) => {
            if !(0.0..=0.5).contains(&r) {
                return Err(CliError::Invalid(format!("ratio {r} outside [0, 0.5]")));
            }
            vec![r]
        }
        None => (1..=10).map(|i| i as f64 * 0.05).collect(),
    };

    // Clean baselines, one per method.
    let optim = args.run.optim();
    let elo_clean = Ranking::from_ratings(
        &shuffled_mean(&data, &ClassicConfig::default(), args.run.shuffles, args.run.seed)?.mean,
    );
    let melo_clean = Ranking::from_ratings(&fit_gd(&data, &optim, ScaleConstant::NATURAL)?.ratings);
    let (amelo_fit, _) = fit_joint_with(&data, &optim, &JointOptions::default())?;
    let amelo_clean = Ranking::from_ratings(&amelo_fit.ratings);

    let mut consistency_cells = Vec::new();
    let mut detection_cells = Vec::new();
    let m = data.n_annotators();
    for (cell, (strategy, ratio)) in strategies
        .iter()
        .flat_map(|s| ratios.iter().map(move |r| (*s, *r)))
        .enumerate()
    {
        let wanted = (ratio * m as f64).ceil() as usize;
        let n_targets = wanted.min(m / 2).max(1);
        let targets = sample_annotators(&data, n_targets, args.run.seed, cell as u64);
        let plan = PerturbationPlan::new(targets, strategy, args.run.seed);
        let (perturbed, truth) = apply(&data, &plan)?;

        let elo_c = ranking_consistency(
            &elo_clean,
            &Ranking::from_ratings(
                &shuffled_mean(&perturbed, &ClassicConfig::default(), args.run.shuffles, args.run.seed)?.mean,
            ),
        )?;
        let melo_c = ranking_consistency(
            &melo_clean,
            &Ranking::from_ratings(&fit_gd(&perturbed, &optim, ScaleConstant::NATURAL)?.ratings),
        )?;
        let (joint, _) = fit_joint_with(&perturbed, &optim, &JointOptions::default())?;
        let amelo_c = ranking_consistency(&amelo_clean, &Ranking::from_ratings(&joint.ratings))?;

        consistency_cells.push(ConsistencyCell {
            strategy: strategy.to_string(),
            ratio,
            n_targets,
            elo: elo_c,
            melo: melo_c,
            amelo: amelo_c,
        });
        detection_cells.push(DetectionCell {
            strategy: strategy.to_string(),
            ratio,
            n_targets,
            f1_eps_0: detection_f1(&joint.abilities, &truth, 0.0).f1,
            f1_eps_005: detection_f1(&joint.abilities, &truth, 0.005).f1,
        });
    }

    let consistency_path = args.out.join("consistency.csv");
    write_csv(&consistency_path, &consistency_cells)?;
    let detection_path = args.out.join("detection.csv");
    write_csv(&detection_path, &detection_cells)?;

    let mut manifest = Manifest::new(
        "simulate",
        json!({
            "strategy": args.strategy,
            "ratio": args.ratio,
            "models": args.models,
            "annotators": args.annotators,
            "records": args.records,
            "synthetic": args.input.is_none(),
            "run": args.run,
        }),
    );
    if let Some(path) = input_digested {
        manifest.record_input(&path)?;
    }
    manifest.record_outputs(&[consistency_path, detection_path]);
    manifest.write(&args.out)?;
    for cell in &consistency_cells {
        println!(
            "simulate {} ratio {:.2}: consistency elo {:.3} melo {:.3} amelo {:.3}",
            cell.strategy, cell.ratio, cell.elo, cell.melo, cell.amelo
        );
    }
    Ok(())
}

pub fn detect(args: DetectArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    let data = load_filtered(&args.input, args.run.delta)?;
    let opts = JointOptions { normalize: !args.run.no_norm, ..JointOptions::default() };
    let (fit, _) = fit_joint_with(&data, &args.run.optim(), &opts)?;
    report_warnings(&fit.warnings);

    let rows = ability_rows(&fit.abilities, &data, args.run.epsilon);
    let abilities_path = write_abilities(&args.out, &rows)?;
    let natural = amelo_natural_ratings(&fit);
    let mut outputs = write_leaderboard(&args.out, &leaderboard_rows(&natural, &data))?;
    outputs.push(abilities_path);

    let mut manifest = Manifest::new("detect", json!({"run": args.run}));
    manifest.record_input(&args.input)?;
    manifest.record_outputs(&outputs);
    manifest.write(&args.out)?;

    let flagged: Vec<&str> = rows.iter().filter(|r| r.flagged).map(|r| r.annotator.as_str()).collect();
    if flagged.is_empty() {
        println!("detect: no annotator below epsilon {}", args.run.epsilon);
    } else {
        println!("detect: {} annotator(s) below epsilon {}: {}", flagged.len(), args.run.epsilon, flagged.join(", "));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ConsistencyRow {
    epoch: usize,
    consistency: f64,
}

pub fn consistency(args: ConsistencyArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    if args.runs < 2 {
        return Err(CliError::Invalid("need at least 2 runs to compare".to_string()));
    }
    if args.snapshot_every == 0 {
        return Err(CliError::Invalid("snapshot stride must be positive".to_string()));
    }
    let data = match &args.input {
        Some(path) => load_filtered(path, args.run.delta)?,
        None => {
            let cfg = SyntheticConfig {
                true_ratings: spaced_ratings(10, 0.5),
                n_annotators: 5,
                sampling: Sampling::PerPair { games: 50 },
                seed: args.run.seed,
            };
            generate(&cfg)?.0
        }
    };

    let mut all_snapshots = Vec::new();
    let mut finals = Vec::new();
    for run_index in 0..args.runs {
        let opts = JointOptions {
            init: JointInit::Seeded(args.run.seed.wrapping_add(run_index as u64)),
            normalize: !args.run.no_norm,
            snapshot_every: args.snapshot_every,
        };
        let (fit, snapshots) = fit_joint_with(&data, &args.run.optim(), &opts)?;
        finals.push(Ranking::from_ratings(&fit.ratings));
        all_snapshots.push(snapshots);
    }

    let depth = all_snapshots.iter().map(|s| s.len()).min().unwrap_or(0);
    let mut rows = Vec::new();
    for step in 0..depth {
        let rankings: Vec<Ranking> = all_snapshots
            .iter()
            .map(|snaps| {
                let snap = &snaps[step];
                let rv = RatingVector::new(data.models().to_vec(), snap.ratings.clone())
                    .expect("snapshot aligns with registry");
                Ranking::from_ratings(&rv)
            })
            .collect();
        rows.push(ConsistencyRow {
            epoch: all_snapshots[0][step].epoch,
            consistency: multi_run_consistency(&rankings)?,
        });
    }
    let final_consistency = multi_run_consistency(&finals)?;

    let path = args.out.join("consistency.csv");
    write_csv(&path, &rows)?;
    let mut manifest = Manifest::new(
        "consistency",
        json!({
            "runs": args.runs,
            "snapshot_every": args.snapshot_every,
            "synthetic": args.input.is_none(),
            "final_consistency": final_consistency,
            "run": args.run,
        }),
    );
    if let Some(input) = &args.input {
        manifest.record_input(input)?;
    }
    manifest.record_outputs(&[path]);
    manifest.write(&args.out)?;
    println!(
        "consistency over {} runs: final {:.4} ({} epochs sampled)",
        args.runs, final_consistency, rows.len()
    );
    Ok(())
}

pub fn winmatrix(args: WinmatrixArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    let (data, report) = parse_records(&args.input)?;
    report_skipped(&report);
    let outputs = write_win_matrix(&args.out, &data)?;
    let mut manifest = Manifest::new("winmatrix", json!({}));
    manifest.record_input(&args.input)?;
    manifest.record_outputs(&outputs);
    manifest.write(&args.out)?;
    println!(
        "winmatrix: {} models, {} records -> {}",
        data.n_models(),
        data.n_records(),
        args.out.display()
    );
    Ok(())
}

pub fn arena_init(args: ArenaInitArgs) -> Result<(), CliError> {
    if args.state.exists() && !args.force {
        return Err(CliError::Invalid(format!(
            "state file `{}` already exists (use --force to overwrite)",
            args.state.display()
        )));
    }
    ArenaState::new().save(&args.state)?;
    println!("initialized arena state at {}", args.state.display());
    Ok(())
}

pub fn arena_ingest(args: ArenaIngestArgs) -> Result<(), CliError> {
    let mut state = ArenaState::load(&args.state)?;
    let (batch, parse_report) = parse_records(&args.input)?;
    report_skipped(&parse_report);
    let report = state.ingest(batch.records());
    state.save(&args.state)?;
    println!("{report}");
    Ok(())
}

pub fn arena_evaluate(args: ArenaEvaluateArgs) -> Result<(), CliError> {
    let mut state = ArenaState::load(&args.state)?;
    let cfg = ArenaConfig {
        delta: args.run.delta,
        epsilon: args.run.epsilon,
        optim: args.run.optim(),
        warn_only: args.warn_only,
    };
    let report = state.evaluate_round(&cfg)?;
    state.save(&args.state)?;

    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let eligible = state.accumulated().filter_min_records(cfg.delta);
        let natural = amelo_natural_ratings(&report.fit);
        let mut outputs = write_leaderboard(out, &leaderboard_rows(&natural, &eligible))?;
        outputs.push(write_abilities(
            out,
            &ability_rows(&report.fit.abilities, &eligible, cfg.epsilon),
        )?);
        let mut manifest = Manifest::new(
            "arena evaluate",
            json!({"warn_only": args.warn_only, "run": args.run}),
        );
        manifest.record_input(&args.state)?;
        manifest.record_outputs(&outputs);
        manifest.write(out)?;
    }

    println!(
        "round {}: {} eligible models, {} records, fit {}",
        report.round,
        report.eligible_models,
        report.eligible_records,
        if report.fit.converged { "converged" } else { "hit the epoch cap" }
    );
    for (annotator, theta) in &report.flagged {
        println!(
            "  {} annotator `{annotator}` (theta {theta:.4})",
            if report.warn_only { "warned" } else { "banned" }
        );
    }
    Ok(())
}

pub fn arena_status(args: ArenaStatusArgs) -> Result<(), CliError> {
    let state = ArenaState::load(&args.state)?;
    let data = state.accumulated();
    println!(
        "round {}: {} records, {} models, {} annotators, {} banned",
        state.round(),
        data.n_records(),
        data.n_models(),
        data.n_annotators(),
        state.banned().len()
    );
    for (annotator, reason) in state.banned() {
        println!("  banned `{annotator}`: {reason}");
    }
    if let Some(fit) = state.latest() {
        let natural = amelo_natural_ratings(fit);
        let rows = leaderboard_rows(&natural, data);
        for row in rows.iter().take(5) {
            println!("  #{} {} ({:.1})", row.rank, row.model, row.rating_display);
        }
    }
    Ok(())
}

pub fn arena_unban(args: ArenaUnbanArgs) -> Result<(), CliError> {
    let mut state = ArenaState::load(&args.state)?;
    let annotator = AnnotatorId::new(args.annotator.as_str());
    match state.unban(&annotator) {
        Some(reason) => {
            state.save(&args.state)?;
            println!("unbanned `{annotator}` (was: {reason})");
            Ok(())
        }
        None => Err(CliError::Invalid(format!("annotator `{annotator}` is not banned"))),
    }
}

/// Parses a vote log and applies the record-count gate.
fn load_filtered(path: &Path, delta: usize) -> Result<Dataset, CliError> {
    let (data, report) = parse_records(path)?;
    report_skipped(&report);
    let filtered = data.filter_min_records(delta);
    if filtered.is_empty() {
        return Err(CliError::Invalid(format!(
            "no records left after the {delta}-record annotator gate ({} parsed)",
            data.n_records()
        )));
    }
    let validation = data.validate();
    for warning in &validation.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(filtered)
}

fn report_skipped(report: &ParseReport) {
    if report.skipped.is_empty() {
        return;
    }
    eprintln!("warning: skipped {} of {} lines:", report.skipped.len(), report.lines);
    for (line, reason) in report.skipped.iter().take(5) {
        eprintln!("  line {line}: {reason}");
    }
    if report.skipped.len() > 5 {
        eprintln!("  ... and {} more", report.skipped.len() - 5);
    }
}

fn report_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

/// Classic-scale ratings mapped back to natural units so every
/// leaderboard uses the same columns.
fn display_to_natural(ratings: &RatingVector) -> RatingVector {
    RatingVector::new(
        ratings.models().to_vec(),
        ratings
            .values()
            .iter()
            .map(|v| (v - DISPLAY_OFFSET) / DISPLAY_SLOPE)
            .collect(),
    )
    .expect("display ratings are finite")
}

/// Joint-fit ratings in natural units. The reported gauge squeezes every
/// ability to roughly 1/M and inflates ratings by the same factor, so the
/// product is unit-free; multiplying by the mean ability recovers ratings
/// comparable with the shared-scale fit. Raw (unnormalized) fits pass
/// through unchanged.
fn amelo_natural_ratings(fit: &JointFitResult) -> RatingVector {
    if !fit.normalized || fit.abilities.is_empty() {
        return fit.ratings.clone();
    }
    let mean_theta = fit.abilities.sum() / fit.abilities.len() as f64;
    RatingVector::new(
        fit.ratings.models().to_vec(),
        fit.ratings.values().iter().map(|v| v * mean_theta).collect(),
    )
    .expect("fit ratings are finite")
}

/// Synthetic arena defaults: true ratings evenly spread over [-2, 2].
fn synthetic_arena(
    models: usize,
    annotators: usize,
    records: usize,
    seed: u64,
) -> Result<SyntheticConfig, CliError> {
    if models < 2 {
        return Err(CliError::Invalid("synthetic arena needs at least 2 models".to_string()));
    }
    let gap = 4.0 / (models as f64 - 1.0);
    Ok(SyntheticConfig {
        true_ratings: spaced_ratings(models, gap),
        n_annotators: annotators,
        sampling: Sampling::PerAnnotator { records },
        seed,
    })
}

/// Deterministically samples `n` annotators for one sweep cell.
fn sample_annotators(data: &Dataset, n: usize, seed: u64, cell: u64) -> BTreeSet<AnnotatorId> {
    let mut indices: Vec<usize> = (0..data.n_annotators()).collect();
    fisher_yates(&mut indices, &mut stream_rng(seed, 1_000_000 + cell));
    indices
        .into_iter()
        .take(n)
        .map(|i| data.annotators()[i].clone())
        .collect()
}
