use std::path::PathBuf;

use rayon::prelude::*;

use super::output::{ensure_dir, fmt, write_manifest, Table};
use super::{CliError, RunConfig};
use crate::data::{
    generate_synthetic, load_dataset, load_points, split, write_dataset, Dataset, Feature,
    OperatingPoint,
};
use crate::hybrid::{
    dataset_fingerprint, fit_hybrid_detailed, flux_models, load_model, save_model, FluxPredictor,
    PhysicsOnly, TrainedHybridModel,
};
use crate::metrics::{
    compute_metrics, decomposition_profile, sensitivity_profile, MetricsError, MetricsReport,
};
use crate::uq::{
    mc_validate, predict_with_uq, McRow, McValidationReport, PredictionWithUQ, StepPolicy,
};

fn load_split(cfg: &RunConfig) -> Result<(PathBuf, Dataset, Dataset), CliError> {
    let path = cfg.dataset_path();
    let data = load_dataset(&path, &cfg.dataset.schema)?;
    let (train, test) = split(&data, &cfg.split)?;
    Ok((path, train, test))
}

fn load(cfg: &RunConfig) -> Result<(PathBuf, TrainedHybridModel), CliError> {
    let path = cfg.model_path();
    Ok((path.clone(), load_model(&path)?))
}

/// Points from the configured file, else the first `limit` test rows.
fn query_points(
    cfg: &RunConfig,
    limit: Option<usize>,
) -> Result<(Vec<PathBuf>, Vec<OperatingPoint>), CliError> {
    match &cfg.predict.points {
        Some(p) => Ok((vec![p.clone()], load_points(p, &cfg.dataset.schema)?)),
        None => {
            let (path, _, test) = load_split(cfg)?;
            let n = limit.unwrap_or(test.len()).min(test.len());
            Ok((vec![path], test.points()[..n].to_vec()))
        }
    }
}

fn finish(
    cfg: &RunConfig,
    command: &str,
    inputs: &[PathBuf],
    mut outputs: Vec<PathBuf>,
) -> Result<Vec<PathBuf>, CliError> {
    let manifest = write_manifest(cfg, command, inputs, &outputs)?;
    outputs.push(manifest);
    Ok(outputs)
}

fn kv_table(rows: Vec<(String, String)>) -> Table {
    let mut t = Table::new(["key", "value"]);
    for (k, v) in rows {
        t.push(vec![k, v]);
    }
    t
}

pub fn generate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.generate.validate()?;
    cfg.physics.validate()?;
    cfg.dataset.schema.validate(true)?;
    let data = generate_synthetic(&cfg.generate, &cfg.physics)?;
    ensure_dir(&cfg.output_dir)?;
    let path = cfg.dataset_path();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_dataset(&path, &data, &cfg.dataset.schema)?;
    finish(cfg, "generate", &[], vec![path])
}

pub fn fit(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.physics.validate()?;
    let (data_path, train, test) = load_split(cfg)?;
    let (model, restarts) = fit_hybrid_detailed(&train, &cfg.physics, &cfg.gp)?;
    ensure_dir(&cfg.output_dir)?;
    let model_path = cfg.model_path();
    if let Some(parent) = model_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    save_model(&model, &model_path)?;

    let e = &model.gp.targets;
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let std = (e.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let max_abs = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = &model.gp.params;
    let mut rows = vec![
        ("n_train".to_string(), train.len().to_string()),
        ("n_test".to_string(), test.len().to_string()),
        ("residual_mean".to_string(), fmt(mean)),
        ("residual_std".to_string(), fmt(std)),
        ("residual_max_abs".to_string(), fmt(max_abs)),
        (
            "log_marginal_likelihood".to_string(),
            fmt(model.gp.log_marginal_likelihood),
        ),
        ("signal_variance".to_string(), fmt(p.signal_variance)),
        ("noise_variance".to_string(), fmt(p.noise_variance)),
        ("jitter_used".to_string(), fmt(model.gp.jitter_used)),
        (
            "train_fingerprint".to_string(),
            model.train_fingerprint.clone(),
        ),
    ];
    for f in Feature::ALL {
        rows.push((
            format!("length_scale_{}", f.name()),
            fmt(p.length_scales[f.index()]),
        ));
    }
    let report = cfg.output_dir.join("fit_report.csv");
    kv_table(rows).write(&report)?;

    let mut t = Table::new(["start", "start_mll", "final_mll", "evals"]);
    for (i, r) in restarts.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            fmt(r.start_mll),
            fmt(r.final_mll),
            r.evals.to_string(),
        ]);
    }
    let restarts_path = cfg.output_dir.join("fit_restarts.csv");
    t.write(&restarts_path)?;
    finish(
        cfg,
        "fit",
        &[data_path],
        vec![model_path, report, restarts_path],
    )
}

fn uq_rows(
    cfg: &RunConfig,
    model: &TrainedHybridModel,
    points: &[OperatingPoint],
) -> Result<Vec<PredictionWithUQ>, CliError> {
    let policy = StepPolicy::from_stats(&model.stats);
    let results: Vec<_> = points
        .par_iter()
        .map(|p| predict_with_uq(model, p, &cfg.uq.cv, &cfg.uq.correlation, &policy))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| CliError::from(e).with_context(&format!("point {i}"))))
        .collect()
}

pub fn predict(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (model_path, model) = load(cfg)?;
    let (inputs, points) = query_points(cfg, None)?;
    let preds = uq_rows(cfg, &model, &points)?;
    let mut header: Vec<String> = vec!["point_id".into()];
    header.extend(Feature::ALL.iter().map(|f| f.name().to_string()));
    header.extend(
        [
            "jw_physics",
            "jw_hybrid",
            "sigma2_model",
            "sigma2_input",
            "sigma2_total",
            "ci95_lo",
            "ci95_hi",
            "epistemic_share",
            "aleatoric_share",
        ]
        .map(String::from),
    );
    header.extend(Feature::ALL.iter().map(|f| format!("dJ_d{}", f.name())));
    let mut t = Table::new(header);
    for (i, (p, u)) in points.iter().zip(&preds).enumerate() {
        let (es, al) = u.shares().unwrap_or((f64::NAN, f64::NAN));
        let mut row = vec![i.to_string()];
        row.extend(p.to_array().iter().map(|&v| fmt(v)));
        row.extend(
            [
                u.jw_physics,
                u.jw_hybrid,
                u.sigma2_model,
                u.sigma2_input,
                u.sigma2_total,
                u.interval95.0,
                u.interval95.1,
                es,
                al,
            ]
            .map(fmt),
        );
        row.extend(u.jacobian.iter().map(|&v| fmt(v)));
        t.push(row);
    }
    ensure_dir(&cfg.output_dir)?;
    let out = cfg.output_dir.join("predictions.csv");
    t.write(&out)?;
    let mut all_inputs = inputs;
    all_inputs.push(model_path);
    finish(cfg, "predict", &all_inputs, vec![out])
}

fn metrics_or_partial(y: &[f64], p: &[f64]) -> Result<MetricsReport, CliError> {
    match compute_metrics(y, p) {
        Ok(m) => Ok(m),
        Err(MetricsError::Undefined { partial, .. }) => Ok(partial),
        Err(e) => Err(CliError::Data(e.to_string())),
    }
}

pub fn evaluate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (model_path, model) = load(cfg)?;
    let (data_path, train, test) = load_split(cfg)?;
    if dataset_fingerprint(&train) != model.train_fingerprint {
        return Err(CliError::Data(
            "training split does not match the data the model was fitted on (fingerprint mismatch)"
                .into(),
        ));
    }
    let physics = PhysicsOnly {
        cfg: model.physics_cfg.clone(),
    };
    let pure = flux_models()
        .get("pure-gp")
        .map_err(|e| CliError::Config(e.to_string()))?
        .fit(&train, &model.physics_cfg, &cfg.gp)?;
    let models: [(&str, &dyn FluxPredictor); 3] = [
        ("physics", &physics),
        ("pure-gp", &*pure),
        ("hybrid", &model),
    ];

    let mut metrics = Table::new(["model", "set", "n", "r2", "rmse", "mae", "mape"]);
    let mut parity = Table::new([
        "set",
        "row",
        "jw_measured",
        "jw_physics",
        "jw_pure_gp",
        "jw_hybrid",
    ]);
    for (set, data) in [("train", &train), ("test", &test)] {
        let mut cols = Vec::new();
        for (name, m) in models {
            let preds = m
                .predict_batch(data.points())
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    r.map(|p| p.jw).map_err(|e| {
                        CliError::from(e).with_context(&format!("{name}, {set} row {i}"))
                    })
                })
                .collect::<Result<Vec<f64>, CliError>>()?;
            let r = metrics_or_partial(data.jw_measured(), &preds)?;
            metrics.push(vec![
                name.to_string(),
                set.to_string(),
                r.n.to_string(),
                fmt(r.r2),
                fmt(r.rmse),
                fmt(r.mae),
                fmt(r.mape),
            ]);
            cols.push(preds);
        }
        for (i, y) in data.jw_measured().iter().enumerate() {
            parity.push(vec![
                set.to_string(),
                i.to_string(),
                fmt(*y),
                fmt(cols[0][i]),
                fmt(cols[1][i]),
                fmt(cols[2][i]),
            ]);
        }
    }
    ensure_dir(&cfg.output_dir)?;
    let m_path = cfg.output_dir.join("metrics.csv");
    let p_path = cfg.output_dir.join("parity.csv");
    metrics.write(&m_path)?;
    parity.write(&p_path)?;
    finish(
        cfg,
        "evaluate",
        &[data_path, model_path],
        vec![m_path, p_path],
    )
}

pub fn validate_uq(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (inputs, report) = if cfg.uq.reference_pairs.is_empty() {
        let (model_path, model) = load(cfg)?;
        let (mut inputs, points) = query_points(cfg, Some(cfg.uq.n_points))?;
        inputs.push(model_path);
        let report = mc_validate(
            &model,
            &points,
            &cfg.uq.cv,
            &cfg.uq.correlation,
            cfg.uq.n_samples,
            cfg.uq.seed,
        )?;
        (inputs, report)
    } else {
        let rows = cfg
            .uq
            .reference_pairs
            .iter()
            .enumerate()
            .map(|(i, [d, m])| McRow::from_pairs(i, *d, *m))
            .collect();
        (
            Vec::new(),
            McValidationReport {
                rows,
                n_samples: 0,
                seed: cfg.uq.seed,
            },
        )
    };
    ensure_dir(&cfg.output_dir)?;

    let mut t = Table::new([
        "point_id",
        "sigma_delta",
        "sigma_mc",
        "relative_error_pct",
        "relative_error_pct_1dp",
        "rejected_draws",
    ]);
    let mut parity = Table::new(["sigma2_delta", "sigma2_mc"]);
    for r in &report.rows {
        t.push(vec![
            r.point_id.to_string(),
            fmt(r.sigma_delta),
            fmt(r.sigma_mc),
            fmt(r.relative_error_pct),
            format!("{:.1}", r.relative_error_pct),
            r.rejected.to_string(),
        ]);
        parity.push(vec![
            fmt(r.sigma_delta * r.sigma_delta),
            fmt(r.sigma_mc * r.sigma_mc),
        ]);
    }
    let summary = kv_table(vec![
        ("n_points".into(), report.rows.len().to_string()),
        ("n_samples".into(), report.n_samples.to_string()),
        ("seed".into(), report.seed.to_string()),
        (
            "median_relative_error_pct".into(),
            fmt(report.median_relative_error_pct()),
        ),
        (
            "variance_pearson".into(),
            fmt(report.variance_correlation()),
        ),
        ("rejected_draws".into(), report.total_rejected().to_string()),
    ]);
    let paths = [
        cfg.output_dir.join("mc_validation.csv"),
        cfg.output_dir.join("mc_parity.csv"),
        cfg.output_dir.join("mc_summary.csv"),
    ];
    t.write(&paths[0])?;
    parity.write(&paths[1])?;
    summary.write(&paths[2])?;
    finish(cfg, "validate-uq", &inputs, paths.to_vec())
}

pub fn sensitivity(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (model_path, model) = load(cfg)?;
    let (mut inputs, points) = query_points(cfg, None)?;
    inputs.push(model_path);
    let profile = sensitivity_profile(&model, &points);
    if profile.n_used == 0 {
        return Err(CliError::Solver("Jacobian failed at every point".into()));
    }
    let mut t = Table::new([
        "feature",
        "unit",
        "mean_abs_jacobian",
        "mean_abs_jacobian_scaled",
        "rank",
    ]);
    for f in Feature::ALL {
        t.push(vec![
            f.name().to_string(),
            format!("m/s per {}", f.si_unit()),
            fmt(profile.raw[f.index()]),
            fmt(profile.scaled[f.index()]),
            profile.rank_of(f).to_string(),
        ]);
    }
    let summary = kv_table(vec![
        ("n_points".into(), points.len().to_string()),
        ("n_used".into(), profile.n_used.to_string()),
        ("skipped".into(), profile.skipped.to_string()),
        (
            "ranking".into(),
            profile
                .ranking
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(" "),
        ),
    ]);

    let n_dec = cfg.uq.n_points.min(points.len());
    let preds = uq_rows(cfg, &model, &points[..n_dec])?;
    let shares = decomposition_profile(&preds).map_err(|e| CliError::Data(e.to_string()))?;
    let mut d = Table::new([
        "point_id",
        "sigma2_model",
        "sigma2_input",
        "epistemic_share",
        "aleatoric_share",
    ]);
    for (i, (u, s)) in preds.iter().zip(&shares).enumerate() {
        d.push(vec![
            i.to_string(),
            fmt(u.sigma2_model),
            fmt(u.sigma2_input),
            fmt(s.epistemic_share),
            fmt(s.aleatoric_share),
        ]);
    }
    ensure_dir(&cfg.output_dir)?;
    let paths = [
        cfg.output_dir.join("sensitivity.csv"),
        cfg.output_dir.join("sensitivity_summary.csv"),
        cfg.output_dir.join("decomposition.csv"),
    ];
    t.write(&paths[0])?;
    summary.write(&paths[1])?;
    d.write(&paths[2])?;
    finish(cfg, "sensitivity", &inputs, paths.to_vec())
}
