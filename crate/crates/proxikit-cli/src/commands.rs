//! One function per subcommand. Each resolves its settings, probes the
//! output directory before any real work, computes, writes artifacts
//! plus the resolved config, and finishes the manifest. The returned
//! exit code is 0 for a clean run and 2 when rows were rejected and the
//! run is not permissive.

use anyhow::{anyhow, Result};
use proxikit::aggregate::{
    aggregate_minutes, descriptives, nomination_design, rank_hit_rate, symmetrize,
};
use proxikit::io::edgelist::edgelist_to_string;
use proxikit::io::nominations::NominationReport;
use proxikit::io::outputs::fmt_opt;
use proxikit::io::scenario::scenario_to_string;
use proxikit::io::{
    parse_edgelist, parse_nominations, parse_scenario, OutputWriter, ParseReport, ParsedEdgelist,
};
use proxikit::model::{rasterize, DyadRaster, EventLog, ObservationWindow, Roster};
use proxikit::preprocess::apply_pipeline;
use proxikit::simgen::{degrade, generate_truth, random_scenario, DegradationParams, Scenario};
use proxikit::stats::{cohens_kappa, fit_logistic, likelihood_ratio_test};
use proxikit::validity::{classify_logs, sweep_combined};

use crate::config::Config;

const EXIT_OK: i32 = 0;
const EXIT_REJECTED: i32 = 2;

pub fn preprocess(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let pipeline = cfg.pipeline()?;
    let parsed = parse_edgelist(cfg.path("input")?, window, None)?;
    warn_issues("input", &parsed.report);

    let processed = apply_pipeline(&parsed.log, &pipeline);
    out.write_text("processed.csv", &edgelist_to_string(&processed))?;
    out.write_text("report.csv", &report_to_csv(&parsed.report))?;
    out.write_config(&cfg.resolved("preprocess", &[]))?;
    out.finish()?;

    println!(
        "preprocess: {} rows in, {} events out, {} contact seconds",
        parsed.report.rows,
        processed.event_count(),
        processed.covered_seconds()
    );
    exit_code(cfg, &[&parsed.report])
}

pub fn validate(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let pipeline = cfg.pipeline()?;
    let (measured, truth, reports) = load_stream_pair(cfg, window)?;

    let processed = apply_pipeline(&measured, &pipeline);
    let table = classify_logs(&processed, &truth)?;
    out.write_classification("metrics.csv", &table)?;
    out.write_config(&cfg.resolved("validate", &[]))?;
    out.finish()?;

    let m = table.metrics();
    println!(
        "validate: accuracy {} sensitivity {} specificity {}",
        fmt_opt(m.accuracy),
        fmt_opt(m.sensitivity),
        fmt_opt(m.specificity)
    );
    exit_code(cfg, &[&reports.0, &reports.1])
}

pub fn sweep(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let base = cfg.pipeline()?;
    let kind = cfg.sweep_kind()?;
    let values = cfg.sweep_values(kind)?;
    let (measured, truth, reports) = load_stream_pair(cfg, window)?;

    let result = sweep_combined(&measured, &truth, &base, kind, &values)?;
    out.write_sweep("sweep.csv", &result)?;
    let grid = values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    out.write_config(&cfg.resolved("sweep", &[("sweep_values", grid)]))?;
    out.finish()?;

    if let Some(best) = result.best_by_accuracy() {
        println!(
            "sweep: {} over {} values, best accuracy {} at {}",
            kind.name(),
            values.len(),
            fmt_opt(best.metrics.accuracy),
            best.label()
        );
    }
    exit_code(cfg, &[&reports.0, &reports.1])
}

pub fn aggregate(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let pipeline = cfg.pipeline()?;
    let parsed = parse_edgelist(cfg.path("input")?, window, None)?;
    warn_issues("input", &parsed.report);

    let processed = apply_pipeline(&parsed.log, &pipeline);
    let network = aggregate_minutes(&processed);
    out.write_network("minutes.csv", &network)?;
    out.write_text(
        "descriptives.csv",
        &descriptives_to_csv(&descriptives(&processed)),
    )?;

    let mut nomination_clean = true;
    if cfg.get("nominations").is_some() {
        let parsed_nom = parse_nominations(cfg.path("nominations")?, processed.roster())?;
        warn_nomination_issues(&parsed_nom.report);
        nomination_clean = parsed_nom.report.is_clean();
        let net = symmetrize(&parsed_nom.network, cfg.symmetrize()?);
        let hits = rank_hit_rate(&network, &net)?;
        let mut text = String::from("rank,egos,percent\n");
        for h in &hits {
            text.push_str(&format!("{},{},{:.6}\n", h.rank, h.egos, h.percent));
        }
        out.write_text("rank_hits.csv", &text)?;
    }

    out.write_config(&cfg.resolved("aggregate", &[]))?;
    out.finish()?;

    println!(
        "aggregate: {} badges, {:.6} total dyadic minutes",
        processed.roster().len(),
        network.total_minutes()
    );
    if parsed.report.is_clean() && nomination_clean || cfg.permissive()? {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_REJECTED)
    }
}

pub fn regress(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let pipeline = cfg.pipeline()?;
    let parsed = parse_edgelist(cfg.path("input")?, window, None)?;
    warn_issues("input", &parsed.report);

    let processed = apply_pipeline(&parsed.log, &pipeline);
    let network = aggregate_minutes(&processed);
    let parsed_nom = parse_nominations(cfg.path("nominations")?, processed.roster())?;
    warn_nomination_issues(&parsed_nom.report);
    let nominations = symmetrize(&parsed_nom.network, cfg.symmetrize()?);

    let design = nomination_design(&network, &nominations)?;
    let mut text = String::from("minutes,nominated\n");
    for (minutes, nominated) in &design {
        text.push_str(&format!("{minutes:.6},{nominated}\n"));
    }
    out.write_text("design.csv", &text)?;

    let outcome: Vec<bool> = design.iter().map(|r| r.1).collect();
    let minutes: Vec<f64> = design.iter().map(|r| r.0).collect();
    let fit = fit_logistic(&outcome, &minutes)?;
    let null = fit_logistic(&outcome, &vec![0.0; outcome.len()])?;
    let lrt = likelihood_ratio_test(&null, &fit, 1)?;

    out.write_logit("logit.csv", &fit)?;
    out.write_pairs(
        "lrt.csv",
        &[
            ("chi2", format!("{:.6}", lrt.chi2)),
            ("df", lrt.df.to_string()),
            ("p", format!("{:.6}", lrt.p)),
        ],
    )?;
    out.write_config(&cfg.resolved("regress", &[]))?;
    out.finish()?;

    println!(
        "regress: n {} slope {:.6} mcfadden_r2 {:.6} lrt_p {:.6}",
        fit.n, fit.slope, fit.mcfadden_r2, lrt.p
    );
    if parsed.report.is_clean() && parsed_nom.report.is_clean() || cfg.permissive()? {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_REJECTED)
    }
}

pub fn kappa(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let pipeline = cfg.pipeline()?;
    let (measured, truth, reports) = load_stream_pair(cfg, window)?;

    let processed = apply_pipeline(&measured, &pipeline);
    let a = raster_cells(&rasterize(&processed));
    let b = raster_cells(&rasterize(&truth));
    let result = cohens_kappa(&a, &b)?;

    out.write_pairs(
        "kappa.csv",
        &[
            ("kappa", format!("{:.6}", result.kappa)),
            (
                "observed_agreement",
                format!("{:.6}", result.observed_agreement),
            ),
            (
                "chance_agreement",
                format!("{:.6}", result.chance_agreement),
            ),
            ("cells", a.len().to_string()),
        ],
    )?;
    out.write_config(&cfg.resolved("kappa", &[]))?;
    out.finish()?;

    println!("kappa: {:.6} over {} dyad-seconds", result.kappa, a.len());
    exit_code(cfg, &[&reports.0, &reports.1])
}

pub fn simulate(cfg: &Config) -> Result<i32> {
    let mut out = OutputWriter::create(cfg.out_dir())?;
    let window = cfg.window()?;
    let seed = cfg.seed()?;

    let scenario: Scenario = match cfg.opt_path("scenario") {
        Some(path) => parse_scenario(path, window)?,
        None => random_scenario(
            Roster::from_ids(1..=cfg.parse_or("sim_badges", 11u32)?),
            window,
            cfg.parse_or("sim_slot_s", 420u64)?,
            cfg.parse_or("sim_max_group", 4usize)?,
            seed,
        ),
    };
    let truth = generate_truth(&scenario)?;
    let params = DegradationParams {
        dropout_rate_per_min: cfg.parse_or("sim_rate_per_min", 1.0)?,
        dropout_gap_mean_s: cfg.parse_or("sim_gap_mean_s", 20.0)?,
        dropout_gap_max_s: cfg.parse_or("sim_gap_max_s", 75.0)?,
        min_quantum_s: cfg.parse_or("sim_quantum_s", 10u64)?,
        seed,
    };
    let degraded = degrade(&truth, &params);

    out.write_text("scenario.csv", &scenario_to_string(&scenario))?;
    out.write_text("truth.csv", &edgelist_to_string(&truth))?;
    out.write_text("degraded.csv", &edgelist_to_string(&degraded))?;
    out.write_config(&cfg.resolved("simulate", &[("seed", seed.to_string())]))?;
    out.finish()?;

    println!(
        "simulate: {} truth events over {} badges, {} after degradation",
        truth.event_count(),
        scenario.roster.len(),
        degraded.event_count()
    );
    Ok(EXIT_OK)
}

/// Loads the measured and truth edgelists on a shared roster (the union
/// of both files' badges) so they are comparable.
fn load_stream_pair(
    cfg: &Config,
    window: ObservationWindow,
) -> Result<(EventLog, EventLog, (ParseReport, ParseReport))> {
    let measured: ParsedEdgelist = parse_edgelist(cfg.path("input")?, window, None)?;
    let truth: ParsedEdgelist = parse_edgelist(cfg.path("truth")?, window, None)?;
    warn_issues("input", &measured.report);
    warn_issues("truth", &truth.report);
    let roster = measured.log.roster().union(truth.log.roster());
    Ok((
        measured.log.expand_roster(roster.clone())?,
        truth.log.expand_roster(roster)?,
        (measured.report, truth.report),
    ))
}

fn raster_cells(raster: &DyadRaster) -> Vec<bool> {
    raster
        .iter_rows()
        .flat_map(|(_, row)| row.iter().by_vals())
        .collect()
}

fn report_to_csv(report: &ParseReport) -> String {
    let mut out = String::from("line,issue\n");
    for issue in &report.issues {
        out.push_str(&format!("{},{}\n", issue.line, issue.kind.describe()));
    }
    out
}

fn descriptives_to_csv(d: &proxikit::aggregate::Descriptives) -> String {
    let mut out = String::from("measure,n,mean,sd\n");
    for (name, s) in [
        ("interaction_duration_s", &d.interaction_duration),
        (
            "aggregated_dyadic_duration_min",
            &d.aggregated_dyadic_duration,
        ),
        (
            "individual_total_duration_min",
            &d.individual_total_duration,
        ),
    ] {
        out.push_str(&format!(
            "{name},{},{},{}\n",
            s.n,
            fmt_opt(s.mean),
            fmt_opt(s.sd)
        ));
    }
    out
}

fn warn_issues(label: &str, report: &ParseReport) {
    for issue in &report.issues {
        eprintln!(
            "{label}: line {}: {}{}",
            issue.line,
            issue.kind.describe(),
            if issue.kind.rejects() {
                " (row rejected)"
            } else {
                ""
            }
        );
    }
}

fn warn_nomination_issues(report: &NominationReport) {
    for issue in &report.issues {
        eprintln!(
            "nominations: line {}: {} (row rejected)",
            issue.line,
            issue.kind.describe()
        );
    }
    for w in &report.warnings {
        eprintln!(
            "nominations: badge {} nominated {} alters, questionnaire offers {}",
            w.ego,
            w.count,
            proxikit::io::NOMINATION_LIMIT
        );
    }
}

/// 0 when every report is clean or the run is permissive, 2 otherwise.
fn exit_code(cfg: &Config, reports: &[&ParseReport]) -> Result<i32> {
    if reports.iter().all(|r| r.is_clean()) || cfg.permissive()? {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_REJECTED)
    }
}

/// Maps a subcommand name to its implementation; the single dispatch
/// point shared by main and the tests.
pub fn run(command: &str, cfg: &Config) -> Result<i32> {
    match command {
        "preprocess" => preprocess(cfg),
        "validate" => validate(cfg),
        "sweep" => sweep(cfg),
        "aggregate" => aggregate(cfg),
        "regress" => regress(cfg),
        "kappa" => kappa(cfg),
        "simulate" => simulate(cfg),
        other => Err(anyhow!("unknown command {other:?}")),
    }
}
