use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbr_core::baselines::{
    kmeans_targets, per_target_generations, per_target_repertoire, run_per_target_set, run_reference_transfer,
    BaselineKind,
};
use tbr_core::config::RunConfig;
use tbr_core::evolution::{AlgoParams, Evolution, Reality, RunOutput, Variant};
use tbr_core::gait::Genotype;
use tbr_core::io::{self, ArchiveRow, SelectionRow};
use tbr_core::metrics::{run_with_metrics, select_30, transfer_eval, CellPartition, MetricGrid, MetricsRow};
use tbr_core::repertoire::ControllerRecord;
use tbr_core::sim::{simulate, WorldParams};
use tbr_core::Error;

use crate::{Cli, Command};

pub fn run(cli: Cli) -> Result<(), Error> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed;
    match cli.command {
        Command::Evolve { out, no_transfers } => evolve(&cfg, cfg.seed(seed)?, out, !no_transfers && cfg.transfers),
        Command::Baseline { kind, out } => baseline(&cfg, cfg.seed(seed)?, kind.parse()?, out),
        Command::Metrics { archive, output } => metrics(&cfg, &archive, output.as_deref()),
        Command::Select30 { archive, output } => select30(&archive, output.as_deref()),
        Command::TransferEval { selection, output } => transfer_evaluation(&cfg, &selection, output.as_deref()),
        Command::Replay { genotype, real, output } => replay(&cfg, &genotype, real, output.as_deref()),
        Command::Targets { output } => targets(&cfg, cfg.seed(seed)?, output.as_deref()),
    }
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match output {
        Some(path) => io::write_atomic(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn pseudo_reality(cfg: &RunConfig) -> Result<WorldParams, Error> {
    WorldParams::pseudo_reality(cfg.pseudo_reality())
}

fn write_run(dir: &Path, source: &str, out: &RunOutput, rows: &[MetricsRow]) -> Result<(), Error> {
    io::write_archive(&dir.join("archive.csv"), source, out.archive.members())?;
    io::write_atomic(&dir.join("metrics.csv"), &io::metrics_csv(rows)?)?;
    io::write_atomic(&dir.join("stats.csv"), &io::stats_csv(&out.stats)?)?;
    io::write_atomic(&dir.join("transfers.csv"), &io::transfers_csv(&out.transfers)?)?;
    println!(
        "{source}: {} evaluations, {} archive members, {} transfers -> {}",
        out.evaluations,
        out.archive.len(),
        out.transfers.len(),
        dir.display()
    );
    Ok(())
}

fn evolve_variant(cfg: &RunConfig, seed: u64, variant: Variant, reality: Option<Arc<dyn Reality>>) -> Result<(RunOutput, Vec<MetricsRow>), Error> {
    let mut engine = Evolution::new(cfg.params.clone(), variant, WorldParams::simulation(), reality, seed)?;
    let rows = run_with_metrics(&mut engine, &MetricGrid::new(cfg.roi), cfg.metric_cadence);
    Ok((engine.into_output(), rows))
}

fn evolve(cfg: &RunConfig, seed: u64, out: Option<PathBuf>, transfers: bool) -> Result<(), Error> {
    let reality: Option<Arc<dyn Reality>> = if transfers { Some(Arc::new(pseudo_reality(cfg)?)) } else { None };
    let (output, rows) = evolve_variant(cfg, seed, Variant::Tbr { transfers }, reality)?;
    write_run(&out.unwrap_or_else(|| cfg.output_dir.clone()), "tbr", &output, &rows)
}

fn baseline(cfg: &RunConfig, seed: u64, kind: BaselineKind, out: Option<PathBuf>) -> Result<(), Error> {
    let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
    let sim = WorldParams::simulation();
    match kind {
        BaselineKind::Ns | BaselineKind::Nslc => {
            let variant = if kind == BaselineKind::Ns { Variant::NoveltySearch } else { Variant::LocalCompetition };
            let (output, rows) = evolve_variant(cfg, seed, variant, None)?;
            write_run(&dir, kind.name(), &output, &rows)
        }
        BaselineKind::PerTargetNearest | BaselineKind::PerTargetOrientation => {
            let targets = kmeans_targets(&cfg.roi, cfg.target_count, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let generations = cfg
                .generations_per_target
                .unwrap_or_else(|| per_target_generations(cfg.params.generations, targets.len()));
            let params = AlgoParams { generations, ..cfg.params.clone() };
            let results = run_per_target_set(&targets, &params, &sim, seed)?;
            let picks = per_target_repertoire(&results, kind);
            let evaluations: u64 = results.iter().map(|r| r.evaluations).sum();
            let row = MetricGrid::new(cfg.roi).row(evaluations, &picks);
            io::write_atomic(&dir.join("targets.csv"), &io::targets_csv(&targets.targets)?)?;
            io::write_archive(&dir.join("archive.csv"), kind.name(), &picks)?;
            io::write_atomic(&dir.join("metrics.csv"), &io::metrics_csv(&[row])?)?;
            let fallbacks = results.iter().filter(|r| r.orientation_fallback).count();
            println!(
                "{kind}: {} targets x {generations} generations, {evaluations} evaluations, {fallbacks} orientation fallbacks -> {}",
                targets.len(),
                dir.display()
            );
            Ok(())
        }
        BaselineKind::ReferenceTransfer => {
            let real = pseudo_reality(cfg)?;
            let res = run_reference_transfer(cfg.reference_target, &cfg.params, &sim, Arc::new(real.clone()), seed)?;
            io::write_archive(&dir.join("archive.csv"), kind.name(), std::slice::from_ref(&res.pick))?;
            io::write_atomic(&dir.join("transfers.csv"), &io::transfers_csv(&res.transfers)?)?;
            let accuracy = res.pick.endpoint().distance(&simulate(&res.pick.genotype, &real).endpoint);
            println!(
                "{kind}: target ({}, {}), pick ({}, {}), t_hat {}, accuracy {accuracy}{} -> {}",
                res.target.x,
                res.target.y,
                res.pick.endpoint().x,
                res.pick.endpoint().y,
                res.pick.t_hat,
                if res.infeasible { ", no member met the transferability bound" } else { "" },
                dir.display()
            );
            Ok(())
        }
    }
}

fn load_records(path: &Path) -> Result<(Vec<ArchiveRow>, Vec<ControllerRecord>), Error> {
    let rows = io::read_archive(path)?;
    let sim = WorldParams::simulation();
    let records = rows.iter().map(|r| r.to_record(&sim)).collect::<Result<Vec<_>, _>>()?;
    Ok((rows, records))
}

fn metrics(cfg: &RunConfig, archive: &Path, output: Option<&Path>) -> Result<(), Error> {
    let (_, records) = load_records(archive)?;
    let last = records.iter().map(|r| r.id).max().ok_or(Error::EmptyArchive)?;
    let step = (cfg.params.population_size * cfg.metric_cadence) as u64;
    let grid = MetricGrid::new(cfg.roi);
    let mut rows = Vec::new();
    let mut evaluations = step;
    loop {
        let snapshot: Vec<ControllerRecord> = records.iter().filter(|r| r.id < evaluations).cloned().collect();
        rows.push(grid.row(evaluations, &snapshot));
        if evaluations > last {
            break;
        }
        evaluations += step;
    }
    emit(output, &io::metrics_csv(&rows)?)
}

fn select30(archive: &Path, output: Option<&Path>) -> Result<(), Error> {
    let (rows, records) = load_records(archive)?;
    if records.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let by_id: HashMap<u64, &ArchiveRow> = rows.iter().map(|r| (r.id, r)).collect();
    let selection: Vec<SelectionRow> = select_30(&records, &CellPartition::default())
        .into_iter()
        .map(|(cell, rec)| SelectionRow { cell, row: by_id[&rec.id].clone() })
        .collect();
    emit(output, &io::selection_csv(&selection)?)
}

fn transfer_evaluation(cfg: &RunConfig, selection: &Path, output: Option<&Path>) -> Result<(), Error> {
    let sim = WorldParams::simulation();
    let records = io::read_selection(selection)?
        .iter()
        .map(|s| s.row.to_record(&sim))
        .collect::<Result<Vec<_>, _>>()?;
    let ev = transfer_eval(&records, &pseudo_reality(cfg)?);
    if let Some(q) = ev.summary {
        eprintln!("{} controllers: median {} m, quartiles [{}, {}] m", ev.accuracies.len(), q.median, q.q1, q.q3);
    }
    emit(output, &io::accuracy_csv(&ev.accuracies)?)
}

fn replay(cfg: &RunConfig, genotype: &str, real: bool, output: Option<&Path>) -> Result<(), Error> {
    let g: Genotype = genotype.parse()?;
    let world = if real { pseudo_reality(cfg)? } else { WorldParams::simulation() };
    let outcome = simulate(&g, &world);
    let mut text = String::from("tick,x,y,yaw\n");
    for (t, p) in outcome.trajectory.iter().enumerate() {
        text.push_str(&format!("{t},{},{},{}\n", p.x, p.y, p.yaw));
    }
    emit(output, text.as_bytes())
}

fn targets(cfg: &RunConfig, seed: u64, output: Option<&Path>) -> Result<(), Error> {
    let set = kmeans_targets(&cfg.roi, cfg.target_count, &mut ChaCha8Rng::seed_from_u64(seed))?;
    emit(output, &io::targets_csv(&set.targets)?)
}
