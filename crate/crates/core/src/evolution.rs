//! The repertoire evolution loop and its novelty-search relatives.
//!
//! One generation: breed and simulate offspring, optionally transfer one
//! controller to the real robot and refit the surrogate, recompute the
//! local objectives of parents and offspring against population and
//! archive, offer each new controller to the archive, then run one NSGA-II
//! truncation. The first generation simulates the random initial population
//! instead of offspring, so `G` generations cost exactly `S * G` rollouts.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gait::{mutate, Genotype};
use crate::nsga2::{nondominated_sort, select_survivors, tournament, Ranking};
use crate::repertoire::{
    neighborhood, novelty, qrank, trank, Archive, ArchiveEvent, ArchivePolicy, ControllerRecord,
};
use crate::sim::{simulate, SimOutcome, WorldParams};
use crate::surrogate::{SurrogateModel, TransferRecord};

/// Estimated-transferability level counted as "transferable" in run stats (m).
pub const TRANSFERABLE_LEVEL: f64 = -0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgoParams {
    pub population_size: usize,
    pub generations: usize,
    pub k: usize,
    /// Novelty threshold for archive addition (m).
    pub rho: f64,
    /// Transferability threshold that switches replacement to quality (m).
    pub tau: f64,
    /// Generations between transfers.
    pub transfer_period: usize,
    pub mutation_rate: f64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 10_000,
            k: 15,
            rho: 0.10,
            tau: -0.05,
            transfer_period: 50,
            mutation_rate: 0.1,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.population_size == 0 {
            return Err(Error::Config("population_size must be positive".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if self.transfer_period == 0 {
            return Err(Error::Config("transfer_period must be positive".into()));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Config("rho must be positive".into()));
        }
        if !self.tau.is_finite() {
            return Err(Error::Config("tau must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config("mutation_rate must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Something that executes a controller "for real".
pub trait Reality: Send + Sync {
    fn execute(&self, genotype: &Genotype, simulated: &SimOutcome) -> SimOutcome;
}

impl Reality for WorldParams {
    fn execute(&self, genotype: &Genotype, _simulated: &SimOutcome) -> SimOutcome {
        simulate(genotype, self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Novelty, quality rank and (with transfers) transferability rank;
    /// replacing archive.
    Tbr { transfers: bool },
    /// Novelty only; add-only archive.
    NoveltySearch,
    /// Novelty and quality rank; add-only archive.
    LocalCompetition,
}

impl Variant {
    fn policy(self) -> ArchivePolicy {
        match self {
            Variant::Tbr { .. } => ArchivePolicy::Replacing,
            _ => ArchivePolicy::AddOnly,
        }
    }

    fn transfers(self) -> bool {
        matches!(self, Variant::Tbr { transfers: true })
    }

    pub fn objective_count(self) -> usize {
        match self {
            Variant::Tbr { transfers: true } => 3,
            Variant::Tbr { transfers: false } | Variant::LocalCompetition => 2,
            Variant::NoveltySearch => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Objectives {
    pub novelty: f64,
    pub qrank: usize,
    pub trank: usize,
}

impl Objectives {
    /// Maximized objective vector for `variant`.
    pub fn vector(&self, variant: Variant) -> Vec<f64> {
        let mut v = vec![self.novelty];
        if variant.objective_count() >= 2 {
            v.push(-(self.qrank as f64));
        }
        if variant.objective_count() == 3 {
            v.push(-(self.trank as f64));
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub evaluations: u64,
    pub archive_size: usize,
    /// Archive members with estimated transferability above -0.15 m.
    pub transferable: usize,
    pub median_quality: Option<f64>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

pub(crate) fn evaluate_batch(genotypes: &[Genotype], world: &WorldParams) -> Vec<SimOutcome> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        genotypes.par_iter().map(|g| simulate(g, world)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        genotypes.iter().map(|g| simulate(g, world)).collect()
    }
}

/// Uniformly picks one member of `pop ∪ archive`, executes it on `reality`,
/// refits the surrogate on every transfer so far and refreshes all
/// estimates.
pub fn transfer_step<R: Rng + ?Sized>(
    pop: &mut [ControllerRecord],
    archive: &mut Archive,
    reality: &dyn Reality,
    surrogate: &SurrogateModel,
    history: &mut Vec<TransferRecord>,
    rng: &mut R,
) -> SurrogateModel {
    let total = pop.len() + archive.len();
    let pick = rng.gen_range(0..total);
    let chosen = if pick < pop.len() { &pop[pick] } else { &archive.members()[pick - pop.len()] };
    let real = reality.execute(&chosen.genotype, &chosen.outcome);
    let record = TransferRecord::new(chosen.genotype, &chosen.outcome, &real)
        .expect("rollouts always produce N contact rows");
    history.push(record);
    let model = surrogate.fit(history);
    for m in pop.iter_mut() {
        m.t_hat = model.predict(&m.descriptor);
    }
    archive.refresh_estimates(&model);
    model
}

/// Stepwise evolution engine shared by the repertoire algorithm and the
/// novelty-search controls.
pub struct Evolution {
    params: AlgoParams,
    variant: Variant,
    sim: WorldParams,
    reality: Option<Arc<dyn Reality>>,
    rng: ChaCha8Rng,
    population: Vec<ControllerRecord>,
    objectives: Vec<Objectives>,
    ranking: Option<Ranking>,
    archive: Archive,
    surrogate: SurrogateModel,
    transfers: Vec<TransferRecord>,
    events: Vec<ArchiveEvent>,
    generation: usize,
    next_id: u64,
    stats: Vec<GenerationStats>,
}

impl Evolution {
    pub fn new(
        params: AlgoParams,
        variant: Variant,
        sim: WorldParams,
        reality: Option<Arc<dyn Reality>>,
        seed: u64,
    ) -> Result<Self, Error> {
        params.validate()?;
        if variant.transfers() && reality.is_none() {
            return Err(Error::Config("transfers are enabled but no reality was supplied".into()));
        }
        Ok(Self {
            params,
            variant,
            sim,
            reality,
            rng: ChaCha8Rng::seed_from_u64(seed),
            population: Vec::new(),
            objectives: Vec::new(),
            ranking: None,
            archive: Archive::new(),
            surrogate: SurrogateModel::new(),
            transfers: Vec::new(),
            events: Vec::new(),
            generation: 0,
            next_id: 0,
            stats: Vec::new(),
        })
    }

    pub fn params(&self) -> &AlgoParams {
        &self.params
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Rollouts consumed so far (transfers not included).
    pub fn evaluations(&self) -> u64 {
        self.next_id
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn population(&self) -> &[ControllerRecord] {
        &self.population
    }

    pub fn population_objectives(&self) -> &[Objectives] {
        &self.objectives
    }

    pub fn surrogate(&self) -> &SurrogateModel {
        &self.surrogate
    }

    pub fn transfers(&self) -> &[TransferRecord] {
        &self.transfers
    }

    pub fn events(&self) -> &[ArchiveEvent] {
        &self.events
    }

    pub fn stats(&self) -> &[GenerationStats] {
        &self.stats
    }

    pub fn is_done(&self) -> bool {
        self.generation >= self.params.generations
    }

    fn evaluate(&mut self, genotypes: Vec<Genotype>) -> Vec<ControllerRecord> {
        let outcomes = evaluate_batch(&genotypes, &self.sim);
        genotypes
            .into_iter()
            .zip(outcomes)
            .map(|(g, o)| {
                let id = self.next_id;
                self.next_id += 1;
                ControllerRecord::new(id, g, o, &self.surrogate)
            })
            .collect()
    }

    fn breed(&mut self) -> Vec<Genotype> {
        let ranking = self.ranking.as_ref().expect("ranked population after the first generation");
        (0..self.params.population_size)
            .map(|_| {
                let parent = tournament(ranking, &mut self.rng);
                mutate(&self.population[parent].genotype, self.params.mutation_rate, &mut self.rng)
            })
            .collect()
    }

    /// Runs one generation and returns its stats.
    pub fn step(&mut self) -> GenerationStats {
        let first_new_id = self.next_id;
        let offspring = if self.generation == 0 {
            let genotypes = (0..self.params.population_size).map(|_| Genotype::random(&mut self.rng)).collect();
            self.evaluate(genotypes)
        } else {
            let genotypes = self.breed();
            self.evaluate(genotypes)
        };
        self.generation += 1;

        let mut merged = std::mem::take(&mut self.population);
        merged.extend(offspring);
        merged.sort_by_key(|r| r.id);

        if self.variant.transfers() && self.generation % self.params.transfer_period == 0 {
            let reality = self.reality.clone().expect("checked at construction");
            self.surrogate = transfer_step(
                &mut merged,
                &mut self.archive,
                reality.as_ref(),
                &self.surrogate,
                &mut self.transfers,
                &mut self.rng,
            );
        }

        let objectives = self.update_objectives_and_archive(&mut merged, first_new_id);

        let vectors: Vec<Vec<f64>> = objectives.iter().map(|o| o.vector(self.variant)).collect();
        let ranking = nondominated_sort(&vectors);
        let mut survivors = select_survivors(&ranking, self.params.population_size);
        survivors.sort_unstable();
        self.ranking = Some(Ranking {
            rank: survivors.iter().map(|&i| ranking.rank[i]).collect(),
            crowding: survivors.iter().map(|&i| ranking.crowding[i]).collect(),
            fronts: Vec::new(),
        });
        self.objectives = survivors.iter().map(|&i| objectives[i]).collect();
        let mut merged: Vec<Option<ControllerRecord>> = merged.into_iter().map(Some).collect();
        self.population = survivors.iter().map(|&i| merged[i].take().expect("unique survivors")).collect();

        let stats = self.current_stats();
        self.stats.push(stats.clone());
        stats
    }

    fn update_objectives_and_archive(&mut self, merged: &mut [ControllerRecord], first_new_id: u64) -> Vec<Objectives> {
        let ids: HashSet<u64> = merged.iter().map(|r| r.id).collect();
        let mut objectives = Vec::with_capacity(merged.len());
        for idx in 0..merged.len() {
            let obj = {
                let c = &merged[idx];
                let pool: Vec<&ControllerRecord> = merged
                    .iter()
                    .chain(self.archive.iter().filter(|a| !ids.contains(&a.id)))
                    .collect();
                match neighborhood(c, &pool, self.params.k) {
                    Ok(nbrs) => Objectives {
                        novelty: novelty(c, &nbrs).expect("nonempty neighborhood"),
                        qrank: qrank(c, &nbrs),
                        trank: trank(c, &nbrs),
                    },
                    Err(_) => Objectives::default(),
                }
            };
            merged[idx].novelty = obj.novelty;
            objectives.push(obj);
            if merged[idx].id >= first_new_id {
                let c = merged[idx].clone();
                let report = self.archive.update(
                    &c,
                    obj.novelty,
                    self.params.rho,
                    self.params.tau,
                    self.variant.policy(),
                    &mut self.events,
                );
                debug_assert!(!report.added || obj.novelty > self.params.rho);
            }
        }
        objectives
    }

    fn current_stats(&self) -> GenerationStats {
        let mut qualities: Vec<f64> = self.archive.iter().map(|r| r.quality).collect();
        GenerationStats {
            generation: self.generation,
            evaluations: self.next_id,
            archive_size: self.archive.len(),
            transferable: self.archive.iter().filter(|r| r.t_hat > TRANSFERABLE_LEVEL).count(),
            median_quality: median(&mut qualities),
        }
    }

    /// Steps until the configured number of generations, calling `observe`
    /// after every generation.
    pub fn run_with<F: FnMut(&Evolution)>(&mut self, mut observe: F) {
        while !self.is_done() {
            self.step();
            observe(self);
        }
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            evaluations: self.next_id,
            archive: self.archive,
            population: self.population,
            stats: self.stats,
            transfers: self.transfers,
            events: self.events,
            surrogate: self.surrogate,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub archive: Archive,
    pub population: Vec<ControllerRecord>,
    pub stats: Vec<GenerationStats>,
    pub transfers: Vec<TransferRecord>,
    pub events: Vec<ArchiveEvent>,
    pub surrogate: SurrogateModel,
    pub evaluations: u64,
}

/// Full repertoire evolution. Without transfers the transferability rank is
/// dropped from the objectives and every estimate stays at the sentinel.
pub fn run_tbr(
    params: &AlgoParams,
    sim: &WorldParams,
    real: Option<Arc<dyn Reality>>,
    seed: u64,
    transfer_enabled: bool,
) -> Result<RunOutput, Error> {
    let mut engine = Evolution::new(params.clone(), Variant::Tbr { transfers: transfer_enabled }, sim.clone(), real, seed)?;
    engine.run_with(|_| {});
    Ok(engine.into_output())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repertoire::replacement_branch;
    use crate::sim::PerturbationProfile;

    fn small(generations: usize) -> AlgoParams {
        AlgoParams { population_size: 20, generations, transfer_period: 5, ..AlgoParams::default() }
    }

    #[test]
    fn evaluation_budget_is_pop_times_generations() {
        let out = run_tbr(&small(7), &WorldParams::simulation(), None, 1, false).unwrap();
        assert_eq!(out.evaluations, 140);
        assert_eq!(out.population.len(), 20);
        assert_eq!(out.stats.len(), 7);
    }

    #[test]
    fn first_generation_seeds_archive_with_novel_controllers() {
        let out = run_tbr(&small(1), &WorldParams::simulation(), None, 2, false).unwrap();
        for ev in &out.events {
            if let ArchiveEvent::Added { novelty, .. } = ev {
                assert!(*novelty > 0.10);
            }
        }
        let added = out.events.iter().filter(|e| matches!(e, ArchiveEvent::Added { .. })).count();
        assert!(added > 0);
        assert_eq!(added, out.archive.len());
    }

    #[test]
    fn transfers_happen_every_period() {
        let real: Arc<dyn Reality> = Arc::new(WorldParams::pseudo_reality(PerturbationProfile::p0()).unwrap());
        let out = run_tbr(&small(20), &WorldParams::simulation(), Some(real), 3, true).unwrap();
        assert_eq!(out.transfers.len(), 4);
        assert!(out.surrogate.is_fitted());
        for r in out.archive.iter() {
            assert_eq!(r.t_hat, out.surrogate.predict(&r.descriptor));
        }
    }

    #[test]
    fn default_period_gives_sixty_transfers_in_3000_generations() {
        let p = AlgoParams { generations: 3000, transfer_period: 50, ..AlgoParams::default() };
        assert_eq!((1..=p.generations).filter(|g| g % p.transfer_period == 0).count(), 60);
    }

    #[test]
    fn transfers_require_reality() {
        let err = Evolution::new(small(1), Variant::Tbr { transfers: true }, WorldParams::simulation(), None, 0);
        assert!(err.is_err());
        assert!(Evolution::new(AlgoParams { k: 0, ..small(1) }, Variant::NoveltySearch, WorldParams::simulation(), None, 0).is_err());
    }

    #[test]
    fn runs_are_reproducible() {
        let a = run_tbr(&small(15), &WorldParams::simulation(), None, 9, false).unwrap();
        let b = run_tbr(&small(15), &WorldParams::simulation(), None, 9, false).unwrap();
        assert_eq!(a.archive.members(), b.archive.members());
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn replacements_replay_correctly() {
        let params = small(30);
        let out = run_tbr(&params, &WorldParams::simulation(), None, 4, false).unwrap();
        let mut replaced = 0;
        for ev in &out.events {
            if let ArchiveEvent::Replaced { old, new, branch } = ev {
                replaced += 1;
                assert!(new.id > old.id);
                assert_eq!(replacement_branch(new, old, params.tau), Some(*branch));
                // sentinel estimates: only the quality branch can fire
                assert_eq!(*branch, crate::repertoire::ReplaceBranch::Quality);
            }
        }
        assert!(replaced > 0);
    }

    #[test]
    fn archive_never_shrinks() {
        let out = run_tbr(&small(30), &WorldParams::simulation(), None, 5, false).unwrap();
        assert!(out.stats.windows(2).all(|w| w[0].archive_size <= w[1].archive_size));
    }

    #[test]
    fn median_of_values() {
        assert_eq!(median(&mut []), None);
        assert_eq!(median(&mut [0.3, 0.02, 0.05]), Some(0.05));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
