//! Comparison algorithms: plain novelty search, novelty search with local
//! competition, one NSGA-II run per target point, and the single-target
//! transferability experiment.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::evolution::{evaluate_batch, transfer_step, AlgoParams, Evolution, Reality, RunOutput, Variant};
use crate::gait::{mutate, Genotype};
use crate::geometry::{Endpoint, RegionOfInterest};
use crate::nsga2::{nondominated_sort, select_survivors, tournament, Ranking};
use crate::repertoire::{Archive, ControllerRecord};
use crate::sim::WorldParams;
use crate::surrogate::{SurrogateModel, TransferRecord};

/// Radius around the target within which the orientation variant picks
/// its best-oriented controller (m).
pub const ORIENTATION_RADIUS: f64 = 0.10;

/// Estimated transferability a reference-experiment pick must reach (m).
pub const REFERENCE_FEASIBLE: f64 = -0.10;

/// 0.4 m ahead and 0.3 m to the right.
pub const DEFAULT_REFERENCE_TARGET: Endpoint = Endpoint::new(0.4, -0.3);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    Ns,
    Nslc,
    PerTargetNearest,
    PerTargetOrientation,
    ReferenceTransfer,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [
        BaselineKind::Ns,
        BaselineKind::Nslc,
        BaselineKind::PerTargetNearest,
        BaselineKind::PerTargetOrientation,
        BaselineKind::ReferenceTransfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Ns => "ns",
            BaselineKind::Nslc => "nslc",
            BaselineKind::PerTargetNearest => "per-target-nearest",
            BaselineKind::PerTargetOrientation => "per-target-orientation",
            BaselineKind::ReferenceTransfer => "reference-transfer",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .or(match key.as_str() {
                "nearest" => Some(BaselineKind::PerTargetNearest),
                "orientation" => Some(BaselineKind::PerTargetOrientation),
                "reference" => Some(BaselineKind::ReferenceTransfer),
                _ => None,
            })
            .ok_or_else(|| Error::Config(format!("unknown baseline kind {s:?}")))
    }
}

/// Target points spread over the ROI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSet {
    pub targets: Vec<Endpoint>,
}

impl TargetSet {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

pub const DEFAULT_TARGET_COUNT: usize = 100;
const KMEANS_TOLERANCE: f64 = 1e-6;
const KMEANS_ITERATIONS: usize = 100;

/// Lloyd's k-means over the ROI grid, seeded with `count` distinct grid
/// points. Centroids are snapped to distinct grid points.
pub fn kmeans_targets<R: Rng + ?Sized>(roi: &RegionOfInterest, count: usize, rng: &mut R) -> Result<TargetSet, Error> {
    let grid = roi.grid();
    if count == 0 || count > grid.len() {
        return Err(Error::Config(format!("target count {count} must lie in 1..={}", grid.len())));
    }
    let mut centroids: Vec<Endpoint> = sample(rng, grid.len(), count).into_iter().map(|i| grid[i]).collect();
    let closest = |p: &Endpoint, cs: &[Endpoint]| {
        let mut best = 0;
        for (j, c) in cs.iter().enumerate() {
            if p.distance_sq(c) < p.distance_sq(&cs[best]) {
                best = j;
            }
        }
        best
    };
    for _ in 0..KMEANS_ITERATIONS {
        let mut sums = vec![(0.0, 0.0, 0usize); count];
        for p in &grid {
            let s = &mut sums[closest(p, &centroids)];
            s.0 += p.x;
            s.1 += p.y;
            s.2 += 1;
        }
        let mut moved: f64 = 0.0;
        for (c, (sx, sy, n)) in centroids.iter_mut().zip(sums) {
            if n > 0 {
                let next = Endpoint::new(sx / n as f64, sy / n as f64);
                moved = moved.max(c.distance(&next));
                *c = next;
            }
        }
        if moved < KMEANS_TOLERANCE {
            break;
        }
    }
    let mut taken = vec![false; grid.len()];
    let targets = centroids
        .iter()
        .map(|c| {
            let mut best: Option<usize> = None;
            for (i, p) in grid.iter().enumerate() {
                if !taken[i] && best.is_none_or(|b| p.distance_sq(c) < grid[b].distance_sq(c)) {
                    best = Some(i);
                }
            }
            let i = best.expect("count does not exceed the grid size");
            taken[i] = true;
            grid[i]
        })
        .collect();
    Ok(TargetSet { targets })
}

pub fn run_ns(params: &AlgoParams, sim: &WorldParams, seed: u64) -> Result<RunOutput, Error> {
    let mut engine = Evolution::new(params.clone(), Variant::NoveltySearch, sim.clone(), None, seed)?;
    engine.run_with(|_| {});
    Ok(engine.into_output())
}

pub fn run_nslc(params: &AlgoParams, sim: &WorldParams, seed: u64) -> Result<RunOutput, Error> {
    let mut engine = Evolution::new(params.clone(), Variant::LocalCompetition, sim.clone(), None, seed)?;
    engine.run_with(|_| {});
    Ok(engine.into_output())
}

/// Generations each per-target run gets so that all targets together spend
/// the same number of rollouts as one repertoire run of `total` generations.
pub fn per_target_generations(total: usize, targets: usize) -> usize {
    (total / targets.max(1)).max(1)
}

/// Seed of the run for `target`, independent of its position in a target set.
pub fn target_seed(seed: u64, target: Endpoint) -> u64 {
    let gx = (target.x * 1e4).round() as i64 as u64;
    let gy = (target.y * 1e4).round() as i64 as u64;
    let mut z = seed ^ gx.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ gy.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Picks of one per-target run.
#[derive(Clone, Debug)]
pub struct PerTargetResult {
    pub target: Endpoint,
    pub nearest: ControllerRecord,
    pub orientation: ControllerRecord,
    /// No Pareto member was within [`ORIENTATION_RADIUS`]; `orientation`
    /// is the nearest pick.
    pub orientation_fallback: bool,
    pub front: Vec<ControllerRecord>,
    pub evaluations: u64,
}

impl PerTargetResult {
    pub fn pick(&self, kind: BaselineKind) -> &ControllerRecord {
        match kind {
            BaselineKind::PerTargetOrientation => &self.orientation,
            _ => &self.nearest,
        }
    }
}

/// Single-target NSGA-II with mutation only and a caller-supplied maximized
/// objective vector. `transfer` runs after evaluation on generations that
/// are multiples of the transfer period.
struct TargetSearch<'a> {
    params: &'a AlgoParams,
    sim: &'a WorldParams,
    rng: ChaCha8Rng,
    population: Vec<ControllerRecord>,
    ranking: Option<Ranking>,
    surrogate: SurrogateModel,
    next_id: u64,
}

impl<'a> TargetSearch<'a> {
    fn new(params: &'a AlgoParams, sim: &'a WorldParams, seed: u64) -> Result<Self, Error> {
        params.validate()?;
        Ok(Self {
            params,
            sim,
            rng: ChaCha8Rng::seed_from_u64(seed),
            population: Vec::new(),
            ranking: None,
            surrogate: SurrogateModel::new(),
            next_id: 0,
        })
    }

    fn run<O, T>(&mut self, objectives: O, mut transfer: T)
    where
        O: Fn(&ControllerRecord) -> Vec<f64>,
        T: FnMut(usize, &mut Vec<ControllerRecord>, &mut SurrogateModel, &mut ChaCha8Rng),
    {
        for generation in 1..=self.params.generations {
            let genotypes: Vec<Genotype> = match &self.ranking {
                None => (0..self.params.population_size).map(|_| Genotype::random(&mut self.rng)).collect(),
                Some(ranking) => (0..self.params.population_size)
                    .map(|_| {
                        let parent = tournament(ranking, &mut self.rng);
                        mutate(&self.population[parent].genotype, self.params.mutation_rate, &mut self.rng)
                    })
                    .collect(),
            };
            let outcomes = evaluate_batch(&genotypes, self.sim);
            let mut merged = std::mem::take(&mut self.population);
            for (g, o) in genotypes.into_iter().zip(outcomes) {
                merged.push(ControllerRecord::new(self.next_id, g, o, &self.surrogate));
                self.next_id += 1;
            }
            transfer(generation, &mut merged, &mut self.surrogate, &mut self.rng);
            let vectors: Vec<Vec<f64>> = merged.iter().map(&objectives).collect();
            let ranking = nondominated_sort(&vectors);
            let mut survivors = select_survivors(&ranking, self.params.population_size);
            survivors.sort_unstable();
            self.ranking = Some(Ranking {
                rank: survivors.iter().map(|&i| ranking.rank[i]).collect(),
                crowding: survivors.iter().map(|&i| ranking.crowding[i]).collect(),
                fronts: Vec::new(),
            });
            let mut merged: Vec<Option<ControllerRecord>> = merged.into_iter().map(Some).collect();
            self.population = survivors.iter().map(|&i| merged[i].take().expect("unique survivors")).collect();
        }
    }

    /// Pareto front of the final population under `objectives`.
    fn front<O: Fn(&ControllerRecord) -> Vec<f64>>(&self, objectives: O) -> Vec<ControllerRecord> {
        let vectors: Vec<Vec<f64>> = self.population.iter().map(objectives).collect();
        let ranking = nondominated_sort(&vectors);
        ranking.fronts[0].iter().map(|&i| self.population[i].clone()).collect()
    }
}

fn closest_to(target: Endpoint, records: &[ControllerRecord]) -> Option<&ControllerRecord> {
    records.iter().min_by(|a, b| {
        a.endpoint().distance_sq(&target).total_cmp(&b.endpoint().distance_sq(&target)).then(a.id.cmp(&b.id))
    })
}

/// NSGA-II minimizing distance to `target` and `|theta|`.
pub fn run_per_target(target: Endpoint, params: &AlgoParams, sim: &WorldParams, seed: u64) -> Result<PerTargetResult, Error> {
    let objectives = |r: &ControllerRecord| vec![-r.endpoint().distance(&target), r.quality];
    let mut search = TargetSearch::new(params, sim, seed)?;
    search.run(objectives, |_, _, _, _| {});
    let front = search.front(objectives);
    let nearest = closest_to(target, &front).expect("nonempty front").clone();
    let oriented = front
        .iter()
        .filter(|r| r.endpoint().distance(&target) <= ORIENTATION_RADIUS)
        .min_by(|a, b| a.orientation_error().total_cmp(&b.orientation_error()).then(a.id.cmp(&b.id)));
    let (orientation, orientation_fallback) = match oriented {
        Some(r) => (r.clone(), false),
        None => (nearest.clone(), true),
    };
    Ok(PerTargetResult { target, nearest, orientation, orientation_fallback, front, evaluations: search.next_id })
}

/// One per-target run for every target, each with its own derived seed.
pub fn run_per_target_set(
    targets: &TargetSet,
    params: &AlgoParams,
    sim: &WorldParams,
    seed: u64,
) -> Result<Vec<PerTargetResult>, Error> {
    targets.targets.iter().map(|&t| run_per_target(t, params, sim, target_seed(seed, t))).collect()
}

/// Picks of a per-target sweep as a repertoire, renumbered by target index.
pub fn per_target_repertoire(results: &[PerTargetResult], kind: BaselineKind) -> Vec<ControllerRecord> {
    results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut rec = r.pick(kind).clone();
            rec.id = i as u64;
            rec
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ReferenceResult {
    pub target: Endpoint,
    pub pick: ControllerRecord,
    /// No member reached [`REFERENCE_FEASIBLE`]; `pick` is merely the closest.
    pub infeasible: bool,
    pub transfers: Vec<TransferRecord>,
    pub surrogate: SurrogateModel,
    pub population: Vec<ControllerRecord>,
    pub evaluations: u64,
}

/// Single-target NSGA-II minimizing distance, `-T_hat` and `|theta|`, with
/// one transfer from the population every transfer period.
pub fn run_reference_transfer(
    target: Endpoint,
    params: &AlgoParams,
    sim: &WorldParams,
    real: Arc<dyn Reality>,
    seed: u64,
) -> Result<ReferenceResult, Error> {
    let objectives = |r: &ControllerRecord| vec![-r.endpoint().distance(&target), r.t_hat, r.quality];
    let mut search = TargetSearch::new(params, sim, seed)?;
    let mut history = Vec::new();
    let period = params.transfer_period;
    let mut empty = Archive::new();
    search.run(objectives, |generation, pop, surrogate, rng| {
        if generation % period == 0 {
            *surrogate = transfer_step(pop, &mut empty, real.as_ref(), surrogate, &mut history, rng);
        }
    });
    let feasible: Vec<ControllerRecord> =
        search.population.iter().filter(|r| r.t_hat >= REFERENCE_FEASIBLE).cloned().collect();
    let (pick, infeasible) = match closest_to(target, &feasible) {
        Some(r) => (r.clone(), false),
        None => (closest_to(target, &search.population).expect("nonempty population").clone(), true),
    };
    Ok(ReferenceResult {
        target,
        pick,
        infeasible,
        transfers: history,
        surrogate: search.surrogate,
        population: search.population,
        evaluations: search.next_id,
    })
}
