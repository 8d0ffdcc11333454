//! Repertoire metrics: grid sparseness, mean orientation error inside the
//! region of interest, the 30-cell controller selection and the accuracy of
//! selected controllers on the real robot.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::evolution::{median, Evolution, Reality, TRANSFERABLE_LEVEL};
use crate::geometry::{curvilinear_abscissa, wrap, Endpoint, RegionOfInterest};
use crate::repertoire::ControllerRecord;

/// Mean distance from each grid point to its nearest endpoint (m).
pub fn sparseness_on_grid(grid: &[Endpoint], endpoints: &[Endpoint]) -> Result<f64, Error> {
    if endpoints.is_empty() {
        return Err(Error::EmptyArchive);
    }
    if grid.is_empty() {
        return Err(Error::Config("empty metric grid".into()));
    }
    let total: f64 = grid
        .iter()
        .map(|p| endpoints.iter().map(|e| p.distance_sq(e)).fold(f64::INFINITY, f64::min).sqrt())
        .sum();
    Ok(total / grid.len() as f64)
}

pub fn sparseness<'a, I>(archive: I, roi: &RegionOfInterest) -> Result<f64, Error>
where
    I: IntoIterator<Item = &'a ControllerRecord>,
{
    let endpoints: Vec<Endpoint> = archive.into_iter().map(|r| r.endpoint()).collect();
    sparseness_on_grid(&roi.grid(), &endpoints)
}

/// Mean `|theta|` over members whose endpoint lies in the ROI (rad).
pub fn orientation_error<'a, I>(archive: I, roi: &RegionOfInterest) -> Result<f64, Error>
where
    I: IntoIterator<Item = &'a ControllerRecord>,
{
    let errs = in_roi_errors(archive, roi);
    if errs.is_empty() {
        return Err(Error::NoneInRoi);
    }
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

fn in_roi_errors<'a, I>(archive: I, roi: &RegionOfInterest) -> Vec<f64>
where
    I: IntoIterator<Item = &'a ControllerRecord>,
{
    archive
        .into_iter()
        .filter(|r| roi.contains(r.endpoint()))
        .map(|r| r.orientation_error())
        .collect()
}

/// One line of a metric curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub evaluations: u64,
    pub archive_size: usize,
    pub sparseness: Option<f64>,
    /// Mean `|theta|` inside the ROI.
    pub orientation_error: Option<f64>,
    pub median_orientation_error: Option<f64>,
    pub transferable: usize,
}

/// Precomputed ROI grid for repeated metric evaluation.
#[derive(Clone, Debug)]
pub struct MetricGrid {
    roi: RegionOfInterest,
    grid: Vec<Endpoint>,
}

impl MetricGrid {
    pub fn new(roi: RegionOfInterest) -> Self {
        Self { grid: roi.grid(), roi }
    }

    pub fn roi(&self) -> &RegionOfInterest {
        &self.roi
    }

    pub fn points(&self) -> &[Endpoint] {
        &self.grid
    }

    pub fn row(&self, evaluations: u64, archive: &[ControllerRecord]) -> MetricsRow {
        let endpoints: Vec<Endpoint> = archive.iter().map(|r| r.endpoint()).collect();
        let mut errs = in_roi_errors(archive, &self.roi);
        let mean = if errs.is_empty() { None } else { Some(errs.iter().sum::<f64>() / errs.len() as f64) };
        MetricsRow {
            evaluations,
            archive_size: archive.len(),
            sparseness: sparseness_on_grid(&self.grid, &endpoints).ok(),
            orientation_error: mean,
            median_orientation_error: median(&mut errs),
            transferable: archive.iter().filter(|r| r.t_hat > TRANSFERABLE_LEVEL).count(),
        }
    }
}

/// Runs `engine` to completion, recording a metric row every `cadence`
/// generations and after the last one.
pub fn run_with_metrics(engine: &mut Evolution, grid: &MetricGrid, cadence: usize) -> Vec<MetricsRow> {
    let cadence = cadence.max(1);
    let mut rows = Vec::new();
    engine.run_with(|e| {
        if e.generation() % cadence == 0 || e.is_done() {
            rows.push(grid.row(e.evaluations(), e.archive().members()));
        }
    });
    rows
}

/// Annulus partition used to pick a small, well-spread set of controllers
/// for real-robot evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellPartition {
    pub inner: f64,
    pub outer: f64,
    pub half_angle: f64,
    pub angular_bins: usize,
    pub radial_bins: usize,
}

impl Default for CellPartition {
    fn default() -> Self {
        Self { inner: 0.2, outer: 0.6, half_angle: PI / 3.0, angular_bins: 5, radial_bins: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub rear: bool,
    pub angular: usize,
    pub radial: usize,
}

impl CellPartition {
    pub fn cell_count(&self) -> usize {
        2 * self.angular_bins * self.radial_bins
    }

    pub fn index(&self, cell: Cell) -> usize {
        (usize::from(cell.rear) * self.angular_bins + cell.angular) * self.radial_bins + cell.radial
    }

    /// Cell containing `e`, if any. Bins are half-open except the last one.
    pub fn cell_of(&self, e: Endpoint) -> Option<Cell> {
        let s = curvilinear_abscissa(e).ok()?;
        if s < self.inner || s > self.outer {
            return None;
        }
        let b = e.bearing();
        let (rear, rel) = if b.abs() <= self.half_angle {
            (false, b)
        } else if b.abs() >= PI - self.half_angle {
            (true, wrap(b - PI))
        } else {
            return None;
        };
        let bin = |v: f64, lo: f64, width: f64, n: usize| (((v - lo) / width).floor().max(0.0) as usize).min(n - 1);
        let angular =
            bin(rel, -self.half_angle, 2.0 * self.half_angle / self.angular_bins as f64, self.angular_bins);
        let radial = bin(s, self.inner, (self.outer - self.inner) / self.radial_bins as f64, self.radial_bins);
        Some(Cell { rear, angular, radial })
    }

    /// Angular and radial bounds of `cell`: `(bearing_lo, bearing_hi, s_lo, s_hi)`,
    /// bearings relative to the lobe axis.
    pub fn bounds(&self, cell: Cell) -> (f64, f64, f64, f64) {
        let aw = 2.0 * self.half_angle / self.angular_bins as f64;
        let rw = (self.outer - self.inner) / self.radial_bins as f64;
        let a0 = -self.half_angle + aw * cell.angular as f64;
        let r0 = self.inner + rw * cell.radial as f64;
        (a0, a0 + aw, r0, r0 + rw)
    }
}

/// Best-estimated-transferability member of every non-empty cell, ordered
/// by cell. Ties go to the smaller id.
pub fn select_30<'a, I>(archive: I, partition: &CellPartition) -> Vec<(Cell, ControllerRecord)>
where
    I: IntoIterator<Item = &'a ControllerRecord>,
{
    let mut best: Vec<Option<(Cell, &ControllerRecord)>> = vec![None; partition.cell_count()];
    for r in archive {
        let Some(cell) = partition.cell_of(r.endpoint()) else { continue };
        let slot = &mut best[partition.index(cell)];
        let better = match slot {
            None => true,
            Some((_, cur)) => r.t_hat > cur.t_hat || (r.t_hat == cur.t_hat && r.id < cur.id),
        };
        if better {
            *slot = Some((cell, r));
        }
    }
    best.into_iter().flatten().map(|(c, r)| (c, r.clone())).collect()
}

/// Order statistics with linear interpolation between ranks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Some(Quartiles { q1: quantile(&v, 0.25), median: quantile(&v, 0.5), q3: quantile(&v, 0.75) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub id: u64,
    pub sim: Endpoint,
    pub real: Endpoint,
    /// `|E_simu - E_real|` (m).
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferEvaluation {
    pub accuracies: Vec<Accuracy>,
    pub summary: Option<Quartiles>,
}

/// Executes every record on `reality` and reports endpoint mismatches.
pub fn transfer_eval(records: &[ControllerRecord], reality: &dyn Reality) -> TransferEvaluation {
    let accuracies: Vec<Accuracy> = records
        .iter()
        .map(|r| {
            let real = reality.execute(&r.genotype, &r.outcome).endpoint;
            Accuracy { id: r.id, sim: r.endpoint(), real, accuracy: r.endpoint().distance(&real) }
        })
        .collect();
    let values: Vec<f64> = accuracies.iter().map(|a| a.accuracy).collect();
    TransferEvaluation { summary: quartiles(&values), accuracies }
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return Some(0.0);
    }
    Some(cov / (vx * vy).sqrt())
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gait::Genotype;
    use crate::sim::{simulate, Pose, SimOutcome, WorldParams, TICKS};
    use crate::surrogate::SurrogateModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn at(id: u64, x: f64, y: f64, yaw: f64) -> ControllerRecord {
        let outcome = SimOutcome {
            endpoint: Endpoint::new(x, y),
            yaw,
            contacts: vec![[true; 6]; TICKS],
            trajectory: vec![Pose::default(); TICKS + 1],
        };
        ControllerRecord::new(id, Genotype::zero(), outcome, &SurrogateModel::new())
    }

    #[test]
    fn full_grid_archive_has_zero_sparseness() {
        let roi = RegionOfInterest::default();
        let archive: Vec<_> = roi.grid().iter().enumerate().map(|(i, p)| at(i as u64, p.x, p.y, 0.0)).collect();
        assert_eq!(sparseness(&archive, &roi).unwrap(), 0.0);
    }

    #[test]
    fn single_member_matches_double_loop() {
        let roi = RegionOfInterest::default();
        let archive = [at(0, 0.2, -0.1, 0.0)];
        // brute force over the lattice, independent of the grid helper
        let (mut sum, mut count) = (0.0, 0usize);
        for ix in -60..=60 {
            for iy in -60..=60 {
                let p = Endpoint::new(ix as f64 / 100.0, iy as f64 / 100.0);
                if roi.contains(p) {
                    sum += ((p.x - 0.2).powi(2) + (p.y + 0.1).powi(2)).sqrt();
                    count += 1;
                }
            }
        }
        assert!((sparseness(&archive, &roi).unwrap() - sum / count as f64).abs() < 1e-12);
        assert!(matches!(sparseness(&[], &roi), Err(Error::EmptyArchive)));
    }

    #[test]
    fn adding_members_never_increases_sparseness() {
        let grid = MetricGrid::new(RegionOfInterest::default());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = vec![Endpoint::new(0.1, 0.0)];
        let mut last = sparseness_on_grid(grid.points(), &pts).unwrap();
        for _ in 0..30 {
            pts.push(Endpoint::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)));
            let s = sparseness_on_grid(grid.points(), &pts).unwrap();
            assert!(s <= last);
            last = s;
        }
    }

    #[test]
    fn orientation_error_examples() {
        let roi = RegionOfInterest::default();
        let perfect = [at(0, 0.3, 0.0, 0.0), at(1, 0.3, 0.3 * 0.5, 2.0 * 0.5f64.atan())];
        assert!(orientation_error(&perfect, &roi).unwrap().abs() < 1e-12);
        let mixed = [at(0, 0.3, 0.0, 0.1), at(1, -0.3, 0.0, -0.3), at(2, 5.0, 0.0, 3.0)];
        assert!((orientation_error(&mixed, &roi).unwrap() - 0.2).abs() < 1e-12);
        assert!(matches!(orientation_error(&[at(0, 5.0, 0.0, 0.0)], &roi), Err(Error::NoneInRoi)));
    }

    #[test]
    fn one_member_per_cell_selects_all() {
        let part = CellPartition::default();
        let mut archive = Vec::new();
        for rear in [false, true] {
            for a in 0..5 {
                for r in 0..3 {
                    let (a0, a1, s0, s1) = part.bounds(Cell { rear, angular: a, radial: r });
                    let rel: f64 = 0.5 * (a0 + a1);
                    // chord length for an arc of length s leaving at bearing rel
                    let chord = 0.5 * (s0 + s1) * if rel == 0.0 { 1.0 } else { rel.sin() / rel };
                    let ang = rel + if rear { PI } else { 0.0 };
                    archive.push(at(archive.len() as u64, chord * ang.cos(), chord * ang.sin(), 0.0));
                }
            }
        }
        let sel = select_30(&archive, &part);
        assert_eq!(sel.len(), 30);
        let mut cells: Vec<_> = sel.iter().map(|(c, _)| *c).collect();
        cells.dedup();
        assert_eq!(cells.len(), 30);
        for (cell, r) in &sel {
            assert_eq!(part.cell_of(r.endpoint()), Some(*cell));
        }
    }

    #[test]
    fn best_estimate_wins_a_cell() {
        let part = CellPartition::default();
        let mut a = at(0, 0.3, 0.0, 0.0);
        let mut b = at(1, 0.31, 0.0, 0.0);
        a.t_hat = -0.2;
        b.t_hat = -0.05;
        let sel = select_30(&[a, b], &part);
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].1.id, 1);
    }

    #[test]
    fn inner_frontier_excludes() {
        let part = CellPartition::default();
        assert!(select_30(&[at(0, 0.1, 0.0, 0.0)], &part).is_empty());
        assert!(part.cell_of(Endpoint::new(0.0, 0.3)).is_none());
        assert!(part.cell_of(Endpoint::new(0.6, 0.0)).is_some());
    }

    #[test]
    fn identity_reality_is_exact() {
        let world = WorldParams::simulation();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let records: Vec<_> = (0..5)
            .map(|i| {
                let g = Genotype::random(&mut rng);
                ControllerRecord::new(i, g, simulate(&g, &world), &SurrogateModel::new())
            })
            .collect();
        let ev = transfer_eval(&records, &world);
        assert!(ev.accuracies.iter().all(|a| a.accuracy == 0.0));
    }

    #[test]
    fn accuracy_is_negated_transferability() {
        let world = WorldParams::simulation();
        let real = WorldParams::pseudo_reality(crate::sim::PerturbationProfile::p0()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let g = Genotype::random(&mut rng);
        let simu = simulate(&g, &world);
        let r = ControllerRecord::new(0, g, simu.clone(), &SurrogateModel::new());
        let ev = transfer_eval(&[r], &real);
        let score = crate::sim::transferability_score(&simu, &simulate(&g, &real));
        assert_eq!(ev.accuracies[0].accuracy, -score);
    }

    #[test]
    fn quartiles_of_three() {
        let q = quartiles(&[0.02, 0.30, 0.05]).unwrap();
        assert_eq!(q.median, 0.05);
        assert!((q.q1 - 0.035).abs() < 1e-12);
        assert!((q.q3 - 0.175).abs() < 1e-12);
        assert!(quartiles(&[]).is_none());
    }

    #[test]
    fn metric_rows_follow_the_cadence() {
        let params = crate::evolution::AlgoParams { population_size: 10, generations: 7, ..Default::default() };
        let mut engine =
            Evolution::new(params, crate::evolution::Variant::NoveltySearch, WorldParams::simulation(), None, 1).unwrap();
        let rows = run_with_metrics(&mut engine, &MetricGrid::new(RegionOfInterest::default()), 3);
        let evals: Vec<u64> = rows.iter().map(|r| r.evaluations).collect();
        assert_eq!(evals, vec![30, 60, 70]);
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!(spearman(&[1.0], &[1.0]).is_none());
    }
}
