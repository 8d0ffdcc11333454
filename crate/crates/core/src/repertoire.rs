//! Controller records, the repertoire archive, and the local objectives
//! (novelty and the two local-competition ranks).

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gait::Genotype;
use crate::geometry::{self, Endpoint};
use crate::sim::SimOutcome;
use crate::surrogate::{descriptor_of, Descriptor, SurrogateModel};

/// Quality assigned to a controller that never leaves the origin, where the
/// desired orientation is undefined.
pub const ORIGIN_QUALITY: f64 = -PI;

/// One evaluated controller.
#[derive(Clone, Debug, PartialEq)]
pub struct ControllerRecord {
    /// Evaluation index; unique and increasing.
    pub id: u64,
    pub genotype: Genotype,
    pub outcome: Arc<SimOutcome>,
    pub descriptor: Arc<Descriptor>,
    /// `-|theta|` (rad).
    pub quality: f64,
    /// Surrogate transferability estimate (m).
    pub t_hat: f64,
    /// Latest novelty; for archive members, the novelty at insertion.
    pub novelty: f64,
}

impl ControllerRecord {
    pub fn new(id: u64, genotype: Genotype, outcome: SimOutcome, surrogate: &SurrogateModel) -> Self {
        let descriptor = descriptor_of(&outcome).expect("rollouts always produce N contact rows");
        let quality = geometry::quality(outcome.endpoint, outcome.yaw).unwrap_or(ORIGIN_QUALITY);
        let t_hat = surrogate.predict(&descriptor);
        Self {
            id,
            genotype,
            outcome: Arc::new(outcome),
            descriptor: Arc::new(descriptor),
            quality,
            t_hat,
            novelty: 0.0,
        }
    }

    pub fn endpoint(&self) -> Endpoint {
        self.outcome.endpoint
    }

    pub fn yaw(&self) -> f64 {
        self.outcome.yaw
    }

    /// `|theta|` of the record (rad).
    pub fn orientation_error(&self) -> f64 {
        -self.quality
    }
}

fn by_distance_then_id(a: (f64, u64), b: (f64, u64)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// The `k` pool members closest to `c`'s endpoint, excluding `c` itself
/// (by id). Ties go to the smaller id. A pool smaller than `k` is returned
/// whole, nearest first.
pub fn neighborhood<'a>(
    c: &ControllerRecord,
    pool: &[&'a ControllerRecord],
    k: usize,
) -> Result<Vec<&'a ControllerRecord>, Error> {
    let e = c.endpoint();
    let mut cands: Vec<(f64, u64, &'a ControllerRecord)> = pool
        .iter()
        .filter(|r| r.id != c.id)
        .map(|r| (r.endpoint().distance_sq(&e), r.id, *r))
        .collect();
    if cands.is_empty() {
        return Err(Error::EmptyPool);
    }
    let cmp = |a: &(f64, u64, &ControllerRecord), b: &(f64, u64, &ControllerRecord)| {
        by_distance_then_id((a.0, a.1), (b.0, b.1))
    };
    if k < cands.len() {
        cands.select_nth_unstable_by(k, cmp);
        cands.truncate(k);
    }
    cands.sort_by(cmp);
    Ok(cands.into_iter().map(|(_, _, r)| r).collect())
}

/// Mean endpoint distance to the neighbors.
pub fn novelty(c: &ControllerRecord, neighbors: &[&ControllerRecord]) -> Result<f64, Error> {
    if neighbors.is_empty() {
        return Err(Error::EmptyPool);
    }
    let e = c.endpoint();
    Ok(neighbors.iter().map(|n| n.endpoint().distance(&e)).sum::<f64>() / neighbors.len() as f64)
}

/// Number of neighbors with strictly better quality.
pub fn qrank(c: &ControllerRecord, neighbors: &[&ControllerRecord]) -> usize {
    neighbors.iter().filter(|n| c.quality < n.quality).count()
}

/// Number of neighbors with strictly better estimated transferability.
pub fn trank(c: &ControllerRecord, neighbors: &[&ControllerRecord]) -> usize {
    neighbors.iter().filter(|n| c.t_hat < n.t_hat).count()
}

/// Which test admitted a replacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReplaceBranch {
    Quality,
    Transferability,
}

/// How the archive reacts to controllers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArchivePolicy {
    /// Threshold addition plus prioritized nearest replacement.
    Replacing,
    /// Threshold addition only.
    AddOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArchiveEvent {
    Added { id: u64, novelty: f64 },
    /// Both records are snapshots taken at replacement time.
    Replaced {
        old: ControllerRecord,
        new: ControllerRecord,
        branch: ReplaceBranch,
    },
}

/// Outcome of offering one controller to the archive.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UpdateReport {
    pub added: bool,
    pub replaced: Option<(u64, ReplaceBranch)>,
}

/// Replacement test between a candidate and its nearest archive member.
pub fn replacement_branch(c: &ControllerRecord, nearest: &ControllerRecord, tau: f64) -> Option<ReplaceBranch> {
    if c.t_hat > tau && c.quality > nearest.quality {
        Some(ReplaceBranch::Quality)
    } else if c.t_hat > nearest.t_hat {
        Some(ReplaceBranch::Transferability)
    } else {
        None
    }
}

/// The repertoire. Endpoints are mirrored into a flat array that serves as
/// the nearest-endpoint index and is kept in sync on every replacement.
#[derive(Clone, Debug, Default)]
pub struct Archive {
    members: Vec<ControllerRecord>,
    points: Vec<[f64; 2]>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: Vec<ControllerRecord>) -> Self {
        let points = records.iter().map(|r| [r.endpoint().x, r.endpoint().y]).collect();
        Self { members: records, points }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ControllerRecord] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &ControllerRecord> {
        self.members.iter()
    }

    pub fn endpoints(&self) -> impl Iterator<Item = Endpoint> + '_ {
        self.points.iter().map(|p| Endpoint::new(p[0], p[1]))
    }

    pub fn push(&mut self, record: ControllerRecord) {
        self.points.push([record.endpoint().x, record.endpoint().y]);
        self.members.push(record);
    }

    /// Slot of the member nearest to `e`; ties go to the smaller id.
    pub fn nearest(&self, e: Endpoint) -> Option<usize> {
        let mut best: Option<(f64, u64, usize)> = None;
        for (slot, p) in self.points.iter().enumerate() {
            let d = (p[0] - e.x).powi(2) + (p[1] - e.y).powi(2);
            let id = self.members[slot].id;
            let better = match best {
                None => true,
                Some((bd, bid, _)) => by_distance_then_id((d, id), (bd, bid)) == Ordering::Less,
            };
            if better {
                best = Some((d, id, slot));
            }
        }
        best.map(|(_, _, slot)| slot)
    }

    /// Offers `c`, whose novelty against population and archive is
    /// `novelty`, to the archive.
    pub fn update(
        &mut self,
        c: &ControllerRecord,
        novelty: f64,
        rho: f64,
        tau: f64,
        policy: ArchivePolicy,
        log: &mut Vec<ArchiveEvent>,
    ) -> UpdateReport {
        let mut report = UpdateReport::default();
        if novelty > rho {
            let mut rec = c.clone();
            rec.novelty = novelty;
            self.push(rec);
            log.push(ArchiveEvent::Added { id: c.id, novelty });
            report.added = true;
        }
        if policy == ArchivePolicy::AddOnly {
            return report;
        }
        let Some(slot) = self.nearest(c.endpoint()) else {
            return report;
        };
        if let Some(branch) = replacement_branch(c, &self.members[slot], tau) {
            let mut rec = c.clone();
            rec.novelty = novelty;
            self.points[slot] = [rec.endpoint().x, rec.endpoint().y];
            let old = std::mem::replace(&mut self.members[slot], rec.clone());
            report.replaced = Some((old.id, branch));
            log.push(ArchiveEvent::Replaced { old, new: rec, branch });
        }
        report
    }

    /// Recomputes every member's transferability estimate.
    pub fn refresh_estimates(&mut self, surrogate: &SurrogateModel) {
        for m in &mut self.members {
            m.t_hat = surrogate.predict(&m.descriptor);
        }
    }
}
