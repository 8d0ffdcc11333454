//! Fast non-dominated sorting, crowding distance and the selection
//! operators of NSGA-II. Every objective is maximized.

use std::cmp::Ordering;

use rand::Rng;

/// `a` dominates `b`: no worse on every objective, strictly better on one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    /// Front index of each individual (0 is the Pareto front).
    pub rank: Vec<usize>,
    /// Crowding distance within the individual's front.
    pub crowding: Vec<f64>,
    /// Members of each front, in ascending index order.
    pub fronts: Vec<Vec<usize>>,
}

impl Ranking {
    /// Selection order: lower front first, then larger crowding, then lower index.
    pub fn compare(&self, a: usize, b: usize) -> Ordering {
        self.rank[a]
            .cmp(&self.rank[b])
            .then_with(|| self.crowding[b].partial_cmp(&self.crowding[a]).unwrap_or(Ordering::Equal))
            .then_with(|| a.cmp(&b))
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }
}

pub fn nondominated_sort<O: AsRef<[f64]>>(objectives: &[O]) -> Ranking {
    let n = objectives.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (objectives[i].as_ref(), objectives[j].as_ref());
            if dominates(a, b) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(b, a) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut rank = vec![0usize; n];
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = fronts.len();
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }

    let mut crowding = vec![0.0; n];
    for front in &fronts {
        assign_crowding(objectives, front, &mut crowding);
    }
    Ranking { rank, crowding, fronts }
}

fn assign_crowding<O: AsRef<[f64]>>(objectives: &[O], front: &[usize], crowding: &mut [f64]) {
    if front.len() <= 2 {
        for &i in front {
            crowding[i] = f64::INFINITY;
        }
        return;
    }
    let m = objectives[front[0]].as_ref().len();
    let mut order = front.to_vec();
    for k in 0..m {
        let value = |i: usize| objectives[i].as_ref()[k];
        order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        let (lo, hi) = (value(order[0]), value(order[order.len() - 1]));
        crowding[order[0]] = f64::INFINITY;
        crowding[order[order.len() - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..order.len() - 1 {
            let i = order[w];
            if crowding[i].is_finite() {
                crowding[i] += (value(order[w + 1]) - value(order[w - 1])) / span;
            }
        }
    }
}

/// (mu + lambda) truncation: whole fronts while they fit, then the most
/// isolated members of the first front that does not.
pub fn select_survivors(ranking: &Ranking, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    for front in &ranking.fronts {
        if out.len() + front.len() <= count {
            out.extend_from_slice(front);
        } else {
            let mut rest = front.clone();
            rest.sort_by(|&a, &b| ranking.compare(a, b));
            out.extend(rest.into_iter().take(count - out.len()));
        }
        if out.len() == count {
            break;
        }
    }
    out
}

/// Binary tournament on the crowded-comparison order.
pub fn tournament<R: Rng + ?Sized>(ranking: &Ranking, rng: &mut R) -> usize {
    let a = rng.gen_range(0..ranking.len());
    let b = rng.gen_range(0..ranking.len());
    if ranking.compare(a, b) == Ordering::Greater {
        b
    } else {
        a
    }
}
