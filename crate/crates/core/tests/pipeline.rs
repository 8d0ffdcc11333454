use std::sync::Arc;

use tbr_core::evolution::{run_tbr, AlgoParams, Reality};
use tbr_core::io::{read_archive, write_archive};
use tbr_core::metrics::{select_30, transfer_eval, CellPartition};
use tbr_core::sim::{PerturbationProfile, WorldParams};

fn params() -> AlgoParams {
    AlgoParams { population_size: 40, generations: 120, transfer_period: 20, ..AlgoParams::default() }
}

#[test]
fn evolve_persist_select_and_transfer() {
    let sim = WorldParams::simulation();
    let real = WorldParams::pseudo_reality(PerturbationProfile::p0()).unwrap();
    let reality: Arc<dyn Reality> = Arc::new(real.clone());
    let out = run_tbr(&params(), &sim, Some(reality), 3, true).unwrap();
    assert_eq!(out.evaluations, 40 * 120);
    assert_eq!(out.transfers.len(), 6);
    assert!(out.surrogate.is_fitted());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/archive.csv");
    write_archive(&path, "tbr", out.archive.members()).unwrap();
    let back: Vec<_> = read_archive(&path).unwrap().iter().map(|r| r.to_record(&sim).unwrap()).collect();
    assert_eq!(back.len(), out.archive.len());
    for (a, b) in back.iter().zip(out.archive.iter()) {
        assert_eq!((a.id, a.genotype, a.endpoint()), (b.id, b.genotype, b.endpoint()));
        assert_eq!(a.t_hat, b.t_hat);
    }

    let picks: Vec<_> = select_30(&back, &CellPartition::default()).into_iter().map(|(_, r)| r).collect();
    assert!(!picks.is_empty() && picks.len() <= 30);
    let eval = transfer_eval(&picks, &real);
    assert_eq!(eval.accuracies.len(), picks.len());
    let q = eval.summary.unwrap();
    assert!(0.0 <= q.q1 && q.q1 <= q.median && q.median <= q.q3);
}

#[test]
fn same_seed_same_repertoire() {
    let sim = WorldParams::simulation();
    let a = run_tbr(&params(), &sim, None, 8, false).unwrap();
    let b = run_tbr(&params(), &sim, None, 8, false).unwrap();
    assert!(a.transfers.is_empty());
    let key = |o: &tbr_core::evolution::RunOutput| o.archive.iter().map(|r| (r.id, r.genotype)).collect::<Vec<_>>();
    assert_eq!(key(&a), key(&b));
}
