//! WebAssembly bindings for the browser demo in `www/`. Every export returns
//! a JSON string that the page parses.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tbr_core::evolution::{AlgoParams, Evolution, Reality, Variant};
use tbr_core::gait::Genotype;
use tbr_core::geometry::{beta, curvilinear_abscissa, Endpoint, RegionOfInterest};
use tbr_core::metrics::{CellPartition, MetricGrid};
use tbr_core::sim::{simulate, PerturbationProfile, WorldParams};
use tbr_core::Error;
use wasm_bindgen::prelude::*;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Body trajectory, contacts and scores of one rollout.
pub fn replay_json(genotype: &str, real: bool) -> Result<String, Error> {
    let g: Genotype = genotype.parse()?;
    let world = if real { WorldParams::pseudo_reality(PerturbationProfile::p0())? } else { WorldParams::simulation() };
    let out = simulate(&g, &world);
    let trajectory: Vec<[f64; 3]> = out.trajectory.iter().map(|p| [p.x, p.y, p.yaw]).collect();
    let contacts: Vec<Vec<u8>> = out.contacts.iter().map(|row| row.iter().map(|&c| u8::from(c)).collect()).collect();
    let quality = tbr_core::geometry::quality(out.endpoint, out.yaw).ok();
    Ok(json!({
        "trajectory": trajectory,
        "contacts": contacts,
        "endpoint": [out.endpoint.x, out.endpoint.y],
        "yaw": out.yaw,
        "quality": quality,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn replay(genotype: &str, real: bool) -> Result<String, JsError> {
    replay_json(genotype, real).map_err(js)
}

#[wasm_bindgen]
pub fn random_genotype(seed: u32) -> String {
    Genotype::random(&mut ChaCha8Rng::seed_from_u64(u64::from(seed))).to_string()
}

/// Desired orientation, arc length, ROI membership and selection cell of a point.
#[wasm_bindgen]
pub fn probe(x: f64, y: f64) -> String {
    let e = Endpoint::new(x, y);
    let roi = RegionOfInterest::default();
    let cell = CellPartition::default().cell_of(e).map(|c| json!({"rear": c.rear, "angular": c.angular, "radial": c.radial}));
    json!({
        "beta": beta(e).ok(),
        "arc": curvilinear_abscissa(e).ok(),
        "in_roi": roi.contains(e),
        "cell": cell,
    })
    .to_string()
}

/// Stepwise repertoire evolution against the built-in pseudo-real robot.
#[wasm_bindgen]
pub struct Evolver {
    engine: Evolution,
    grid: MetricGrid,
}

impl Evolver {
    pub fn create(seed: u32, population: usize, transfers: bool) -> Result<Evolver, Error> {
        let params = AlgoParams { population_size: population, generations: usize::MAX, ..AlgoParams::default() };
        let reality: Option<Arc<dyn Reality>> = if transfers {
            Some(Arc::new(WorldParams::pseudo_reality(PerturbationProfile::p0())?))
        } else {
            None
        };
        let engine =
            Evolution::new(params, Variant::Tbr { transfers }, WorldParams::simulation(), reality, u64::from(seed))?;
        Ok(Evolver { engine, grid: MetricGrid::new(RegionOfInterest::default()) })
    }
}

#[wasm_bindgen]
impl Evolver {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, population: usize, transfers: bool) -> Result<Evolver, JsError> {
        Evolver::create(seed, population, transfers).map_err(js)
    }

    /// Runs `generations` generations and returns the current metrics.
    pub fn step(&mut self, generations: usize) -> String {
        for _ in 0..generations {
            self.engine.step();
        }
        let row = self.grid.row(self.engine.evaluations(), self.engine.archive().members());
        json!({
            "generation": self.engine.generation(),
            "evaluations": row.evaluations,
            "archive_size": row.archive_size,
            "sparseness": row.sparseness,
            "orientation_error": row.orientation_error,
            "transferable": row.transferable,
            "transfers": self.engine.transfers().len(),
        })
        .to_string()
    }

    /// Archive members as `[x, y, yaw, t_hat, quality]` rows.
    pub fn archive(&self) -> String {
        let rows: Vec<Value> =
            self.engine.archive().iter().map(|r| json!([r.endpoint().x, r.endpoint().y, r.yaw(), r.t_hat, r.quality])).collect();
        Value::Array(rows).to_string()
    }

    /// Genotype of the archive member closest to `(x, y)`, or an empty string.
    pub fn nearest_genotype(&self, x: f64, y: f64) -> String {
        let archive = self.engine.archive();
        archive.nearest(Endpoint::new(x, y)).map(|slot| archive.members()[slot].genotype.to_string()).unwrap_or_default()
    }
}
