//! Transferability surrogate.
//!
//! Controllers are described by their per-tick foot-contact pattern. A ridge
//! regressor with an unpenalized intercept maps that pattern to the
//! transferability measured on the few controllers actually transferred.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::gait::{Genotype, LEGS};
use crate::geometry::Endpoint;
use crate::sim::{SimOutcome, TICKS};

pub const DESCRIPTOR_LEN: usize = TICKS * LEGS;

/// Ridge penalty on the descriptor weights.
pub const RIDGE_LAMBDA: f64 = 1e-3;

/// Flattened tick-major contact matrix; bit `LEGS * t + leg` is 1 when the
/// leg is in stance at tick `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Descriptor {
    bits: Box<[u8]>,
}

impl Descriptor {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, Error> {
        if bits.len() != DESCRIPTOR_LEN {
            return Err(Error::DimensionMismatch { expected: DESCRIPTOR_LEN, got: bits.len() });
        }
        Ok(Self { bits: bits.into_iter().map(|b| u8::from(b != 0)).collect() })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn as_f64(&self) -> impl Iterator<Item = f64> + '_ {
        self.bits.iter().map(|&b| f64::from(b))
    }
}

pub fn descriptor_of(outcome: &SimOutcome) -> Result<Descriptor, Error> {
    if outcome.contacts.len() != TICKS {
        return Err(Error::DimensionMismatch { expected: TICKS, got: outcome.contacts.len() });
    }
    let bits = outcome.contacts.iter().flat_map(|row| row.iter().map(|&c| u8::from(c))).collect();
    Ok(Descriptor { bits })
}

/// One controller executed on the (pseudo-)real robot.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferRecord {
    pub genotype: Genotype,
    pub descriptor: Descriptor,
    pub sim_endpoint: Endpoint,
    pub real_endpoint: Endpoint,
    /// `-|E_simu - E_real|` (m).
    pub score: f64,
}

impl TransferRecord {
    pub fn new(genotype: Genotype, simu: &SimOutcome, real: &SimOutcome) -> Result<Self, Error> {
        Ok(Self {
            genotype,
            descriptor: descriptor_of(simu)?,
            sim_endpoint: simu.endpoint,
            real_endpoint: real.endpoint,
            score: crate::sim::transferability_score(simu, real),
        })
    }
}

/// Linear transferability estimator. Unfitted models predict 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurrogateModel {
    weights: Vec<f64>,
    intercept: f64,
    training: Vec<TransferRecord>,
    fitted: bool,
}

impl SurrogateModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_fitted(&self) -> bool {
        self.fitted
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn training_set(&self) -> &[TransferRecord] {
        &self.training
    }

    /// Refits on `records`, returning a new model. With an empty record list
    /// the result is unfitted.
    ///
    /// Solved in the dual: with centered descriptors `X` and centered scores
    /// `y`, `w = X^T (X X^T + lambda I)^-1 y` and the intercept restores the
    /// means. The system is `n x n` for `n` transfers, which stays tiny.
    pub fn fit(&self, records: &[TransferRecord]) -> SurrogateModel {
        let n = records.len();
        if n == 0 {
            return SurrogateModel::default();
        }
        let mut mean_x = vec![0.0; DESCRIPTOR_LEN];
        for r in records {
            for (m, b) in mean_x.iter_mut().zip(r.descriptor.as_f64()) {
                *m += b;
            }
        }
        mean_x.iter_mut().for_each(|m| *m /= n as f64);
        let mean_y = records.iter().map(|r| r.score).sum::<f64>() / n as f64;

        let centered = DMatrix::from_fn(n, DESCRIPTOR_LEN, |i, j| {
            f64::from(records[i].descriptor.bits[j]) - mean_x[j]
        });
        let y = DVector::from_fn(n, |i, _| records[i].score - mean_y);
        let mut gram = &centered * centered.transpose();
        for i in 0..n {
            gram[(i, i)] += RIDGE_LAMBDA;
        }
        let dual = match gram.clone().cholesky() {
            Some(chol) => chol.solve(&y),
            None => gram.lu().solve(&y).unwrap_or_else(|| DVector::zeros(n)),
        };
        let w = centered.transpose() * dual;
        let weights: Vec<f64> = w.iter().copied().collect();
        let intercept = mean_y - weights.iter().zip(&mean_x).map(|(w, m)| w * m).sum::<f64>();
        SurrogateModel { weights, intercept, training: records.to_vec(), fitted: true }
    }

    pub fn predict(&self, d: &Descriptor) -> f64 {
        if !self.fitted {
            return 0.0;
        }
        self.intercept + self.weights.iter().zip(d.bits.iter()).filter(|(_, &b)| b != 0).map(|(w, _)| w).sum::<f64>()
    }

    /// Affine prediction on a real-valued relaxation of the descriptor.
    pub fn predict_relaxed(&self, x: &[f64]) -> f64 {
        if !self.fitted {
            return 0.0;
        }
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Mean squared error on the training set.
    pub fn training_mse(&self) -> f64 {
        if self.training.is_empty() {
            return 0.0;
        }
        self.training.iter().map(|r| (self.predict(&r.descriptor) - r.score).powi(2)).sum::<f64>()
            / self.training.len() as f64
    }
}
