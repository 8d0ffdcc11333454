//! Open-loop periodic gait controller.
//!
//! A [`Genotype`] holds 24 quantized parameters, four per leg: the amplitude
//! and phase of the hip-yaw signal followed by the amplitude and phase of the
//! femur signal. The tibia servo always receives the negated femur signal so
//! that the tibia stays vertical.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Error;

pub const LEGS: usize = 6;
pub const GENES_PER_LEG: usize = 4;
pub const GENOTYPE_LEN: usize = LEGS * GENES_PER_LEG;
pub const JOINTS: usize = LEGS * 3;

/// Number of quantization levels: 0, 0.25, 0.5, 0.75, 1.
pub const LEVELS: u8 = 5;

/// Hip yaw deflection for a unit control signal (rad).
pub const HIP_AMPLITUDE: f64 = 0.5;
/// Femur pitch deflection for a unit control signal (rad).
pub const FEMUR_AMPLITUDE: f64 = 0.7;

/// Value of quantization level `level` (0..=4).
#[inline]
pub fn level_value(level: u8) -> f64 {
    f64::from(level) / f64::from(LEVELS - 1)
}

/// Periodic control signal `alpha * tanh(4 sin(2 pi (t + phi)))`, period 1 s.
#[inline]
pub fn gamma(t: f64, alpha: f64, phi: f64) -> f64 {
    alpha * (4.0 * (std::f64::consts::TAU * (t + phi)).sin()).tanh()
}

/// 24 quantized gait parameters, stored as level indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    levels: [u8; GENOTYPE_LEN],
}

impl Genotype {
    pub fn zero() -> Self {
        Self { levels: [0; GENOTYPE_LEN] }
    }

    pub fn from_levels(levels: [u8; GENOTYPE_LEN]) -> Result<Self, Error> {
        if let Some(bad) = levels.iter().find(|&&l| l >= LEVELS) {
            return Err(Error::InvalidGenotype(format!("level index {bad} out of range")));
        }
        Ok(Self { levels })
    }

    /// Builds a genotype from parameter values; every value must be one of
    /// the five quantized levels.
    pub fn from_values(values: &[f64]) -> Result<Self, Error> {
        if values.len() != GENOTYPE_LEN {
            return Err(Error::InvalidGenotype(format!(
                "expected {GENOTYPE_LEN} values, got {}",
                values.len()
            )));
        }
        let mut levels = [0u8; GENOTYPE_LEN];
        for (slot, &v) in levels.iter_mut().zip(values) {
            let scaled = v * f64::from(LEVELS - 1);
            let rounded = scaled.round();
            if !v.is_finite() || (scaled - rounded).abs() > 1e-9 || !(0.0..=4.0).contains(&rounded) {
                return Err(Error::InvalidGenotype(format!("{v} is not a quantized level")));
            }
            *slot = rounded as u8;
        }
        Ok(Self { levels })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut levels = [0u8; GENOTYPE_LEN];
        for l in levels.iter_mut() {
            *l = rng.gen_range(0..LEVELS);
        }
        Self { levels }
    }

    pub fn levels(&self) -> &[u8; GENOTYPE_LEN] {
        &self.levels
    }

    pub fn value(&self, index: usize) -> f64 {
        level_value(self.levels[index])
    }

    pub fn values(&self) -> [f64; GENOTYPE_LEN] {
        let mut out = [0.0; GENOTYPE_LEN];
        for (o, &l) in out.iter_mut().zip(&self.levels) {
            *o = level_value(l);
        }
        out
    }

    /// The four level indices `(alpha1, phi1, alpha2, phi2)` of `leg`.
    pub fn leg_levels(&self, leg: usize) -> [u8; GENES_PER_LEG] {
        let mut out = [0u8; GENES_PER_LEG];
        out.copy_from_slice(&self.levels[GENES_PER_LEG * leg..GENES_PER_LEG * (leg + 1)]);
        out
    }

    /// Left/right mirror image: legs `i` and `i + 3` swap and the hip phase
    /// shifts by half a period, which negates the hip-yaw signal.
    pub fn mirrored(&self) -> Self {
        let half = (LEVELS - 1) / 2;
        let mut levels = [0u8; GENOTYPE_LEN];
        for leg in 0..LEGS {
            let src = (leg + LEGS / 2) % LEGS;
            let mut genes = self.leg_levels(src);
            // phase levels live on a circle of 4 steps (level 4 == level 0)
            genes[1] = (genes[1] % (LEVELS - 1) + half) % (LEVELS - 1);
            levels[GENES_PER_LEG * leg..GENES_PER_LEG * (leg + 1)].copy_from_slice(&genes);
        }
        Self { levels }
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", level_value(l))?;
        }
        Ok(())
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidGenotype(format!("cannot parse {tok:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_values(&values)
    }
}

/// 18 joint angles (rad), leg-major, `(hip yaw, femur, tibia)` per leg.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointCommand {
    pub angles: [f64; JOINTS],
}

impl JointCommand {
    pub fn hip(&self, leg: usize) -> f64 {
        self.angles[3 * leg]
    }

    pub fn femur(&self, leg: usize) -> f64 {
        self.angles[3 * leg + 1]
    }

    pub fn tibia(&self, leg: usize) -> f64 {
        self.angles[3 * leg + 2]
    }
}

/// Joint command for one leg's parameters `(alpha1, phi1, alpha2, phi2)`.
#[inline]
pub fn leg_command(genes: [f64; GENES_PER_LEG], t: f64, hip_amp: f64, femur_amp: f64) -> [f64; 3] {
    let hip = hip_amp * gamma(t, genes[0], genes[1]);
    let femur = femur_amp * gamma(t, genes[2], genes[3]);
    [hip, femur, -femur]
}

pub fn joint_targets(g: &Genotype, t: f64) -> JointCommand {
    let values = g.values();
    let mut angles = [0.0; JOINTS];
    for leg in 0..LEGS {
        let mut genes = [0.0; GENES_PER_LEG];
        genes.copy_from_slice(&values[GENES_PER_LEG * leg..GENES_PER_LEG * (leg + 1)]);
        angles[3 * leg..3 * leg + 3]
            .copy_from_slice(&leg_command(genes, t, HIP_AMPLITUDE, FEMUR_AMPLITUDE));
    }
    JointCommand { angles }
}

/// Resamples each parameter with probability `rate`, uniformly over all five
/// levels (the redraw may return the current level).
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, rate: f64, rng: &mut R) -> Genotype {
    let mut levels = g.levels;
    for l in levels.iter_mut() {
        if rng.gen_bool(rate.clamp(0.0, 1.0)) {
            *l = rng.gen_range(0..LEVELS);
        }
    }
    Genotype { levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gamma_zero_amplitude() {
        for &t in &[0.0, 0.13, 1.7, 2.99] {
            for &phi in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                assert_eq!(gamma(t, 0.0, phi), 0.0);
            }
        }
    }

    #[test]
    fn gamma_quarter_period_peak() {
        // tanh(4) evaluated independently
        let expected = 0.999_329_299_739_067_f64;
        assert!((gamma(0.25, 1.0, 0.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn gamma_half_phase_negates() {
        for i in 0..300 {
            let t = i as f64 * 0.01;
            for a in 0..5 {
                for p in 0..5 {
                    let alpha = level_value(a);
                    let phi = level_value(p);
                    let shifted = (phi + 0.5) % 1.0;
                    assert!((gamma(t, alpha, shifted) + gamma(t, alpha, phi)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gamma_bounded_and_periodic() {
        for i in 0..=3000 {
            let t = i as f64 * 0.001;
            for a in 0..5 {
                for p in 0..5 {
                    let (alpha, phi) = (level_value(a), level_value(p));
                    let v = gamma(t, alpha, phi);
                    assert!(v.abs() <= alpha);
                    assert!((gamma(t + 1.0, alpha, phi) - v).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_genotype_commands_nothing() {
        let cmd = joint_targets(&Genotype::zero(), 1.234);
        assert!(cmd.angles.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn femur_signal_of_leg_zero() {
        let mut levels = [0u8; GENOTYPE_LEN];
        levels[2] = 2; // alpha2 = 0.5, phi2 = 0
        let g = Genotype::from_levels(levels).unwrap();
        let cmd = joint_targets(&g, 0.25);
        let expected = FEMUR_AMPLITUDE * 0.5 * 4f64.tanh();
        assert!((cmd.femur(0) - expected).abs() < 1e-12);
        assert!((cmd.tibia(0) + expected).abs() < 1e-12);
    }

    #[test]
    fn tibia_mirrors_femur() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let g = Genotype::random(&mut rng);
            let t = rng.gen_range(0.0..3.0);
            let cmd = joint_targets(&g, t);
            for leg in 0..LEGS {
                assert_eq!(cmd.tibia(leg), -cmd.femur(leg));
            }
        }
    }

    #[test]
    fn mutate_rate_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Genotype::random(&mut rng);
        assert_eq!(mutate(&g, 0.0, &mut rng), g);
    }

    #[test]
    fn mutate_is_deterministic_per_seed() {
        let g = Genotype::zero();
        let a = mutate(&g, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
        let b = mutate(&g, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        assert!(a.levels().iter().all(|&l| l < LEVELS));
    }

    #[test]
    fn mutate_change_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut g = Genotype::random(&mut rng);
        let trials = 100_000;
        let mut changed = 0usize;
        for _ in 0..trials {
            let m = mutate(&g, 0.1, &mut rng);
            changed += g.levels().iter().zip(m.levels()).filter(|(a, b)| a != b).count();
            g = m;
        }
        let freq = changed as f64 / (trials * GENOTYPE_LEN) as f64;
        assert!((freq - 0.08).abs() < 0.005, "change frequency {freq}");
    }

    #[test]
    fn text_form_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = Genotype::random(&mut rng);
        let text = g.to_string();
        assert_eq!(text.split(',').count(), GENOTYPE_LEN);
        assert_eq!(text.parse::<Genotype>().unwrap(), g);
    }

    #[test]
    fn rejects_unquantized_values() {
        let mut values = [0.0; GENOTYPE_LEN];
        values[7] = 0.3;
        assert!(Genotype::from_values(&values).is_err());
        assert!(Genotype::from_values(&values[..23]).is_err());
        assert!("0,0,0".parse::<Genotype>().is_err());
    }

    #[test]
    fn mirror_is_involution_on_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Genotype::random(&mut rng);
        let mm = g.mirrored().mirrored();
        for i in 0..GENOTYPE_LEN {
            if i % 4 == 1 {
                // phase level 4 and 0 are the same phase
                assert_eq!(mm.levels()[i] % 4, g.levels()[i] % 4);
            } else {
                assert_eq!(mm.levels()[i], g.levels()[i]);
            }
        }
    }
}
