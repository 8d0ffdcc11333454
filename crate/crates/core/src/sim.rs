//! Stance-anchored kinematic hexapod simulator.
//!
//! Each tick the controller's joint command places every foot tip in the
//! body frame. A foot whose analytic height is at or below the ground is in
//! stance; when it touches down its world position is pinned. The body pose
//! for the next tick is the planar rigid transform that best keeps the
//! pinned feet in place (2-D orthogonal Procrustes). There is no slip model
//! and no dynamics, so rollouts are pure functions of the genotype and the
//! world.
//!
//! The pseudo-reality used in place of a physical robot is the same model
//! with a [`PerturbationProfile`] applied: scaled femur lengths, scaled femur
//! deflections and a shifted contact height.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gait::{self, Genotype, JointCommand, GENES_PER_LEG, LEGS, LEVELS};
use crate::geometry::{wrap, Endpoint};

pub const TICK: f64 = 0.03;
pub const EPISODE: f64 = 3.0;
/// Control ticks per rollout.
pub const TICKS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry {
    /// Hip position in the body frame (m).
    pub hip: [f64; 2],
    /// Mounting yaw of the leg in the body frame (rad).
    pub mount_yaw: f64,
    pub coxa: f64,
    pub femur: f64,
    pub tibia: f64,
    /// Multiplier on the commanded femur angle.
    pub femur_gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub legs: [LegGeometry; LEGS],
    pub body_height: f64,
    pub hip_amplitude: f64,
    pub femur_amplitude: f64,
}

impl RobotModel {
    /// Symmetric nominal hexapod. Legs 0..3 are front-, mid- and rear-left;
    /// leg `i + 3` mirrors leg `i` on the right side.
    pub fn nominal() -> Self {
        let left = [([0.10, 0.06], 60f64), ([0.0, 0.08], 90.0), ([-0.10, 0.06], 120.0)];
        let mk = |hip: [f64; 2], yaw_deg: f64| LegGeometry {
            hip,
            mount_yaw: yaw_deg.to_radians(),
            coxa: 0.06,
            femur: 0.09,
            tibia: 0.12,
            femur_gain: 1.0,
        };
        let mut legs = [mk([0.0, 0.0], 0.0); LEGS];
        for (i, &(hip, yaw)) in left.iter().enumerate() {
            legs[i] = mk(hip, yaw);
            legs[i + 3] = mk([hip[0], -hip[1]], -yaw);
        }
        Self {
            legs,
            body_height: 0.10,
            hip_amplitude: gait::HIP_AMPLITUDE,
            femur_amplitude: gait::FEMUR_AMPLITUDE,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        for (i, leg) in self.legs.iter().enumerate() {
            if !(positive(leg.coxa) && positive(leg.femur) && positive(leg.tibia)) {
                return Err(Error::Config(format!("leg {i}: segment lengths must be positive")));
            }
        }
        if !positive(self.body_height) {
            return Err(Error::Config("body height must be positive".into()));
        }
        Ok(())
    }

    /// The model seen through a perturbation profile.
    pub fn perturbed(&self, profile: &PerturbationProfile) -> Self {
        let mut out = self.clone();
        for (leg, geo) in out.legs.iter_mut().enumerate() {
            geo.femur *= profile.femur_scale[leg];
            geo.femur_gain *= profile.amp2_scale[leg];
        }
        out.body_height += profile.dh;
        out
    }
}

/// Reality-gap profile. The identity profile is plain simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationProfile {
    pub femur_scale: [f64; LEGS],
    pub amp2_scale: [f64; LEGS],
    pub dh: f64,
}

impl PerturbationProfile {
    pub fn identity() -> Self {
        Self { femur_scale: [1.0; LEGS], amp2_scale: [1.0; LEGS], dh: 0.0 }
    }

    /// Default pseudo-reality profile.
    pub fn p0() -> Self {
        Self {
            femur_scale: [0.95, 1.06, 0.92, 1.03, 0.97, 1.08],
            amp2_scale: [1.0, 0.9, 1.0, 1.05, 0.95, 1.0],
            dh: 0.005,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let profile: Self = serde_json::from_str(text)?;
        let finite = profile.femur_scale.iter().chain(&profile.amp2_scale).all(|v| v.is_finite() && *v > 0.0);
        if !finite || !profile.dh.is_finite() {
            return Err(Error::Config("perturbation scales must be positive and finite".into()));
        }
        Ok(profile)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl Pose {
    /// Maps a body-frame point to the world frame.
    #[inline]
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.yaw.sin_cos();
        [self.x + c * p[0] - s * p[1], self.y + s * p[0] + c * p[1]]
    }
}

/// Body-frame planar tip position and raw tip height of `leg`.
pub fn leg_tip(model: &RobotModel, leg: usize, command: &JointCommand) -> ([f64; 2], f64) {
    let geo = &model.legs[leg];
    let yaw = geo.mount_yaw + command.hip(leg);
    let pitch = geo.femur_gain * command.femur(leg);
    let (sp, cp) = pitch.sin_cos();
    let reach = geo.coxa + geo.femur * cp;
    let (sy, cy) = yaw.sin_cos();
    let tip = [geo.hip[0] + reach * cy, geo.hip[1] + reach * sy];
    (tip, model.body_height + geo.femur * sp - geo.tibia)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct TipSample {
    tip: [f64; 2],
    stance: bool,
}

const LEG_CODES: usize = (LEVELS as usize).pow(GENES_PER_LEG as u32);

/// Precomputed foot tips for every quantized leg parameter combination and
/// every tick boundary. Because genes are quantized, each leg's trajectory
/// depends on only 625 possible parameter tuples.
struct TipTable {
    samples: Vec<TipSample>,
}

impl TipTable {
    fn build(model: &RobotModel, ticks: usize, dt: f64) -> Self {
        let mut samples = Vec::with_capacity(LEGS * LEG_CODES * (ticks + 1));
        for leg in 0..LEGS {
            for code in 0..LEG_CODES {
                let genes = decode_leg(code);
                for tick in 0..=ticks {
                    let t = tick as f64 * dt;
                    let cmd = single_leg_command(model, leg, genes, t);
                    let (tip, height) = leg_tip(model, leg, &cmd);
                    samples.push(TipSample { tip, stance: height <= 0.0 });
                }
            }
        }
        Self { samples }
    }

    #[inline]
    fn get(&self, ticks: usize, leg: usize, code: usize, tick: usize) -> TipSample {
        self.samples[(leg * LEG_CODES + code) * (ticks + 1) + tick]
    }
}

fn decode_leg(mut code: usize) -> [f64; GENES_PER_LEG] {
    let mut genes = [0.0; GENES_PER_LEG];
    for g in genes.iter_mut().rev() {
        *g = gait::level_value((code % LEVELS as usize) as u8);
        code /= LEVELS as usize;
    }
    genes
}

fn encode_leg(levels: [u8; GENES_PER_LEG]) -> usize {
    levels.iter().fold(0, |acc, &l| acc * LEVELS as usize + l as usize)
}

fn single_leg_command(model: &RobotModel, leg: usize, genes: [f64; GENES_PER_LEG], t: f64) -> JointCommand {
    let mut angles = [0.0; gait::JOINTS];
    angles[3 * leg..3 * leg + 3]
        .copy_from_slice(&gait::leg_command(genes, t, model.hip_amplitude, model.femur_amplitude));
    JointCommand { angles }
}

/// Full joint command of `g` at time `t` under the model's joint amplitudes.
pub fn model_command(model: &RobotModel, g: &Genotype, t: f64) -> JointCommand {
    let values = g.values();
    let mut angles = [0.0; gait::JOINTS];
    for leg in 0..LEGS {
        let mut genes = [0.0; GENES_PER_LEG];
        genes.copy_from_slice(&values[GENES_PER_LEG * leg..GENES_PER_LEG * (leg + 1)]);
        angles[3 * leg..3 * leg + 3]
            .copy_from_slice(&gait::leg_command(genes, t, model.hip_amplitude, model.femur_amplitude));
    }
    JointCommand { angles }
}

/// A simulated world: robot model, timing and perturbation profile. Cheap to
/// clone and shareable across threads.
#[derive(Clone)]
pub struct WorldParams {
    nominal: RobotModel,
    profile: PerturbationProfile,
    effective: RobotModel,
    dt: f64,
    ticks: usize,
    table: Arc<TipTable>,
}

impl fmt::Debug for WorldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WorldParams")
            .field("model", &self.nominal)
            .field("profile", &self.profile)
            .field("dt", &self.dt)
            .field("ticks", &self.ticks)
            .finish()
    }
}

impl WorldParams {
    pub fn new(model: RobotModel, profile: PerturbationProfile) -> Result<Self, Error> {
        model.validate()?;
        let effective = model.perturbed(&profile);
        effective.validate()?;
        let table = Arc::new(TipTable::build(&effective, TICKS, TICK));
        Ok(Self { nominal: model, profile, effective, dt: TICK, ticks: TICKS, table })
    }

    /// Nominal model, identity profile.
    pub fn simulation() -> Self {
        Self::new(RobotModel::nominal(), PerturbationProfile::identity()).expect("nominal model is valid")
    }

    /// Nominal model seen through `profile`.
    pub fn pseudo_reality(profile: PerturbationProfile) -> Result<Self, Error> {
        Self::new(RobotModel::nominal(), profile)
    }

    pub fn model(&self) -> &RobotModel {
        &self.nominal
    }

    /// The model with the perturbation profile applied.
    pub fn effective_model(&self) -> &RobotModel {
        &self.effective
    }

    pub fn profile(&self) -> &PerturbationProfile {
        &self.profile
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn ticks(&self) -> usize {
        self.ticks
    }

    pub fn episode(&self) -> f64 {
        self.ticks as f64 * self.dt
    }

    /// Body-frame tip of `leg` and whether it is in stance at tick `tick`.
    pub fn tip(&self, g: &Genotype, leg: usize, tick: usize) -> ([f64; 2], bool) {
        let s = self.table.get(self.ticks, leg, encode_leg(g.leg_levels(leg)), tick);
        (s.tip, s.stance)
    }
}

/// Legs whose tip is at or below the ground under `world`'s profile.
pub fn stance_set(world: &WorldParams, command: &JointCommand) -> Vec<usize> {
    (0..LEGS)
        .filter(|&leg| leg_tip(world.effective_model(), leg, command).1 <= 0.0)
        .collect()
}

/// Least-squares planar rigid update. Each anchor pairs a body-frame tip with
/// the world point it must stay on. One anchor only translates; none keeps
/// the pose.
pub fn step_body(pose: Pose, anchors: &[([f64; 2], [f64; 2])]) -> Pose {
    match anchors.len() {
        0 => pose,
        1 => {
            let (tip, world) = anchors[0];
            let (s, c) = pose.yaw.sin_cos();
            Pose {
                x: world[0] - (c * tip[0] - s * tip[1]),
                y: world[1] - (s * tip[0] + c * tip[1]),
                yaw: pose.yaw,
            }
        }
        n => {
            let inv = 1.0 / n as f64;
            let mut bc = [0.0; 2];
            let mut ac = [0.0; 2];
            for (b, a) in anchors {
                bc[0] += b[0];
                bc[1] += b[1];
                ac[0] += a[0];
                ac[1] += a[1];
            }
            bc = [bc[0] * inv, bc[1] * inv];
            ac = [ac[0] * inv, ac[1] * inv];
            let (mut dot, mut cross) = (0.0, 0.0);
            for (b, a) in anchors {
                let (bx, by) = (b[0] - bc[0], b[1] - bc[1]);
                let (ax, ay) = (a[0] - ac[0], a[1] - ac[1]);
                dot += bx * ax + by * ay;
                cross += bx * ay - by * ax;
            }
            let yaw = if dot == 0.0 && cross == 0.0 {
                pose.yaw
            } else {
                // keep the heading continuous across the +-pi seam
                pose.yaw + wrap(cross.atan2(dot) - pose.yaw)
            };
            let (s, c) = yaw.sin_cos();
            Pose {
                x: ac[0] - (c * bc[0] - s * bc[1]),
                y: ac[1] - (s * bc[0] + c * bc[1]),
                yaw,
            }
        }
    }
}

/// Sum of squared distances between transformed tips and their anchors.
pub fn anchor_residual(pose: &Pose, anchors: &[([f64; 2], [f64; 2])]) -> f64 {
    anchors
        .iter()
        .map(|(b, a)| {
            let w = pose.apply(*b);
            (w[0] - a[0]).powi(2) + (w[1] - a[1]).powi(2)
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub endpoint: Endpoint,
    /// Final yaw wrapped to `(-pi, pi]`.
    pub yaw: f64,
    /// Stance membership for ticks `0..N`, one row per tick.
    pub contacts: Vec<[bool; LEGS]>,
    /// `N + 1` body poses; the heading is unwrapped.
    pub trajectory: Vec<Pose>,
}

/// Rolls `g` out for one episode.
pub fn simulate(g: &Genotype, world: &WorldParams) -> SimOutcome {
    let ticks = world.ticks;
    let codes: [usize; LEGS] = std::array::from_fn(|leg| encode_leg(g.leg_levels(leg)));
    let sample = |leg: usize, tick: usize| world.table.get(ticks, leg, codes[leg], tick);

    let mut pose = Pose::default();
    let mut trajectory = Vec::with_capacity(ticks + 1);
    let mut contacts = Vec::with_capacity(ticks);
    trajectory.push(pose);

    let mut anchor: [Option<[f64; 2]>; LEGS] = [None; LEGS];
    let mut stance = [false; LEGS];
    for leg in 0..LEGS {
        let s = sample(leg, 0);
        stance[leg] = s.stance;
        if s.stance {
            anchor[leg] = Some(pose.apply(s.tip));
        }
    }
    contacts.push(stance);

    let mut pairs: Vec<([f64; 2], [f64; 2])> = Vec::with_capacity(LEGS);
    for tick in 1..=ticks {
        let now: [TipSample; LEGS] = std::array::from_fn(|leg| sample(leg, tick));
        pairs.clear();
        for leg in 0..LEGS {
            if let (true, Some(a)) = (now[leg].stance, anchor[leg]) {
                pairs.push((now[leg].tip, a));
            }
        }
        pose = step_body(pose, &pairs);
        for leg in 0..LEGS {
            anchor[leg] = match (now[leg].stance, anchor[leg]) {
                (false, _) => None,
                (true, Some(a)) => Some(a),
                (true, None) => Some(pose.apply(now[leg].tip)),
            };
            stance[leg] = now[leg].stance;
        }
        if tick < ticks {
            contacts.push(stance);
        }
        trajectory.push(pose);
    }

    let start = trajectory[0];
    SimOutcome {
        endpoint: Endpoint::new(pose.x - start.x, pose.y - start.y),
        yaw: wrap(pose.yaw),
        contacts,
        trajectory,
    }
}

/// `-|E_simu - E_real|` in meters.
pub fn transferability_score(simu: &SimOutcome, real: &SimOutcome) -> f64 {
    -simu.endpoint.distance(&real.endpoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_pose(rng: &mut ChaCha8Rng) -> Pose {
        Pose { x: rng.gen_range(-1.0..1.0), y: rng.gen_range(-1.0..1.0), yaw: rng.gen_range(-PI..PI) }
    }

    #[test]
    fn nominal_model_is_mirror_symmetric() {
        let m = RobotModel::nominal();
        for i in 0..3 {
            let (l, r) = (m.legs[i], m.legs[i + 3]);
            assert_eq!(l.hip[0], r.hip[0]);
            assert_eq!(l.hip[1], -r.hip[1]);
            assert_eq!(l.mount_yaw, -r.mount_yaw);
        }
        assert!(m.validate().is_ok());
    }

    #[test]
    fn zero_command_tip_of_mid_left_leg() {
        let m = RobotModel::nominal();
        let cmd = JointCommand { angles: [0.0; gait::JOINTS] };
        let (tip, height) = leg_tip(&m, 1, &cmd);
        assert!(tip[0].abs() < 1e-15);
        assert!((tip[1] - (0.08 + 0.06 + 0.09)).abs() < 1e-15);
        assert!((height - (0.10 - 0.12)).abs() < 1e-15);
    }

    #[test]
    fn femur_pitch_sets_height() {
        let m = RobotModel::nominal();
        let mut cmd = JointCommand { angles: [0.0; gait::JOINTS] };
        assert!((leg_tip(&m, 0, &cmd).1 + 0.02).abs() < 1e-12);
        cmd.angles[1] = PI / 2.0;
        cmd.angles[2] = -PI / 2.0;
        assert!((leg_tip(&m, 0, &cmd).1 - 0.07).abs() < 1e-12);
    }

    #[test]
    fn stance_set_examples() {
        let sim = WorldParams::simulation();
        let mut cmd = JointCommand { angles: [0.0; gait::JOINTS] };
        assert_eq!(stance_set(&sim, &cmd), vec![0, 1, 2, 3, 4, 5]);
        cmd.angles[1] = 0.6;
        cmd.angles[2] = -0.6;
        assert_eq!(stance_set(&sim, &cmd), vec![1, 2, 3, 4, 5]);
        // dh is added to the body height: +3 cm lifts every idle foot to +1 cm
        let zero = JointCommand { angles: [0.0; gait::JOINTS] };
        let raised = PerturbationProfile { dh: 0.03, ..PerturbationProfile::identity() };
        let world = WorldParams::new(RobotModel::nominal(), raised).unwrap();
        assert!((leg_tip(world.effective_model(), 0, &zero).1 - 0.01).abs() < 1e-12);
        assert!(stance_set(&world, &zero).is_empty());
        let lowered = PerturbationProfile { dh: -0.03, ..PerturbationProfile::identity() };
        let world = WorldParams::new(RobotModel::nominal(), lowered).unwrap();
        assert_eq!(stance_set(&world, &zero).len(), 6);
    }

    #[test]
    fn table_matches_direct_kinematics() {
        let world = WorldParams::pseudo_reality(PerturbationProfile::p0()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let g = Genotype::random(&mut rng);
            let tick = rng.gen_range(0..=TICKS);
            let cmd = model_command(world.effective_model(), &g, tick as f64 * TICK);
            let stance = stance_set(&world, &cmd);
            for leg in 0..LEGS {
                let (tip, s) = world.tip(&g, leg, tick);
                let (direct, height) = leg_tip(world.effective_model(), leg, &cmd);
                assert_eq!(tip, direct);
                assert_eq!(s, height <= 0.0);
                assert_eq!(s, stance.contains(&leg));
            }
        }
    }

    #[test]
    fn step_body_without_residual_keeps_pose() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let pose = rand_pose(&mut rng);
            let anchors: Vec<_> = (0..4)
                .map(|_| {
                    let b = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
                    (b, pose.apply(b))
                })
                .collect();
            let next = step_body(pose, &anchors);
            assert!((next.x - pose.x).abs() < 1e-12);
            assert!((next.y - pose.y).abs() < 1e-12);
            assert!((next.yaw - pose.yaw).abs() < 1e-12);
        }
    }

    #[test]
    fn step_body_pure_translation() {
        let pose = Pose::default();
        // world anchors fixed; tips moved 1 cm backward in the body frame
        let anchors = [([0.19, 0.11], [0.20, 0.11]), ([-0.09, -0.2], [-0.08, -0.2])];
        let next = step_body(pose, &anchors);
        assert!((next.x - 0.01).abs() < 1e-12);
        assert!(next.y.abs() < 1e-12);
        assert!(next.yaw.abs() < 1e-12);
    }

    #[test]
    fn step_body_degenerate_cases() {
        let pose = Pose { x: 0.1, y: -0.2, yaw: 0.3 };
        assert_eq!(step_body(pose, &[]), pose);
        let one = [([0.1, 0.0], [0.5, 0.5])];
        let next = step_body(pose, &one);
        assert_eq!(next.yaw, pose.yaw);
        assert!(anchor_residual(&next, &one) < 1e-24);
    }

    #[test]
    fn step_body_beats_random_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let anchors: Vec<_> = (0..5)
                .map(|_| {
                    (
                        [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
                        [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)],
                    )
                })
                .collect();
            let best = step_body(rand_pose(&mut rng), &anchors);
            let r = anchor_residual(&best, &anchors);
            for _ in 0..10_000 {
                let cand = rand_pose(&mut rng);
                assert!(r <= anchor_residual(&cand, &anchors) + 1e-15);
            }
        }
    }

    #[test]
    fn zero_genotype_stands_still() {
        let out = simulate(&Genotype::zero(), &WorldParams::simulation());
        assert_eq!(out.endpoint, Endpoint::new(0.0, 0.0));
        assert_eq!(out.yaw, 0.0);
        assert_eq!(out.contacts.len(), TICKS);
        assert_eq!(out.trajectory.len(), TICKS + 1);
        assert!(out.contacts.iter().all(|row| row.iter().all(|&c| c)));
        assert!(out.trajectory.iter().all(|p| *p == Pose::default()));
    }

    #[test]
    fn rollouts_are_deterministic() {
        let world = WorldParams::simulation();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let g = Genotype::random(&mut rng);
            assert_eq!(simulate(&g, &world), simulate(&g, &world));
        }
    }

    #[test]
    fn endpoint_is_final_minus_initial_position() {
        let world = WorldParams::simulation();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Genotype::random(&mut rng);
        let out = simulate(&g, &world);
        let last = out.trajectory[TICKS];
        assert_eq!(out.endpoint, Endpoint::new(last.x, last.y));
        assert_eq!(out.yaw, wrap(last.yaw));
    }

    #[test]
    fn mirrored_genotype_mirrors_outcome() {
        let world = WorldParams::simulation();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let g = Genotype::random(&mut rng);
            let a = simulate(&g, &world);
            let b = simulate(&g.mirrored(), &world);
            assert!((a.endpoint.x - b.endpoint.x).abs() < 1e-9);
            assert!((a.endpoint.y + b.endpoint.y).abs() < 1e-9);
            assert!(wrap(a.yaw + b.yaw).abs() < 1e-9);
        }
    }

    #[test]
    fn transferability_examples() {
        let mk = |x, y| SimOutcome { endpoint: Endpoint::new(x, y), yaw: 0.0, contacts: vec![], trajectory: vec![] };
        let (a, b) = (mk(0.3, 0.1), mk(0.25, 0.1));
        assert!((transferability_score(&a, &b) + 0.05).abs() < 1e-12);
        assert_eq!(transferability_score(&a, &b), transferability_score(&b, &a));
        assert_eq!(transferability_score(&a, &a), 0.0);
    }

    #[test]
    fn profile_json_parses() {
        let p = PerturbationProfile::from_json(
            r#"{"femur_scale":[1,1,1,1,1,1],"amp2_scale":[1,1,1,1,1,1],"dh":0.0}"#,
        )
        .unwrap();
        assert!(p.is_identity());
        assert!(PerturbationProfile::from_json(r#"{"femur_scale":[1,1,1],"amp2_scale":[1,1,1,1,1,1],"dh":0}"#).is_err());
        assert!(PerturbationProfile::from_json(r#"{"femur_scale":[1,1,1,1,1,1],"amp2_scale":[1,1,1,1,1,1],"dh":0,"x":1}"#).is_err());
    }
}
