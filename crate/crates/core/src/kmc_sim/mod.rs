//! Kinetic Monte Carlo for ± radicals diffusing in a periodic cube.
//!
//! Each step runs diffuse → find_encounters → resolve_encounter → generate.
//! Spin outcomes come from a dedicated random stream that is drawn exactly
//! once per accepted encounter; everything else (motion, acceptance,
//! generation) uses a second stream. Because the registry never feeds back
//! into positions, the two swap modes produce identical trajectories from the
//! same seed and differ only in their spin bookkeeping.

pub mod cells;
pub mod particles;
pub mod registry;
pub mod tally;

pub use cells::{brute_force_candidates, encounter_candidates, find_encounters, greedy_match, Encounter};
pub use particles::{diffuse, periodic_delta, periodic_distance2, wrap, Charge, Radical};
pub use registry::{CorrelationRegistry, Membership, PairRecord};
pub use tally::{EncounterClass, RecombinationEvent, RecombinationTally, SpinOutcome};

use crate::form_factor::FormFactor;
use crate::spin_algebra::xi_of_index;
use crate::SwapMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmcError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("radical {0} is not alive")]
    DeadRadical(u64),
    #[error("registry inconsistency: {0}")]
    Registry(String),
}

/// How the N₀ initial pairs start out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Geminate pairs separated according to w, entered in the registry.
    #[default]
    Correlated,
    /// Same geometry as `Correlated`, but every radical is partnerless.
    Scrambled,
    /// Independent uniform positions, every radical partnerless.
    Uncorrelated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Side L of the periodic cube.
    pub box_side: f64,
    pub initial_pairs: usize,
    #[serde(default)]
    pub initial_state: InitialState,
    /// Contact distance R.
    pub reaction_radius: f64,
    /// Acceptance probability p_r per contact per step.
    pub reaction_probability: f64,
    pub diff_plus: f64,
    pub diff_minus: f64,
    /// Pair generation rates per unit volume and time.
    pub gamma_singlet: f64,
    pub gamma_triplet: f64,
    pub form_factor: FormFactor,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub swap_mode: SwapMode,
    /// Spacing of the time-series samples.
    pub sample_interval: f64,
    /// Keep the full event log.
    #[serde(default)]
    pub record_events: bool,
    /// Stop at the end of the step on which this many events are reached.
    #[serde(default)]
    pub max_events: Option<u64>,
    /// Test hook: singlet probability of cross and partnerless encounters in
    /// classical-reset mode, replacing 1/4.
    #[serde(default)]
    pub reset_singlet_probability: Option<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), KmcError> {
        let bad = |msg: String| Err(KmcError::Config(msg));
        let positive = [
            ("box_side", self.box_side),
            ("reaction_radius", self.reaction_radius),
            ("dt", self.dt),
            ("sample_interval", self.sample_interval),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let nonneg = [
            ("diff_plus", self.diff_plus),
            ("diff_minus", self.diff_minus),
            ("gamma_singlet", self.gamma_singlet),
            ("gamma_triplet", self.gamma_triplet),
            ("t_end", self.t_end),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.reaction_probability > 0.0 && self.reaction_probability <= 1.0) {
            return bad(format!(
                "reaction_probability must lie in (0, 1], got {}",
                self.reaction_probability
            ));
        }
        if self.reaction_radius >= self.box_side / 4.0 {
            return bad(format!(
                "reaction_radius {} must be below box_side/4 = {}",
                self.reaction_radius,
                self.box_side / 4.0
            ));
        }
        let rms = (6.0 * self.diff_plus.max(self.diff_minus) * self.dt).sqrt();
        if rms >= self.reaction_radius / 2.0 {
            return bad(format!(
                "rms step {rms} must be below reaction_radius/2 = {}",
                self.reaction_radius / 2.0
            ));
        }
        if !self.form_factor.is_valid() {
            return bad(format!("form factor {:?}", self.form_factor));
        }
        if let Some(p) = self.reset_singlet_probability {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("reset_singlet_probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_singlet + self.gamma_triplet
    }

    pub fn volume(&self) -> f64 {
        self.box_side.powi(3)
    }

    /// Number of whole steps to cover t_end.
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    fn sample_every(&self) -> u64 {
        ((self.sample_interval / self.dt).round() as u64).max(1)
    }
}

/// Singlet probability of a correlated pair with Werner index n, exact at
/// n = 0 and n = 1.
pub fn geminate_singlet_probability(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 0.0,
        _ => (1.0 + 3.0 * xi_of_index(n)) / 4.0,
    }
}

/// A seed for an independent ensemble derived from `seed` and a tag.
pub fn derived_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Time-series row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    /// Density of + radicals (equal to that of − radicals).
    pub density: f64,
    pub pairs: usize,
    pub partnerless: usize,
    pub singlets: u64,
    pub triplets: u64,
    /// Running event-weighted ξ̂(0); None before the first event.
    pub xi_hat: Option<f64>,
}

/// Living radicals and registry pairs at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub box_side: f64,
    pub radicals: Vec<Radical>,
    pub pairs: Vec<PairRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutput {
    pub replica: u64,
    pub steps: u64,
    pub t_final: f64,
    pub tally: RecombinationTally,
    pub series: Vec<Sample>,
    /// Event-weighted mean of ξ_meeting over all events.
    pub xi0_hat: Option<f64>,
    pub generated_pairs: u64,
    pub snapshot: Snapshot,
}

/// One replica of the simulation.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: SimConfig,
    replica: u64,
    radicals: Vec<Radical>,
    registry: CorrelationRegistry,
    tally: RecombinationTally,
    motion: ChaCha8Rng,
    spin: ChaCha8Rng,
    next_id: u64,
    step: u64,
    generated: u64,
    removed: u64,
    check_every_step: bool,
}

impl Simulation {
    pub fn new(cfg: &SimConfig) -> Result<Self, KmcError> {
        Self::replica(cfg, 0)
    }

    /// Replica k uses streams 2k (motion) and 2k+1 (spin) of the seed.
    pub fn replica(cfg: &SimConfig, replica: u64) -> Result<Self, KmcError> {
        cfg.validate()?;
        let mut motion = ChaCha8Rng::seed_from_u64(cfg.seed);
        motion.set_stream(2 * replica);
        let mut spin = ChaCha8Rng::seed_from_u64(cfg.seed);
        spin.set_stream(2 * replica + 1);
        let mut sim = Self {
            cfg: cfg.clone(),
            replica,
            radicals: Vec::new(),
            registry: CorrelationRegistry::new(),
            tally: RecombinationTally::new(cfg.record_events),
            motion,
            spin,
            next_id: 0,
            step: 0,
            generated: 0,
            removed: 0,
            check_every_step: false,
        };
        sim.initialize();
        Ok(sim)
    }

    /// Re-validates the registry after every step (slow; for tests).
    pub fn with_checks(mut self) -> Self {
        self.check_every_step = true;
        self
    }

    fn initialize(&mut self) {
        let l = self.cfg.box_side;
        for _ in 0..self.cfg.initial_pairs {
            match self.cfg.initial_state {
                InitialState::Correlated => {
                    let n = self.draw_index();
                    let (p, m) = self.place_pair();
                    self.registry.insert_pair(p, m, n);
                }
                InitialState::Scrambled => {
                    let (p, m) = self.place_pair();
                    self.registry.insert_partnerless(p);
                    self.registry.insert_partnerless(m);
                }
                InitialState::Uncorrelated => {
                    let a: [f64; 3] = std::array::from_fn(|_| self.motion.random_range(0.0..l));
                    let b: [f64; 3] = std::array::from_fn(|_| self.motion.random_range(0.0..l));
                    let p = self.push(Charge::Plus, a);
                    let m = self.push(Charge::Minus, b);
                    self.registry.insert_partnerless(p);
                    self.registry.insert_partnerless(m);
                }
            }
        }
    }

    fn push(&mut self, charge: Charge, position: [f64; 3]) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.radicals.push(Radical {
            id,
            charge,
            position,
            alive: true,
        });
        id
    }

    /// n = 0 with probability γ⁽⁰⁾/γ_tot, else 1; always 0 without a source.
    fn draw_index(&mut self) -> u32 {
        let total = self.cfg.gamma_total();
        if total == 0.0 {
            return 0;
        }
        let u: f64 = self.motion.random();
        if u * total < self.cfg.gamma_singlet {
            0
        } else {
            1
        }
    }

    /// + uniform in the box, − displaced by a w-distributed isotropic vector.
    fn place_pair(&mut self) -> (u64, u64) {
        let l = self.cfg.box_side;
        let plus: [f64; 3] = std::array::from_fn(|_| self.motion.random_range(0.0..l));
        let d = self.cfg.form_factor.sample_displacement(&mut self.motion);
        let minus = particles::wrap_position([plus[0] + d[0], plus[1] + d[1], plus[2] + d[2]], l);
        (self.push(Charge::Plus, plus), self.push(Charge::Minus, minus))
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn radicals(&self) -> &[Radical] {
        &self.radicals
    }

    pub fn registry(&self) -> &CorrelationRegistry {
        &self.registry
    }

    pub fn tally(&self) -> &RecombinationTally {
        &self.tally
    }

    pub fn living(&self, charge: Charge) -> usize {
        self.radicals
            .iter()
            .filter(|r| r.alive && r.charge == charge)
            .count()
    }

    pub fn generated_pairs(&self) -> u64 {
        self.generated
    }

    pub fn removed_radicals(&self) -> u64 {
        self.removed
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            t: self.time(),
            box_side: self.cfg.box_side,
            radicals: self.radicals.clone(),
            pairs: self.registry.pairs().collect(),
        }
    }

    pub fn check_invariants(&self) -> Result<(), KmcError> {
        self.registry.check(&self.radicals).map_err(KmcError::Registry)?;
        let plus = self.living(Charge::Plus);
        let minus = self.living(Charge::Minus);
        if plus != minus {
            return Err(KmcError::Registry(format!("{plus} + vs {minus} - radicals")));
        }
        if self.removed != 2 * self.tally.total() {
            return Err(KmcError::Registry(format!(
                "{} radicals removed by {} events",
                self.removed,
                self.tally.total()
            )));
        }
        Ok(())
    }

    /// Classifies an encounter, samples its spin outcome and updates the
    /// registry. Draws exactly one uniform from the spin stream.
    pub fn resolve_encounter(&mut self, enc: &Encounter) -> Result<RecombinationEvent, KmcError> {
        let t = self.time();
        let event = resolve_encounter(
            enc,
            &mut self.radicals,
            &mut self.registry,
            &mut self.spin,
            self.cfg.swap_mode,
            self.cfg.reset_singlet_probability,
            t,
        )?;
        self.removed += 2;
        self.tally.record(event);
        Ok(event)
    }

    /// Adds Poisson(γ_tot·L³·dt) new pairs.
    pub fn generate(&mut self) -> u64 {
        let mean = self.cfg.gamma_total() * self.cfg.volume() * self.cfg.dt;
        if mean <= 0.0 {
            return 0;
        }
        let k = Poisson::new(mean).expect("positive mean").sample(&mut self.motion) as u64;
        for _ in 0..k {
            let n = self.draw_index();
            let (p, m) = self.place_pair();
            self.registry.insert_pair(p, m, n);
        }
        self.generated += k;
        k
    }

    /// One full step; returns the number of recombination events.
    pub fn step(&mut self) -> Result<usize, KmcError> {
        let c = &self.cfg;
        diffuse(
            &mut self.radicals,
            c.diff_plus,
            c.diff_minus,
            c.box_side,
            c.dt,
            &mut self.motion,
        );
        let encounters = find_encounters(&self.radicals, c.box_side, c.reaction_radius);
        let p_r = c.reaction_probability;
        let mut events = 0;
        for enc in &encounters {
            if p_r < 1.0 && self.motion.random::<f64>() >= p_r {
                continue;
            }
            self.resolve_encounter(enc)?;
            events += 1;
        }
        if events > 0 {
            self.radicals.retain(|r| r.alive);
        }
        self.step += 1;
        self.generate();
        if self.check_every_step {
            self.check_invariants()?;
        }
        Ok(events)
    }

    fn sample(&self) -> Sample {
        Sample {
            t: self.time(),
            density: self.living(Charge::Plus) as f64 / self.cfg.volume(),
            pairs: self.registry.pair_count(),
            partnerless: self.registry.partnerless_count(),
            singlets: self.tally.singlets(),
            triplets: self.tally.triplets(),
            xi_hat: self.tally.xi_mean(),
        }
    }

    /// Steps to t_end (or the event budget) and collects the output.
    pub fn run(mut self) -> Result<SimOutput, KmcError> {
        let total = self.cfg.steps();
        let every = self.cfg.sample_every();
        let mut series = vec![self.sample()];
        while self.step < total {
            self.step()?;
            let done = self
                .cfg
                .max_events
                .is_some_and(|m| self.tally.total() >= m);
            if self.step % every == 0 || done || self.step == total {
                series.push(self.sample());
            }
            if done {
                break;
            }
        }
        self.check_invariants()?;
        Ok(SimOutput {
            replica: self.replica,
            steps: self.step,
            t_final: self.time(),
            xi0_hat: self.tally.xi_mean(),
            generated_pairs: self.generated,
            snapshot: self.snapshot(),
            series,
            tally: self.tally,
        })
    }
}

/// Resolves one accepted encounter against the registry.
///
/// (a) partners of each other, index n: singlet with probability
///     (1+3(−1/3)ⁿ)/4, pair removed;
/// (b) members of two different pairs (n, m): singlet with probability 1/4;
///     the orphans form a pair of index n+m (singlet) or n+m+1 (triplet) in
///     exact mode and become partnerless in classical-reset mode;
/// (c) otherwise: singlet with probability 1/4, orphans become partnerless.
pub fn resolve_encounter<R: Rng + ?Sized>(
    enc: &Encounter,
    radicals: &mut [Radical],
    registry: &mut CorrelationRegistry,
    spin: &mut R,
    mode: SwapMode,
    reset_singlet_probability: Option<f64>,
    t: f64,
) -> Result<RecombinationEvent, KmcError> {
    for (slot, id) in [(enc.plus_slot, enc.plus), (enc.minus_slot, enc.minus)] {
        match radicals.get(slot) {
            Some(r) if r.id == id && r.alive => {}
            _ => return Err(KmcError::DeadRadical(id)),
        }
    }
    let mp = registry.membership(enc.plus, Charge::Plus);
    let mm = registry.membership(enc.minus, Charge::Minus);
    let unknown = |id| KmcError::Registry(format!("radical {id} is missing from the registry"));
    if mp == Membership::Unknown {
        return Err(unknown(enc.plus));
    }
    if mm == Membership::Unknown {
        return Err(unknown(enc.minus));
    }
    let mixed = match (mode, reset_singlet_probability) {
        (SwapMode::ClassicalReset, Some(p)) => p,
        _ => 0.25,
    };
    let u: f64 = spin.random();
    let outcome = |p: f64| {
        if u < p {
            SpinOutcome::Singlet
        } else {
            SpinOutcome::Triplet
        }
    };

    let event = match (mp, mm) {
        (Membership::Paired { partner, index }, _) if partner == enc.minus => {
            registry.remove_pair_of(enc.plus, Charge::Plus);
            let o = outcome(geminate_singlet_probability(index));
            RecombinationEvent {
                t,
                plus: enc.plus,
                minus: enc.minus,
                class: EncounterClass::Correlated,
                outcome: o,
                index: Some(index),
                new_index: None,
                orphans: None,
                xi_meeting: xi_of_index(index),
            }
        }
        (
            Membership::Paired { partner: orphan_minus, index: n },
            Membership::Paired { partner: orphan_plus, index: m },
        ) => {
            registry.remove_pair_of(enc.plus, Charge::Plus);
            registry.remove_pair_of(enc.minus, Charge::Minus);
            let o = outcome(mixed);
            let new_index = match mode {
                SwapMode::Exact => {
                    let k = n.saturating_add(m).saturating_add(u32::from(o == SpinOutcome::Triplet));
                    registry.insert_pair(orphan_plus, orphan_minus, k);
                    Some(k)
                }
                SwapMode::ClassicalReset => {
                    registry.insert_partnerless(orphan_plus);
                    registry.insert_partnerless(orphan_minus);
                    None
                }
            };
            RecombinationEvent {
                t,
                plus: enc.plus,
                minus: enc.minus,
                class: EncounterClass::Cross,
                outcome: o,
                index: None,
                new_index,
                orphans: Some([orphan_plus, orphan_minus]),
                xi_meeting: 0.0,
            }
        }
        _ => {
            for (id, charge, m) in [(enc.plus, Charge::Plus, mp), (enc.minus, Charge::Minus, mm)] {
                if let Membership::Paired { partner, .. } = m {
                    registry.remove_pair_of(id, charge);
                    registry.insert_partnerless(partner);
                } else {
                    registry.forget(id);
                }
            }
            RecombinationEvent {
                t,
                plus: enc.plus,
                minus: enc.minus,
                class: EncounterClass::Partnerless,
                outcome: outcome(mixed),
                index: None,
                new_index: None,
                orphans: None,
                xi_meeting: 0.0,
            }
        }
    };
    radicals[enc.plus_slot].alive = false;
    radicals[enc.minus_slot].alive = false;
    Ok(event)
}

/// Per-replica outputs plus their tallies merged in replica order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleOutput {
    pub replicas: Vec<SimOutput>,
    pub merged: RecombinationTally,
}

impl EnsembleOutput {
    pub fn xi0_hat(&self) -> Option<f64> {
        self.merged.xi_mean()
    }
}

/// Runs `replicas` independent replicas on `workers` threads (0 = all
/// available cores). The result does not depend on `workers`.
pub fn run_ensemble(cfg: &SimConfig, replicas: u64, workers: usize) -> Result<EnsembleOutput, KmcError> {
    cfg.validate()?;
    if replicas == 0 {
        return Err(KmcError::Config("replicas must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| KmcError::Config(e.to_string()))?;
    let outputs: Vec<SimOutput> = pool.install(|| {
        (0..replicas)
            .into_par_iter()
            .map(|k| Simulation::replica(cfg, k)?.run())
            .collect::<Result<_, _>>()
    })?;
    let mut merged = RecombinationTally::new(cfg.record_events);
    for o in &outputs {
        merged.merge(&o.tally);
    }
    Ok(EnsembleOutput {
        replicas: outputs,
        merged,
    })
}

/// Convenience wrapper for a single replica.
pub fn run(cfg: &SimConfig) -> Result<SimOutput, KmcError> {
    Simulation::new(cfg)?.run()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaCalibration {
    /// Measured mass-action coefficient, events / (volume·time·g²).
    pub kappa: f64,
    /// Standard error from Poisson counting.
    pub std_error: f64,
    pub events: u64,
}

/// Measures the bimolecular rate coefficient of the contact model from a
/// control run of uncorrelated radicals without generation, ignoring the
/// first `warmup` steps.
pub fn calibrate_kappa(cfg: &SimConfig, steps: u64, warmup: u64) -> Result<KappaCalibration, KmcError> {
    let mut control = cfg.clone();
    control.initial_state = InitialState::Uncorrelated;
    control.gamma_singlet = 0.0;
    control.gamma_triplet = 0.0;
    control.record_events = false;
    control.max_events = None;
    let mut sim = Simulation::new(&control)?;
    let volume = control.volume();
    let mut exposure = 0.0;
    let mut events = 0u64;
    for k in 0..warmup + steps {
        let g = sim.living(Charge::Plus) as f64 / volume;
        let e = sim.step()? as u64;
        if k >= warmup {
            exposure += control.dt * volume * g * g;
            events += e;
        }
    }
    if events == 0 || exposure == 0.0 {
        return Err(KmcError::Config("calibration run produced no events".into()));
    }
    let kappa = events as f64 / exposure;
    Ok(KappaCalibration {
        kappa,
        std_error: kappa / (events as f64).sqrt(),
        events,
    })
}
