//! State-vector simulation of the driven Rydberg Hamiltonian
//!
//! ```text
//! H(t)/2π = Σ_i Ω(t)/2 σx_i − Δ(t) Σ_i w_i n_i + Σ_{i<j} U_ij n_i n_j
//! ```
//!
//! starting from `|0…0⟩`. Bit `k` of a basis index is atom `k`.
//!
//! The diagonal part is integrated exactly by moving to its interaction
//! picture, `ψ_s = e^{−iθ_s(t)} φ_s` with `θ_s(t) = 2π(−w_s A(t) + V_s t)`,
//! `A(t) = ∫Δ`. Only the drive is left for the fixed-step RK4:
//! `dφ/dt = −iπΩ(t) · p ⊙ X(p̄ ⊙ φ)`, `p = e^{iθ}`. Each output element is
//! a fixed-order sum, so results do not depend on the worker count.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::compile::decode;
use crate::geometry::{
    pair_interaction, GeometryError, Layout, PhysicalParams, DETUNING_FINAL, DETUNING_INITIAL,
    RABI_FREQUENCY,
};
use crate::graph::{AtomGraph, AtomId};
use crate::qubo::Assignment;
use crate::solver::WeightedGraph;

pub const DEFAULT_TOTAL_TIME: f64 = 2.5;
pub const DEFAULT_STEPS: usize = 4000;
pub const DEFAULT_SIM_CAP: usize = 16;
pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid pulse schedule: {0}")]
    BadSchedule(String),
    #[error("time {t} outside [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },
    #[error("{atoms} atoms exceed the simulation cap of {cap}")]
    CapExceeded { atoms: usize, cap: usize },
    #[error("norm drifted by {drift:e} at step {step}; use more steps")]
    NormDrift { drift: f64, step: usize },
    #[error("FullVdW mode needs atom coordinates")]
    MissingLayout,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid Hamiltonian: {0}")]
    BadHamiltonian(String),
    #[error("state is not normalized (norm² = {0})")]
    Unnormalized(f64),
    #[error("predicate references atom {atom}, but there are {n} atoms")]
    BadPredicate { atom: AtomId, n: usize },
    #[error("no probability mass survives post-selection")]
    EmptyPostselection,
    #[error("step count must be positive")]
    ZeroSteps,
}

/// Time-dependent Rabi frequency and detuning, in (2π)·MHz over µs.
pub trait Drive: Sync {
    fn duration(&self) -> f64;
    fn omega(&self, t: f64) -> f64;
    fn delta(&self, t: f64) -> f64;
    /// `∫₀ᵗ Δ(τ) dτ`.
    fn delta_integral(&self, t: f64) -> f64;
    /// Upper bound on `|Δ(t)|` over the whole drive.
    fn max_abs_delta(&self) -> f64;
}

/// Piecewise-linear adiabatic sweep. `Ω` ramps up on `[0, t₁T]`, holds, and
/// ramps down on `[t₂T, T]`; `Δ` holds at `Δ_i`, sweeps linearly to `Δ_f`
/// on `[t₁T, t₂T]`, and holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSchedule {
    pub total_time: f64,
    pub omega0: f64,
    pub delta_initial: f64,
    pub delta_final: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Default for PulseSchedule {
    fn default() -> Self {
        PulseSchedule {
            total_time: DEFAULT_TOTAL_TIME,
            omega0: RABI_FREQUENCY,
            delta_initial: DETUNING_INITIAL,
            delta_final: DETUNING_FINAL,
            t1: 0.1,
            t2: 0.9,
        }
    }
}

impl PulseSchedule {
    pub fn new(
        total_time: f64,
        omega0: f64,
        delta_initial: f64,
        delta_final: f64,
        t1: f64,
        t2: f64,
    ) -> Result<Self, SimError> {
        let s = PulseSchedule {
            total_time,
            omega0,
            delta_initial,
            delta_final,
            t1,
            t2,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(SimError::BadSchedule(format!("T = {}", self.total_time)));
        }
        if !(0.0 < self.t1 && self.t1 < self.t2 && self.t2 < 1.0) {
            return Err(SimError::BadSchedule(format!(
                "ramp fractions {} and {} must satisfy 0 < t1 < t2 < 1",
                self.t1, self.t2
            )));
        }
        if ![self.omega0, self.delta_initial, self.delta_final]
            .iter()
            .all(|x| x.is_finite())
        {
            return Err(SimError::BadSchedule("non-finite amplitude".into()));
        }
        Ok(())
    }

    /// Same sweep stretched to a new total time.
    pub fn with_total_time(self, total_time: f64) -> Result<Self, SimError> {
        let s = PulseSchedule { total_time, ..self };
        s.validate()?;
        Ok(s)
    }

    fn breakpoints(&self) -> (f64, f64) {
        (self.t1 * self.total_time, self.t2 * self.total_time)
    }
}

impl Drive for PulseSchedule {
    fn duration(&self) -> f64 {
        self.total_time
    }

    fn omega(&self, t: f64) -> f64 {
        let (a, b) = self.breakpoints();
        if t < a {
            self.omega0 * t / a
        } else if t <= b {
            self.omega0
        } else {
            self.omega0 * ((self.total_time - t) / (self.total_time - b)).max(0.0)
        }
    }

    fn delta(&self, t: f64) -> f64 {
        let (a, b) = self.breakpoints();
        if t <= a {
            self.delta_initial
        } else if t < b {
            self.delta_initial + (self.delta_final - self.delta_initial) * (t - a) / (b - a)
        } else {
            self.delta_final
        }
    }

    fn delta_integral(&self, t: f64) -> f64 {
        let (a, b) = self.breakpoints();
        let slope = (self.delta_final - self.delta_initial) / (b - a);
        if t <= a {
            self.delta_initial * t
        } else if t <= b {
            self.delta_initial * t + 0.5 * slope * (t - a).powi(2)
        } else {
            self.delta_initial * b + 0.5 * slope * (b - a).powi(2) + self.delta_final * (t - b)
        }
    }

    fn max_abs_delta(&self) -> f64 {
        self.delta_initial.abs().max(self.delta_final.abs())
    }
}

/// `(Ω(t), Δ(t))` for `0 ≤ t ≤ T`.
pub fn schedule_value(s: &PulseSchedule, t: f64) -> Result<(f64, f64), SimError> {
    s.validate()?;
    if !(0.0..=s.total_time).contains(&t) {
        return Err(SimError::TimeOutOfRange {
            t,
            total: s.total_time,
        });
    }
    Ok((s.omega(t), s.delta(t)))
}

/// Constant drive, mostly for Rabi checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDrive {
    pub omega: f64,
    pub delta: f64,
    pub duration: f64,
}

impl Drive for ConstantDrive {
    fn duration(&self) -> f64 {
        self.duration
    }
    fn omega(&self, _t: f64) -> f64 {
        self.omega
    }
    fn delta(&self, _t: f64) -> f64 {
        self.delta
    }
    fn delta_integral(&self, t: f64) -> f64 {
        self.delta * t
    }
    fn max_abs_delta(&self) -> f64 {
        self.delta.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InteractionMode {
    /// Uniform `U₀` on graph edges only.
    IdealBlockade { u0: f64 },
    /// `C₆/r⁶` on every pair, from coordinates.
    FullVdW,
}

impl InteractionMode {
    /// `U₀ = 10·Δ_f`.
    pub fn ideal() -> Self {
        InteractionMode::IdealBlockade {
            u0: 10.0 * DETUNING_FINAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianSpec {
    n: usize,
    /// `(a, b, U_ab)` with `a < b`.
    interactions: Vec<(AtomId, AtomId, f64)>,
    detuning_weights: Vec<f64>,
    drive_weight: f64,
}

impl HamiltonianSpec {
    pub fn new(
        n: usize,
        interactions: Vec<(AtomId, AtomId, f64)>,
        detuning_weights: Vec<f64>,
    ) -> Result<Self, SimError> {
        if detuning_weights.len() != n {
            return Err(SimError::BadHamiltonian(format!(
                "{} detuning weights for {n} atoms",
                detuning_weights.len()
            )));
        }
        if detuning_weights.iter().any(|w| !w.is_finite()) {
            return Err(SimError::BadHamiltonian(
                "non-finite detuning weight".into(),
            ));
        }
        let mut out = Vec::with_capacity(interactions.len());
        for (a, b, u) in interactions {
            if a >= n || b >= n || a == b {
                return Err(SimError::BadHamiltonian(format!("bad pair ({a}, {b})")));
            }
            if !(u >= 0.0 && u.is_finite()) {
                return Err(SimError::BadHamiltonian(format!("U({a}, {b}) = {u}")));
            }
            out.push((a.min(b), a.max(b), u));
        }
        Ok(HamiltonianSpec {
            n,
            interactions: out,
            detuning_weights,
            drive_weight: 1.0,
        })
    }

    pub fn build(
        graph: &AtomGraph,
        layout: Option<&Layout>,
        params: &PhysicalParams,
        mode: InteractionMode,
    ) -> Result<Self, SimError> {
        let n = graph.num_atoms();
        let interactions = match mode {
            InteractionMode::IdealBlockade { u0 } => {
                graph.edges().map(|(a, b)| (a, b, u0)).collect()
            }
            InteractionMode::FullVdW => {
                let layout = layout.ok_or(SimError::MissingLayout)?;
                if layout.len() != n {
                    return Err(GeometryError::MissingAtoms {
                        layout: layout.len(),
                        graph: n,
                    }
                    .into());
                }
                let mut v = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
                for a in 0..n {
                    for b in a + 1..n {
                        v.push((a, b, pair_interaction(params, layout.distance(a, b))?));
                    }
                }
                v
            }
        };
        HamiltonianSpec::new(n, interactions, vec![1.0; n])
    }

    /// Vertex weights become detuning weights, edges get `u0`.
    pub fn from_weighted(g: &WeightedGraph, u0: f64) -> Result<Self, SimError> {
        HamiltonianSpec::new(
            g.weights().len(),
            g.edges().iter().map(|&(a, b)| (a, b, u0)).collect(),
            g.weights().iter().map(|&w| w as f64).collect(),
        )
    }

    pub fn with_detuning_weights(mut self, weights: Vec<f64>) -> Result<Self, SimError> {
        let n = self.n;
        self = HamiltonianSpec::new(n, self.interactions, weights)?;
        Ok(self)
    }

    pub fn num_atoms(&self) -> usize {
        self.n
    }

    pub fn interactions(&self) -> &[(AtomId, AtomId, f64)] {
        &self.interactions
    }

    pub fn detuning_weights(&self) -> &[f64] {
        &self.detuning_weights
    }

    /// `Σ w_i n_i` over the excited atoms of basis state `s`.
    fn weight_of(&self, s: usize) -> f64 {
        (0..self.n)
            .filter(|&k| s >> k & 1 == 1)
            .map(|k| self.detuning_weights[k])
            .sum()
    }

    /// Bound on `|dθ_s/dt − dθ_s'/dt|` over single flips `s ↔ s'`, in rad/µs.
    fn max_flip_rate(&self, max_abs_delta: f64) -> f64 {
        let mut coupled = vec![0.0; self.n];
        for &(a, b, u) in &self.interactions {
            coupled[a] += u;
            coupled[b] += u;
        }
        let worst = (0..self.n)
            .map(|k| self.detuning_weights[k].abs() * max_abs_delta + coupled[k])
            .fold(0.0, f64::max);
        2.0 * PI * worst
    }

    fn interaction_of(&self, s: usize) -> f64 {
        self.interactions
            .iter()
            .filter(|&&(a, b, _)| s >> a & 1 == 1 && s >> b & 1 == 1)
            .map(|&(_, _, u)| u)
            .sum()
    }

    /// Diagonal energy `−Δ Σ w_i n_i + Σ U_ij n_i n_j` of a configuration,
    /// in (2π)·MHz.
    pub fn diagonal_energy(&self, bits: &[u8], delta: f64) -> f64 {
        let s = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &b)| acc | (usize::from(b == 1) << k));
        -delta * self.weight_of(s) + self.interaction_of(s)
    }

    /// `H ψ / 2π` at fixed `(Ω, Δ)`, Schrödinger picture.
    pub fn apply(&self, omega: f64, delta: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let half = 0.5 * omega * self.drive_weight;
        (0..psi.len())
            .into_par_iter()
            .map(|s| {
                let diag = -delta * self.weight_of(s) + self.interaction_of(s);
                let mut acc = psi[s] * diag;
                for k in 0..self.n {
                    acc += psi[s ^ (1 << k)] * half;
                }
                acc
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Nominal step count over `[0, T]`.
    pub steps: usize,
    pub cap: usize,
    pub norm_tolerance: f64,
    /// Each step is split into equal RK4 substeps until the fastest
    /// relative phase between single-flip neighbors advances by at most
    /// this many radians per substep. The split depends only on the
    /// Hamiltonian and drive, never on the state.
    pub max_phase_per_substep: f64,
    /// Fixed substep count, overriding the automatic split. Useful for
    /// step-halving comparisons on an exactly halved grid.
    pub substeps: Option<usize>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            steps: DEFAULT_STEPS,
            cap: DEFAULT_SIM_CAP,
            norm_tolerance: NORM_TOLERANCE,
            max_phase_per_substep: 0.3,
            substeps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    /// Final state in the Schrödinger picture.
    pub state: Vec<Complex64>,
    /// Largest `|‖ψ‖ − 1|` seen at any step.
    pub norm_drift: f64,
    pub steps: usize,
    /// RK4 substeps per nominal step.
    pub substeps: usize,
}

/// Integrates from `|0…0⟩` over `[0, drive.duration()]`.
pub fn evolve(
    h: &HamiltonianSpec,
    drive: &dyn Drive,
    options: &EvolveOptions,
) -> Result<Evolution, SimError> {
    let n = h.n;
    if n > options.cap || n >= usize::BITS as usize - 1 {
        return Err(SimError::CapExceeded {
            atoms: n,
            cap: options.cap,
        });
    }
    if options.steps == 0 {
        return Err(SimError::ZeroSteps);
    }
    let dim = 1usize << n;
    // θ_s splits into a detuning and an interaction part, each taking few
    // distinct values, so `cis` is evaluated per distinct value only.
    let (w_vals, w_idx) = classify((0..dim).into_par_iter().map(|s| h.weight_of(s)).collect());
    let (v_vals, v_idx) = classify(
        (0..dim)
            .into_par_iter()
            .map(|s| h.interaction_of(s))
            .collect(),
    );
    let phases = |t: f64| -> Vec<Complex64> {
        let a = drive.delta_integral(t);
        let cw: Vec<Complex64> = w_vals
            .iter()
            .map(|w| Complex64::cis(-2.0 * PI * w * a))
            .collect();
        let cv: Vec<Complex64> = v_vals
            .iter()
            .map(|v| Complex64::cis(2.0 * PI * v * t))
            .collect();
        (0..dim)
            .into_par_iter()
            .map(|s| cw[w_idx[s] as usize] * cv[v_idx[s] as usize])
            .collect()
    };
    let mut q = vec![Complex64::new(0.0, 0.0); dim];
    // out = −iπΩ(t)·w_drive · p ⊙ X(p̄ ⊙ φ)
    let mut rhs = |t: f64, p: &[Complex64], phi: &[Complex64], out: &mut [Complex64]| {
        let c = Complex64::new(0.0, -PI * drive.omega(t) * h.drive_weight);
        q.par_iter_mut()
            .enumerate()
            .for_each(|(s, qs)| *qs = p[s].conj() * phi[s]);
        let q = &q;
        out.par_iter_mut().enumerate().for_each(|(s, o)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += q[s ^ (1 << k)];
            }
            *o = c * p[s] * acc;
        });
    };

    if !(options.max_phase_per_substep > 0.0) {
        return Err(SimError::BadSchedule(
            "max_phase_per_substep must be positive".into(),
        ));
    }
    let total = drive.duration();
    let nominal = total / options.steps as f64;
    let substeps = match options.substeps {
        Some(0) => return Err(SimError::ZeroSteps),
        Some(k) => k,
        None => substeps_for(h, drive, nominal, options.max_phase_per_substep),
    };
    let internal = options
        .steps
        .checked_mul(substeps)
        .ok_or_else(|| SimError::BadSchedule("step count overflows".into()))?;
    let dt = total / internal as f64;
    let mut phi = vec![Complex64::new(0.0, 0.0); dim];
    phi[0] = Complex64::new(1.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        phi.clone(),
        phi.clone(),
        phi.clone(),
        phi.clone(),
        phi.clone(),
    );
    let mut p_start = phases(0.0);
    let mut drift: f64 = 0.0;
    for step in 0..internal {
        let t = step as f64 * dt;
        let p_mid = phases(t + 0.5 * dt);
        let p_end = phases(t + dt);
        rhs(t, &p_start, &phi, &mut k1);
        axpy(&mut tmp, &phi, 0.5 * dt, &k1);
        rhs(t + 0.5 * dt, &p_mid, &tmp, &mut k2);
        axpy(&mut tmp, &phi, 0.5 * dt, &k2);
        rhs(t + 0.5 * dt, &p_mid, &tmp, &mut k3);
        axpy(&mut tmp, &phi, dt, &k3);
        rhs(t + dt, &p_end, &tmp, &mut k4);
        phi.par_iter_mut().enumerate().for_each(|(s, x)| {
            *x += (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]) * (dt / 6.0);
        });
        let d = (norm_sqr(&phi).sqrt() - 1.0).abs();
        drift = drift.max(d);
        if d > options.norm_tolerance {
            return Err(SimError::NormDrift {
                drift: d,
                step: step / substeps + 1,
            });
        }
        p_start = p_end;
    }
    let state = phi
        .par_iter()
        .zip(p_start.par_iter())
        .map(|(x, p)| x * p.conj())
        .collect();
    Ok(Evolution {
        state,
        norm_drift: drift,
        steps: options.steps,
        substeps,
    })
}

/// Distinct values of `xs` and, per entry, the index of its value.
fn classify(xs: Vec<f64>) -> (Vec<f64>, Vec<u32>) {
    let mut vals = xs.clone();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let idx = xs
        .par_iter()
        .map(|x| vals.partition_point(|v| v < x) as u32)
        .collect();
    (vals, idx)
}

fn substeps_for(h: &HamiltonianSpec, drive: &dyn Drive, nominal: f64, max_phase: f64) -> usize {
    ((h.max_flip_rate(drive.max_abs_delta()) * nominal / max_phase).ceil() as usize).max(1)
}

fn axpy(out: &mut [Complex64], x: &[Complex64], a: f64, y: &[Complex64]) {
    out.par_iter_mut()
        .enumerate()
        .for_each(|(s, o)| *o = x[s] + y[s] * a);
}

/// Sequential, so the result is independent of the thread pool.
fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    n: usize,
    /// Basis index to probability; bit `k` is atom `k`.
    probs: BTreeMap<u64, f64>,
    shots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedOutcome {
    pub bitstring: String,
    pub bits: Vec<u8>,
    pub probability: f64,
}

/// Born probabilities of a normalized state over `n` atoms.
pub fn measure_distribution(state: &[Complex64], n: usize) -> Result<StateDistribution, SimError> {
    if state.len() != 1usize << n {
        return Err(SimError::BadHamiltonian(format!(
            "state has {} amplitudes, expected 2^{n}",
            state.len()
        )));
    }
    let norm = norm_sqr(state);
    if (norm - 1.0).abs() > 2.0 * NORM_TOLERANCE {
        return Err(SimError::Unnormalized(norm));
    }
    let probs = state
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm_sqr() > 0.0)
        .map(|(s, z)| (s as u64, z.norm_sqr()))
        .collect();
    Ok(StateDistribution {
        n,
        probs,
        shots: None,
    })
}

fn bits_of(s: u64, n: usize) -> Vec<u8> {
    (0..n).map(|k| (s >> k & 1) as u8).collect()
}

impl StateDistribution {
    pub fn num_atoms(&self) -> usize {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        self.shots.is_none()
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn probability(&self, bits: &[u8]) -> f64 {
        let s = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | (u64::from(b == 1) << k));
        self.probs.get(&s).copied().unwrap_or(0.0)
    }

    /// Multinomial sample of `shots` measurements.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<StateDistribution, SimError> {
        if shots == 0 {
            return Err(SimError::BadHamiltonian("zero shots".into()));
        }
        let keys: Vec<u64> = self.probs.keys().copied().collect();
        let index = WeightedIndex::new(self.probs.values().copied())
            .map_err(|_| SimError::EmptyPostselection)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(keys[index.sample(&mut rng)]).or_default() += 1;
        }
        Ok(StateDistribution {
            n: self.n,
            probs: counts
                .into_iter()
                .map(|(s, c)| (s, c as f64 / shots as f64))
                .collect(),
            shots: Some(shots),
        })
    }

    /// Keeps outcomes whose bits on `atoms` satisfy `pred`, renormalized.
    pub fn postselect<F>(&self, atoms: &[AtomId], pred: F) -> Result<StateDistribution, SimError>
    where
        F: Fn(&[u8]) -> bool,
    {
        if let Some(&atom) = atoms.iter().find(|&&a| a >= self.n) {
            return Err(SimError::BadPredicate { atom, n: self.n });
        }
        let mut buf = vec![0u8; atoms.len()];
        let kept: BTreeMap<u64, f64> = self
            .probs
            .iter()
            .filter(|(&s, _)| {
                for (slot, &a) in buf.iter_mut().zip(atoms) {
                    *slot = (s >> a & 1) as u8;
                }
                pred(&buf)
            })
            .map(|(&s, &p)| (s, p))
            .collect();
        let mass: f64 = kept.values().sum();
        if !(mass > 0.0) {
            return Err(SimError::EmptyPostselection);
        }
        Ok(StateDistribution {
            n: self.n,
            probs: kept.into_iter().map(|(s, p)| (s, p / mass)).collect(),
            shots: self.shots.map(|k| (mass * k as f64).round() as u64),
        })
    }

    /// Keeps outcomes where consecutive atoms of every chain differ.
    pub fn postselect_af(&self, chains: &[Vec<AtomId>]) -> Result<StateDistribution, SimError> {
        let atoms: Vec<AtomId> = chains.iter().flatten().copied().collect();
        let lens: Vec<usize> = chains.iter().map(Vec::len).collect();
        self.postselect(&atoms, |bits| {
            let mut rest = bits;
            for &len in &lens {
                let (chain, tail) = rest.split_at(len);
                if chain.windows(2).any(|w| w[0] == w[1]) {
                    return false;
                }
                rest = tail;
            }
            true
        })
    }

    /// Outcomes by descending probability; ties by basis index.
    pub fn ranked(&self) -> Vec<RankedOutcome> {
        let mut v: Vec<(u64, f64)> = self.probs.iter().map(|(&s, &p)| (s, p)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.into_iter()
            .map(|(s, p)| {
                let bits = bits_of(s, self.n);
                RankedOutcome {
                    bitstring: AtomGraph::bitstring(&bits),
                    bits,
                    probability: p,
                }
            })
            .collect()
    }

    pub fn modal(&self) -> Option<RankedOutcome> {
        self.ranked().into_iter().next()
    }

    /// Ranked outcomes that decode to a consistent assignment.
    pub fn ranked_decoded(&self, graph: &AtomGraph) -> Vec<(RankedOutcome, Assignment)> {
        self.ranked()
            .into_iter()
            .filter_map(|r| decode(graph, &r.bits).ok().map(|a| (r, a)))
            .collect()
    }

    /// Largest `|p − p'|` over the union of outcomes.
    pub fn max_abs_difference(&self, other: &StateDistribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|s| {
                let a = self.probs.get(s).copied().unwrap_or(0.0);
                let b = other.probs.get(s).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `bitstring,probability` rows, most likely first, with the atom order
    /// in a leading comment.
    pub fn to_csv(&self, labels: &[&str], min_probability: f64) -> String {
        let mut out = format!(
            "# atom order: {}\nbitstring,probability\n",
            labels.join(",")
        );
        for r in self.ranked() {
            if r.probability < min_probability {
                break;
            }
            out.push_str(&format!("{},{:.12e}\n", r.bitstring, r.probability));
        }
        out
    }

    pub fn to_json(&self, labels: &[&str], min_probability: f64) -> String {
        let entries: Vec<_> = self
            .ranked()
            .into_iter()
            .take_while(|r| r.probability >= min_probability)
            .map(|r| serde_json::json!({"bitstring": r.bitstring, "probability": r.probability}))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "atom_order": labels,
            "exact": self.is_exact(),
            "shots": self.shots,
            "entries": entries,
        }))
        .expect("distribution serialization cannot fail")
    }
}
