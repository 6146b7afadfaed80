//! Exact statevector QAOA.
//!
//! The state after `ℓ` layers is
//!
//! ```text
//! |ψ(γ, β)⟩ = Π_{j=1..ℓ} e^{−iβ_j H_M} e^{−iγ_j H_C} |+…+⟩,   H_M = Σ_k X_k
//! ```
//!
//! `H_C` is diagonal in the computational basis, so its exponential is a
//! per-amplitude phase read from a precomputed energy table. The mixer
//! factorises into single-qubit rotations `cos β · I − i sin β · X`.
//!
//! Basis index `b` stores qubit `k` in bit `k`, so bit vector entry `x[k]`
//! equals `(b >> k) & 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::optim::nelder_mead;
use crate::qubo::{IsingModel, Qubo};
use crate::samples::SampleSet;
use crate::seed::derive_seed;

/// Largest register the engine will allocate.
pub const MAX_QUBITS: usize = 26;

const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Error, PartialEq)]
pub enum QaoaError {
    #[error("{0} qubits exceed the statevector limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("gammas ({gammas}) and betas ({betas}) must have the same non-zero length")]
    LayerMismatch { gammas: usize, betas: usize },
    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("at least one layer is required")]
    NoLayers,
    #[error("at least one read is required")]
    NoReads,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|+…+⟩` on `qubits` qubits.
    pub fn uniform(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amplitudes: vec![a; dim] }
    }

    /// The computational basis state `|b⟩`.
    pub fn basis(qubits: usize, b: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[b] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_phase(&mut self, gamma: f64, energies: &[f64]) {
        let rotate = |(a, &e): (&mut Complex64, &f64)| *a *= Complex64::cis(-gamma * e);
        if self.dim() >= PAR_THRESHOLD {
            self.amplitudes.par_iter_mut().zip(energies.par_iter()).for_each(rotate);
        } else {
            self.amplitudes.iter_mut().zip(energies).for_each(rotate);
        }
    }

    fn apply_mixer(&mut self, beta: f64, qubits: usize) {
        let (c, s) = (beta.cos(), beta.sin());
        let minus_is = Complex64::new(0.0, -s);
        for k in 0..qubits {
            let stride = 1usize << k;
            let rotate = |block: &mut [Complex64]| {
                let (lo, hi) = block.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c + y * minus_is;
                    *b = x * minus_is + y * c;
                }
            };
            if self.dim() >= PAR_THRESHOLD {
                self.amplitudes.par_chunks_mut(2 * stride).for_each(rotate);
            } else {
                self.amplitudes.chunks_mut(2 * stride).for_each(rotate);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, QaoaError> {
        if gammas.len() != betas.len() || gammas.is_empty() {
            return Err(QaoaError::LayerMismatch { gammas: gammas.len(), betas: betas.len() });
        }
        Ok(Self { gammas, betas })
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// Uniform draw from `[0, 2π)^ℓ × [0, π)^ℓ`.
    pub fn random(layers: usize, rng: &mut impl Rng) -> Self {
        Self {
            gammas: (0..layers).map(|_| rng.gen_range(0.0..2.0 * PI)).collect(),
            betas: (0..layers).map(|_| rng.gen_range(0.0..PI)).collect(),
        }
    }

    /// Adds a layer with `γ = β = 0`, leaving the prepared state unchanged.
    pub fn extended(&self) -> Self {
        let mut next = self.clone();
        next.gammas.push(0.0);
        next.betas.push(0.0);
        next
    }

    fn flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    fn from_flat(x: &[f64]) -> Self {
        let l = x.len() / 2;
        Self { gammas: x[..l].to_vec(), betas: x[l..].to_vec() }
    }

    fn check(&self) -> Result<(), QaoaError> {
        if self.gammas.len() != self.betas.len() {
            return Err(QaoaError::LayerMismatch { gammas: self.gammas.len(), betas: self.betas.len() });
        }
        if self.gammas.is_empty() {
            return Err(QaoaError::NoLayers);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Simplex size below which optimisation stops.
    pub tolerance: f64,
    pub max_evals: usize,
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_evals: 4000, initial_step: 0.1 }
    }
}

/// Cost Hamiltonian tabulated over the computational basis.
#[derive(Debug, Clone)]
pub struct QaoaSimulator {
    qubits: usize,
    energies: Vec<f64>,
}

impl QaoaSimulator {
    pub fn new(ising: &IsingModel) -> Result<Self, QaoaError> {
        let qubits = ising.num_spins();
        if qubits > MAX_QUBITS {
            return Err(QaoaError::TooManyQubits(qubits));
        }
        let couplings: Vec<(usize, usize, f64)> = ising.j.iter().map(|(&(a, b), &v)| (a, b, v)).collect();
        let energy = |b: usize| {
            let z = |k: usize| if b >> k & 1 == 1 { -1.0 } else { 1.0 };
            let field: f64 = ising.h.iter().enumerate().map(|(k, h)| h * z(k)).sum();
            let coupling: f64 = couplings.iter().map(|&(a, c, v)| v * z(a) * z(c)).sum();
            ising.offset + field + coupling
        };
        let dim = 1usize << qubits;
        let energies = if dim >= PAR_THRESHOLD {
            (0..dim).into_par_iter().map(energy).collect()
        } else {
            (0..dim).map(energy).collect()
        };
        Ok(Self { qubits, energies })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Energy of every basis state, indexed by basis index.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector, QaoaError> {
        params.check()?;
        let mut psi = StateVector::uniform(self.qubits);
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            psi.apply_phase(gamma, &self.energies);
            psi.apply_mixer(beta, self.qubits);
        }
        Ok(psi)
    }

    pub fn expectation(&self, psi: &StateVector) -> Result<f64, QaoaError> {
        if psi.dim() != self.energies.len() {
            return Err(QaoaError::DimensionMismatch { expected: self.energies.len(), got: psi.dim() });
        }
        Ok(psi
            .amplitudes
            .iter()
            .zip(&self.energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// `E_ℓ(γ, β)`.
    pub fn energy(&self, params: &QaoaParams) -> Result<f64, QaoaError> {
        self.expectation(&self.state(params)?)
    }

    /// Local minimisation of `E_ℓ` over all `2ℓ` parameters from `init`.
    pub fn optimize(&self, init: &QaoaParams, cfg: &OptimizerConfig) -> Result<(QaoaParams, f64), QaoaError> {
        init.check()?;
        let layers = init.layers();
        let m = nelder_mead(
            |x| {
                let p = QaoaParams::from_flat(x);
                debug_assert_eq!(p.layers(), layers);
                self.energy(&p).unwrap_or(f64::INFINITY)
            },
            &init.flat(),
            cfg.initial_step,
            cfg.tolerance,
            cfg.max_evals,
        );
        Ok((QaoaParams::from_flat(&m.x), m.value))
    }
}

/// Prepares `|ψ_ℓ(γ, β)⟩` for the Ising cost Hamiltonian.
pub fn apply_ansatz(ising: &IsingModel, params: &QaoaParams) -> Result<StateVector, QaoaError> {
    QaoaSimulator::new(ising)?.state(params)
}

/// `⟨ψ|H_C|ψ⟩`, offset included.
pub fn expectation(ising: &IsingModel, psi: &StateVector) -> Result<f64, QaoaError> {
    QaoaSimulator::new(ising)?.expectation(psi)
}

pub fn optimize_layer(
    ising: &IsingModel,
    init: &QaoaParams,
    cfg: &OptimizerConfig,
) -> Result<(QaoaParams, f64), QaoaError> {
    QaoaSimulator::new(ising)?.optimize(init, cfg)
}

/// Draws `reads` basis states from `|ψ|²` by inverse CDF.
pub fn sample_state(q: &Qubo, psi: &StateVector, reads: u64, seed: u64) -> Result<SampleSet, QaoaError> {
    let qubits = q.num_vars();
    if psi.dim() != 1usize << qubits {
        return Err(QaoaError::DimensionMismatch { expected: 1 << qubits, got: psi.dim() });
    }
    if reads == 0 {
        return Err(QaoaError::NoReads);
    }
    let mut cdf = Vec::with_capacity(psi.dim());
    let mut acc = 0.0;
    for a in psi.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..reads {
        let u = rng.gen::<f64>() * acc;
        let b = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let bits: Vec<bool> = (0..qubits).map(|k| b >> k & 1 == 1).collect();
        *counts.entry(bits).or_insert(0u64) += 1;
    }
    Ok(SampleSet::from_counts(q, counts, "qaoa", seed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub max_layers: usize,
    pub n_inits: usize,
    pub reads: u64,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    /// Divide the cost Hamiltonian by its largest |h| or |J| before evolving.
    /// Angles then refer to the rescaled Hamiltonian; reported expectations
    /// stay in energy units.
    pub normalize: bool,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { max_layers: 10, n_inits: 5, reads: 2000, optimizer: OptimizerConfig::default(), seed: 0, normalize: true }
    }
}

/// Largest absolute field or coupling; 1 for a constant Hamiltonian.
pub fn coefficient_scale(ising: &IsingModel) -> f64 {
    let s = ising.h.iter().chain(ising.j.values()).fold(0.0f64, |m, v| m.max(v.abs()));
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn rescaled(ising: &IsingModel, s: f64) -> IsingModel {
    IsingModel {
        h: ising.h.iter().map(|v| v / s).collect(),
        j: ising.j.iter().map(|(&k, v)| (k, v / s)).collect(),
        offset: ising.offset / s,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerResult {
    pub layer: usize,
    pub params: QaoaParams,
    pub expectation: f64,
    pub samples: SampleSet,
}

/// Layer-by-layer QAOA with parameter fixing.
///
/// With `cfg.normalize` the evolution uses the Hamiltonian divided by
/// [`coefficient_scale`].
///
/// Layer 1 is optimised from `n_inits` random starts; the winner is the start
/// whose sampled output scores highest under `score` (lowest expectation when
/// no scorer is given). Each further layer starts from the previous optimum
/// with a zero `(γ, β)` pair appended and re-optimises every parameter.
pub fn run_schedule(
    q: &Qubo,
    cfg: &ScheduleConfig,
    score: Option<&(dyn Fn(&SampleSet) -> f64 + Sync)>,
) -> Result<Vec<LayerResult>, QaoaError> {
    if cfg.max_layers == 0 {
        return Err(QaoaError::NoLayers);
    }
    if cfg.reads == 0 {
        return Err(QaoaError::NoReads);
    }
    let ising = crate::qubo::to_ising(q);
    let scale = if cfg.normalize { coefficient_scale(&ising) } else { 1.0 };
    let sim = QaoaSimulator::new(&rescaled(&ising, scale))?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0]));
    let starts: Vec<QaoaParams> = (0..cfg.n_inits.max(1)).map(|_| QaoaParams::random(1, &mut init_rng)).collect();

    let candidates: Vec<(LayerResult, f64)> = starts
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let (params, value) = sim.optimize(start, &cfg.optimizer)?;
            let psi = sim.state(&params)?;
            let samples = sample_state(q, &psi, cfg.reads, derive_seed(cfg.seed, &[1, k as u64]))?;
            let rank = score.map_or(-value, |f| f(&samples));
            Ok((LayerResult { layer: 1, params, expectation: value * scale, samples }, rank))
        })
        .collect::<Result<_, QaoaError>>()?;
    let (first, _) = candidates
        .into_iter()
        .reduce(|best, c| if c.1 > best.1 { c } else { best })
        .expect("at least one start");

    let mut results = vec![first];
    for layer in 2..=cfg.max_layers {
        let init = results.last().expect("non-empty").params.extended();
        let (params, value) = sim.optimize(&init, &cfg.optimizer)?;
        let psi = sim.state(&params)?;
        let samples = sample_state(q, &psi, cfg.reads, derive_seed(cfg.seed, &[2, layer as u64]))?;
        results.push(LayerResult { layer, params, expectation: value * scale, samples });
    }
    Ok(results)
}
