//! QUBO encoding of a planning instance, its Ising form, energies and decoding.
//!
//! The encoded energy is
//!
//! ```text
//! E(x) = -Σ_p w(p) x_p
//!      + M Σ_{requests} Σ_{p<q same request} x_p x_q          (at most once)
//!      + M Σ_{(p,q) ∈ S₂} x_p x_q                             (pairs)
//!      + M Σ_{(p,q,r) ∈ S₃} x_p s_qr                          (ternary, reduced)
//!      + M Σ_{distinct (q,r)} (x_q x_r − 2 x_q s_qr − 2 x_r s_qr + 3 s_qr)
//!      + M (Σ_p c_p x_p + Σ_d 2^{d−1} s_d − C)²                (capacity)
//! ```
//!
//! The cubic ternary penalty `M x_p x_q x_r` is made quadratic by substituting
//! a slack `s_qr` for the product `x_q x_r`. The substitution penalty vanishes
//! exactly when `s_qr = x_q x_r` and is at least `M` otherwise, so minimising
//! over the slack recovers the cubic term. Triples that share the substituted
//! pair share the slack and its substitution penalty.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Assignment, Instance};

#[derive(Debug, Error, PartialEq)]
pub enum QuboError {
    #[error("bit vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("penalty magnitude must be positive and finite, got {0}")]
    BadPenalty(f64),
    #[error("{0} slack variables exceed the enumeration limit of {1}")]
    TooManySlacks(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlackOrigin {
    /// Stands in for the product of two decision variables (flattened indices).
    TernaryPair(usize, usize),
    /// Binary digit `d` (1-based) of the capacity slack, weight `2^{d−1}`.
    CapacityBit(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarRegistry {
    /// Number of decision variables; they occupy indices `0..n`.
    pub n: usize,
    /// Slack variables, occupying indices `n..n + slacks.len()`.
    pub slacks: Vec<SlackOrigin>,
}

impl VarRegistry {
    pub fn slack_count(&self) -> usize {
        self.slacks.len()
    }

    pub fn len(&self) -> usize {
        self.n + self.slacks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodeWarning {
    /// A disk capacity is present but no variable uses any disk space.
    CapacityWithoutUsage,
}

/// Upper-triangular sparse quadratic form.
///
/// A diagonal entry `(i, i)` is the linear coefficient of `x_i`; an
/// off-diagonal entry `(i, j)` with `i < j` is the full coefficient of
/// `x_i x_j`, i.e. `Q_ij + Q_ji` of the equivalent symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    pub registry: VarRegistry,
    terms: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub penalty_m: f64,
    pub warnings: Vec<EncodeWarning>,
}

impl Qubo {
    /// An empty form over `num_vars` variables, all of them decision variables.
    pub fn new(num_vars: usize) -> Self {
        Self {
            registry: VarRegistry { n: num_vars, slacks: Vec::new() },
            terms: BTreeMap::new(),
            offset: 0.0,
            penalty_m: 1.0,
            warnings: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.registry.len()
    }

    /// Adds `value · x_i x_j` (or `value · x_i` when `i == j`).
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let n = self.num_vars();
        assert!(i < n && j < n, "term ({i},{j}) out of range for {n} variables");
        let key = if i <= j { (i, j) } else { (j, i) };
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += value;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
    }

    /// Stored coefficient of `x_i x_j` (unordered).
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Entry of the symmetric matrix `Q` with `E(x) = xᵀQx + offset`.
    pub fn q_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.coefficient(i, i)
        } else {
            self.coefficient(i, j) / 2.0
        }
    }

    /// Non-zero terms in row-major order, `i <= j`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn interaction_count(&self) -> usize {
        self.terms.keys().filter(|(i, j)| i != j).count()
    }

    pub fn linear_count(&self) -> usize {
        self.terms.keys().filter(|(i, j)| i == j).count()
    }

    /// Per-variable linear coefficients and neighbour lists, for samplers.
    pub fn adjacency(&self) -> (Vec<f64>, Vec<Vec<(usize, f64)>>) {
        let n = self.num_vars();
        let mut linear = vec![0.0; n];
        let mut nbrs = vec![Vec::new(); n];
        for (i, j, v) in self.terms() {
            if i == j {
                linear[i] = v;
            } else {
                nbrs[i].push((j, v));
                nbrs[j].push((i, v));
            }
        }
        (linear, nbrs)
    }

    pub fn to_export(&self) -> QuboExport {
        QuboExport {
            n: self.registry.n,
            s: self.registry.slack_count(),
            offset: self.offset,
            m: self.penalty_m,
            terms: self.terms().collect(),
        }
    }
}

/// COO JSON form of a [`Qubo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboExport {
    pub n: usize,
    pub s: usize,
    pub offset: f64,
    pub m: f64,
    pub terms: Vec<(usize, usize, f64)>,
}

/// Number of binary digits needed so that `2^D − 1 ≥ capacity`.
pub fn capacity_slack_bits(capacity: u64) -> u32 {
    u64::BITS - capacity.leading_zeros()
}

/// Default penalty magnitude `M = Σ w_i + 1`.
pub fn default_penalty(inst: &Instance) -> f64 {
    inst.total_weight() + 1.0
}

/// Builds the penalty QUBO of an instance. `m` overrides `Σ w_i + 1`.
pub fn encode(inst: &Instance, m: Option<f64>) -> Result<Qubo, QuboError> {
    let m = m.unwrap_or_else(|| default_penalty(inst));
    if !(m.is_finite() && m > 0.0) {
        return Err(QuboError::BadPenalty(m));
    }
    let n = inst.variable_count();
    let idx = |v| inst.var_index(v).expect("validated reference");

    // Slack layout first: ternary pair slacks in order of first use, then capacity bits.
    let mut pair_slack: HashMap<(usize, usize), usize> = HashMap::new();
    let mut slacks = Vec::new();
    let mut triples = Vec::with_capacity(inst.ternary_forbidden().len());
    for t in inst.ternary_forbidden() {
        // Members are stored sorted by flattened index; substitute the two largest.
        let (p, q, r) = (idx(t[0]), idx(t[1]), idx(t[2]));
        let s = *pair_slack.entry((q, r)).or_insert_with(|| {
            slacks.push(SlackOrigin::TernaryPair(q, r));
            n + slacks.len() - 1
        });
        triples.push((p, q, r, s));
    }

    let mut warnings = Vec::new();
    let mut capacity_terms: Vec<(usize, f64)> = Vec::new();
    let mut capacity_target = 0.0;
    if let Some(cap) = inst.disk_capacity() {
        let used: Vec<(usize, f64)> = inst
            .variables()
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| match inst.capacity_of(v) {
                0 => None,
                c => Some((i, c as f64)),
            })
            .collect();
        if used.is_empty() {
            warnings.push(EncodeWarning::CapacityWithoutUsage);
        } else {
            capacity_terms = used;
            for d in 1..=capacity_slack_bits(cap) {
                slacks.push(SlackOrigin::CapacityBit(d));
                capacity_terms.push((n + slacks.len() - 1, (1u64 << (d - 1)) as f64));
            }
            capacity_target = cap as f64;
        }
    }

    let mut qubo = Qubo {
        registry: VarRegistry { n, slacks },
        terms: BTreeMap::new(),
        offset: 0.0,
        penalty_m: m,
        warnings,
    };

    for (i, &v) in inst.variables().iter().enumerate() {
        qubo.add(i, i, -inst.weight_of(v));
    }

    for r in inst.requests() {
        let vars: Vec<usize> = r
            .allowed_cameras
            .iter()
            .map(|&c| idx(crate::instance::VarRef::new(r.id, c)))
            .collect();
        for a in 0..vars.len() {
            for b in a + 1..vars.len() {
                qubo.add(vars[a], vars[b], m);
            }
        }
    }

    for &[p, q] in inst.binary_forbidden() {
        qubo.add(idx(p), idx(q), m);
    }

    for &(p, _, _, s) in &triples {
        qubo.add(p, s, m);
    }
    let mut pairs: Vec<_> = pair_slack.into_iter().collect();
    pairs.sort_unstable_by_key(|&(_, s)| s);
    for ((q, r), s) in pairs {
        qubo.add(q, r, m);
        qubo.add(q, s, -2.0 * m);
        qubo.add(r, s, -2.0 * m);
        qubo.add(s, s, 3.0 * m);
    }

    // M (Σ a_k y_k − C)² with y_k² = y_k.
    for (k, &(yk, ak)) in capacity_terms.iter().enumerate() {
        qubo.add(yk, yk, m * (ak * ak - 2.0 * capacity_target * ak));
        for &(yl, al) in &capacity_terms[k + 1..] {
            qubo.add(yk, yl, 2.0 * m * ak * al);
        }
    }
    if !capacity_terms.is_empty() {
        qubo.offset += m * capacity_target * capacity_target;
    }

    Ok(qubo)
}

fn check_len(q: &Qubo, x: &[bool]) -> Result<(), QuboError> {
    if x.len() != q.num_vars() {
        return Err(QuboError::LengthMismatch { expected: q.num_vars(), got: x.len() });
    }
    Ok(())
}

/// `E(x) = xᵀQx + offset`.
pub fn qubo_energy(q: &Qubo, x: &[bool]) -> Result<f64, QuboError> {
    check_len(q, x)?;
    Ok(energy_unchecked(q, x))
}

pub(crate) fn energy_unchecked(q: &Qubo, x: &[bool]) -> f64 {
    q.offset
        + q.terms()
            .filter(|&(i, j, _)| x[i] && x[j])
            .map(|(_, _, v)| v)
            .sum::<f64>()
}

/// Drops the slack bits and reads the decision bits as an assignment.
pub fn decode(q: &Qubo, inst: &Instance, x: &[bool]) -> Result<Assignment, QuboError> {
    check_len(q, x)?;
    Ok(Assignment::from_bits(inst, &x[..q.registry.n]))
}

/// Full bit vector for an assignment, with each slack set to its
/// zero-penalty value: `s_qr = x_q x_r`, and the capacity bits spelling
/// `C − load` in binary (all zero when the load exceeds `C`).
pub fn embed_assignment(q: &Qubo, inst: &Instance, a: &Assignment) -> Vec<bool> {
    let mut x = a.flatten(inst);
    let load: u64 = a.chosen().map(|v| inst.capacity_of(v)).sum();
    let spare = inst.disk_capacity().and_then(|c| c.checked_sub(load)).unwrap_or(0);
    for origin in &q.registry.slacks {
        let bit = match *origin {
            SlackOrigin::TernaryPair(i, j) => x[i] && x[j],
            SlackOrigin::CapacityBit(d) => spare >> (d - 1) & 1 == 1,
        };
        x.push(bit);
    }
    x
}

/// Largest slack count [`min_slack_penalty`] will enumerate.
pub const MAX_ENUMERATED_SLACKS: usize = 24;

/// Minimum over all slack completions of the energy with the objective removed.
///
/// `objective_part` is the energy contribution of the decision bits alone
/// (the negated weights), which this subtracts.
pub fn min_slack_penalty(q: &Qubo, inst: &Instance, decision_bits: &[bool]) -> Result<f64, QuboError> {
    let n = q.registry.n;
    if decision_bits.len() != n {
        return Err(QuboError::LengthMismatch { expected: n, got: decision_bits.len() });
    }
    let s = q.registry.slack_count();
    if s > MAX_ENUMERATED_SLACKS {
        return Err(QuboError::TooManySlacks(s, MAX_ENUMERATED_SLACKS));
    }
    let objective_part: f64 = inst
        .variables()
        .iter()
        .zip(decision_bits)
        .filter(|(_, &b)| b)
        .map(|(&v, _)| -inst.weight_of(v))
        .sum();
    let mut x = decision_bits.to_vec();
    x.resize(n + s, false);
    let mut best = f64::INFINITY;
    for mask in 0u64..(1u64 << s) {
        for k in 0..s {
            x[n + k] = mask >> k & 1 == 1;
        }
        best = best.min(energy_unchecked(q, &x));
    }
    Ok(best - objective_part)
}

/// `H(z) = Σ_i h_i z_i + Σ_{i<j} J_ij z_i z_j + offset`, with `z_i = 1 − 2x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Couplings keyed `(i, j)` with `i < j`; each pair appears once.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    /// Symmetric coupling accessor; zero on the diagonal.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.j.get(&key).copied().unwrap_or(0.0)
    }

    /// Energy of a spin configuration with entries ±1.
    pub fn energy(&self, z: &[i8]) -> f64 {
        assert_eq!(z.len(), self.h.len(), "spin vector length");
        let field: f64 = self.h.iter().zip(z).map(|(h, &s)| h * f64::from(s)).sum();
        let coupling: f64 = self
            .j
            .iter()
            .map(|(&(a, b), &v)| v * f64::from(z[a] * z[b]))
            .sum();
        self.offset + field + coupling
    }

    /// Energy of the spin configuration `z_i = 1 − 2x_i`.
    pub fn energy_of_bits(&self, x: &[bool]) -> f64 {
        let z: Vec<i8> = x.iter().map(|&b| if b { -1 } else { 1 }).collect();
        self.energy(&z)
    }
}

/// Rewrites the QUBO over spins via `x_i = (1 − z_i)/2`.
pub fn to_ising(q: &Qubo) -> IsingModel {
    let mut h = vec![0.0; q.num_vars()];
    let mut j = BTreeMap::new();
    let mut offset = q.offset;
    for (a, b, v) in q.terms() {
        if a == b {
            // v x = v/2 − (v/2) z
            offset += v / 2.0;
            h[a] -= v / 2.0;
        } else {
            // v x_a x_b = v/4 (1 − z_a − z_b + z_a z_b)
            offset += v / 4.0;
            h[a] -= v / 4.0;
            h[b] -= v / 4.0;
            j.insert((a, b), v / 4.0);
        }
    }
    IsingModel { h, j, offset }
}
