//! Simulated annealing over a QUBO and a brute-force minimiser for small ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::qubo::{energy_unchecked, Qubo};
use crate::samples::SampleSet;

#[derive(Debug, Error, PartialEq)]
pub enum AnnealError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("at least one read is required")]
    NoReads,
    #[error("{0} variables exceed the exhaustive limit of {1}")]
    TooLarge(usize, usize),
}

/// Geometric inverse-temperature schedule for single-flip Metropolis sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Independent anneals per read; the lowest-energy final state is kept.
    pub restarts_per_read: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self { sweeps: 1000, beta_start: 0.1, beta_end: 10.0, restarts_per_read: 1 }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<(), AnnealError> {
        if self.sweeps == 0 {
            return Err(AnnealError::InvalidSchedule("sweeps must be at least 1"));
        }
        if !(self.beta_start > 0.0 && self.beta_end > self.beta_start && self.beta_end.is_finite()) {
            return Err(AnnealError::InvalidSchedule("need 0 < beta_start < beta_end"));
        }
        if self.restarts_per_read == 0 {
            return Err(AnnealError::InvalidSchedule("restarts_per_read must be at least 1"));
        }
        Ok(())
    }

    /// Default sweep count with the inverse-temperature range fitted to `q`.
    ///
    /// The hot end accepts the largest possible single-flip increase with
    /// probability 1/2; the cold end accepts the smallest non-zero
    /// coefficient's increase with probability 1/100.
    pub fn scaled_to(q: &Qubo) -> Self {
        let (linear, nbrs) = q.adjacency();
        let max_delta = linear
            .iter()
            .zip(&nbrs)
            .map(|(l, row)| l.abs() + row.iter().map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let min_delta = q
            .terms()
            .map(|(_, _, v)| v.abs())
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min);
        if !(max_delta > 0.0 && min_delta.is_finite()) {
            return Self::default();
        }
        let beta_start = 2f64.ln() / max_delta;
        let beta_end = (100f64.ln() / min_delta).max(beta_start * 10.0);
        Self { beta_start, beta_end, ..Self::default() }
    }

    /// Inverse temperature of sweep `k`.
    pub fn beta(&self, k: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_start;
        }
        let t = k as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(t)
    }
}

/// Sparse view of a QUBO with cached local fields for O(degree) flips.
struct Landscape {
    linear: Vec<f64>,
    nbrs: Vec<Vec<(usize, f64)>>,
}

impl Landscape {
    fn new(q: &Qubo) -> Self {
        let (linear, nbrs) = q.adjacency();
        Self { linear, nbrs }
    }

    fn fields(&self, x: &[bool]) -> Vec<f64> {
        self.nbrs
            .iter()
            .map(|row| row.iter().filter(|&&(j, _)| x[j]).map(|&(_, v)| v).sum())
            .collect()
    }

    /// Energy change from flipping `i`.
    #[inline]
    fn delta(&self, x: &[bool], field: &[f64], i: usize) -> f64 {
        let d = self.linear[i] + field[i];
        if x[i] {
            -d
        } else {
            d
        }
    }

    #[inline]
    fn flip(&self, x: &mut [bool], field: &mut [f64], i: usize) {
        x[i] = !x[i];
        let sign = if x[i] { 1.0 } else { -1.0 };
        for &(j, v) in &self.nbrs[i] {
            field[j] += sign * v;
        }
    }
}

fn anneal_once(land: &Landscape, sched: &AnnealSchedule, rng: &mut ChaCha8Rng) -> (Vec<bool>, f64) {
    let n = land.linear.len();
    let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut field = land.fields(&x);
    // Offset-free energy; each coupling is counted from both ends.
    let mut energy: f64 = (0..n)
        .filter(|&i| x[i])
        .map(|i| land.linear[i] + 0.5 * field[i])
        .sum();
    for k in 0..sched.sweeps {
        let beta = sched.beta(k);
        for i in 0..n {
            let d = land.delta(&x, &field, i);
            if d <= 0.0 || rng.gen::<f64>() < (-beta * d).exp() {
                land.flip(&mut x, &mut field, i);
                energy += d;
            }
        }
    }
    (x, energy)
}

/// Runs `reads` independent anneals; read `r` draws from stream `r` of the
/// seeded generator, so the result does not depend on thread scheduling.
pub fn sample_sa(q: &Qubo, reads: u64, sched: &AnnealSchedule, seed: u64) -> Result<SampleSet, AnnealError> {
    sched.validate()?;
    if reads == 0 {
        return Err(AnnealError::NoReads);
    }
    let land = Landscape::new(q);
    let finals: Vec<Vec<bool>> = (0..reads)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r);
            let mut best: Option<(Vec<bool>, f64)> = None;
            for _ in 0..sched.restarts_per_read {
                let (x, e) = anneal_once(&land, sched, &mut rng);
                if best.as_ref().is_none_or(|(_, be)| e < *be) {
                    best = Some((x, e));
                }
            }
            best.expect("at least one restart").0
        })
        .collect();
    Ok(SampleSet::from_reads(q, finals, "sa", seed))
}

/// Largest problem [`solve_exhaustive`] accepts.
pub const MAX_EXHAUSTIVE_VARS: usize = 24;

/// Global minimiser by full enumeration; ties go to the lexicographically
/// smallest bit vector (index 0 most significant).
pub fn solve_exhaustive(q: &Qubo) -> Result<(Vec<bool>, f64), AnnealError> {
    let n = q.num_vars();
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(AnnealError::TooLarge(n, MAX_EXHAUSTIVE_VARS));
    }
    let land = Landscape::new(q);
    let scale = 1.0 + q.offset.abs() + q.terms().map(|(_, _, v)| v.abs()).sum::<f64>();
    let tol = 1e-9 * scale;

    let mut x = vec![false; n];
    let mut field = vec![0.0; n];
    let mut energy = q.offset;
    let mut best_bits = x.clone();
    let mut best = energy;

    // Gray-code walk: step k flips the lowest set bit of k.
    for k in 1u64..(1u64 << n) {
        let i = k.trailing_zeros() as usize;
        energy += land.delta(&x, &field, i);
        land.flip(&mut x, &mut field, i);
        if k % (1 << 16) == 0 {
            energy = energy_unchecked(q, &x);
        }
        if energy <= best + tol {
            let exact = energy_unchecked(q, &x);
            energy = exact;
            if exact < best || (exact == best && x < best_bits) {
                best = exact;
                best_bits.clone_from(&x);
            }
        }
    }
    Ok((best_bits, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::qubo_energy;

    #[test]
    fn downhill_single_variable() {
        let mut q = Qubo::new(1);
        q.add(0, 0, -1.0);
        let sched = AnnealSchedule { sweeps: 10, ..Default::default() };
        let set = sample_sa(&q, 50, &sched, 3).unwrap();
        assert_eq!(set.entries.len(), 1);
        assert_eq!(set.entries[0].bits, vec![true]);
        assert_eq!(set.entries[0].energy, -1.0);
        assert_eq!(set.total_reads, 50);
    }

    #[test]
    fn zero_qubo_energies_equal_offset() {
        let mut q = Qubo::new(4);
        q.offset = 2.5;
        let set = sample_sa(&q, 20, &AnnealSchedule { sweeps: 5, ..Default::default() }, 1).unwrap();
        assert!(set.entries.iter().all(|e| e.energy == 2.5));
    }

    #[test]
    fn deterministic_given_seed() {
        let mut q = Qubo::new(5);
        for i in 0..5 {
            q.add(i, i, -1.0);
            q.add(i, (i + 1) % 5, 1.5);
        }
        let sched = AnnealSchedule { sweeps: 20, ..Default::default() };
        assert_eq!(sample_sa(&q, 64, &sched, 9).unwrap(), sample_sa(&q, 64, &sched, 9).unwrap());
    }

    #[test]
    fn schedule_validation() {
        let bad = AnnealSchedule { beta_start: 2.0, beta_end: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(sample_sa(&Qubo::new(1), 0, &AnnealSchedule::default(), 0).is_err());
        let s = AnnealSchedule { sweeps: 3, beta_start: 1.0, beta_end: 4.0, restarts_per_read: 1 };
        assert_eq!(s.beta(0), 1.0);
        assert!((s.beta(1) - 2.0).abs() < 1e-12);
        assert_eq!(s.beta(2), 4.0);
    }

    #[test]
    fn exhaustive_small() {
        let mut q = Qubo::new(1);
        q.add(0, 0, 1.0);
        q.offset = 0.25;
        assert_eq!(solve_exhaustive(&q).unwrap(), (vec![false], 0.25));

        // Two degenerate minima 01 and 10: the lexicographically smaller wins.
        let mut q = Qubo::new(2);
        q.add(0, 0, -1.0);
        q.add(1, 1, -1.0);
        q.add(0, 1, 2.0);
        assert_eq!(solve_exhaustive(&q).unwrap(), (vec![false, true], -1.0));
        assert!(solve_exhaustive(&Qubo::new(25)).is_err());
    }

    #[test]
    fn exhaustive_matches_direct_enumeration() {
        let mut q = Qubo::new(6);
        let coeffs = [3.0, -2.0, 0.5, -4.0, 1.0, -1.5, 2.0, -0.25];
        let mut c = coeffs.iter().cycle();
        for i in 0..6 {
            for j in i..6 {
                if (i + j) % 3 != 1 {
                    q.add(i, j, *c.next().unwrap());
                }
            }
        }
        let mut best = (f64::INFINITY, vec![]);
        for mask in 0u32..64 {
            let x: Vec<bool> = (0..6).map(|k| mask >> (5 - k) & 1 == 1).collect();
            let e = qubo_energy(&q, &x).unwrap();
            if e < best.0 {
                best = (e, x);
            }
        }
        let (bits, e) = solve_exhaustive(&q).unwrap();
        assert_eq!((e, bits), best);
    }
}
