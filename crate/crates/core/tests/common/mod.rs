//! Independent reference implementations used as test oracles. Nothing here
//! calls into the encoder or the feasibility checker of the library.

#![allow(dead_code)]

use satplan::qubo::SlackOrigin;
use satplan::reductor::{reduce, synthesize, ReductionSpec, SyntheticSpec};
use satplan::{encode, Instance, Qubo};

/// Feasibility of a flattened decision vector, straight from the constraint list.
pub fn feasible(inst: &Instance, x: &[bool]) -> bool {
    let vars = inst.variables();
    let on = |v| x[vars.iter().position(|&u| u == v).unwrap()];
    for r in inst.requests() {
        let taken = vars.iter().zip(x).filter(|(v, &b)| b && v.request_id == r.id).count();
        if taken > 1 {
            return false;
        }
    }
    if inst.binary_forbidden().iter().any(|p| p.iter().all(|&v| on(v))) {
        return false;
    }
    if inst.ternary_forbidden().iter().any(|t| t.iter().all(|&v| on(v))) {
        return false;
    }
    if let Some(cap) = inst.disk_capacity() {
        let load: u64 = vars.iter().zip(x).filter(|(_, &b)| b).map(|(&v, _)| inst.capacity_of(v)).sum();
        if load > cap {
            return false;
        }
    }
    true
}

pub fn objective(inst: &Instance, x: &[bool]) -> f64 {
    inst.variables().iter().zip(x).filter(|(_, &b)| b).map(|(&v, _)| inst.weight_of(v)).sum()
}

pub fn bits(mask: u64, len: usize) -> Vec<bool> {
    (0..len).map(|k| mask >> k & 1 == 1).collect()
}

/// Best objective over all decision vectors.
pub fn brute_force_fmax(inst: &Instance) -> f64 {
    let n = inst.variable_count();
    assert!(n <= 22, "brute force limited to 22 variables");
    (0u64..1 << n)
        .map(|m| bits(m, n))
        .filter(|x| feasible(inst, x))
        .map(|x| objective(inst, &x))
        .fold(0.0, f64::max)
}

/// Penalty energy written out constraint by constraint, using only the slack
/// layout recorded in the registry.
pub fn reference_energy(inst: &Instance, q: &Qubo, x: &[bool]) -> f64 {
    let m = q.penalty_m;
    let vars = inst.variables();
    let n = vars.len();
    let val = |i: usize| if x[i] { 1.0 } else { 0.0 };
    let idx = |v| vars.iter().position(|&u| u == v).unwrap();

    let mut e = -objective(inst, &x[..n]);
    for r in inst.requests() {
        let mine: Vec<usize> = (0..n).filter(|&i| vars[i].request_id == r.id).collect();
        for a in 0..mine.len() {
            for b in a + 1..mine.len() {
                e += m * val(mine[a]) * val(mine[b]);
            }
        }
    }
    for p in inst.binary_forbidden() {
        e += m * val(idx(p[0])) * val(idx(p[1]));
    }
    let slack_of = |qi: usize, ri: usize| {
        q.registry
            .slacks
            .iter()
            .position(|s| *s == SlackOrigin::TernaryPair(qi, ri))
            .map(|k| n + k)
            .expect("pair slack registered")
    };
    let mut pairs = std::collections::BTreeSet::new();
    for t in inst.ternary_forbidden() {
        let mut ids = [idx(t[0]), idx(t[1]), idx(t[2])];
        ids.sort();
        let s = slack_of(ids[1], ids[2]);
        e += m * val(ids[0]) * val(s);
        pairs.insert((ids[1], ids[2], s));
    }
    for (qi, ri, s) in pairs {
        e += m * (val(qi) * val(ri) - 2.0 * val(qi) * val(s) - 2.0 * val(ri) * val(s) + 3.0 * val(s));
    }
    if let Some(cap) = inst.disk_capacity() {
        let load: f64 = (0..n).map(|i| inst.capacity_of(vars[i]) as f64 * val(i)).sum();
        if load > 0.0 || vars.iter().any(|&v| inst.capacity_of(v) > 0) {
            let slack: f64 = q
                .registry
                .slacks
                .iter()
                .enumerate()
                .filter_map(|(k, s)| match s {
                    SlackOrigin::CapacityBit(d) => Some(2f64.powi(*d as i32 - 1) * val(n + k)),
                    _ => None,
                })
                .sum();
            e += m * (load + slack - cap as f64).powi(2);
        }
    }
    e
}

/// Seeded small instances mixing mono/stereo requests, pair and triple
/// constraints and (every other one) a capacity limit, with at most
/// `max_qubits` QUBO variables.
pub fn small_instances(count: usize, max_qubits: usize, salt: u64) -> Vec<Instance> {
    let mut out = Vec::with_capacity(count);
    let mut seed = salt;
    while out.len() < count {
        seed += 1;
        let pool = synthesize(
            &SyntheticSpec {
                requests: 12,
                stereo_fraction: 0.25,
                binary_constraints: 14,
                ternary_constraints: 6,
                max_weight: 5,
                max_capacity: 4,
            },
            seed,
        );
        let spec = ReductionSpec {
            target_requests: 3 + (seed % 4) as usize,
            with_capacity: out.len() % 2 == 0,
            seed,
        };
        let Ok(r) = reduce(&pool, &spec) else { continue };
        let q = encode(&r.instance, None).unwrap();
        if q.num_vars() <= max_qubits && r.instance.total_weight() > 0.0 {
            out.push(r.instance);
        }
    }
    out
}
