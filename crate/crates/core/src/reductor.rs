//! Synthetic instances: shrink a source instance to a target request count by
//! sampling its constraints, then derive or strip the capacity data.
//!
//! Also provides [`synthesize`], a random source generator used when no real
//! source file is at hand.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Instance, Request, VarRef, MONO_CAMERAS};

#[derive(Debug, Error, PartialEq)]
pub enum ReductorError {
    #[error("target of {target} requests exceeds the {available} in the source")]
    TargetTooLarge { target: usize, available: usize },
    #[error("target request count must be at least 1")]
    EmptyTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionSpec {
    pub target_requests: usize,
    pub with_capacity: bool,
    pub seed: u64,
}

/// Output of [`reduce`] with flags describing how it was produced.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: Instance,
    /// Requests were topped up by uniform sampling because the constraints ran out.
    pub filled_randomly: bool,
    /// Capacity was requested but every request's cheapest camera is free.
    pub zero_capacity: bool,
}

enum Constraint {
    Pair([VarRef; 2]),
    Triple([VarRef; 3]),
}

impl Constraint {
    fn members(&self) -> &[VarRef] {
        match self {
            Constraint::Pair(p) => p,
            Constraint::Triple(t) => t,
        }
    }
}

/// Shrinks `src` to roughly `spec.target_requests` requests.
///
/// Constraints are drawn in random order and their requests kept until the
/// target is reached or exceeded. Constraints of the source whose members all
/// survive are retained. Requests beyond the target are trimmed in reverse
/// pick order when no retained constraint needs them. When the constraints
/// are exhausted first, the remainder is filled by uniform sampling.
pub fn reduce(src: &Instance, spec: &ReductionSpec) -> Result<Reduction, ReductorError> {
    let available = src.requests().len();
    if spec.target_requests == 0 {
        return Err(ReductorError::EmptyTarget);
    }
    if spec.target_requests > available {
        return Err(ReductorError::TargetTooLarge { target: spec.target_requests, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut constraints: Vec<Constraint> = src
        .binary_forbidden()
        .iter()
        .map(|&p| Constraint::Pair(p))
        .chain(src.ternary_forbidden().iter().map(|&t| Constraint::Triple(t)))
        .collect();
    constraints.shuffle(&mut rng);

    let mut picked: Vec<u32> = Vec::new();
    let mut kept: HashSet<u32> = HashSet::new();
    for c in &constraints {
        if kept.len() >= spec.target_requests {
            break;
        }
        for v in c.members() {
            if kept.insert(v.request_id) {
                picked.push(v.request_id);
            }
        }
    }

    let mut filled_randomly = false;
    if kept.len() < spec.target_requests {
        let mut rest: Vec<u32> = src
            .requests()
            .iter()
            .map(|r| r.id)
            .filter(|id| !kept.contains(id))
            .collect();
        rest.shuffle(&mut rng);
        for id in rest.into_iter().take(spec.target_requests - kept.len()) {
            kept.insert(id);
            picked.push(id);
            filled_randomly = true;
        }
    }

    let survives = |vs: &[VarRef], kept: &HashSet<u32>| vs.iter().all(|v| kept.contains(&v.request_id));
    if kept.len() > spec.target_requests {
        let needed: HashSet<u32> = constraints
            .iter()
            .filter(|c| survives(c.members(), &kept))
            .flat_map(|c| c.members().iter().map(|v| v.request_id))
            .collect();
        for id in picked.iter().rev() {
            if kept.len() <= spec.target_requests {
                break;
            }
            if !needed.contains(id) {
                kept.remove(id);
            }
        }
    }

    let requests: Vec<Request> = src
        .requests()
        .iter()
        .filter(|r| kept.contains(&r.id))
        .cloned()
        .collect();
    let pairs: Vec<[VarRef; 2]> = src
        .binary_forbidden()
        .iter()
        .filter(|p| survives(&p[..], &kept))
        .copied()
        .collect();
    let triples: Vec<[VarRef; 3]> = src
        .ternary_forbidden()
        .iter()
        .filter(|t| survives(&t[..], &kept))
        .copied()
        .collect();
    let count = requests.len();
    let reduced = Instance::new(String::new(), requests, pairs, triples, src.disk_capacity())
        .expect("a subset of a valid instance is valid");

    let (instance, zero_capacity) = if spec.with_capacity {
        let d = derive_capacity(&reduced);
        (d.instance, d.zero_capacity)
    } else {
        (strip_capacity(&reduced), false)
    };
    let name = format!(
        "g{count:03}{}-s{}{}",
        if spec.with_capacity { "c" } else { "" },
        spec.seed,
        if filled_randomly { "-fill" } else { "" }
    );
    Ok(Reduction { instance: instance.with_name(name), filled_randomly, zero_capacity })
}

#[derive(Debug, Clone)]
pub struct DerivedCapacity {
    pub instance: Instance,
    /// Every request has a free camera, so the derived capacity is zero.
    pub zero_capacity: bool,
}

/// Sets `C = ⌈T/2⌉`, where `T` sums each request's cheapest allowed camera.
pub fn derive_capacity(inst: &Instance) -> DerivedCapacity {
    let total: u64 = inst
        .requests()
        .iter()
        .map(|r| r.allowed_cameras.iter().map(|&c| r.capacity(c)).min().unwrap_or(0))
        .sum();
    let cap = total.div_ceil(2);
    let (name, requests, pairs, triples, _) = inst.clone().into_parts();
    let instance = Instance::new(name, requests, pairs, triples, Some(cap))
        .expect("capacity change keeps the instance valid");
    DerivedCapacity { instance, zero_capacity: cap == 0 }
}

/// Removes every per-camera capacity and the disk capacity.
pub fn strip_capacity(inst: &Instance) -> Instance {
    let (name, mut requests, pairs, triples, _) = inst.clone().into_parts();
    for r in &mut requests {
        r.capacity_by_camera.clear();
    }
    Instance::new(name, requests, pairs, triples, None).expect("stripping keeps the instance valid")
}

/// Parameters for a random source instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub requests: usize,
    /// Probability that a request is stereo.
    pub stereo_fraction: f64,
    pub binary_constraints: usize,
    pub ternary_constraints: usize,
    /// Integer weights are drawn from `1..=max_weight`.
    pub max_weight: u32,
    /// Per-camera disk usage is drawn from `0..=max_capacity`; zero disables capacities.
    pub max_capacity: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            requests: 20,
            stereo_fraction: 0.15,
            binary_constraints: 20,
            ternary_constraints: 6,
            max_weight: 5,
            max_capacity: 6,
        }
    }
}

/// Draws a random source instance. Constraints that cannot be placed without
/// repeating (e.g. too few requests) are silently dropped.
pub fn synthesize(spec: &SyntheticSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut requests = Vec::with_capacity(spec.requests);
    for id in 0..spec.requests as u32 {
        let weight = f64::from(rng.gen_range(1..=spec.max_weight.max(1)));
        let mut req = if rng.gen_bool(spec.stereo_fraction.clamp(0.0, 1.0)) {
            Request::stereo(id, weight)
        } else {
            let cams: BTreeSet<u8> = if rng.gen_bool(0.5) {
                MONO_CAMERAS.into_iter().collect()
            } else {
                let k = rng.gen_range(1..=3);
                MONO_CAMERAS.choose_multiple(&mut rng, k).copied().collect()
            };
            Request::mono(id, weight, cams)
        };
        if spec.max_capacity > 0 {
            let cams: Vec<u8> = req.allowed_cameras.iter().copied().collect();
            for c in cams {
                let units = rng.gen_range(0..=spec.max_capacity);
                if units > 0 {
                    req = req.with_capacity(c, units);
                }
            }
        }
        requests.push(req);
    }

    let pick = |rng: &mut ChaCha8Rng, k: usize| -> Option<Vec<VarRef>> {
        if requests.len() < k {
            return None;
        }
        let chosen: Vec<&Request> = requests.choose_multiple(rng, k).collect();
        Some(
            chosen
                .into_iter()
                .map(|r| {
                    let cams: Vec<u8> = r.allowed_cameras.iter().copied().collect();
                    VarRef::new(r.id, *cams.choose(rng).expect("non-empty"))
                })
                .collect(),
        )
    };
    let key = |vs: &[VarRef]| {
        let mut k = vs.to_vec();
        k.sort();
        k
    };
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for _ in 0..spec.binary_constraints {
        if let Some(v) = pick(&mut rng, 2) {
            if seen.insert(key(&v)) {
                pairs.push([v[0], v[1]]);
            }
        }
    }
    let mut triples = Vec::new();
    for _ in 0..spec.ternary_constraints {
        if let Some(v) = pick(&mut rng, 3) {
            if seen.insert(key(&v)) {
                triples.push([v[0], v[1], v[2]]);
            }
        }
    }
    let disk = (spec.max_capacity > 0).then_some(0);
    let inst = Instance::new(format!("synth{:03}-s{seed}", spec.requests), requests, pairs, triples, disk)
        .expect("synthetic instance is valid");
    if spec.max_capacity > 0 {
        derive_capacity(&inst).instance
    } else {
        inst
    }
}

/// Whether any request carries per-camera disk usage.
pub fn has_capacity_data(inst: &Instance) -> bool {
    inst.requests().iter().any(|r| !r.capacity_by_camera.is_empty())
}
