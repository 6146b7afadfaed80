//! Objective evaluation, feasibility checking and an exact reference solver.

use serde::{Deserialize, Serialize};

use crate::instance::{Assignment, Instance, VarRef};

/// Default node budget for [`solve_exact`].
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    Once,
    Pair,
    Ternary,
    Capacity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub vars: Vec<VarRef>,
    /// Load in excess of the disk capacity; zero for other kinds.
    pub slack_amount: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub best_value: f64,
    pub best_assignment: Assignment,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
}

/// `F(x) = Σ_i Σ_j w_i x_{i,j}`.
pub fn objective(inst: &Instance, a: &Assignment) -> f64 {
    a.chosen().map(|v| inst.weight_of(v)).sum()
}

/// Reports every violated constraint of the instance.
pub fn check_feasible(inst: &Instance, a: &Assignment) -> FeasibilityReport {
    let mut violations = Vec::new();

    let mut current: Option<(u32, Vec<VarRef>)> = None;
    let flush = |group: Option<(u32, Vec<VarRef>)>, out: &mut Vec<Violation>| {
        if let Some((_, vars)) = group {
            if vars.len() > 1 {
                out.push(Violation { kind: ConstraintKind::Once, vars, slack_amount: 0 });
            }
        }
    };
    // chosen() is sorted by (request, camera), so cameras of one request are adjacent.
    for v in a.chosen() {
        match &mut current {
            Some((r, vars)) if *r == v.request_id => vars.push(v),
            _ => {
                let prev = current.replace((v.request_id, vec![v]));
                flush(prev, &mut violations);
            }
        }
    }
    flush(current, &mut violations);

    // Same check on the flattened view: per-request bit sums.
    debug_assert!({
        let bits = a.flatten(inst);
        inst.requests().iter().all(|r| {
            let taken = r
                .allowed_cameras
                .iter()
                .filter(|&&c| bits[inst.var_index(VarRef::new(r.id, c)).unwrap()])
                .count();
            (taken > 1) == violations.iter().any(|v| {
                v.kind == ConstraintKind::Once && v.vars[0].request_id == r.id
            })
        })
    });

    for pair in inst.binary_forbidden() {
        if pair.iter().all(|&v| a.is_taken(v)) {
            violations.push(Violation {
                kind: ConstraintKind::Pair,
                vars: pair.to_vec(),
                slack_amount: 0,
            });
        }
    }
    for triple in inst.ternary_forbidden() {
        if triple.iter().all(|&v| a.is_taken(v)) {
            violations.push(Violation {
                kind: ConstraintKind::Ternary,
                vars: triple.to_vec(),
                slack_amount: 0,
            });
        }
    }
    if let Some(cap) = inst.disk_capacity() {
        let load: u64 = a.chosen().map(|v| inst.capacity_of(v)).sum();
        if load > cap {
            violations.push(Violation {
                kind: ConstraintKind::Capacity,
                vars: a.chosen().filter(|&v| inst.capacity_of(v) > 0).collect(),
                slack_amount: load - cap,
            });
        }
    }
    FeasibilityReport { violations }
}

/// Depth-first branch and bound over requests in file order.
///
/// At each request the allowed cameras are tried in ascending order, then the
/// skip branch. The bound is the current value plus the weights of all
/// undecided requests; a node is pruned when that bound cannot beat the
/// incumbent, so among equal-valued optima the first one found is kept.
pub fn solve_exact(inst: &Instance, node_budget: u64) -> ExactResult {
    let mut search = Search::new(inst, node_budget);
    search.descend(0, 0.0);
    let best_assignment = search
        .best_vars
        .iter()
        .fold(Assignment::new(), |mut a, &idx| {
            a.take(inst.variables()[idx]);
            a
        });
    ExactResult {
        best_value: search.best_value,
        best_assignment,
        nodes_explored: search.nodes,
        proven_optimal: !search.exhausted,
    }
}

struct Search<'a> {
    inst: &'a Instance,
    /// Flattened indices of each request's variables.
    request_vars: Vec<Vec<usize>>,
    /// `suffix_weight[k]`: total weight of requests `k..`.
    suffix_weight: Vec<f64>,
    /// For each variable: partners of forbidden pairs.
    pair_partners: Vec<Vec<usize>>,
    /// For each variable: the other two members of each forbidden triple.
    triple_partners: Vec<Vec<[usize; 2]>>,
    cost: Vec<u64>,
    disk: Option<u64>,
    taken: Vec<bool>,
    load: u64,
    stack: Vec<usize>,
    best_value: f64,
    best_vars: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, budget: u64) -> Self {
        let n = inst.variable_count();
        let idx = |v: VarRef| inst.var_index(v).expect("validated reference");
        let request_vars: Vec<Vec<usize>> = inst
            .requests()
            .iter()
            .map(|r| r.allowed_cameras.iter().map(|&c| idx(VarRef::new(r.id, c))).collect())
            .collect();
        let mut suffix_weight = vec![0.0; inst.requests().len() + 1];
        for (k, r) in inst.requests().iter().enumerate().rev() {
            suffix_weight[k] = suffix_weight[k + 1] + r.weight;
        }
        let mut pair_partners = vec![Vec::new(); n];
        for &[p, q] in inst.binary_forbidden() {
            let (p, q) = (idx(p), idx(q));
            pair_partners[p].push(q);
            pair_partners[q].push(p);
        }
        let mut triple_partners = vec![Vec::new(); n];
        for &[p, q, r] in inst.ternary_forbidden() {
            let (p, q, r) = (idx(p), idx(q), idx(r));
            triple_partners[p].push([q, r]);
            triple_partners[q].push([p, r]);
            triple_partners[r].push([p, q]);
        }
        Self {
            inst,
            request_vars,
            suffix_weight,
            pair_partners,
            triple_partners,
            cost: inst.variables().iter().map(|&v| inst.capacity_of(v)).collect(),
            disk: inst.disk_capacity(),
            taken: vec![false; n],
            load: 0,
            stack: Vec::new(),
            best_value: 0.0,
            best_vars: Vec::new(),
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    fn can_take(&self, var: usize) -> bool {
        if self.pair_partners[var].iter().any(|&q| self.taken[q]) {
            return false;
        }
        if self.triple_partners[var]
            .iter()
            .any(|&[q, r]| self.taken[q] && self.taken[r])
        {
            return false;
        }
        match self.disk {
            Some(c) => self.load + self.cost[var] <= c,
            None => true,
        }
    }

    fn descend(&mut self, depth: usize, value: f64) {
        if self.exhausted {
            return;
        }
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if value > self.best_value {
            self.best_value = value;
            self.best_vars = self.stack.clone();
        }
        if depth == self.request_vars.len() {
            return;
        }
        if upper_bound(value, &self.suffix_weight, depth) <= self.best_value {
            return;
        }
        let weight = self.inst.requests()[depth].weight;
        for k in 0..self.request_vars[depth].len() {
            let var = self.request_vars[depth][k];
            if !self.can_take(var) {
                continue;
            }
            self.taken[var] = true;
            self.load += self.cost[var];
            self.stack.push(var);
            self.descend(depth + 1, value + weight);
            self.stack.pop();
            self.load -= self.cost[var];
            self.taken[var] = false;
            if self.exhausted {
                return;
            }
        }
        self.descend(depth + 1, value);
    }
}

/// Value of the current partial assignment plus every undecided request's weight.
fn upper_bound(value: f64, suffix_weight: &[f64], depth: usize) -> f64 {
    value + suffix_weight[depth]
}
