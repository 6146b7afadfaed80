//! Mission-planning instances: requests, cameras, forbidden combinations and
//! the on-board disk capacity.
//!
//! Instances are read from and written to a small JSON format. Parsing fixes
//! the flattened variable order once and for all: requests in file order,
//! and within a request its allowed cameras in ascending order. Every other
//! module addresses decision variables through that order.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Camera id used for stereo requests (physical cameras 1 and 3 together).
pub const STEREO_CAMERA: u8 = 4;

/// Physical cameras available to mono requests.
pub const MONO_CAMERAS: [u8; 3] = [1, 2, 3];

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Syntax(#[source] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid instance: {0}")]
    Semantic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestKind {
    Mono,
    Stereo,
}

/// A (request, camera) pair, i.e. one decision variable `x_{i,j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub request_id: u32,
    pub camera: u8,
}

impl VarRef {
    pub const fn new(request_id: u32, camera: u8) -> Self {
        Self { request_id, camera }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.request_id, self.camera)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub id: u32,
    pub kind: RequestKind,
    pub weight: f64,
    /// Disk units used per camera; a missing camera means zero (immediate relay).
    pub capacity_by_camera: BTreeMap<u8, u64>,
    pub allowed_cameras: BTreeSet<u8>,
}

impl Request {
    pub fn mono(id: u32, weight: f64, cameras: impl IntoIterator<Item = u8>) -> Self {
        Self {
            id,
            kind: RequestKind::Mono,
            weight,
            capacity_by_camera: BTreeMap::new(),
            allowed_cameras: cameras.into_iter().collect(),
        }
    }

    pub fn stereo(id: u32, weight: f64) -> Self {
        Self {
            id,
            kind: RequestKind::Stereo,
            weight,
            capacity_by_camera: BTreeMap::new(),
            allowed_cameras: BTreeSet::from([STEREO_CAMERA]),
        }
    }

    pub fn with_capacity(mut self, camera: u8, units: u64) -> Self {
        self.capacity_by_camera.insert(camera, units);
        self
    }

    /// Disk units used when taken with `camera` (0 when unlisted).
    pub fn capacity(&self, camera: u8) -> u64 {
        self.capacity_by_camera.get(&camera).copied().unwrap_or(0)
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let bad = |msg: String| Err(InstanceError::Semantic(msg));
        if !self.weight.is_finite() || self.weight < 0.0 {
            return bad(format!("request {}: weight must be a finite non-negative number", self.id));
        }
        match self.kind {
            RequestKind::Stereo => {
                if self.allowed_cameras != BTreeSet::from([STEREO_CAMERA]) {
                    return bad(format!(
                        "request {}: stereo requests must allow exactly camera {STEREO_CAMERA}",
                        self.id
                    ));
                }
            }
            RequestKind::Mono => {
                if self.allowed_cameras.is_empty() {
                    return bad(format!("request {}: no allowed cameras", self.id));
                }
                if let Some(c) = self.allowed_cameras.iter().find(|c| !MONO_CAMERAS.contains(c)) {
                    return bad(format!("request {}: camera {c} is not a mono camera", self.id));
                }
            }
        }
        if let Some(c) = self
            .capacity_by_camera
            .keys()
            .find(|c| !self.allowed_cameras.contains(c))
        {
            return bad(format!(
                "request {}: capacity given for camera {c}, which is not allowed",
                self.id
            ));
        }
        Ok(())
    }
}

/// A validated, immutable planning instance.
///
/// Pairs and triples are stored with their members sorted by flattened index,
/// so two files listing the same constraint in different member orders parse
/// to equal instances.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    requests: Vec<Request>,
    binary_forbidden: Vec<[VarRef; 2]>,
    ternary_forbidden: Vec<[VarRef; 3]>,
    disk_capacity: Option<u64>,
    vars: Vec<VarRef>,
    index: HashMap<VarRef, usize>,
    request_pos: HashMap<u32, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.requests == other.requests
            && self.binary_forbidden == other.binary_forbidden
            && self.ternary_forbidden == other.ternary_forbidden
            && self.disk_capacity == other.disk_capacity
    }
}

impl Instance {
    /// Validates and builds an instance.
    pub fn new(
        name: impl Into<String>,
        requests: Vec<Request>,
        binary_forbidden: Vec<[VarRef; 2]>,
        ternary_forbidden: Vec<[VarRef; 3]>,
        disk_capacity: Option<u64>,
    ) -> Result<Self, InstanceError> {
        let mut request_pos = HashMap::with_capacity(requests.len());
        for (pos, r) in requests.iter().enumerate() {
            r.validate()?;
            if request_pos.insert(r.id, pos).is_some() {
                return Err(InstanceError::Semantic(format!("duplicate request id {}", r.id)));
            }
        }
        let vars: Vec<VarRef> = requests
            .iter()
            .flat_map(|r| r.allowed_cameras.iter().map(move |&c| VarRef::new(r.id, c)))
            .collect();
        let index: HashMap<VarRef, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let resolve = |v: &VarRef| {
            index.get(v).copied().ok_or_else(|| {
                InstanceError::Semantic(format!("constraint references unknown variable {v}"))
            })
        };

        let mut seen2 = HashSet::new();
        let mut pairs = Vec::with_capacity(binary_forbidden.len());
        for mut pair in binary_forbidden {
            for v in &pair {
                resolve(v)?;
            }
            pair.sort_by_key(|v| index[v]);
            if pair[0] == pair[1] {
                return Err(InstanceError::Semantic(format!("pair repeats variable {}", pair[0])));
            }
            if !seen2.insert(pair) {
                return Err(InstanceError::Semantic(format!(
                    "duplicate forbidden pair {}-{}",
                    pair[0], pair[1]
                )));
            }
            pairs.push(pair);
        }

        let mut seen3 = HashSet::new();
        let mut triples = Vec::with_capacity(ternary_forbidden.len());
        for mut triple in ternary_forbidden {
            for v in &triple {
                resolve(v)?;
            }
            triple.sort_by_key(|v| index[v]);
            if triple[0] == triple[1] || triple[1] == triple[2] {
                return Err(InstanceError::Semantic(format!(
                    "triple repeats a variable: {}-{}-{}",
                    triple[0], triple[1], triple[2]
                )));
            }
            if !seen3.insert(triple) {
                return Err(InstanceError::Semantic(format!(
                    "duplicate forbidden triple {}-{}-{}",
                    triple[0], triple[1], triple[2]
                )));
            }
            triples.push(triple);
        }

        Ok(Self {
            name: name.into(),
            requests,
            binary_forbidden: pairs,
            ternary_forbidden: triples,
            disk_capacity,
            vars,
            index,
            request_pos,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn request(&self, id: u32) -> Option<&Request> {
        self.request_pos.get(&id).map(|&p| &self.requests[p])
    }

    /// Position of request `id` in file order.
    pub fn request_position(&self, id: u32) -> Option<usize> {
        self.request_pos.get(&id).copied()
    }

    pub fn binary_forbidden(&self) -> &[[VarRef; 2]] {
        &self.binary_forbidden
    }

    pub fn ternary_forbidden(&self) -> &[[VarRef; 3]] {
        &self.ternary_forbidden
    }

    pub fn disk_capacity(&self) -> Option<u64> {
        self.disk_capacity
    }

    pub fn has_capacity_constraint(&self) -> bool {
        self.disk_capacity.is_some()
    }

    /// Number of decision variables, `Σ_i |allowed_cameras(i)|`.
    pub fn variable_count(&self) -> usize {
        self.vars.len()
    }

    /// Decision variables in flattened order.
    pub fn variables(&self) -> &[VarRef] {
        &self.vars
    }

    /// Flattened index of a decision variable.
    pub fn var_index(&self, v: VarRef) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.requests.iter().map(|r| r.weight).sum()
    }

    pub fn weight_of(&self, v: VarRef) -> f64 {
        self.request(v.request_id).map_or(0.0, |r| r.weight)
    }

    /// Disk units used by `v`, or 0 on a non-capacity instance.
    pub fn capacity_of(&self, v: VarRef) -> u64 {
        if self.disk_capacity.is_none() {
            return 0;
        }
        self.request(v.request_id).map_or(0, |r| r.capacity(v.camera))
    }

    pub fn stereo_count(&self) -> usize {
        self.requests.iter().filter(|r| r.kind == RequestKind::Stereo).count()
    }

    pub(crate) fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn into_parts(
        self,
    ) -> (String, Vec<Request>, Vec<[VarRef; 2]>, Vec<[VarRef; 3]>, Option<u64>) {
        (
            self.name,
            self.requests,
            self.binary_forbidden,
            self.ternary_forbidden,
            self.disk_capacity,
        )
    }
}

/// Parses and validates an instance from JSON bytes.
pub fn parse_instance(text: &[u8]) -> Result<Instance, InstanceError> {
    let value: Value = serde_json::from_slice(text).map_err(InstanceError::Syntax)?;
    let raw: RawInstance =
        serde_json::from_value(value).map_err(|e| InstanceError::Schema(e.to_string()))?;
    raw.into_instance()
}

/// Writes the canonical JSON form: sorted keys, constraints in stored order.
pub fn serialize_instance(inst: &Instance) -> Vec<u8> {
    let raw = RawInstance::from(inst);
    let value = serde_json::to_value(&raw).expect("instance serializes");
    // serde_json's default map is ordered, so keys come out sorted.
    let mut out = serde_json::to_vec_pretty(&value).expect("value serializes");
    out.push(b'\n');
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRequest {
    id: u32,
    kind: RequestKind,
    weight: f64,
    allowed_cameras: Vec<u8>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    capacity_by_camera: BTreeMap<String, serde_json::Number>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    name: String,
    requests: Vec<RawRequest>,
    binary_forbidden: Vec<[(u32, u8); 2]>,
    ternary_forbidden: Vec<[(u32, u8); 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disk_capacity: Option<serde_json::Number>,
}

fn as_capacity(n: &serde_json::Number, what: &str) -> Result<u64, InstanceError> {
    n.as_u64().ok_or_else(|| {
        InstanceError::Semantic(format!("{what} must be a non-negative integer, got {n}"))
    })
}

impl RawInstance {
    fn into_instance(self) -> Result<Instance, InstanceError> {
        let mut requests = Vec::with_capacity(self.requests.len());
        for r in self.requests {
            let mut allowed = BTreeSet::new();
            for &c in &r.allowed_cameras {
                if !allowed.insert(c) {
                    return Err(InstanceError::Semantic(format!(
                        "request {}: camera {c} listed twice",
                        r.id
                    )));
                }
            }
            let mut caps = BTreeMap::new();
            for (cam, units) in &r.capacity_by_camera {
                let cam: u8 = cam.parse().map_err(|_| {
                    InstanceError::Schema(format!("request {}: camera key {cam:?} is not an integer", r.id))
                })?;
                caps.insert(cam, as_capacity(units, &format!("request {} capacity", r.id))?);
            }
            requests.push(Request {
                id: r.id,
                kind: r.kind,
                weight: r.weight,
                capacity_by_camera: caps,
                allowed_cameras: allowed,
            });
        }
        let disk = self
            .disk_capacity
            .as_ref()
            .map(|n| as_capacity(n, "disk_capacity"))
            .transpose()?;
        let v = |(r, c): (u32, u8)| VarRef::new(r, c);
        Instance::new(
            self.name,
            requests,
            self.binary_forbidden.into_iter().map(|p| p.map(v)).collect(),
            self.ternary_forbidden.into_iter().map(|t| t.map(v)).collect(),
            disk,
        )
    }
}

impl From<&Instance> for RawInstance {
    fn from(inst: &Instance) -> Self {
        let v = |x: VarRef| (x.request_id, x.camera);
        Self {
            name: inst.name.clone(),
            requests: inst
                .requests
                .iter()
                .map(|r| RawRequest {
                    id: r.id,
                    kind: r.kind,
                    weight: r.weight,
                    allowed_cameras: r.allowed_cameras.iter().copied().collect(),
                    capacity_by_camera: r
                        .capacity_by_camera
                        .iter()
                        .map(|(c, u)| (c.to_string(), (*u).into()))
                        .collect(),
                })
                .collect(),
            binary_forbidden: inst.binary_forbidden.iter().map(|p| p.map(v)).collect(),
            ternary_forbidden: inst.ternary_forbidden.iter().map(|t| t.map(v)).collect(),
            disk_capacity: inst.disk_capacity.map(Into::into),
        }
    }
}

/// A set of taken (request, camera) pairs.
///
/// Normally each request appears at most once; decoding a raw bitstring may
/// produce several cameras for one request, which feasibility checking then
/// reports rather than repairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    chosen: BTreeSet<VarRef>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an assignment from a request → camera map.
    pub fn from_choices(choices: impl IntoIterator<Item = (u32, u8)>) -> Self {
        Self {
            chosen: choices.into_iter().map(|(r, c)| VarRef::new(r, c)).collect(),
        }
    }

    /// Reads decision bits in the instance's flattened order.
    ///
    /// Panics if `bits` is shorter than the variable count.
    pub fn from_bits(inst: &Instance, bits: &[bool]) -> Self {
        assert!(bits.len() >= inst.variable_count(), "bit vector too short");
        Self {
            chosen: inst
                .variables()
                .iter()
                .zip(bits)
                .filter(|(_, &b)| b)
                .map(|(&v, _)| v)
                .collect(),
        }
    }

    pub fn take(&mut self, v: VarRef) {
        self.chosen.insert(v);
    }

    pub fn is_taken(&self, v: VarRef) -> bool {
        self.chosen.contains(&v)
    }

    pub fn chosen(&self) -> impl Iterator<Item = VarRef> + '_ {
        self.chosen.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// Camera chosen for a request; `None` if not taken or taken more than once.
    pub fn camera_of(&self, request_id: u32) -> Option<u8> {
        let mut it = self
            .chosen
            .range(VarRef::new(request_id, 0)..=VarRef::new(request_id, u8::MAX));
        match (it.next(), it.next()) {
            (Some(v), None) => Some(v.camera),
            _ => None,
        }
    }

    /// Flattened bit vector over the instance's decision variables.
    pub fn flatten(&self, inst: &Instance) -> Vec<bool> {
        inst.variables().iter().map(|v| self.chosen.contains(v)).collect()
    }
}
