mod common;

use proptest::prelude::*;
use satplan::reductor::{derive_capacity, reduce, strip_capacity, synthesize, ReductionSpec, SyntheticSpec};
use satplan::{decode, encode, parse_instance, serialize_instance, Assignment, Instance};

fn spec_strategy() -> impl Strategy<Value = (SyntheticSpec, u64)> {
    (1usize..14, 0.0f64..0.6, 0usize..20, 0usize..8, 1u32..9, 0u64..7, any::<u64>()).prop_map(
        |(requests, stereo_fraction, b, t, max_weight, max_capacity, seed)| {
            let spec = SyntheticSpec {
                requests,
                stereo_fraction,
                binary_constraints: b,
                ternary_constraints: t,
                max_weight,
                max_capacity,
            };
            (spec, seed)
        },
    )
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    spec_strategy().prop_map(|(spec, seed)| synthesize(&spec, seed))
}

/// A random assignment that picks at most one camera per request.
fn random_assignment(inst: &Instance, picks: &[u8]) -> Assignment {
    let mut a = Assignment::new();
    for (r, &p) in inst.requests().iter().zip(picks) {
        let cams: Vec<u8> = r.allowed_cameras.iter().copied().collect();
        let k = p as usize % (cams.len() + 1);
        if k < cams.len() {
            a.take(satplan::VarRef::new(r.id, cams[k]));
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(inst in instance_strategy()) {
        let bytes = serialize_instance(&inst);
        let back = parse_instance(&bytes).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), bytes);
    }

    #[test]
    fn variable_count_matches_flat_view(inst in instance_strategy(), picks in prop::collection::vec(any::<u8>(), 14)) {
        let expected: usize = inst.requests().iter().map(|r| r.allowed_cameras.len()).sum();
        prop_assert_eq!(inst.variable_count(), expected);
        let a = random_assignment(&inst, &picks);
        prop_assert_eq!(a.flatten(&inst).len(), expected);
    }

    #[test]
    fn decode_inverts_flatten(inst in instance_strategy(), picks in prop::collection::vec(any::<u8>(), 14), slack in any::<u64>()) {
        let a = random_assignment(&inst, &picks);
        let q = encode(&inst, None).unwrap();
        let mut x = a.flatten(&inst);
        x.extend(common::bits(slack, q.registry.slack_count()));
        prop_assert_eq!(decode(&q, &inst, &x).unwrap(), a);
    }

    #[test]
    fn reductions_are_valid((spec, seed) in spec_strategy(), target in 1usize..8, cap in any::<bool>()) {
        let src = synthesize(&spec, seed);
        let rspec = ReductionSpec { target_requests: target, with_capacity: cap, seed };
        match reduce(&src, &rspec) {
            Ok(r) => {
                let inst = r.instance;
                // Constraint picks may overshoot by at most a triple minus one;
                // every request past the target must then sit in a retained constraint.
                let count = inst.requests().len();
                prop_assert!(count >= target && count <= target + 2, "{} for target {}", count, target);
                if count > target {
                    for r in inst.requests() {
                        let used = inst.binary_forbidden().iter().flatten()
                            .chain(inst.ternary_forbidden().iter().flatten())
                            .any(|v| v.request_id == r.id);
                        prop_assert!(used);
                    }
                }
                prop_assert_eq!(inst.has_capacity_constraint(), cap);
                // Re-parsing re-runs every validation rule.
                prop_assert_eq!(&parse_instance(&serialize_instance(&inst)).unwrap(), &inst);
                for r in inst.requests() {
                    prop_assert!(src.request(r.id).is_some());
                }
            }
            Err(_) => prop_assert!(target > src.requests().len()),
        }
    }

    #[test]
    fn stripping_undoes_capacity_derivation(inst in instance_strategy()) {
        let derived = derive_capacity(&inst).instance;
        prop_assert_eq!(strip_capacity(&derived), strip_capacity(&inst));
        prop_assert!(!strip_capacity(&inst).has_capacity_constraint());
    }
}
