mod common;

use satplan::reductor::{synthesize, SyntheticSpec};
use satplan::{check_feasible, objective, solve_exact, Assignment};

#[test]
fn branch_and_bound_matches_brute_force() {
    let mut checked = 0;
    for seed in 0..120u64 {
        let inst = synthesize(
            &SyntheticSpec {
                requests: 3 + (seed % 5) as usize,
                stereo_fraction: 0.3,
                binary_constraints: 6,
                ternary_constraints: 3,
                max_weight: 7,
                max_capacity: if seed % 2 == 0 { 4 } else { 0 },
            },
            seed,
        );
        if inst.variable_count() > 12 {
            continue;
        }
        let res = solve_exact(&inst, u64::MAX);
        assert!(res.proven_optimal);
        assert_eq!(res.best_value, common::brute_force_fmax(&inst), "{}", inst.name());
        let x = res.best_assignment.flatten(&inst);
        assert!(common::feasible(&inst, &x));
        assert_eq!(objective(&inst, &res.best_assignment), res.best_value);
        checked += 1;
    }
    assert!(checked >= 60, "only {checked} instances small enough");
}

#[test]
fn feasibility_agrees_with_reference() {
    for seed in 0..40u64 {
        let inst = synthesize(&SyntheticSpec { requests: 4, max_capacity: 3, ..SyntheticSpec::default() }, seed);
        let n = inst.variable_count();
        if n > 12 {
            continue;
        }
        for mask in 0u64..1 << n {
            let x = common::bits(mask, n);
            let a = Assignment::from_bits(&inst, &x);
            assert_eq!(check_feasible(&inst, &a).feasible(), common::feasible(&inst, &x), "{} {mask:b}", inst.name());
            assert_eq!(objective(&inst, &a), common::objective(&inst, &x));
        }
    }
}
