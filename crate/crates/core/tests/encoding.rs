mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satplan::qubo::capacity_slack_bits;
use satplan::{encode, qubo_energy, to_ising, Instance, Qubo, Request, VarRef};

#[test]
fn energy_matches_constraint_by_constraint_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for inst in common::small_instances(30, 22, 500) {
        let q = encode(&inst, None).unwrap();
        for _ in 0..200 {
            let x: Vec<bool> = (0..q.num_vars()).map(|_| rng.gen()).collect();
            let got = qubo_energy(&q, &x).unwrap();
            let want = common::reference_energy(&inst, &q, &x);
            assert!((got - want).abs() < 1e-9, "{}: {got} vs {want}", inst.name());
        }
    }
}

#[test]
fn substitution_penalty_is_the_cubic_term() {
    let m = 7.0;
    for mask in 0u8..8 {
        let (p, q, r) = ((mask & 1) as f64, (mask >> 1 & 1) as f64, (mask >> 2 & 1) as f64);
        let best = [0.0, 1.0]
            .into_iter()
            .map(|s| m * p * s + m * (q * r - 2.0 * q * s - 2.0 * r * s + 3.0 * s))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, m * p * q * r);
    }
}

/// Capacity instance: every subset of items fits iff the encoded penalty can reach zero.
#[test]
fn capacity_penalty_vanishes_exactly_on_feasible_loads() {
    for cap in 0..=9u64 {
        let inst = Instance::new(
            "cap",
            vec![
                Request::mono(0, 1.0, [1]).with_capacity(1, 2),
                Request::mono(1, 1.0, [1]).with_capacity(1, 3),
                Request::mono(2, 1.0, [2]).with_capacity(2, 4),
            ],
            vec![],
            vec![],
            Some(cap),
        )
        .unwrap();
        let q = encode(&inst, Some(1.0)).unwrap();
        let n = inst.variable_count();
        let s = q.registry.slack_count();
        for dmask in 0u64..1 << n {
            let d = common::bits(dmask, n);
            let best = (0u64..1 << s)
                .map(|smask| {
                    let mut x = d.clone();
                    x.extend(common::bits(smask, s));
                    qubo_energy(&q, &x).unwrap() + common::objective(&inst, &d)
                })
                .fold(f64::INFINITY, f64::min);
            let fits = common::feasible(&inst, &d);
            assert_eq!(best == 0.0, fits, "cap {cap} mask {dmask:b}");
            assert!(best >= 0.0);
        }
    }
}

#[test]
fn slack_bits_are_minimal() {
    for c in 1u64..=1024 {
        let d = capacity_slack_bits(c);
        assert!((1u64 << d) - 1 >= c);
        assert!((1u64 << (d - 1)) - 1 < c);
    }
}

#[test]
fn pair_slack_is_shared_between_triples() {
    let v = VarRef::new;
    let inst = Instance::new(
        "share",
        vec![Request::mono(0, 1.0, [1]), Request::mono(1, 1.0, [1]), Request::mono(2, 1.0, [1]), Request::mono(3, 1.0, [1])],
        vec![],
        vec![[v(0, 1), v(2, 1), v(3, 1)], [v(1, 1), v(2, 1), v(3, 1)]],
        None,
    )
    .unwrap();
    assert_eq!(encode(&inst, None).unwrap().registry.slack_count(), 1);
}

fn random_qubo(n: usize, seed: u64) -> Qubo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = Qubo::new(n);
    for i in 0..n {
        for j in i..n {
            if rng.gen_bool(0.6) {
                q.add(i, j, f64::from(rng.gen_range(-9i32..=9)));
            }
        }
    }
    q.offset = f64::from(rng.gen_range(-5i32..=5));
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ising_energy_equals_qubo_energy(seed in any::<u64>(), n in 1usize..9) {
        let q = random_qubo(n, seed);
        let ising = to_ising(&q);
        for mask in 0u64..1 << n {
            let x = common::bits(mask, n);
            prop_assert_eq!(ising.energy_of_bits(&x), qubo_energy(&q, &x).unwrap());
        }
    }
}

#[test]
fn optimum_embeds_with_energy_minus_fmax() {
    for inst in common::small_instances(20, 16, 900) {
        let q = encode(&inst, None).unwrap();
        let best = satplan::solve_exact(&inst, u64::MAX);
        let x = satplan::qubo::embed_assignment(&q, &inst, &best.best_assignment);
        assert_eq!(qubo_energy(&q, &x).unwrap(), -best.best_value, "{}", inst.name());
    }
}
