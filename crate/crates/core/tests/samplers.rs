mod common;

use proptest::prelude::*;
use satplan::anneal::{sample_sa, solve_exhaustive, AnnealSchedule};
use satplan::qaoa::{apply_ansatz, expectation, sample_state, QaoaParams, QaoaSimulator, StateVector};
use satplan::{encode, qubo_energy, to_ising};

/// Exhaustive minimum recomputed with a plain loop.
fn brute_min(q: &satplan::Qubo) -> f64 {
    let n = q.num_vars();
    (0u64..1 << n)
        .map(|m| qubo_energy(q, &common::bits(m, n)).unwrap())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn sampled_energies_are_exact_and_bounded_by_the_optimum() {
    for inst in common::small_instances(8, 16, 3000) {
        let q = encode(&inst, None).unwrap();
        let floor = brute_min(&q);
        let (_, e) = solve_exhaustive(&q).unwrap();
        assert_eq!(e, floor);
        let set = sample_sa(&q, 64, &AnnealSchedule::scaled_to(&q), 5).unwrap();
        assert_eq!(set.total_reads, 64);
        assert_eq!(set.entries.iter().map(|e| e.count).sum::<u64>(), 64);
        for e in &set.entries {
            assert_eq!(e.energy, qubo_energy(&q, &e.bits).unwrap());
            assert!(e.energy >= floor);
        }
    }
}

#[test]
fn annealing_is_reproducible() {
    let inst = &common::small_instances(1, 18, 77)[0];
    let q = encode(inst, None).unwrap();
    let sched = AnnealSchedule::scaled_to(&q);
    assert_eq!(sample_sa(&q, 40, &sched, 9).unwrap(), sample_sa(&q, 40, &sched, 9).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ansatz_preserves_norm_and_bounds_expectation(
        idx in 0usize..6,
        gammas in prop::collection::vec(-3.2f64..3.2, 1..4),
        betas_seed in prop::collection::vec(-3.2f64..3.2, 4),
    ) {
        let inst = &common::small_instances(6, 10, 41)[idx];
        let q = encode(inst, None).unwrap();
        let ising = to_ising(&q);
        let betas = betas_seed[..gammas.len()].to_vec();
        let psi = apply_ansatz(&ising, &QaoaParams::new(gammas, betas).unwrap()).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
        let sim = QaoaSimulator::new(&ising).unwrap();
        let lo = sim.energies().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sim.energies().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e = expectation(&ising, &psi).unwrap();
        let tol = 1e-9 * hi.abs().max(lo.abs()).max(1.0);
        prop_assert!(e >= lo - tol && e <= hi + tol);
    }
}

#[test]
fn energy_table_matches_qubo_energy() {
    for inst in common::small_instances(4, 12, 19) {
        let q = encode(&inst, None).unwrap();
        let sim = QaoaSimulator::new(&to_ising(&q)).unwrap();
        for (b, &e) in sim.energies().iter().enumerate() {
            let want = qubo_energy(&q, &common::bits(b as u64, q.num_vars())).unwrap();
            assert!((e - want).abs() < 1e-9 * want.abs().max(1.0));
        }
    }
}

#[test]
fn basis_state_sampling_is_deterministic() {
    let inst = &common::small_instances(1, 8, 5)[0];
    let q = encode(inst, None).unwrap();
    let n = q.num_vars();
    let psi = StateVector::basis(n, 5);
    let set = sample_state(&q, &psi, 100, 1).unwrap();
    assert_eq!(set.entries.len(), 1);
    assert_eq!(set.entries[0].bits, common::bits(5, n));
    assert_eq!(set.entries[0].count, 100);
}
