use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

use embezzle_core::circuit::{
    build_generators, entropy_flow, evolve_schedule, evolve_schedule_with, EvolveOptions,
    GeneratorTerm, Propagator,
};
use embezzle_core::qcore::random::{haar_ket, induced_mixed};
use embezzle_core::qcore::{tensor_product, von_neumann_entropy, CMatrix, C64};
use embezzle_core::{
    ChainSpec, CostMode, DensityMatrix, GeneratorBasis, HilbertFactorization, Ket, LogBase,
    Schedule, Slice,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C: f64 = 22.0;

fn qubit(rng: &mut ChaCha8Rng) -> DensityMatrix {
    induced_mixed(&HilbertFactorization::new(vec![2]).unwrap(), 2, rng).unwrap()
}

fn product(states: &[DensityMatrix]) -> DensityMatrix {
    states[1..]
        .iter()
        .fold(states[0].clone(), |acc, s| tensor_product(&acc, s).unwrap())
}

fn pauli_terms(spec: &ChainSpec) -> Vec<GeneratorTerm> {
    build_generators(spec, 2, GeneratorBasis::PauliLike).unwrap()
}

fn single(spec: &ChainSpec, coefficients: &[(&str, f64)]) -> Schedule {
    let pool = pauli_terms(spec);
    let terms = pool
        .into_iter()
        .filter(|t| coefficients.iter().any(|(l, _)| *l == t.label()))
        .collect();
    let slice = Slice::new(1.0, coefficients.iter().map(|&(l, y)| (l.to_string(), y)));
    Schedule::new(spec.site_dims(), terms, vec![slice]).unwrap()
}

fn random_schedule(spec: &ChainSpec, rng: &mut ChaCha8Rng, slices: usize) -> Schedule {
    let pool = pauli_terms(spec);
    let mut used = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..slices {
        let coefficients: Vec<(String, f64)> = (0..3)
            .map(|_| {
                let i = rng.random_range(0..pool.len());
                used.insert(i);
                (pool[i].label().to_string(), rng.random_range(-1.5..1.5))
            })
            .collect();
        out.push(Slice::new(1.0 / slices as f64, coefficients));
    }
    let terms = used.into_iter().map(|i| pool[i].clone()).collect();
    Schedule::new(spec.site_dims(), terms, out).unwrap()
}

#[test]
fn empty_schedule_leaves_state_alone() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let rho = product(
        &(0..3)
            .map(|_| qubit(&mut ChaCha8Rng::seed_from_u64(1)))
            .collect::<Vec<_>>(),
    );
    let traj = evolve_schedule(&rho, &Schedule::empty(spec.site_dims()), 8).unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(traj.last().matrix(), rho.matrix());
    assert!(entropy_flow(&traj, LogBase::NATURAL).is_err());
}

#[test]
fn x_rotation_flips_the_embezzler() {
    let spec = ChainSpec::new(1, 2, 2).unwrap();
    let s = single(&spec, &[("0:XI", FRAC_PI_2)]);
    let fact = spec.factorization().unwrap();
    let rho = DensityMatrix::pure(&Ket::basis(fact, 0).unwrap());
    let traj = evolve_schedule(&rho, &s, 16).unwrap();
    let pops = traj.last().populations();
    assert!((pops[2] - 1.0).abs() < 1e-12, "{pops:?}");
}

#[test]
fn heisenberg_slice_swaps_sites_one_and_two() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let s = single(
        &spec,
        &[
            ("1:XX", FRAC_PI_4),
            ("1:YY", FRAC_PI_4),
            ("1:ZZ", FRAC_PI_4),
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (a, b, c) = (qubit(&mut rng), qubit(&mut rng), qubit(&mut rng));
    let initial = product(&[a.clone(), b.clone(), c.clone()]);
    let expected = product(&[a, c, b]);
    let traj = evolve_schedule(&initial, &s, 64).unwrap();
    assert!(traj.last().trace_norm_distance(&expected).unwrap() < 1e-8);
}

#[test]
fn xy_slice_makes_an_epr_pair_across_cut_one() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let s = single(&spec, &[("1:XY", FRAC_PI_4)]);
    let rho = DensityMatrix::pure(&Ket::basis(spec.factorization().unwrap(), 0).unwrap());
    let traj = evolve_schedule(&rho, &s, 32).unwrap();
    let flow = entropy_flow(&traj, LogBase::NATURAL).unwrap();
    assert!(flow[0].abs() < 1e-10);
    assert!((flow[1] - LN_2).abs() < 1e-9, "{flow:?}");
    assert!((entropy_flow(&traj, LogBase::BITS).unwrap()[1] - 1.0).abs() < 1e-9);
}

#[test]
fn terms_on_the_last_window_only_move_the_last_cut() {
    let spec = ChainSpec::new(4, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sites: Vec<DensityMatrix> = (0..5).map(|_| qubit(&mut rng)).collect();
    let s = single(&spec, &[("3:XY", 0.7), ("3:ZX", -0.4), ("3:YI", 1.1)]);
    let traj = evolve_schedule(&product(&sites), &s, 16).unwrap();
    let flow = entropy_flow(&traj, LogBase::NATURAL).unwrap();
    for (i, f) in flow.iter().enumerate().take(3) {
        assert!(f.abs() < 1e-10, "cut {i}: {f}");
    }
    assert!(flow[3] > 1e-3);
}

#[test]
fn global_entropy_is_conserved() {
    let spec = ChainSpec::new(3, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let fact = spec.factorization().unwrap();
    let rho = induced_mixed(&fact, 3, &mut rng).unwrap();
    let s = random_schedule(&spec, &mut rng, 3);
    let traj = evolve_schedule(&rho, &s, 8).unwrap();
    let s0 = von_neumann_entropy(&rho, LogBase::NATURAL);
    for state in &traj.states {
        assert!((von_neumann_entropy(state, LogBase::NATURAL) - s0).abs() < 1e-8);
    }
    assert_eq!(traj.cut_entropies.len(), 1 + 3 * 8);
    assert_eq!(traj.times.len(), traj.states.len());
    assert!((traj.times.last().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn subdivision_preserves_cost_and_final_state() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_schedule(&spec, &mut rng, 2);
    let fine = s.subdivide(5).unwrap();
    assert!((s.cost(CostMode::Unweighted) - fine.cost(CostMode::Unweighted)).abs() < 1e-12);
    let rho = haar_ket(&spec.factorization().unwrap(), &mut rng).to_density();
    let a = evolve_schedule(&rho, &s, 1).unwrap();
    let b = evolve_schedule(&rho, &fine, 1).unwrap();
    assert!(a.last().trace_norm_distance(b.last()).unwrap() < 1e-10);
}

#[test]
fn json_round_trip_evolves_identically() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s = random_schedule(&spec, &mut rng, 2);
    let back = Schedule::from_json(&s.to_json().unwrap()).unwrap();
    let rho = haar_ket(&spec.factorization().unwrap(), &mut rng).to_density();
    let a = evolve_schedule(&rho, &s, 4).unwrap();
    let b = evolve_schedule(&rho, &back, 4).unwrap();
    assert_eq!(a.last().matrix(), b.last().matrix());
}

#[test]
fn strang_splitting_is_second_order() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..4 {
        let s = random_schedule(&spec, &mut rng, 2);
        let rho = haar_ket(&spec.factorization().unwrap(), &mut rng).to_density();
        let exact = evolve_schedule(&rho, &s, 1).unwrap();
        let err = |substeps| {
            let opts = EvolveOptions {
                substeps,
                propagator: Propagator::Strang,
            };
            evolve_schedule_with(&rho, &s, opts)
                .unwrap()
                .last()
                .trace_norm_distance(exact.last())
                .unwrap()
        };
        let (e1, e2) = (err(8), err(16));
        let order = (e1 / e2).log2();
        assert!(order >= 1.8, "order {order} ({e1}, {e2})");
    }
}

#[test]
fn mismatched_initial_state_is_rejected() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let other = DensityMatrix::maximally_mixed(HilbertFactorization::new(vec![4, 2]).unwrap());
    assert!(evolve_schedule(&other, &Schedule::empty(spec.site_dims()), 1).is_err());
}

fn bound_margins(seed: u64) -> (Vec<f64>, f64) {
    let spec = ChainSpec::new(3, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_schedule(&spec, &mut rng, 1 + (seed % 3) as usize);
    let rho = if seed.is_multiple_of(2) {
        haar_ket(&spec.factorization().unwrap(), &mut rng).to_density()
    } else {
        product(&(0..4).map(|_| qubit(&mut rng)).collect::<Vec<_>>())
    };
    let traj = evolve_schedule(&rho, &s, 1).unwrap();
    let flow = entropy_flow(&traj, LogBase::NATURAL).unwrap();
    let per_cut = flow
        .iter()
        .enumerate()
        .map(|(i, f)| C * s.entangling_budget(i, LogBase::NATURAL) - f)
        .collect();
    let summed = C * LN_2 * s.cost(CostMode::Unweighted) - flow.iter().sum::<f64>();
    (per_cut, summed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn per_cut_entropy_change_is_bounded_by_crossing_budget(seed in any::<u64>()) {
        let (per_cut, _) = bound_margins(seed);
        for m in per_cut {
            prop_assert!(m >= -1e-6, "margin {}", m);
        }
    }

    #[test]
    fn summed_entropy_change_is_bounded_by_cost(seed in any::<u64>()) {
        let (_, summed) = bound_margins(seed);
        prop_assert!(summed >= -1e-6, "margin {}", summed);
    }
}

#[test]
fn crossing_budget_uses_the_smaller_side() {
    let spec = ChainSpec::new(1, 2, 4).unwrap();
    let z4 = CMatrix::from_diagonal(&embezzle_core::qcore::CVector::from_vec(
        [1.0, -1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0]
            .map(|x| C64::new(x, 0.0))
            .to_vec(),
    ));
    let t = GeneratorTerm::from_dense("zz", 0, vec![4, 2], &z4).unwrap();
    let s = Schedule::new(
        spec.site_dims(),
        vec![t],
        vec![Slice::new(1.0, [("zz".to_string(), 2.0)])],
    )
    .unwrap();
    assert!((s.entangling_budget(0, LogBase::NATURAL) - 2.0 * LN_2).abs() < 1e-12);
}

#[test]
fn final_state_matches_recorded_trajectory() {
    let spec = ChainSpec::new(2, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let s = random_schedule(&spec, &mut rng, 3);
    let rho = haar_ket(&spec.factorization().unwrap(), &mut rng).to_density();
    let opts = EvolveOptions {
        substeps: 4,
        propagator: Propagator::Exact,
    };
    let traj = evolve_schedule_with(&rho, &s, opts).unwrap();
    let last = embezzle_core::circuit::evolve_final(&rho, &s, opts).unwrap();
    assert_eq!(traj.last().matrix(), last.matrix());
}
