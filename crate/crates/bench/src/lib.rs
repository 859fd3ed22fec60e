//! Fixtures shared by the kernel benchmarks.

use embezzle_core::circuit::compile_permutation;
use embezzle_core::embezzle::embezzle_permutation;
use embezzle_core::qcore::random::haar_ket;
use embezzle_core::qcore::tensor_product;
use embezzle_core::{
    ChainSpec, DensityMatrix, EmbezzleTask, HilbertFactorization, Schedule, VdhFamily,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Haar-random pure state on an `n`-qubit register.
pub fn random_qubits(n: usize, seed: u64) -> DensityMatrix {
    let fact = HilbertFactorization::new(vec![2; n]).expect("valid qubit register");
    haar_ket(&fact, &mut ChaCha8Rng::seed_from_u64(seed)).to_density()
}

/// Compiled qubit vdH circuit of rank `2^n` together with its initial state.
pub struct VdhCircuit {
    pub spec: ChainSpec,
    pub initial: DensityMatrix,
    pub schedule: Schedule,
}

pub fn vdh_circuit(n: usize) -> VdhCircuit {
    let spec = ChainSpec::new(n, 2, 2).expect("valid chain");
    let family = VdhFamily::new(1 << n).expect("valid rank");
    let task = EmbezzleTask::product_to_max_entangled(2, 2).expect("valid task");
    let (perm, _) =
        embezzle_permutation(&family.schmidt_probabilities(), &task).expect("permutation");
    let schedule = compile_permutation(&perm, &spec).expect("compiles");
    let omega = family
        .one_sided_state_on(spec.catalyst_factorization().expect("catalyst"))
        .expect("catalyst state");
    let initial = tensor_product(&task.phi_reduced(), &omega).expect("joint state");
    VdhCircuit {
        spec,
        initial,
        schedule,
    }
}
