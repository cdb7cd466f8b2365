//! Fixtures shared by the benchmarks.

use vsc_core::fock::checks::{jacobi_instances, JacobiInstance};
use vsc_core::rational::{q, qf};
use vsc_core::{ExtensionSpec, FockSpace, VertexEngine};

pub fn a1_engine() -> VertexEngine {
    VertexEngine::new(FockSpace::a1())
}

pub fn d4_level_two() -> ExtensionSpec {
    ExtensionSpec::affine("D4".parse().unwrap(), 2).unwrap()
}

/// Jacobi triples with labels `{0, α/2}` and module weight at most 1.
pub fn small_jacobi_set(e: &VertexEngine) -> Vec<JacobiInstance> {
    jacobi_instances(e, &[vec![q(0)], vec![qf(1, 2)]], &q(1))
}
