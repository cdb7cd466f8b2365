//! Lattice vertex operator algebra `V_{L₀}` realized on its Fock space, with
//! the deformed products that build the algebra `U` over `L`.

pub mod checks;
pub mod ops;
pub mod space;

pub use ops::{Series, VertexEngine};
pub use space::{Basis, EpsilonCocycle, FockSpace, FockVector};
