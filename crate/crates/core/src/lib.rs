//! Exact computations for simple-current deformations of lattice and affine
//! vertex operator algebras.

pub mod cocycle;
pub mod currents;
pub mod cyclotomic;
pub mod error;
pub mod extend;
pub mod fock;
pub mod lattice;
pub mod rational;
pub mod rootsys;
pub mod snf;

pub use currents::{AffineModel, LatticeModel, Model, ModuleLabel};
pub use cyclotomic::{Cyclotomic, Phase};
pub use error::{Error, Result};
pub use extend::{classify, compute_l0, ExtensionSpec, ExtensionVerdict, Kind};
pub use fock::{FockSpace, FockVector, VertexEngine};
pub use lattice::{CosetGroup, RationalLattice, Sublattice};
pub use rational::{parse_q, Mat, Q};
pub use rootsys::{Family, RootSystemData, SimpleLieType};
