//! Idempotents of `Z/mZ`: construction and enumeration, additive identities,
//! the idempotent lattice and its finite consistent sublattices, sequential
//! power graph components and orbits, and idempotent-CRT modular
//! exponentiation with Euler/Carmichael exponent reduction.

pub mod arith;
pub mod error;
pub mod identity;
pub mod idempotent;
pub mod index_set;
pub mod lattice;
pub mod modexp;
pub mod powergraph;

pub use arith::FactoredModulus;
pub use error::{Error, Result};
pub use identity::{verify_identity, IdentityId, IdentityParams, IdentityReport};
pub use idempotent::{enumerate_idempotents, idempotent_from_set, Idempotent};
pub use index_set::IndexSet;
pub use lattice::{consistent_lattice, verify_general_identity, ConsistentLattice, GenIdentityId};
pub use modexp::{modexp_auto, ExpContext, ExpPlan, Strategy, TotientKind};
pub use powergraph::{component_of, orbit, ComponentDescriptor, OrbitDecomposition, PowerGraph};
