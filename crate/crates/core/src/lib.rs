//! Partial wreath powers of the finite symmetric inverse semigroup `IS_d`
//! and their realization as partial automorphisms of rooted `k`-level
//! `d`-regular trees.
//!
//! * [`partial_perm`]: the base semigroup `IS_d`.
//! * [`wreath`]: elements `(f, a)` of `wr_p^k IS_d`, their products and inverses.
//! * [`tree_paut`]: partial tree automorphisms and the isomorphism with the wreath power.
//! * [`subtree_types`]: canonical isomorphism types of root-containing subtrees.
//! * [`counting`]: exact evaluators for orders, idempotents, D-classes and class sizes.
//! * [`green`]: Green's relations, structurally and by brute force.
//! * [`verify`]: the self-check harness that compares every formula with enumeration.

pub mod counting;
pub mod error;
pub mod green;
pub mod partial_perm;
pub mod subtree_types;
pub mod tree_paut;
pub mod verify;
pub mod wreath;

pub use error::{Error, Result};
pub use partial_perm::PartialPerm;
pub use subtree_types::SubtreeType;
pub use tree_paut::{PartialTreeAut, RootedSubtree, TreeShape, Vertex};
pub use wreath::WreathElement;
