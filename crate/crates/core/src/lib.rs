//! Classification machinery for two-out-of-three subcategories of finitely
//! generated abelian groups.
//!
//! A full subcategory is *two-out-of-three* (2-3) when, in any short exact
//! sequence, membership of two of the objects forces membership of the
//! third. Over the integers every such subcategory is either a rank-class
//! `I_k` (rank divisible by k) or a torsion family `F(S, H)` cut out by a
//! subgroup `H` of the length-vector group over a prime set `S`. This crate
//! computes the invariants behind that statement and makes the statement
//! itself checkable:
//!
//! - [`matrix`], [`lattice`]: exact integer linear algebra (Smith/Hermite
//!   normal forms, integer solves, canonical subgroup bases);
//! - [`fgmodule`]: canonical module invariants, Euler characteristics
//!   chi_p, presentations;
//! - [`subcat`]: finite descriptors for 2-3 subcategories, membership,
//!   closure of a generator set, and the Grothendieck-group correspondence;
//! - [`ses`]: explicit short exact sequences with integer matrices,
//!   exactness verification, and the constructive sequence families;
//! - [`witness`]: derivations — checkable chains of 2-3 inferences from
//!   generators to a target module;
//! - [`oracle`]: brute-force ground truth on bounded universes (subgroup
//!   enumeration, fixpoint closure, the sandwich check).

pub mod arith;
pub mod ses;
pub mod subcat;
pub mod witness;
pub mod fgmodule;
pub mod lattice;
pub mod matrix;

mod error;

pub use error::{ClosureViolation, Error, Result};
pub use fgmodule::{Chi, FGModule, LengthVector, Partition, Presentation, Prime};
pub use lattice::Lattice;
pub use matrix::{IntMatrix, SnfResult};
pub use ses::{verify_ses, PresentedMorphism, Ses, SesFailure, SesVerdict};
pub use subcat::{closure, K0Class, OutsidePolicy, SubcatDescriptor};
pub use witness::{derive_witness, verify_derivation, Derivation, DerivationStep, DerivationVerdict, Position, Premise, Rule};
