//! Sheaves of modules on smooth fans, their cellular Koszul duals, and exact
//! degreewise verification of the resulting quasi-isomorphisms.
//!
//! Every claim is checked by evaluating complexes at a cone (or chart) and a
//! character `m ∈ M`, giving finite complexes of `ℚ`-vector spaces whose
//! ranks are computed exactly.

pub mod degreewise_homology;
pub mod error;
pub mod graded_modules;
pub mod intmat;
pub mod io;
pub mod koszul;
pub mod lattice_fan;
pub mod linalg;
pub mod monomial_complex;
pub mod report;
pub mod sheaf_modules;
pub mod stalk_algebras;
pub mod suite;
pub mod toric_geometry;

pub use degreewise_homology::{cohomology_dims, ChamberSet, DegreeWindow, EvaluatedComplex};
pub use error::{Error, Result};
pub use graded_modules::{FgGradedModule, GradedDualModule, ModuleMorphism};
pub use koszul::{augmented_k_structure, cellular_complex, koszul_k, koszul_k_b, SigmaDiagram};
pub use lattice_fan::{builtin_fan, ConeId, Fan, FanMorphism, LatticeVector, BUILTIN_FANS};
pub use linalg::{QMatrix, Q};
pub use monomial_complex::{MonomialComplex, Place, Site, Summand};
pub use report::{Check, Status};
pub use sheaf_modules::{CoSheafTcf, SheafComplex, SheafMorphism, SheafOfModules};
pub use stalk_algebras::{Flavor, Support};
pub use suite::{Job, Report, Suite};
pub use toric_geometry::{canonical, line_bundle, EquivariantLineBundle};
