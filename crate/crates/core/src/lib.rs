//! Entropy vectors of lattices over non-archimedean valued fields, the
//! tropical polynomials built from them, and the cones they populate.

pub mod cones;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod field;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod subset;
pub mod tropical;
pub mod verify;

pub use entropy::{ell_distance, entropy_subset_hnf, entropy_subset_minors, entropy_total, entropy_vector, EntropyMethod, EntropyVector};
pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{FieldDescriptor, PAdic, Puiseux, PuiseuxField, Scalar, Term, Valuation, ValuedField};
pub use lattice::{hermite_normal_form, smith_decomposition, DiagonalLattice, Lattice, Smith};
pub use matrix::Matrix;
pub use subset::Subset;
pub use tropical::{phi_oracle_intersection, TropicalPolynomial};
pub use cones::{ci_statement, cone_c_membership, fan_p_membership, project_to_w, s2_preimage, supermodular_membership, SetFunctionVector, WPoint};
pub use verify::{brute_force_index, empirical_tail_report, sample_valuations, IndexOracle, SampleBatch, TailRow};
pub use io::{parse_lattice_file, parse_lattice_str, DynLattice};
