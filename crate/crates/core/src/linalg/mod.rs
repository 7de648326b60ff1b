//! Dense eigensolvers, graph components of sparsity patterns and integer
//! normal forms.

mod eigen;
mod scc;
mod snf;

pub use eigen::{by_descending_modulus, complex_eigen, real_eigen, real_eigenvalues, ComplexEigen, RealEigen};
pub use scc::strongly_connected_components;
pub use snf::{smith_normal_form, SmithForm};
pub(crate) use snf::IMat2;
