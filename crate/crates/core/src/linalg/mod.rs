//! Dense vectors, compressed sparse row matrices and the linear-operator
//! plumbing shared by the rest of the crate.

mod csr;
mod market;
mod vector;

pub use csr::CsrMatrix;
pub use market::{read_matrix_market, write_matrix_market};
pub use vector::Vector;
pub(crate) use vector::norm;
