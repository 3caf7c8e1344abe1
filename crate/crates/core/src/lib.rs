//! Numerical verification of identities for the Kronecker elliptic function
//! and the `ℤ_M`-symmetric Baxter-Belavin R-matrix.
//!
//! Layers, bottom up: [`elliptic`] (theta, Kronecker, Weierstrass),
//! [`tensor`] (dense operators on `(ℂ^M)^{⊗S}`), [`rmatrix`], and
//! [`identities`] (ordered products and the multi-site identities).
//! [`suite`] names every check and runs one seeded cell of it.

pub mod elliptic;
pub mod error;
pub mod identities;
pub mod residue;
pub mod rmatrix;
pub mod sampling;
pub mod suite;
pub mod tensor;

pub use elliptic::{Elliptic, HalfPeriodIndex, ModularTau, SeriesConfig};
pub use error::{Error, Result};
pub use rmatrix::{BaxterBelavin, RMatrixFamily, RMatrixParams, YangR};
pub use suite::{run_cell, Cell, Choice, IdentityName};
pub use tensor::{DenseOperator, LatticeSpec, TwoSiteOperator};
