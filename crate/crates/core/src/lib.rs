//! Exact linear-algebraic machinery for degenerating polarized Hodge
//! structures: monodromy weight filtrations, Deligne splittings, sl2-triples,
//! limiting-mixed-Hodge-structure certification, boundary strata
//! combinatorics, extension tori and automorphy-factor exponents.
//!
//! Everything is computed over Q and the Gaussian rationals Q(i) with
//! arbitrary-precision arithmetic, so every check in the library is a
//! machine-verifiable identity rather than a numerical approximation.
//! Unimodular factors such as exp(pi*i*q) are represented by their exponents
//! and compared modulo 2, never evaluated.
//!
//! The crate is organized around the life cycle of a degeneration:
//!
//! * [`exact`] - scalars, matrices, subspaces, lattices, signatures;
//! * [`filtration`] - polarized spaces, weight/Hodge filtrations and the two
//!   Hodge-Riemann membership tests;
//! * [`nilpotent`] - weight filtrations of nilpotent isometries and cones,
//!   grading operators and sl2-triple completion;
//! * [`mhs`] - Deligne splittings, the R-split test, primitive subspaces and
//!   full certification of limiting mixed Hodge structures;
//! * [`lie`] - the boundary Lie apparatus: isometry algebra, centralizer
//!   filtrations, Levi decompositions, period-matrix (Schubert cell)
//!   coordinates and the fibre coordinate solve;
//! * [`strata`] - normal-crossing boundary combinatorics: strata posets,
//!   span and weight partitions, union cones, inclusion checks;
//! * [`bundles`] - extension spaces and tori, automorphy and metric
//!   exponents, Chern forms and polarized-abelian-variety positivity;
//! * [`problem`] - the JSON problem-file/report interface used by the `lmhs`
//!   command-line tool.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the whole API is safe to share across threads.

pub mod bundles;
pub mod error;
pub mod exact;
pub mod filtration;
pub mod fixtures;
pub mod lie;
pub mod mhs;
pub mod nilpotent;
pub mod problem;
pub mod strata;

pub use error::Error;
pub use exact::{GaussianRational, Mat, Rational, RationalLattice, Signature, Subspace};

#[cfg(test)]
mod thread_safety {
    // every value in the crate is immutable plain data, so the whole API
    // is shareable across threads; keep that contract compile-checked
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::exact::GaussianRational>();
        assert_send_sync::<crate::exact::Mat>();
        assert_send_sync::<crate::exact::Subspace>();
        assert_send_sync::<crate::exact::RationalLattice>();
        assert_send_sync::<crate::filtration::PolarizedSpace>();
        assert_send_sync::<crate::filtration::WeightFiltration>();
        assert_send_sync::<crate::filtration::HodgeFiltration>();
        assert_send_sync::<crate::nilpotent::NilpotentCone>();
        assert_send_sync::<crate::nilpotent::Sl2Triple>();
        assert_send_sync::<crate::mhs::DeligneSplitting>();
        assert_send_sync::<crate::mhs::LmhsCertificate>();
        assert_send_sync::<crate::lie::BoundaryLieData>();
        assert_send_sync::<crate::strata::BoundaryComplex>();
        assert_send_sync::<crate::bundles::ExtensionSpace>();
    }
}
