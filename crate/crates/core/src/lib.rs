//! Marked quadratic Gröbner bases for multi-Rees algebras of principal
//! strongly stable ideals, with brute-force verification at bounded degree.
//!
//! ```
//! use borel_rees::{fixtures, Basis, TPolynomial};
//!
//! let fam = fixtures::example_family();
//! assert!(fam.is_closed());
//! let basis = Basis::build(&fam).unwrap();
//! let f = TPolynomial::parse("T[1,3]*T[1,4]").unwrap();
//! assert_eq!(basis.normal_form(&f).unwrap().to_string(), "T[1,2]*T[1,5]");
//! ```

pub mod certificate;
mod error;
mod exec;
pub mod family;
pub mod fixtures;
pub mod inversions;
pub mod monomial;
pub mod oracle;
pub mod presentation;

pub use certificate::{certify, Certificate, Conclusion};
pub use error::{Error, Result};
pub use exec::Execution;
pub use family::{
    ClosureReport, ClosureWitness, FamilySpec, GeneratorRef, LevelSpec, LeveledFamily, Mode,
    PairRelation,
};
pub use inversions::{
    comparability_number, inversion_count, reduction_level, LevelMatrix, ReductionMeasure,
};
pub use monomial::{
    borel_closure, borel_member, ord_pair, revlex_cmp, sort_pair, Monomial, MonomialPair,
};
pub use oracle::{run_suite, SuiteReport, VerifyOptions};
pub use presentation::{psi_eval, Basis, MarkedBinomial, PsiImage, TMonomial, TPolynomial};
