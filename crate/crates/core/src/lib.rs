//! Exponential-polynomial algebra and theorem-driven solvers for Fermat-type
//! delay-differential equations
//!
//! ```text
//! f(z)^n + a (f^(l)(z + c))^m = p1(z) e^{a1 z^k} + p2(z) e^{a2 z^k}
//! ```
//!
//! Solutions are exponential polynomials ([`ExpPoly`]); every claimed
//! solution carries a substitution certificate whose residual normalizes to
//! the empty canonical form.

pub mod ansatz;
pub mod classifier;
pub mod equation;
pub mod error;
pub mod growth;
pub mod exp_poly;
pub mod expr;
pub mod poly;
pub mod scalar;

pub use ansatz::{propose_frequencies, search, AnsatzSpec, SearchResult, StartOutcome};
pub use classifier::{classify, SolutionReport, TheoremBranch};
pub use equation::{Certificate, FermatDde, Forcing};
pub use error::{Error, Result};
pub use exp_poly::{normalize, ExpPoly, ExpTerm};
pub use expr::{parse, parse_constant, parse_exp_poly, Expr};
pub use poly::Poly;
pub use scalar::{complex_nth_roots, set_tolerance, tolerance, ComplexScalar, Tolerance};
