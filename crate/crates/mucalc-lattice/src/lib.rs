//! Finite relations, monotone functions on finite powersets, and support
//! orderings.

pub mod monotone;
pub mod relation;
pub mod set;
pub mod support;

pub use monotone::{
    all_monotone, compose_sigma, extremal_fixpoint, iterate, kleene_stages, random_monotone, random_subset,
    tarski_fixpoint, Evidence, MonotoneSetFn, NotMonotone, Sigma,
};
pub use relation::{quotient_analysis, FiniteRelation, QuotientAnalysis};
pub use set::Set;
pub use support::{
    is_support_ordering, sigma_maximal_support, support_theory_check, CheckOutcome, Scope,
    SupportOrdering, SupportReport,
};
