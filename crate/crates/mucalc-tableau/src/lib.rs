//! Proof trees for timed and untimed μ-calculus sequents: rule application,
//! structural validation, dependency orderings, the success check and
//! text certificates.

pub mod bradfield;
pub mod cert;
pub mod deps;
pub mod formulas;
pub mod sequent;
pub mod success;
pub mod tableau;
pub mod tnf;

pub use bradfield::{bradfield_relations, BradfieldRelations};
pub use cert::{emit_certificate, parse_certificate, replay, seal, CertError, Certificate, Replay};
pub use deps::{dependency_relations, local_relation, DependencyBundle};
pub use formulas::{companion_fix, companion_vars, influence_valuation, node_formula, node_formula_with};
pub use sequent::{apply_rule, ForallWitness, RuleApp, RuleError, Sequent};
pub use success::{analyze, check_success, judge, LeafVerdict, Verdict};
pub use tableau::{validate_tableau, Intervals, LeafKind, Mode, Node, Shape, Tableau, TableauError};
pub use tnf::{is_tnf, TnfViolation};
