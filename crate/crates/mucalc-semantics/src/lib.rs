//! Denotational semantics by fixpoint iteration: the ground truth the proof
//! engine is tested against.

mod eval;
mod function;

pub use eval::{
    eval, eval_with, extend_valuation, sequent_valid, unbound_free_vars, EvalConfig, EvalError, FixpointMethod,
};
pub use function::{
    decompose_nested, formula_function, formula_function2, nested_function, sigma_of, FunctionError,
    NestedDecomposition,
};
