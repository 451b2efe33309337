use std::collections::BTreeSet;
use std::sync::Arc;

use mucalc_formula::{fresh_name, is_positive, subst1, Fix, Formula};
use mucalc_lattice::{compose_sigma, MonotoneSetFn, NotMonotone, Sigma};
use mucalc_models::{Model, Valuation};

use crate::eval::{eval, EvalError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunctionError {
    #[error("`{0}` is not positive in the formula")]
    NotPositive(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    NotMonotone(#[from] NotMonotone),
}

pub fn sigma_of(fix: Fix) -> Sigma {
    match fix {
        Fix::Mu => Sigma::Mu,
        Fix::Nu => Sigma::Nu,
    }
}

/// `S ↦ ⟦phi⟧ V[Z := S]`.
pub fn formula_function(z: &str, phi: &Formula, model: &Model, v: &Valuation) -> Result<MonotoneSetFn, FunctionError> {
    if !is_positive(z, phi) {
        return Err(FunctionError::NotPositive(z.to_string()));
    }
    eval(phi, model, v)?;
    let (z, phi, model, v) = (z.to_string(), phi.clone(), Arc::new(model.clone()), v.clone());
    Ok(MonotoneSetFn::unary(model.len(), move |x| {
        eval(&phi, &model, &v.with(z.clone(), x.clone())).expect("checked above")
    })?)
}

/// `(X, Y) ↦ ⟦phi⟧ V[Z1 := X, Z2 := Y]`.
pub fn formula_function2(
    z1: &str,
    z2: &str,
    phi: &Formula,
    model: &Model,
    v: &Valuation,
) -> Result<MonotoneSetFn, FunctionError> {
    for z in [z1, z2] {
        if !is_positive(z, phi) {
            return Err(FunctionError::NotPositive(z.to_string()));
        }
    }
    eval(phi, model, v)?;
    let (z1, z2, phi, model, v) = (z1.to_string(), z2.to_string(), phi.clone(), Arc::new(model.clone()), v.clone());
    Ok(MonotoneSetFn::binary(model.len(), move |x, y| {
        let w = v.with(z1.clone(), x.clone()).with(z2.clone(), y.clone());
        eval(&phi, &model, &w).expect("checked above")
    })?)
}

/// `Φ = Φ'[W := σ'Z'.Γ]` for the first maximal fixpoint subformula of Φ
/// (one not inside another fixpoint of Φ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedDecomposition {
    pub outer: Formula,
    pub hole: String,
    pub sigma: Fix,
    pub inner_var: String,
    pub inner_body: Formula,
}

pub fn decompose_nested(phi: &Formula) -> Option<NestedDecomposition> {
    let avoid: BTreeSet<String> = phi.all_vars();
    let hole = fresh_name("W", &avoid);
    let mut found = None;
    let outer = cut(phi, &hole, &mut found);
    let (sigma, inner_var, inner_body) = found?;
    Some(NestedDecomposition {
        outer,
        hole,
        sigma,
        inner_var,
        inner_body,
    })
}

fn cut(f: &Formula, hole: &str, found: &mut Option<(Fix, String, Formula)>) -> Formula {
    if found.is_some() {
        return f.clone();
    }
    let mut rec = |g: &Formula| Box::new(cut(g, hole, found));
    match f {
        Formula::Fix(s, z, body) => {
            *found = Some((*s, z.clone(), (**body).clone()));
            Formula::var(hole)
        }
        Formula::Var(_) => f.clone(),
        Formula::Not(a) => Formula::Not(rec(a)),
        Formula::And(a, b) => {
            let a = rec(a);
            Formula::And(a, rec(b))
        }
        Formula::Or(a, b) => {
            let a = rec(a);
            Formula::Or(a, rec(b))
        }
        Formula::Box(k, a) => Formula::Box(k.clone(), rec(a)),
        Formula::Diamond(k, a) => Formula::Diamond(k.clone(), rec(a)),
        Formula::Forall(a, b) => {
            let a = rec(a);
            Formula::Forall(a, rec(b))
        }
        Formula::Exists(a, b) => {
            let a = rec(a);
            Formula::Exists(a, rec(b))
        }
    }
}

/// `f[σ']g` with `f(X, Y) = ⟦Φ'⟧ V[Z := X, W := Y]` and
/// `g(X, Y) = ⟦Γ⟧ V[Z := X, Z' := Y]`; equal to the formula function of
/// `Z` in Φ.
pub fn nested_function(
    z: &str,
    phi: &Formula,
    model: &Model,
    v: &Valuation,
) -> Result<Option<MonotoneSetFn>, FunctionError> {
    let Some(d) = decompose_nested(phi) else {
        return Ok(None);
    };
    // A binder named Z inside the cut-out fixpoint shadows the outer Z, so
    // it is renamed apart first.
    let (inner_var, inner_body) = if d.inner_var == z {
        let fresh = fresh_name(z, &phi.all_vars());
        let body = subst1(&d.inner_body, z, &Formula::var(&fresh));
        (fresh, body)
    } else {
        (d.inner_var.clone(), d.inner_body.clone())
    };
    let f = formula_function2(z, &d.hole, &d.outer, model, v)?;
    let g = formula_function2(z, &inner_var, &inner_body, model, v)?;
    Ok(Some(compose_sigma(&f, &g, sigma_of(d.sigma))))
}
