//! Modal mu-calculus formulas with the two timed modalities: syntax tree,
//! parser and printer, positive normal form, capture-free substitution and
//! definition lists.

mod ast;
mod dlist;
mod parse;
mod pnf;
mod print;
mod subst;

pub use ast::{Fix, Formula, Labels, SUGAR_VAR};
pub use dlist::{DefinitionList, DlError, Slice};
pub use parse::{is_ident_char, is_ident_start, parse_formula, ParseError};
pub use pnf::{check_well_formed, has_distinct_binders, is_pnf, is_positive, to_pnf, Violation};
pub use subst::{fresh_name, subst1, substitute, SubstError};
