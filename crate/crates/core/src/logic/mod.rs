//! First-order terms, literals and clauses; matching against ground facts,
//! θ-subsumption and mode declarations.

mod matching;
mod mode;
mod parser;
mod subsume;
mod term;

pub use matching::{body_satisfiable, match_body, FactSet};
pub(crate) use matching::{for_each_solution, Bindings};
pub use mode::{parse_mode_bias, ModeAtom, ModeBias, ModeTerm, Placemarker, Placement};
pub use parser::{parse_atom, parse_clause, parse_program, parse_term};
pub use subsume::theta_subsumes;
pub use term::{sym, Clause, HeadKind, Literal, Substitution, Sym, Term, Theory};
