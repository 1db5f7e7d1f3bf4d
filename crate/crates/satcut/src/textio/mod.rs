//! Concrete syntax for formulas, sequents, pushdown systems, automata,
//! finite models and proofs.

mod files;
mod formula;
mod lexer;
mod proof;

use satcut_core::calculus::CheckError;

pub use files::{
    parse_apds, parse_fact, parse_fdl_model, parse_fsa, print_apds, print_apds_flagged, print_fact, print_fdl_model,
    print_fsa,
};
pub use formula::{parse_formula, parse_sequent, parse_term, print_formula, print_sequent, print_term};
pub use lexer::SourceSpan;
pub use proof::{parse_proof, parse_proof_unchecked, print_judgement, print_proof, ProofStyle};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("{span}: unexpected character")]
    Lex { span: SourceSpan },
    #[error("{span}: expected {}, found {found}", expected.join(" or "))]
    Syntax { span: SourceSpan, expected: Vec<String>, found: String },
    #[error("{span}: {message}")]
    Invalid { span: SourceSpan, message: String },
    #[error("{span}: rule fits no pushdown schema: {message}")]
    Kind { span: SourceSpan, message: String },
    #[error("proof does not check: {0}")]
    Check(CheckError),
}

impl TextError {
    /// Where the error is; a check failure has no source position.
    pub fn span(&self) -> SourceSpan {
        match self {
            TextError::Lex { span }
            | TextError::Syntax { span, .. }
            | TextError::Invalid { span, .. }
            | TextError::Kind { span, .. } => *span,
            TextError::Check(_) => SourceSpan::default(),
        }
    }
}
