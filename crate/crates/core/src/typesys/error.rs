use thiserror::Error;

use crate::span::Span;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("sort error: expected {expected}, found {found}")]
    SortError {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String, span: Span },
    #[error("cannot synthesize a type for {what}; add an annotation")]
    CannotSynthesize { what: String, span: Span },
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("`{name}` is defined more than once")]
    DuplicateDefinition { name: String, span: Span },
    #[error("type alias `{name}` was not expanded")]
    UnexpandedAlias { name: String, span: Span },
    #[error("integer overflow in refinement arithmetic")]
    Overflow { span: Span },
}

impl TypeError {
    pub fn span(&self) -> Span {
        match self {
            TypeError::SortError { span, .. }
            | TypeError::UnboundVariable { span, .. }
            | TypeError::CannotSynthesize { span, .. }
            | TypeError::TypeMismatch { span, .. }
            | TypeError::DuplicateDefinition { span, .. }
            | TypeError::UnexpandedAlias { span, .. }
            | TypeError::Overflow { span } => *span,
        }
    }
}
