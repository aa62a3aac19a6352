//! Text formats and the seeded instance generator.

mod generate;
mod instance;
mod plan;

use thiserror::Error;

pub use generate::{gen_instance, GenError};
pub use instance::{parse_instance, write_instance};
pub use plan::{parse_plan, write_plan, PlanError, PlanFile, StockLine, Totals};

use crate::model::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] ValidationReport),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self::Syntax {
            line,
            message: message.into(),
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Syntax { line, .. } => Some(*line),
            Self::Invalid(_) => None,
        }
    }
}
