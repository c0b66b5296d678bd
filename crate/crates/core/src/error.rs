use thiserror::Error;

use crate::flow::FlowError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: u32, reason: String },

    #[error("unknown location id {0}")]
    UnknownLocation(u32),

    #[error("unknown task id {0}")]
    UnknownTask(u32),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("failed to parse {what}: {source}")]
    Parse {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("instance has {tasks} autonomous tasks; the exhaustive solver accepts at most {limit}")]
    TooLarge { tasks: usize, limit: usize },

    #[error("plan does not match instance: {0}")]
    PlanMismatch(String),

    #[error(transparent)]
    Flow(#[from] FlowError),
}
