//! Error taxonomy shared by every solver in the crate.
//!
//! `Domain` flags arguments that violate a precondition (a caller bug),
//! `EmptyP0Range` flags instances whose SIC power gap cannot be met by any
//! common-power choice, and `Infeasible` flags instances whose rate demands
//! exceed what the power budget supports. The latter two carry enough
//! diagnostics to report *which* constraint failed and by how much.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The SIC lower bound on the common power exceeds the power budget, so
    /// the common-power search interval is empty.
    #[error(
        "empty common-power range: SIC bound requires p0 >= {lower} W but the budget is {p_max} W"
    )]
    EmptyP0Range { lower: f64, p_max: f64 },

    /// The instance is infeasible: no allocation meets every rate demand.
    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),

    /// Config file or CSV plumbing failed.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

/// Which constraint made an instance infeasible.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// A common-rate share exceeds that user's demand cap.
    RateCap { user: usize, share: f64, demand: f64 },
    /// The minimum private powers outrun the available budget.
    PowerBudget { required: f64, available: f64 },
    /// Every point of the common-power grid failed feasibility screening;
    /// diagnostics are reported at the lower end of the grid.
    NoFeasibleP0 { p0_lower: f64, detail: String },
    /// A NOMA decoding layer cannot meet its rate demand and SIC gap.
    NomaLayer { layer: usize, required: f64, available: f64 },
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Infeasibility::RateCap { user, share, demand } => write!(
                f,
                "common-rate share {share} bit/s exceeds user {user}'s demand {demand} bit/s"
            ),
            Infeasibility::PowerBudget { required, available } => write!(
                f,
                "minimum private powers need {required} W but only {available} W remain"
            ),
            Infeasibility::NoFeasibleP0 { p0_lower, detail } => {
                write!(f, "no feasible common power; at p0 = {p0_lower} W: {detail}")
            }
            Infeasibility::NomaLayer { layer, required, available } => write!(
                f,
                "NOMA layer {layer} needs {required} W but only {available} W remain"
            ),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
