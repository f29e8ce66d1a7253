//! HTTP API and command-line front end for scenario runs.
//!
//! [`api::router`] builds the `/v1` routes over a shared
//! [`ScenarioStore`](epiplan::ScenarioStore). The `epiplan` binary wraps the
//! same operations as `simulate`, `branch`, `summary` and `serve`
//! subcommands.

pub mod api;
pub mod cli;
pub mod error;

pub use api::{router, AppState};
pub use error::ApiError;
