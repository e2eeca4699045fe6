//! Command-line and HTTP front ends for `coarray-core`.
//!
//! [`api`] holds the request/response types shared by both front ends, so the
//! CLI's `--format json` output and the service's response bodies are the
//! same bytes.

pub mod api;
pub mod error;
pub mod render;
pub mod service;
pub mod svg;

pub use api::{to_json, Limits};
pub use error::{ApiError, ApiResult, ErrorEnvelope, ErrorKind};
