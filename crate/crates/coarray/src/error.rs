use serde::Serialize;
use serde_json::Value;

/// How a failure should be reported to a client.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or invalid user input (HTTP 400).
    Input,
    /// Well-formed input that violates a domain rule (HTTP 422).
    Domain,
    /// No such route (HTTP 404).
    NotFound,
    /// Route exists but not for this method (HTTP 405).
    MethodNotAllowed,
    /// Anything else (HTTP 500).
    Internal,
}

/// Machine code, human message and optional structured detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEnvelope {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub envelope: ErrorEnvelope,
}

impl ApiError {
    pub fn new(kind: ErrorKind, code: &str, message: impl Into<String>) -> Self {
        Self {
            kind,
            envelope: ErrorEnvelope {
                code: code.to_string(),
                message: message.into(),
                detail: None,
            },
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.envelope.detail = Some(detail);
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Input, "BAD_REQUEST", message)
    }

    pub fn code(&self) -> &str {
        &self.envelope.code
    }

    pub fn http_status(&self) -> u16 {
        match self.kind {
            ErrorKind::Input => 400,
            ErrorKind::Domain => 422,
            ErrorKind::NotFound => 404,
            ErrorKind::MethodNotAllowed => 405,
            ErrorKind::Internal => 500,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.envelope).expect("envelope serializes")
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.envelope.code, self.envelope.message)
    }
}

impl std::error::Error for ApiError {}

impl From<coarray_core::Error> for ApiError {
    fn from(err: coarray_core::Error) -> Self {
        use coarray_core::Error as E;
        let kind = if err.is_input_error() {
            ErrorKind::Input
        } else {
            ErrorKind::Domain
        };
        let detail = match &err {
            E::RankDeficient { sources, bound } => Some(serde_json::json!({
                "sources": sources,
                "central_ula_bound": bound,
            })),
            E::ApertureTooLarge { aperture, cap } => Some(serde_json::json!({
                "aperture": aperture,
                "cap": cap,
            })),
            _ => None,
        };
        let mut out = ApiError::new(kind, err.code(), err.to_string());
        out.envelope.detail = detail;
        out
    }
}

impl From<serde_json::Error> for ApiError {
    fn from(err: serde_json::Error) -> Self {
        let msg = err.to_string();
        if msg.starts_with("unknown field") {
            ApiError::new(ErrorKind::Input, "UNKNOWN_FIELD", msg)
        } else {
            ApiError::bad_request(msg)
        }
    }
}

impl From<std::io::Error> for ApiError {
    fn from(err: std::io::Error) -> Self {
        ApiError::new(ErrorKind::Internal, "IO_ERROR", err.to_string())
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
