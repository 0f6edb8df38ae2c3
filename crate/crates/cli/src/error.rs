//! Error reporting: every failure becomes one JSON line
//! `{"code": ..., "message": ..., "witness": ...}` on stderr.

use serde_json::{json, Value};
use shallowcode::ackermann::AckError;
use shallowcode::channel::ChannelError;
use shallowcode::circuit::CircuitError;
use shallowcode::codec::CodecError;
use shallowcode::disperser::DisperserError;
use shallowcode::gadgets::GadgetError;
use shallowcode::galois::FieldError;
use shallowcode::typical::TypicalError;

/// Exit status for a check that ran and found a counterexample.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for bad usage, bad inputs and unmet preconditions.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub witness: Option<Value>,
    pub exit: i32,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> CliError {
        CliError {
            code,
            message: message.into(),
            witness: None,
            exit: EXIT_USAGE,
        }
    }

    pub fn usage(message: impl Into<String>) -> CliError {
        CliError::new("Usage", message)
    }

    pub fn failed(
        code: &'static str,
        message: impl Into<String>,
        witness: Option<Value>,
    ) -> CliError {
        CliError {
            code,
            message: message.into(),
            witness,
            exit: EXIT_FAILED,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "code": self.code, "message": self.message });
        if let Some(w) = &self.witness {
            v["witness"] = w.clone();
        }
        v
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("Io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new("Io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("Format", e.to_string())
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::new("Field", e.to_string())
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        let code = match e {
            ChannelError::Format(_) => "Format",
            _ => "InvalidChannel",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        let code = match e {
            CircuitError::TooManyInputs(..) => "TooLarge",
            CircuitError::Format(_) => "Format",
            _ => "InvalidCircuit",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<TypicalError> for CliError {
    fn from(e: TypicalError) -> Self {
        let code = match e {
            TypicalError::TooLarge { .. } => "TooLarge",
            _ => "BadShape",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<DisperserError> for CliError {
    fn from(e: DisperserError) -> Self {
        match e {
            DisperserError::TooLarge(..) => CliError::new("TooLarge", e.to_string()),
            DisperserError::Exhausted(_) => CliError::failed("Exhausted", e.to_string(), None),
            DisperserError::Format(_) => CliError::new("Format", e.to_string()),
            _ => CliError::new("BadShape", e.to_string()),
        }
    }
}

impl From<AckError> for CliError {
    fn from(e: AckError) -> Self {
        let code = match e {
            AckError::BeyondCap | AckError::InputTooLarge(_) => "TooLarge",
            _ => "BadShape",
        };
        CliError::new(code, e.to_string())
    }
}

fn gadget_code(e: &GadgetError) -> &'static str {
    match e {
        GadgetError::BadShape(_) | GadgetError::ArityMismatch { .. } => "BadShape",
        GadgetError::TooLarge { .. } => "TooLarge",
        GadgetError::Exhausted { .. } => "Exhausted",
        GadgetError::PreconditionFailed { .. } => "PreconditionFailed",
        GadgetError::RangesDontAbut => "RangesDontAbut",
        GadgetError::DepthBudgetTooSmall(_) => "DepthBudgetTooSmall",
        GadgetError::Stage { source, .. } => gadget_code(source),
        GadgetError::Circuit(_) => "InvalidCircuit",
        GadgetError::Disperser(DisperserError::TooLarge(..)) => "TooLarge",
        GadgetError::Disperser(_) => "Disperser",
        GadgetError::Field(_) => "Field",
    }
}

impl From<GadgetError> for CliError {
    fn from(e: GadgetError) -> Self {
        let code = gadget_code(&e);
        let message = e.to_string();
        match e.witness() {
            Some(w) => CliError::failed(code, message, Some(json!(w))),
            None if code == "Exhausted" => CliError::failed(code, message, None),
            None => CliError::new(code, message),
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::RateAboveCapacity { .. } => {
                CliError::new("RateAboveCapacity", e.to_string())
            }
            CodecError::BadShape(_) => CliError::new("BadShape", e.to_string()),
            CodecError::TooLarge { .. } => CliError::new("TooLarge", e.to_string()),
            CodecError::EmptySupport => CliError::new("EmptySupport", e.to_string()),
            CodecError::Format(_) => CliError::new("Format", e.to_string()),
            CodecError::Gadget(g) => g.into(),
            CodecError::Disperser(d) => d.into(),
            CodecError::Circuit(c) => c.into(),
            CodecError::Field(f) => f.into(),
            CodecError::Typical(t) => t.into(),
        }
    }
}
