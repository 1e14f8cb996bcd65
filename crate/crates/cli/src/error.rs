use thiserror::Error;
use trm_core::CodeError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files.
    #[error("{0}")]
    Usage(String),
    /// Well-formed request rejected by the codes themselves.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Format(_) | CodeError::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

pub fn io_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::from(CodeError::Format("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(CodeError::Parse("x".into())).exit_code(), 1);
        let shape = CodeError::ShapeMismatch {
            expected: vec![2],
            actual: vec![4],
        };
        assert_eq!(CliError::from(shape).exit_code(), 2);
    }
}
