use thiserror::Error;

/// Failures before a certificate can be produced. All map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("command `{command}` does not accept problems of kind `{kind}`")]
    Unsupported { command: &'static str, kind: &'static str },

    #[error(transparent)]
    Library(#[from] renyivar::Error),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Field { field: field.into(), message: message.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
