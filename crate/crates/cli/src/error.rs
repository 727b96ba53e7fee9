use std::fmt;

use nevlab::NevError;

/// Exit code for a completed run.
pub const EXIT_OK: i32 = 0;
/// Bad arguments, unreadable or invalid input.
pub const EXIT_USAGE: i32 = 1;
/// A hypothesis failed; the output is report-only.
pub const EXIT_HYPOTHESIS: i32 = 2;
/// Hard numeric failure.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(NevError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lib(e) => match e {
                NevError::Usage(_)
                | NevError::Parse(_)
                | NevError::Unsupported(_)
                | NevError::Size(_) => EXIT_USAGE,
                NevError::Hypothesis(_) | NevError::MapInHypersurface(_) => EXIT_HYPOTHESIS,
                NevError::Numeric(_) | NevError::DegenerateLine(_) => EXIT_NUMERIC,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<NevError> for CliError {
    fn from(e: NevError) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_mapping() {
        let lib = |e: NevError| CliError::from(e).exit_code();
        assert_eq!(lib(NevError::Usage("x".into())), EXIT_USAGE);
        assert_eq!(lib(NevError::Size("x".into())), EXIT_USAGE);
        assert_eq!(lib(NevError::Hypothesis("x".into())), EXIT_HYPOTHESIS);
        assert_eq!(
            lib(NevError::MapInHypersurface("x".into())),
            EXIT_HYPOTHESIS
        );
        assert_eq!(lib(NevError::Numeric("x".into())), EXIT_NUMERIC);
        assert_eq!(lib(NevError::DegenerateLine("x".into())), EXIT_NUMERIC);
        assert_eq!(CliError::usage("x").exit_code(), EXIT_USAGE);
    }
}
