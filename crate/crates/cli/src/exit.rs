use std::fmt;
use std::path::Path;

use ramsey_core::RamseyError;

pub const SUCCESS: u8 = 0;
pub const VERIFICATION_FAILED: u8 = 1;
pub const SEARCH_EXHAUSTED: u8 = 2;
pub const USAGE: u8 = 64;
pub const PARSE: u8 = 65;
pub const NO_INPUT: u8 = 66;
pub const CANT_CREATE: u8 = 73;

/// An error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(USAGE, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<RamseyError> for Failure {
    fn from(e: RamseyError) -> Self {
        let code = match &e {
            RamseyError::Parse(_) => PARSE,
            RamseyError::NotCliqueFree(_) | RamseyError::CertificateMismatch(_) => {
                VERIFICATION_FAILED
            }
            RamseyError::Io(_) => CANT_CREATE,
            _ => USAGE,
        };
        Self::new(code, e.to_string())
    }
}

pub type CliResult<T = u8> = Result<T, Failure>;

pub fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(NO_INPUT, format!("cannot read {}: {e}", path.display())))
}

pub fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| {
            Failure::new(CANT_CREATE, format!("cannot create {}: {e}", dir.display()))
        })?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::new(CANT_CREATE, format!("cannot write {}: {e}", path.display())))
}
