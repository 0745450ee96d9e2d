use std::fmt;

/// A failure carrying the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        Self::with_code(1, message)
    }

    /// Bad input data, augmenter failures and invalid configuration values.
    pub fn data(message: impl Into<String>) -> Self {
        Self::with_code(2, message)
    }

    pub fn model(message: impl Into<String>) -> Self {
        Self::with_code(3, message)
    }

    pub fn image(message: impl Into<String>) -> Self {
        Self::with_code(4, message)
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::with_code(5, message)
    }

    fn with_code(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
