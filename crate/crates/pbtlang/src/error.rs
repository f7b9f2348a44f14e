use std::fmt;

/// A source that could not be turned into a syntax tree.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    pub msg: String,
    pub line: usize,
    pub col: usize,
    /// Valid Python that this interpreter does not implement (classes, generators, ...).
    pub unsupported: bool,
}

impl SyntaxError {
    pub fn new(msg: impl Into<String>, line: usize, col: usize) -> Self {
        Self { msg: msg.into(), line, col, unsupported: false }
    }

    pub fn unsupported(msg: impl Into<String>, line: usize, col: usize) -> Self {
        Self { msg: msg.into(), line, col, unsupported: true }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.unsupported { "NotImplementedError" } else { "SyntaxError" };
        write!(f, "{kind}: {} (line {}, column {})", self.msg, self.line, self.col)
    }
}
