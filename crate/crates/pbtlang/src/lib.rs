//! An interpreter for the subset of Python used by hypothesis-style property tests.
//!
//! Host code exposes modules and objects through [`NativeObject`] and
//! [`Interpreter::register_module`].

pub mod ast;
pub mod builtins;
mod error;
pub mod interp;
mod lexer;
mod parser;
mod stdlib;
pub mod value;

pub use error::SyntaxError;
pub use interp::Interpreter;
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_expression, parse_module};
pub use value::{Builtin, Dict, Exc, Kwargs, ModuleObj, NativeObject, Value};

/// Parse failure or uncaught exception from [`run_source`].
#[derive(Debug)]
pub enum RunError {
    Syntax(SyntaxError),
    Exception(Exc),
}

/// Parses and executes `src`, returning its globals.
pub fn run_source(interp: &mut Interpreter, src: &str) -> Result<value::Scope, RunError> {
    let module = parse_module(src).map_err(RunError::Syntax)?;
    interp.run_module(&module).map_err(RunError::Exception)
}
