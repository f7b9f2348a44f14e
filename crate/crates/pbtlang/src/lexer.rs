//! Tokenizer with Python's indentation rules.

use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    /// f-string body after escape processing; braces are resolved by the parser.
    FStr(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", ":=", "<<", ">>", "+", "-", "*", "/", "%", "@", "<", ">", "=",
    "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "~", "&", "|", "^",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    indents: Vec<usize>,
    brackets: Vec<(char, usize, usize)>,
    out: Vec<Token>,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            indents: vec![0],
            brackets: Vec::new(),
            out: Vec::new(),
            _src: src,
        }
    }

    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(msg, self.line, self.col)
    }

    fn push(&mut self, tok: Tok, line: usize, col: usize) {
        self.out.push(Token { tok, line, col });
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        let mut at_line_start = true;
        loop {
            if at_line_start && self.brackets.is_empty() {
                if !self.handle_indentation()? {
                    break;
                }
                at_line_start = false;
            }
            let Some(c) = self.peek(0) else { break };
            let (line, col) = (self.line, self.col);
            match c {
                '\n' => {
                    self.bump();
                    if self.brackets.is_empty() {
                        self.push(Tok::Newline, line, col);
                        at_line_start = true;
                    }
                }
                ' ' | '\t' | '\r' | '\x0c' => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '\\' if self.peek(1) == Some('\r') && self.peek(2) == Some('\n') => {
                    self.bump();
                    self.bump();
                    self.bump();
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let tok = self.number()?;
                    self.push(tok, line, col);
                }
                c if c == '_' || c.is_alphabetic() => {
                    if let Some(tok) = self.maybe_prefixed_string()? {
                        self.push(tok, line, col);
                        continue;
                    }
                    let mut name = String::new();
                    while let Some(c) = self.peek(0) {
                        if c == '_' || c.is_alphanumeric() {
                            name.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.push(Tok::Name(name), line, col);
                }
                '"' | '\'' => {
                    let s = self.string_body(false)?;
                    self.push(Tok::Str(s), line, col);
                }
                _ => {
                    let op = OPERATORS
                        .iter()
                        .find(|op| op.chars().enumerate().all(|(i, oc)| self.peek(i) == Some(oc)))
                        .copied()
                        .ok_or_else(|| self.err(format!("invalid character '{c}'")))?;
                    for _ in 0..op.chars().count() {
                        self.bump();
                    }
                    match op {
                        "(" | "[" | "{" => self.brackets.push((op.chars().next().unwrap(), line, col)),
                        ")" | "]" | "}" => {
                            let close = op.chars().next().unwrap();
                            let open = match close {
                                ')' => '(',
                                ']' => '[',
                                _ => '{',
                            };
                            match self.brackets.pop() {
                                Some((o, _, _)) if o == open => {}
                                Some((o, l, _)) => {
                                    return Err(SyntaxError::new(
                                        format!("closing parenthesis '{close}' does not match opening parenthesis '{o}' on line {l}"),
                                        line,
                                        col,
                                    ))
                                }
                                None => {
                                    return Err(SyntaxError::new(format!("unmatched '{close}'"), line, col))
                                }
                            }
                        }
                        _ => {}
                    }
                    self.push(Tok::Op(op), line, col);
                }
            }
        }
        if let Some((open, l, c)) = self.brackets.last() {
            return Err(SyntaxError::new(format!("'{open}' was never closed"), *l, *c));
        }
        let (line, col) = (self.line, self.col);
        if !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline) | Some(Tok::Dedent)) {
            self.push(Tok::Newline, line, col);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, line, col);
        }
        self.push(Tok::Eof, line, col);
        Ok(self.out)
    }

    /// Measures the indentation of the next logical line. Returns false at end of input.
    fn handle_indentation(&mut self) -> Result<bool, SyntaxError> {
        loop {
            let mut width = 0usize;
            while let Some(c) = self.peek(0) {
                match c {
                    ' ' => width += 1,
                    '\t' => width = (width / 8 + 1) * 8,
                    '\x0c' | '\r' => {}
                    _ => break,
                }
                self.bump();
            }
            match self.peek(0) {
                None => return Ok(false),
                Some('\n') => {
                    self.bump();
                    continue;
                }
                Some('#') => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    continue;
                }
                Some(_) => {}
            }
            let (line, col) = (self.line, self.col);
            let current = *self.indents.last().unwrap();
            if width > current {
                self.indents.push(width);
                self.push(Tok::Indent, line, col);
            } else if width < current {
                while width < *self.indents.last().unwrap() {
                    self.indents.pop();
                    self.push(Tok::Dedent, line, col);
                }
                if width != *self.indents.last().unwrap() {
                    return Err(SyntaxError::new(
                        "unindent does not match any outer indentation level",
                        line,
                        col,
                    ));
                }
            }
            return Ok(true);
        }
    }

    fn number(&mut self) -> Result<Tok, SyntaxError> {
        let mut text = String::new();
        if self.peek(0) == Some('0') && matches!(self.peek(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B')) {
            self.bump();
            let radix = match self.bump().unwrap().to_ascii_lowercase() {
                'x' => 16,
                'o' => 8,
                _ => 2,
            };
            while let Some(c) = self.peek(0) {
                if c.is_digit(radix) || c == '_' {
                    if c != '_' {
                        text.push(c);
                    }
                    self.bump();
                } else {
                    break;
                }
            }
            return i64::from_str_radix(&text, radix)
                .map(Tok::Int)
                .map_err(|_| self.err("invalid integer literal"));
        }
        let mut is_float = false;
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() || c == '_' {
                if c != '_' {
                    text.push(c);
                }
                self.bump();
            } else if c == '.' && !is_float && self.peek(1) != Some('.') {
                is_float = true;
                text.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E')
                && (self.peek(1).is_some_and(|d| d.is_ascii_digit())
                    || (matches!(self.peek(1), Some('+' | '-')) && self.peek(2).is_some_and(|d| d.is_ascii_digit())))
            {
                is_float = true;
                text.push('e');
                self.bump();
                if let Some(sign @ ('+' | '-')) = self.peek(0) {
                    text.push(sign);
                    self.bump();
                }
            } else {
                break;
            }
        }
        if self.peek(0).is_some_and(|c| c.is_alphabetic() || c == '_') {
            return Err(self.err("invalid decimal literal"));
        }
        if is_float {
            text.parse::<f64>().map(Tok::Float).map_err(|_| self.err("invalid float literal"))
        } else {
            match text.parse::<i64>() {
                Ok(v) => Ok(Tok::Int(v)),
                Err(_) => text.parse::<f64>().map(Tok::Float).map_err(|_| self.err("invalid integer literal")),
            }
        }
    }

    fn maybe_prefixed_string(&mut self) -> Result<Option<Tok>, SyntaxError> {
        let mut prefix = String::new();
        let mut i = 0;
        while let Some(c) = self.peek(i) {
            if matches!(c.to_ascii_lowercase(), 'r' | 'b' | 'f' | 'u') && i < 2 {
                prefix.push(c.to_ascii_lowercase());
                i += 1;
            } else {
                break;
            }
        }
        if prefix.is_empty() || !matches!(self.peek(i), Some('"' | '\'')) {
            return Ok(None);
        }
        for _ in 0..i {
            self.bump();
        }
        let raw = prefix.contains('r');
        let body = self.string_body(raw)?;
        if prefix.contains('f') {
            Ok(Some(Tok::FStr(body)))
        } else {
            Ok(Some(Tok::Str(body)))
        }
    }

    fn string_body(&mut self, raw: bool) -> Result<String, SyntaxError> {
        let (line, col) = (self.line, self.col);
        let quote = self.bump().unwrap();
        let triple = self.peek(0) == Some(quote) && self.peek(1) == Some(quote);
        if triple {
            self.bump();
            self.bump();
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                return Err(SyntaxError::new("unterminated string literal", line, col));
            };
            if c == quote {
                if !triple {
                    self.bump();
                    return Ok(out);
                }
                if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
                    self.bump();
                    self.bump();
                    self.bump();
                    return Ok(out);
                }
                out.push(c);
                self.bump();
                continue;
            }
            if c == '\n' && !triple {
                return Err(SyntaxError::new("unterminated string literal", line, col));
            }
            if c == '\\' {
                self.bump();
                let Some(e) = self.bump() else {
                    return Err(SyntaxError::new("unterminated string literal", line, col));
                };
                if raw {
                    out.push('\\');
                    out.push(e);
                    continue;
                }
                match e {
                    '\n' => {}
                    'n' => out.push('\n'),
                    't' => out.push('\t'),
                    'r' => out.push('\r'),
                    '0' => out.push('\0'),
                    '\\' => out.push('\\'),
                    '\'' => out.push('\''),
                    '"' => out.push('"'),
                    'x' => {
                        let hex: String = (0..2).filter_map(|_| self.bump()).collect();
                        let v = u32::from_str_radix(&hex, 16).map_err(|_| self.err("invalid \\x escape"))?;
                        out.push(char::from_u32(v).unwrap_or('\u{fffd}'));
                    }
                    'u' => {
                        let hex: String = (0..4).filter_map(|_| self.bump()).collect();
                        let v = u32::from_str_radix(&hex, 16).map_err(|_| self.err("invalid \\u escape"))?;
                        out.push(char::from_u32(v).unwrap_or('\u{fffd}'));
                    }
                    other => {
                        out.push('\\');
                        out.push(other);
                    }
                }
                continue;
            }
            out.push(c);
            self.bump();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_indent_and_dedent() {
        let toks = kinds("if x:\n    y = 1\nz\n");
        assert!(toks.contains(&Tok::Indent));
        assert!(toks.contains(&Tok::Dedent));
    }

    #[test]
    fn brackets_join_lines() {
        let toks = kinds("f(1,\n  2)\n");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Newline).count(), 1);
    }

    #[test]
    fn unbalanced_paren_is_reported() {
        let err = tokenize("f(1, 2\n").unwrap_err();
        assert!(err.msg.contains("never closed"));
        let err = tokenize("f(1, 2))\n").unwrap_err();
        assert!(err.msg.contains("unmatched"));
    }

    #[test]
    fn numbers_and_strings() {
        assert_eq!(kinds("1_000 0x10 2.5 1e3 'a\\nb'")[..5], [
            Tok::Int(1000),
            Tok::Int(16),
            Tok::Float(2.5),
            Tok::Float(1000.0),
            Tok::Str("a\nb".into())
        ]);
        assert_eq!(kinds("f\"x{y}\"")[0], Tok::FStr("x{y}".into()));
    }

    #[test]
    fn bad_dedent() {
        let err = tokenize("if x:\n        a\n    b\n").unwrap_err();
        assert!(err.msg.contains("unindent"));
    }
}
