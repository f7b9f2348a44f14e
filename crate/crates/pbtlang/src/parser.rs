//! Recursive-descent parser producing [`crate::ast`] nodes.

use std::rc::Rc;

use crate::ast::*;
use crate::error::SyntaxError;
use crate::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

pub fn parse_module(src: &str) -> Result<Module, SyntaxError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut body = Vec::new();
    while !p.at(&Tok::Eof) {
        if p.eat(&Tok::Newline) {
            continue;
        }
        body.extend(p.statement()?);
    }
    Ok(Module { body })
}

/// Parses a single expression (used for f-string fields and guard expressions).
pub fn parse_expression(src: &str) -> Result<Expr, SyntaxError> {
    let toks = tokenize(src.trim())?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.testlist()?;
    while p.eat(&Tok::Newline) {}
    if !p.at(&Tok::Eof) {
        return Err(p.error("unexpected trailing input in expression"));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let t = &self.toks[self.pos];
        SyntaxError::new(msg, t.line, t.col)
    }

    fn unexpected(&self) -> SyntaxError {
        let what = match self.peek() {
            Tok::Name(n) => format!("'{n}'"),
            Tok::Int(i) => i.to_string(),
            Tok::Float(f) => f.to_string(),
            Tok::Str(_) | Tok::FStr(_) => "string literal".to_string(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Newline => "end of line".to_string(),
            Tok::Indent => "unexpected indent".to_string(),
            Tok::Dedent => "dedent".to_string(),
            Tok::Eof => "end of input".to_string(),
        };
        if matches!(self.peek(), Tok::Indent) {
            return self.error("unexpected indent");
        }
        self.error(format!("invalid syntax near {what}"))
    }

    fn expect_op(&mut self, op: &str) -> Result<(), SyntaxError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}'")).with_context(self.unexpected()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    fn name(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Name(n) if !KEYWORDS.contains(&n.as_str()) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn end_of_simple(&mut self) -> Result<(), SyntaxError> {
        if self.eat(&Tok::Newline) || self.at(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    // ---------------------------------------------------------------- statements

    fn statement(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let line = self.line();
        let stmt = match self.peek().clone() {
            Tok::Indent => return Err(self.error("unexpected indent")),
            Tok::Op("@") => self.decorated()?,
            Tok::Name(kw) => match kw.as_str() {
                "if" => {
                    self.advance();
                    self.if_rest(line)?
                }
                "while" => {
                    self.advance();
                    let test = self.namedexpr_test()?;
                    let body = self.block()?;
                    let orelse = self.else_block()?;
                    Stmt { kind: StmtKind::While(test, body, orelse), line }
                }
                "for" => {
                    self.advance();
                    let target = self.for_target()?;
                    self.expect_kw("in")?;
                    let iter = self.testlist()?;
                    let body = self.block()?;
                    let orelse = self.else_block()?;
                    Stmt { kind: StmtKind::For(target, iter, body, orelse), line }
                }
                "def" => self.funcdef(Vec::new())?,
                "with" => {
                    self.advance();
                    let mut items = Vec::new();
                    loop {
                        let ctx = self.test()?;
                        let target = if self.eat_kw("as") { Some(self.for_target_single()?) } else { None };
                        items.push((ctx, target));
                        if !self.eat_op(",") {
                            break;
                        }
                    }
                    let body = self.block()?;
                    Stmt { kind: StmtKind::With(items, body), line }
                }
                "try" => self.try_stmt()?,
                "class" => {
                    return Err(SyntaxError::unsupported(
                        "class definitions are not supported in generated tests",
                        line,
                        self.toks[self.pos].col,
                    ))
                }
                "async" => {
                    return Err(SyntaxError::unsupported(
                        "async functions are not supported",
                        line,
                        self.toks[self.pos].col,
                    ))
                }
                _ => return self.simple_statements(),
            },
            _ => return self.simple_statements(),
        };
        Ok(vec![stmt])
    }

    fn if_rest(&mut self, line: usize) -> Result<Stmt, SyntaxError> {
        let test = self.namedexpr_test()?;
        let body = self.block()?;
        let orelse = if self.at_kw("elif") {
            let l = self.line();
            self.advance();
            vec![self.if_rest(l)?]
        } else {
            self.else_block()?
        };
        Ok(Stmt { kind: StmtKind::If(test, body, orelse), line })
    }

    fn else_block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        if self.eat_kw("else") {
            self.block()
        } else {
            Ok(Vec::new())
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.expect_op(":")?;
        if !self.eat(&Tok::Newline) {
            return self.simple_statements();
        }
        if !self.eat(&Tok::Indent) {
            return Err(self.error("expected an indented block"));
        }
        let mut body = Vec::new();
        while !self.eat(&Tok::Dedent) {
            if self.at(&Tok::Eof) {
                break;
            }
            if self.eat(&Tok::Newline) {
                continue;
            }
            body.extend(self.statement()?);
        }
        Ok(body)
    }

    fn decorated(&mut self) -> Result<Stmt, SyntaxError> {
        let mut decorators = Vec::new();
        while self.eat_op("@") {
            decorators.push(self.namedexpr_test()?);
            if !self.eat(&Tok::Newline) {
                return Err(self.unexpected());
            }
        }
        if self.at_kw("def") {
            self.funcdef(decorators)
        } else if self.at_kw("class") {
            Err(SyntaxError::unsupported(
                "class definitions are not supported in generated tests",
                self.line(),
                self.toks[self.pos].col,
            ))
        } else {
            Err(self.unexpected())
        }
    }

    fn funcdef(&mut self, decorators: Vec<Expr>) -> Result<Stmt, SyntaxError> {
        let line = self.line();
        self.expect_kw("def")?;
        let name = self.name()?;
        self.expect_op("(")?;
        let params = self.params(")")?;
        self.expect_op(")")?;
        if self.eat_op("->") {
            self.test()?;
        }
        let body = self.block()?;
        Ok(Stmt {
            kind: StmtKind::FunctionDef(FunctionDef {
                name,
                params: Rc::new(params),
                decorators,
                body: Rc::new(body),
                line,
            }),
            line,
        })
    }

    fn params(&mut self, close: &str) -> Result<Params, SyntaxError> {
        let mut params = Params::default();
        let mut kwonly = false;
        let annotated = close == ")";
        while !self.at_op(close) {
            if self.eat_op("**") {
                params.varkw = Some(self.name()?);
                if annotated && self.eat_op(":") {
                    self.test()?;
                }
            } else if self.eat_op("*") {
                kwonly = true;
                if !self.at_op(",") && !self.at_op(close) {
                    params.varargs = Some(self.name()?);
                    if annotated && self.eat_op(":") {
                        self.test()?;
                    }
                }
            } else if self.eat_op("/") {
                // positional-only marker
            } else {
                let name = self.name()?;
                if annotated && self.eat_op(":") {
                    self.test()?;
                }
                let default = if self.eat_op("=") { Some(self.test()?) } else { None };
                let p = Param { name, default };
                if kwonly {
                    params.kwonly.push(p);
                } else {
                    if p.default.is_none() && params.positional.iter().any(|q| q.default.is_some()) {
                        return Err(self.error("non-default argument follows default argument"));
                    }
                    params.positional.push(p);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        let mut seen = std::collections::HashSet::new();
        for n in params.names() {
            if !seen.insert(n.to_string()) {
                return Err(self.error(format!("duplicate argument '{n}' in function definition")));
            }
        }
        Ok(params)
    }

    fn try_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let line = self.line();
        self.expect_kw("try")?;
        let body = self.block()?;
        let mut handlers = Vec::new();
        while self.eat_kw("except") {
            let mut kind = None;
            let mut name = None;
            if !self.at_op(":") {
                kind = Some(self.test()?);
                if self.eat_kw("as") {
                    name = Some(self.name()?);
                }
            }
            let hbody = self.block()?;
            handlers.push(ExceptHandler { kind, name, body: hbody });
        }
        let orelse = self.else_block()?;
        let finally = if self.eat_kw("finally") { self.block()? } else { Vec::new() };
        if handlers.is_empty() && finally.is_empty() {
            return Err(self.error("expected 'except' or 'finally' block"));
        }
        Ok(Stmt { kind: StmtKind::Try(body, handlers, orelse, finally), line })
    }

    fn simple_statements(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let mut out = vec![self.small_statement()?];
        while self.eat_op(";") {
            if self.at(&Tok::Newline) || self.at(&Tok::Eof) {
                break;
            }
            out.push(self.small_statement()?);
        }
        self.end_of_simple()?;
        Ok(out)
    }

    fn small_statement(&mut self) -> Result<Stmt, SyntaxError> {
        let line = self.line();
        let col = self.toks[self.pos].col;
        if let Tok::Name(kw) = self.peek().clone() {
            match kw.as_str() {
                "pass" => {
                    self.advance();
                    return Ok(Stmt { kind: StmtKind::Pass, line });
                }
                "break" => {
                    self.advance();
                    return Ok(Stmt { kind: StmtKind::Break, line });
                }
                "continue" => {
                    self.advance();
                    return Ok(Stmt { kind: StmtKind::Continue, line });
                }
                "return" => {
                    self.advance();
                    let v = if self.at_simple_end() { None } else { Some(self.testlist()?) };
                    return Ok(Stmt { kind: StmtKind::Return(v), line });
                }
                "raise" => {
                    self.advance();
                    let v = if self.at_simple_end() { None } else { Some(self.test()?) };
                    if self.eat_kw("from") {
                        self.test()?;
                    }
                    return Ok(Stmt { kind: StmtKind::Raise(v), line });
                }
                "global" => {
                    self.advance();
                    let mut names = vec![self.name()?];
                    while self.eat_op(",") {
                        names.push(self.name()?);
                    }
                    return Ok(Stmt { kind: StmtKind::Global(names), line });
                }
                "nonlocal" | "yield" | "await" => {
                    return Err(SyntaxError::unsupported(format!("'{kw}' is not supported"), line, col));
                }
                "del" => {
                    self.advance();
                    let e = self.testlist()?;
                    let targets = match e.kind {
                        ExprKind::Tuple(items) => {
                            items.into_iter().map(|i| self.to_target(i)).collect::<Result<_, _>>()?
                        }
                        _ => vec![self.to_target(e)?],
                    };
                    return Ok(Stmt { kind: StmtKind::Del(targets), line });
                }
                "assert" => {
                    self.advance();
                    let test = self.test()?;
                    let msg = if self.eat_op(",") { Some(self.test()?) } else { None };
                    return Ok(Stmt { kind: StmtKind::Assert(test, msg), line });
                }
                "import" => {
                    self.advance();
                    let mut names = Vec::new();
                    loop {
                        let name = self.dotted_name()?;
                        let asname = if self.eat_kw("as") { Some(self.name()?) } else { None };
                        names.push(Alias { name, asname });
                        if !self.eat_op(",") {
                            break;
                        }
                    }
                    return Ok(Stmt { kind: StmtKind::Import(names), line });
                }
                "from" => {
                    self.advance();
                    let mut module = String::new();
                    while self.at_op(".") || self.at_op("...") {
                        let Tok::Op(o) = self.advance().tok else { unreachable!() };
                        module.push_str(o);
                    }
                    if !self.at_kw("import") {
                        module.push_str(&self.dotted_name()?);
                    }
                    self.expect_kw("import")?;
                    let mut names = Vec::new();
                    if self.eat_op("*") {
                        names.push(Alias { name: "*".into(), asname: None });
                    } else {
                        let paren = self.eat_op("(");
                        loop {
                            if paren && self.at_op(")") {
                                break;
                            }
                            let name = self.name()?;
                            let asname = if self.eat_kw("as") { Some(self.name()?) } else { None };
                            names.push(Alias { name, asname });
                            if !self.eat_op(",") {
                                break;
                            }
                        }
                        if paren {
                            self.expect_op(")")?;
                        }
                    }
                    return Ok(Stmt { kind: StmtKind::ImportFrom(module, names), line });
                }
                _ => {}
            }
        }
        self.expr_statement(line)
    }

    fn at_simple_end(&self) -> bool {
        matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Op(";"))
    }

    fn dotted_name(&mut self) -> Result<String, SyntaxError> {
        let mut name = self.name()?;
        while self.eat_op(".") {
            name.push('.');
            name.push_str(&self.name()?);
        }
        Ok(name)
    }

    fn expr_statement(&mut self, line: usize) -> Result<Stmt, SyntaxError> {
        let first = self.testlist_star()?;
        const AUG: &[(&str, BinOp)] = &[
            ("+=", BinOp::Add),
            ("-=", BinOp::Sub),
            ("*=", BinOp::Mul),
            ("/=", BinOp::Div),
            ("//=", BinOp::FloorDiv),
            ("%=", BinOp::Mod),
            ("**=", BinOp::Pow),
            ("&=", BinOp::BitAnd),
            ("|=", BinOp::BitOr),
            ("^=", BinOp::BitXor),
            ("<<=", BinOp::LShift),
            (">>=", BinOp::RShift),
        ];
        for (sym, op) in AUG {
            if self.eat_op(sym) {
                let target = self.to_target(first)?;
                if matches!(target, Target::Tuple(_)) {
                    return Err(self.error("illegal expression for augmented assignment"));
                }
                let value = self.testlist()?;
                return Ok(Stmt { kind: StmtKind::AugAssign(target, *op, value), line });
            }
        }
        if self.eat_op(":") {
            let target = self.to_target(first)?;
            self.test()?;
            let value = if self.eat_op("=") { Some(self.testlist()?) } else { None };
            return Ok(Stmt { kind: StmtKind::AnnAssign(target, value), line });
        }
        if self.at_op("=") {
            let mut exprs = vec![first];
            while self.eat_op("=") {
                exprs.push(self.testlist_star()?);
            }
            let value = exprs.pop().unwrap();
            let targets = exprs.into_iter().map(|e| self.to_target(e)).collect::<Result<_, _>>()?;
            return Ok(Stmt { kind: StmtKind::Assign(targets, value), line });
        }
        Ok(Stmt { kind: StmtKind::Expr(first), line })
    }

    fn to_target(&self, e: Expr) -> Result<Target, SyntaxError> {
        match e.kind {
            ExprKind::Name(n) => Ok(Target::Name(n)),
            ExprKind::Attribute(obj, attr) => Ok(Target::Attribute(*obj, attr)),
            ExprKind::Subscript(obj, idx) => Ok(Target::Subscript(*obj, *idx)),
            ExprKind::Tuple(items) | ExprKind::List(items) => {
                Ok(Target::Tuple(items.into_iter().map(|i| self.to_target(i)).collect::<Result<_, _>>()?))
            }
            ExprKind::Const(_) => Err(SyntaxError::new("cannot assign to literal", e.line, 1)),
            ExprKind::Call(..) => Err(SyntaxError::new("cannot assign to function call", e.line, 1)),
            _ => Err(SyntaxError::new("cannot assign to expression", e.line, 1)),
        }
    }

    fn for_target(&mut self) -> Result<Target, SyntaxError> {
        let line = self.line();
        let mut items = vec![self.for_target_atom()?];
        let mut tuple = false;
        while self.eat_op(",") {
            tuple = true;
            if self.at_kw("in") {
                break;
            }
            items.push(self.for_target_atom()?);
        }
        if tuple {
            Ok(Target::Tuple(items.into_iter().map(|e| self.to_target(e)).collect::<Result<_, _>>()?))
        } else {
            let e = items.pop().unwrap();
            let _ = line;
            self.to_target(e)
        }
    }

    fn for_target_single(&mut self) -> Result<Target, SyntaxError> {
        let e = self.for_target_atom()?;
        self.to_target(e)
    }

    fn for_target_atom(&mut self) -> Result<Expr, SyntaxError> {
        self.bitor()
    }

    // ---------------------------------------------------------------- expressions

    fn testlist_star(&mut self) -> Result<Expr, SyntaxError> {
        self.testlist()
    }

    fn testlist(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let first = self.test_or_star()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_simple_end() || self.at_op("=") || self.at_op(")") || self.at_op(":") {
                break;
            }
            items.push(self.test_or_star()?);
        }
        Ok(Expr { kind: ExprKind::Tuple(items), line })
    }

    fn test_or_star(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        if self.eat_op("*") {
            let inner = self.bitor()?;
            return Ok(Expr { kind: ExprKind::Starred(Box::new(inner)), line });
        }
        self.test()
    }

    fn namedexpr_test(&mut self) -> Result<Expr, SyntaxError> {
        let e = self.test()?;
        if self.at_op(":=") {
            return Err(SyntaxError::unsupported("assignment expressions are not supported", e.line, 1));
        }
        Ok(e)
    }

    fn test(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        if self.eat_kw("lambda") {
            let params = self.params(":")?;
            self.expect_op(":")?;
            let body = self.test()?;
            return Ok(Expr { kind: ExprKind::Lambda(Rc::new(params), Box::new(body)), line });
        }
        let body = self.or_test()?;
        if self.at_op(":=") {
            return Err(SyntaxError::unsupported("assignment expressions are not supported", line, 1));
        }
        if self.at_kw("if") {
            // Conditional expression; guard against comprehension `if` by checking for `else` later.
            let save = self.pos;
            self.advance();
            let test = self.or_test()?;
            if self.eat_kw("else") {
                let orelse = self.test()?;
                return Ok(Expr {
                    kind: ExprKind::IfExp { test: Box::new(test), body: Box::new(body), orelse: Box::new(orelse) },
                    line,
                });
            }
            self.pos = save;
        }
        Ok(body)
    }

    fn test_nocond(&mut self) -> Result<Expr, SyntaxError> {
        self.or_test()
    }

    fn or_test(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let first = self.and_test()?;
        if !self.at_kw("or") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_kw("or") {
            items.push(self.and_test()?);
        }
        Ok(Expr { kind: ExprKind::Bool(BoolOp::Or, items), line })
    }

    fn and_test(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let first = self.not_test()?;
        if !self.at_kw("and") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_kw("and") {
            items.push(self.not_test()?);
        }
        Ok(Expr { kind: ExprKind::Bool(BoolOp::And, items), line })
    }

    fn not_test(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        if self.eat_kw("not") {
            let inner = self.not_test()?;
            return Ok(Expr { kind: ExprKind::Unary(UnaryOp::Not, Box::new(inner)), line });
        }
        self.comparison()
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::Ge,
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "is" => {
                if matches!(self.peek_at(1), Tok::Name(m) if m == "not") {
                    self.advance();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            Tok::Name(n) if n == "not" && matches!(self.peek_at(1), Tok::Name(m) if m == "in") => {
                self.advance();
                CmpOp::NotIn
            }
            _ => return None,
        };
        self.advance();
        Some(op)
    }

    fn comparison(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let left = self.bitor()?;
        let mut rest = Vec::new();
        while let Some(op) = self.cmp_op() {
            rest.push((op, self.bitor()?));
        }
        if rest.is_empty() {
            Ok(left)
        } else {
            Ok(Expr { kind: ExprKind::Compare(Box::new(left), rest), line })
        }
    }

    fn binary_level(
        &mut self,
        ops: &[(&str, BinOp)],
        next: fn(&mut Self) -> Result<Expr, SyntaxError>,
    ) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let mut left = next(self)?;
        'outer: loop {
            for (sym, op) in ops {
                if self.eat_op(sym) {
                    let right = next(self)?;
                    left = Expr { kind: ExprKind::Bin(*op, Box::new(left), Box::new(right)), line };
                    continue 'outer;
                }
            }
            return Ok(left);
        }
    }

    fn bitor(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("|", BinOp::BitOr)], Self::bitxor)
    }

    fn bitxor(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("^", BinOp::BitXor)], Self::bitand)
    }

    fn bitand(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("&", BinOp::BitAnd)], Self::shift)
    }

    fn shift(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("<<", BinOp::LShift), (">>", BinOp::RShift)], Self::arith)
    }

    fn arith(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("+", BinOp::Add), ("-", BinOp::Sub)], Self::term)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(
            &[("*", BinOp::Mul), ("//", BinOp::FloorDiv), ("/", BinOp::Div), ("%", BinOp::Mod)],
            Self::factor,
        )
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let op = if self.eat_op("-") {
            Some(UnaryOp::Neg)
        } else if self.eat_op("+") {
            Some(UnaryOp::Pos)
        } else if self.eat_op("~") {
            Some(UnaryOp::Invert)
        } else {
            None
        };
        if let Some(op) = op {
            let inner = self.factor()?;
            // Fold negative literals so `-3` is a constant.
            if op == UnaryOp::Neg {
                match inner.kind {
                    ExprKind::Const(Constant::Int(i)) => {
                        return Ok(Expr { kind: ExprKind::Const(Constant::Int(-i)), line })
                    }
                    ExprKind::Const(Constant::Float(f)) => {
                        return Ok(Expr { kind: ExprKind::Const(Constant::Float(-f)), line })
                    }
                    _ => {}
                }
            }
            return Ok(Expr { kind: ExprKind::Unary(op, Box::new(inner)), line });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let base = self.primary()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(Expr { kind: ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)), line });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        if self.at_kw("await") {
            return Err(SyntaxError::unsupported("'await' is not supported", self.line(), 1));
        }
        let mut e = self.atom()?;
        loop {
            let line = self.line();
            if self.eat_op("(") {
                let args = self.call_args()?;
                self.expect_op(")")?;
                e = Expr { kind: ExprKind::Call(Box::new(e), args), line };
            } else if self.eat_op("[") {
                let idx = self.subscript()?;
                self.expect_op("]")?;
                e = Expr { kind: ExprKind::Subscript(Box::new(e), Box::new(idx)), line };
            } else if self.eat_op(".") {
                let attr = self.name()?;
                e = Expr { kind: ExprKind::Attribute(Box::new(e), attr), line };
            } else {
                return Ok(e);
            }
        }
    }

    fn call_args(&mut self) -> Result<Vec<Arg>, SyntaxError> {
        let mut args = Vec::new();
        let mut seen_kw = false;
        while !self.at_op(")") {
            if self.eat_op("**") {
                args.push(Arg::DoubleStar(self.test()?));
                seen_kw = true;
            } else if self.eat_op("*") {
                args.push(Arg::Star(self.test()?));
            } else if matches!(self.peek(), Tok::Name(_)) && matches!(self.peek_at(1), Tok::Op("=")) {
                let name = self.name()?;
                self.expect_op("=")?;
                args.push(Arg::Kw(name, self.test()?));
                seen_kw = true;
            } else {
                let line = self.line();
                let e = self.test()?;
                if self.at_kw("for") {
                    let comps = self.comprehension_clauses()?;
                    args.push(Arg::Pos(Expr { kind: ExprKind::ListComp(Box::new(e), comps), line }));
                } else {
                    if seen_kw {
                        return Err(self.error("positional argument follows keyword argument"));
                    }
                    args.push(Arg::Pos(e));
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(args)
    }

    fn subscript(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let lower = if self.at_op(":") { None } else { Some(self.test()?) };
        if !self.eat_op(":") {
            let first = lower.unwrap();
            if self.at_op(",") {
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.at_op("]") {
                        break;
                    }
                    items.push(self.test()?);
                }
                return Ok(Expr { kind: ExprKind::Tuple(items), line });
            }
            return Ok(first);
        }
        let upper = if self.at_op("]") || self.at_op(":") { None } else { Some(Box::new(self.test()?)) };
        let step = if self.eat_op(":") && !self.at_op("]") { Some(Box::new(self.test()?)) } else { None };
        Ok(Expr { kind: ExprKind::Slice(lower.map(Box::new), upper, step), line })
    }

    fn comprehension_clauses(&mut self) -> Result<Vec<Comprehension>, SyntaxError> {
        let mut comps = Vec::new();
        while self.eat_kw("for") {
            let target = self.for_target()?;
            self.expect_kw("in")?;
            let iter = self.or_test()?;
            let mut conds = Vec::new();
            while self.eat_kw("if") {
                conds.push(self.test_nocond()?);
            }
            comps.push(Comprehension { target, iter, conds });
        }
        Ok(comps)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let line = self.line();
        let tok = self.peek().clone();
        let kind = match tok {
            Tok::Int(i) => {
                self.advance();
                ExprKind::Const(Constant::Int(i))
            }
            Tok::Float(f) => {
                self.advance();
                ExprKind::Const(Constant::Float(f))
            }
            Tok::Str(_) | Tok::FStr(_) => {
                let mut parts: Vec<FPart> = Vec::new();
                let mut any_f = false;
                while let Tok::Str(_) | Tok::FStr(_) = self.peek() {
                    let t = self.advance();
                    match t.tok {
                        Tok::Str(s) => parts.push(FPart::Lit(s)),
                        Tok::FStr(s) => {
                            any_f = true;
                            parts.extend(parse_fstring(&s, t.line)?);
                        }
                        _ => unreachable!(),
                    }
                }
                if any_f {
                    ExprKind::FString(parts)
                } else {
                    let s: String = parts
                        .into_iter()
                        .map(|p| match p {
                            FPart::Lit(s) => s,
                            FPart::Expr { .. } => unreachable!(),
                        })
                        .collect();
                    ExprKind::Const(Constant::Str(s))
                }
            }
            Tok::Op("...") => {
                self.advance();
                ExprKind::Const(Constant::Ellipsis)
            }
            Tok::Op("(") => {
                self.advance();
                if self.eat_op(")") {
                    return Ok(Expr { kind: ExprKind::Tuple(Vec::new()), line });
                }
                let first = self.test_or_star()?;
                if self.at_kw("for") {
                    let comps = self.comprehension_clauses()?;
                    self.expect_op(")")?;
                    return Ok(Expr { kind: ExprKind::ListComp(Box::new(first), comps), line });
                }
                if self.eat_op(")") {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.at_op(")") {
                        break;
                    }
                    items.push(self.test_or_star()?);
                }
                self.expect_op(")")?;
                ExprKind::Tuple(items)
            }
            Tok::Op("[") => {
                self.advance();
                if self.eat_op("]") {
                    return Ok(Expr { kind: ExprKind::List(Vec::new()), line });
                }
                let first = self.test_or_star()?;
                if self.at_kw("for") {
                    let comps = self.comprehension_clauses()?;
                    self.expect_op("]")?;
                    return Ok(Expr { kind: ExprKind::ListComp(Box::new(first), comps), line });
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.at_op("]") {
                        break;
                    }
                    items.push(self.test_or_star()?);
                }
                self.expect_op("]")?;
                ExprKind::List(items)
            }
            Tok::Op("{") => {
                self.advance();
                if self.eat_op("}") {
                    return Ok(Expr { kind: ExprKind::Dict(Vec::new()), line });
                }
                let first = self.test()?;
                if self.eat_op(":") {
                    let v = self.test()?;
                    if self.at_kw("for") {
                        return Err(SyntaxError::unsupported("dict comprehensions are not supported", line, 1));
                    }
                    let mut items = vec![(first, v)];
                    while self.eat_op(",") {
                        if self.at_op("}") {
                            break;
                        }
                        let k = self.test()?;
                        self.expect_op(":")?;
                        items.push((k, self.test()?));
                    }
                    self.expect_op("}")?;
                    ExprKind::Dict(items)
                } else {
                    if self.at_kw("for") {
                        return Err(SyntaxError::unsupported("set comprehensions are not supported", line, 1));
                    }
                    let mut items = vec![first];
                    while self.eat_op(",") {
                        if self.at_op("}") {
                            break;
                        }
                        items.push(self.test()?);
                    }
                    self.expect_op("}")?;
                    ExprKind::Set(items)
                }
            }
            Tok::Name(n) => match n.as_str() {
                "None" => {
                    self.advance();
                    ExprKind::Const(Constant::None)
                }
                "True" => {
                    self.advance();
                    ExprKind::Const(Constant::Bool(true))
                }
                "False" => {
                    self.advance();
                    ExprKind::Const(Constant::Bool(false))
                }
                "yield" => {
                    return Err(SyntaxError::unsupported("'yield' is not supported", line, self.toks[self.pos].col))
                }
                _ if KEYWORDS.contains(&n.as_str()) => return Err(self.unexpected()),
                _ => {
                    self.advance();
                    ExprKind::Name(n)
                }
            },
            _ => return Err(self.unexpected()),
        };
        Ok(Expr { kind, line })
    }
}

trait WithContext {
    fn with_context(self, other: SyntaxError) -> SyntaxError;
}

impl WithContext for SyntaxError {
    fn with_context(mut self, other: SyntaxError) -> SyntaxError {
        self.msg = format!("{}: {}", self.msg, other.msg.trim_start_matches("invalid syntax near "));
        self
    }
}

fn parse_fstring(s: &str, line: usize) -> Result<Vec<FPart>, SyntaxError> {
    let chars: Vec<char> = s.chars().collect();
    let mut parts = Vec::new();
    let mut lit = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '{' {
            if chars.get(i + 1) == Some(&'{') {
                lit.push('{');
                i += 2;
                continue;
            }
            if !lit.is_empty() {
                parts.push(FPart::Lit(std::mem::take(&mut lit)));
            }
            let start = i + 1;
            let mut depth = 0i32;
            let mut j = start;
            let mut quote: Option<char> = None;
            let mut colon: Option<usize> = None;
            let mut bang: Option<usize> = None;
            while j < chars.len() {
                let d = chars[j];
                if let Some(q) = quote {
                    if d == q {
                        quote = None;
                    }
                } else {
                    match d {
                        '\'' | '"' => quote = Some(d),
                        '(' | '[' | '{' => depth += 1,
                        ')' | ']' => depth -= 1,
                        '}' if depth > 0 => depth -= 1,
                        '}' => break,
                        '!' if depth == 0 && colon.is_none() && chars.get(j + 1) != Some(&'=') => bang = Some(j),
                        ':' if depth == 0 && colon.is_none() => colon = Some(j),
                        _ => {}
                    }
                }
                j += 1;
            }
            if j >= chars.len() {
                return Err(SyntaxError::new("f-string: expecting '}'", line, 1));
            }
            let expr_end = bang.or(colon).unwrap_or(j);
            let expr_src: String = chars[start..expr_end].iter().collect();
            if expr_src.trim().is_empty() {
                return Err(SyntaxError::new("f-string: empty expression not allowed", line, 1));
            }
            let expr_src = expr_src.trim_end().trim_end_matches('=').to_string();
            let mut expr = parse_expression(&expr_src)
                .map_err(|e| SyntaxError::new(format!("f-string: {}", e.msg), line, 1))?;
            expr.line = line;
            let conversion = bang.and_then(|b| chars.get(b + 1).copied());
            let spec: String = match colon {
                Some(c) => chars[c + 1..j].iter().collect(),
                None => String::new(),
            };
            parts.push(FPart::Expr { expr, conversion, spec });
            i = j + 1;
        } else if c == '}' {
            if chars.get(i + 1) == Some(&'}') {
                lit.push('}');
                i += 2;
                continue;
            }
            return Err(SyntaxError::new("f-string: single '}' is not allowed", line, 1));
        } else {
            lit.push(c);
            i += 1;
        }
    }
    if !lit.is_empty() {
        parts.push(FPart::Lit(lit));
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decorated_test_function() {
        let src = "@given(x=st.integers(min_value=0))\ndef test_x(x):\n    assert 0 <= x <= 10, f\"x={x}\"\n";
        let m = parse_module(src).unwrap();
        let StmtKind::FunctionDef(f) = &m.body[0].kind else { panic!() };
        assert_eq!(f.name, "test_x");
        assert_eq!(f.decorators.len(), 1);
        let StmtKind::Assert(test, Some(_)) = &f.body[0].kind else { panic!() };
        let ExprKind::Compare(_, ops) = &test.kind else { panic!() };
        assert_eq!(ops.len(), 2);
    }

    #[test]
    fn elif_chain_nests() {
        let m = parse_module("if a:\n    pass\nelif b:\n    pass\nelse:\n    pass\n").unwrap();
        let StmtKind::If(_, _, orelse) = &m.body[0].kind else { panic!() };
        assert!(matches!(orelse[0].kind, StmtKind::If(..)));
    }

    #[test]
    fn class_is_unsupported_not_invalid() {
        let err = parse_module("class A:\n    pass\n").unwrap_err();
        assert!(err.unsupported);
        let err = parse_module("def f(:\n    pass\n").unwrap_err();
        assert!(!err.unsupported);
    }

    #[test]
    fn conditional_expression_and_comprehension() {
        parse_module("y = [i * 2 for i in range(3) if i > 0]\nz = 1 if y else 2\n").unwrap();
    }

    #[test]
    fn fstring_fields() {
        let parts = parse_fstring("a {x.y:.2f} b {z!r}", 1).unwrap();
        assert_eq!(parts.len(), 4);
    }

    #[test]
    fn missing_colon_is_syntax_error() {
        assert!(parse_module("def f()\n    pass\n").is_err());
        assert!(parse_module("x = (1 +\n").is_err());
    }
}
