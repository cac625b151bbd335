//! Recursive-descent parser over the token stream.
//!
//! The statement grammar covers ordinary Python 3 code except `match`.
//! Expression precedence is honored so that calls, attributes and literals
//! come out right; everything else collapses into `ExprKind::Compound`.

use super::ast::*;
use super::lexer::{tokenize, StrKind, Token, TokenKind};
use super::SyntaxError;
use crate::literal::LiteralValue;

type PResult<T> = Result<T, SyntaxError>;

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
    "try", "while", "with", "yield",
];

/// Parses a whole file; the first syntax error aborts.
pub fn parse_module(src: &str) -> PResult<Module> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, pos: 0, recover: false, errors: Vec::new() };
    let body = p.statements_until_end()?;
    Ok(Module { body })
}

/// Parses a file, skipping statements that fail to parse. Tokenizer errors
/// are still fatal because indentation can no longer be trusted.
pub fn parse_module_recovering(src: &str) -> PResult<(Module, Vec<SyntaxError>)> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, pos: 0, recover: true, errors: Vec::new() };
    let body = p.statements_until_end()?;
    Ok((Module { body }, p.errors))
}

/// Parses a single expression (or bare tuple) such as a literal or a default.
pub fn parse_expression(src: &str) -> PResult<Expr> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, pos: 0, recover: false, errors: Vec::new() };
    let expr = p.testlist_star()?;
    while p.at(&TokenKind::Newline) {
        p.pos += 1;
    }
    if !p.at(&TokenKind::EndMarker) {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    recover: bool,
    errors: Vec<SyntaxError>,
}

impl<'a> Parser<'a> {
    // ----- token helpers -------------------------------------------------

    fn tok(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn kind(&self) -> &TokenKind {
        &self.tok().kind
    }

    fn peek_kind(&self, n: usize) -> &TokenKind {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)].kind
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.kind() == kind
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.kind(), TokenKind::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.kind(), TokenKind::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let t = self.tok();
        SyntaxError { message: message.into(), line: t.line, col: t.col }
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.kind() {
            TokenKind::Newline => {
                self.pos += 1;
                Ok(())
            }
            TokenKind::EndMarker => Ok(()),
            _ => Err(self.error("expected end of statement")),
        }
    }

    fn identifier(&mut self) -> PResult<String> {
        match self.kind().clone() {
            TokenKind::Name(n) if !KEYWORDS.contains(&n.as_str()) => {
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn span_from(&self, start: usize) -> Span {
        let first = &self.tokens[start.min(self.tokens.len() - 1)];
        let last_idx = self.pos.saturating_sub(1).max(start).min(self.tokens.len() - 1);
        let end = self.tokens[last_idx].end.max(first.start);
        Span { start: first.start, end, line: first.line, col: first.col }
    }

    fn text(&self, span: Span) -> String {
        self.src[span.start..span.end].to_string()
    }

    fn expr(&self, kind: ExprKind, start: usize) -> Expr {
        Expr { kind, span: self.span_from(start) }
    }

    // ----- statements ----------------------------------------------------

    fn statements_until_end(&mut self) -> PResult<Vec<Stmt>> {
        let mut body = Vec::new();
        loop {
            while self.at(&TokenKind::Newline) {
                self.pos += 1;
            }
            if self.at(&TokenKind::EndMarker) {
                break;
            }
            self.statement_recovering(&mut body)?;
        }
        Ok(body)
    }

    fn statement_recovering(&mut self, out: &mut Vec<Stmt>) -> PResult<()> {
        let start = self.pos;
        match self.statement() {
            Ok(mut stmts) => {
                out.append(&mut stmts);
                Ok(())
            }
            Err(e) if self.recover => {
                self.errors.push(e);
                self.pos = skip_statement(&self.tokens, start);
                if self.pos == start {
                    // Nothing consumable; avoid looping forever.
                    self.pos += 1;
                }
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn suite(&mut self) -> PResult<Vec<Stmt>> {
        if !self.at(&TokenKind::Newline) {
            return self.simple_statement();
        }
        self.pos += 1;
        while self.at(&TokenKind::Newline) {
            self.pos += 1;
        }
        if !self.at(&TokenKind::Indent) {
            return Err(self.error("expected an indented block"));
        }
        self.pos += 1;
        let mut body = Vec::new();
        loop {
            while self.at(&TokenKind::Newline) {
                self.pos += 1;
            }
            match self.kind() {
                TokenKind::Dedent => {
                    self.pos += 1;
                    break;
                }
                TokenKind::EndMarker => break,
                _ => self.statement_recovering(&mut body)?,
            }
        }
        Ok(body)
    }

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        let start = self.pos;
        let kw = match self.kind() {
            TokenKind::Name(n) => n.clone(),
            TokenKind::Op("@") => return self.decorated().map(|s| vec![s]),
            TokenKind::Indent => return Err(self.error("unexpected indent")),
            _ => return self.simple_statement(),
        };
        let stmt = match kw.as_str() {
            "def" => self.funcdef(Vec::new(), false, start)?,
            "class" => self.classdef(Vec::new(), start)?,
            "if" => self.if_stmt()?,
            "while" => self.while_stmt()?,
            "for" => self.for_stmt()?,
            "try" => self.try_stmt()?,
            "with" => self.with_stmt()?,
            "async" => {
                self.pos += 1;
                match self.kind() {
                    TokenKind::Name(n) if n == "def" => self.funcdef(Vec::new(), true, start)?,
                    TokenKind::Name(n) if n == "for" => self.for_stmt()?,
                    TokenKind::Name(n) if n == "with" => self.with_stmt()?,
                    _ => return Err(self.error("expected def, for or with after async")),
                }
            }
            _ => return self.simple_statement(),
        };
        Ok(vec![stmt])
    }

    fn decorated(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let mut decorators = Vec::new();
        while self.eat_op("@") {
            let e = self.namedexpr()?;
            decorators.push(self.text(e.span));
            self.expect_newline()?;
        }
        if self.at_kw("def") {
            self.funcdef(decorators, false, start)
        } else if self.at_kw("async") && matches!(self.peek_kind(1), TokenKind::Name(n) if n == "def") {
            self.pos += 1;
            self.funcdef(decorators, true, start)
        } else if self.at_kw("class") {
            self.classdef(decorators, start)
        } else {
            Err(self.error("expected def or class after decorator"))
        }
    }

    fn funcdef(&mut self, decorators: Vec<String>, is_async: bool, start: usize) -> PResult<Stmt> {
        self.expect_kw("def")?;
        let name = self.identifier()?;
        self.expect_op("(")?;
        let params = self.parameters(")", true)?;
        self.expect_op(")")?;
        if self.eat_op("->") {
            self.test()?;
        }
        self.expect_op(":")?;
        let body = self.suite()?;
        let docstring = docstring_of(&body);
        let span = self.span_from(start);
        Ok(Stmt {
            kind: StmtKind::FunctionDef(FunctionDef { name, params, decorators, body, docstring, is_async }),
            span,
        })
    }

    fn parameters(&mut self, close: &str, annotations: bool) -> PResult<Vec<Param>> {
        let mut params: Vec<Param> = Vec::new();
        let mut seen_star = false;
        let mut seen_slash = false;
        let mut seen_kwargs = false;
        let mut bare_star_pending = false;
        let mut seen_default = false;
        while !self.at_op(close) {
            if seen_kwargs {
                return Err(self.error("arguments cannot follow var-keyword argument"));
            }
            if self.eat_op("/") {
                if seen_slash || seen_star || params.is_empty() {
                    return Err(self.error("invalid '/' in parameter list"));
                }
                seen_slash = true;
                for p in params.iter_mut() {
                    p.kind = ParamKind::PositionalOnly;
                }
            } else if self.eat_op("**") {
                let name = self.identifier()?;
                let annotation = self.param_annotation(annotations)?;
                params.push(Param { name, kind: ParamKind::VarKeyword, annotation, default: None });
                seen_kwargs = true;
            } else if self.eat_op("*") {
                if seen_star {
                    return Err(self.error("'*' argument may appear only once"));
                }
                seen_star = true;
                if self.at_op(",") || self.at_op(close) {
                    bare_star_pending = true;
                } else {
                    let name = self.identifier()?;
                    let annotation = self.param_annotation(annotations)?;
                    params.push(Param { name, kind: ParamKind::VarPositional, annotation, default: None });
                }
            } else {
                let name = self.identifier()?;
                let annotation = self.param_annotation(annotations)?;
                let default = if self.eat_op("=") { Some(self.test()?) } else { None };
                let kind = if seen_star { ParamKind::KeywordOnly } else { ParamKind::PositionalOrKeyword };
                if kind == ParamKind::PositionalOrKeyword {
                    if default.is_some() {
                        seen_default = true;
                    } else if seen_default {
                        return Err(self.error(format!(
                            "parameter without a default follows parameter with a default: `{name}`"
                        )));
                    }
                }
                bare_star_pending = false;
                params.push(Param { name, kind, annotation, default });
            }
            if !self.eat_op(",") {
                break;
            }
        }
        if bare_star_pending {
            return Err(self.error("named arguments must follow bare '*'"));
        }
        let mut names = std::collections::HashSet::new();
        for p in &params {
            if !names.insert(p.name.as_str()) {
                return Err(self.error(format!("duplicate argument `{}` in function definition", p.name)));
            }
        }
        Ok(params)
    }

    fn param_annotation(&mut self, allowed: bool) -> PResult<Option<Expr>> {
        if allowed && self.eat_op(":") {
            Ok(Some(self.test()?))
        } else {
            Ok(None)
        }
    }

    fn classdef(&mut self, decorators: Vec<String>, start: usize) -> PResult<Stmt> {
        self.expect_kw("class")?;
        let name = self.identifier()?;
        let mut bases = Vec::new();
        if self.eat_op("(") {
            for arg in self.call_arguments()? {
                if arg.kind == ArgKind::Positional {
                    bases.push(self.text(arg.value.span));
                }
            }
            self.expect_op(")")?;
        }
        self.expect_op(":")?;
        let body = self.suite()?;
        let docstring = docstring_of(&body);
        let span = self.span_from(start);
        Ok(Stmt { kind: StmtKind::ClassDef(ClassDef { name, bases, decorators, body, docstring }), span })
    }

    fn block(&self, header: Vec<Expr>, targets: Vec<Expr>, bodies: Vec<Vec<Stmt>>, start: usize) -> Stmt {
        Stmt { kind: StmtKind::Block { header, targets, bodies }, span: self.span_from(start) }
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.pos += 1;
        let mut header = vec![self.namedexpr()?];
        self.expect_op(":")?;
        let mut bodies = vec![self.suite()?];
        loop {
            if self.eat_kw("elif") {
                header.push(self.namedexpr()?);
                self.expect_op(":")?;
                bodies.push(self.suite()?);
            } else if self.eat_kw("else") {
                self.expect_op(":")?;
                bodies.push(self.suite()?);
                break;
            } else {
                break;
            }
        }
        Ok(self.block(header, Vec::new(), bodies, start))
    }

    fn while_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.pos += 1;
        let header = vec![self.namedexpr()?];
        self.expect_op(":")?;
        let mut bodies = vec![self.suite()?];
        if self.eat_kw("else") {
            self.expect_op(":")?;
            bodies.push(self.suite()?);
        }
        Ok(self.block(header, Vec::new(), bodies, start))
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.expect_kw("for")?;
        let targets = self.exprlist()?;
        self.expect_kw("in")?;
        let header = vec![self.testlist_star()?];
        self.expect_op(":")?;
        let mut bodies = vec![self.suite()?];
        if self.eat_kw("else") {
            self.expect_op(":")?;
            bodies.push(self.suite()?);
        }
        Ok(self.block(header, targets, bodies, start))
    }

    fn try_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.pos += 1;
        self.expect_op(":")?;
        let mut bodies = vec![self.suite()?];
        let mut header = Vec::new();
        let mut targets = Vec::new();
        let mut handlers = 0;
        while self.at_kw("except") {
            self.pos += 1;
            self.eat_op("*");
            if !self.at_op(":") {
                header.push(self.test()?);
                if self.eat_kw("as") {
                    let n = self.pos;
                    let name = self.identifier()?;
                    targets.push(self.expr(ExprKind::Name(name), n));
                }
            }
            self.expect_op(":")?;
            bodies.push(self.suite()?);
            handlers += 1;
        }
        if handlers > 0 && self.eat_kw("else") {
            self.expect_op(":")?;
            bodies.push(self.suite()?);
        }
        if self.eat_kw("finally") {
            self.expect_op(":")?;
            bodies.push(self.suite()?);
        } else if handlers == 0 {
            return Err(self.error("expected 'except' or 'finally' block"));
        }
        Ok(self.block(header, targets, bodies, start))
    }

    fn with_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.expect_kw("with")?;
        let mut header = Vec::new();
        let mut targets = Vec::new();
        let save = self.pos;
        let parenthesized = self.at_op("(") && {
            self.pos += 1;
            let ok = self.with_items(&mut header, &mut targets).is_ok()
                && { self.eat_op(","); true }
                && self.eat_op(")")
                && self.at_op(":");
            if !ok {
                self.pos = save;
                header.clear();
                targets.clear();
            }
            ok
        };
        if !parenthesized {
            self.with_items(&mut header, &mut targets)?;
        }
        self.expect_op(":")?;
        let bodies = vec![self.suite()?];
        Ok(self.block(header, targets, bodies, start))
    }

    fn with_items(&mut self, header: &mut Vec<Expr>, targets: &mut Vec<Expr>) -> PResult<()> {
        loop {
            header.push(self.test()?);
            if self.eat_kw("as") {
                targets.push(self.star_or_bitor()?);
            }
            if !(self.at_op(",") && !matches!(self.peek_kind(1), TokenKind::Op(")"))) {
                break;
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn simple_statement(&mut self) -> PResult<Vec<Stmt>> {
        let mut stmts = vec![self.small_statement()?];
        while self.eat_op(";") {
            if self.at(&TokenKind::Newline) || self.at(&TokenKind::EndMarker) {
                break;
            }
            stmts.push(self.small_statement()?);
        }
        self.expect_newline()?;
        Ok(stmts)
    }

    fn small_statement(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let kw = match self.kind() {
            TokenKind::Name(n) => n.clone(),
            _ => String::new(),
        };
        let kind = match kw.as_str() {
            "pass" | "break" | "continue" => {
                self.pos += 1;
                StmtKind::Other(Vec::new())
            }
            "return" => {
                self.pos += 1;
                let mut exprs = Vec::new();
                if !self.at_end_of_small() {
                    exprs.push(self.testlist_star()?);
                }
                StmtKind::Other(exprs)
            }
            "raise" => {
                self.pos += 1;
                let mut exprs = Vec::new();
                if !self.at_end_of_small() {
                    exprs.push(self.test()?);
                    if self.eat_kw("from") {
                        exprs.push(self.test()?);
                    }
                }
                StmtKind::Other(exprs)
            }
            "assert" => {
                self.pos += 1;
                let mut exprs = vec![self.test()?];
                if self.eat_op(",") {
                    exprs.push(self.test()?);
                }
                StmtKind::Other(exprs)
            }
            "del" => {
                self.pos += 1;
                StmtKind::Other(self.exprlist()?)
            }
            "global" | "nonlocal" => {
                self.pos += 1;
                self.identifier()?;
                while self.eat_op(",") {
                    self.identifier()?;
                }
                StmtKind::Other(Vec::new())
            }
            "import" => self.import_stmt()?,
            "from" => self.import_from()?,
            _ => self.expr_statement()?,
        };
        Ok(Stmt { kind, span: self.span_from(start) })
    }

    fn at_end_of_small(&self) -> bool {
        matches!(self.kind(), TokenKind::Newline | TokenKind::EndMarker | TokenKind::Op(";"))
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.identifier()?;
        while self.eat_op(".") {
            name.push('.');
            name.push_str(&self.identifier()?);
        }
        Ok(name)
    }

    fn import_stmt(&mut self) -> PResult<StmtKind> {
        self.expect_kw("import")?;
        let mut names = Vec::new();
        loop {
            let name = self.dotted_name()?;
            let alias = if self.eat_kw("as") { Some(self.identifier()?) } else { None };
            names.push(ImportName { name, alias });
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(StmtKind::Import(names))
    }

    fn import_from(&mut self) -> PResult<StmtKind> {
        self.expect_kw("from")?;
        let mut level = 0;
        loop {
            if self.eat_op(".") {
                level += 1;
            } else if self.eat_op("...") {
                level += 3;
            } else {
                break;
            }
        }
        let module = if self.at_kw("import") { None } else { Some(self.dotted_name()?) };
        if module.is_none() && level == 0 {
            return Err(self.error("expected module name"));
        }
        self.expect_kw("import")?;
        let mut names = Vec::new();
        if self.eat_op("*") {
            names.push(ImportName { name: "*".into(), alias: None });
        } else {
            let paren = self.eat_op("(");
            loop {
                let name = self.identifier()?;
                let alias = if self.eat_kw("as") { Some(self.identifier()?) } else { None };
                names.push(ImportName { name, alias });
                if !self.eat_op(",") {
                    break;
                }
                if paren && self.at_op(")") {
                    break;
                }
            }
            if paren {
                self.expect_op(")")?;
            }
        }
        Ok(StmtKind::ImportFrom { module, level, names })
    }

    fn expr_statement(&mut self) -> PResult<StmtKind> {
        let first = if self.at_kw("yield") { self.yield_expr()? } else { self.testlist_star()? };
        if self.at_op(":") {
            self.pos += 1;
            self.test()?;
            let value = if self.eat_op("=") { Some(self.assign_value()?) } else { None };
            return Ok(StmtKind::Assign { targets: vec![first], value, augmented: false });
        }
        const AUG: &[&str] = &["+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@="];
        if let TokenKind::Op(op) = self.kind() {
            if AUG.contains(op) {
                self.pos += 1;
                let value = self.assign_value()?;
                return Ok(StmtKind::Assign { targets: vec![first], value: Some(value), augmented: true });
            }
        }
        if !self.at_op("=") {
            return Ok(StmtKind::Expr(first));
        }
        let mut chain = vec![first];
        while self.eat_op("=") {
            chain.push(self.assign_value()?);
        }
        let value = chain.pop();
        Ok(StmtKind::Assign { targets: chain, value, augmented: false })
    }

    fn assign_value(&mut self) -> PResult<Expr> {
        if self.at_kw("yield") {
            self.yield_expr()
        } else {
            self.testlist_star()
        }
    }

    fn yield_expr(&mut self) -> PResult<Expr> {
        let start = self.pos;
        self.expect_kw("yield")?;
        let mut children = Vec::new();
        if self.eat_kw("from") {
            children.push(self.test()?);
        } else if !self.at_end_of_small() && !self.at_op(")") && !self.at_op("=") {
            children.push(self.testlist_star()?);
        }
        Ok(self.expr(ExprKind::Compound(children), start))
    }

    // ----- expressions ---------------------------------------------------

    /// `a, *b, c` (a bare tuple) or a single expression.
    fn testlist_star(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let first = self.star_or_namedexpr()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_expr_end() {
                break;
            }
            items.push(self.star_or_namedexpr()?);
        }
        Ok(self.expr(ExprKind::Compound(items), start))
    }

    fn at_expr_end(&self) -> bool {
        matches!(
            self.kind(),
            TokenKind::Newline | TokenKind::EndMarker | TokenKind::Op(")") | TokenKind::Op("]")
                | TokenKind::Op("}") | TokenKind::Op("=") | TokenKind::Op(":") | TokenKind::Op(";")
        ) || matches!(
            self.kind(),
            TokenKind::Op(o) if o.ends_with('=') && o.len() > 1 && *o != "==" && *o != "<=" && *o != ">=" && *o != "!="
        ) || self.at_kw("in")
    }

    fn star_or_namedexpr(&mut self) -> PResult<Expr> {
        if self.at_op("*") {
            let start = self.pos;
            self.pos += 1;
            let inner = self.bitor()?;
            return Ok(self.expr(ExprKind::Starred(Box::new(inner)), start));
        }
        self.namedexpr()
    }

    /// Targets of `for`/`del`/comprehensions: no comparisons, so `in` is left alone.
    fn exprlist(&mut self) -> PResult<Vec<Expr>> {
        let mut items = vec![self.star_or_bitor()?];
        while self.eat_op(",") {
            if self.at_kw("in") || self.at_expr_end() {
                break;
            }
            items.push(self.star_or_bitor()?);
        }
        Ok(items)
    }

    fn star_or_bitor(&mut self) -> PResult<Expr> {
        if self.at_op("*") {
            let start = self.pos;
            self.pos += 1;
            let inner = self.bitor()?;
            return Ok(self.expr(ExprKind::Starred(Box::new(inner)), start));
        }
        self.bitor()
    }

    fn namedexpr(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let target = self.test()?;
        if self.eat_op(":=") {
            let value = self.test()?;
            return Ok(self.expr(ExprKind::Compound(vec![target, value]), start));
        }
        Ok(target)
    }

    fn test(&mut self) -> PResult<Expr> {
        if self.at_kw("lambda") {
            return self.lambda();
        }
        let start = self.pos;
        let body = self.or_test()?;
        if self.eat_kw("if") {
            let cond = self.or_test()?;
            self.expect_kw("else")?;
            let orelse = self.test()?;
            return Ok(self.expr(ExprKind::Compound(vec![body, cond, orelse]), start));
        }
        Ok(body)
    }

    fn test_no_cond(&mut self) -> PResult<Expr> {
        if self.at_kw("lambda") {
            return self.lambda();
        }
        self.or_test()
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let start = self.pos;
        self.expect_kw("lambda")?;
        let params = self.parameters(":", false)?;
        self.expect_op(":")?;
        let body = self.test()?;
        let mut children: Vec<Expr> = params.into_iter().filter_map(|p| p.default).collect();
        children.push(body);
        Ok(self.expr(ExprKind::Compound(children), start))
    }

    fn or_test(&mut self) -> PResult<Expr> {
        self.binary_kw(&["or"], Self::and_test)
    }

    fn and_test(&mut self) -> PResult<Expr> {
        self.binary_kw(&["and"], Self::not_test)
    }

    fn binary_kw(&mut self, kws: &[&str], next: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let start = self.pos;
        let first = next(self)?;
        let mut items = vec![first];
        while kws.iter().any(|k| self.at_kw(k)) {
            self.pos += 1;
            items.push(next(self)?);
        }
        Ok(self.collapse(items, start))
    }

    fn collapse(&self, mut items: Vec<Expr>, start: usize) -> Expr {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            self.expr(ExprKind::Compound(items), start)
        }
    }

    fn not_test(&mut self) -> PResult<Expr> {
        if self.at_kw("not") {
            let start = self.pos;
            self.pos += 1;
            let inner = self.not_test()?;
            return Ok(self.expr(ExprKind::Compound(vec![inner]), start));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let mut items = vec![self.bitor()?];
        loop {
            let is_cmp = matches!(self.kind(), TokenKind::Op("<" | ">" | "==" | ">=" | "<=" | "!="))
                || self.at_kw("in")
                || self.at_kw("is")
                || (self.at_kw("not") && matches!(self.peek_kind(1), TokenKind::Name(n) if n == "in"));
            if !is_cmp {
                break;
            }
            if self.eat_kw("not") {
                self.expect_kw("in")?;
            } else if self.eat_kw("is") {
                self.eat_kw("not");
            } else {
                self.pos += 1;
            }
            items.push(self.bitor()?);
        }
        Ok(self.collapse(items, start))
    }

    fn binary_ops(&mut self, ops: &[&str], next: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let start = self.pos;
        let mut items = vec![next(self)?];
        while ops.iter().any(|o| self.at_op(o)) {
            self.pos += 1;
            items.push(next(self)?);
        }
        Ok(self.collapse(items, start))
    }

    fn bitor(&mut self) -> PResult<Expr> {
        self.binary_ops(&["|"], Self::bitxor)
    }

    fn bitxor(&mut self) -> PResult<Expr> {
        self.binary_ops(&["^"], Self::bitand)
    }

    fn bitand(&mut self) -> PResult<Expr> {
        self.binary_ops(&["&"], Self::shift)
    }

    fn shift(&mut self) -> PResult<Expr> {
        self.binary_ops(&["<<", ">>"], Self::arith)
    }

    fn arith(&mut self) -> PResult<Expr> {
        self.binary_ops(&["+", "-"], Self::term)
    }

    fn term(&mut self) -> PResult<Expr> {
        self.binary_ops(&["*", "/", "//", "%", "@"], Self::factor)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let start = self.pos;
        if self.at_op("-") || self.at_op("+") || self.at_op("~") {
            let negate = self.at_op("-");
            self.pos += 1;
            let operand = self.factor()?;
            if negate {
                if let Some(neg) = negate_numeric_literal(&operand) {
                    return Ok(self.expr(ExprKind::Literal(neg), start));
                }
            }
            return Ok(self.expr(ExprKind::Compound(vec![operand]), start));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let base = if self.at_kw("await") {
            self.pos += 1;
            let inner = self.primary()?;
            self.expr(ExprKind::Compound(vec![inner]), start)
        } else {
            self.primary()?
        };
        if self.eat_op("**") {
            let exponent = self.factor()?;
            return Ok(self.expr(ExprKind::Compound(vec![base, exponent]), start));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let mut e = self.atom()?;
        loop {
            if self.eat_op(".") {
                let attr = self.identifier()?;
                e = self.expr(ExprKind::Attribute { value: Box::new(e), attr }, start);
            } else if self.eat_op("(") {
                let args = self.call_arguments()?;
                self.expect_op(")")?;
                e = self.expr(ExprKind::Call { func: Box::new(e), args }, start);
            } else if self.eat_op("[") {
                let mut children = vec![e];
                children.extend(self.subscripts()?);
                self.expect_op("]")?;
                e = self.expr(ExprKind::Compound(children), start);
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn subscripts(&mut self) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        loop {
            if self.at_op("]") {
                break;
            }
            // slice: [lower] ':' [upper] [':' [step]] | star_or_namedexpr
            if !self.at_op(":") {
                out.push(self.star_or_namedexpr()?);
            }
            while self.eat_op(":") {
                if !self.at_op(":") && !self.at_op(",") && !self.at_op("]") {
                    out.push(self.test()?);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(out)
    }

    fn call_arguments(&mut self) -> PResult<Vec<Argument>> {
        let mut args = Vec::new();
        while !self.at_op(")") {
            let arg = if self.eat_op("**") {
                Argument { kind: ArgKind::DoubleStar, value: self.test()? }
            } else if self.eat_op("*") {
                Argument { kind: ArgKind::Star, value: self.test()? }
            } else if matches!(self.kind(), TokenKind::Name(_)) && matches!(self.peek_kind(1), TokenKind::Op("=")) {
                let name = self.identifier()?;
                self.pos += 1;
                Argument { kind: ArgKind::Keyword(name), value: self.test()? }
            } else {
                let start = self.pos;
                let value = self.namedexpr()?;
                if self.at_kw("for") || self.at_kw("async") {
                    let mut children = vec![value];
                    self.comp_for(&mut children)?;
                    Argument { kind: ArgKind::Positional, value: self.expr(ExprKind::Compound(children), start) }
                } else {
                    Argument { kind: ArgKind::Positional, value }
                }
            };
            args.push(arg);
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(args)
    }

    /// Parses one or more `for ... in ... [if ...]` clauses.
    fn comp_for(&mut self, children: &mut Vec<Expr>) -> PResult<()> {
        while self.at_kw("for") || (self.at_kw("async") && matches!(self.peek_kind(1), TokenKind::Name(n) if n == "for")) {
            self.eat_kw("async");
            self.expect_kw("for")?;
            children.extend(self.exprlist()?);
            self.expect_kw("in")?;
            children.push(self.or_test()?);
            while self.eat_kw("if") {
                children.push(self.test_no_cond()?);
            }
        }
        Ok(())
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.pos;
        match self.kind().clone() {
            TokenKind::Op("(") => {
                self.pos += 1;
                if self.eat_op(")") {
                    return Ok(self.expr(ExprKind::Compound(Vec::new()), start));
                }
                if self.at_kw("yield") {
                    let y = self.yield_expr()?;
                    self.expect_op(")")?;
                    return Ok(self.expr(ExprKind::Compound(vec![y]), start));
                }
                let first = self.star_or_namedexpr()?;
                if self.at_kw("for") || self.at_kw("async") {
                    let mut children = vec![first];
                    self.comp_for(&mut children)?;
                    self.expect_op(")")?;
                    return Ok(self.expr(ExprKind::Compound(children), start));
                }
                if self.eat_op(")") {
                    if matches!(first.kind, ExprKind::Starred(_)) {
                        return Err(self.error("cannot use starred expression here"));
                    }
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.at_op(")") {
                        break;
                    }
                    items.push(self.star_or_namedexpr()?);
                }
                self.expect_op(")")?;
                Ok(self.expr(ExprKind::Compound(items), start))
            }
            TokenKind::Op("[") => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.at_op("]") {
                    items.push(self.star_or_namedexpr()?);
                    if self.at_kw("for") || self.at_kw("async") {
                        self.comp_for(&mut items)?;
                    } else {
                        while self.eat_op(",") {
                            if self.at_op("]") {
                                break;
                            }
                            items.push(self.star_or_namedexpr()?);
                        }
                    }
                }
                self.expect_op("]")?;
                Ok(self.expr(ExprKind::Compound(items), start))
            }
            TokenKind::Op("{") => {
                self.pos += 1;
                let items = self.dict_or_set()?;
                self.expect_op("}")?;
                Ok(self.expr(ExprKind::Compound(items), start))
            }
            TokenKind::Op("...") => {
                self.pos += 1;
                Ok(self.expr(ExprKind::Compound(Vec::new()), start))
            }
            TokenKind::Number { text, imaginary } => {
                self.pos += 1;
                if imaginary {
                    return Ok(self.expr(ExprKind::Compound(Vec::new()), start));
                }
                match number_literal(&text) {
                    Some(Ok(v)) => Ok(self.expr(ExprKind::Literal(v), start)),
                    // Out-of-range ints are kept, but not as literals.
                    Some(Err(())) => Ok(self.expr(ExprKind::Compound(Vec::new()), start)),
                    None => Err(self.error(format!("invalid numeric literal `{text}`"))),
                }
            }
            TokenKind::Str { .. } => {
                let mut value = String::new();
                let mut plain = true;
                let mut saw_bytes = false;
                let mut saw_text = false;
                while let TokenKind::Str { value: v, kind } = self.kind().clone() {
                    match kind {
                        StrKind::Text => saw_text = true,
                        StrKind::Bytes => {
                            saw_bytes = true;
                            plain = false;
                        }
                        StrKind::Formatted => {
                            saw_text = true;
                            plain = false;
                        }
                    }
                    value.push_str(&v);
                    self.pos += 1;
                }
                if saw_bytes && saw_text {
                    return Err(self.error("cannot mix bytes and nonbytes literals"));
                }
                if plain {
                    Ok(self.expr(ExprKind::Literal(LiteralValue::string(&value)), start))
                } else {
                    Ok(self.expr(ExprKind::Compound(Vec::new()), start))
                }
            }
            TokenKind::Name(n) => match n.as_str() {
                "True" | "False" => {
                    self.pos += 1;
                    Ok(self.expr(ExprKind::Literal(LiteralValue::bool(n == "True")), start))
                }
                "None" => {
                    self.pos += 1;
                    Ok(self.expr(ExprKind::Literal(LiteralValue::none()), start))
                }
                _ if KEYWORDS.contains(&n.as_str()) => Err(self.error(format!("unexpected keyword `{n}`"))),
                _ => {
                    self.pos += 1;
                    Ok(self.expr(ExprKind::Name(n), start))
                }
            },
            _ => Err(self.error("expected expression")),
        }
    }

    fn dict_or_set(&mut self) -> PResult<Vec<Expr>> {
        let mut items = Vec::new();
        if self.at_op("}") {
            return Ok(items);
        }
        let mut first = true;
        loop {
            if self.eat_op("**") {
                items.push(self.bitor()?);
            } else {
                items.push(self.star_or_namedexpr()?);
                if self.eat_op(":") {
                    items.push(self.test()?);
                }
            }
            if first && (self.at_kw("for") || self.at_kw("async")) {
                self.comp_for(&mut items)?;
                break;
            }
            first = false;
            if !self.eat_op(",") || self.at_op("}") {
                break;
            }
        }
        Ok(items)
    }
}

/// The string value of a leading expression statement, if any.
fn docstring_of(body: &[Stmt]) -> Option<String> {
    match &body.first()?.kind {
        StmtKind::Expr(e) => e.as_literal_string(),
        _ => None,
    }
}

fn negate_numeric_literal(e: &Expr) -> Option<LiteralValue> {
    let v = e.as_literal()?;
    match v.tag() {
        crate::literal::LiteralTag::Int => {
            let n: i128 = v.canonical_text().parse().ok()?;
            Some(LiteralValue::int(n.checked_neg()?))
        }
        crate::literal::LiteralTag::Float => LiteralValue::float(-v.as_f64()?),
        _ => None,
    }
}

/// `None` for malformed text, `Some(Err)` for ints that overflow i128.
fn number_literal(text: &str) -> Option<Result<LiteralValue, ()>> {
    let clean: String = text.chars().filter(|c| *c != '_').collect();
    if text.contains("__") || text.ends_with('_') {
        return None;
    }
    let lower = clean.to_ascii_lowercase();
    let radix = if lower.starts_with("0x") {
        Some(16)
    } else if lower.starts_with("0o") {
        Some(8)
    } else if lower.starts_with("0b") {
        Some(2)
    } else {
        None
    };
    if let Some(radix) = radix {
        return Some(i128::from_str_radix(&clean[2..], radix).map(LiteralValue::int).map_err(|_| ()));
    }
    if lower.contains('.') || lower.contains('e') {
        let f: f64 = clean.parse().ok()?;
        return LiteralValue::float(f).map(Ok);
    }
    if clean.len() > 1 && clean.starts_with('0') && clean.chars().any(|c| c != '0') {
        return None;
    }
    Some(clean.parse::<i128>().map(LiteralValue::int).map_err(|_| ()))
}

/// Index of the first token after the statement starting at `start`.
fn skip_statement(tokens: &[Token], start: usize) -> usize {
    let mut depth = 0i32;
    let mut i = start;
    while i < tokens.len() {
        match tokens[i].kind {
            TokenKind::EndMarker => return i,
            TokenKind::Indent => depth += 1,
            TokenKind::Dedent => {
                if depth == 0 {
                    return i;
                }
                depth -= 1;
                if depth == 0 {
                    return i + 1;
                }
            }
            TokenKind::Newline if depth == 0
                && !matches!(tokens.get(i + 1).map(|t| &t.kind), Some(TokenKind::Indent)) => {
                    return i + 1;
                }
            _ => {}
        }
        i += 1;
    }
    i
}
