//! Tokenizer for Python source, including INDENT/DEDENT synthesis.

use super::SyntaxError;

#[derive(Clone, Debug, PartialEq)]
pub enum StrKind {
    Text,
    Bytes,
    Formatted,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Name(String),
    /// Raw numeric text; `imaginary` for a `j` suffix.
    Number { text: String, imaginary: bool },
    Str { value: String, kind: StrKind },
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    EndMarker,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offsets into the source.
    pub start: usize,
    pub end: usize,
    /// 1-based line, 0-based column (in chars).
    pub line: u32,
    pub col: u32,
}

// Longest first.
const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=", "==", "!=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "(", ")", "[", "]", "{", "}", ",", ":",
    ".", ";", "@", "=", "+", "-", "*", "/", "%", "&", "|", "^", "~", "<", ">",
];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    line_start: usize,
    depth: usize,
    indents: Vec<usize>,
    tokens: Vec<Token>,
    at_line_start: bool,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let mut lx = Lexer {
        src,
        pos: 0,
        line: 1,
        line_start: 0,
        depth: 0,
        indents: vec![0],
        tokens: Vec::new(),
        at_line_start: true,
    };
    lx.run()?;
    Ok(lx.tokens)
}

impl<'a> Lexer<'a> {
    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError { message: message.into(), line: self.line, col: self.col_at(self.pos) }
    }

    fn col_at(&self, pos: usize) -> u32 {
        self.src[self.line_start..pos.max(self.line_start)].chars().count() as u32
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        self.tokens.push(Token { kind, start, end: self.pos, line, col });
    }

    fn newline(&mut self) {
        self.line += 1;
        self.line_start = self.pos;
    }

    fn run(&mut self) -> Result<(), SyntaxError> {
        loop {
            if self.at_line_start && self.depth == 0 {
                if !self.indentation()? {
                    break;
                }
                continue;
            }
            let Some(c) = self.peek() else { break };
            let start = self.pos;
            let line = self.line;
            let col = self.col_at(start);
            match c {
                ' ' | '\t' | '\x0c' => self.pos += 1,
                '\r' | '\n' => {
                    self.consume_eol();
                    if self.depth == 0 {
                        self.tokens.push(Token { kind: TokenKind::Newline, start, end: start, line, col });
                        self.at_line_start = true;
                    }
                    self.newline();
                }
                '#' => self.skip_comment(),
                '\\' => {
                    self.pos += 1;
                    match self.peek() {
                        Some('\r') | Some('\n') => {
                            self.consume_eol();
                            self.newline();
                        }
                        _ => return Err(self.err("unexpected character after line continuation")),
                    }
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                    self.number(start, line, col)?;
                }
                c if c == '_' || c.is_alphabetic() => {
                    if let Some(kind) = self.string_prefix() {
                        self.string(start, line, col, kind)?;
                    } else {
                        self.name(start, line, col);
                    }
                }
                '\'' | '"' => self.string(start, line, col, (0, false, StrKind::Text))?,
                _ => self.operator(start, line, col)?,
            }
        }
        if self.depth > 0 {
            return Err(self.err("unexpected end of file inside brackets"));
        }
        let end = self.pos;
        let line = self.line;
        if !matches!(self.tokens.last().map(|t| &t.kind), None | Some(TokenKind::Newline) | Some(TokenKind::Dedent)) {
            self.tokens.push(Token { kind: TokenKind::Newline, start: end, end, line, col: 0 });
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.tokens.push(Token { kind: TokenKind::Dedent, start: end, end, line, col: 0 });
        }
        self.tokens.push(Token { kind: TokenKind::EndMarker, start: end, end, line, col: 0 });
        Ok(())
    }

    fn consume_eol(&mut self) {
        if self.peek() == Some('\r') {
            self.pos += 1;
        }
        if self.peek() == Some('\n') {
            self.pos += 1;
        }
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' || c == '\r' {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    /// Measures indentation of a logical line. Returns false at end of input.
    fn indentation(&mut self) -> Result<bool, SyntaxError> {
        let mut width = 0usize;
        loop {
            match self.peek() {
                Some(' ') => width += 1,
                Some('\t') => width = (width / 8 + 1) * 8,
                Some('\x0c') => width = 0,
                _ => break,
            }
            self.pos += 1;
        }
        match self.peek() {
            None => return Ok(false),
            Some('#') => {
                self.skip_comment();
                return Ok(true);
            }
            Some('\r') | Some('\n') => {
                self.consume_eol();
                self.newline();
                return Ok(true);
            }
            Some('\\') => {
                // A continuation on an otherwise empty line; treat as content.
            }
            _ => {}
        }
        self.at_line_start = false;
        let current = *self.indents.last().unwrap();
        let line = self.line;
        let col = self.col_at(self.pos);
        if width > current {
            self.indents.push(width);
            self.tokens.push(Token { kind: TokenKind::Indent, start: self.pos, end: self.pos, line, col });
        } else if width < current {
            while width < *self.indents.last().unwrap() {
                self.indents.pop();
                self.tokens.push(Token { kind: TokenKind::Dedent, start: self.pos, end: self.pos, line, col });
            }
            if width != *self.indents.last().unwrap() {
                return Err(self.err("unindent does not match any outer indentation level"));
            }
        }
        Ok(true)
    }

    fn name(&mut self, start: usize, line: u32, col: u32) {
        while let Some(c) = self.peek() {
            if c == '_' || c.is_alphanumeric() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let text = self.src[start..self.pos].to_string();
        self.push(TokenKind::Name(text), start, line, col);
    }

    /// Recognizes `r`, `b`, `f`, `u` prefixes (any case/combination) directly
    /// followed by a quote. Returns (prefix length, raw, kind).
    fn string_prefix(&self) -> Option<(usize, bool, StrKind)> {
        let rest = &self.src[self.pos..];
        let prefix_len = rest.chars().take_while(|c| c.is_ascii_alphabetic()).count().min(3);
        for len in (1..=prefix_len.min(2)).rev() {
            let prefix = rest[..len].to_ascii_lowercase();
            let next = rest[len..].chars().next();
            if !matches!(next, Some('\'') | Some('"')) {
                continue;
            }
            let valid = matches!(
                prefix.as_str(),
                "r" | "u" | "b" | "f" | "br" | "rb" | "fr" | "rf"
            );
            if !valid {
                continue;
            }
            let raw = prefix.contains('r');
            let kind = if prefix.contains('b') {
                StrKind::Bytes
            } else if prefix.contains('f') {
                StrKind::Formatted
            } else {
                StrKind::Text
            };
            return Some((len, raw, kind));
        }
        None
    }

    fn string(&mut self, start: usize, line: u32, col: u32, prefix: (usize, bool, StrKind)) -> Result<(), SyntaxError> {
        let (prefix_len, raw, kind) = prefix;
        self.pos += prefix_len;
        let quote = self.peek().unwrap();
        let triple = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        let mut value = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(SyntaxError { message: "unterminated string literal".into(), line, col });
            };
            if c == quote {
                if !triple {
                    self.pos += 1;
                    break;
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    self.pos += 3;
                    break;
                }
                value.push(c);
                self.pos += 1;
                continue;
            }
            match c {
                '\n' | '\r' => {
                    if !triple {
                        return Err(SyntaxError { message: "unterminated string literal".into(), line, col });
                    }
                    self.consume_eol();
                    self.newline();
                    value.push('\n');
                }
                '\\' => {
                    self.pos += 1;
                    let Some(e) = self.peek() else { continue };
                    if raw {
                        value.push('\\');
                        if e == '\n' || e == '\r' {
                            self.consume_eol();
                            self.newline();
                            value.push('\n');
                        } else {
                            value.push(e);
                            self.pos += e.len_utf8();
                        }
                        continue;
                    }
                    self.escape(e, &mut value, &kind)?;
                }
                c => {
                    value.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
        self.push(TokenKind::Str { value, kind }, start, line, col);
        Ok(())
    }

    fn escape(&mut self, e: char, value: &mut String, kind: &StrKind) -> Result<(), SyntaxError> {
        let simple = match e {
            '\\' => Some('\\'),
            '\'' => Some('\''),
            '"' => Some('"'),
            'a' => Some('\x07'),
            'b' => Some('\x08'),
            'f' => Some('\x0c'),
            'n' => Some('\n'),
            'r' => Some('\r'),
            't' => Some('\t'),
            'v' => Some('\x0b'),
            _ => None,
        };
        if let Some(ch) = simple {
            value.push(ch);
            self.pos += 1;
            return Ok(());
        }
        match e {
            '\n' | '\r' => {
                self.consume_eol();
                self.newline();
            }
            '0'..='7' => {
                let digits: String = self.src[self.pos..].chars().take(3).take_while(|c| ('0'..='7').contains(c)).collect();
                self.pos += digits.len();
                let code = u32::from_str_radix(&digits, 8).unwrap();
                value.push(char::from_u32(code).unwrap_or('\u{fffd}'));
            }
            'x' | 'u' | 'U' if !(matches!(kind, StrKind::Bytes) && e != 'x') => {
                let width = match e {
                    'x' => 2,
                    'u' => 4,
                    _ => 8,
                };
                self.pos += 1;
                let digits: String = self.src[self.pos..].chars().take(width).collect();
                if digits.len() != width || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
                    return Err(self.err("truncated escape sequence"));
                }
                self.pos += width;
                let code = u32::from_str_radix(&digits, 16).unwrap();
                let ch = char::from_u32(code).ok_or_else(|| self.err("invalid unicode escape"))?;
                value.push(ch);
            }
            'N' if !matches!(kind, StrKind::Bytes) && self.peek_at(1) == Some('{') => {
                // Named escapes are kept verbatim; the name table is out of scope.
                let rest = &self.src[self.pos..];
                let close = rest.find('}').ok_or_else(|| self.err("malformed \\N escape"))?;
                value.push('\\');
                value.push_str(&rest[..=close]);
                self.pos += close + 1;
            }
            other => {
                value.push('\\');
                value.push(other);
                self.pos += other.len_utf8();
            }
        }
        Ok(())
    }

    fn number(&mut self, start: usize, line: u32, col: u32) -> Result<(), SyntaxError> {
        let rest = &self.src[self.pos..];
        let bytes = rest.as_bytes();
        let mut i = 0;
        let is_digit_or_us = |b: u8, radix_ok: &dyn Fn(u8) -> bool| b == b'_' || radix_ok(b);
        if bytes.len() > 1 && bytes[0] == b'0' && matches!(bytes[1], b'x' | b'X' | b'o' | b'O' | b'b' | b'B') {
            let radix = bytes[1].to_ascii_lowercase();
            i = 2;
            let ok: &dyn Fn(u8) -> bool = match radix {
                b'x' => &|b: u8| b.is_ascii_hexdigit(),
                b'o' => &|b: u8| (b'0'..=b'7').contains(&b),
                _ => &|b: u8| b == b'0' || b == b'1',
            };
            while i < bytes.len() && is_digit_or_us(bytes[i], ok) {
                i += 1;
            }
            if i == 2 {
                return Err(self.err("invalid numeric literal"));
            }
        } else {
            let digit: &dyn Fn(u8) -> bool = &|b: u8| b.is_ascii_digit();
            while i < bytes.len() && is_digit_or_us(bytes[i], digit) {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && is_digit_or_us(bytes[i], digit) {
                    i += 1;
                }
            }
            if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                let mut j = i + 1;
                if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && is_digit_or_us(bytes[i], digit) {
                        i += 1;
                    }
                }
            }
        }
        let mut imaginary = false;
        if i < bytes.len() && matches!(bytes[i], b'j' | b'J') {
            imaginary = true;
            i += 1;
        }
        let text = rest[..i].to_string();
        self.pos += i;
        if self.peek().is_some_and(|c| c == '_' || c.is_alphanumeric()) {
            return Err(self.err("invalid numeric literal"));
        }
        self.push(TokenKind::Number { text, imaginary }, start, line, col);
        Ok(())
    }

    fn operator(&mut self, start: usize, line: u32, col: u32) -> Result<(), SyntaxError> {
        let rest = &self.src[self.pos..];
        let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) else {
            return Err(self.err(format!("unexpected character {:?}", self.peek().unwrap())));
        };
        match *op {
            "(" | "[" | "{" => self.depth += 1,
            ")" | "]" | "}" => {
                if self.depth == 0 {
                    return Err(self.err(format!("unmatched '{op}'")));
                }
                self.depth -= 1;
            }
            _ => {}
        }
        self.pos += op.len();
        self.push(TokenKind::Op(op), start, line, col);
        Ok(())
    }
}
