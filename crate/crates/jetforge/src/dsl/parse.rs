//! Lexer and recursive-descent parser for `.jf` files.

use std::fmt;

use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: Option<String>,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    /// Attach a file name unless one is already set.
    pub fn in_file(mut self, file: &str) -> Self {
        if self.file.is_none() {
            self.file = Some(file.to_string());
        }
        self
    }

    pub fn plain(message: impl Into<String>) -> Self {
        Diagnostic { file: None, line: 0, col: 0, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        if self.line > 0 {
            write!(f, "{}:{}: ", self.line, self.col)?;
        } else if self.file.is_some() {
            write!(f, " ")?;
        }
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn error(self, message: impl Into<String>) -> Diagnostic {
        Diagnostic { file: None, line: self.line, col: self.col, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: [&str; 15] = ["/\\", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", ",", ";", ":"];

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let adv = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    'outer: while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            adv(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                { let ch = chars[i]; adv(&mut i, &mut line, &mut col, ch); }
            }
            continue;
        }
        if c == '=' {
            out.push((Tok::Sym("="), span));
            adv(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                { let ch = chars[i]; adv(&mut i, &mut line, &mut col, ch); }
            }
            if i < chars.len() && chars[i] == '.' {
                return Err(span.error("decimal literals are not supported; write a rational such as 3/10"));
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), span));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                { let ch = chars[i]; adv(&mut i, &mut line, &mut col, ch); }
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            continue;
        }
        if c == '"' {
            adv(&mut i, &mut line, &mut col, c);
            let start = i;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    return Err(span.error("unterminated string"));
                }
                { let ch = chars[i]; adv(&mut i, &mut line, &mut col, ch); }
            }
            if i == chars.len() {
                return Err(span.error("unterminated string"));
            }
            let s = chars[start..i].iter().collect();
            adv(&mut i, &mut line, &mut col, '"');
            out.push((Tok::Str(s), span));
            continue;
        }
        for sym in SYMBOLS {
            let n = sym.chars().count();
            if chars[i..].iter().take(n).copied().eq(sym.chars()) {
                out.push((Tok::Sym(sym), span));
                for _ in 0..n {
                    { let ch = chars[i]; adv(&mut i, &mut line, &mut col, ch); }
                }
                continue 'outer;
            }
        }
        return Err(span.error(format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Int(BigInt, Span),
    Ident(String, Span),
    Jet(String, [u8; 3], Span),
    Str(String, Span),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Wedge(Box<Ast>, Box<Ast>),
    Call(String, Vec<Ast>, Span),
}

impl Ast {
    pub fn span(&self) -> Span {
        match self {
            Ast::Int(_, s) | Ast::Ident(_, s) | Ast::Jet(_, _, s) | Ast::Str(_, s) | Ast::Call(_, _, s) => *s,
            Ast::Neg(a) => a.span(),
            Ast::Add(a, _)
            | Ast::Sub(a, _)
            | Ast::Mul(a, _)
            | Ast::Div(a, _)
            | Ast::Pow(a, _)
            | Ast::Wedge(a, _) => a.span(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetRef {
    pub sym: String,
    pub ord: [u8; 3],
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Symbol(Vec<(String, Span)>),
    Import(String, Span),
    Let(String, Ast, Span),
    Equation { name: String, principal: JetRef, rhs: Ast, excluded: Vec<Ast>, span: Span },
    Covering { name: String, over: String, eqs: [(JetRef, Ast); 2], span: Span },
    Inverse { name: String, over: String, unknown: String, eqs: [(JetRef, Ast); 2], span: Span },
    Form(String, Ast, Span),
    Structure {
        name: String,
        over: String,
        reading: Option<String>,
        overrides: Vec<(String, String)>,
        lhs: String,
        rhs: Ast,
        span: Span,
    },
    Check { name: String, op: String, args: Vec<Ast>, expect: String, span: Span },
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

pub fn parse_file(src: &str) -> Result<Vec<Decl>, Diagnostic> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        out.push(p.decl()?);
    }
    Ok(out)
}

/// Parse one expression, e.g. `u[y,y] - u[t,x]`.
pub fn parse_expr(src: &str) -> Result<Ast, Diagnostic> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.span().error("unexpected trailing input"));
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<Span, Diagnostic> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            Err(self.span().error(format!("expected `{s}`, found {}", describe(self.peek()))))
        }
    }

    fn expect_kw(&mut self, s: &str) -> Result<Span, Diagnostic> {
        if self.is_kw(s) {
            Ok(self.bump().1)
        } else {
            Err(self.span().error(format!("expected `{s}`, found {}", describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.bump() {
            (Tok::Ident(s), sp) => Ok((s, sp)),
            (t, sp) => Err(sp.error(format!("expected an identifier, found {}", describe(&t)))),
        }
    }

    fn decl(&mut self) -> Result<Decl, Diagnostic> {
        let (kw, span) = self.ident()?;
        let d = match kw.as_str() {
            "symbol" => {
                let mut names = vec![self.ident()?];
                while self.is_sym(",") {
                    self.bump();
                    names.push(self.ident()?);
                }
                Decl::Symbol(names)
            }
            "import" => match self.bump() {
                (Tok::Str(s), sp) => Decl::Import(s, sp),
                (t, sp) => return Err(sp.error(format!("expected a file name string, found {}", describe(&t)))),
            },
            "let" => {
                let (name, _) = self.ident()?;
                self.expect_sym("=")?;
                Decl::Let(name, self.expr()?, span)
            }
            "form" => {
                let (name, _) = self.ident()?;
                self.expect_sym("=")?;
                Decl::Form(name, self.expr()?, span)
            }
            "equation" => {
                let (name, _) = self.ident()?;
                self.expect_sym(":")?;
                let principal = self.jet_ref()?;
                self.expect_sym("=")?;
                let rhs = self.expr()?;
                let mut excluded = Vec::new();
                if self.is_kw("excluding") {
                    self.bump();
                    self.expect_sym("{")?;
                    if !self.is_sym("}") {
                        excluded.push(self.expr()?);
                        while self.is_sym(",") {
                            self.bump();
                            excluded.push(self.expr()?);
                        }
                    }
                    self.expect_sym("}")?;
                }
                Decl::Equation { name, principal, rhs, excluded, span }
            }
            "covering" => {
                let (name, _) = self.ident()?;
                self.expect_kw("over")?;
                let (over, _) = self.ident()?;
                self.expect_sym(":")?;
                let eqs = self.jet_pair()?;
                Decl::Covering { name, over, eqs, span }
            }
            "inverse" => {
                let (name, _) = self.ident()?;
                self.expect_kw("over")?;
                let (over, _) = self.ident()?;
                self.expect_kw("for")?;
                let (unknown, _) = self.ident()?;
                self.expect_sym(":")?;
                let eqs = self.jet_pair()?;
                Decl::Inverse { name, over, unknown, eqs, span }
            }
            "structure" => {
                let (name, _) = self.ident()?;
                self.expect_kw("over")?;
                let (over, _) = self.ident()?;
                let mut reading = None;
                if self.is_kw("reading") {
                    self.bump();
                    reading = Some(self.ident()?.0);
                }
                let mut overrides = Vec::new();
                if self.is_kw("with") {
                    self.bump();
                    loop {
                        let (a, _) = self.ident()?;
                        self.expect_sym("=")?;
                        let (b, _) = self.ident()?;
                        overrides.push((a, b));
                        if !self.is_sym(",") {
                            break;
                        }
                        self.bump();
                    }
                }
                self.expect_sym(":")?;
                self.expect_kw("d")?;
                self.expect_sym("(")?;
                let (lhs, _) = self.ident()?;
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                let rhs = self.expr()?;
                Decl::Structure { name, over, reading, overrides, lhs, rhs, span }
            }
            "check" => {
                let (name, _) = self.ident()?;
                self.expect_sym("=")?;
                let (op, _) = self.ident()?;
                self.expect_sym("(")?;
                let mut args = Vec::new();
                if !self.is_sym(")") {
                    args.push(self.expr()?);
                    while self.is_sym(",") {
                        self.bump();
                        args.push(self.expr()?);
                    }
                }
                self.expect_sym(")")?;
                self.expect_kw("expect")?;
                let (expect, sp) = self.ident()?;
                if !matches!(expect.as_str(), "PASS" | "FAIL" | "SKIPPED") {
                    return Err(sp.error("expected status must be PASS, FAIL or SKIPPED"));
                }
                Decl::Check { name, op, args, expect, span }
            }
            other => return Err(span.error(format!("unknown declaration `{other}`"))),
        };
        self.expect_sym(";")?;
        Ok(d)
    }

    fn jet_pair(&mut self) -> Result<[(JetRef, Ast); 2], Diagnostic> {
        let a = self.jet_ref()?;
        self.expect_sym("=")?;
        let ea = self.expr()?;
        self.expect_sym(",")?;
        let b = self.jet_ref()?;
        self.expect_sym("=")?;
        let eb = self.expr()?;
        Ok([(a, ea), (b, eb)])
    }

    fn jet_ref(&mut self) -> Result<JetRef, Diagnostic> {
        let (sym, span) = self.ident()?;
        let ord = if self.is_sym("[") { self.multi_index()? } else { [0; 3] };
        Ok(JetRef { sym, ord, span })
    }

    fn multi_index(&mut self) -> Result<[u8; 3], Diagnostic> {
        let open = self.expect_sym("[")?;
        let mut ord = [0u8; 3];
        loop {
            let (name, sp) = match self.bump() {
                (Tok::Ident(s), sp) => (s, sp),
                (t, sp) => return Err(sp.error(format!("malformed multi-index: expected t, x or y, found {}", describe(&t)))),
            };
            for c in name.chars() {
                let i = match c {
                    't' => 0,
                    'x' => 1,
                    'y' => 2,
                    _ => return Err(sp.error(format!("malformed multi-index: `{name}` is not a direction (t, x, y)"))),
                };
                ord[i] = ord[i].checked_add(1).ok_or_else(|| sp.error("multi-index too large"))?;
            }
            if self.is_sym("]") {
                self.bump();
                break;
            }
            if !self.is_sym(",") {
                return Err(open.error("malformed multi-index: expected `,` or `]`"));
            }
            self.bump();
        }
        Ok(ord)
    }

    fn expr(&mut self) -> Result<Ast, Diagnostic> {
        let mut lhs = self.wedge()?;
        loop {
            if self.is_sym("+") {
                self.bump();
                lhs = Ast::Add(Box::new(lhs), Box::new(self.wedge()?));
            } else if self.is_sym("-") {
                self.bump();
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.wedge()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn wedge(&mut self) -> Result<Ast, Diagnostic> {
        let mut lhs = self.product()?;
        while self.is_sym("/\\") {
            self.bump();
            lhs = Ast::Wedge(Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Ast, Diagnostic> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym("*") {
                self.bump();
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.is_sym("/") {
                self.bump();
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, Diagnostic> {
        if self.is_sym("-") {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym("+") {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, Diagnostic> {
        let base = self.atom()?;
        if self.is_sym("^") {
            self.bump();
            let ex = self.unary()?;
            return Ok(Ast::Pow(Box::new(base), Box::new(ex)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, Diagnostic> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Ast::Int(n, span))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Ast::Str(s, span))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.is_sym("[") {
                    let ord = self.multi_index()?;
                    Ok(Ast::Jet(name, ord, span))
                } else if self.is_sym("(") && !matches!(self.peek_at(1), Tok::Eof) {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.is_sym(")") {
                        args.push(self.expr()?);
                        while self.is_sym(",") {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect_sym(")")?;
                    Ok(Ast::Call(name, args, span))
                } else {
                    Ok(Ast::Ident(name, span))
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            t => Err(span.error(format!("expected an expression, found {}", describe(&t)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}
