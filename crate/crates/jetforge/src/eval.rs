//! Turning DSL syntax into kernel values (normalized) or raw trees (for the oracle).
//!
//! The same evaluator runs over two backends so that every check can produce both a
//! normalized result and an independently computed unnormalized one.

use std::cell::RefCell;
use std::collections::BTreeMap;

use jetforge_core::expr::exponent_value;
use jetforge_core::forms::{exterior_d, wedge, Differential, Form};
use jetforge_core::oracle::raw::{self, RawContext, RawForm};
use jetforge_core::{Context, Direction, Expr, JetVar, KappaRational, KernelError, RatExpr, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::dsl::parse::{Ast, Diagnostic, Span};
use crate::workspace::{Item, Workspace};

pub trait Backend {
    type S: Clone;
    type F: Clone;

    fn number(&self, q: &BigRational) -> Self::S;
    fn kappa(&self) -> Self::S;
    fn var(&self, v: JetVar) -> Self::S;
    fn add(&self, a: &Self::S, b: &Self::S) -> Self::S;
    fn neg(&self, a: &Self::S) -> Self::S;
    fn mul(&self, a: &Self::S, b: &Self::S) -> Self::S;
    fn div(&self, a: &Self::S, b: &Self::S) -> Result<Self::S, KernelError>;
    fn pow(&self, a: &Self::S, b: &Self::S) -> Result<Self::S, KernelError>;
    fn total_derivative(&self, a: &Self::S, d: Direction) -> Result<Self::S, KernelError>;

    fn differential(&self, d: Differential) -> Self::F;
    fn form_degree(&self, f: &Self::F) -> usize;
    fn form_add(&self, a: &Self::F, b: &Self::F) -> Result<Self::F, KernelError>;
    fn form_neg(&self, a: &Self::F) -> Self::F;
    fn form_scale(&self, s: &Self::S, f: &Self::F) -> Self::F;
    fn wedge(&self, a: &Self::F, b: &Self::F) -> Result<Self::F, KernelError>;
    /// d of a scalar, as a one-form over internal coordinates.
    fn d_scalar(&self, s: &Self::S) -> Result<Self::F, KernelError>;
    fn d_form(&self, f: &Self::F) -> Result<Self::F, KernelError>;
}

/// Normalizing backend over the kernel.
pub struct Kernel<'c> {
    pub ctx: &'c Context,
}

impl Backend for Kernel<'_> {
    type S = RatExpr;
    type F = Form;

    fn number(&self, q: &BigRational) -> RatExpr {
        RatExpr::constant(KappaRational::from_rational(q))
    }
    fn kappa(&self) -> RatExpr {
        RatExpr::kappa()
    }
    fn var(&self, v: JetVar) -> RatExpr {
        RatExpr::var(v)
    }
    fn add(&self, a: &RatExpr, b: &RatExpr) -> RatExpr {
        a.add(b)
    }
    fn neg(&self, a: &RatExpr) -> RatExpr {
        a.neg()
    }
    fn mul(&self, a: &RatExpr, b: &RatExpr) -> RatExpr {
        a.mul(b)
    }
    fn div(&self, a: &RatExpr, b: &RatExpr) -> Result<RatExpr, KernelError> {
        a.div(b)
    }
    fn pow(&self, a: &RatExpr, b: &RatExpr) -> Result<RatExpr, KernelError> {
        let e = exponent_value(b)?;
        match e.as_int() {
            Some(n) => a.pow(n),
            None => a.pow_exponent(&e),
        }
    }
    fn total_derivative(&self, a: &RatExpr, d: Direction) -> Result<RatExpr, KernelError> {
        self.ctx.total_derivative(a, d)
    }
    fn differential(&self, d: Differential) -> Form {
        Form::differential(d)
    }
    fn form_degree(&self, f: &Form) -> usize {
        f.degree()
    }
    fn form_add(&self, a: &Form, b: &Form) -> Result<Form, KernelError> {
        a.add(b)
    }
    fn form_neg(&self, a: &Form) -> Form {
        a.neg()
    }
    fn form_scale(&self, s: &RatExpr, f: &Form) -> Form {
        f.scale(s)
    }
    fn wedge(&self, a: &Form, b: &Form) -> Result<Form, KernelError> {
        wedge(a, b)
    }
    fn d_scalar(&self, s: &RatExpr) -> Result<Form, KernelError> {
        exterior_d(&Form::scalar(s.clone()), self.ctx)
    }
    fn d_form(&self, f: &Form) -> Result<Form, KernelError> {
        exterior_d(f, self.ctx)
    }
}

/// Unnormalized backend: builds trees, differentiates them with the raw engine.
pub struct Raw<'c> {
    pub ctx: &'c RawContext,
    /// Substitute this value for kappa while building (kappa-specialized checks).
    pub kappa: Option<BigRational>,
}

impl<'c> Raw<'c> {
    pub fn new(ctx: &'c RawContext) -> Self {
        Raw { ctx, kappa: None }
    }
}

impl Backend for Raw<'_> {
    type S = Expr;
    type F = RawForm;

    fn number(&self, q: &BigRational) -> Expr {
        Expr::rational(q.clone())
    }
    fn kappa(&self) -> Expr {
        match &self.kappa {
            Some(k) => Expr::rational(k.clone()),
            None => Expr::kappa(),
        }
    }
    fn var(&self, v: JetVar) -> Expr {
        Expr::var(v)
    }
    fn add(&self, a: &Expr, b: &Expr) -> Expr {
        raw::add(vec![a.clone(), b.clone()])
    }
    fn neg(&self, a: &Expr) -> Expr {
        raw::neg(a.clone())
    }
    fn mul(&self, a: &Expr, b: &Expr) -> Expr {
        raw::mul(vec![a.clone(), b.clone()])
    }
    fn div(&self, a: &Expr, b: &Expr) -> Result<Expr, KernelError> {
        if b.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Ok(Expr::div(a.clone(), b.clone()))
    }
    fn pow(&self, a: &Expr, b: &Expr) -> Result<Expr, KernelError> {
        Ok(Expr::pow(a.clone(), b.clone()))
    }
    fn total_derivative(&self, a: &Expr, d: Direction) -> Result<Expr, KernelError> {
        self.ctx.total_derivative(a, d)
    }
    fn differential(&self, d: Differential) -> RawForm {
        RawForm::differential(d)
    }
    fn form_degree(&self, f: &RawForm) -> usize {
        f.degree
    }
    fn form_add(&self, a: &RawForm, b: &RawForm) -> Result<RawForm, KernelError> {
        a.add(b)
    }
    fn form_neg(&self, a: &RawForm) -> RawForm {
        a.neg()
    }
    fn form_scale(&self, s: &Expr, f: &RawForm) -> RawForm {
        f.scale(s)
    }
    fn wedge(&self, a: &RawForm, b: &RawForm) -> Result<RawForm, KernelError> {
        a.wedge(b)
    }
    fn d_scalar(&self, s: &Expr) -> Result<RawForm, KernelError> {
        let mut f = RawForm::zero(0);
        f.terms.insert(Vec::new(), s.clone());
        f.exterior_d(self.ctx)
    }
    fn d_form(&self, f: &RawForm) -> Result<RawForm, KernelError> {
        f.exterior_d(self.ctx)
    }
}

pub enum Value<B: Backend> {
    Scalar(B::S),
    Form(B::F),
}

impl<B: Backend> Clone for Value<B> {
    fn clone(&self) -> Self {
        match self {
            Value::Scalar(s) => Value::Scalar(s.clone()),
            Value::Form(f) => Value::Form(f.clone()),
        }
    }
}

pub struct Evaluator<'a, B: Backend> {
    ws: &'a Workspace,
    backend: &'a B,
    /// `name -> replacement` applied to every identifier lookup (structure readings).
    overrides: BTreeMap<String, String>,
    cache: RefCell<BTreeMap<String, Value<B>>>,
    stack: RefCell<Vec<String>>,
    file: RefCell<Vec<String>>,
}

pub fn symbol(name: &str, span: Span) -> Result<Symbol, Diagnostic> {
    Symbol::new(name).map_err(|e| span.error(e.to_string()))
}

impl<'a, B: Backend> Evaluator<'a, B> {
    pub fn new(ws: &'a Workspace, backend: &'a B) -> Self {
        Evaluator {
            ws,
            backend,
            overrides: BTreeMap::new(),
            cache: RefCell::new(BTreeMap::new()),
            stack: RefCell::new(Vec::new()),
            file: RefCell::new(Vec::new()),
        }
    }

    pub fn with_overrides(mut self, o: &[(String, String)]) -> Self {
        self.overrides = o.iter().cloned().collect();
        self
    }

    fn err(&self, span: Span, msg: impl Into<String>) -> Diagnostic {
        let d = span.error(msg);
        match self.file.borrow().last() {
            Some(f) => d.in_file(f),
            None => d,
        }
    }

    fn kernel(&self, span: Span) -> impl Fn(KernelError) -> Diagnostic + '_ {
        move |e| self.err(span, e.to_string())
    }

    /// Evaluate an expression that appears in `file`.
    pub fn eval_in(&self, file: &str, ast: &Ast) -> Result<Value<B>, Diagnostic> {
        self.file.borrow_mut().push(file.to_string());
        let r = self.eval(ast);
        self.file.borrow_mut().pop();
        r
    }

    pub fn scalar_in(&self, file: &str, ast: &Ast) -> Result<B::S, Diagnostic> {
        match self.eval_in(file, ast)? {
            Value::Scalar(s) => Ok(s),
            Value::Form(_) => Err(self.err(ast.span(), "expected a scalar expression, found a form").in_file(file)),
        }
    }

    pub fn form_in(&self, file: &str, ast: &Ast) -> Result<B::F, Diagnostic> {
        let v = self.eval_in(file, ast)?;
        self.as_form(v, ast.span()).map_err(|d| d.in_file(file))
    }

    fn as_form(&self, v: Value<B>, span: Span) -> Result<B::F, Diagnostic> {
        match v {
            Value::Form(f) => Ok(f),
            Value::Scalar(_) => Err(self.err(span, "expected a differential form, found a scalar")),
        }
    }

    /// Look up a named let or form, evaluating it once.
    pub fn named(&self, name: &str, span: Span) -> Result<Value<B>, Diagnostic> {
        let name = self.overrides.get(name).map(String::as_str).unwrap_or(name);
        if let Some(v) = self.cache.borrow().get(name) {
            return Ok(v.clone());
        }
        let item: &Item<Ast> = match self.ws.lets.get(name).or_else(|| self.ws.forms.get(name)) {
            Some(i) => i,
            None => return Err(self.err(span, format!("unknown identifier `{name}`"))),
        };
        if self.stack.borrow().iter().any(|n| n == name) {
            let mut chain = self.stack.borrow().clone();
            chain.push(name.to_string());
            return Err(self.err(span, format!("circular definition: {}", chain.join(" -> "))));
        }
        self.stack.borrow_mut().push(name.to_string());
        let v = self.eval_in(&item.file, &item.value);
        self.stack.borrow_mut().pop();
        let v = v?;
        if self.ws.forms.contains_key(name) && matches!(v, Value::Scalar(_)) {
            return Err(self.err(item.span, format!("`{name}` is declared as a form but evaluates to a scalar")).in_file(&item.file));
        }
        self.cache.borrow_mut().insert(name.to_string(), v.clone());
        Ok(v)
    }

    fn jet(&self, name: &str, ord: [u8; 3], span: Span) -> Result<JetVar, Diagnostic> {
        if !self.ws.is_symbol(name) {
            return Err(self.err(span, format!("unknown identifier `{name}`; declare it with `symbol {name};`")));
        }
        Ok(JetVar::new(symbol(name, span)?, ord))
    }

    pub fn eval(&self, ast: &Ast) -> Result<Value<B>, Diagnostic> {
        let b = self.backend;
        Ok(match ast {
            Ast::Int(n, _) => Value::Scalar(b.number(&BigRational::from_integer(n.clone()))),
            Ast::Str(_, sp) => return Err(self.err(*sp, "a string is not an expression")),
            Ast::Ident(name, sp) => {
                if name == "kappa" {
                    Value::Scalar(b.kappa())
                } else if self.ws.lets.contains_key(name) || self.ws.forms.contains_key(name) || self.overrides.contains_key(name) {
                    self.named(name, *sp)?
                } else if self.ws.is_symbol(name) {
                    Value::Scalar(b.var(self.jet(name, [0; 3], *sp)?))
                } else {
                    return Err(self.err(*sp, format!("unknown identifier `{name}`")));
                }
            }
            Ast::Jet(name, ord, sp) => Value::Scalar(b.var(self.jet(name, *ord, *sp)?)),
            Ast::Neg(a) => match self.eval(a)? {
                Value::Scalar(s) => Value::Scalar(b.neg(&s)),
                Value::Form(f) => Value::Form(b.form_neg(&f)),
            },
            Ast::Add(x, y) | Ast::Sub(x, y) => {
                let sub = matches!(ast, Ast::Sub(..));
                match (self.eval(x)?, self.eval(y)?) {
                    (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(b.add(&p, &if sub { b.neg(&q) } else { q })),
                    (Value::Form(p), Value::Form(q)) => {
                        let q = if sub { b.form_neg(&q) } else { q };
                        if b.form_degree(&p) != b.form_degree(&q) {
                            return Err(self.err(y.span(), "cannot add forms of different degree"));
                        }
                        Value::Form(b.form_add(&p, &q).map_err(self.kernel(y.span()))?)
                    }
                    _ => return Err(self.err(y.span(), "cannot add a scalar and a differential form")),
                }
            }
            Ast::Mul(x, y) => match (self.eval(x)?, self.eval(y)?) {
                (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(b.mul(&p, &q)),
                (Value::Scalar(s), Value::Form(f)) | (Value::Form(f), Value::Scalar(s)) => Value::Form(b.form_scale(&s, &f)),
                (Value::Form(_), Value::Form(_)) => {
                    return Err(self.err(y.span(), "use `/\\` to multiply two differential forms"))
                }
            },
            Ast::Div(x, y) => {
                let q = match self.eval(y)? {
                    Value::Scalar(q) => q,
                    Value::Form(_) => return Err(self.err(y.span(), "cannot divide by a differential form")),
                };
                match self.eval(x)? {
                    Value::Scalar(p) => Value::Scalar(b.div(&p, &q).map_err(self.kernel(y.span()))?),
                    Value::Form(f) => {
                        let inv = b.div(&b.number(&BigRational::from_integer(BigInt::from(1))), &q).map_err(self.kernel(y.span()))?;
                        Value::Form(b.form_scale(&inv, &f))
                    }
                }
            }
            Ast::Pow(x, y) => {
                let (p, q) = match (self.eval(x)?, self.eval(y)?) {
                    (Value::Scalar(p), Value::Scalar(q)) => (p, q),
                    _ => return Err(self.err(x.span(), "powers of differential forms are not defined")),
                };
                Value::Scalar(b.pow(&p, &q).map_err(self.kernel(y.span()))?)
            }
            Ast::Wedge(x, y) => {
                let p = self.eval(x)?;
                let p = self.as_form(p, x.span())?;
                let q = self.eval(y)?;
                let q = self.as_form(q, y.span())?;
                Value::Form(b.wedge(&p, &q).map_err(self.kernel(y.span()))?)
            }
            Ast::Call(f, args, sp) => self.call(f, args, *sp)?,
        })
    }

    fn call(&self, f: &str, args: &[Ast], sp: Span) -> Result<Value<B>, Diagnostic> {
        let b = self.backend;
        if args.len() != 1 {
            return Err(self.err(sp, format!("`{f}` takes exactly one argument")));
        }
        let a = &args[0];
        match f {
            "d" => {
                if let Ast::Ident(n, _) = a {
                    if let Some(dir) = coordinate(n) {
                        return Ok(Value::Form(b.differential(Differential::Coord(dir))));
                    }
                }
                match self.eval(a)? {
                    Value::Scalar(s) => Ok(Value::Form(b.d_scalar(&s).map_err(self.kernel(a.span()))?)),
                    Value::Form(w) => Ok(Value::Form(b.d_form(&w).map_err(self.kernel(a.span()))?)),
                }
            }
            "Dt" | "Dx" | "Dy" => {
                let dir = coordinate(&f[1..]).unwrap();
                match self.eval(a)? {
                    Value::Scalar(s) => Ok(Value::Scalar(b.total_derivative(&s, dir).map_err(self.kernel(a.span()))?)),
                    Value::Form(_) => Err(self.err(a.span(), format!("`{f}` applies to scalars only"))),
                }
            }
            _ => Err(self.err(sp, format!("unknown function `{f}`; expected d, Dt, Dx or Dy"))),
        }
    }
}

fn coordinate(n: &str) -> Option<Direction> {
    match n {
        "t" => Some(Direction::T),
        "x" => Some(Direction::X),
        "y" => Some(Direction::Y),
        _ => None,
    }
}
