#![no_std]
extern crate alloc;

pub mod coverings;
pub mod error;
pub mod exponent;
pub mod expr;
pub mod forms;
pub mod jet;
pub mod kappa;
pub mod linear;
pub mod monomial;
pub mod oracle;
pub mod poly;
pub mod ratexpr;
pub mod symbol;

pub use error::{KernelError, Result};
pub use exponent::Exponent;
pub use expr::{normalize, to_raw, Expr, Node};
pub use kappa::{KPoly, KappaRational};
pub use monomial::Monomial;
pub use poly::PolyExpr;
pub use ratexpr::RatExpr;
pub use symbol::{Direction, JetVar, Symbol};
pub use jet::{Context, Covering, Equation, Role};
pub use forms::{exterior_d, wedge, Differential, Form};
pub use linear::{solve_linear, Solution};
