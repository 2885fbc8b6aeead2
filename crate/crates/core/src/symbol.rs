use alloc::string::{String, ToString};
use core::fmt;

use crate::error::{KernelError, Result};

const SYMBOL_LEN: usize = 16;

/// Short inline identifier. Orders by name, byte-wise.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol([u8; SYMBOL_LEN]);

impl Symbol {
    pub fn new(name: &str) -> Result<Self> {
        let b = name.as_bytes();
        let valid_head = b.first().is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_');
        let valid_tail = b.iter().all(|c| c.is_ascii_alphanumeric() || *c == b'_');
        if !valid_head || !valid_tail || b.len() > SYMBOL_LEN {
            return Err(KernelError::BadSymbol(name.to_string()));
        }
        let mut s = [0u8; SYMBOL_LEN];
        s[..b.len()].copy_from_slice(b);
        Ok(Symbol(s))
    }

    pub fn name(&self) -> &str {
        let n = self.0.iter().position(|c| *c == 0).unwrap_or(SYMBOL_LEN);
        core::str::from_utf8(&self.0[..n]).expect("ascii")
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    T,
    X,
    Y,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::T, Direction::X, Direction::Y];

    pub fn index(self) -> usize {
        match self {
            Direction::T => 0,
            Direction::X => 1,
            Direction::Y => 2,
        }
    }

    pub fn letter(self) -> char {
        ['t', 'x', 'y'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            't' => Some(Direction::T),
            'x' => Some(Direction::X),
            'y' => Some(Direction::Y),
            _ => None,
        }
    }
}

/// A jet coordinate: a dependent symbol differentiated (n_t, n_x, n_y) times.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub sym: Symbol,
    pub ord: [u8; 3],
}

impl JetVar {
    pub fn new(sym: Symbol, ord: [u8; 3]) -> Self {
        JetVar { sym, ord }
    }

    pub fn base(sym: Symbol) -> Self {
        JetVar { sym, ord: [0; 3] }
    }

    pub fn named(name: &str, ord: [u8; 3]) -> Result<Self> {
        Ok(JetVar { sym: Symbol::new(name)?, ord })
    }

    pub fn order(&self) -> u32 {
        self.ord.iter().map(|&o| o as u32).sum()
    }

    pub fn shifted(&self, d: Direction) -> Self {
        let mut ord = self.ord;
        ord[d.index()] += 1;
        JetVar { sym: self.sym, ord }
    }

    /// One step back in direction `d`, if that order is positive.
    pub fn lowered(&self, d: Direction) -> Option<Self> {
        let mut ord = self.ord;
        ord[d.index()] = ord[d.index()].checked_sub(1)?;
        Some(JetVar { sym: self.sym, ord })
    }

    /// Whether `self` is `other` differentiated zero or more times.
    pub fn is_derivative_of(&self, other: &JetVar) -> bool {
        self.sym == other.sym && (0..3).all(|i| self.ord[i] >= other.ord[i])
    }

    /// The `u[t,x,x]` spelling used by the DSL.
    pub fn render(&self) -> String {
        let mut s = String::from(self.sym.name());
        if self.order() > 0 {
            s.push('[');
            let mut first = true;
            for d in Direction::ALL {
                for _ in 0..self.ord[d.index()] {
                    if !first {
                        s.push(',');
                    }
                    s.push(d.letter());
                    first = false;
                }
            }
            s.push(']');
        }
        s
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
