//! Loading `.jf` files (with imports) into one name table.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Component, Path, PathBuf};

use crate::dsl::parse::{parse_file, Ast, Decl, Diagnostic, JetRef, Span};

/// Paper definitions shipped inside the binary, keyed by path relative to `paper/`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("rmmdKP.jf", include_str!("../../../paper/rmmdKP.jf")),
    ("rmdKP.jf", include_str!("../../../paper/rmdKP.jf")),
    ("rmmdKP_I.jf", include_str!("../../../paper/rmmdKP_I.jf")),
    ("c2.jf", include_str!("../../../paper/c2.jf")),
    ("c15.jf", include_str!("../../../paper/c15.jf")),
    ("c16.jf", include_str!("../../../paper/c16.jf")),
    ("c17.jf", include_str!("../../../paper/c17.jf")),
    ("inverse19.jf", include_str!("../../../paper/inverse19.jf")),
    ("mutations.jf", include_str!("../../../paper/mutations.jf")),
    ("paper-suite.jf", include_str!("../../../paper/paper-suite.jf")),
    ("forms/mcforms.jf", include_str!("../../../paper/forms/mcforms.jf")),
    ("forms/invariants.jf", include_str!("../../../paper/forms/invariants.jf")),
    ("forms/structure.jf", include_str!("../../../paper/forms/structure.jf")),
];

pub fn bundled(path: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(p, _)| *p == path).map(|(_, s)| *s)
}

#[derive(Clone, Debug)]
pub struct Item<T> {
    pub value: T,
    pub file: String,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct EquationDecl {
    pub principal: JetRef,
    pub rhs: Ast,
    pub excluded: Vec<Ast>,
}

#[derive(Clone, Debug)]
pub struct CoveringDecl {
    pub over: String,
    pub pseudo: String,
    pub f_t: Ast,
    pub f_y: Ast,
}

#[derive(Clone, Debug)]
pub struct InverseDecl {
    pub over: String,
    pub unknown: String,
    pub u_t: Ast,
    pub u_y: Ast,
}

#[derive(Clone, Debug)]
pub struct StructureDecl {
    pub name: String,
    pub over: String,
    pub reading: String,
    pub overrides: Vec<(String, String)>,
    pub lhs: String,
    pub rhs: Ast,
}

#[derive(Clone, Debug)]
pub struct CheckDecl {
    pub name: String,
    pub op: String,
    pub args: Vec<Ast>,
    pub expect: String,
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub symbols: BTreeSet<String>,
    pub lets: BTreeMap<String, Item<Ast>>,
    pub forms: BTreeMap<String, Item<Ast>>,
    pub equations: BTreeMap<String, Item<EquationDecl>>,
    pub coverings: BTreeMap<String, Item<CoveringDecl>>,
    pub inverses: BTreeMap<String, Item<InverseDecl>>,
    pub structures: Vec<Item<StructureDecl>>,
    pub checks: Vec<Item<CheckDecl>>,
    /// Files in load order, as displayed in diagnostics.
    pub files: Vec<String>,
    loaded: BTreeSet<String>,
}

#[derive(Clone, Debug)]
enum Source {
    Disk(PathBuf),
    Bundled(String),
}

impl Source {
    fn label(&self) -> String {
        match self {
            Source::Disk(p) => p.display().to_string(),
            Source::Bundled(p) => format!("<bundled>/paper/{p}"),
        }
    }

    fn read(&self) -> Result<String, Diagnostic> {
        match self {
            Source::Disk(p) => std::fs::read_to_string(p)
                .map_err(|e| Diagnostic::plain(format!("cannot read {}: {e}", p.display()))),
            Source::Bundled(p) => {
                bundled(p).map(str::to_string).ok_or_else(|| Diagnostic::plain(format!("no bundled file `{p}`")))
            }
        }
    }

    fn resolve(&self, import: &str) -> Option<Source> {
        match self {
            Source::Disk(p) => {
                let cand = p.parent().unwrap_or(Path::new(".")).join(import);
                if cand.exists() {
                    return Some(Source::Disk(cand));
                }
                bundled_relative("", import).map(Source::Bundled)
            }
            Source::Bundled(p) => {
                let dir = Path::new(p).parent().map(|d| d.to_string_lossy().into_owned()).unwrap_or_default();
                bundled_relative(&dir, import).map(Source::Bundled)
            }
        }
    }
}

/// Join inside the bundled tree, resolving `..`; None if it escapes or does not exist.
fn bundled_relative(dir: &str, import: &str) -> Option<String> {
    let mut parts: Vec<String> = Vec::new();
    for c in Path::new(dir).join(import).components() {
        match c {
            Component::Normal(s) => parts.push(s.to_string_lossy().into_owned()),
            Component::ParentDir => {
                parts.pop()?;
            }
            Component::CurDir => {}
            _ => return None,
        }
    }
    let joined = parts.join("/");
    let joined = joined.strip_prefix("paper/").map(str::to_string).unwrap_or(joined);
    bundled(&joined).map(|_| joined)
}

impl Workspace {
    pub fn load_path(path: &Path) -> Result<Self, Diagnostic> {
        let mut ws = Workspace::default();
        ws.load(Source::Disk(path.to_path_buf()))?;
        Ok(ws)
    }

    pub fn load_bundled(path: &str) -> Result<Self, Diagnostic> {
        let mut ws = Workspace::default();
        ws.load(Source::Bundled(path.to_string()))?;
        Ok(ws)
    }

    /// Every bundled file, for commands that look definitions up by name.
    pub fn all_bundled() -> Result<Self, Diagnostic> {
        let mut ws = Workspace::default();
        for (p, _) in BUNDLED {
            ws.load(Source::Bundled(p.to_string()))?;
        }
        Ok(ws)
    }

    pub fn load_str(label: &str, src: &str) -> Result<Self, Diagnostic> {
        let mut ws = Workspace::default();
        let decls = parse_file(src).map_err(|d| d.in_file(label))?;
        ws.add_decls(&Source::Disk(PathBuf::from(label)), label, decls)?;
        Ok(ws)
    }

    fn load(&mut self, src: Source) -> Result<(), Diagnostic> {
        let key = match &src {
            Source::Disk(p) => p.canonicalize().unwrap_or_else(|_| p.clone()).display().to_string(),
            Source::Bundled(p) => format!("bundled:{p}"),
        };
        if !self.loaded.insert(key) {
            return Ok(());
        }
        let label = src.label();
        let text = src.read()?;
        let decls = parse_file(&text).map_err(|d| d.in_file(&label))?;
        self.add_decls(&src, &label, decls)
    }

    fn claim(&mut self, name: &str, file: &str, span: Span) -> Result<(), Diagnostic> {
        let taken = self.lets.contains_key(name)
            || self.forms.contains_key(name)
            || self.equations.contains_key(name)
            || self.coverings.contains_key(name)
            || self.inverses.contains_key(name)
            || self.checks.iter().any(|c| c.value.name == name);
        if taken || name == "kappa" {
            return Err(span.error(format!("duplicate definition of `{name}`")).in_file(file));
        }
        Ok(())
    }

    fn add_decls(&mut self, src: &Source, file: &str, decls: Vec<Decl>) -> Result<(), Diagnostic> {
        self.files.push(file.to_string());
        for d in decls {
            match d {
                Decl::Symbol(names) => {
                    for (n, _) in names {
                        self.symbols.insert(n);
                    }
                }
                Decl::Import(path, span) => {
                    let target = src
                        .resolve(&path)
                        .ok_or_else(|| span.error(format!("cannot resolve import \"{path}\"")).in_file(file))?;
                    self.load(target)?;
                }
                Decl::Let(name, ast, span) => {
                    self.claim(&name, file, span)?;
                    self.lets.insert(name, Item { value: ast, file: file.into(), span });
                }
                Decl::Form(name, ast, span) => {
                    self.claim(&name, file, span)?;
                    self.forms.insert(name, Item { value: ast, file: file.into(), span });
                }
                Decl::Equation { name, principal, rhs, excluded, span } => {
                    self.claim(&name, file, span)?;
                    self.symbols.insert(principal.sym.clone());
                    let value = EquationDecl { principal, rhs, excluded };
                    self.equations.insert(name, Item { value, file: file.into(), span });
                }
                Decl::Covering { name, over, eqs, span } => {
                    self.claim(&name, file, span)?;
                    let (pseudo, f_t, f_y) = split_pair(eqs, file)?;
                    self.symbols.insert(pseudo.clone());
                    let value = CoveringDecl { over, pseudo, f_t, f_y };
                    self.coverings.insert(name, Item { value, file: file.into(), span });
                }
                Decl::Inverse { name, over, unknown, eqs, span } => {
                    self.claim(&name, file, span)?;
                    let (u, u_t, u_y) = split_pair(eqs, file)?;
                    if u != unknown {
                        return Err(span.error(format!("inverse `{name}` is declared for `{unknown}` but defines `{u}`")).in_file(file));
                    }
                    self.symbols.insert(over.clone());
                    self.symbols.insert(unknown.clone());
                    let value = InverseDecl { over, unknown, u_t, u_y };
                    self.inverses.insert(name, Item { value, file: file.into(), span });
                }
                Decl::Structure { name, over, reading, overrides, lhs, rhs, span } => {
                    let reading = reading.unwrap_or_else(|| "literal".to_string());
                    if self.structures.iter().any(|s| s.value.name == name && s.value.reading == reading) {
                        return Err(span.error(format!("duplicate reading `{reading}` of structure equation `{name}`")).in_file(file));
                    }
                    let value = StructureDecl { name, over, reading, overrides, lhs, rhs };
                    self.structures.push(Item { value, file: file.into(), span });
                }
                Decl::Check { name, op, args, expect, span } => {
                    self.claim(&name, file, span)?;
                    let value = CheckDecl { name, op, args, expect };
                    self.checks.push(Item { value, file: file.into(), span });
                }
            }
        }
        Ok(())
    }

    pub fn readings(&self, name: &str) -> Vec<&Item<StructureDecl>> {
        self.structures.iter().filter(|s| s.value.name == name).collect()
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.symbols.contains(name)
    }
}

/// Order a `p[t] = ..., p[y] = ...` pair, checking both sides name the same symbol.
fn split_pair(eqs: [(JetRef, Ast); 2], file: &str) -> Result<(String, Ast, Ast), Diagnostic> {
    let [(a, ea), (b, eb)] = eqs;
    if a.sym != b.sym {
        return Err(b.span.error(format!("expected derivatives of `{}`, found `{}`", a.sym, b.sym)).in_file(file));
    }
    match (a.ord, b.ord) {
        ([1, 0, 0], [0, 0, 1]) => Ok((a.sym, ea, eb)),
        ([0, 0, 1], [1, 0, 0]) => Ok((a.sym, eb, ea)),
        _ => Err(a.span.error("a covering gives exactly the t- and y-derivatives, e.g. `q[t] = ..., q[y] = ...`").in_file(file)),
    }
}
