//! Terms, substitutions, renaming and most-general unification.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Sym = Arc<str>;

/// A logic variable. `gen` is the renaming generation; source variables have gen 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Sym,
    pub gen: u32,
}

impl Var {
    pub fn new(name: &str) -> Var {
        Var { name: Arc::from(name), gen: 0 }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.gen)
        }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Var(Var),
    Atom(Sym),
    Int(i64),
    Real(f64),
    Compound(Sym, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(Arc::from(name))
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "compound terms need at least one argument");
        Term::Compound(Arc::from(functor), args.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Int(_) | Term::Real(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Term::Int(i) => Some(*i as f64),
            Term::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Functor name and arity; constants have arity 0.
    pub fn signature(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }

    /// Rename every variable to generation `gen`.
    pub fn rename(&self, gen: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var { name: v.name.clone(), gen }),
            Term::Compound(f, args) if !self.is_ground() => {
                Term::Compound(f.clone(), args.iter().map(|a| a.rename(gen)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Map variables through `f`, leaving the rest of the structure alone.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Compound(fun, args) if !self.is_ground() => {
                Term::Compound(fun.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
            _ => self.clone(),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Term::Var(_) => 0,
            Term::Int(_) | Term::Real(_) => 1,
            Term::Atom(_) => 2,
            Term::Compound(..) => 3,
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Atom(a), Term::Atom(b)) => a == b,
            (Term::Int(a), Term::Int(b)) => a == b,
            (Term::Real(a), Term::Real(b)) => a.to_bits() == b.to_bits(),
            (Term::Compound(f, a), Term::Compound(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::Var(v) => {
                0u8.hash(state);
                v.hash(state);
            }
            Term::Atom(a) => {
                1u8.hash(state);
                a.hash(state);
            }
            Term::Int(i) => {
                2u8.hash(state);
                i.hash(state);
            }
            Term::Real(r) => {
                3u8.hash(state);
                r.to_bits().hash(state);
            }
            Term::Compound(f, args) => {
                4u8.hash(state);
                f.hash(state);
                args.hash(state);
            }
        }
    }
}

/// Standard order: variables < numbers < atoms < compounds. Numbers compare by
/// value, with integers before reals of equal value.
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Atom(a), Term::Atom(b)) => a.cmp(b),
            (Term::Int(a), Term::Int(b)) => a.cmp(b),
            (Term::Real(a), Term::Real(b)) => a.total_cmp(b),
            (Term::Int(a), Term::Real(b)) => (*a as f64).total_cmp(b).then(Ordering::Less),
            (Term::Real(a), Term::Int(b)) => a.total_cmp(&(*b as f64)).then(Ordering::Greater),
            (Term::Compound(f, a), Term::Compound(g, b)) => {
                a.len().cmp(&b.len()).then_with(|| f.cmp(g)).then_with(|| a.iter().cmp(b.iter()))
            }
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn is_plain_atom(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn fmt_real(r: f64) -> String {
    if r.is_finite() {
        format!("{r:?}")
    } else if r.is_nan() {
        "nan".to_string()
    } else if r > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Atom(a) => {
                if is_plain_atom(a) {
                    write!(f, "{a}")
                } else {
                    write!(f, "'{}'", a.replace('\\', "\\\\").replace('\'', "\\'"))
                }
            }
            Term::Int(i) => write!(f, "{i}"),
            Term::Real(r) => write!(f, "{}", fmt_real(*r)),
            Term::Compound(fun, args) => {
                write!(f, "{}(", Term::Atom(fun.clone()))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Variable bindings. Internally triangular (a binding may mention other bound
/// variables); `apply` resolves fully and `normalized` produces the idempotent form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Subst {
    bindings: Vec<(Var, Term)>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Subst {
        Subst { bindings: pairs.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.iter().rev().find(|(w, _)| w == v).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter().map(|(v, t)| (v, t))
    }

    /// Bind without checks. Callers guarantee `v` is unbound.
    pub fn bind(&mut self, v: Var, t: Term) {
        self.bindings.push((v, t));
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.get(v) {
                Some(b) => t = b,
                None => break,
            }
        }
        t
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(_) => {
                let w = self.walk(t);
                if w.is_var() {
                    w.clone()
                } else {
                    self.apply(w)
                }
            }
            Term::Compound(f, args) if !t.is_ground() => {
                Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
            _ => t.clone(),
        }
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(v, a)),
            _ => false,
        }
    }

    /// Extend with an mgu of `a` and `b`. On failure the substitution is left unchanged.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.bindings.len();
        let ok = self.unify_inner(a, b);
        if !ok {
            self.bindings.truncate(mark);
        }
        ok
    }

    fn unify_inner(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), _) => {
                if self.occurs(x, &b) {
                    return false;
                }
                self.bindings.push((x.clone(), b));
                true
            }
            (_, Term::Var(y)) => {
                if self.occurs(y, &a) {
                    return false;
                }
                self.bindings.push((y.clone(), a));
                true
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify_inner(x, y))
            }
            _ => a == b,
        }
    }

    /// Idempotent form: every binding fully resolved, identity bindings dropped.
    pub fn normalized(&self) -> Subst {
        let mut out: Vec<(Var, Term)> = Vec::new();
        for (v, _) in &self.bindings {
            if out.iter().any(|(w, _)| w == v) {
                continue;
            }
            let t = self.apply(&Term::Var(v.clone()));
            if t != Term::Var(v.clone()) {
                out.push((v.clone(), t));
            }
        }
        Subst { bindings: out }
    }

    /// `compose(θ, σ)` satisfies `apply(apply(e, θ), σ) == apply(e, compose(θ, σ))`.
    pub fn compose(&self, other: &Subst) -> Subst {
        let theta = self.normalized();
        let sigma = other.normalized();
        let mut out: Vec<(Var, Term)> = Vec::new();
        for (v, t) in &theta.bindings {
            let t2 = sigma.apply(t);
            if t2 != Term::Var(v.clone()) {
                out.push((v.clone(), t2));
            }
        }
        for (v, t) in &sigma.bindings {
            if theta.get(v).is_none() {
                out.push((v.clone(), t.clone()));
            }
        }
        Subst { bindings: out }
    }

    /// Restrict to the given variables (resolved).
    pub fn restrict(&self, vars: &[Var]) -> Subst {
        let mut out = Subst::new();
        for v in vars {
            let t = self.apply(&Term::Var(v.clone()));
            if t != Term::Var(v.clone()) {
                out.bind(v.clone(), t);
            }
        }
        out
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalized();
        write!(f, "{{")?;
        for (i, (v, t)) in n.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        write!(f, "}}")
    }
}

/// Most general unifier of `a` and `b`, in idempotent form.
pub fn unify(a: &Term, b: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    if s.unify(a, b) {
        Some(s.normalized())
    } else {
        None
    }
}

/// One-way matching: a substitution σ over the variables of `pattern` with `pattern σ == target`.
pub fn match_term(pattern: &Term, target: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    if match_into(&mut s, pattern, target) {
        Some(s)
    } else {
        None
    }
}

pub(crate) fn match_into(s: &mut Subst, pattern: &Term, target: &Term) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(b) => b == target,
            None => {
                s.bind(v.clone(), target.clone());
                true
            }
        },
        Term::Compound(f, xs) => match target {
            Term::Compound(g, ys) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| match_into(s, x, y))
            }
            _ => false,
        },
        _ => pattern == target,
    }
}

/// Values named differently that denote the same boolean.
pub fn bool_value(t: &Term) -> Option<bool> {
    match t {
        Term::Atom(a) => match &**a {
            "t" | "true" => Some(true),
            "f" | "false" => Some(false),
            _ => None,
        },
        Term::Int(1) => Some(true),
        Term::Int(0) => Some(false),
        Term::Real(r) if *r == 1.0 => Some(true),
        Term::Real(r) if *r == 0.0 => Some(false),
        _ => None,
    }
}

/// Equality of RV values: numbers by value, booleans up to aliasing, otherwise structural.
pub fn values_match(a: &Term, b: &Term) -> bool {
    if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
        return x == y;
    }
    if let (Some(x), Some(y)) = (bool_value(a), bool_value(b)) {
        return x == y;
    }
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(f: &str, args: Vec<Term>) -> Term {
        Term::compound(f, args)
    }

    #[test]
    fn unify_has_loan() {
        let a = c("has_loan", vec![Term::atom("ann"), Term::var("L")]);
        let b = c("has_loan", vec![Term::var("C"), Term::var("M")]);
        let s = unify(&a, &b).unwrap();
        assert_eq!(s.apply(&a), s.apply(&b));
        assert_eq!(s.apply(&Term::var("C")), Term::atom("ann"));
        let l = s.apply(&Term::var("L"));
        let m = s.apply(&Term::var("M"));
        assert_eq!(l, m);
        assert!(l.is_var());
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn unify_identity_and_clash() {
        assert!(unify(&Term::var("X"), &Term::var("X")).unwrap().is_empty());
        let fa = c("f", vec![Term::atom("a")]);
        let ga = c("g", vec![Term::atom("a")]);
        assert!(unify(&fa, &ga).is_none());
    }

    #[test]
    fn occurs_check() {
        let x = Term::var("X");
        let fx = c("f", vec![x.clone()]);
        assert!(unify(&x, &fx).is_none());
    }

    #[test]
    fn numbers_unify_exactly() {
        assert!(unify(&Term::Int(1), &Term::Int(1)).is_some());
        assert!(unify(&Term::Int(1), &Term::Real(1.0)).is_none());
        assert!(unify(&Term::Real(0.1), &Term::Real(0.1)).is_some());
    }

    #[test]
    fn apply_partial() {
        let t = c("has_loan", vec![Term::var("C"), Term::var("L")]);
        let s = Subst::from_pairs([(Var::new("C"), Term::atom("ann"))]);
        assert_eq!(s.apply(&t).to_string(), "has_loan(ann,L)");
        let g = c("p", vec![Term::atom("a")]);
        assert_eq!(s.apply(&g), g);
    }

    #[test]
    fn compose_law() {
        let e = c("p", vec![Term::var("X"), Term::var("Y")]);
        let theta = Subst::from_pairs([(Var::new("X"), c("f", vec![Term::var("Z")]))]);
        let sigma = Subst::from_pairs([(Var::new("Z"), Term::atom("a"))]);
        assert_eq!(sigma.apply(&theta.apply(&e)), theta.compose(&sigma).apply(&e));
    }

    #[test]
    fn rename_suffixes() {
        let t = c("p", vec![Term::var("X")]);
        assert_eq!(t.rename(7).to_string(), "p(X_7)");
        let g = c("p", vec![Term::atom("a")]);
        assert_eq!(g.rename(3), g);
        let r1 = t.rename(1);
        let r2 = t.rename(2);
        assert!(r1.vars().iter().all(|v| !r2.contains_var(v)));
    }

    #[test]
    fn value_aliasing() {
        assert!(values_match(&Term::atom("t"), &Term::Int(1)));
        assert!(values_match(&Term::atom("false"), &Term::atom("f")));
        assert!(!values_match(&Term::atom("t"), &Term::Int(0)));
        assert!(values_match(&Term::Int(40), &Term::Real(40.0)));
        assert!(!values_match(&Term::atom("a"), &Term::atom("d")));
    }

    #[test]
    fn standard_order() {
        let mut v = [
            Term::atom("b"),
            c("f", vec![Term::atom("a")]),
            Term::Int(3),
            Term::var("X"),
            Term::Real(1.5),
            Term::atom("a"),
        ];
        v.sort();
        let s: Vec<String> = v.iter().map(|t| t.to_string()).collect();
        assert_eq!(s, ["X", "1.5", "3", "a", "b", "f(a)"]);
    }
}
