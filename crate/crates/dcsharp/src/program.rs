//! The DC# abstract syntax and its pretty-printer.

use std::fmt;

use crate::distribution::CombiningRule;
use crate::term::{fmt_real, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Gt,
    Ge,
    Le,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Le => "=<",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggName {
    Avg,
    Mode,
    Max,
    Min,
    Sum,
    Cnt,
}

impl AggName {
    pub fn from_name(s: &str) -> Option<AggName> {
        Some(match s {
            "avg" => AggName::Avg,
            "mode" => AggName::Mode,
            "max" => AggName::Max,
            "min" => AggName::Min,
            "sum" => AggName::Sum,
            "cnt" => AggName::Cnt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            AggName::Avg => "avg",
            AggName::Mode => "mode",
            AggName::Max => "max",
            AggName::Min => "min",
            AggName::Sum => "sum",
            AggName::Cnt => "cnt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    /// `rv ~= value`, or its negation.
    Value {
        rv: Term,
        value: Term,
        positive: bool,
    },
    Compare {
        op: CmpOp,
        lhs: Term,
        rhs: Term,
    },
    /// `name(template, (goal), result)`, or its negation.
    Aggregate {
        name: AggName,
        template: Term,
        goal: Vec<Literal>,
        result: Term,
        positive: bool,
    },
    /// `linear([x1..xk], [w1..wk, b], output)`.
    Linear {
        inputs: Vec<Term>,
        params: Vec<f64>,
        output: Term,
    },
}

impl Literal {
    pub fn value(rv: Term, value: Term) -> Literal {
        Literal::Value { rv, value, positive: true }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Literal::Value { rv, value, .. } => {
                rv.collect_vars(out);
                value.collect_vars(out);
            }
            Literal::Compare { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Literal::Aggregate { template, goal, result, .. } => {
                template.collect_vars(out);
                goal.iter().for_each(|l| l.collect_vars(out));
                result.collect_vars(out);
            }
            Literal::Linear { inputs, output, .. } => {
                inputs.iter().for_each(|t| t.collect_vars(out));
                output.collect_vars(out);
            }
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Literal {
        match self {
            Literal::Value { rv, value, positive } => {
                Literal::Value { rv: f(rv), value: f(value), positive: *positive }
            }
            Literal::Compare { op, lhs, rhs } => Literal::Compare { op: *op, lhs: f(lhs), rhs: f(rhs) },
            Literal::Aggregate { name, template, goal, result, positive } => Literal::Aggregate {
                name: *name,
                template: f(template),
                goal: goal.iter().map(|l| l.map_terms(f)).collect(),
                result: f(result),
                positive: *positive,
            },
            Literal::Linear { inputs, params, output } => Literal::Linear {
                inputs: inputs.iter().map(&mut *f).collect(),
                params: params.clone(),
                output: f(output),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistExpr {
    Val(Term),
    Bernoulli(Term),
    Discrete(Vec<(Term, Term)>),
    Gaussian(Term, Term),
}

impl DistExpr {
    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            DistExpr::Val(t) | DistExpr::Bernoulli(t) => t.collect_vars(out),
            DistExpr::Discrete(entries) => entries.iter().for_each(|(p, v)| {
                p.collect_vars(out);
                v.collect_vars(out);
            }),
            DistExpr::Gaussian(m, v) => {
                m.collect_vars(out);
                v.collect_vars(out);
            }
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> DistExpr {
        match self {
            DistExpr::Val(t) => DistExpr::Val(f(t)),
            DistExpr::Bernoulli(t) => DistExpr::Bernoulli(f(t)),
            DistExpr::Discrete(entries) => DistExpr::Discrete(entries.iter().map(|(p, v)| (f(p), f(v))).collect()),
            DistExpr::Gaussian(m, v) => DistExpr::Gaussian(f(m), f(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub head: Term,
    pub dist: DistExpr,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        self.dist.collect_vars(&mut out);
        self.body.iter().for_each(|l| l.collect_vars(&mut out));
        out
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Clause {
        Clause {
            head: f(&self.head),
            dist: self.dist.map_terms(f),
            body: self.body.iter().map(|l| l.map_terms(f)).collect(),
        }
    }

    /// Variant with every variable moved to generation `gen`.
    pub fn rename_apart(&self, gen: u32) -> Clause {
        self.map_terms(&mut |t| t.rename(gen))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub combining: CombiningRule,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        Program { clauses, combining: CombiningRule::Mean }
    }

    pub fn with_combining(mut self, rule: CombiningRule) -> Program {
        self.combining = rule;
        self
    }

    pub fn facts(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.is_fact())
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Term]) -> fmt::Result {
    write!(f, "[")?;
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{t}")?;
    }
    write!(f, "]")
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Value { rv, value, positive } => {
                if !positive {
                    write!(f, "\\+ ")?;
                }
                write!(f, "{rv} ~= {value}")
            }
            Literal::Compare { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Literal::Aggregate { name, template, goal, result, positive } => {
                if !positive {
                    write!(f, "\\+ ")?;
                }
                write!(f, "{}({template}, (", name.name())?;
                for (i, l) in goal.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, "), {result})")
            }
            Literal::Linear { inputs, params, output } => {
                write!(f, "linear(")?;
                write_list(f, inputs)?;
                write!(f, ",[")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", fmt_real(*p))?;
                }
                write!(f, "],{output})")
            }
        }
    }
}

impl fmt::Display for DistExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistExpr::Val(t) => write!(f, "val({t})"),
            DistExpr::Bernoulli(p) => write!(f, "bernoulli({p})"),
            DistExpr::Discrete(entries) => {
                write!(f, "discrete([")?;
                for (i, (p, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}:{v}")?;
                }
                write!(f, "])")
            }
            DistExpr::Gaussian(m, v) => write!(f, "gaussian({m},{v})"),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.head, self.dist)?;
        if !self.body.is_empty() {
            write!(f, " <- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        write!(f, ".")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
