//! Lexer and recursive-descent parser for the DC# surface syntax.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::program::{AggName, Clause, CmpOp, DistExpr, Literal, Program};
use crate::term::{Term, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Var(String),
    Int(i64),
    Real(f64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Tilde,
    TildeEq,
    Arrow,
    Neg,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("atom `{s}`"),
            Tok::Quoted(s) => format!("atom '{s}'"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::Int(i) => format!("number `{i}`"),
            Tok::Real(r) => format!("number `{r}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::TildeEq => "`~=`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Neg => "`\\+`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = if c.is_ascii_digit() || (c == '-' && next.is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let mut real = false;
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                real = true;
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    real = true;
                    j = k;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
            }
            let s: String = chars[start..j].iter().collect();
            advance(j - i, &mut i, &mut col);
            if real {
                Tok::Real(s.parse().map_err(|_| err(tl, tc, format!("bad number `{s}`")))?)
            } else {
                Tok::Int(s.parse().map_err(|_| err(tl, tc, format!("bad number `{s}`")))?)
            }
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            advance(j - i, &mut i, &mut col);
            if c.is_uppercase() || c == '_' {
                Tok::Var(s)
            } else {
                Tok::Ident(s)
            }
        } else if c == '\'' {
            let mut s = String::new();
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None | Some('\n') => return Err(err(tl, tc, "unterminated quoted atom".into())),
                    Some('\\') if j + 1 < chars.len() => {
                        s.push(chars[j + 1]);
                        j += 2;
                    }
                    Some('\'') => {
                        j += 1;
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        j += 1;
                    }
                }
            }
            advance(j - i, &mut i, &mut col);
            Tok::Quoted(s)
        } else {
            let (tok, n) = match (c, next) {
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                (':', _) => (Tok::Colon, 1),
                ('~', Some('=')) => (Tok::TildeEq, 2),
                ('~', _) => (Tok::Tilde, 1),
                ('<', Some('-')) => (Tok::Arrow, 2),
                ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
                ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                ('=', Some('=')) => (Tok::Cmp(CmpOp::Eq), 2),
                ('=', Some('<')) => (Tok::Cmp(CmpOp::Le), 2),
                ('\\', Some('+')) => (Tok::Neg, 2),
                _ => return Err(err(tl, tc, format!("unexpected character `{c}`"))),
            };
            advance(n, &mut i, &mut col);
            tok
        };
        out.push(Spanned { tok, line: tl, col: tc });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    anon: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser { toks: lex(text)?, pos: 0, anon: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        let s = &self.toks[self.pos];
        Error::Syntax {
            line: s.line,
            col: s.col,
            msg: format!("expected one of {{{}}}, found {}", expected.join(", "), s.tok.describe()),
        }
    }

    fn fail(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Syntax { line: s.line, col: s.col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn term(&mut self) -> Result<Term> {
        match self.bump() {
            Tok::Var(name) => {
                if name == "_" {
                    self.anon += 1;
                    Ok(Term::Var(Var::new(&format!("_{}", self.anon))))
                } else {
                    Ok(Term::Var(Var::new(&name)))
                }
            }
            Tok::Int(i) => Ok(Term::Int(i)),
            Tok::Real(r) => Ok(Term::Real(r)),
            Tok::Ident(name) | Tok::Quoted(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Term::Compound(Arc::from(name.as_str()), args.into()))
                } else {
                    Ok(Term::Atom(Arc::from(name.as_str())))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.error(&["term"]))
            }
        }
    }

    fn clause(&mut self) -> Result<Clause> {
        let head = self.term()?;
        if head.is_var() || matches!(head, Term::Int(_) | Term::Real(_)) {
            return Err(self.fail(format!("clause head `{head}` is not an RV term")));
        }
        let dist = if *self.peek() == Tok::Tilde {
            self.bump();
            self.dist_expr()?
        } else {
            DistExpr::Val(Term::atom("t"))
        };
        let body = if *self.peek() == Tok::Arrow {
            self.bump();
            self.body()?
        } else {
            Vec::new()
        };
        if *self.peek() != Tok::Dot {
            return Err(self.error(&["`~`", "`<-`", "`.`"]));
        }
        self.bump();
        Ok(Clause { head, dist, body })
    }

    fn dist_expr(&mut self) -> Result<DistExpr> {
        let name = match self.peek() {
            Tok::Ident(n) => n.clone(),
            _ => return Err(self.error(&["val", "bernoulli", "discrete", "gaussian"])),
        };
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let d = match name.as_str() {
            "val" => DistExpr::Val(self.term()?),
            "bernoulli" => DistExpr::Bernoulli(self.param()?),
            "gaussian" => {
                let m = self.param()?;
                self.expect(Tok::Comma, "`,`")?;
                DistExpr::Gaussian(m, self.param()?)
            }
            "discrete" => {
                self.expect(Tok::LBrack, "`[`")?;
                let mut entries = Vec::new();
                loop {
                    let p = self.param()?;
                    self.expect(Tok::Colon, "`:`")?;
                    let v = self.term()?;
                    entries.push((p, v));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrack, "`]`")?;
                DistExpr::Discrete(entries)
            }
            _ => {
                self.pos -= 2;
                return Err(self.error(&["val", "bernoulli", "discrete", "gaussian"]));
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(d)
    }

    fn param(&mut self) -> Result<Term> {
        match self.peek() {
            Tok::Int(_) | Tok::Real(_) | Tok::Var(_) => self.term(),
            _ => Err(self.error(&["number", "variable"])),
        }
    }

    fn body(&mut self) -> Result<Vec<Literal>> {
        let mut lits = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> Result<Literal> {
        let positive = if *self.peek() == Tok::Neg {
            self.bump();
            false
        } else {
            true
        };
        if let Tok::Ident(name) = self.peek().clone() {
            if *self.peek_at(1) == Tok::LParen {
                if let Some(agg) = AggName::from_name(&name) {
                    let save = (self.pos, self.anon);
                    match self.aggregate(agg, positive) {
                        Ok(lit) => return Ok(lit),
                        Err(e) => {
                            // An RV term that happens to share an aggregate's name.
                            (self.pos, self.anon) = save;
                            if self.looks_like_aggregate() {
                                return Err(e);
                            }
                        }
                    }
                }
                if name == "linear" && *self.peek_at(2) == Tok::LBrack {
                    if !positive {
                        return Err(self.fail("statistical atoms cannot be negated"));
                    }
                    return self.linear();
                }
            }
        }
        let lhs = self.term()?;
        match self.peek().clone() {
            Tok::TildeEq => {
                self.bump();
                if lhs.is_var() || matches!(lhs, Term::Int(_) | Term::Real(_)) {
                    return Err(self.fail(format!("`{lhs}` is not an RV term")));
                }
                let value = self.term()?;
                if !(value.is_var() || value.is_constant()) {
                    return Err(self.fail(format!("value `{value}` must be a variable or a constant")));
                }
                Ok(Literal::Value { rv: lhs, value, positive })
            }
            Tok::Cmp(op) => {
                if !positive {
                    return Err(self.fail("comparisons cannot be negated"));
                }
                self.bump();
                let rhs = self.term()?;
                for t in [&lhs, &rhs] {
                    if !(t.is_var() || t.is_constant()) {
                        return Err(self.fail(format!("comparison operand `{t}` must be a variable or a constant")));
                    }
                }
                Ok(Literal::Compare { op, lhs, rhs })
            }
            _ => Err(self.error(&["`~=`", "`==`", "`<`", "`>`", "`>=`", "`=<`"])),
        }
    }

    /// After the aggregate name and `(`, a template then `,` then `(` marks an aggregate.
    fn looks_like_aggregate(&mut self) -> bool {
        let save = (self.pos, self.anon);
        self.bump();
        self.bump();
        let ok = self.term().is_ok() && *self.peek() == Tok::Comma && *self.peek_at(1) == Tok::LParen;
        (self.pos, self.anon) = save;
        ok
    }

    fn aggregate(&mut self, name: AggName, positive: bool) -> Result<Literal> {
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let template = self.term()?;
        self.expect(Tok::Comma, "`,`")?;
        let goal = if *self.peek() == Tok::LParen {
            self.bump();
            let g = self.body()?;
            self.expect(Tok::RParen, "`)`")?;
            g
        } else {
            vec![self.literal()?]
        };
        self.expect(Tok::Comma, "`,`")?;
        let result = self.term()?;
        if !(result.is_var() || result.is_constant()) {
            return Err(self.fail("aggregate result must be a variable or a constant"));
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(Literal::Aggregate { name, template, goal, result, positive })
    }

    fn linear(&mut self) -> Result<Literal> {
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        self.expect(Tok::LBrack, "`[`")?;
        let mut inputs = Vec::new();
        if *self.peek() != Tok::RBrack {
            loop {
                let t = self.term()?;
                if !(t.is_var() || t.as_f64().is_some()) {
                    return Err(self.fail("linear inputs must be variables or numbers"));
                }
                inputs.push(t);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::RBrack, "`]`")?;
        self.expect(Tok::Comma, "`,`")?;
        self.expect(Tok::LBrack, "`[`")?;
        let mut params = Vec::new();
        loop {
            match self.bump() {
                Tok::Int(i) => params.push(i as f64),
                Tok::Real(r) => params.push(r),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(&["number"]));
                }
            }
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
        }
        self.expect(Tok::RBrack, "`]`")?;
        if params.len() != inputs.len() + 1 {
            return Err(self.fail(format!(
                "linear with {} inputs needs {} parameters, found {}",
                inputs.len(),
                inputs.len() + 1,
                params.len()
            )));
        }
        self.expect(Tok::Comma, "`,`")?;
        let output = self.term()?;
        if !output.is_var() {
            return Err(self.fail("linear output must be a variable"));
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(Literal::Linear { inputs, params, output })
    }
}

pub fn parse_program(text: &str) -> Result<Program> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while !p.at_eof() {
        clauses.push(p.clause()?);
    }
    Ok(Program::new(clauses))
}

/// A query: comma-joined body literals with an optional final `.`.
pub fn parse_query(text: &str) -> Result<Vec<Literal>> {
    let mut p = Parser::new(text)?;
    let body = p.body()?;
    if *p.peek() == Tok::Dot {
        p.bump();
    }
    if !p.at_eof() {
        return Err(p.error(&["`,`", "`.`", "end of input"]));
    }
    Ok(body)
}

/// Evidence: a sequence of ground `term ~= value.` statements.
pub fn parse_evidence(text: &str) -> Result<Vec<(Term, Term)>> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        let (line, col) = (p.toks[p.pos].line, p.toks[p.pos].col);
        match p.literal()? {
            Literal::Value { rv, value, positive: true } if rv.is_ground() && value.is_ground() => {
                out.push((rv, value))
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("evidence must be a ground `term ~= value`, found `{other}`"),
                })
            }
        }
        if *p.peek() == Tok::Dot || *p.peek() == Tok::Comma {
            p.bump();
        } else if !p.at_eof() {
            return Err(p.error(&["`.`"]));
        }
    }
    Ok(out)
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if !p.at_eof() {
        return Err(p.error(&["end of input"]));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX42: &str = "\
client(ann) ~ val(t).
loan(l_1) ~ val(t).
loan(l_2) ~ val(t).
has_loan(C,L) ~ bernoulli(0.2) <- client(C) ~= t, loan(L) ~= t.
status(L) ~ discrete([0.3:a, 0.7:d]) <- loan(L) ~= t.
credit_score(C) ~ gaussian(650,15.4) <- has_loan(C,L) ~= Y, Y==f.
credit_score(C) ~ gaussian(700,10.9) <- has_loan(C,L) ~= t, status(L) ~= X, X==a.
credit_score(C) ~ gaussian(600,20.5) <- has_loan(C,L) ~= t, status(L) ~= X, X==d.
";

    #[test]
    fn parses_example_program() {
        let p = parse_program(EX42).unwrap();
        assert_eq!(p.clauses.len(), 8);
        assert_eq!(p.facts().count(), 3);
        assert_eq!(p.clauses[5].to_string(), "credit_score(C) ~ gaussian(650,15.4) <- has_loan(C,L) ~= Y, Y == f.");
    }

    #[test]
    fn probabilistic_fact() {
        let p = parse_program("age(bob) ~ gaussian(40,0.2).").unwrap();
        assert_eq!(p.clauses.len(), 1);
        assert!(p.clauses[0].body.is_empty());
        assert_eq!(p.clauses[0].dist, DistExpr::Gaussian(Term::Int(40), Term::Real(0.2)));
    }

    #[test]
    fn empty_input() {
        assert!(parse_program("").unwrap().clauses.is_empty());
        assert!(parse_program("% only a comment\n").unwrap().clauses.is_empty());
    }

    #[test]
    fn round_trip() {
        let p = parse_program(EX42).unwrap();
        let printed = p.to_string();
        let q = parse_program(&printed).unwrap();
        assert_eq!(p, q);
        assert_eq!(printed, q.to_string());
    }

    #[test]
    fn syntax_error_location() {
        let e = parse_program("a ~ bernoulli(0.2)\nb ~ val(t).").unwrap_err();
        match e {
            Error::Syntax { line, col, msg } => {
                assert_eq!((line, col), (2, 1));
                assert!(msg.contains("`.`"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn appendix_constructs() {
        let src = "\
loan_status(L) ~ val(appr) <- mode(X, (has_loan(C,L) ~= t, status(L) ~= X), appr).
age(C) ~ gaussian(M,2.0) <- client(C) ~= t, x(C) ~= X, linear([X],[20.1,30.9],M).
score(C) ~ gaussian(500,30.2) <- client(C) ~= t, \\+ cnt(L, has_loan(C,L) ~= t, N).
q(C) ~ val(t) <- client(C) ~= t, \\+ status(C) ~= _.
mode(x) ~ val(t) <- max(a) ~= t.
";
        let p = parse_program(src).unwrap();
        assert!(matches!(p.clauses[0].body[0], Literal::Aggregate { name: AggName::Mode, .. }));
        assert!(matches!(p.clauses[1].body[2], Literal::Linear { .. }));
        assert!(matches!(p.clauses[2].body[1], Literal::Aggregate { positive: false, .. }));
        assert!(matches!(p.clauses[3].body[1], Literal::Value { positive: false, .. }));
        assert!(matches!(p.clauses[4].body[0], Literal::Value { .. }));
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(again.to_string(), p.to_string());
    }

    #[test]
    fn query_and_evidence() {
        let q = parse_query("credit_score(ann) ~= X, X > 700").unwrap();
        assert_eq!(q.len(), 2);
        let ev = parse_evidence("a ~= 1.\nb(x) ~= t.\n% c\nc ~= 601.2.\n").unwrap();
        assert_eq!(ev.len(), 3);
        assert_eq!(ev[2].1, Term::Real(601.2));
        assert!(parse_evidence("a ~= X.").is_err());
    }

    #[test]
    fn reals_and_exponents() {
        let t = parse_term("f(1e-7, -2.5, 3, 650.0)").unwrap();
        assert_eq!(t.to_string(), "f(1e-7,-2.5,3,650.0)");
    }
}
