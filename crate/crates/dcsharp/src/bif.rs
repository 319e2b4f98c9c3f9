//! Discrete Bayesian networks: BIF reading and writing, import as DC(B)
//! programs (one clause per CPT row, or exact tree-compressed CPDs), random
//! tree-CPD networks, and exact marginals by variable elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::CombiningRule;
use crate::error::{Error, Result};
use crate::program::{Clause, DistExpr, Literal, Program};
use crate::term::{bool_value, Term};

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub values: Vec<String>,
}

/// A conditional probability table. `rows[k]` is the child distribution under
/// parent configuration `k`, with the last parent varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub parents: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    pub name: String,
    pub vars: Vec<Variable>,
    /// Indexed like `vars`.
    pub cpts: Vec<Cpt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImportMode {
    Tabular,
    Tree,
}

// ---------------------------------------------------------------- parsing

#[derive(Clone, Debug, PartialEq)]
struct Tok {
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            col += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
            i += 2;
            col += 2;
            continue;
        }
        if c == '"' {
            let (l0, c0) = (line, col);
            let mut s = String::from("\"");
            i += 1;
            col += 1;
            while i < chars.len() && chars[i] != '"' {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            s.push('"');
            i += 1;
            col += 1;
            out.push(Tok { text: s, line: l0, col: c0 });
            continue;
        }
        if "{}()[];,|".contains(c) {
            out.push(Tok { text: c.to_string(), line, col });
            i += 1;
            col += 1;
            continue;
        }
        let (l0, c0) = (line, col);
        let mut s = String::new();
        while i < chars.len() && !chars[i].is_whitespace() && !"{}()[];,|\"".contains(chars[i]) {
            s.push(chars[i]);
            i += 1;
            col += 1;
        }
        out.push(Tok { text: s, line: l0, col: c0 });
    }
    out
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        Err(Error::Bif { line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|t| t.text.as_str())
    }

    fn next(&mut self) -> Result<String> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.peek() == Some(s) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.peek().unwrap_or("end of input").to_string();
            self.err(format!("expected `{s}`, found `{found}`"))
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.peek() {
            Some(t) if !"{}()[];,|".contains(t) => self.next(),
            Some(t) => {
                let t = t.to_string();
                self.err(format!("expected a name, found `{t}`"))
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let w = self.word()?;
        match w.parse::<f64>() {
            Ok(x) => Ok(x),
            Err(_) => {
                self.pos -= 1;
                self.err(format!("expected a probability, found `{w}`"))
            }
        }
    }

    fn skip_to_semicolon(&mut self) -> Result<()> {
        while self.peek() != Some(";") {
            self.next()?;
        }
        self.pos += 1;
        Ok(())
    }

    fn skip_block(&mut self) -> Result<()> {
        self.expect("{")?;
        let mut depth = 1;
        while depth > 0 {
            match self.next()?.as_str() {
                "{" => depth += 1,
                "}" => depth -= 1,
                _ => {}
            }
        }
        Ok(())
    }

    fn list_of<T>(&mut self, close: &str, mut item: impl FnMut(&mut Parser) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.peek() == Some(",") {
            self.pos += 1;
            out.push(item(self)?);
        }
        self.expect(close)?;
        Ok(out)
    }
}

/// Parse a BIF 0.3 network with discrete variables.
pub fn parse_bif(src: &str) -> Result<BayesNet> {
    let mut p = Parser { toks: lex(src), pos: 0 };
    let mut name = String::new();
    let mut vars: Vec<Variable> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut cpts: BTreeMap<usize, Cpt> = BTreeMap::new();
    while let Some(kw) = p.peek() {
        match kw {
            "network" => {
                p.pos += 1;
                name = p.word()?;
                p.skip_block()?;
            }
            "variable" => {
                p.pos += 1;
                let vname = p.word()?;
                p.expect("{")?;
                let mut values = None;
                while p.peek() != Some("}") {
                    match p.peek() {
                        Some("type") => {
                            p.pos += 1;
                            let kind = p.word()?;
                            if kind != "discrete" {
                                p.pos -= 1;
                                return p.err(format!(
                                    "variable `{vname}` is {kind}; only discrete variables are supported"
                                ));
                            }
                            p.expect("[")?;
                            let n = p.word()?;
                            p.expect("]")?;
                            p.expect("{")?;
                            let vs = p.list_of("}", |p| p.word())?;
                            p.expect(";")?;
                            if n.parse::<usize>().ok() != Some(vs.len()) {
                                return p.err(format!("variable `{vname}` declares {n} values but lists {}", vs.len()));
                            }
                            values = Some(vs);
                        }
                        Some(_) => p.skip_to_semicolon()?,
                        None => return p.err("unterminated variable block"),
                    }
                }
                p.expect("}")?;
                let Some(values) = values else { return p.err(format!("variable `{vname}` has no type")) };
                if index.insert(vname.clone(), vars.len()).is_some() {
                    return p.err(format!("variable `{vname}` declared twice"));
                }
                vars.push(Variable { name: vname, values });
            }
            "probability" => {
                p.pos += 1;
                p.expect("(")?;
                let lookup = |p: &mut Parser| -> Result<usize> {
                    let w = p.word()?;
                    match index.get(&w) {
                        Some(&i) => Ok(i),
                        None => {
                            p.pos -= 1;
                            p.err(format!("unknown variable `{w}`"))
                        }
                    }
                };
                let child = lookup(&mut p)?;
                let parents = if p.peek() == Some("|") {
                    p.pos += 1;
                    p.list_of(")", lookup)?
                } else {
                    p.expect(")")?;
                    Vec::new()
                };
                let k = vars[child].values.len();
                let configs: usize = parents.iter().map(|&q| vars[q].values.len()).product();
                let mut rows: Vec<Option<Vec<f64>>> = vec![None; configs];
                p.expect("{")?;
                while p.peek() != Some("}") {
                    match p.peek() {
                        Some("table") => {
                            p.pos += 1;
                            let xs = p.list_of(";", |p| p.number())?;
                            if xs.len() != k * configs {
                                return p.err(format!(
                                    "table for `{}` has {} entries, expected {}",
                                    vars[child].name,
                                    xs.len(),
                                    k * configs
                                ));
                            }
                            for (c, row) in rows.iter_mut().enumerate() {
                                *row = Some(xs[c * k..(c + 1) * k].to_vec());
                            }
                        }
                        Some("(") => {
                            p.pos += 1;
                            let vals = p.list_of(")", |p| p.word())?;
                            if vals.len() != parents.len() {
                                return p.err("parent configuration has the wrong arity");
                            }
                            let mut c = 0;
                            for (&q, v) in parents.iter().zip(&vals) {
                                let Some(j) = vars[q].values.iter().position(|x| x == v) else {
                                    return p.err(format!("`{v}` is not a value of `{}`", vars[q].name));
                                };
                                c = c * vars[q].values.len() + j;
                            }
                            let xs = p.list_of(";", |p| p.number())?;
                            if xs.len() != k {
                                return p.err(format!("row has {} entries, expected {k}", xs.len()));
                            }
                            rows[c] = Some(xs);
                        }
                        Some(_) => p.skip_to_semicolon()?,
                        None => return p.err("unterminated probability block"),
                    }
                }
                p.expect("}")?;
                let rows: Option<Vec<Vec<f64>>> = rows.into_iter().collect();
                let Some(rows) = rows else {
                    return p.err(format!("probability block for `{}` is incomplete", vars[child].name));
                };
                for r in &rows {
                    if r.iter().any(|&x| x < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
                        return p.err(format!("a row for `{}` is not a distribution", vars[child].name));
                    }
                }
                cpts.insert(child, Cpt { parents, rows });
            }
            other => {
                let other = other.to_string();
                return p.err(format!("expected `network`, `variable` or `probability`, found `{other}`"));
            }
        }
    }
    let mut out = Vec::with_capacity(vars.len());
    for (i, v) in vars.iter().enumerate() {
        match cpts.remove(&i) {
            Some(c) => out.push(c),
            None => {
                return Err(Error::Bif {
                    line: 0,
                    col: 0,
                    msg: format!("variable `{}` has no probability block", v.name),
                })
            }
        }
    }
    let bn = BayesNet { name, vars, cpts: out };
    if bn.topo_order().len() < bn.vars.len() {
        return Err(Error::Bif { line: 0, col: 0, msg: "the network has a directed cycle".into() });
    }
    Ok(bn)
}

/// Write the network in BIF, using `table` blocks.
pub fn write_bif(bn: &BayesNet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "network {} {{\n}}", if bn.name.is_empty() { "unnamed" } else { &bn.name });
    for v in &bn.vars {
        let _ = writeln!(
            s,
            "variable {} {{\n  type discrete [ {} ] {{ {} }};\n}}",
            v.name,
            v.values.len(),
            v.values.join(", ")
        );
    }
    for (i, c) in bn.cpts.iter().enumerate() {
        let head = if c.parents.is_empty() {
            bn.vars[i].name.clone()
        } else {
            let ps: Vec<&str> = c.parents.iter().map(|&q| bn.vars[q].name.as_str()).collect();
            format!("{} | {}", bn.vars[i].name, ps.join(", "))
        };
        let xs: Vec<String> = c.rows.iter().flatten().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(s, "probability ( {head} ) {{\n  table {};\n}}", xs.join(", "));
    }
    s
}

// ---------------------------------------------------------------- programs

impl BayesNet {
    pub fn configs(&self, v: usize) -> usize {
        self.cpts[v].parents.iter().map(|&q| self.vars[q].values.len()).product()
    }

    /// Parent values of configuration `c`, aligned with `cpts[v].parents`.
    pub fn config_values(&self, v: usize, mut c: usize) -> Vec<usize> {
        let ps = &self.cpts[v].parents;
        let mut out = vec![0; ps.len()];
        for (j, &q) in ps.iter().enumerate().rev() {
            let k = self.vars[q].values.len();
            out[j] = c % k;
            c /= k;
        }
        out
    }

    pub fn rv(&self, v: usize) -> Term {
        Term::atom(&self.vars[v].name)
    }

    pub fn value(&self, v: usize, j: usize) -> Term {
        let s = &self.vars[v].values[j];
        match s.parse::<i64>() {
            Ok(i) => Term::Int(i),
            Err(_) => Term::atom(s),
        }
    }

    /// `bernoulli` for two-valued boolean domains, `discrete` otherwise.
    fn dist(&self, v: usize, probs: &[f64]) -> DistExpr {
        let vals: Vec<Term> = (0..probs.len()).map(|j| self.value(v, j)).collect();
        if vals.len() == 2 {
            let b: Vec<Option<bool>> = vals.iter().map(bool_value).collect();
            if let [Some(x), Some(y)] = b[..] {
                if x != y {
                    let p_true = if x { probs[0] } else { probs[1] };
                    return DistExpr::Bernoulli(Term::Real(p_true));
                }
            }
        }
        DistExpr::Discrete(probs.iter().zip(vals).map(|(&p, v)| (Term::Real(p), v)).collect())
    }

    fn literal(&self, q: usize, j: usize) -> Literal {
        Literal::value(self.rv(q), self.value(q, j))
    }

    /// The network as a DC(B) program.
    pub fn to_program(&self, mode: ImportMode) -> Program {
        let mut clauses = Vec::new();
        for v in 0..self.vars.len() {
            match mode {
                ImportMode::Tabular => {
                    for c in 0..self.configs(v) {
                        let pv = self.config_values(v, c);
                        let body = self.cpts[v].parents.iter().zip(&pv).map(|(&q, &j)| self.literal(q, j)).collect();
                        clauses.push(Clause { head: self.rv(v), dist: self.dist(v, &self.cpts[v].rows[c]), body });
                    }
                }
                ImportMode::Tree => {
                    let all: Vec<usize> = (0..self.configs(v)).collect();
                    let free: Vec<usize> = (0..self.cpts[v].parents.len()).collect();
                    self.tree_clauses(v, &all, &free, &mut Vec::new(), &mut clauses);
                }
            }
        }
        Program::new(clauses).with_combining(CombiningRule::Mean)
    }

    /// Exact decision tree over the configurations `rows` of `v`'s CPT. Splits on the
    /// parent that turns the most branches into leaves; ties go to the parent name.
    fn tree_clauses(&self, v: usize, rows: &[usize], free: &[usize], path: &mut Vec<Literal>, out: &mut Vec<Clause>) {
        let cpt = &self.cpts[v];
        let same = |rs: &[usize]| rs.iter().all(|&r| cpt.rows[r] == cpt.rows[rs[0]]);
        if same(rows) || free.is_empty() {
            out.push(Clause { head: self.rv(v), dist: self.dist(v, &cpt.rows[rows[0]]), body: path.clone() });
            return;
        }
        let split = |pi: usize| -> Vec<Vec<usize>> {
            let q = cpt.parents[pi];
            let mut parts = vec![Vec::new(); self.vars[q].values.len()];
            for &r in rows {
                parts[self.config_values(v, r)[pi]].push(r);
            }
            parts
        };
        let &best = free
            .iter()
            .max_by(|&&a, &&b| {
                let leaves = |pi: usize| split(pi).iter().filter(|p| same(p)).count();
                let name = |pi: usize| &self.vars[cpt.parents[pi]].name;
                leaves(a).cmp(&leaves(b)).then_with(|| name(b).cmp(name(a)))
            })
            .unwrap();
        let rest: Vec<usize> = free.iter().copied().filter(|&x| x != best).collect();
        for (j, part) in split(best).into_iter().enumerate() {
            path.push(self.literal(cpt.parents[best], j));
            self.tree_clauses(v, &part, &rest, path, out);
            path.pop();
        }
    }

    /// Variables with parents before children.
    pub fn topo_order(&self) -> Vec<usize> {
        let n = self.vars.len();
        let mut indeg: Vec<usize> = self.cpts.iter().map(|c| c.parents.len()).collect();
        let mut children = vec![Vec::new(); n];
        for (v, c) in self.cpts.iter().enumerate() {
            for &q in &c.parents {
                children[q].push(v);
            }
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            out.push(v);
            for &c in children[v].iter().rev() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(c);
                }
            }
        }
        out
    }

    /// One world by ancestral sampling, as value indices.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut world = vec![0; self.vars.len()];
        for v in self.topo_order() {
            let c = self.cpts[v].parents.iter().fold(0, |c, &q| c * self.vars[q].values.len() + world[q]);
            let u: f64 = rng.gen();
            let row = &self.cpts[v].rows[c];
            let mut acc = 0.0;
            world[v] = row.len() - 1;
            for (j, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    world[v] = j;
                    break;
                }
            }
        }
        world
    }

    // ------------------------------------------------------------ exact

    /// P(var = value | evidence) by variable elimination. Evidence pairs are (variable, value index).
    pub fn posterior(&self, var: usize, evidence: &[(usize, usize)]) -> Result<Vec<f64>> {
        let ev: BTreeMap<usize, usize> = evidence.iter().copied().collect();
        let mut factors: Vec<Factor> = (0..self.vars.len()).map(|v| self.factor(v, &ev)).collect();
        // Only ancestors of the query and evidence matter; others sum to one.
        let mut keep = vec![false; self.vars.len()];
        let mut stack: Vec<usize> = std::iter::once(var).chain(ev.keys().copied()).collect();
        while let Some(u) = stack.pop() {
            if !std::mem::replace(&mut keep[u], true) {
                stack.extend(self.cpts[u].parents.iter().copied());
            }
        }
        factors = factors.into_iter().enumerate().filter(|(i, _)| keep[*i]).map(|(_, f)| f).collect();
        let mut remaining: BTreeSet<usize> = (0..self.vars.len()).filter(|&u| keep[u] && u != var).collect();
        while !remaining.is_empty() {
            // Eliminate the variable whose product factor is smallest.
            let &x = remaining
                .iter()
                .min_by_key(|&&x| {
                    let mut scope = BTreeSet::new();
                    for f in factors.iter().filter(|f| f.vars.contains(&x)) {
                        scope.extend(f.vars.iter().copied());
                    }
                    scope.iter().map(|&u| self.vars[u].values.len()).product::<usize>()
                })
                .unwrap();
            remaining.remove(&x);
            let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&x));
            factors = without;
            if let Some(prod) = with.into_iter().reduce(|a, b| a.product(&b, self)) {
                factors.push(prod.sum_out(x, self));
            }
        }
        let joint = factors.into_iter().reduce(|a, b| a.product(&b, self)).expect("query factor");
        let joint = joint.sum_out_all_but(var, self);
        let z: f64 = joint.iter().sum();
        if z <= 0.0 {
            return Err(Error::ZeroEvidence);
        }
        Ok(joint.iter().map(|x| x / z).collect())
    }

    fn factor(&self, v: usize, ev: &BTreeMap<usize, usize>) -> Factor {
        let cpt = &self.cpts[v];
        let mut vars: Vec<usize> = cpt.parents.clone();
        vars.push(v);
        let mut f = Factor::zeros(vars.clone(), self);
        for c in 0..self.configs(v) {
            let pv = self.config_values(v, c);
            for (j, &p) in cpt.rows[c].iter().enumerate() {
                let mut asg: Vec<usize> = pv.clone();
                asg.push(j);
                if vars.iter().zip(&asg).any(|(u, a)| ev.get(u).is_some_and(|e| e != a)) {
                    continue;
                }
                let k = f.index(&vars.iter().copied().zip(asg).collect::<BTreeMap<_, _>>(), self);
                f.table[k] = p;
            }
        }
        f
    }
}

/// A table over variables `vars` (sorted), last variable varying fastest.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    fn zeros(mut vars: Vec<usize>, bn: &BayesNet) -> Factor {
        vars.sort_unstable();
        vars.dedup();
        let n = vars.iter().map(|&u| bn.vars[u].values.len()).product();
        Factor { vars, table: vec![0.0; n] }
    }

    fn index(&self, asg: &BTreeMap<usize, usize>, bn: &BayesNet) -> usize {
        self.vars.iter().fold(0, |k, u| k * bn.vars[*u].values.len() + asg[u])
    }

    fn assignments(&self, bn: &BayesNet) -> impl Iterator<Item = BTreeMap<usize, usize>> + '_ {
        let sizes: Vec<usize> = self.vars.iter().map(|&u| bn.vars[u].values.len()).collect();
        (0..self.table.len()).map(move |mut k| {
            let mut a = BTreeMap::new();
            for (j, &u) in self.vars.iter().enumerate().rev() {
                a.insert(u, k % sizes[j]);
                k /= sizes[j];
            }
            a
        })
    }

    fn product(&self, other: &Factor, bn: &BayesNet) -> Factor {
        let mut f = Factor::zeros(self.vars.iter().chain(&other.vars).copied().collect(), bn);
        let asgs: Vec<BTreeMap<usize, usize>> = f.assignments(bn).collect();
        for (k, a) in asgs.iter().enumerate() {
            f.table[k] = self.table[self.index(a, bn)] * other.table[other.index(a, bn)];
        }
        f
    }

    fn sum_out(&self, x: usize, bn: &BayesNet) -> Factor {
        let mut f = Factor::zeros(self.vars.iter().copied().filter(|&u| u != x).collect(), bn);
        let asgs: Vec<BTreeMap<usize, usize>> = self.assignments(bn).collect();
        for (k, a) in asgs.iter().enumerate() {
            let j = f.index(a, bn);
            f.table[j] += self.table[k];
        }
        f
    }

    fn sum_out_all_but(&self, x: usize, bn: &BayesNet) -> Vec<f64> {
        let mut out = vec![0.0; bn.vars[x].values.len()];
        for (k, a) in self.assignments(bn).enumerate() {
            out[a[&x]] += self.table[k];
        }
        out
    }
}

// ---------------------------------------------------------------- generator

/// A random binary network whose CPTs come from random trees, so CPTs repeat
/// rows under context-specific independence. Node `i` draws up to `max_parents`
/// candidate parents among earlier nodes; each tree node splits on a remaining
/// candidate with probability `density`. `density = 0` gives single-leaf trees.
pub fn random_tree_bn(n_nodes: usize, max_parents: usize, density: f64, seed: u64) -> BayesNet {
    assert!(n_nodes <= 64, "at most 64 nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = format!("{}", n_nodes.saturating_sub(1)).len().max(2);
    let vars: Vec<Variable> = (0..n_nodes)
        .map(|i| Variable { name: format!("v{i:0width$}"), values: vec!["0".into(), "1".into()] })
        .collect();
    let mut cpts = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let k = rng.gen_range(0..=max_parents.min(i));
        let mut parents: Vec<usize> = rand::seq::index::sample(&mut rng, i, k).into_vec();
        parents.sort_unstable();
        // Leaf distribution per configuration: walk a random tree over the parent positions.
        fn grow(rng: &mut ChaCha8Rng, free: &[usize], density: f64) -> Tree {
            if free.is_empty() || !rng.gen_bool(density) {
                return Tree::Leaf(rng.gen_range(0.05..0.95));
            }
            let pick = free[rng.gen_range(0..free.len())];
            let rest: Vec<usize> = free.iter().copied().filter(|&x| x != pick).collect();
            Tree::Split(pick, Box::new(grow(rng, &rest, density)), Box::new(grow(rng, &rest, density)))
        }
        let positions: Vec<usize> = (0..parents.len()).collect();
        let tree = grow(&mut rng, &positions, density);
        let configs = 1usize << parents.len();
        let rows = (0..configs)
            .map(|c| {
                let bit = |pos: usize| (c >> (parents.len() - 1 - pos)) & 1;
                let mut t = &tree;
                let p1 = loop {
                    match t {
                        Tree::Leaf(p) => break *p,
                        Tree::Split(pos, zero, one) => t = if bit(*pos) == 0 { zero } else { one },
                    }
                };
                vec![1.0 - p1, p1]
            })
            .collect();
        cpts.push(Cpt { parents, rows });
    }
    BayesNet { name: format!("random{seed}"), vars, cpts }
}

enum Tree {
    Leaf(f64),
    Split(usize, Box<Tree>, Box<Tree>),
}
