//! Distributions, log-likelihoods and combining rules.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::program::DistExpr;
use crate::term::{bool_value, values_match, Subst, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CombiningRule {
    #[default]
    Mean,
    NoisyOr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Val(Term),
    Bernoulli(f64),
    Discrete(Vec<(f64, Term)>),
    Gaussian { mean: f64, variance: f64 },
}

fn truth(b: bool) -> Term {
    Term::atom(if b { "t" } else { "f" })
}

fn log_normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (2.0 * PI * variance).ln() - d * d / (2.0 * variance)
}

/// Merge values that denote the same outcome, keeping first-seen order.
fn merge_support(entries: impl IntoIterator<Item = (Term, f64)>) -> Vec<(Term, f64)> {
    let mut out: Vec<(Term, f64)> = Vec::new();
    for (v, p) in entries {
        match out.iter_mut().find(|(w, _)| values_match(w, &v)) {
            Some(slot) => slot.1 += p,
            None => out.push((v, p)),
        }
    }
    out
}

impl Distribution {
    pub fn bernoulli(p: f64) -> Result<Distribution> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Distribution(format!("bernoulli parameter {p} outside [0,1]")));
        }
        Ok(Distribution::Bernoulli(p))
    }

    pub fn discrete(entries: Vec<(f64, Term)>) -> Result<Distribution> {
        if entries.is_empty() {
            return Err(Error::Distribution("discrete distribution without entries".into()));
        }
        if let Some((p, _)) = entries.iter().find(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::Distribution(format!("negative probability {p}")));
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!("discrete probabilities sum to {total}")));
        }
        if let Some((_, v)) = entries.iter().find(|(_, v)| !v.is_ground()) {
            return Err(Error::Distribution(format!("non-ground discrete value {v}")));
        }
        Ok(Distribution::Discrete(entries))
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Distribution> {
        if variance.is_nan() || variance <= 0.0 || !mean.is_finite() || !variance.is_finite() {
            return Err(Error::Distribution(format!(
                "gaussian({mean},{variance}) needs finite mean and positive variance"
            )));
        }
        Ok(Distribution::Gaussian { mean, variance })
    }

    /// Instantiate a distribution expression under `s`.
    pub fn from_expr(expr: &DistExpr, s: &Subst) -> Result<Distribution> {
        let num = |t: &Term| -> Result<f64> {
            let v = s.apply(t);
            v.as_f64().ok_or_else(|| {
                if v.is_var() {
                    Error::Unbound(format!("distribution parameter {v}"))
                } else {
                    Error::TypeMismatch(format!("distribution parameter {v} is not a number"))
                }
            })
        };
        match expr {
            DistExpr::Val(t) => {
                let v = s.apply(t);
                if !v.is_ground() {
                    return Err(Error::Unbound(format!("val({v})")));
                }
                Ok(Distribution::Val(v))
            }
            DistExpr::Bernoulli(p) => Distribution::bernoulli(num(p)?),
            DistExpr::Gaussian(m, v) => Distribution::gaussian(num(m)?, num(v)?),
            DistExpr::Discrete(entries) => {
                let mut out = Vec::with_capacity(entries.len());
                for (p, v) in entries {
                    out.push((num(p)?, s.apply(v)));
                }
                Distribution::discrete(out)
            }
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Distribution::Gaussian { .. })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Term {
        match self {
            Distribution::Val(t) => t.clone(),
            Distribution::Bernoulli(p) => truth(rng.gen::<f64>() < *p),
            Distribution::Discrete(entries) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (p, v) in entries {
                    acc += p;
                    if u < acc {
                        return v.clone();
                    }
                }
                entries.iter().rev().find(|(p, _)| *p > 0.0).unwrap_or(&entries[0]).1.clone()
            }
            Distribution::Gaussian { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                Term::Real(mean + variance.sqrt() * z)
            }
        }
    }

    pub fn log_likelihood(&self, v: &Term) -> Result<f64> {
        match self {
            Distribution::Val(t) => Ok(if values_match(t, v) { 0.0 } else { f64::NEG_INFINITY }),
            Distribution::Bernoulli(p) => match bool_value(v) {
                Some(true) => Ok(p.ln()),
                Some(false) => Ok((1.0 - p).ln()),
                None => Err(Error::TypeMismatch(format!("{v} probed against bernoulli({p})"))),
            },
            Distribution::Discrete(entries) => {
                let p: f64 = entries.iter().filter(|(_, w)| values_match(w, v)).map(|(p, _)| p).sum();
                Ok(p.ln())
            }
            Distribution::Gaussian { mean, variance } => match v.as_f64() {
                Some(x) => Ok(log_normal_pdf(x, *mean, *variance)),
                None => Err(Error::TypeMismatch(format!("{v} probed against a gaussian"))),
            },
        }
    }

    pub fn likelihood(&self, v: &Term) -> Result<f64> {
        self.log_likelihood(v).map(f64::exp)
    }

    /// Outcomes with positive mass; discrete distributions only.
    pub fn support(&self) -> Result<Vec<(Term, f64)>> {
        match self {
            Distribution::Val(t) => Ok(vec![(t.clone(), 1.0)]),
            Distribution::Bernoulli(p) => {
                Ok([(truth(true), *p), (truth(false), 1.0 - p)].into_iter().filter(|(_, p)| *p > 0.0).collect())
            }
            Distribution::Discrete(entries) => Ok(merge_support(entries.iter().map(|(p, v)| (v.clone(), *p)))
                .into_iter()
                .filter(|(_, p)| *p > 0.0)
                .collect()),
            Distribution::Gaussian { .. } => Err(Error::Oracle("oracle is discrete-only".into())),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let real = |x: f64| Term::Real(x).to_string();
        match self {
            Distribution::Val(t) => write!(f, "val({t})"),
            Distribution::Bernoulli(p) => write!(f, "bernoulli({})", real(*p)),
            Distribution::Discrete(entries) => {
                write!(f, "discrete([")?;
                for (i, (p, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}:{v}", real(*p))?;
                }
                write!(f, "])")
            }
            Distribution::Gaussian { mean, variance } => write!(f, "gaussian({},{})", real(*mean), real(*variance)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Combined {
    Single(Distribution),
    Mixture(Vec<Distribution>),
    /// Noisy-or held as ln P(false), so many strong causes do not round P(false) to zero.
    NoisyOr {
        log_false: f64,
    },
}

/// Apply a combining rule to the multiset of distributions collected for one RV.
pub fn combine(rule: CombiningRule, mut ds: Vec<Distribution>) -> Result<Combined> {
    if ds.is_empty() {
        return Err(Error::Combine("empty multiset of distributions".into()));
    }
    let continuous = ds.iter().filter(|d| d.is_continuous()).count();
    if continuous != 0 && continuous != ds.len() {
        return Err(Error::Combine("mixture of discrete and continuous distributions".into()));
    }
    if ds.len() == 1 {
        return Ok(Combined::Single(ds.pop().unwrap()));
    }
    match rule {
        CombiningRule::Mean => Ok(Combined::Mixture(ds)),
        CombiningRule::NoisyOr => {
            let mut log_false = 0.0;
            for d in &ds {
                match d {
                    Distribution::Bernoulli(p) => log_false += (-p).ln_1p(),
                    other => return Err(Error::Combine(format!("noisy-or over non-bernoulli {other}"))),
                }
            }
            Ok(Combined::NoisyOr { log_false })
        }
    }
}

impl Combined {
    pub fn is_continuous(&self) -> bool {
        match self {
            Combined::Single(d) => d.is_continuous(),
            Combined::Mixture(ds) => ds[0].is_continuous(),
            Combined::NoisyOr { .. } => false,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Term {
        match self {
            Combined::Single(d) => d.draw(rng),
            Combined::Mixture(ds) => {
                let k = rng.gen_range(0..ds.len());
                ds[k].draw(rng)
            }
            Combined::NoisyOr { log_false } => truth(rng.gen::<f64>().ln() >= *log_false),
        }
    }

    pub fn log_likelihood(&self, v: &Term) -> Result<f64> {
        match self {
            Combined::Single(d) => d.log_likelihood(v),
            Combined::Mixture(ds) => {
                let mut logs = Vec::with_capacity(ds.len());
                for d in ds {
                    logs.push(d.log_likelihood(v)?);
                }
                Ok(crate::estimator::log_sum_exp(&logs) - (ds.len() as f64).ln())
            }
            Combined::NoisyOr { log_false } => match bool_value(v) {
                Some(true) => Ok((-log_false.exp_m1()).ln()),
                Some(false) => Ok(*log_false),
                None => Err(Error::TypeMismatch(format!("{v} probed against a noisy-or"))),
            },
        }
    }

    pub fn likelihood(&self, v: &Term) -> Result<f64> {
        self.log_likelihood(v).map(f64::exp)
    }

    pub fn support(&self) -> Result<Vec<(Term, f64)>> {
        match self {
            Combined::Single(d) => d.support(),
            Combined::NoisyOr { log_false } => Distribution::Bernoulli(-log_false.exp_m1()).support(),
            Combined::Mixture(ds) => {
                let w = 1.0 / ds.len() as f64;
                let mut all = Vec::new();
                for d in ds {
                    all.extend(d.support()?.into_iter().map(|(v, p)| (v, p * w)));
                }
                Ok(merge_support(all).into_iter().filter(|(_, p)| *p > 0.0).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn normal_pdf(x: f64, m: f64, var: f64) -> f64 {
        (-(x - m) * (x - m) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    #[test]
    fn val_is_point_mass() {
        let d = Distribution::Val(Term::Int(40));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(d.draw(&mut rng), Term::Int(40));
        }
        assert_eq!(d.likelihood(&Term::Int(41)).unwrap(), 0.0);
        assert_eq!(d.likelihood(&Term::Int(40)).unwrap(), 1.0);
    }

    #[test]
    fn bernoulli_one_always_true() {
        let d = Distribution::bernoulli(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert_eq!(d.draw(&mut rng), Term::atom("t"));
        }
        let d = Distribution::bernoulli(0.2).unwrap();
        assert!((d.likelihood(&Term::atom("true")).unwrap() - 0.2).abs() < 1e-15);
        assert!((d.likelihood(&Term::Int(0)).unwrap() - 0.8).abs() < 1e-15);
        assert!(d.likelihood(&Term::atom("a")).is_err());
    }

    #[test]
    fn gaussian_uses_variance() {
        let d = Distribution::gaussian(600.0, 20.5).unwrap();
        let got = d.likelihood(&Term::Real(601.2)).unwrap();
        assert!((got - normal_pdf(601.2, 600.0, 20.5)).abs() < 1e-15);
        assert!(d.likelihood(&Term::atom("a")).is_err());
        assert!(Distribution::gaussian(0.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_empirical_mean() {
        let d = Distribution::gaussian(600.0, 20.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let sum: f64 = (0..n).map(|_| d.draw(&mut rng).as_f64().unwrap()).sum();
        assert!((sum / n as f64 - 600.0).abs() < 0.05);
    }

    #[test]
    fn mixture_density_at_601_2() {
        let m = combine(
            CombiningRule::Mean,
            vec![Distribution::gaussian(700.0, 10.9).unwrap(), Distribution::gaussian(600.0, 20.5).unwrap()],
        )
        .unwrap();
        let analytic = 0.5 * (normal_pdf(601.2, 700.0, 10.9) + normal_pdf(601.2, 600.0, 20.5));
        let got = m.likelihood(&Term::Real(601.2)).unwrap();
        assert!((got - analytic).abs() < 1e-15);
        assert!((got - 0.0425).abs() < 5e-4);
    }

    #[test]
    fn noisy_or() {
        let c =
            combine(CombiningRule::NoisyOr, vec![Distribution::Bernoulli(0.5), Distribution::Bernoulli(0.5)]).unwrap();
        assert!((c.likelihood(&Term::atom("t")).unwrap() - 0.75).abs() < 1e-15);
        // Twenty strong causes: P(false) = 1e-20 must survive as a finite log weight.
        let c = combine(CombiningRule::NoisyOr, vec![Distribution::Bernoulli(0.9); 20]).unwrap();
        let lf = c.log_likelihood(&Term::atom("f")).unwrap();
        assert!((lf - 20.0 * 0.1f64.ln()).abs() < 1e-9);
        assert_eq!(c.log_likelihood(&Term::atom("t")).unwrap(), 0.0);
        assert!(combine(
            CombiningRule::NoisyOr,
            vec![Distribution::Bernoulli(0.5), Distribution::Val(Term::atom("t"))]
        )
        .is_err());
    }

    #[test]
    fn singleton_is_single() {
        let d = Distribution::gaussian(1.0, 2.0).unwrap();
        assert_eq!(combine(CombiningRule::Mean, vec![d.clone()]).unwrap(), Combined::Single(d.clone()));
        assert_eq!(combine(CombiningRule::NoisyOr, vec![d.clone()]).unwrap(), Combined::Single(d));
    }

    #[test]
    fn mixed_types_rejected() {
        let r =
            combine(CombiningRule::Mean, vec![Distribution::gaussian(1.0, 2.0).unwrap(), Distribution::Bernoulli(0.3)]);
        assert!(matches!(r, Err(Error::Combine(_))));
    }

    #[test]
    fn mean_over_unequal_supports() {
        let a = Distribution::discrete(vec![(0.3, Term::atom("a")), (0.7, Term::atom("d"))]).unwrap();
        let b = Distribution::Val(Term::atom("x"));
        let m = combine(CombiningRule::Mean, vec![a, b]).unwrap();
        let s = m.support().unwrap();
        let total: f64 = s.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((m.likelihood(&Term::atom("x")).unwrap() - 0.5).abs() < 1e-12);
        assert!((m.likelihood(&Term::atom("a")).unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn discrete_validation() {
        assert!(Distribution::discrete(vec![(0.3, Term::atom("a")), (0.6, Term::atom("b"))]).is_err());
        assert!(Distribution::bernoulli(1.5).is_err());
    }
}
