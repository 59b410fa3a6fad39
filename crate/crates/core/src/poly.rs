//! Sparse multivariate polynomials with exact big-integer coefficients.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

type Exponents = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    vars: Vec<String>,
    terms: HashMap<Exponents, BigInt>,
}

impl SparsePolynomial {
    pub fn zero(vars: &[String]) -> Self {
        SparsePolynomial {
            vars: vars.to_vec(),
            terms: HashMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c.into());
        p
    }

    /// The polynomial consisting of a single variable.
    pub fn var(vars: &[String], name: &str) -> Result<Self> {
        let i = index_of(vars, name)?;
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, BigInt::one());
        Ok(p)
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Vec<u16>, BigInt)>) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).max()
    }

    pub fn coefficient(&self, exponents: &[u16]) -> BigInt {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(format!(
                "[{}] vs [{}]",
                self.vars.join(","),
                other.vars.join(",")
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        SparsePolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out: HashMap<Exponents, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 4 + 1);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.entry(e).or_default() += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(SparsePolynomial {
            vars: self.vars.clone(),
            terms: out,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::constant(&self.vars, 1);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same variables");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same variables");
            }
        }
        result
    }

    /// Replaces `var` by `value` (a polynomial in the same variables).
    pub fn substitute(&self, var: &str, value: &Self) -> Result<Self> {
        self.check(value)?;
        let i = index_of(&self.vars, var)?;
        let mut powers: Vec<Self> = vec![Self::constant(&self.vars, 1)];
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            while powers.len() <= k {
                let next = powers.last().expect("nonempty").mul(value)?;
                powers.push(next);
            }
            let mut rest = e.clone();
            rest[i] = 0;
            let mono = SparsePolynomial {
                vars: self.vars.clone(),
                terms: HashMap::from([(rest, c.clone())]),
            };
            for (e, c) in mono.mul(&powers[k])?.terms {
                out.add_term(e, c);
            }
        }
        Ok(out)
    }

    pub fn derivative(&self, var: &str) -> Result<Self> {
        let i = index_of(&self.vars, var)?;
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.add_term(d, c * BigInt::from(e[i]));
            }
        }
        Ok(out)
    }

    /// Drops the variables not in `keep`, which must not occur in any term.
    pub fn restrict(&self, keep: &[String]) -> Result<Self> {
        let map: Vec<Option<usize>> = self.vars.iter().map(|v| keep.iter().position(|k| k == v)).collect();
        let mut out = Self::zero(keep);
        for (e, c) in &self.terms {
            let mut r = vec![0u16; keep.len()];
            for (k, slot) in e.iter().zip(&map) {
                match slot {
                    Some(j) => r[*j] = *k,
                    None if *k > 0 => {
                        return Err(Error::VariableMismatch("dropped variable occurs in a term".into()))
                    }
                    None => {}
                }
            }
            out.add_term(r, c.clone());
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum())
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> Result<BigRational> {
        self.check_point(x.len())?;
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = BigRational::from_integer(c.clone());
            for (&k, v) in e.iter().zip(x) {
                if k > 0 {
                    m *= num_traits::pow(v.clone(), k as usize);
                }
            }
            s += m;
        }
        Ok(s)
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// Terms in graded-lex descending order.
    pub fn sorted_terms(&self) -> Vec<(&[u16], &BigInt)> {
        let mut t: Vec<_> = self.terms().collect();
        t.sort_by(|a, b| grlex(b.0, a.0));
        t
    }

    /// Parses the canonical text form against a given variable list.
    pub fn parse(vars: &[String], text: &str) -> Result<Self> {
        let text = text.trim();
        let mut p = Self::zero(vars);
        if text == "0" {
            return Ok(p);
        }
        for term in text.split(" + ") {
            let mut parts = term.trim().split('*');
            let c: BigInt = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad coefficient in {term:?}")))?;
            let mut e = vec![0u16; vars.len()];
            for f in parts {
                let (name, k) = match f.split_once('^') {
                    Some((n, k)) => (n, k.parse::<u16>().map_err(|_| Error::Parse(format!("bad exponent in {f:?}")))?),
                    None => (f, 1),
                };
                let i = index_of(vars, name).map_err(|_| Error::Parse(format!("unknown variable {name:?}")))?;
                e[i] += k;
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

/// Canonical text: `coeff*v1^2*v2 + …`, terms in graded-lex descending
/// order, `0` for the zero polynomial.
impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (k, name) in e.iter().zip(&self.vars) {
                match k {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

fn total(e: &[u16]) -> u32 {
    e.iter().map(|&k| k as u32).sum()
}

fn grlex(a: &[u16], b: &[u16]) -> Ordering {
    total(a).cmp(&total(b)).then_with(|| a.cmp(b))
}

fn index_of(vars: &[String], name: &str) -> Result<usize> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| Error::VariableMismatch(format!("no variable {name:?}")))
}

pub fn variable_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        variable_names(&["x", "y"])
    }

    #[test]
    fn arithmetic_examples() {
        let v = xy();
        let x = SparsePolynomial::var(&v, "x").unwrap();
        let y = SparsePolynomial::var(&v, "y").unwrap();
        let s = x.add(&y).unwrap();
        assert_eq!(s.pow(2).term_count(), 3);
        assert_eq!(SparsePolynomial::zero(&v).term_count(), 0);
        assert_eq!(SparsePolynomial::zero(&v).degree(), None);
        let xy = x.mul(&y).unwrap();
        let sub = xy.substitute("x", &y).unwrap();
        assert_eq!(sub.term_count(), 1);
        assert_eq!(sub.coefficient(&[0, 2]), BigInt::one());
        assert!(x.sub(&x).unwrap().is_zero());
        let other = SparsePolynomial::var(&variable_names(&["x", "z"]), "x").unwrap();
        assert!(matches!(x.add(&other), Err(Error::VariableMismatch(_))));
    }

    #[test]
    fn canonical_text_round_trip() {
        let v = xy();
        let x = SparsePolynomial::var(&v, "x").unwrap();
        let y = SparsePolynomial::var(&v, "y").unwrap();
        let p = x.sub(&y).unwrap().pow(3).add(&SparsePolynomial::constant(&v, 7)).unwrap();
        let s = p.to_string();
        assert_eq!(s, "1*x^3 + -3*x^2*y + 3*x*y^2 + -1*y^3 + 7");
        assert_eq!(SparsePolynomial::parse(&v, &s).unwrap(), p);
        assert_eq!(SparsePolynomial::zero(&v).to_string(), "0");
        assert!(SparsePolynomial::parse(&v, "1*w").is_err());
    }

    #[test]
    fn evaluation() {
        let v = xy();
        let p = SparsePolynomial::parse(&v, "2*x^2*y + -1*y + 3").unwrap();
        assert_eq!(p.eval(&[2.0, 3.0]).unwrap(), 24.0);
        let q = BigRational::new(1.into(), 2.into());
        let e = p.eval_exact(&[q.clone(), q]).unwrap();
        assert_eq!(e, BigRational::new(11.into(), 4.into()));
    }
}
