//! Sparse multivariate polynomials over ℚ(i) with a graded-lex term order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// Ordered variable names shared between polynomials of the same ring.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub(crate) fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then the larger exponent in the first differing position wins.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(SmallVec::from_elem(0, len))
    }

    pub fn from_exps(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn unit(len: usize, idx: usize) -> Self {
        let mut m = Monomial::one(len);
        m.0[idx] = 1;
        m
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if b > a {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Product of factorials of the exponents.
    pub fn factorial(&self) -> num_bigint::BigInt {
        let mut f = num_bigint::BigInt::one();
        for &e in self.0.iter() {
            for j in 2..=e as u64 {
                f *= j;
            }
        }
        f
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

/// `(a!/(a-g)!)` falling factorial for one exponent.
pub(crate) fn falling(a: u16, g: u16) -> i64 {
    let mut r: i64 = 1;
    for j in 0..g {
        r *= (a - j) as i64;
    }
    r
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(vars: Vars) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, GaussianRational::one())
    }

    pub fn constant(vars: Vars, c: GaussianRational) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn var(vars: Vars, name: &str) -> Result<Self> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Self::var_index(vars, idx))
    }

    pub fn var_index(vars: Vars, idx: usize) -> Self {
        let n = vars.len();
        let mut p = MultiPoly::zero(vars);
        p.terms.insert(Monomial::unit(n, idx), GaussianRational::one());
        p
    }

    pub fn monomial(vars: Vars, m: Monomial, c: GaussianRational) -> Self {
        assert_eq!(m.len(), vars.len(), "multi-index length must match variable count");
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, GaussianRational)>>(vars: Vars, it: I) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, GaussianRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&Monomial::one(self.vars.len()))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.len(), self.vars.len());
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &MultiPoly) -> Result<()> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = MultiPoly::zero(self.vars.clone());
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in other.terms.iter() {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub(crate) fn add_assign_ref(&mut self, other: &MultiPoly) {
        debug_assert!(same_vars(&self.vars, &other.vars));
        for (m, c) in other.terms.iter() {
            self.add_term(m.clone(), c);
        }
    }

    /// `self += c * other`.
    pub(crate) fn add_scaled(&mut self, other: &MultiPoly, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        for (m, d) in other.terms.iter() {
            self.add_term(m.clone(), &(d * c));
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.vars.clone());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derive(&self, var: &str) -> Result<MultiPoly> {
        let idx = self
            .vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        Ok(self.derive_index(idx))
    }

    pub fn derive_index(&self, idx: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m, c) in self.terms.iter() {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[idx] -= 1;
            out.add_term(m2, &c.scale_int(e as i64));
        }
        out
    }

    /// Mixed partial derivative `∂^g`.
    pub fn derive_multi(&self, g: &Monomial) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m, c) in self.terms.iter() {
            if let Some(rest) = m.div(g) {
                let mut k: i64 = 1;
                for (a, b) in m.0.iter().zip(g.0.iter()) {
                    k *= falling(*a, *b);
                }
                out.add_term(rest, &c.scale_int(k));
            }
        }
        out
    }

    /// Applies the vector field `Σ_a field[a] ∂_a`.
    pub fn apply_field(&self, field: &[MultiPoly]) -> MultiPoly {
        debug_assert_eq!(field.len(), self.vars.len());
        let mut out = MultiPoly::zero(self.vars.clone());
        for (a, coeff) in field.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let d = self.derive_index(a);
            if d.is_zero() {
                continue;
            }
            out.add_assign_ref(&(coeff * &d));
        }
        out
    }

    /// Drops all terms of total degree above `cap`.
    pub fn truncate_degree(&self, cap: u32) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the same exponent vectors over a renamed variable list.
    pub fn rename(&self, new_vars: Vars) -> Result<MultiPoly> {
        if new_vars.len() != self.vars.len() {
            return Err(Error::VariableMismatch {
                left: self.vars.to_vec(),
                right: new_vars.to_vec(),
            });
        }
        Ok(MultiPoly {
            vars: new_vars,
            terms: self.terms.clone(),
        })
    }

    /// Maps into a ring whose variables contain all of ours.
    pub fn embed(&self, target: &Vars) -> Result<MultiPoly> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target
                    .iter()
                    .position(|t| t == v)
                    .ok_or_else(|| Error::UnknownVariable(v.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = MultiPoly::zero(target.clone());
        for (m, c) in self.terms.iter() {
            let mut e = Monomial::one(target.len());
            for (i, &j) in map.iter().enumerate() {
                e.0[j] = m.0[i];
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Substitutes each variable by a polynomial in another ring.
    pub fn substitute(&self, images: &[MultiPoly], target: &Vars) -> MultiPoly {
        let mut out = MultiPoly::zero(target.clone());
        for (m, c) in self.terms.iter() {
            let mut t = MultiPoly::constant(target.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e as u32);
                }
            }
            out.add_assign_ref(&t);
        }
        out
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("polynomial variable lists differ")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("polynomial variable lists differ")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("polynomial variable lists differ")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::format_poly(self))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
