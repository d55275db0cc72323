//! Truncated ħ-series with polynomial coefficients and Laurent order ≥ −1.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{same_vars, MultiPoly, Vars};
use crate::scalar::GaussianRational;

/// Lowest ħ-exponent any value may carry.
pub const MIN_HBAR: i32 = -1;

/// `Σ_{k=-1}^{trunc} ħ^k p_k`. Equality compares coefficients only.
#[derive(Clone)]
pub struct HbarSeries {
    vars: Vars,
    coeffs: BTreeMap<i32, MultiPoly>,
    trunc: i32,
}

impl PartialEq for HbarSeries {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.coeffs == other.coeffs
    }
}

impl Eq for HbarSeries {}

impl HbarSeries {
    pub fn zero(vars: Vars, trunc: i32) -> Self {
        HbarSeries {
            vars,
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    pub fn from_poly(p: MultiPoly, trunc: i32) -> Self {
        let mut s = HbarSeries::zero(p.vars().clone(), trunc);
        if !p.is_zero() && trunc >= 0 {
            s.coeffs.insert(0, p);
        }
        s
    }

    /// `ħ^k p`; exponents above `trunc` vanish.
    pub fn term(k: i32, p: MultiPoly, trunc: i32) -> Result<Self> {
        if k < MIN_HBAR {
            return Err(Error::HbarUnderflow(k));
        }
        let mut s = HbarSeries::zero(p.vars().clone(), trunc);
        if k <= trunc && !p.is_zero() {
            s.coeffs.insert(k, p);
        }
        Ok(s)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, MultiPoly> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i32) -> MultiPoly {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.vars.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub(crate) fn add_poly(&mut self, k: i32, p: &MultiPoly) -> Result<()> {
        if k < MIN_HBAR {
            return Err(Error::HbarUnderflow(k));
        }
        if k > self.trunc || p.is_zero() {
            return Ok(());
        }
        let entry = self
            .coeffs
            .entry(k)
            .or_insert_with(|| MultiPoly::zero(self.vars.clone()));
        entry.add_assign_ref(p);
        if entry.is_zero() {
            self.coeffs.remove(&k);
        }
        Ok(())
    }

    fn check(&self, other: &HbarSeries) -> Result<()> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    pub fn try_add(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.check(other)?;
        let mut out = self.truncate(self.trunc.min(other.trunc));
        for (k, p) in other.coeffs.iter() {
            out.add_poly(*k, p)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> HbarSeries {
        HbarSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs.iter().map(|(k, p)| (*k, -p)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> HbarSeries {
        let mut out = HbarSeries::zero(self.vars.clone(), self.trunc);
        for (k, p) in self.coeffs.iter() {
            let q = p.scale(c);
            if !q.is_zero() {
                out.coeffs.insert(*k, q);
            }
        }
        out
    }

    pub fn scale_poly(&self, q: &MultiPoly) -> HbarSeries {
        let mut out = HbarSeries::zero(self.vars.clone(), self.trunc);
        for (k, p) in self.coeffs.iter() {
            let r = p * q;
            if !r.is_zero() {
                out.coeffs.insert(*k, r);
            }
        }
        out
    }

    /// Multiplies by `ħ^s`.
    pub fn shift(&self, s: i32) -> Result<HbarSeries> {
        let mut out = HbarSeries::zero(self.vars.clone(), self.trunc);
        for (k, p) in self.coeffs.iter() {
            out.add_poly(k + s, p)?;
        }
        Ok(out)
    }

    /// Cauchy product truncated at the smaller of the two truncation orders.
    pub fn try_mul(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = HbarSeries::zero(self.vars.clone(), trunc);
        for (ka, pa) in self.coeffs.iter() {
            for (kb, pb) in other.coeffs.iter() {
                let k = ka + kb;
                if k < MIN_HBAR {
                    return Err(Error::HbarUnderflow(k));
                }
                if k > trunc {
                    continue;
                }
                out.add_poly(k, &(pa * pb))?;
            }
        }
        Ok(out)
    }

    /// Drops every exponent above `n`. Idempotent.
    pub fn truncate(&self, n: i32) -> HbarSeries {
        assert!(n >= MIN_HBAR, "truncation order must be at least -1");
        HbarSeries {
            vars: self.vars.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| **k <= n)
                .map(|(k, p)| (*k, p.clone()))
                .collect(),
            trunc: n,
        }
    }

    /// Applies a linear map to every coefficient.
    pub fn map_coeffs<F: Fn(&MultiPoly) -> MultiPoly>(&self, f: F) -> HbarSeries {
        let mut out = HbarSeries::zero(self.vars.clone(), self.trunc);
        for (k, p) in self.coeffs.iter() {
            let q = f(p);
            if !q.is_zero() {
                out.coeffs.insert(*k, q);
            }
        }
        out
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::format_series(self))
    }
}

impl fmt::Debug for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
