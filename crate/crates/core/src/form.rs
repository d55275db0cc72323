//! Antisymmetric forms on the frame `e₁..e_r` of an algebroid, with
//! coefficients in any ring that base functions act on.
//!
//! A `p`-form stores one coefficient per increasing index set `i₁<…<i_p`
//! (a bitmask), with `ω(e_{i₁},…,e_{i_p})` equal to that coefficient.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::GaussianRational as Q;
use crate::series::HbarSeries;
use crate::weyl::WeylElement;

pub trait Coeff: Clone + PartialEq + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Q) -> Self;
    /// Multiplication by a base function.
    fn mul_poly(&self, p: &MultiPoly) -> Self;
    /// A vector field on the base acting on the base-function coefficients.
    fn apply_field(&self, field: &[MultiPoly]) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Coeff for MultiPoly {
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Q) -> Self {
        MultiPoly::scale(self, c)
    }
    fn mul_poly(&self, p: &MultiPoly) -> Self {
        self * p
    }
    fn apply_field(&self, field: &[MultiPoly]) -> Self {
        MultiPoly::apply_field(self, field)
    }
}

impl Coeff for HbarSeries {
    fn is_zero(&self) -> bool {
        HbarSeries::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("series over different variables")
    }
    fn neg(&self) -> Self {
        HbarSeries::neg(self)
    }
    fn scale(&self, c: &Q) -> Self {
        HbarSeries::scale(self, c)
    }
    fn mul_poly(&self, p: &MultiPoly) -> Self {
        self.scale_poly(p)
    }
    fn apply_field(&self, field: &[MultiPoly]) -> Self {
        self.map_coeffs(|p| p.apply_field(field))
    }
}

impl Coeff for WeylElement {
    fn is_zero(&self) -> bool {
        WeylElement::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("weyl elements over different contexts")
    }
    fn neg(&self) -> Self {
        WeylElement::neg(self)
    }
    fn scale(&self, c: &Q) -> Self {
        WeylElement::scale(self, c)
    }
    fn mul_poly(&self, p: &MultiPoly) -> Self {
        self.mul_base(p)
    }
    fn apply_field(&self, field: &[MultiPoly]) -> Self {
        self.map_coeffs(|p| p.apply_field(field))
    }
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sorts an index list into a mask; the sign of the sorting permutation,
/// or `None` when an index repeats.
pub fn mask_of(indices: &[usize]) -> Option<(u32, i32)> {
    let mut mask = 0u32;
    let mut inversions = 0;
    for (a, &i) in indices.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        inversions += indices[..a].iter().filter(|&&j| j > i).count();
    }
    Some((mask, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// All `p`-subsets of `0..rank` as masks, in increasing numeric order of
/// their sorted index lists.
pub fn subsets(rank: usize, p: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(start: usize, rank: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..rank {
            rec(i + 1, rank, left - 1, acc | (1 << i), out);
        }
    }
    rec(0, rank, p, 0, &mut out);
    out
}

/// Sign of the shuffle placing the indices of `a` before those of `b`.
fn shuffle_sign(a: u32, b: u32) -> i32 {
    let mut inv = 0;
    for i in mask_indices(a) {
        inv += (b & ((1u32 << i) - 1)).count_ones();
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, PartialEq)]
pub struct Form<C: Coeff> {
    rank: usize,
    degree: usize,
    zero: C,
    coeffs: BTreeMap<u32, C>,
}

impl<C: Coeff> std::fmt::Debug for Form<C>
where
    C: std::fmt::Display,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Form(deg {}) {{", self.degree)?;
        for (m, c) in self.coeffs.iter() {
            write!(f, " {:?}: {};", mask_indices(*m), c)?;
        }
        write!(f, " }}")
    }
}

impl<C: Coeff> Form<C> {
    pub fn zero(rank: usize, degree: usize, zero: C) -> Result<Self> {
        if degree > rank {
            return Err(Error::DegreeOverflow { degree, rank });
        }
        Ok(Form {
            rank,
            degree,
            zero,
            coeffs: BTreeMap::new(),
        })
    }

    /// A 0-form.
    pub fn scalar(rank: usize, value: C, zero: C) -> Self {
        let mut f = Form::zero(rank, 0, zero).expect("degree 0");
        f.set(0, value);
        f
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, C> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, mask: u32) -> C {
        self.coeffs.get(&mask).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// `ω(e_{i₁},…,e_{i_p})` for an arbitrary index list.
    pub fn eval(&self, indices: &[usize]) -> C {
        match mask_of(indices) {
            None => self.zero.clone(),
            Some((m, 1)) => self.get(m),
            Some((m, _)) => self.get(m).neg(),
        }
    }

    pub fn set(&mut self, mask: u32, c: C) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        if c.is_zero() {
            self.coeffs.remove(&mask);
        } else {
            self.coeffs.insert(mask, c);
        }
    }

    pub fn add_at(&mut self, mask: u32, c: &C) {
        if c.is_zero() {
            return;
        }
        let v = match self.coeffs.get(&mask) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        self.set(mask, v);
    }

    /// Sets the coefficient on the sorted version of `indices`, with sign.
    pub fn set_indices(&mut self, indices: &[usize], c: C) -> Result<()> {
        let (m, s) = mask_of(indices).ok_or_else(|| Error::Precondition("repeated form index".into()))?;
        self.set(m, if s == 1 { c } else { c.neg() });
        Ok(())
    }

    fn check(&self, other: &Form<C>) -> Result<()> {
        if self.rank != other.rank || self.degree != other.degree {
            return Err(Error::Precondition("forms of different rank or degree".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Form<C>) -> Result<Form<C>> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.coeffs.iter() {
            out.add_at(*m, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Form<C>) -> Result<Form<C>> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Form<C> {
        self.map_same(|c| c.neg())
    }

    pub fn scale(&self, q: &Q) -> Form<C> {
        self.map_same(|c| c.scale(q))
    }

    pub fn map_same<F: Fn(&C) -> C>(&self, f: F) -> Form<C> {
        let mut out = Form {
            rank: self.rank,
            degree: self.degree,
            zero: self.zero.clone(),
            coeffs: BTreeMap::new(),
        };
        for (m, c) in self.coeffs.iter() {
            out.set(*m, f(c));
        }
        out
    }

    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, zero: D, f: F) -> Form<D> {
        let mut out = Form {
            rank: self.rank,
            degree: self.degree,
            zero,
            coeffs: BTreeMap::new(),
        };
        for (m, c) in self.coeffs.iter() {
            out.set(*m, f(c));
        }
        out
    }

    pub fn try_map<D: Coeff, F: Fn(&C) -> Result<D>>(&self, zero: D, f: F) -> Result<Form<D>> {
        let mut out = Form {
            rank: self.rank,
            degree: self.degree,
            zero,
            coeffs: BTreeMap::new(),
        };
        for (m, c) in self.coeffs.iter() {
            out.set(*m, f(c)?);
        }
        Ok(out)
    }

    /// `Σ (e^I ∧ e^J) ⊗ f(a_I, b_J)`; with `f` the product this is the wedge
    /// product, with `f` the commutator the graded bracket of Lie-algebra
    /// valued forms.
    pub fn wedge_with<D: Coeff, E: Coeff, F>(&self, other: &Form<D>, zero: E, f: F) -> Result<Form<E>>
    where
        F: Fn(&C, &D) -> Result<E>,
    {
        let mut out = Form::zero(self.rank, self.degree + other.degree, zero)?;
        for (ma, a) in self.coeffs.iter() {
            for (mb, b) in other.coeffs.iter() {
                if ma & mb != 0 {
                    continue;
                }
                let v = f(a, b)?;
                if v.is_zero() {
                    continue;
                }
                let v = if shuffle_sign(*ma, *mb) == 1 { v } else { v.neg() };
                out.add_at(ma | mb, &v);
            }
        }
        Ok(out)
    }
}

impl Form<MultiPoly> {
    /// Scalar wedge product.
    pub fn wedge(&self, other: &Form<MultiPoly>) -> Result<Form<MultiPoly>> {
        let zero = MultiPoly::zero(self.zero.vars().clone());
        self.wedge_with(other, zero, |a, b| Ok(a * b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::text::parse_poly;

    #[test]
    fn masks_and_signs() {
        assert_eq!(mask_of(&[1, 0]), Some((0b11, -1)));
        assert_eq!(mask_of(&[0, 2, 1]), Some((0b111, -1)));
        assert_eq!(mask_of(&[2, 0, 1]), Some((0b111, 1)));
        assert_eq!(mask_of(&[1, 1]), None);
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(shuffle_sign(0b10, 0b01), -1);
    }

    #[test]
    fn one_form_wedge_is_antisymmetric() {
        let v = vars(&["x"]);
        let z = MultiPoly::zero(v.clone());
        let mut a = Form::zero(2, 1, z.clone()).unwrap();
        a.set(0b01, parse_poly("x", &v).unwrap());
        let mut b = Form::zero(2, 1, z).unwrap();
        b.set(0b10, parse_poly("2", &v).unwrap());
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab, ba.neg());
        assert_eq!(ab.eval(&[0, 1]), parse_poly("2*x", &v).unwrap());
        assert_eq!(ab.eval(&[1, 0]), parse_poly("-2*x", &v).unwrap());
    }

    #[test]
    fn degree_overflow() {
        let z = MultiPoly::zero(vars(&["x"]));
        assert!(matches!(Form::zero(2, 3, z), Err(Error::DegreeOverflow { .. })));
    }
}
