//! E-differential operators in the divided-power PBW basis
//! `e_α = Π_i e_i^{α_i}/α_i!`, E-jets as their duals truncated at order
//! `K`, the Grothendieck connection and the jet Poisson bracket.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebroid::AlgebroidChart;
use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly};
use crate::scalar::GaussianRational as Q;
use crate::text::format_poly;

/// A letter of an operator word: multiplication by a function, or a frame
/// generator `e_i` (0-based).
#[derive(Clone, Debug, PartialEq)]
pub enum Letter {
    F(MultiPoly),
    G(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Always rewrite the rightmost applicable pair.
    RightmostInnermost,
    /// Rewrite a uniformly chosen applicable pair, seeded.
    Random(u64),
}

fn factorial_q(m: &Monomial) -> Q {
    Q::from(BigRational::from_integer(m.factorial()))
}

fn inv_factorial_q(m: &Monomial) -> Q {
    Q::from(BigRational::new(BigInt::one(), m.factorial()))
}

pub fn multi_index_key(m: &Monomial) -> String {
    m.exps().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

/// `Σ f_α e_α` with `|α| ≤ order_cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct EDiffOp {
    chart: Arc<AlgebroidChart>,
    order_cap: usize,
    terms: BTreeMap<Monomial, MultiPoly>,
}

impl EDiffOp {
    pub fn zero(chart: &Arc<AlgebroidChart>, order_cap: usize) -> Self {
        EDiffOp {
            chart: chart.clone(),
            order_cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &Arc<AlgebroidChart>, order_cap: usize) -> Self {
        let mut d = Self::zero(chart, order_cap);
        d.add(Monomial::one(chart.rank()), &MultiPoly::one(chart.base_vars().clone()))
            .expect("order 0");
        d
    }

    /// `f · e_α`.
    pub fn basis(chart: &Arc<AlgebroidChart>, order_cap: usize, alpha: Monomial, f: MultiPoly) -> Result<Self> {
        let mut d = Self::zero(chart, order_cap);
        d.add(alpha, &f)?;
        Ok(d)
    }

    pub fn chart(&self) -> &Arc<AlgebroidChart> {
        &self.chart
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, MultiPoly> {
        &self.terms
    }

    pub fn coeff(&self, alpha: &Monomial) -> MultiPoly {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| self.chart.zero_poly())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest `|α|` present.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree() as usize).max()
    }

    fn add(&mut self, alpha: Monomial, f: &MultiPoly) -> Result<()> {
        let ord = alpha.degree() as usize;
        if ord > self.order_cap {
            return Err(Error::OrderOverflow {
                order: ord,
                cap: self.order_cap,
            });
        }
        if f.is_zero() {
            return Ok(());
        }
        let e = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| MultiPoly::zero(f.vars().clone()));
        e.add_assign_ref(f);
        if e.is_zero() {
            self.terms.remove(&alpha);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &EDiffOp) -> Result<EDiffOp> {
        let mut out = self.clone();
        for (a, f) in other.terms.iter() {
            out.add(a.clone(), f)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &EDiffOp) -> Result<EDiffOp> {
        let mut out = self.clone();
        for (a, f) in other.terms.iter() {
            out.add(a.clone(), &-f)?;
        }
        Ok(out)
    }

    /// The word `F(f_α/α!) G(1)^{α₁} G(2)^{α₂} …` for each term.
    pub fn words(&self) -> Vec<Vec<Letter>> {
        self.terms
            .iter()
            .map(|(a, f)| {
                let mut w = vec![Letter::F(f.scale(&inv_factorial_q(a)))];
                for (i, &e) in a.exps().iter().enumerate() {
                    w.extend(std::iter::repeat_n(Letter::G(i), e as usize));
                }
                w
            })
            .collect()
    }

    /// Composition `self ∘ other`, renormalized.
    pub fn compose(&self, other: &EDiffOp) -> Result<EDiffOp> {
        let cap = self.order_cap.max(other.order_cap);
        let mut out = EDiffOp::zero(&self.chart, cap);
        for a in self.words() {
            for b in other.words() {
                let mut w = a.clone();
                w.extend(b);
                let part = pbw_normalize(&self.chart, &w, cap, Strategy::RightmostInnermost)?;
                out = out.try_add(&part)?;
            }
        }
        Ok(out)
    }

    /// Top-order part, read as a commutative symbol.
    pub fn symbol(&self) -> BTreeMap<Monomial, MultiPoly> {
        let Some(top) = self.order() else {
            return BTreeMap::new();
        };
        self.terms
            .iter()
            .filter(|(a, _)| a.degree() as usize == top)
            .map(|(a, f)| (a.clone(), f.clone()))
            .collect()
    }

    pub fn to_json(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(a, f)| (multi_index_key(a), format_poly(f)))
            .collect()
    }
}

fn redexes(w: &[Letter]) -> Vec<usize> {
    (0..w.len().saturating_sub(1))
        .filter(|&p| match (&w[p], &w[p + 1]) {
            (Letter::G(_), Letter::F(_)) => true,
            (Letter::G(i), Letter::G(j)) => i > j,
            (Letter::F(_), Letter::F(_)) => true,
            _ => false,
        })
        .collect()
}

/// Rewrites a word to normal form with
/// `e_i f → f e_i + ρ_i(f)`, `e_i e_j → e_j e_i + Σ_k c^k_{ij} e_k` (`i > j`)
/// and `f g → fg`.
pub fn pbw_normalize(chart: &Arc<AlgebroidChart>, word: &[Letter], order_cap: usize, strategy: Strategy) -> Result<EDiffOp> {
    let gens = word.iter().filter(|l| matches!(l, Letter::G(_))).count();
    if gens > order_cap {
        return Err(Error::OrderOverflow { order: gens, cap: order_cap });
    }
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::RightmostInnermost => None,
    };
    let mut out = EDiffOp::zero(chart, order_cap);
    let mut stack: Vec<Vec<Letter>> = vec![word.to_vec()];
    while let Some(w) = stack.pop() {
        if w.iter().any(|l| matches!(l, Letter::F(f) if f.is_zero())) {
            continue;
        }
        let rs = redexes(&w);
        if rs.is_empty() {
            let mut f = MultiPoly::one(chart.base_vars().clone());
            let mut alpha = Monomial::one(chart.rank());
            for l in w.iter() {
                match l {
                    Letter::F(g) => f = &f * g,
                    Letter::G(i) => alpha.0[*i] += 1,
                }
            }
            let f = f.scale(&factorial_q(&alpha));
            out.add(alpha, &f)?;
            continue;
        }
        let p = match rng.as_mut() {
            None => *rs.last().unwrap(),
            Some(r) => rs[r.gen_range(0..rs.len())],
        };
        let (head, tail) = (&w[..p], &w[p + 2..]);
        let splice = |mid: Vec<Letter>| {
            let mut v = head.to_vec();
            v.extend(mid);
            v.extend_from_slice(tail);
            v
        };
        match (&w[p], &w[p + 1]) {
            (Letter::G(i), Letter::F(f)) => {
                stack.push(splice(vec![Letter::F(f.clone()), Letter::G(*i)]));
                stack.push(splice(vec![Letter::F(chart.rho(*i, f))]));
            }
            (Letter::G(i), Letter::G(j)) => {
                stack.push(splice(vec![Letter::G(*j), Letter::G(*i)]));
                for k in 0..chart.rank() {
                    let c = chart.structure(*i, *j, k);
                    if !c.is_zero() {
                        stack.push(splice(vec![Letter::F(c.clone()), Letter::G(k)]));
                    }
                }
            }
            (Letter::F(f), Letter::F(g)) => stack.push(splice(vec![Letter::F(f * g)])),
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// All multi-indices of length `r` and total degree `≤ k`.
pub fn multi_indices(r: usize, k: usize) -> Vec<Monomial> {
    crate::algebroid::monomials_up_to(r, k as u32)
}

/// An E-jet: the values `l(e_α)` for `|α| ≤ intact`. Layers above
/// `intact` (up to `order_cap`) were lost by an order-raising operation.
#[derive(Clone, Debug, PartialEq)]
pub struct EJet {
    chart: Arc<AlgebroidChart>,
    order_cap: usize,
    intact: usize,
    values: BTreeMap<Monomial, MultiPoly>,
}

#[derive(Serialize)]
pub struct EJetJson {
    pub order_cap: usize,
    pub intact: usize,
    pub values: BTreeMap<String, String>,
}

impl EJet {
    pub fn zero(chart: &Arc<AlgebroidChart>, order_cap: usize) -> Self {
        EJet {
            chart: chart.clone(),
            order_cap,
            intact: order_cap,
            values: BTreeMap::new(),
        }
    }

    /// Builds a jet from values on the PBW basis; entries above `intact` are ignored.
    pub fn from_values(
        chart: &Arc<AlgebroidChart>,
        order_cap: usize,
        intact: usize,
        values: BTreeMap<Monomial, MultiPoly>,
    ) -> Self {
        let intact = intact.min(order_cap);
        EJet {
            chart: chart.clone(),
            order_cap,
            intact,
            values: values
                .into_iter()
                .filter(|(a, f)| a.degree() as usize <= intact && !f.is_zero())
                .collect(),
        }
    }

    /// The dual basis element `l_α(e_β) = δ_{αβ}`.
    pub fn dual_basis(chart: &Arc<AlgebroidChart>, order_cap: usize, alpha: Monomial) -> Self {
        let mut v = BTreeMap::new();
        v.insert(alpha, MultiPoly::one(chart.base_vars().clone()));
        Self::from_values(chart, order_cap, order_cap, v)
    }

    pub fn chart(&self) -> &Arc<AlgebroidChart> {
        &self.chart
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    /// Highest fully computed layer.
    pub fn intact(&self) -> usize {
        self.intact
    }

    /// Number of top layers lost.
    pub fn lost_layers(&self) -> usize {
        self.order_cap - self.intact
    }

    pub fn values(&self) -> &BTreeMap<Monomial, MultiPoly> {
        &self.values
    }

    pub fn value(&self, alpha: &Monomial) -> MultiPoly {
        self.values
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| self.chart.zero_poly())
    }

    /// `l(D)` for an operator whose order is within the intact layers.
    pub fn eval(&self, d: &EDiffOp) -> Result<MultiPoly> {
        if let Some(o) = d.order() {
            if o > self.intact {
                return Err(Error::OrderOverflow { order: o, cap: self.intact });
            }
        }
        let mut acc = self.chart.zero_poly();
        for (a, f) in d.terms() {
            if let Some(v) = self.values.get(a) {
                acc = &acc + &(f * v);
            }
        }
        Ok(acc)
    }

    pub fn restrict(&self, intact: usize) -> EJet {
        EJet::from_values(&self.chart, self.order_cap, intact.min(self.intact), self.values.clone())
    }

    /// Equality on the layers both jets have intact.
    pub fn agrees_with(&self, other: &EJet) -> bool {
        let k = self.intact.min(other.intact);
        self.restrict(k).values == other.restrict(k).values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn try_add(&self, other: &EJet) -> Result<EJet> {
        self.check(other)?;
        let mut v = self.values.clone();
        for (a, f) in other.values.iter() {
            let e = v.entry(a.clone()).or_insert_with(|| self.chart.zero_poly());
            *e = &*e + f;
        }
        Ok(EJet::from_values(&self.chart, self.order_cap, self.intact.min(other.intact), v))
    }

    pub fn scale(&self, c: &Q) -> EJet {
        EJet::from_values(
            &self.chart,
            self.order_cap,
            self.intact,
            self.values.iter().map(|(a, f)| (a.clone(), f.scale(c))).collect(),
        )
    }

    pub fn try_sub(&self, other: &EJet) -> Result<EJet> {
        self.try_add(&other.scale(&-Q::one()))
    }

    fn check(&self, other: &EJet) -> Result<()> {
        if self.order_cap != other.order_cap || *self.chart != *other.chart {
            return Err(Error::Precondition("jets over different charts or orders".into()));
        }
        Ok(())
    }

    /// `(l₁l₂)(e_α) = Σ_{β+γ=α} l₁(e_β) l₂(e_γ)`, the dual of `Δ₀`.
    pub fn product(&self, other: &EJet) -> Result<EJet> {
        self.check(other)?;
        let intact = self.intact.min(other.intact);
        let mut v: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (b, f) in self.values.iter() {
            for (c, g) in other.values.iter() {
                let a = b.mul(c);
                if a.degree() as usize > intact {
                    continue;
                }
                let e = v.entry(a).or_insert_with(|| self.chart.zero_poly());
                *e = &*e + &(f * g);
            }
        }
        Ok(EJet::from_values(&self.chart, self.order_cap, intact, v))
    }

    pub fn to_json(&self) -> EJetJson {
        EJetJson {
            order_cap: self.order_cap,
            intact: self.intact,
            values: self
                .values
                .iter()
                .map(|(a, f)| (multi_index_key(a), format_poly(f)))
                .collect(),
        }
    }
}

/// `l(e_α) = ρ(e_α) f`, with `ρ(e_α) = (1/α!) ρ₁^{α₁} ρ₂^{α₂} …` applied
/// rightmost factor first.
pub fn jet_of_function(chart: &Arc<AlgebroidChart>, f: &MultiPoly, order_cap: usize) -> EJet {
    let r = chart.rank();
    let mut v = BTreeMap::new();
    for alpha in multi_indices(r, order_cap) {
        let mut g = f.clone();
        for i in (0..r).rev() {
            for _ in 0..alpha.exps()[i] {
                g = chart.rho(i, &g);
            }
        }
        v.insert(alpha.clone(), g.scale(&inv_factorial_q(&alpha)));
    }
    EJet::from_values(chart, order_cap, order_cap, v)
}

/// Normal forms of `e_i · e_α` (and `e_α · e_i`) used by the connection
/// and the bracket.
fn left_mul(chart: &Arc<AlgebroidChart>, i: usize, alpha: &Monomial, cap: usize) -> Result<EDiffOp> {
    let mut w = vec![Letter::G(i)];
    w.extend(EDiffOp::basis(chart, cap, alpha.clone(), MultiPoly::one(chart.base_vars().clone()))?.words()[0].clone());
    pbw_normalize(chart, &w, cap, Strategy::RightmostInnermost)
}

/// `∇_G(g e_i) l (D) = g (ρ_i l(D) − l(e_i D))`. The top intact layer is
/// lost because `e_i D` has one more order.
pub fn grothendieck(i: usize, g: &MultiPoly, l: &EJet) -> Result<EJet> {
    let chart = &l.chart;
    if l.intact == 0 {
        return Ok(EJet::from_values(chart, l.order_cap, 0, BTreeMap::new()).restrict_lost());
    }
    let intact = l.intact - 1;
    let alphas = multi_indices(chart.rank(), intact);
    let vals = crate::par::map(&alphas, |alpha| -> Result<(Monomial, MultiPoly)> {
        let prod = left_mul(chart, i, alpha, intact + 1)?;
        let v = &chart.rho(i, &l.value(alpha)) - &l.eval(&prod)?;
        Ok((alpha.clone(), g * &v))
    });
    let values = vals.into_iter().collect::<Result<BTreeMap<_, _>>>()?;
    Ok(EJet::from_values(chart, l.order_cap, intact, values))
}

impl EJet {
    fn restrict_lost(mut self) -> EJet {
        self.values.clear();
        self
    }
}

/// `{l₁,l₂}(e_α) = Σ_{ij} Σ_{β+γ=α} l₁(e_β e_i) l₂(e_γ ϖ^{ij} e_j)` with
/// `ϖ = Π = −ω⁻¹`.
pub fn jet_poisson(l1: &EJet, l2: &EJet) -> Result<EJet> {
    l1.check(l2)?;
    let chart = &l1.chart;
    let intact0 = l1.intact.min(l2.intact);
    if intact0 == 0 {
        return Ok(EJet::from_values(chart, l1.order_cap, 0, BTreeMap::new()).restrict_lost());
    }
    let intact = intact0 - 1;
    let pi = chart.poisson_tensor()?;
    let r = chart.rank();
    let alphas = multi_indices(r, intact);
    let right_mul = |gamma: &Monomial, f: &MultiPoly, j: usize| -> Result<EDiffOp> {
        let mut w = EDiffOp::basis(chart, intact + 1, gamma.clone(), MultiPoly::one(chart.base_vars().clone()))?.words()[0].clone();
        w.push(Letter::F(f.clone()));
        w.push(Letter::G(j));
        pbw_normalize(chart, &w, intact + 1, Strategy::RightmostInnermost)
    };
    let vals = crate::par::map(&alphas, |alpha| -> Result<(Monomial, MultiPoly)> {
        let mut acc = chart.zero_poly();
        for beta in multi_indices(r, alpha.degree() as usize) {
            let Some(gamma) = alpha.div(&beta) else { continue };
            for i in 0..r {
                let left = right_mul(&beta, &MultiPoly::one(chart.base_vars().clone()), i)?;
                let lv = l1.eval(&left)?;
                if lv.is_zero() {
                    continue;
                }
                for j in 0..r {
                    if pi[i][j].is_zero() {
                        continue;
                    }
                    let right = right_mul(&gamma, &pi[i][j], j)?;
                    acc = &acc + &(&lv * &l2.eval(&right)?);
                }
            }
        }
        Ok((alpha.clone(), acc))
    });
    let values = vals.into_iter().collect::<Result<BTreeMap<_, _>>>()?;
    Ok(EJet::from_values(chart, l1.order_cap, intact, values))
}

/// Brute-force `Δ₀(e_α)`: expands `Π (e_i⊗1 + 1⊗e_i)` over the ordered
/// word of `α`, divided by `α!`, and collects both tensor factors in the
/// divided-power basis.
pub fn coproduct_brute(alpha: &Monomial) -> BTreeMap<(Monomial, Monomial), Q> {
    let r = alpha.len();
    let mut letters = Vec::new();
    for (i, &e) in alpha.exps().iter().enumerate() {
        letters.extend(std::iter::repeat_n(i, e as usize));
    }
    let mut out: BTreeMap<(Monomial, Monomial), Q> = BTreeMap::new();
    let n = letters.len();
    for choice in 0u64..(1u64 << n) {
        let mut left = Monomial::one(r);
        let mut right = Monomial::one(r);
        for (pos, &i) in letters.iter().enumerate() {
            if choice & (1 << pos) != 0 {
                left.0[i] += 1;
            } else {
                right.0[i] += 1;
            }
        }
        // sorted words: e_{i₁}…e_{i_k} = β! e_β on each side
        let c = &(&factorial_q(&left) * &factorial_q(&right)) * &inv_factorial_q(alpha);
        let e = out.entry((left, right)).or_insert_with(Q::zero);
        *e += &c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}
