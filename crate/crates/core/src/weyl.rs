//! The formal Weyl algebra in `2n` fiber variables `ŷ¹..ŷ²ⁿ` with
//! coefficients polynomial in base coordinates, graded by `|ŷ| = 1`,
//! `|ħ| = 2` and truncated in total degree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::par;
use crate::poly::{falling, vars, Monomial, MultiPoly, Vars};
use crate::scalar::GaussianRational as Q;
use crate::series::{HbarSeries, MIN_HBAR};
use crate::text::{format_monomial, format_poly, parse_hbar_terms, HBAR};

/// Fiber data: the constant symplectic matrix `ω`, its inverse `π`, the
/// base ring of coefficients and the total-degree truncation.
#[derive(Clone, PartialEq)]
pub struct WeylContext {
    n: usize,
    fiber_vars: Vars,
    base_vars: Vars,
    omega: Matrix,
    pi: Matrix,
    pi_support: Vec<(usize, usize, Q)>,
    trunc_total: i32,
}

impl fmt::Debug for WeylContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylContext")
            .field("n", &self.n)
            .field("base_vars", &self.base_vars)
            .field("trunc_total", &self.trunc_total)
            .finish()
    }
}

impl WeylContext {
    pub fn new(omega: Matrix, base_vars: Vars, trunc_total: i32) -> Result<Arc<Self>> {
        let dim = omega.len();
        if dim == 0 || !dim.is_multiple_of(2) || !linalg::is_antisymmetric(&omega) {
            return Err(Error::Precondition("omega must be a non-empty antisymmetric matrix of even size".into()));
        }
        let pi = linalg::invert(&omega).ok_or(Error::NotInvertible)?;
        let mut pi_support = Vec::new();
        for (i, row) in pi.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    pi_support.push((i, j, v.clone()));
                }
            }
        }
        let names: Vec<String> = (1..=dim).map(|k| format!("yhat{k}")).collect();
        if base_vars.iter().any(|b| names.contains(b) || b == HBAR || b == "i") {
            return Err(Error::Precondition("base variable names clash with reserved names".into()));
        }
        Ok(Arc::new(WeylContext {
            n: dim / 2,
            fiber_vars: vars(&names),
            base_vars,
            omega,
            pi,
            pi_support,
            trunc_total,
        }))
    }

    /// Darboux pairs `(ŷ^{2i-1}, ŷ^{2i}) = (x̂_i, ξ̂_i)` with `[x̂_i, ξ̂_i] = iħ`.
    pub fn standard(n: usize, trunc_total: i32) -> Arc<Self> {
        Self::new(standard_omega(n), vars::<&str>(&[]), trunc_total).expect("standard form is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn fiber_vars(&self) -> &Vars {
        &self.fiber_vars
    }

    pub fn base_vars(&self) -> &Vars {
        &self.base_vars
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// Poisson matrix `π = ω⁻¹` used in the Moyal exponent.
    pub fn pi(&self) -> &Matrix {
        &self.pi
    }

    pub fn trunc_total(&self) -> i32 {
        self.trunc_total
    }

    pub fn with_trunc(&self, trunc_total: i32) -> Arc<Self> {
        let mut c = self.clone();
        c.trunc_total = trunc_total;
        Arc::new(c)
    }
}

/// `ω(ξ_i, x_i) = 1`, i.e. matrix entry `ω_{2i-1,2i} = -1`.
pub fn standard_omega(n: usize) -> Matrix {
    let mut m = vec![vec![Q::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        m[2 * i][2 * i + 1] = -Q::one();
        m[2 * i + 1][2 * i] = Q::one();
    }
    m
}

pub(crate) fn same_ctx(a: &Arc<WeylContext>, b: &Arc<WeylContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Fiber monomial together with its ħ-exponent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WKey {
    pub fiber: Monomial,
    pub hbar: i32,
}

impl WKey {
    pub fn degree(&self) -> i32 {
        self.fiber.degree() as i32 + 2 * self.hbar
    }
}

#[derive(Clone)]
pub struct WeylElement {
    ctx: Arc<WeylContext>,
    terms: BTreeMap<WKey, MultiPoly>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for WeylElement {}

/// One contraction pattern of the Moyal exponential between a fiber
/// monomial of the left factor and one of the right factor.
struct Contraction {
    left: Monomial,
    right: Monomial,
    order: i32,
    coeff: Q,
}

fn contractions(ctx: &WeylContext, alpha: &Monomial, beta: &Monomial, odd_only: bool) -> Vec<Contraction> {
    let dim = ctx.dim();
    let sup = &ctx.pi_support;
    let mut out = Vec::new();
    let mut r = vec![0u16; dim];
    let mut s = vec![0u16; dim];
    // weight accumulates Π π^c / c!
    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        sup: &[(usize, usize, Q)],
        alpha: &Monomial,
        beta: &Monomial,
        r: &mut Vec<u16>,
        s: &mut Vec<u16>,
        m: u32,
        weight: Q,
        odd_only: bool,
        out: &mut Vec<Contraction>,
    ) {
        if idx == sup.len() {
            if odd_only && m.is_multiple_of(2) {
                return;
            }
            let mut c = &weight * &Q::complex((0, 1), (1, 2)).pow(m);
            let mut k: i64 = 1;
            for (a, g) in alpha.exps().iter().zip(r.iter()) {
                k *= falling(*a, *g);
            }
            for (b, g) in beta.exps().iter().zip(s.iter()) {
                k *= falling(*b, *g);
            }
            c = c.scale_int(k);
            if odd_only {
                c = c.scale_int(2);
            }
            out.push(Contraction {
                left: alpha.div(&Monomial::from_exps(r)).unwrap(),
                right: beta.div(&Monomial::from_exps(s)).unwrap(),
                order: m as i32,
                coeff: c,
            });
            return;
        }
        let (i, j, ref p) = sup[idx];
        let cap = (alpha.exps()[i] - r[i]).min(beta.exps()[j] - s[j]);
        let mut w = weight;
        for c in 0..=cap {
            if c > 0 {
                w = &(&w * p) * &Q::ratio(1, c as i64);
                r[i] += 1;
                s[j] += 1;
            }
            rec(idx + 1, sup, alpha, beta, r, s, m + c as u32, w.clone(), odd_only, out);
        }
        r[i] -= cap;
        s[j] -= cap;
    }
    rec(0, sup, alpha, beta, &mut r, &mut s, 0, Q::one(), odd_only, &mut out);
    out
}

impl WeylElement {
    pub fn zero(ctx: &Arc<WeylContext>) -> Self {
        WeylElement {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<WeylContext>, c: Q) -> Self {
        Self::from_base(ctx, MultiPoly::constant(ctx.base_vars.clone(), c))
    }

    pub fn one(ctx: &Arc<WeylContext>) -> Self {
        Self::constant(ctx, Q::one())
    }

    /// A base function viewed as a ŷ-independent, ħ⁰ element.
    pub fn from_base(ctx: &Arc<WeylContext>, p: MultiPoly) -> Self {
        let mut w = Self::zero(ctx);
        w.add_term(
            WKey {
                fiber: Monomial::one(ctx.dim()),
                hbar: 0,
            },
            &p,
        )
        .expect("degree zero");
        w
    }

    /// The generator `ŷ^{j+1}` (0-based index).
    pub fn generator(ctx: &Arc<WeylContext>, j: usize) -> Self {
        let mut w = Self::zero(ctx);
        w.add_term(
            WKey {
                fiber: Monomial::unit(ctx.dim(), j),
                hbar: 0,
            },
            &MultiPoly::one(ctx.base_vars.clone()),
        )
        .expect("degree one");
        w
    }

    pub fn monomial(ctx: &Arc<WeylContext>, fiber: Monomial, hbar: i32, coeff: MultiPoly) -> Result<Self> {
        let mut w = Self::zero(ctx);
        w.add_term(WKey { fiber, hbar }, &coeff)?;
        Ok(w)
    }

    /// Lifts a series in the base variables to ŷ-degree zero.
    pub fn from_series(ctx: &Arc<WeylContext>, s: &HbarSeries) -> Result<Self> {
        let mut w = Self::zero(ctx);
        for (k, p) in s.coeffs().iter() {
            let p = p.embed(&ctx.base_vars)?;
            w.add_term(
                WKey {
                    fiber: Monomial::one(ctx.dim()),
                    hbar: *k,
                },
                &p,
            )?;
        }
        Ok(w)
    }

    /// Parses text over `yhat1..`, `hbar`, `i` and the base variables.
    pub fn parse(ctx: &Arc<WeylContext>, s: &str) -> Result<Self> {
        let all: Vec<String> = ctx.fiber_vars.iter().chain(ctx.base_vars.iter()).cloned().collect();
        let all = vars(&all);
        let dim = ctx.dim();
        let mut w = Self::zero(ctx);
        for (k, p) in parse_hbar_terms(s, &all)? {
            for (m, c) in p.terms() {
                let fiber = Monomial::from_exps(&m.exps()[..dim]);
                let base = Monomial::from_exps(&m.exps()[dim..]);
                let coeff = MultiPoly::monomial(ctx.base_vars.clone(), base, c.clone());
                w.add_term(WKey { fiber, hbar: k }, &coeff)?;
            }
        }
        Ok(w)
    }

    pub fn ctx(&self) -> &Arc<WeylContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<WKey, MultiPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · ħ^k ŷ^α`; terms above the truncation vanish.
    pub fn add_term(&mut self, key: WKey, coeff: &MultiPoly) -> Result<()> {
        if key.hbar < MIN_HBAR {
            return Err(Error::HbarUnderflow(key.hbar));
        }
        if coeff.is_zero() || key.degree() > self.ctx.trunc_total {
            return Ok(());
        }
        let base = self.ctx.base_vars.clone();
        let e = self.terms.entry(key.clone()).or_insert_with(|| MultiPoly::zero(base));
        e.add_assign_ref(coeff);
        if e.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    fn check(&self, other: &WeylElement) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &WeylElement) -> Result<WeylElement> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, p) in other.terms.iter() {
            out.add_term(k.clone(), p)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &WeylElement) -> Result<WeylElement> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> WeylElement {
        WeylElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, p)| (k.clone(), -p)).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> WeylElement {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Multiplies every coefficient by a base polynomial.
    pub fn mul_base(&self, q: &MultiPoly) -> WeylElement {
        self.map_coeffs(|p| p * q)
    }

    /// Applies a linear map to every base coefficient.
    pub fn map_coeffs<F: Fn(&MultiPoly) -> MultiPoly>(&self, f: F) -> WeylElement {
        let mut out = WeylElement::zero(&self.ctx);
        for (k, p) in self.terms.iter() {
            let q = f(p);
            if !q.is_zero() {
                out.terms.insert(k.clone(), q);
            }
        }
        out
    }

    /// Multiplies by `ħ^s`.
    pub fn shift_hbar(&self, s: i32) -> Result<WeylElement> {
        let mut out = WeylElement::zero(&self.ctx);
        for (k, p) in self.terms.iter() {
            out.add_term(
                WKey {
                    fiber: k.fiber.clone(),
                    hbar: k.hbar + s,
                },
                p,
            )?;
        }
        Ok(out)
    }

    /// Reinterprets the element in a context differing only in truncation.
    pub fn recontext(&self, ctx: &Arc<WeylContext>) -> Result<WeylElement> {
        if ctx.omega != self.ctx.omega || ctx.base_vars[..] != self.ctx.base_vars[..] {
            return Err(Error::ContextMismatch);
        }
        let mut out = WeylElement::zero(ctx);
        for (k, p) in self.terms.iter() {
            out.add_term(k.clone(), p)?;
        }
        Ok(out)
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.degree()).min()
    }

    /// Homogeneous components by total degree `|α| + 2k`.
    pub fn grading_split(&self) -> BTreeMap<i32, WeylElement> {
        let mut out: BTreeMap<i32, WeylElement> = BTreeMap::new();
        for (k, p) in self.terms.iter() {
            out.entry(k.degree())
                .or_insert_with(|| WeylElement::zero(&self.ctx))
                .terms
                .insert(k.clone(), p.clone());
        }
        out
    }

    pub fn component(&self, d: i32) -> WeylElement {
        self.filter(|k| k.degree() == d)
    }

    /// Drops all terms of total degree above `d`.
    pub fn truncate_degree(&self, d: i32) -> WeylElement {
        self.filter(|k| k.degree() <= d)
    }

    pub fn filter<F: Fn(&WKey) -> bool>(&self, keep: F) -> WeylElement {
        WeylElement {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
        }
    }

    /// `∂/∂ŷ^{j+1}`.
    pub fn derive_fiber(&self, j: usize) -> WeylElement {
        let mut out = WeylElement::zero(&self.ctx);
        for (k, p) in self.terms.iter() {
            let e = k.fiber.exps()[j];
            if e == 0 {
                continue;
            }
            let mut f = k.fiber.clone();
            f.0[j] -= 1;
            out.terms.insert(
                WKey { fiber: f, hbar: k.hbar },
                p.scale(&Q::from_int(e as i64)),
            );
        }
        out
    }

    /// Multiplies by the commuting symbol `ŷ^{j+1}` (not the Moyal product).
    pub fn mul_fiber_var(&self, j: usize) -> WeylElement {
        let mut out = WeylElement::zero(&self.ctx);
        for (k, p) in self.terms.iter() {
            let mut f = k.fiber.clone();
            f.0[j] += 1;
            out.add_term(WKey { fiber: f, hbar: k.hbar }, p).expect("no underflow");
        }
        out
    }

    /// The ŷ-independent part as an ħ-series over the base variables.
    pub fn at_zero_fiber(&self) -> HbarSeries {
        let mut s = HbarSeries::zero(self.ctx.base_vars.clone(), self.ctx.trunc_total.div_euclid(2));
        for (k, p) in self.terms.iter() {
            if k.fiber.degree() == 0 {
                s.add_poly(k.hbar, p).expect("exponent checked on insert");
            }
        }
        s
    }

    /// Whether no fiber variable occurs.
    pub fn is_fiber_constant(&self) -> bool {
        self.terms.keys().all(|k| k.fiber.degree() == 0)
    }

    /// The classical symbol: ħ⁰ and ŷ = 0.
    pub fn symbol(&self) -> MultiPoly {
        self.terms
            .get(&WKey {
                fiber: Monomial::one(self.ctx.dim()),
                hbar: 0,
            })
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.ctx.base_vars.clone()))
    }

    fn contract(&self, other: &WeylElement, odd_only: bool) -> Result<WeylElement> {
        self.check(other)?;
        let ctx = &self.ctx;
        let t = ctx.trunc_total;
        let group = |w: &WeylElement| {
            let mut g: BTreeMap<Monomial, Vec<(i32, MultiPoly)>> = BTreeMap::new();
            for (k, p) in w.terms.iter() {
                g.entry(k.fiber.clone()).or_default().push((k.hbar, p.clone()));
            }
            g.into_iter().collect::<Vec<_>>()
        };
        let left = group(self);
        let right = group(other);
        let partials: Vec<Result<BTreeMap<WKey, MultiPoly>>> = par::map(&left, |(alpha, la)| {
            let mut acc: BTreeMap<WKey, MultiPoly> = BTreeMap::new();
            let min_ka = la.iter().map(|x| x.0).min().unwrap();
            for (beta, lb) in right.iter() {
                let min_kb = lb.iter().map(|x| x.0).min().unwrap();
                let base_deg = (alpha.degree() + beta.degree()) as i32;
                if base_deg + 2 * (min_ka + min_kb) > t {
                    continue;
                }
                let cs = contractions(ctx, alpha, beta, odd_only);
                if cs.is_empty() {
                    continue;
                }
                for (ka, fa) in la.iter() {
                    for (kb, fb) in lb.iter() {
                        if base_deg + 2 * (ka + kb) > t {
                            continue;
                        }
                        let prod = fa * fb;
                        if prod.is_zero() {
                            continue;
                        }
                        for c in cs.iter() {
                            let h = ka + kb + c.order;
                            if h < MIN_HBAR {
                                return Err(Error::HbarUnderflow(h));
                            }
                            let key = WKey {
                                fiber: c.left.mul(&c.right),
                                hbar: h,
                            };
                            let e = acc
                                .entry(key)
                                .or_insert_with(|| MultiPoly::zero(ctx.base_vars.clone()));
                            e.add_scaled(&prod, &c.coeff);
                        }
                    }
                }
            }
            Ok(acc)
        });
        let mut out = WeylElement::zero(ctx);
        for part in partials {
            for (k, p) in part? {
                out.add_term(k, &p)?;
            }
        }
        Ok(out)
    }

    /// Moyal product `Σ_m (iħ/2)^m/m! π^{i₁j₁}…π^{i_mj_m} ∂_I a ∂_J b`.
    pub fn moyal_product(&self, other: &WeylElement) -> Result<WeylElement> {
        self.contract(other, false)
    }

    /// `a∗b − b∗a`, computed from the odd part of the Moyal expansion so that
    /// two ħ⁻¹ factors never meet.
    pub fn commutator(&self, other: &WeylElement) -> Result<WeylElement> {
        self.contract(other, true)
    }

    /// `true` iff `[a, ŷ^j] = 0` for all `j`; otherwise the first failing
    /// generator index (0-based).
    pub fn center_test(&self) -> (bool, Option<usize>) {
        for j in 0..self.ctx.dim() {
            let g = WeylElement::generator(&self.ctx, j);
            if !self.commutator(&g).expect("same context").is_zero() {
                return (false, Some(j));
            }
        }
        (true, None)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&WKey> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| b.fiber.cmp(&a.fiber))
                .then_with(|| a.hbar.cmp(&b.hbar))
        });
        let mut out = String::new();
        for (idx, k) in keys.into_iter().enumerate() {
            let p = &self.terms[k];
            let mut parts = Vec::new();
            let mono = format_monomial(&k.fiber, &self.ctx.fiber_vars);
            if !mono.is_empty() {
                parts.push(mono);
            }
            if k.hbar != 0 {
                parts.push(format!("{HBAR}^{}", k.hbar));
            }
            let neg_one = (-p).is_constant() && (-p).constant_term().is_one();
            let text = if p.is_constant() && p.constant_term().is_one() && !parts.is_empty() {
                parts.join("*")
            } else if neg_one && !parts.is_empty() {
                format!("-{}", parts.join("*"))
            } else {
                let body = format_poly(p);
                let parenthesized = p.is_constant() && body.starts_with('(');
                let wrapped = if p.len() == 1 && (parts.is_empty() || parenthesized) {
                    body
                } else {
                    format!("({body})")
                };
                parts.push(wrapped);
                parts.join("*")
            };
            if idx == 0 {
                out.push_str(&text);
            } else if let Some(rest) = text.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&text);
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(ctx: &Arc<WeylContext>, s: &str) -> WeylElement {
        WeylElement::parse(ctx, s).unwrap()
    }

    #[test]
    fn moyal_examples() {
        let c = WeylContext::standard(1, 8);
        assert_eq!(w(&c, "yhat1").moyal_product(&w(&c, "yhat2")).unwrap(), w(&c, "yhat1*yhat2 + 1/2 i*hbar"));
        assert_eq!(
            w(&c, "yhat1^2").moyal_product(&w(&c, "yhat2^2")).unwrap(),
            w(&c, "yhat1^2*yhat2^2 + 2 i*hbar*yhat1*yhat2 - 1/2*hbar^2")
        );
        let a = w(&c, "3*yhat1^3*yhat2 - i*hbar*yhat2 + 7");
        assert_eq!(WeylElement::one(&c).moyal_product(&a).unwrap(), a);
        assert_eq!(a.moyal_product(&WeylElement::one(&c)).unwrap(), a);
    }

    #[test]
    fn commutator_examples() {
        let c = WeylContext::standard(1, 8);
        let x = w(&c, "yhat1");
        assert_eq!(x.commutator(&w(&c, "yhat2")).unwrap(), w(&c, "i*hbar"));
        let a = w(&c, "yhat1^2*yhat2 + hbar");
        assert!(a.commutator(&a).unwrap().is_zero());
        assert!(x.commutator(&w(&c, "yhat1^2")).unwrap().is_zero());
    }

    #[test]
    fn grading_examples() {
        let c = WeylContext::standard(1, 6);
        let s = w(&c, "yhat1 + hbar").grading_split();
        assert_eq!(s.len(), 2);
        assert_eq!(s[&1], w(&c, "yhat1"));
        assert_eq!(s[&2], w(&c, "hbar"));
        let s = w(&c, "hbar^-1*5").grading_split();
        assert_eq!(s.keys().copied().collect::<Vec<_>>(), vec![-2]);
        assert!(WeylElement::zero(&c).grading_split().is_empty());
    }

    #[test]
    fn center_examples() {
        let c = WeylContext::standard(1, 8);
        assert_eq!(w(&c, "hbar^3 + 5").center_test(), (true, None));
        assert_eq!(w(&c, "yhat1").center_test(), (false, Some(1)));
        assert_eq!(WeylElement::zero(&c).center_test(), (true, None));
    }

    #[test]
    fn hbar_underflow_is_an_error() {
        let c = WeylContext::standard(1, 6);
        let a = w(&c, "hbar^-1*yhat1");
        assert!(matches!(a.moyal_product(&a), Err(Error::HbarUnderflow(-2))));
        assert!(a.commutator(&a).unwrap().is_zero());
    }

    #[test]
    fn display_roundtrip() {
        let c = WeylContext::new(standard_omega(1), vars(&["x", "xi"]), 8).unwrap();
        let a = w(&c, "yhat1^2*hbar*(3/2 + 1/2 i) - yhat2 + x*xi + hbar^-1*yhat1*(x - 1)");
        let text = a.to_string();
        assert_eq!(w(&c, &text), a, "{text}");
        assert_eq!(w(&c, "yhat1^2*hbar*(3/2 + 1/2 i)").to_string(), "yhat1^2*hbar^1*(3/2 + 1/2 i)");
    }

    #[test]
    fn context_mismatch() {
        let a = WeylElement::one(&WeylContext::standard(1, 4));
        let b = WeylElement::one(&WeylContext::standard(2, 4));
        assert_eq!(a.moyal_product(&b), Err(Error::ContextMismatch));
    }
}
