//! Flat sections of a Fedosov connection, the induced star product on base
//! functions, its bidifferential tables and the verification suite.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebroid::{monomials_up_to, AlgebroidChart};
use crate::error::{Error, Result};
use crate::fedosov::{characteristic_class, Connection, WeylFormSection};
use crate::jets::multi_index_key;
use crate::poly::{Monomial, MultiPoly, Vars};
use crate::scalar::GaussianRational as Q;
use crate::series::HbarSeries;
use crate::text::{format_poly, format_series};
use crate::weyl::WeylElement;

/// A `∇`-flat 0-form together with its symbol at `ŷ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSection {
    pub section: WeylElement,
    pub symbol: MultiPoly,
}

/// Lifts functions to flat sections of a fixed connection and multiplies
/// them. Products are exact through ħ-order `⌊(N+1)/2⌋`.
#[derive(Clone, Debug)]
pub struct Quantizer {
    conn: Connection,
    correction: Vec<WeylFormSection>,
}

impl Quantizer {
    /// Refuses connections whose curvature is not central.
    pub fn new(c: &Connection) -> Result<Self> {
        characteristic_class(c)?;
        Ok(Self::new_unchecked(c))
    }

    pub fn new_unchecked(c: &Connection) -> Self {
        let b = c.correction();
        let correction = (0..=c.order() as i32 + 1).map(|d| b.component(d)).collect();
        Quantizer {
            conn: c.clone(),
            correction,
        }
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn chart(&self) -> &Arc<AlgebroidChart> {
        self.conn.chart()
    }

    pub fn hbar_order(&self) -> i32 {
        (self.conn.order() as i32 + 1) / 2
    }

    fn base_vars(&self) -> &Vars {
        self.conn.chart().base_vars()
    }

    /// `s₀ = f`, `s_{d+1} = δ⁻¹(^Ed s_d + Σ_{a+b=d} [B_a, s_b])`.
    pub fn lift(&self, f: &MultiPoly) -> Result<FlatSection> {
        let f = f.embed(self.base_vars())?;
        let chart = self.conn.chart();
        let ctx = self.conn.ctx();
        let mut parts = vec![WeylElement::from_base(ctx, f.clone())];
        for d in 0..=self.conn.order() {
            let mut rhs = WeylFormSection::function(chart, ctx, parts[d].clone())?.d()?;
            for b in 0..=d {
                if parts[b].is_zero() || self.correction[d - b].is_zero() {
                    continue;
                }
                let s = WeylFormSection::function(chart, ctx, parts[b].clone())?;
                rhs = rhs.try_add(&self.correction[d - b].bracket(&s)?)?;
            }
            parts.push(rhs.delta_inv()?.get(0));
        }
        let mut section = WeylElement::zero(ctx);
        for p in parts {
            section = section.try_add(&p)?;
        }
        Ok(FlatSection { section, symbol: f })
    }

    /// `^Ed s + [𝒜, s]` through degree `N`.
    pub fn flatness_residual(&self, s: &FlatSection) -> Result<WeylFormSection> {
        let chart = self.conn.chart();
        let f = WeylFormSection::function(chart, self.conn.ctx(), s.section.clone())?;
        Ok(f
            .d()?
            .try_add(&self.conn.full_form().bracket(&f)?)?
            .truncate_degree(self.conn.order() as i32))
    }

    fn product(&self, a: &FlatSection, b: &FlatSection) -> Result<HbarSeries> {
        Ok(a.section
            .moyal_product(&b.section)?
            .at_zero_fiber()
            .truncate(self.hbar_order()))
    }

    pub fn star(&self, f: &MultiPoly, g: &MultiPoly) -> Result<HbarSeries> {
        self.product(&self.lift(f)?, &self.lift(g)?)
    }

    /// The ħ-bilinear extension to series with non-negative exponents.
    pub fn star_series(&self, f: &HbarSeries, g: &HbarSeries) -> Result<HbarSeries> {
        let k = self.hbar_order();
        let mut out = HbarSeries::zero(self.base_vars().clone(), k);
        let lf: Vec<(i32, FlatSection)> = f
            .coeffs()
            .iter()
            .filter(|(a, _)| **a <= k)
            .map(|(a, p)| Ok((*a, self.lift(p)?)))
            .collect::<Result<_>>()?;
        let lg: Vec<(i32, FlatSection)> = g
            .coeffs()
            .iter()
            .filter(|(a, _)| **a <= k)
            .map(|(a, p)| Ok((*a, self.lift(p)?)))
            .collect::<Result<_>>()?;
        for (a, sa) in lf.iter() {
            for (b, sb) in lg.iter() {
                if a + b > k {
                    continue;
                }
                out = out.try_add(&self.product(sa, sb)?.shift(a + b)?)?;
            }
        }
        Ok(out.truncate(k))
    }
}

pub fn flat_lift(f: &MultiPoly, c: &Connection) -> Result<FlatSection> {
    Quantizer::new(c)?.lift(f)
}

pub fn star(f: &MultiPoly, g: &MultiPoly, c: &Connection) -> Result<HbarSeries> {
    Quantizer::new(c)?.star(f, g)
}

/// `f ∗ g = Σ_k ħ^k Σ c^k_{αβ} ∂^α f ∂^β g` on base coordinates, recovered
/// by probing monomials up to a degree bound.
#[derive(Clone, Debug, PartialEq)]
pub struct StarTensor {
    vars: Vars,
    degree_bound: u32,
    tables: Vec<BTreeMap<(Monomial, Monomial), MultiPoly>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TensorRecord {
    pub left: String,
    pub right: String,
    pub coefficient: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StarTensorJson {
    pub vars: Vec<String>,
    pub degree_bound: u32,
    /// Indexed by ħ-order.
    pub orders: Vec<Vec<TensorRecord>>,
}

fn apply_pair(a: &Monomial, b: &Monomial, c: &MultiPoly, f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let df = f.derive_multi(a);
    if df.is_zero() {
        return MultiPoly::zero(f.vars().clone());
    }
    &(c * &df) * &g.derive_multi(b)
}

impl StarTensor {
    pub fn order(&self) -> i32 {
        self.tables.len() as i32 - 1
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn table(&self, k: usize) -> &BTreeMap<(Monomial, Monomial), MultiPoly> {
        &self.tables[k]
    }

    /// Evaluates the truncated tensor on two functions.
    pub fn apply(&self, f: &MultiPoly, g: &MultiPoly) -> Result<HbarSeries> {
        let f = f.embed(&self.vars)?;
        let g = g.embed(&self.vars)?;
        let mut out = HbarSeries::zero(self.vars.clone(), self.order());
        for (k, t) in self.tables.iter().enumerate() {
            let mut acc = MultiPoly::zero(self.vars.clone());
            for ((a, b), c) in t.iter() {
                acc = &acc + &apply_pair(a, b, c, &f, &g);
            }
            out = out.try_add(&HbarSeries::term(k as i32, acc, self.order())?)?;
        }
        Ok(out)
    }

    /// `c^k_{αβ} − c^k_{βα}` for the order-`k` table.
    pub fn antisymmetric_part(&self, k: usize) -> BTreeMap<(Monomial, Monomial), MultiPoly> {
        let t = &self.tables[k];
        let z = MultiPoly::zero(self.vars.clone());
        let mut keys: Vec<(Monomial, Monomial)> = t.keys().cloned().collect();
        keys.extend(t.keys().map(|(a, b)| (b.clone(), a.clone())));
        let mut out = BTreeMap::new();
        for (a, b) in keys {
            let v = &t.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(|| z.clone())
                - &t.get(&(b.clone(), a.clone())).cloned().unwrap_or_else(|| z.clone());
            if !v.is_zero() {
                out.insert((a, b), v);
            }
        }
        out
    }

    pub fn to_json(&self) -> StarTensorJson {
        StarTensorJson {
            vars: self.vars.to_vec(),
            degree_bound: self.degree_bound,
            orders: self
                .tables
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|((a, b), c)| TensorRecord {
                            left: multi_index_key(a),
                            right: multi_index_key(b),
                            coefficient: format_poly(c),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Probes `star(x^α, x^β)` for `|α|, |β| ≤ D` and solves the triangular
/// system `c_{αβ} α!β! = star(x^α,x^β) − Σ_{(γ,δ)<(α,β)} c_{γδ} ∂^γx^α ∂^δx^β`.
pub fn bidiff_tensor(q: &Quantizer, k: i32, degree_bound: u32) -> Result<StarTensor> {
    let vars = q.base_vars().clone();
    let k = k.min(q.hbar_order());
    let monos = monomials_up_to(vars.len(), degree_bound);
    let polys: Vec<MultiPoly> = monos
        .iter()
        .map(|m| MultiPoly::monomial(vars.clone(), m.clone(), Q::one()))
        .collect();
    let lifts = crate::par::map(&polys, |p| q.lift(p));
    let lifts: Vec<FlatSection> = lifts.into_iter().collect::<Result<_>>()?;
    let mut pairs: Vec<(usize, usize)> = (0..monos.len())
        .flat_map(|a| (0..monos.len()).map(move |b| (a, b)))
        .collect();
    pairs.sort_by_key(|&(a, b)| (monos[a].degree() + monos[b].degree(), a, b));
    let probes = crate::par::map(&pairs, |&(a, b)| q.product(&lifts[a], &lifts[b]));
    let mut tables: Vec<BTreeMap<(Monomial, Monomial), MultiPoly>> = vec![BTreeMap::new(); k as usize + 1];
    for (&(a, b), probe) in pairs.iter().zip(probes) {
        let probe = probe?;
        let (ma, mb) = (&monos[a], &monos[b]);
        let norm = Q::from(num_rational::BigRational::new(
            num_bigint::BigInt::one(),
            ma.factorial() * mb.factorial(),
        ));
        for (ord, t) in tables.iter_mut().enumerate() {
            let mut res = probe.coeff(ord as i32);
            for ((g, d), c) in t.iter() {
                if g.divides(ma) && d.divides(mb) {
                    res = &res - &apply_pair(g, d, c, &polys[a], &polys[b]);
                }
            }
            if !res.is_zero() {
                t.insert((ma.clone(), mb.clone()), res.scale(&norm));
            }
        }
    }
    Ok(StarTensor {
        vars,
        degree_bound,
        tables,
    })
}

/// Sample count, degree bound and seed for random verification.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SampleSpec {
    pub count: usize,
    pub degree: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityCheck {
    pub identity: String,
    pub sample: usize,
    pub pass: bool,
    /// Exact residual; passing means it is the zero series.
    pub residual: String,
    /// Lowest ħ-order at which the residual is nonzero.
    pub failing_order: Option<i32>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StarReport {
    pub hbar_order: i32,
    pub checks: Vec<IdentityCheck>,
}

impl StarReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn check(identity: &str, sample: usize, residual: HbarSeries) -> IdentityCheck {
    IdentityCheck {
        identity: identity.to_string(),
        sample,
        pass: residual.is_zero(),
        failing_order: residual.order(),
        residual: format_series(&residual),
    }
}

/// Associativity, unitality, Poisson compatibility and symbol reduction on
/// seeded random triples.
pub fn verify_star(q: &Quantizer, spec: &SampleSpec) -> Result<StarReport> {
    let chart = q.chart().clone();
    let vars = chart.base_vars().clone();
    let k = q.hbar_order();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let triples: Vec<[MultiPoly; 3]> = (0..spec.count)
        .map(|_| std::array::from_fn(|_| crate::sample::random_poly(&mut rng, &vars, spec.degree, 3)))
        .collect();
    let one = MultiPoly::one(vars.clone());
    let per_sample = crate::par::map_range(triples.len(), |i| -> Result<Vec<IdentityCheck>> {
        let [f, g, h] = &triples[i];
        let series = |p: &MultiPoly| HbarSeries::from_poly(p.clone(), k);
        let fg = q.star(f, g)?;
        let gf = q.star(g, f)?;
        let gh = q.star(g, h)?;
        let left = q.star_series(&fg, &series(h))?;
        let right = q.star_series(&series(f), &gh)?;
        let mut out = vec![check("associativity", i, left.try_sub(&right)?)];
        let unit = q.star(f, &one)?.try_sub(&series(f))?.try_add(&q.star(&one, f)?.try_sub(&series(f))?)?;
        out.push(check("unitality", i, unit));
        let comm = fg.try_sub(&gf)?;
        let mut poisson = HbarSeries::zero(vars.clone(), 1);
        if k >= 1 {
            let bracket = chart.poisson_bracket(f, g)?;
            let lhs = comm.coeff(1).scale(&-Q::i());
            poisson = HbarSeries::term(1, &lhs - &bracket, 1)?;
        }
        poisson = poisson.try_add(&HbarSeries::from_poly(comm.coeff(0), 1))?;
        out.push(check("poisson_compatibility", i, poisson));
        let sym = &fg.coeff(0) - &(f * g);
        out.push(check("symbol_reduction", i, HbarSeries::from_poly(sym, 0)));
        Ok(out)
    });
    let mut checks = Vec::new();
    for s in per_sample {
        checks.extend(s?);
    }
    Ok(StarReport { hbar_order: k, checks })
}

/// `f` written as a polynomial in the fiber generators of a standard Weyl
/// context (base variable `j` ↦ `ŷ^{j+1}`), multiplied there and mapped
/// back; the closed-form Moyal product.
pub fn closed_form_moyal(f: &MultiPoly, g: &MultiPoly, hbar_order: i32) -> Result<HbarSeries> {
    let vars = f.vars().clone();
    if !vars.len().is_multiple_of(2) || g.vars()[..] != vars[..] {
        return Err(Error::Precondition("closed-form Moyal needs Darboux pairs".into()));
    }
    let deg = f.degree().unwrap_or(0) + g.degree().unwrap_or(0);
    let ctx = crate::weyl::WeylContext::standard(vars.len() / 2, deg as i32);
    let to_w = |p: &MultiPoly| -> Result<WeylElement> {
        let mut w = WeylElement::zero(&ctx);
        for (m, c) in p.terms() {
            w = w.try_add(&WeylElement::monomial(
                &ctx,
                m.clone(),
                0,
                MultiPoly::constant(ctx.base_vars().clone(), c.clone()),
            )?)?;
        }
        Ok(w)
    };
    let prod = to_w(f)?.moyal_product(&to_w(g)?)?;
    let mut out = HbarSeries::zero(vars.clone(), hbar_order);
    for (k, p) in prod.terms() {
        let mono = MultiPoly::monomial(vars.clone(), k.fiber.clone(), p.constant_term());
        out = out.try_add(&HbarSeries::term(k.hbar, mono, hbar_order)?)?;
    }
    Ok(out)
}
