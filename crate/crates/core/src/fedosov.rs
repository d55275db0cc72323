//! Weyl-valued E-forms, the Koszul homotopy `δ⁻¹`, Fedosov's recursion with
//! prescribed central curvature, characteristic classes, gauge equivalence
//! and the Gelfand-Fuks map.
//!
//! Conventions. The fiber context is the chart's constant frame form `ω`,
//! `A₋₁(e_i) = ħ⁻¹ ω_ij ŷ^j`, so `[A₋₁(e_i), s] = i ∂_{ŷ^i} s` and
//! `δ = −ad A₋₁ = −i κ` with `κ = Σ e^i ∧ ∂_{ŷ^i}`. A connection is
//! `∇ = ^Ed + Γ̃ + A` where `Γ̃` is the quadratic lift of the linear
//! connection `Γ` and `A = A₋₁ + r` with `δ⁻¹ r = 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebroid::AlgebroidChart;
use crate::error::{Error, Result};
use crate::form::{mask_indices, mask_of, subsets, Form};
use crate::poly::{Monomial, MultiPoly};
use crate::scalar::GaussianRational as Q;
use crate::series::HbarSeries;
use crate::text::{format_poly, format_series, parse_poly, parse_series};
use crate::weyl::{WKey, WeylContext, WeylElement};

/// Number of indices of `mask` below `i`.
fn below(mask: u32, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

fn sign(k: u32) -> Q {
    if k.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

pub fn mask_key(mask: u32) -> String {
    mask_indices(mask)
        .iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_mask_key(s: &str, rank: usize) -> Result<(u32, i32)> {
    let bad = || Error::Json(format!("bad form index `{s}`"));
    if s.is_empty() {
        return Ok((0, 1));
    }
    let ix = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().ok().filter(|&i| i >= 1 && i <= rank).map(|i| i - 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(bad)?;
    mask_of(&ix).ok_or_else(bad)
}

/// An E-form with values in the Weyl algebra.
#[derive(Clone, PartialEq, Debug)]
pub struct WeylFormSection {
    chart: Arc<AlgebroidChart>,
    ctx: Arc<WeylContext>,
    form: Form<WeylElement>,
}

impl WeylFormSection {
    pub fn zero(chart: &Arc<AlgebroidChart>, ctx: &Arc<WeylContext>, degree: usize) -> Result<Self> {
        if ctx.dim() != chart.rank() || ctx.base_vars()[..] != chart.base_vars()[..] {
            return Err(Error::ContextMismatch);
        }
        Ok(WeylFormSection {
            chart: chart.clone(),
            ctx: ctx.clone(),
            form: Form::zero(chart.rank(), degree, WeylElement::zero(ctx))?,
        })
    }

    pub fn from_form(chart: &Arc<AlgebroidChart>, ctx: &Arc<WeylContext>, form: Form<WeylElement>) -> Result<Self> {
        let mut s = Self::zero(chart, ctx, form.degree())?;
        for (m, w) in form.coeffs() {
            if !crate::weyl::same_ctx(w.ctx(), ctx) {
                return Err(Error::ContextMismatch);
            }
            s.form.set(*m, w.clone());
        }
        Ok(s)
    }

    /// A 0-form.
    pub fn function(chart: &Arc<AlgebroidChart>, ctx: &Arc<WeylContext>, w: WeylElement) -> Result<Self> {
        let mut s = Self::zero(chart, ctx, 0)?;
        s.form.set(0, w);
        Ok(s)
    }

    /// A scalar (ŷ-free) form built from an ħ-series valued form.
    pub fn from_scalar(chart: &Arc<AlgebroidChart>, ctx: &Arc<WeylContext>, f: &Form<HbarSeries>) -> Result<Self> {
        let z = WeylElement::zero(ctx);
        let form = f.try_map(z, |s| WeylElement::from_series(ctx, s))?;
        Self::from_form(chart, ctx, form)
    }

    pub fn chart(&self) -> &Arc<AlgebroidChart> {
        &self.chart
    }

    pub fn ctx(&self) -> &Arc<WeylContext> {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn form(&self) -> &Form<WeylElement> {
        &self.form
    }

    pub fn get(&self, mask: u32) -> WeylElement {
        self.form.get(mask)
    }

    /// Value on `e_{i₁},…,e_{i_p}`.
    pub fn eval(&self, indices: &[usize]) -> WeylElement {
        self.form.eval(indices)
    }

    pub fn set(&mut self, mask: u32, w: WeylElement) {
        self.form.set(mask, w);
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    fn wrap(&self, form: Form<WeylElement>) -> Self {
        WeylFormSection {
            chart: self.chart.clone(),
            ctx: self.ctx.clone(),
            form,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(self.wrap(self.form.try_add(&other.form)?))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(self.wrap(self.form.try_sub(&other.form)?))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.form.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.wrap(self.form.scale(c))
    }

    pub fn map<F: Fn(&WeylElement) -> WeylElement>(&self, f: F) -> Self {
        self.wrap(self.form.map_same(f))
    }

    pub fn try_map<F: Fn(&WeylElement) -> Result<WeylElement>>(&self, f: F) -> Result<Self> {
        Ok(self.wrap(self.form.try_map(WeylElement::zero(&self.ctx), f)?))
    }

    /// Graded commutator `Σ e^I∧e^J ⊗ [a_I, b_J]`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let z = WeylElement::zero(&self.ctx);
        Ok(self.wrap(self.form.wedge_with(&other.form, z, |a, b| a.commutator(b))?))
    }

    /// `[g, ·]` for a 0-form `g`, coefficientwise.
    pub fn ad(&self, g: &WeylElement) -> Result<Self> {
        self.try_map(|w| g.commutator(w))
    }

    /// The E-de Rham differential acting on base coefficients.
    pub fn d(&self) -> Result<Self> {
        Ok(self.wrap(self.chart.d(&self.form)?))
    }

    /// `κ = Σ e^i ∧ ∂/∂ŷ^i`.
    pub fn koszul(&self) -> Result<Self> {
        let rank = self.chart.rank();
        let mut out = Form::zero(rank, self.degree() + 1, WeylElement::zero(&self.ctx))?;
        for (mask, w) in self.form.coeffs() {
            for i in 0..rank {
                if mask & (1 << i) != 0 {
                    continue;
                }
                let dw = w.derive_fiber(i);
                if dw.is_zero() {
                    continue;
                }
                out.add_at(mask | (1 << i), &dw.scale(&sign(below(*mask, i))));
            }
        }
        Ok(self.wrap(out))
    }

    /// `δ = −iκ`.
    pub fn delta(&self) -> Result<Self> {
        Ok(self.koszul()?.scale(&-Q::i()))
    }

    /// `δ⁻¹ = (i/(p+q)) Σ ŷ^i ι_{e_i}` on terms of fiber degree `p` and form
    /// degree `q`; zero on 0-forms. Terms pushed past the truncation vanish.
    pub fn delta_inv(&self) -> Result<Self> {
        let q = self.degree();
        if q == 0 {
            return Ok(self.clone().map(|_| WeylElement::zero(&self.ctx)));
        }
        let mut out = Form::zero(self.chart.rank(), q - 1, WeylElement::zero(&self.ctx))?;
        for (mask, w) in self.form.coeffs() {
            for i in mask_indices(*mask) {
                let target = mask & !(1 << i);
                let s = sign(below(*mask, i));
                let mut acc = WeylElement::zero(&self.ctx);
                for (k, p) in w.terms() {
                    let weight = (k.fiber.degree() as i64) + q as i64;
                    let c = &(&s * &Q::i()) * &Q::ratio(1, weight);
                    let mut fiber = k.fiber.clone();
                    fiber.0[i] += 1;
                    acc.add_term(WKey { fiber, hbar: k.hbar }, &p.scale(&c))?;
                }
                out.add_at(target, &acc);
            }
        }
        Ok(self.wrap(out))
    }

    /// Projection onto ŷ-free 0-forms.
    pub fn harmonic(&self) -> Self {
        if self.degree() > 0 {
            return self.map(|_| WeylElement::zero(&self.ctx));
        }
        self.map(|w| w.filter(|k| k.fiber.degree() == 0))
    }

    /// `s − δδ⁻¹s − δ⁻¹δs − H(s)`, zero whenever the homotopy identity holds.
    pub fn homotopy_residual(&self) -> Result<Self> {
        let mut r = self.try_sub(&self.harmonic())?;
        if self.degree() > 0 {
            r = r.try_sub(&self.delta_inv()?.delta()?)?;
        }
        if self.degree() < self.chart.rank() {
            r = r.try_sub(&self.delta()?.delta_inv()?)?;
        }
        Ok(r)
    }

    /// Homogeneous part of Fedosov degree `d`.
    pub fn component(&self, d: i32) -> Self {
        self.map(|w| w.component(d))
    }

    pub fn truncate_degree(&self, d: i32) -> Self {
        self.map(|w| w.truncate_degree(d))
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.form.coeffs().values().filter_map(|w| w.min_degree()).min()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.form.coeffs().values().filter_map(|w| w.max_degree()).max()
    }

    /// The ŷ-free part as a form with ħ-series coefficients.
    pub fn central_part(&self) -> Form<HbarSeries> {
        let z = HbarSeries::zero(self.ctx.base_vars().clone(), self.ctx.trunc_total().div_euclid(2));
        self.form.map(z, |w| w.at_zero_fiber())
    }

    pub fn non_central(&self) -> Self {
        self.map(|w| w.filter(|k| k.fiber.degree() > 0))
    }

    /// Keys are 1-based frame indices, `"1,2"`.
    pub fn to_json(&self) -> BTreeMap<String, String> {
        self.form
            .coeffs()
            .iter()
            .map(|(m, w)| (mask_key(*m), w.to_string()))
            .collect()
    }

    pub fn from_json(
        chart: &Arc<AlgebroidChart>,
        ctx: &Arc<WeylContext>,
        degree: usize,
        j: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut s = Self::zero(chart, ctx, degree)?;
        for (k, v) in j {
            let (m, sg) = parse_mask_key(k, chart.rank())?;
            if m.count_ones() as usize != degree {
                return Err(Error::Json(format!("form index `{k}` has the wrong degree")));
            }
            let w = WeylElement::parse(ctx, v)?;
            s.form.add_at(m, &if sg == 1 { w } else { w.neg() });
        }
        Ok(s)
    }
}

/// `Γ[i]` is the matrix `M_i` of the linear connection along `e_i`; it must
/// lie in `sp(ω)`, i.e. `ωM_i` is symmetric.
pub type Gamma = Vec<Vec<Vec<MultiPoly>>>;

pub fn zero_gamma(chart: &AlgebroidChart) -> Gamma {
    let r = chart.rank();
    vec![vec![vec![chart.zero_poly(); r]; r]; r]
}

fn omega_times(chart: &AlgebroidChart, m: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let r = chart.rank();
    let w = chart.omega_at_origin();
    (0..r)
        .map(|a| {
            (0..r)
                .map(|b| {
                    let mut acc = chart.zero_poly();
                    for c in 0..r {
                        if !w[a][c].is_zero() {
                            acc = &acc + &m[c][b].scale(&w[a][c]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn check_gamma(chart: &AlgebroidChart, gamma: &Gamma) -> Result<()> {
    let r = chart.rank();
    if gamma.len() != r || gamma.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
        return Err(Error::Precondition(format!("gamma must be {r} matrices of size {r}x{r}")));
    }
    for (i, m) in gamma.iter().enumerate() {
        let s = omega_times(chart, m);
        for a in 0..r {
            for b in a + 1..r {
                if s[a][b] != s[b][a] {
                    return Err(Error::Precondition(format!(
                        "gamma along e{} is not in sp(omega) at entry ({},{})",
                        i + 1,
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `Γ̃(e_i) = ħ⁻¹ (i/2) Σ (ωM_i)_{ab} ŷ^a ŷ^b`.
pub fn gamma_tilde(chart: &Arc<AlgebroidChart>, ctx: &Arc<WeylContext>, gamma: &Gamma) -> Result<WeylFormSection> {
    check_gamma(chart, gamma)?;
    let r = chart.rank();
    let half_i = Q::complex((0, 1), (1, 2));
    let mut out = WeylFormSection::zero(chart, ctx, 1)?;
    for (i, m) in gamma.iter().enumerate() {
        let s = omega_times(chart, m);
        let mut w = WeylElement::zero(ctx);
        for a in 0..r {
            for b in 0..r {
                if s[a][b].is_zero() {
                    continue;
                }
                let fiber = Monomial::unit(r, a).mul(&Monomial::unit(r, b));
                w.add_term(WKey { fiber, hbar: -1 }, &s[a][b].scale(&half_i))?;
            }
        }
        out.set(1 << i, w);
    }
    Ok(out)
}

/// The fiber context for a chart in a Darboux frame, truncated at total
/// degree `order + 1` so that curvature is exact through degree `order`.
pub fn fiber_context(chart: &AlgebroidChart, order: usize) -> Result<Arc<WeylContext>> {
    if !chart.is_darboux() {
        return Err(Error::NotDarboux);
    }
    WeylContext::new(chart.omega_at_origin(), chart.base_vars().clone(), order as i32 + 1)
}

/// `A₋₁(e_i) = ħ⁻¹ ω_ij ŷ^j`.
pub fn build_a_minus_one(chart: &Arc<AlgebroidChart>, ctx: &Arc<WeylContext>) -> Result<WeylFormSection> {
    if !chart.is_darboux() {
        return Err(Error::NotDarboux);
    }
    let r = chart.rank();
    let w = chart.omega_at_origin();
    if ctx.omega() != &w {
        return Err(Error::ContextMismatch);
    }
    let mut out = WeylFormSection::zero(chart, ctx, 1)?;
    let one = MultiPoly::one(chart.base_vars().clone());
    for i in 0..r {
        let mut e = WeylElement::zero(ctx);
        for j in 0..r {
            if !w[i][j].is_zero() {
                e.add_term(
                    WKey {
                        fiber: Monomial::unit(r, j),
                        hbar: -1,
                    },
                    &one.scale(&w[i][j]),
                )?;
            }
        }
        out.set(1 << i, e);
    }
    Ok(out)
}

/// A central curvature two-form `θ` with ħ-series coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct CurvatureClass {
    theta: Form<HbarSeries>,
}

impl CurvatureClass {
    pub fn new(theta: Form<HbarSeries>) -> Result<Self> {
        if theta.degree() != 2 {
            return Err(Error::Precondition("curvature must be a two-form".into()));
        }
        Ok(CurvatureClass { theta })
    }

    /// `(iħ)⁻¹ ω`.
    pub fn symplectic(chart: &AlgebroidChart, max_hbar: i32) -> Self {
        let z = HbarSeries::zero(chart.base_vars().clone(), max_hbar);
        let theta = chart
            .omega_form()
            .map(z, |p| HbarSeries::term(-1, p.scale(&-Q::i()), max_hbar).expect("exponent -1"));
        CurvatureClass { theta }
    }

    /// Adds `ħ^k β`.
    pub fn with_term(&self, k: i32, beta: &Form<MultiPoly>) -> Result<Self> {
        let trunc = self.theta.zero_coeff().trunc();
        let z = self.theta.zero_coeff().clone();
        let extra = beta.try_map(z, |p| HbarSeries::term(k, p.clone(), trunc))?;
        Ok(CurvatureClass {
            theta: self.theta.try_add(&extra)?,
        })
    }

    pub fn theta(&self) -> &Form<HbarSeries> {
        &self.theta
    }

    pub fn hbar_component(&self, k: i32) -> Form<MultiPoly> {
        let z = MultiPoly::zero(self.theta.zero_coeff().vars().clone());
        self.theta.map(z, |s| s.coeff(k))
    }

    /// ħ-exponents present.
    pub fn orders(&self) -> Vec<i32> {
        let mut ks: Vec<i32> = self.theta.coeffs().values().flat_map(|s| s.coeffs().keys().copied()).collect();
        ks.sort();
        ks.dedup();
        ks
    }

    pub fn truncate(&self, max_hbar: i32) -> Self {
        CurvatureClass {
            theta: self.theta.map_same(|s| s.truncate(max_hbar)),
        }
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(CurvatureClass {
            theta: self.theta.try_sub(&other.theta)?,
        })
    }

    pub fn is_closed(&self, chart: &AlgebroidChart) -> Result<bool> {
        if chart.rank() < 3 {
            return Ok(true);
        }
        Ok(chart.d(&self.theta)?.is_zero())
    }

    pub fn to_json(&self) -> BTreeMap<String, String> {
        self.theta
            .coeffs()
            .iter()
            .map(|(m, s)| (mask_key(*m), format_series(s)))
            .collect()
    }

    pub fn from_json(chart: &AlgebroidChart, j: &BTreeMap<String, String>, max_hbar: i32) -> Result<Self> {
        let z = HbarSeries::zero(chart.base_vars().clone(), max_hbar);
        let mut theta = Form::zero(chart.rank(), 2, z)?;
        for (k, v) in j {
            let (m, sg) = parse_mask_key(k, chart.rank())?;
            if m.count_ones() != 2 {
                return Err(Error::Json(format!("form index `{k}` is not a pair")));
            }
            let s = parse_series(v, chart.base_vars(), max_hbar)?;
            theta.add_at(m, &if sg == 1 { s } else { s.neg() });
        }
        Ok(CurvatureClass { theta })
    }
}

fn check_theta(chart: &AlgebroidChart, theta: &CurvatureClass) -> Result<()> {
    let lead = CurvatureClass::symplectic(chart, 0).hbar_component(-1);
    if theta.hbar_component(-1) != lead {
        return Err(Error::Precondition("the hbar^-1 part of theta must be (i hbar)^-1 omega".into()));
    }
    if !theta.is_closed(chart)? {
        return Err(Error::Precondition("theta is not closed".into()));
    }
    Ok(())
}

fn check_chart(chart: &AlgebroidChart) -> Result<()> {
    let report = chart.validate();
    if let Some(bad) = report.checks.iter().find(|c| !c.pass) {
        return Err(Error::InvalidChart(format!("axiom `{}` fails", bad.axiom)));
    }
    if !chart.is_darboux() {
        return Err(Error::NotDarboux);
    }
    Ok(())
}

/// `∇ = ^Ed + Γ̃ + A` truncated at Fedosov degree `order + 1`.
#[derive(Clone, PartialEq, Debug)]
pub struct Connection {
    chart: Arc<AlgebroidChart>,
    ctx: Arc<WeylContext>,
    order: usize,
    gamma: Gamma,
    gamma_tilde: WeylFormSection,
    a: WeylFormSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectionJson {
    pub order: usize,
    pub rank: usize,
    pub base_vars: Vec<String>,
    pub gamma: Vec<Vec<Vec<String>>>,
    /// Fedosov degree → one-form coefficients.
    pub a: BTreeMap<i32, BTreeMap<String, String>>,
}

impl Connection {
    pub fn new(chart: &Arc<AlgebroidChart>, order: usize, gamma: Gamma, a: WeylFormSection) -> Result<Self> {
        let ctx = fiber_context(chart, order)?;
        if !crate::weyl::same_ctx(a.ctx(), &ctx) || a.degree() != 1 {
            return Err(Error::ContextMismatch);
        }
        let gamma_tilde = gamma_tilde(chart, &ctx, &gamma)?;
        Ok(Connection {
            chart: chart.clone(),
            ctx,
            order,
            gamma,
            gamma_tilde,
            a,
        })
    }

    pub fn chart(&self) -> &Arc<AlgebroidChart> {
        &self.chart
    }

    pub fn ctx(&self) -> &Arc<WeylContext> {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    pub fn gamma_tilde(&self) -> &WeylFormSection {
        &self.gamma_tilde
    }

    pub fn a(&self) -> &WeylFormSection {
        &self.a
    }

    /// Degree-`d` part of `A`.
    pub fn component(&self, d: i32) -> WeylFormSection {
        self.a.component(d)
    }

    /// `Γ̃ + A`.
    pub fn full_form(&self) -> WeylFormSection {
        self.gamma_tilde.try_add(&self.a).expect("same context")
    }

    /// `Γ̃ + A − A₋₁`, the part of degree ≥ 0.
    pub fn correction(&self) -> WeylFormSection {
        self.full_form().map(|w| w.filter(|k| k.degree() >= 0))
    }

    pub fn with_a(&self, a: WeylFormSection) -> Result<Self> {
        Connection::new(&self.chart, self.order, self.gamma.clone(), a)
    }

    /// Drops the degree-`d` component of `A`.
    pub fn with_component_zeroed(&self, d: i32) -> Self {
        let a = self.a.map(|w| w.filter(|k| k.degree() != d));
        Connection { a, ..self.clone() }
    }

    /// Adds a scalar one-form to `A`; curvature shifts by its differential.
    pub fn shift_scalar(&self, alpha: &Form<HbarSeries>) -> Result<Self> {
        let s = WeylFormSection::from_scalar(&self.chart, &self.ctx, alpha)?;
        Ok(Connection {
            a: self.a.try_add(&s)?,
            ..self.clone()
        })
    }

    /// `δ⁻¹(A − A₋₁) = 0`.
    pub fn is_normalized(&self) -> Result<bool> {
        let r = self.a.map(|w| w.filter(|k| k.degree() >= 0));
        Ok(r.delta_inv()?.is_zero())
    }

    pub fn to_json(&self) -> ConnectionJson {
        let mut a: BTreeMap<i32, BTreeMap<String, String>> = BTreeMap::new();
        if let (Some(lo), Some(hi)) = (self.a.min_degree(), self.a.max_degree()) {
            for d in lo..=hi {
                let c = self.a.component(d);
                if !c.is_zero() {
                    a.insert(d, c.to_json());
                }
            }
        }
        ConnectionJson {
            order: self.order,
            rank: self.chart.rank(),
            base_vars: self.chart.base_vars().to_vec(),
            gamma: self
                .gamma
                .iter()
                .map(|m| m.iter().map(|row| row.iter().map(format_poly).collect()).collect())
                .collect(),
            a,
        }
    }

    pub fn from_json(chart: &Arc<AlgebroidChart>, j: &ConnectionJson) -> Result<Self> {
        if j.rank != chart.rank() || j.base_vars[..] != chart.base_vars()[..] {
            return Err(Error::Json("connection was built for a different chart".into()));
        }
        let ctx = fiber_context(chart, j.order)?;
        let gamma = j
            .gamma
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|s| parse_poly(s, chart.base_vars())).collect())
                    .collect()
            })
            .collect::<Result<Gamma>>()?;
        let mut a = WeylFormSection::zero(chart, &ctx, 1)?;
        for comp in j.a.values() {
            a = a.try_add(&WeylFormSection::from_json(chart, &ctx, 1, comp)?)?;
        }
        Connection::new(chart, j.order, gamma, a)
    }
}

/// Solves `^Ed𝒜 + ½[𝒜,𝒜] = θ` degree by degree with `𝒜 = A₋₁ + Γ̃ + r`,
/// `r_{d+1} = δ⁻¹(RHS_d)`, starting at `d = −1`.
pub fn fedosov_construct(
    chart: &Arc<AlgebroidChart>,
    gamma: Option<&Gamma>,
    theta: &CurvatureClass,
    order: usize,
) -> Result<Connection> {
    check_chart(chart)?;
    check_theta(chart, theta)?;
    let ctx = fiber_context(chart, order)?;
    let gamma = gamma.cloned().unwrap_or_else(|| zero_gamma(chart));
    let gt = gamma_tilde(chart, &ctx, &gamma)?;
    let am1 = build_a_minus_one(chart, &ctx)?;
    let top = order as i32 + 1;
    let half = Q::ratio(1, 2);
    let mut b: Vec<WeylFormSection> = Vec::new();
    let mut r_total = WeylFormSection::zero(chart, &ctx, 1)?;
    for d in -1..top {
        let rhs = if d == -1 {
            am1.d()?.try_sub(&gt.delta()?)?
        } else {
            let du = d as usize;
            let mut rhs = b[du].d()?;
            for a in 0..=du / 2 {
                let c = b[a].bracket(&b[du - a])?;
                rhs = rhs.try_add(&if a == du - a { c.scale(&half) } else { c })?;
            }
            if d % 2 == 0 {
                let t = theta.hbar_component(d / 2);
                let tw = t.try_map(WeylElement::zero(&ctx), |p| {
                    WeylElement::monomial(&ctx, Monomial::one(ctx.dim()), d / 2, p.clone())
                })?;
                rhs = rhs.try_sub(&WeylFormSection::from_form(chart, &ctx, tw)?)?;
            }
            rhs
        };
        let r = rhs.delta_inv()?;
        r_total = r_total.try_add(&r)?;
        b.push(if d == -1 { r.try_add(&gt)? } else { r });
    }
    Connection::new(chart, order, gamma, am1.try_add(&r_total)?)
}

/// The flat Moyal-type connection: `Γ = 0`, `θ = (iħ)⁻¹ω`.
pub fn moyal_connection(chart: &Arc<AlgebroidChart>, order: usize) -> Result<Connection> {
    let theta = CurvatureClass::symplectic(chart, order as i32);
    fedosov_construct(chart, None, &theta, order)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    /// Central part, a candidate characteristic class.
    pub scalar: CurvatureClass,
    /// Non-central part; zero iff the connection is flat.
    pub weyl: WeylFormSection,
}

/// `^Ed𝒜 + ½[𝒜,𝒜]` through Fedosov degree `order`, split into central and
/// non-central parts.
pub fn curvature(c: &Connection) -> Result<Curvature> {
    let f = c.full_form();
    let omega = f
        .d()?
        .try_add(&f.bracket(&f)?.scale(&Q::ratio(1, 2)))?
        .truncate_degree(c.order as i32);
    Ok(Curvature {
        scalar: CurvatureClass::new(omega.central_part())?,
        weyl: omega.non_central(),
    })
}

pub fn characteristic_class(c: &Connection) -> Result<CurvatureClass> {
    let curv = curvature(c)?;
    if let Some(d) = curv.weyl.min_degree() {
        return Err(Error::NotFlat { degree: d });
    }
    Ok(curv.scalar)
}

/// Conjugates by `exp(ad δ)` for each `δ` in turn:
/// `𝒜' = e^{ad δ}𝒜 − Σ_k (ad δ)^k(^Edδ)/(k+1)!`.
pub fn gauge_apply(deltas: &[WeylElement], c: &Connection) -> Result<Connection> {
    let mut cur = c.clone();
    for g in deltas {
        if !crate::weyl::same_ctx(g.ctx(), &c.ctx) {
            return Err(Error::ContextMismatch);
        }
        if let Some(m) = g.min_degree() {
            if m < 1 {
                return Err(Error::Precondition(format!(
                    "gauge elements need Fedosov degree at least 1, found {m}"
                )));
            }
        } else {
            continue;
        }
        let f = cur.full_form();
        let mut acc = f.clone();
        let mut term = f;
        let mut k = 1;
        loop {
            term = term.ad(g)?.scale(&Q::ratio(1, k));
            if term.is_zero() {
                break;
            }
            acc = acc.try_add(&term)?;
            k += 1;
        }
        let mut u = WeylFormSection::function(&c.chart, &c.ctx, g.clone())?.d()?;
        let mut k = 0;
        while !u.is_zero() {
            acc = acc.try_sub(&u.scale(&Q::ratio(1, k + 1)))?;
            k += 1;
            u = u.ad(g)?.scale(&Q::ratio(1, k));
        }
        cur = Connection {
            a: acc.try_sub(&cur.gamma_tilde)?,
            ..cur
        };
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeSolution {
    /// Scalar one-form absorbing an exact curvature difference.
    pub alpha: Form<HbarSeries>,
    /// `δ_j` of Fedosov degree `j`, applied in order.
    pub deltas: Vec<WeylElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GaugeOutcome {
    Equivalent(GaugeSolution),
    /// The curvature difference at this Fedosov degree is not exact.
    Obstruction { degree: i32, residual: Form<MultiPoly> },
}

/// Finds `α` and `δ₁, δ₂, …` with
/// `gauge_apply(δ, c2.shift_scalar(α)) = c1` through degree `order`.
pub fn gauge_solve(c1: &Connection, c2: &Connection) -> Result<GaugeOutcome> {
    if *c1.chart != *c2.chart || c1.order != c2.order {
        return Err(Error::Precondition("connections over different charts or orders".into()));
    }
    let chart = &c1.chart;
    let diff = characteristic_class(c1)?.try_sub(&characteristic_class(c2)?)?;
    let lead = diff.hbar_component(-1);
    if !lead.is_zero() {
        return Ok(GaugeOutcome::Obstruction {
            degree: -2,
            residual: lead,
        });
    }
    let trunc = c1.ctx.trunc_total().div_euclid(2);
    let mut alpha = Form::zero(chart.rank(), 1, HbarSeries::zero(chart.base_vars().clone(), trunc))?;
    for k in 0..=(c1.order as i32 / 2) {
        let beta = diff.hbar_component(k);
        if beta.is_zero() {
            continue;
        }
        let deg = beta.coeffs().values().filter_map(|p| p.degree()).max().unwrap_or(0);
        match chart.solve_primitive(&beta, deg + 1)? {
            None => {
                return Ok(GaugeOutcome::Obstruction {
                    degree: 2 * k,
                    residual: beta,
                })
            }
            Some(a) => {
                let z = alpha.zero_coeff().clone();
                let a = a.try_map(z, |p| HbarSeries::term(k, p.clone(), trunc))?;
                alpha = alpha.try_add(&a)?;
            }
        }
    }
    let mut cur = c2.shift_scalar(&alpha)?;
    let target = c1.full_form();
    let mut deltas = Vec::new();
    for j in 0..=c1.order as i32 {
        let r = target.try_sub(&cur.full_form())?.component(j);
        if r.is_zero() {
            continue;
        }
        let g = r.delta_inv()?.get(0);
        cur = gauge_apply(std::slice::from_ref(&g), &cur)?;
        deltas.push(g);
    }
    Ok(GaugeOutcome::Equivalent(GaugeSolution { alpha, deltas }))
}

/// A multilinear cochain on the Weyl algebra with scalar values.
pub trait Cochain: Sync {
    fn arity(&self) -> usize;
    fn eval(&self, args: &[WeylElement]) -> Result<HbarSeries>;
}

/// The zero cochain of a given arity.
pub struct ZeroCochain(pub usize);

impl Cochain for ZeroCochain {
    fn arity(&self) -> usize {
        self.0
    }
    fn eval(&self, args: &[WeylElement]) -> Result<HbarSeries> {
        let ctx = args.first().map(|a| a.ctx().clone());
        let vars = ctx.map(|c| c.base_vars().clone()).unwrap_or_else(|| crate::poly::vars::<&str>(&[]));
        Ok(HbarSeries::zero(vars, 0))
    }
}

/// Reads off the coefficient of one Weyl monomial, as an ħ⁰ series.
pub struct CoefficientCochain {
    pub key: WKey,
}

impl Cochain for CoefficientCochain {
    fn arity(&self) -> usize {
        1
    }
    fn eval(&self, args: &[WeylElement]) -> Result<HbarSeries> {
        let a = &args[0];
        let p = a
            .terms()
            .get(&self.key)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(a.ctx().base_vars().clone()));
        Ok(HbarSeries::from_poly(p, 0))
    }
}

/// Chevalley-Eilenberg differential with trivial coefficients:
/// `(∂l)(a₀..a_k) = Σ_{i<j} (−1)^{i+j} l([a_i,a_j], a₀..â_i..â_j..a_k)`.
pub struct LieDifferential<'a>(pub &'a dyn Cochain);

impl Cochain for LieDifferential<'_> {
    fn arity(&self) -> usize {
        self.0.arity() + 1
    }
    fn eval(&self, args: &[WeylElement]) -> Result<HbarSeries> {
        let mut acc: Option<HbarSeries> = None;
        for i in 0..args.len() {
            for j in i + 1..args.len() {
                let mut v = vec![args[i].commutator(&args[j])?];
                v.extend(args.iter().enumerate().filter(|(t, _)| *t != i && *t != j).map(|(_, a)| a.clone()));
                let mut val = self.0.eval(&v)?;
                if (i + j) % 2 == 1 {
                    val = val.neg();
                }
                acc = Some(match acc {
                    None => val,
                    Some(s) => s.try_add(&val)?,
                });
            }
        }
        acc.map_or_else(|| ZeroCochain(0).eval(args), Ok)
    }
}

/// `gf(l)(e_{s₁},…,e_{s_k}) = l(𝒜(e_{s₁}),…,𝒜(e_{s_k}))` (0-based frame
/// indices). The cochain is spot-tested to vanish when one argument is
/// central.
pub fn gelfand_fuks(l: &dyn Cochain, c: &Connection, sections: &[usize]) -> Result<HbarSeries> {
    if l.arity() != sections.len() {
        return Err(Error::Arity {
            expected: l.arity(),
            got: sections.len(),
        });
    }
    if let Some(&bad) = sections.iter().find(|&&i| i >= c.chart.rank()) {
        return Err(Error::Precondition(format!("frame index {bad} out of range")));
    }
    let f = c.full_form();
    let args: Vec<WeylElement> = sections.iter().map(|&i| f.get(1 << i)).collect();
    if !args.is_empty() {
        let mut probe = args.clone();
        probe[0] = WeylElement::one(&c.ctx);
        if !l.eval(&probe)?.is_zero() {
            return Err(Error::Precondition("cochain does not vanish on the center".into()));
        }
    }
    l.eval(&args)
}

/// `gf(l)` as a `k`-form.
pub fn gelfand_fuks_form(l: &dyn Cochain, c: &Connection) -> Result<Form<HbarSeries>> {
    let k = l.arity();
    let z = HbarSeries::zero(c.chart.base_vars().clone(), c.ctx.trunc_total().div_euclid(2));
    let mut out = Form::zero(c.chart.rank(), k, z)?;
    for mask in subsets(c.chart.rank(), k) {
        out.set(mask, gelfand_fuks(l, c, &mask_indices(mask))?);
    }
    Ok(out)
}
