//! Lie algebroids over one polynomial chart: anchor, structure functions,
//! symplectic form, the E-de Rham differential and the induced Poisson
//! bracket, plus a catalogue of standard examples.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{mask_indices, subsets, Coeff, Form};
use crate::linalg::{self, Matrix, SparseSystem};
use crate::poly::{vars, Monomial, MultiPoly, Vars};
use crate::scalar::GaussianRational as Q;
use crate::series::HbarSeries;
use crate::text::{format_poly, parse_poly};

/// Which catalogue entry produced a chart, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Catalogue {
    Standard { n: usize },
    ZeroAnchor,
    Foliation,
    BSymplectic,
    Mixed { k: usize, l: usize, m: usize },
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidChart {
    base_vars: Vars,
    rank: usize,
    /// `fields[i][a]`: coefficient of `∂_a` in `ρ(e_i)`.
    fields: Vec<Vec<MultiPoly>>,
    /// `structure[i][j][k] = c^k_{ij}` with `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
    structure: Vec<Vec<Vec<MultiPoly>>>,
    omega: Vec<Vec<MultiPoly>>,
    degree_cap: u32,
    catalogue: Catalogue,
}

pub const DEFAULT_DEGREE_CAP: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub pass: bool,
    /// 1-based frame indices of the first failing configuration.
    pub witness: Option<Vec<usize>>,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// JSON shape of a chart; polynomials are canonical strings and the
/// anchor is the `m × rank` matrix whose column `i` is `ρ(e_i)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartJson {
    pub base_vars: Vec<String>,
    pub rank: usize,
    pub anchor: Vec<Vec<String>>,
    pub structure: Vec<Vec<Vec<String>>>,
    pub omega: Vec<Vec<String>>,
    #[serde(default)]
    pub degree_cap: Option<u32>,
}

impl AlgebroidChart {
    pub fn new(
        base_vars: Vars,
        fields: Vec<Vec<MultiPoly>>,
        structure: Vec<Vec<Vec<MultiPoly>>>,
        omega: Vec<Vec<MultiPoly>>,
        degree_cap: Option<u32>,
    ) -> Result<Self> {
        let rank = fields.len();
        let m = base_vars.len();
        let bad = |msg: &str| Err(Error::InvalidChart(msg.to_string()));
        if rank == 0 || !rank.is_multiple_of(2) || rank > 30 {
            return bad("rank must be even, positive and at most 30");
        }
        if fields.iter().any(|f| f.len() != m) {
            return bad("anchor must have one row per base variable");
        }
        if structure.len() != rank
            || structure.iter().any(|r| r.len() != rank || r.iter().any(|c| c.len() != rank))
        {
            return bad("structure table must be rank × rank × rank");
        }
        if omega.len() != rank || omega.iter().any(|r| r.len() != rank) {
            return bad("omega must be rank × rank");
        }
        let all_polys = fields
            .iter()
            .flatten()
            .chain(structure.iter().flatten().flatten())
            .chain(omega.iter().flatten());
        for p in all_polys {
            if p.vars()[..] != base_vars[..] {
                return Err(Error::VariableMismatch {
                    left: base_vars.to_vec(),
                    right: p.vars().to_vec(),
                });
            }
        }
        for i in 0..rank {
            for j in 0..rank {
                if omega[i][j] != -&omega[j][i] {
                    return bad("omega is not antisymmetric");
                }
                for k in 0..rank {
                    if structure[i][j][k] != -&structure[j][i][k] {
                        return bad("structure functions are not antisymmetric");
                    }
                }
            }
        }
        let chart = AlgebroidChart {
            base_vars,
            rank,
            fields,
            structure,
            omega,
            degree_cap: degree_cap.unwrap_or(DEFAULT_DEGREE_CAP),
            catalogue: Catalogue::Custom,
        };
        if linalg::invert(&chart.omega_at_origin()).is_none() {
            return Err(Error::NotInvertible);
        }
        Ok(chart)
    }

    pub fn from_json_value(j: &ChartJson) -> Result<Self> {
        let v = vars(&j.base_vars);
        let m = v.len();
        if j.anchor.len() != m || j.anchor.iter().any(|r| r.len() != j.rank) {
            return Err(Error::InvalidChart("anchor must be base_vars × rank".into()));
        }
        let p = |s: &String| parse_poly(s, &v);
        let mut fields = vec![Vec::with_capacity(m); j.rank];
        for row in j.anchor.iter() {
            for (i, s) in row.iter().enumerate() {
                fields[i].push(p(s)?);
            }
        }
        let structure = j
            .structure
            .iter()
            .map(|a| a.iter().map(|b| b.iter().map(p).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let omega = j
            .omega
            .iter()
            .map(|r| r.iter().map(p).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if structure.len() != j.rank || omega.len() != j.rank {
            return Err(Error::InvalidChart("rank does not match the tables".into()));
        }
        AlgebroidChart::new(v, fields, structure, omega, j.degree_cap)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ChartJson = serde_json::from_str(s)?;
        Self::from_json_value(&j)
    }

    pub fn to_json_value(&self) -> ChartJson {
        let m = self.base_vars.len();
        ChartJson {
            base_vars: self.base_vars.to_vec(),
            rank: self.rank,
            anchor: (0..m)
                .map(|a| (0..self.rank).map(|i| format_poly(&self.fields[i][a])).collect())
                .collect(),
            structure: self
                .structure
                .iter()
                .map(|a| a.iter().map(|b| b.iter().map(format_poly).collect()).collect())
                .collect(),
            omega: self.omega.iter().map(|r| r.iter().map(format_poly).collect()).collect(),
            degree_cap: Some(self.degree_cap),
        }
    }

    pub fn base_vars(&self) -> &Vars {
        &self.base_vars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.rank / 2
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn catalogue(&self) -> &Catalogue {
        &self.catalogue
    }

    pub fn with_catalogue(mut self, c: Catalogue) -> Self {
        self.catalogue = c;
        self
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = cap;
        self
    }

    /// `ρ(e_i)` as coefficients of `∂_a`.
    pub fn field(&self, i: usize) -> &[MultiPoly] {
        &self.fields[i]
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> &MultiPoly {
        &self.structure[i][j][k]
    }

    /// Replaces one structure function, keeping antisymmetry.
    pub fn with_structure(mut self, i: usize, j: usize, k: usize, c: MultiPoly) -> Self {
        self.structure[j][i][k] = -&c;
        self.structure[i][j][k] = c;
        self.catalogue = Catalogue::Custom;
        self
    }

    pub fn omega_entry(&self, i: usize, j: usize) -> &MultiPoly {
        &self.omega[i][j]
    }

    pub fn zero_poly(&self) -> MultiPoly {
        MultiPoly::zero(self.base_vars.clone())
    }

    pub fn rho(&self, i: usize, f: &MultiPoly) -> MultiPoly {
        f.apply_field(&self.fields[i])
    }

    pub fn omega_at_origin(&self) -> Matrix {
        self.omega
            .iter()
            .map(|r| r.iter().map(|p| p.constant_term()).collect())
            .collect()
    }

    /// Whether `ω` has constant coefficients in the frame.
    pub fn is_darboux(&self) -> bool {
        self.omega.iter().flatten().all(|p| p.is_constant())
    }

    pub fn omega_form(&self) -> Form<MultiPoly> {
        let mut f = Form::zero(self.rank, 2, self.zero_poly()).expect("rank ≥ 2");
        for m in subsets(self.rank, 2) {
            let ix = mask_indices(m);
            f.set(m, self.omega[ix[0]][ix[1]].clone());
        }
        f
    }

    /// E-de Rham differential by the Cartan formula:
    /// `dα(e₀..e_p) = Σ_a (-1)^a ρ_a α(..ê_a..) + Σ_{a<b} (-1)^{a+b} α([e_a,e_b], ..ê_a..ê_b..)`.
    pub fn d<C: Coeff>(&self, form: &Form<C>) -> Result<Form<C>> {
        let p = form.degree();
        if p + 1 > self.rank {
            return Err(Error::DegreeOverflow {
                degree: p + 1,
                rank: self.rank,
            });
        }
        let zero = form.zero_coeff().clone();
        let mut out = Form::zero(self.rank, p + 1, zero.clone())?;
        let targets = subsets(self.rank, p + 1);
        let values = crate::par::map(&targets, |&mask| {
            let ix = mask_indices(mask);
            let mut acc = zero.clone();
            for a in 0..ix.len() {
                let rest: Vec<usize> = ix.iter().enumerate().filter(|(t, _)| *t != a).map(|(_, v)| *v).collect();
                let v = form.eval(&rest).apply_field(&self.fields[ix[a]]);
                acc = if a % 2 == 0 { acc.add(&v) } else { acc.sub(&v) };
            }
            for a in 0..ix.len() {
                for b in a + 1..ix.len() {
                    let rest: Vec<usize> = ix
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| *t != a && *t != b)
                        .map(|(_, v)| *v)
                        .collect();
                    let mut inner = zero.clone();
                    for k in 0..self.rank {
                        let c = &self.structure[ix[a]][ix[b]][k];
                        if c.is_zero() {
                            continue;
                        }
                        let mut args = vec![k];
                        args.extend_from_slice(&rest);
                        let v = form.eval(&args);
                        if !v.is_zero() {
                            inner = inner.add(&v.mul_poly(c));
                        }
                    }
                    acc = if (a + b) % 2 == 0 { acc.add(&inner) } else { acc.sub(&inner) };
                }
            }
            acc
        });
        for (mask, v) in targets.into_iter().zip(values) {
            out.set(mask, v);
        }
        Ok(out)
    }

    pub fn validate(&self) -> ValidationReport {
        let r = self.rank;
        let m = self.base_vars.len();
        let mut checks = Vec::new();

        // ρ[e_i,e_j] = [ρe_i, ρe_j]
        let mut anchor = AxiomCheck {
            axiom: "anchor_homomorphism".into(),
            pass: true,
            witness: None,
            residual: "0".into(),
        };
        'outer: for i in 0..r {
            for j in i + 1..r {
                for a in 0..m {
                    let mut lhs = self.zero_poly();
                    for k in 0..r {
                        lhs = &lhs + &(&self.structure[i][j][k] * &self.fields[k][a]);
                    }
                    let rhs = &self.rho(i, &self.fields[j][a]) - &self.rho(j, &self.fields[i][a]);
                    let res = &lhs - &rhs;
                    if !res.is_zero() {
                        anchor.pass = false;
                        anchor.witness = Some(vec![i + 1, j + 1]);
                        anchor.residual = format_poly(&res);
                        break 'outer;
                    }
                }
            }
        }
        checks.push(anchor);

        // [[e_i,e_j],e_k] + cyclic, component l:
        // Σ_p c^p_ij c^l_pk − ρ_k(c^l_ij) + cyclic
        let mut jacobi = AxiomCheck {
            axiom: "jacobi".into(),
            pass: true,
            witness: None,
            residual: "0".into(),
        };
        let nested = |i: usize, j: usize, k: usize, l: usize| {
            let mut acc = -&self.rho(k, &self.structure[i][j][l]);
            for p in 0..r {
                if !self.structure[i][j][p].is_zero() {
                    acc = &acc + &(&self.structure[i][j][p] * &self.structure[p][k][l]);
                }
            }
            acc
        };
        'outer: for i in 0..r {
            for j in i + 1..r {
                for k in j + 1..r {
                    for l in 0..r {
                        let res = &(&nested(i, j, k, l) + &nested(j, k, i, l)) + &nested(k, i, j, l);
                        if !res.is_zero() {
                            jacobi.pass = false;
                            jacobi.witness = Some(vec![i + 1, j + 1, k + 1]);
                            jacobi.residual = format_poly(&res);
                            break 'outer;
                        }
                    }
                }
            }
        }
        checks.push(jacobi);

        let mut closed = AxiomCheck {
            axiom: "omega_closed".into(),
            pass: true,
            witness: None,
            residual: "0".into(),
        };
        if r >= 3 {
            let dw = self.d(&self.omega_form()).expect("rank ≥ 3");
            if let Some((mask, c)) = dw.coeffs().iter().next() {
                closed.pass = false;
                closed.witness = Some(mask_indices(*mask).into_iter().map(|i| i + 1).collect());
                closed.residual = format_poly(c);
            }
        }
        checks.push(closed);

        let nondeg = linalg::invert(&self.omega_at_origin()).is_some();
        checks.push(AxiomCheck {
            axiom: "nondegenerate".into(),
            pass: nondeg,
            witness: None,
            residual: if nondeg { "0".into() } else { "det(omega(0)) = 0".into() },
        });
        ValidationReport { checks }
    }

    /// `ω⁻¹` as a truncated geometric series around `ω(0)`:
    /// `ω⁻¹ = Σ_k (−ω(0)⁻¹ω')^k ω(0)⁻¹`, entries capped at `degree_cap`.
    pub fn omega_inverse(&self) -> Result<Vec<Vec<MultiPoly>>> {
        let r = self.rank;
        let inv0 = linalg::invert(&self.omega_at_origin()).ok_or(Error::NotInvertible)?;
        let v = &self.base_vars;
        let constant = |q: &Q| MultiPoly::constant(v.clone(), q.clone());
        let inv0p: Vec<Vec<MultiPoly>> = inv0.iter().map(|row| row.iter().map(constant).collect()).collect();
        let rest: Vec<Vec<MultiPoly>> = self
            .omega
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        let mut q = p.clone();
                        q.add_term(Monomial::one(v.len()), &-p.constant_term());
                        q
                    })
                    .collect()
            })
            .collect();
        let mul = |a: &Vec<Vec<MultiPoly>>, b: &Vec<Vec<MultiPoly>>| -> Vec<Vec<MultiPoly>> {
            (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            let mut acc = MultiPoly::zero(v.clone());
                            for k in 0..r {
                                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                                    acc = &acc + &(&a[i][k] * &b[k][j]);
                                }
                            }
                            acc.truncate_degree(self.degree_cap)
                        })
                        .collect()
                })
                .collect()
        };
        let step: Vec<Vec<MultiPoly>> = mul(&inv0p, &rest).into_iter().map(|r| r.into_iter().map(|p| -&p).collect()).collect();
        let mut term = inv0p.clone();
        let mut total = inv0p;
        for _ in 0..self.degree_cap {
            term = mul(&step, &term);
            if term.iter().flatten().all(|p| p.is_zero()) {
                break;
            }
            for i in 0..r {
                for j in 0..r {
                    total[i][j] = &total[i][j] + &term[i][j];
                }
            }
        }
        Ok(total)
    }

    /// `Π = −ω⁻¹`, so that `{f,g} = Σ Π^{ij} ρ_i(f) ρ_j(g)`.
    pub fn poisson_tensor(&self) -> Result<Vec<Vec<MultiPoly>>> {
        Ok(self
            .omega_inverse()?
            .into_iter()
            .map(|r| r.into_iter().map(|p| -&p).collect())
            .collect())
    }

    /// `X_f = I_ω⁻¹ ρᵗ df` in the frame and `H_f = ρ(X_f)` on the base.
    pub fn hamiltonian_field(&self, f: &MultiPoly) -> Result<(Vec<MultiPoly>, Vec<MultiPoly>)> {
        let inv = self.omega_inverse()?;
        let df: Vec<MultiPoly> = (0..self.rank).map(|l| self.rho(l, f)).collect();
        let x: Vec<MultiPoly> = (0..self.rank)
            .map(|j| {
                let mut acc = self.zero_poly();
                for l in 0..self.rank {
                    acc = &acc + &(&inv[j][l] * &df[l]);
                }
                acc.truncate_degree(self.degree_cap)
            })
            .collect();
        let h: Vec<MultiPoly> = (0..self.base_vars.len())
            .map(|a| {
                let mut acc = self.zero_poly();
                for j in 0..self.rank {
                    acc = &acc + &(&x[j] * &self.fields[j][a]);
                }
                acc
            })
            .collect();
        Ok((x, h))
    }

    pub fn poisson_bracket(&self, f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly> {
        let (_, h) = self.hamiltonian_field(f)?;
        Ok(g.apply_field(&h).truncate_degree(self.degree_cap))
    }

    /// A polynomial one-form `α` with `dα = β` of degree at most `max_deg`,
    /// found by exact linear solve; `None` when no such primitive exists.
    pub fn solve_primitive(&self, beta: &Form<MultiPoly>, max_deg: u32) -> Result<Option<Form<MultiPoly>>> {
        if beta.degree() != 2 {
            return Err(Error::Precondition("primitive solver expects a two-form".into()));
        }
        let v = &self.base_vars;
        let monos = monomials_up_to(v.len(), max_deg);
        let unknowns: Vec<(usize, Monomial)> = (0..self.rank)
            .flat_map(|i| monos.iter().map(move |m| (i, m.clone())))
            .collect();
        // image of every basis one-form under d, collected row-wise
        let mut rows: BTreeMap<(u32, Monomial), Vec<(usize, Q)>> = BTreeMap::new();
        for (col, (i, m)) in unknowns.iter().enumerate() {
            let mut a = Form::zero(self.rank, 1, self.zero_poly())?;
            a.set(1 << i, MultiPoly::monomial(v.clone(), m.clone(), Q::one()));
            let da = self.d(&a)?;
            for (mask, p) in da.coeffs() {
                for (mm, c) in p.terms() {
                    rows.entry((*mask, mm.clone())).or_default().push((col, c.clone()));
                }
            }
        }
        for (mask, p) in beta.coeffs() {
            for mm in p.terms().keys() {
                rows.entry((*mask, mm.clone())).or_default();
            }
        }
        let mut sys = SparseSystem::new(unknowns.len());
        for ((mask, mm), row) in rows {
            let rhs = beta.get(mask).coeff(&mm);
            sys.push(row, rhs);
        }
        let Some(x) = sys.solve() else {
            return Ok(None);
        };
        let mut alpha = Form::zero(self.rank, 1, self.zero_poly())?;
        for ((i, m), c) in unknowns.into_iter().zip(x) {
            if !c.is_zero() {
                alpha.add_at(1 << i, &MultiPoly::monomial(v.clone(), m, c));
            }
        }
        Ok(Some(alpha))
    }

    /// The closed-form deformation `exp((iħ/2) Σ D_j⊗E_j − E_j⊗D_j)` of the
    /// mixed model (and of the standard chart), with `D_j = ρ(e_{2j-1})`,
    /// `E_j = ρ(e_{2j})`, applied on doubled variables and restricted to
    /// the diagonal.
    pub fn weyl_model_product(&self, f: &MultiPoly, g: &MultiPoly, order: i32) -> Result<HbarSeries> {
        if !matches!(self.catalogue, Catalogue::Mixed { .. } | Catalogue::Standard { .. }) {
            return Err(Error::Precondition("closed-form product needs a mixed or standard chart".into()));
        }
        let m = self.base_vars.len();
        let doubled: Vec<String> = self
            .base_vars
            .iter()
            .cloned()
            .chain(self.base_vars.iter().map(|s| format!("{s}_bar")))
            .collect();
        let dv = vars(&doubled);
        let left_map: Vec<MultiPoly> = (0..m).map(|a| MultiPoly::var_index(dv.clone(), a)).collect();
        let right_map: Vec<MultiPoly> = (0..m).map(|a| MultiPoly::var_index(dv.clone(), m + a)).collect();
        let lift = |field: &[MultiPoly], on_right: bool| -> Vec<MultiPoly> {
            let images = if on_right { &right_map } else { &left_map };
            let mut out = vec![MultiPoly::zero(dv.clone()); 2 * m];
            for (a, c) in field.iter().enumerate() {
                out[if on_right { m + a } else { a }] = c.substitute(images, &dv);
            }
            out
        };
        let pairs: Vec<[Vec<MultiPoly>; 4]> = (0..self.n())
            .map(|j| {
                let d = &self.fields[2 * j];
                let e = &self.fields[2 * j + 1];
                [lift(d, false), lift(e, true), lift(e, false), lift(d, true)]
            })
            .collect();
        let mut current = &f.substitute(&left_map, &dv) * &g.substitute(&right_map, &dv);
        let mut out = HbarSeries::zero(self.base_vars.clone(), order);
        let diag: Vec<MultiPoly> = (0..2 * m).map(|a| MultiPoly::var_index(self.base_vars.clone(), a % m)).collect();
        let mut fact = Q::one();
        for k in 0..=order.max(0) {
            if k > 0 {
                let mut next = MultiPoly::zero(dv.clone());
                for [dl, er, el, dr] in pairs.iter() {
                    next = &next + &current.apply_field(er).apply_field(dl);
                    next = &next - &current.apply_field(dr).apply_field(el);
                }
                current = next;
                fact = &fact * &Q::ratio(1, k as i64);
            }
            if current.is_zero() {
                break;
            }
            let c = &Q::complex((0, 1), (1, 2)).pow(k as u32) * &fact;
            out.add_poly(k, &current.substitute(&diag, &self.base_vars).scale(&c))?;
        }
        Ok(out)
    }
}

pub(crate) fn monomials_up_to(nvars: usize, max_deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    fn rec(idx: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if idx == cur.len() {
            out.push(Monomial::from_exps(cur));
            return;
        }
        for e in 0..=left {
            cur[idx] = e as u16;
            rec(idx + 1, left - e, cur, out);
        }
        cur[idx] = 0;
    }
    rec(0, max_deg, &mut cur, &mut out);
    out.sort();
    out
}

fn const_matrix(v: &Vars, entries: &[(usize, usize, i64)], r: usize) -> Vec<Vec<MultiPoly>> {
    let mut m = vec![vec![MultiPoly::zero(v.clone()); r]; r];
    for &(i, j, c) in entries {
        m[i][j] = MultiPoly::constant(v.clone(), Q::from_int(c));
        m[j][i] = MultiPoly::constant(v.clone(), Q::from_int(-c));
    }
    m
}

fn empty_structure(v: &Vars, r: usize) -> Vec<Vec<Vec<MultiPoly>>> {
    vec![vec![vec![MultiPoly::zero(v.clone()); r]; r]; r]
}

fn darboux_pairs(v: &Vars, n: usize) -> Vec<Vec<MultiPoly>> {
    let e: Vec<(usize, usize, i64)> = (0..n).map(|j| (2 * j, 2 * j + 1, 1)).collect();
    const_matrix(v, &e, 2 * n)
}

/// Tangent algebroid of ℝ²ⁿ with coordinates `x1, xi1, x2, xi2, …`,
/// frame `∂_{x_i}, ∂_{ξ_i}` and `ω = Σ dx_i ∧ dξ_i`.
pub fn standard(n: usize) -> AlgebroidChart {
    let names: Vec<String> = (1..=n).flat_map(|i| [format!("x{i}"), format!("xi{i}")]).collect();
    let v = vars(&names);
    let fields = (0..2 * n)
        .map(|i| (0..2 * n).map(|a| if a == i { MultiPoly::one(v.clone()) } else { MultiPoly::zero(v.clone()) }).collect())
        .collect();
    AlgebroidChart::new(v.clone(), fields, empty_structure(&v, 2 * n), darboux_pairs(&v, n), None)
        .expect("standard chart")
        .with_catalogue(Catalogue::Standard { n })
}

/// Zero anchor over a line with fiber `aff(1) ⊕ aff(1)`:
/// `[e₁,e₃] = e₃`, `[e₂,e₄] = e₄`, `ω = e¹∧e³ + e²∧e⁴`.
pub fn zero_anchor() -> AlgebroidChart {
    let v = vars(&["t"]);
    let r = 4;
    let fields = vec![vec![MultiPoly::zero(v.clone())]; r];
    let one = MultiPoly::one(v.clone());
    let mut s = empty_structure(&v, r);
    s[0][2][2] = one.clone();
    s[2][0][2] = -&one;
    s[1][3][3] = one.clone();
    s[3][1][3] = -&one;
    let omega = const_matrix(&v, &[(0, 2, 1), (1, 3, 1)], r);
    AlgebroidChart::new(v, fields, s, omega, None)
        .expect("zero-anchor chart")
        .with_catalogue(Catalogue::ZeroAnchor)
}

/// Leafwise tangent algebroid of the foliation of ℝ³ by planes `t = const`.
pub fn foliation() -> AlgebroidChart {
    let v = vars(&["x", "xi", "t"]);
    let unit = |a: usize| (0..3).map(|b| if a == b { MultiPoly::one(v.clone()) } else { MultiPoly::zero(v.clone()) }).collect();
    let fields = vec![unit(0), unit(1)];
    AlgebroidChart::new(v.clone(), fields, empty_structure(&v, 2), darboux_pairs(&v, 1), None)
        .expect("foliation chart")
        .with_catalogue(Catalogue::Foliation)
}

/// Fields on ℝ² tangent to `z₁ = 0`: frame `z₁∂_{z₁}, ∂_{z₂}`, `ω = e¹∧e²`,
/// so `{z₁, z₂} = z₁`.
pub fn b_symplectic() -> AlgebroidChart {
    let v = vars(&["z1", "z2"]);
    let z1 = MultiPoly::var_index(v.clone(), 0);
    let fields = vec![
        vec![z1, MultiPoly::zero(v.clone())],
        vec![MultiPoly::zero(v.clone()), MultiPoly::one(v.clone())],
    ];
    AlgebroidChart::new(v.clone(), fields, empty_structure(&v, 2), darboux_pairs(&v, 1), None)
        .expect("b-symplectic chart")
        .with_catalogue(Catalogue::BSymplectic)
}

/// The mixed model with `k` log blocks, `l` semi-log blocks and `m`
/// symplectic blocks; frame pairs `(D_j, E_j)` as in the closed-form
/// product, abelian bracket and `ω = Σ e^{2j-1}∧e^{2j}`.
pub fn mixed(k: usize, l: usize, m: usize) -> Result<AlgebroidChart> {
    let n = k + l + m;
    if n == 0 {
        return Err(Error::InvalidChart("mixed model needs at least one block".into()));
    }
    let mut names: Vec<String> = (1..=2 * k).map(|i| format!("z{i}")).collect();
    names.extend((1..=l).map(|i| format!("y{i}")));
    names.extend((1..=l).map(|i| format!("eta{i}")));
    names.extend((1..=m).map(|i| format!("x{i}")));
    names.extend((1..=m).map(|i| format!("xi{i}")));
    let v = vars(&names);
    let dim = names.len();
    let zero = MultiPoly::zero(v.clone());
    let euler = |a: usize| {
        let mut f = vec![zero.clone(); dim];
        f[a] = MultiPoly::var_index(v.clone(), a);
        f
    };
    let coord = |a: usize| {
        let mut f = vec![zero.clone(); dim];
        f[a] = MultiPoly::one(v.clone());
        f
    };
    let mut fields = Vec::with_capacity(2 * n);
    for i in 0..k {
        fields.push(euler(i));
        fields.push(euler(i + k));
    }
    for i in 0..l {
        fields.push(euler(2 * k + i));
        fields.push(coord(2 * k + l + i));
    }
    for i in 0..m {
        fields.push(coord(2 * k + 2 * l + i));
        fields.push(coord(2 * k + 2 * l + m + i));
    }
    Ok(AlgebroidChart::new(v.clone(), fields, empty_structure(&v, 2 * n), darboux_pairs(&v, n), None)?
        .with_catalogue(Catalogue::Mixed { k, l, m }))
}

/// Looks up a catalogue entry by name; `params` supplies `n` or `k, l, m`.
pub fn catalogue(name: &str, params: &[usize]) -> Result<AlgebroidChart> {
    let get = |i: usize, d: usize| params.get(i).copied().unwrap_or(d);
    match name {
        "standard" => {
            let n = get(0, 1);
            if n == 0 {
                return Err(Error::InvalidChart("n must be positive".into()));
            }
            Ok(standard(n))
        }
        "zero_anchor" => Ok(zero_anchor()),
        "foliation" => Ok(foliation()),
        "b_symplectic" => Ok(b_symplectic()),
        "mixed" => mixed(get(0, 1), get(1, 0), get(2, 0)),
        other => Err(Error::UnknownCatalogue(other.to_string())),
    }
}

/// Every catalogue entry used by the verification suites.
pub fn catalogue_all() -> Vec<(String, AlgebroidChart)> {
    vec![
        ("standard".into(), standard(1)),
        ("zero_anchor".into(), zero_anchor()),
        ("foliation".into(), foliation()),
        ("b_symplectic".into(), b_symplectic()),
        ("mixed(1,1,1)".into(), mixed(1, 1, 1).expect("valid")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &AlgebroidChart, s: &str) -> MultiPoly {
        parse_poly(s, c.base_vars()).unwrap()
    }

    #[test]
    fn catalogue_validates() {
        for (name, c) in catalogue_all() {
            assert!(c.validate().all_pass(), "{name}: {:?}", c.validate());
        }
        assert!(mixed(1, 0, 0).unwrap().validate().all_pass());
        assert!(standard(2).validate().all_pass());
        assert!(matches!(catalogue("nope", &[]), Err(Error::UnknownCatalogue(_))));
    }

    #[test]
    fn perturbed_zero_anchor_breaks_jacobi() {
        let c = zero_anchor();
        let one = MultiPoly::one(c.base_vars().clone());
        let bad = c.with_structure(0, 1, 0, one);
        let rep = bad.validate();
        let j = rep.check("jacobi").unwrap();
        assert!(!j.pass);
        assert_eq!(j.witness, Some(vec![1, 2, 3]));
    }

    #[test]
    fn d_of_functions_and_closed_forms() {
        let c = standard(1);
        let f = Form::scalar(2, p(&c, "x1*xi1"), c.zero_poly());
        let df = c.d(&f).unwrap();
        assert_eq!(df.get(0b01), p(&c, "xi1"));
        assert_eq!(df.get(0b10), p(&c, "x1"));
        let mut a = Form::zero(2, 1, c.zero_poly()).unwrap();
        a.set(0b01, p(&c, "x1"));
        assert!(c.d(&a).unwrap().is_zero());
        let two = c.omega_form();
        assert!(matches!(c.d(&two), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn brackets_and_hamiltonians() {
        let c = standard(2);
        assert_eq!(c.poisson_bracket(&p(&c, "x1"), &p(&c, "xi1")).unwrap(), p(&c, "1"));
        assert!(c.poisson_bracket(&p(&c, "x1"), &p(&c, "xi2")).unwrap().is_zero());
        let s = standard(1);
        let (_, h) = s.hamiltonian_field(&p(&s, "x1")).unwrap();
        assert_eq!(h, vec![p(&s, "0"), p(&s, "1")]);
        let (x, h) = s.hamiltonian_field(&p(&s, "5")).unwrap();
        assert!(x.iter().chain(h.iter()).all(|q| q.is_zero()));

        let log = mixed(1, 0, 0).unwrap();
        assert_eq!(log.poisson_bracket(&p(&log, "z1"), &p(&log, "z2")).unwrap(), p(&log, "z1*z2"));
        let (_, h) = log.hamiltonian_field(&p(&log, "z2")).unwrap();
        assert_eq!(h, vec![p(&log, "-z1*z2"), p(&log, "0")]);

        let b = b_symplectic();
        assert_eq!(b.poisson_bracket(&p(&b, "z1"), &p(&b, "z2")).unwrap(), p(&b, "z1"));
    }

    #[test]
    fn nonconstant_omega_inverse() {
        let v = vars(&["x", "xi"]);
        let one = MultiPoly::one(v.clone());
        let z = MultiPoly::zero(v.clone());
        let w = parse_poly("1 + x", &v).unwrap();
        let omega = vec![vec![z.clone(), w.clone()], vec![-&w, z.clone()]];
        let fields = vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]];
        let c = AlgebroidChart::new(v.clone(), fields, empty_structure(&v, 2), omega, Some(6)).unwrap();
        assert!(!c.is_darboux());
        let inv = c.omega_inverse().unwrap();
        // (1+x)·(1 - x + x² - …) = 1 + O(x⁷)
        let prod = (&w * &inv[1][0]).truncate_degree(6);
        assert_eq!(prod, one);
    }

    #[test]
    fn primitives() {
        let c = standard(1);
        let two = c.omega_form();
        let a = c.solve_primitive(&two, 1).unwrap().unwrap();
        assert_eq!(c.d(&a).unwrap(), two);
        let z = zero_anchor();
        let mut beta = Form::zero(4, 2, z.zero_poly()).unwrap();
        beta.set(0b0011, MultiPoly::one(z.base_vars().clone()));
        assert!(z.d(&beta).unwrap().is_zero());
        assert!(z.solve_primitive(&beta, 2).unwrap().is_none());
    }

    #[test]
    fn json_roundtrip() {
        let c = mixed(1, 1, 0).unwrap();
        let text = serde_json::to_string(&c.to_json_value()).unwrap();
        let back = AlgebroidChart::from_json(&text).unwrap();
        assert_eq!(back.to_json_value().anchor, c.to_json_value().anchor);
        let mut broken = c.to_json_value();
        broken.anchor[0][0] = "z1 +".into();
        assert!(matches!(AlgebroidChart::from_json_value(&broken), Err(Error::Parse { .. })));
    }

    #[test]
    fn model_product_examples() {
        let c = mixed(1, 0, 0).unwrap();
        let s = c.weyl_model_product(&p(&c, "z1"), &p(&c, "z2"), 3).unwrap();
        let mut expect = HbarSeries::zero(c.base_vars().clone(), 3);
        let mut fact = Q::one();
        for k in 0..=3 {
            if k > 0 {
                fact = &fact * &Q::ratio(1, k);
            }
            let coef = &Q::complex((0, 1), (1, 2)).pow(k as u32) * &fact;
            expect.add_poly(k as i32, &p(&c, "z1*z2").scale(&coef)).unwrap();
        }
        assert_eq!(s, expect);
        let f = p(&c, "z1^2*z2 + 3");
        assert_eq!(c.weyl_model_product(&f, &p(&c, "1"), 3).unwrap(), HbarSeries::from_poly(f, 3));
        assert!(zero_anchor().weyl_model_product(&p(&zero_anchor(), "t"), &p(&zero_anchor(), "t"), 2).is_err());
    }
}
