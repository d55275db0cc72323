//! Seeded random inputs for verification runs, property tests and benches.

use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;

use crate::algebroid::{monomials_up_to, AlgebroidChart};
use crate::error::Result;
use crate::fedosov::{CurvatureClass, Gamma, WeylFormSection};
use crate::form::{subsets, Form};
use crate::jets::Letter;
use crate::poly::{Monomial, MultiPoly, Vars};
use crate::scalar::GaussianRational as Q;
use crate::weyl::{WKey, WeylContext, WeylElement};

/// A small nonzero Gaussian integer, occasionally with an imaginary part.
pub fn random_scalar<R: Rng>(rng: &mut R) -> Q {
    let mut re = 0;
    while re == 0 {
        re = rng.gen_range(-3..=3);
    }
    let im = if rng.gen_bool(0.2) { rng.gen_range(-2..=2) } else { 0 };
    Q::complex((re, 1), (im, 1))
}

pub fn random_monomial<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32) -> Monomial {
    let target = rng.gen_range(0..=max_deg);
    let mut e = vec![0u16; nvars];
    if nvars > 0 {
        for _ in 0..target {
            e[rng.gen_range(0..nvars)] += 1;
        }
    }
    Monomial::from_exps(&e)
}

/// Up to `max_terms` random monomials of degree `≤ max_deg`.
pub fn random_poly<R: Rng>(rng: &mut R, vars: &Vars, max_deg: u32, max_terms: usize) -> MultiPoly {
    let n = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<(Monomial, Q)> = (0..n)
        .map(|_| (random_monomial(rng, vars.len(), max_deg), random_scalar(rng)))
        .collect();
    MultiPoly::from_terms(vars.clone(), terms)
}

pub fn random_form<R: Rng>(rng: &mut R, chart: &AlgebroidChart, degree: usize, max_deg: u32) -> Result<Form<MultiPoly>> {
    let mut f = Form::zero(chart.rank(), degree, chart.zero_poly())?;
    for mask in subsets(chart.rank(), degree) {
        if rng.gen_bool(0.6) {
            f.set(mask, random_poly(rng, chart.base_vars(), max_deg, 2));
        }
    }
    Ok(f)
}

/// `(iħ)⁻¹ω + Σ_{k=1}^{max_hbar} ħ^k β_k` with each `β_k` closed: the
/// differential of a random one-form plus, when closed, a random constant
/// two-form.
pub fn random_theta<R: Rng>(rng: &mut R, chart: &AlgebroidChart, max_hbar: i32, trunc: i32) -> Result<CurvatureClass> {
    let mut theta = CurvatureClass::symplectic(chart, trunc);
    for k in 1..=max_hbar {
        let alpha = random_form(rng, chart, 1, 2)?;
        let mut beta = chart.d(&alpha)?;
        let c = random_form(rng, chart, 2, 0)?;
        let closed = chart.rank() < 3 || chart.d(&c)?.is_zero();
        if closed {
            beta = beta.try_add(&c)?;
        }
        theta = theta.with_term(k, &beta)?;
    }
    Ok(theta)
}

/// `M_i = ω⁻¹ S_i` with `S_i` symmetric, so `ωM_i` is symmetric.
pub fn random_gamma<R: Rng>(rng: &mut R, chart: &AlgebroidChart, max_deg: u32) -> Gamma {
    let r = chart.rank();
    let pi = crate::linalg::invert(&chart.omega_at_origin()).expect("nondegenerate");
    (0..r)
        .map(|_| {
            let mut s = vec![vec![chart.zero_poly(); r]; r];
            for a in 0..r {
                for b in a..r {
                    if rng.gen_bool(0.3) {
                        let p = random_poly(rng, chart.base_vars(), max_deg, 1);
                        s[a][b] = p.clone();
                        s[b][a] = p;
                    }
                }
            }
            (0..r)
                .map(|a| {
                    (0..r)
                        .map(|b| {
                            let mut acc = chart.zero_poly();
                            for c in 0..r {
                                if !pi[a][c].is_zero() {
                                    acc = &acc + &s[c][b].scale(&pi[a][c]);
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Random Weyl element with terms of Fedosov degree in `min_deg..=max_deg`
/// and ħ-exponents `≥ 0`.
pub fn random_weyl<R: Rng>(rng: &mut R, ctx: &Arc<WeylContext>, min_deg: i32, max_deg: i32, terms: usize, base_deg: u32) -> WeylElement {
    let mut w = WeylElement::zero(ctx);
    for _ in 0..terms {
        let d = rng.gen_range(min_deg..=max_deg);
        let hbar = rng.gen_range(0..=(d / 2).max(0));
        let fiber_deg = (d - 2 * hbar).max(0) as u32;
        let mut e = vec![0u16; ctx.dim()];
        for _ in 0..fiber_deg {
            e[rng.gen_range(0..ctx.dim())] += 1;
        }
        let coeff = random_poly(rng, ctx.base_vars(), base_deg, 1);
        w.add_term(
            WKey {
                fiber: Monomial::from_exps(&e),
                hbar,
            },
            &coeff,
        )
        .expect("non-negative exponent");
    }
    w
}

pub fn random_section<R: Rng>(
    rng: &mut R,
    chart: &Arc<AlgebroidChart>,
    ctx: &Arc<WeylContext>,
    degree: usize,
    max_deg: i32,
) -> Result<WeylFormSection> {
    let mut s = WeylFormSection::zero(chart, ctx, degree)?;
    for mask in subsets(chart.rank(), degree) {
        if rng.gen_bool(0.7) {
            s.set(mask, random_weyl(rng, ctx, 0, max_deg, 3, 1));
        }
    }
    Ok(s)
}

/// A random operator word with at most `max_gens` generator letters.
pub fn random_word<R: Rng>(rng: &mut R, chart: &AlgebroidChart, len: usize, max_gens: usize) -> Vec<Letter> {
    let mut gens = 0;
    (0..len)
        .map(|_| {
            if gens < max_gens && rng.gen_bool(0.6) {
                gens += 1;
                Letter::G(rng.gen_range(0..chart.rank()))
            } else {
                Letter::F(random_poly(rng, chart.base_vars(), 2, 2))
            }
        })
        .collect()
}

/// All polynomial monomials up to a degree, as polynomials.
pub fn monomial_basis(vars: &Vars, max_deg: u32) -> Vec<MultiPoly> {
    monomials_up_to(vars.len(), max_deg)
        .into_iter()
        .map(|m| MultiPoly::monomial(vars.clone(), m, Q::from_int(1)))
        .collect()
}
