//! Trigonometric polynomials on the torus `T^{2n}` with the Moyal product
//! on exponentials, and the trace `(iħ)^{-n}/n! ∫ f ω^n` reduced to the
//! constant mode.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::poly::{vars, MultiPoly, Vars};
use crate::scalar::GaussianRational as Q;
use crate::series::HbarSeries;
use crate::text::format_series;

/// Frequencies are ordered `(k_{x₁}, k_{ξ₁}, k_{x₂}, …)`.
pub type Frequency = Vec<i32>;

#[derive(Clone, Debug, PartialEq)]
pub struct FourierPoly {
    n: usize,
    trunc: i32,
    terms: BTreeMap<Frequency, HbarSeries>,
}

fn no_vars() -> Vars {
    vars::<&str>(&[])
}

fn constant_series(k: i32, c: Q, trunc: i32) -> HbarSeries {
    HbarSeries::term(k, MultiPoly::constant(no_vars(), c), trunc).expect("k ≥ -1")
}

impl FourierPoly {
    pub fn zero(n: usize, trunc: i32) -> Self {
        FourierPoly {
            n,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, trunc: i32) -> Self {
        Self::mode(n, trunc, vec![0; 2 * n], Q::one())
    }

    /// `c · e^{i k·z}`.
    pub fn mode(n: usize, trunc: i32, k: Frequency, c: Q) -> Self {
        let mut f = Self::zero(n, trunc);
        f.add_mode(k, &constant_series(0, c, trunc));
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<Frequency, HbarSeries> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &[i32]) -> HbarSeries {
        self.terms
            .get(k)
            .cloned()
            .unwrap_or_else(|| HbarSeries::zero(no_vars(), self.trunc))
    }

    pub fn add_mode(&mut self, k: Frequency, c: &HbarSeries) {
        assert_eq!(k.len(), 2 * self.n, "frequency length");
        let e = self
            .terms
            .entry(k.clone())
            .or_insert_with(|| HbarSeries::zero(no_vars(), self.trunc));
        *e = e.try_add(c).expect("no variables").truncate(self.trunc);
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn check(&self, other: &FourierPoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Precondition("Fourier polynomials on tori of different dimension".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FourierPoly) -> Result<FourierPoly> {
        self.check(other)?;
        let mut out = self.clone();
        out.trunc = self.trunc.min(other.trunc);
        for (k, c) in other.terms.iter() {
            out.add_mode(k.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &FourierPoly) -> Result<FourierPoly> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> FourierPoly {
        FourierPoly {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
            ..self.clone()
        }
    }
}

/// `σ(k,l) = Σ_i k_{ξ_i} l_{x_i} − k_{x_i} l_{ξ_i}`.
pub fn sigma(k: &[i32], l: &[i32]) -> i64 {
    (0..k.len() / 2)
        .map(|i| k[2 * i + 1] as i64 * l[2 * i] as i64 - k[2 * i] as i64 * l[2 * i + 1] as i64)
        .sum()
}

/// `Σ_m (iħσ/2)^m / m!` through `ħ^trunc`.
fn phase(s: i64, trunc: i32) -> HbarSeries {
    let mut out = HbarSeries::zero(no_vars(), trunc);
    let step = Q::complex((0, 1), (s, 2));
    let mut c = Q::one();
    for m in 0..=trunc.max(0) {
        if m > 0 {
            c = &(&c * &step) * &Q::ratio(1, m as i64);
        }
        out = out.try_add(&constant_series(m, c.clone(), trunc)).expect("no variables");
    }
    out
}

/// The Moyal product on exponentials: mode `k+l` receives
/// `F_k G_l exp(iħσ(k,l)/2)`.
pub fn fourier_moyal(f: &FourierPoly, g: &FourierPoly) -> Result<FourierPoly> {
    f.check(g)?;
    let trunc = f.trunc.min(g.trunc);
    let mut out = FourierPoly::zero(f.n, trunc);
    for (k, a) in f.terms.iter() {
        for (l, b) in g.terms.iter() {
            let sum: Frequency = k.iter().zip(l).map(|(x, y)| x + y).collect();
            let c = a.try_mul(b)?.try_mul(&phase(sigma(k, l), trunc))?;
            out.add_mode(sum, &c);
        }
    }
    Ok(out)
}

/// `vol · Σ_k c_k ħ^k`, allowing the exponent `−n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusTrace {
    pub coeffs: BTreeMap<i32, Q>,
}

impl TorusTrace {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for TorusTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| format!("({c})*hbar^{k}"))
            .collect();
        write!(f, "vol*({})", parts.join(" + "))
    }
}

/// `(iħ)^{-n}/n! · vol · F₀`, where `F₀` is the constant mode and `vol` the
/// (symbolic) volume of the torus.
pub fn trace_torus(f: &FourierPoly) -> TorusTrace {
    let n = f.n as i32;
    let mut fact = BigInt::one();
    for j in 1..=f.n {
        fact *= j;
    }
    let pre = &Q::i().pow(f.n as u32).inv().expect("nonzero") * &Q::from(BigRational::new(BigInt::one(), fact));
    let mut coeffs = BTreeMap::new();
    for (k, p) in f.coeff(&vec![0; 2 * f.n]).coeffs() {
        let c = &pre * &p.constant_term();
        if !c.is_zero() {
            coeffs.insert(k - n, c);
        }
    }
    TorusTrace { coeffs }
}

pub fn random_fourier<R: Rng>(rng: &mut R, n: usize, max_freq: i32, terms: usize, trunc: i32) -> FourierPoly {
    let mut f = FourierPoly::zero(n, trunc);
    for _ in 0..terms {
        let k: Frequency = (0..2 * n).map(|_| rng.gen_range(-max_freq..=max_freq)).collect();
        let c = crate::sample::random_scalar(rng);
        let h = rng.gen_range(0..=1.min(trunc.max(0)));
        f.add_mode(k, &constant_series(h, c, trunc));
    }
    f
}

pub fn format_fourier(f: &FourierPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.terms
        .iter()
        .map(|(k, c)| format!("[{}]: {}", k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","), format_series(c)))
        .collect::<Vec<_>>()
        .join("; ")
}
