//! Graded filtered coefficient rings.
//!
//! `R⁺ = 𝕜[q_1, …, q_N]` with `deg q_j = λ_j` and its localization
//! `R = 𝕜[q_1^{±1}, …, q_N^{±1}]`. The Q-filtration is the word-length
//! filtration: `Q_{≥p}` is spanned by monomials with `Σ e_j ≥ p`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rational_gcd, show, Rational};

/// Ring parameters: weights λ_j, monotonicity constant κ and filtration constant C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    lambda: Vec<Rational>,
    kappa: Rational,
    c: Rational,
}

impl RingSpec {
    pub fn new(lambda: Vec<Rational>, kappa: Rational, c: Rational) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Validation("RingSpec needs N >= 1".into()));
        }
        if let Some((j, l)) = lambda.iter().enumerate().find(|(_, l)| !l.is_positive()) {
            return Err(Error::Validation(format!("lambda[{j}] = {} is not positive", show(l))));
        }
        if !kappa.is_positive() {
            return Err(Error::Validation(format!("kappa = {} is not positive", show(&kappa))));
        }
        Ok(Self { lambda, kappa, c })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    /// Copy with a different filtration constant.
    pub fn with_c(&self, c: Rational) -> Self {
        Self { c, ..self.clone() }
    }

    /// λ_j ≤ 2 for all j.
    pub fn hypothesis_flag(&self) -> bool {
        let two = Rational::from_integer(2.into());
        self.lambda.iter().all(|l| *l <= two)
    }

    /// Generator of the degree lattice Σ λ_j ℤ ⊂ ℚ.
    pub fn degree_lattice(&self) -> Rational {
        rational_gcd(&self.lambda)
    }

    /// Wrapping numbers κ_i = κ·λ_i.
    pub fn wrapping(&self, i: usize) -> Rational {
        &self.kappa * &self.lambda[i]
    }
}

/// Exponent vector `q^e = q_1^{e_1} ⋯ q_N^{e_N}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<i64>);

impl Monomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        Self(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn word_length(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn qdegree(&self, spec: &RingSpec) -> Result<Rational> {
        if self.0.len() != spec.n() {
            return Err(Error::Validation(format!(
                "monomial has {} exponents, ring has N = {}",
                self.0.len(),
                spec.n()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(spec.lambda())
            .map(|(&e, l)| l * Rational::from_integer(e.into()))
            .fold(Rational::zero(), |a, b| a + b))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = if self.0.len() == 1 { alloc::string::String::from("q") } else { format!("q{}", j + 1) };
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Which coefficient ring a polynomial lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    /// R⁺: nonnegative exponents only.
    Plus,
    /// R: Laurent polynomials.
    Localized,
}

/// Finite sum of monomials with nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NovikovPolynomial {
    nvars: usize,
    mode: Mode,
    terms: BTreeMap<Monomial, Rational>,
}

impl NovikovPolynomial {
    pub fn zero(nvars: usize, mode: Mode) -> Self {
        Self { nvars, mode, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, mode: Mode, c: Rational) -> Self {
        let mut p = Self::zero(nvars, mode);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize, mode: Mode) -> Self {
        Self::constant(nvars, mode, Rational::one())
    }

    pub fn term(mode: Mode, m: Monomial, c: Rational) -> Result<Self> {
        if mode == Mode::Plus && !m.is_nonnegative() {
            return Err(Error::Localization(format!("{m}")));
        }
        let mut p = Self::zero(m.nvars(), mode);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        Ok(p)
    }

    /// Build from (monomial, coefficient) pairs, summing repeats.
    pub fn from_terms<I>(nvars: usize, mode: Mode, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(nvars, mode);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::Validation(format!("monomial {m} has {} exponents, expected {nvars}", m.nvars())));
            }
            if mode == Mode::Plus && !m.is_nonnegative() {
                return Err(Error::Localization(format!("{m}")));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn mode(&self) -> Mode {
        self.mode
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Smallest word length of a term; `None` for the zero polynomial.
    pub fn min_word_length(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::word_length).min()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::Validation(format!("polynomials over {} and {} variables", self.nvars, other.nvars)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.nvars, self.mode);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.mode);
        }
        Self { nvars: self.nvars, mode: self.mode, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<Self> {
        let out = Self {
            nvars: self.nvars,
            mode: self.mode,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        };
        if self.mode == Mode::Plus && out.terms.keys().any(|k| !k.is_nonnegative()) {
            return Err(Error::Localization(format!("{m}")));
        }
        Ok(out)
    }

    /// Drop every term of word length ≥ k (quotient by Q_{≥k}).
    pub fn truncate(&self, k: i64) -> Self {
        Self {
            nvars: self.nvars,
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.word_length() < k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// View in the localization R.
    pub fn localize(&self) -> Self {
        Self { mode: Mode::Localized, ..self.clone() }
    }

    /// The common ℚ-degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self, spec: &RingSpec) -> Result<Option<Rational>> {
        let mut deg: Option<Rational> = None;
        for m in self.terms.keys() {
            let d = m.qdegree(spec)?;
            match &deg {
                None => deg = Some(d),
                Some(prev) if *prev != d => return Err(Error::Degree(format!("polynomial {self} is not homogeneous"))),
                _ => {}
            }
        }
        Ok(deg)
    }
}

impl fmt::Display for NovikovPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", show(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", show(&a))?;
            }
        }
        Ok(())
    }
}

/// A class A ∈ H₂ recorded by its intersections A·D_j and 2c₁(A).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereClass {
    pub intersections: Vec<i64>,
    pub c1_doubled: i64,
}

impl SphereClass {
    pub fn new(intersections: Vec<i64>, c1_doubled: i64) -> Self {
        Self { intersections, c1_doubled }
    }

    /// Checks 2c₁(A) = Σ λ_j (A·D_j).
    pub fn validate(&self, spec: &RingSpec) -> Result<()> {
        let m = Monomial::new(self.intersections.clone());
        let d = m.qdegree(spec)?;
        if d != Rational::from_integer(self.c1_doubled.into()) {
            return Err(Error::Validation(format!(
                "sphere class with A·D = {:?} has Σλ_j(A·D_j) = {}, but 2c1 = {}",
                self.intersections,
                show(&d),
                self.c1_doubled
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SphereClass) -> SphereClass {
        SphereClass {
            intersections: self.intersections.iter().zip(&other.intersections).map(|(a, b)| a + b).collect(),
            c1_doubled: self.c1_doubled + other.c1_doubled,
        }
    }

    /// ω(A) = 2κ·c₁(A).
    pub fn symplectic_area(&self, spec: &RingSpec) -> Rational {
        spec.kappa() * Rational::from_integer(self.c1_doubled.into())
    }
}

/// Image of e^A under Λ^gr_ω → R, e^A ↦ q^{A·D}.
pub fn novikov_image(a: &SphereClass, spec: &RingSpec) -> Result<Monomial> {
    a.validate(spec)?;
    Ok(Monomial::new(a.intersections.clone()))
}
