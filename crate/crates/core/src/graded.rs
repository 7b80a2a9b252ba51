//! Graded generator bases and elements of 𝔤 ⊗̂ R.
//!
//! Degrees live in ℚ ⊕ ℤ/2. Signs (−1)^{|x|} always read the ℤ/2 part.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::coeff::{Mode, Monomial, NovikovPolynomial, RingSpec};
use crate::error::{Error, Result};
use crate::rational::{integer_parity, show, Rational};

/// (ℚ ⊕ ℤ/2)-degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree {
    pub qpart: Rational,
    pub parity: u8,
}

impl Degree {
    pub fn new(qpart: Rational, parity: u8) -> Self {
        Self { qpart, parity: parity & 1 }
    }

    pub fn integer(n: i64) -> Self {
        Self::new(Rational::from_integer(n.into()), (n.rem_euclid(2)) as u8)
    }

    /// Shift by an integer `k` (qpart + k, parity + k).
    pub fn shift(&self, k: i64) -> Self {
        Self::new(&self.qpart + Rational::from_integer(k.into()), self.parity ^ (k.rem_euclid(2) as u8))
    }

    /// Shift the qpart by an even-parity amount (a q-monomial degree).
    pub fn shift_even(&self, q: &Rational) -> Self {
        Self::new(&self.qpart + q, self.parity)
    }

    /// qpart is an integer of the matching parity.
    pub fn is_consistent(&self) -> bool {
        integer_parity(&self.qpart).is_none_or(|p| p == self.parity)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", show(&self.qpart), self.parity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GenKind {
    Orbit,
    /// Label x^{D_j} of divisor component j (0-based).
    FormalDivisor(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: Degree,
    pub kind: GenKind,
    /// Hamiltonian weight n_x.
    pub level: u32,
    pub action: Rational,
    pub t_exp: u8,
}

impl Generator {
    pub fn orbit(id: &str, degree: Degree, level: u32, action: Rational) -> Self {
        Self { id: id.into(), degree, kind: GenKind::Orbit, level, action, t_exp: 0 }
    }

    /// The formal generator x^{D_j}: degree 2 − λ_j, parity 0, action −κλ_j, level 0.
    pub fn formal(id: &str, j: usize, spec: &RingSpec) -> Self {
        let two = Rational::from_integer(2.into());
        Self {
            id: id.into(),
            degree: Degree::new(&two - &spec.lambda()[j], 0),
            kind: GenKind::FormalDivisor(j),
            level: 0,
            action: -(spec.kappa() * &spec.lambda()[j]),
            t_exp: 0,
        }
    }

    /// t·x for an untagged generator x: id `t.<id>`, degree shifted by −1.
    pub fn t_decorated(&self) -> Self {
        Self { id: format!("t.{}", self.id), degree: self.degree.shift(-1), t_exp: 1, ..self.clone() }
    }

    pub fn is_formal(&self) -> bool {
        matches!(self.kind, GenKind::FormalDivisor(_))
    }

    pub fn is_orbit(&self) -> bool {
        self.kind == GenKind::Orbit
    }

    pub fn parity(&self) -> u8 {
        self.degree.parity
    }

    /// 𝒫(x) = C·n_x + κ⁻¹A(x) − |x|.
    pub fn p_value(&self, spec: &RingSpec) -> Rational {
        self.f_value(spec) - &self.degree.qpart
    }

    /// ℱ(x) = C·n_x + κ⁻¹A(x).
    pub fn f_value(&self, spec: &RingSpec) -> Rational {
        spec.c() * Rational::from_integer(self.level.into()) + &self.action / spec.kappa()
    }
}

pub fn p_functional(x: &Generator, spec: &RingSpec) -> Rational {
    x.p_value(spec)
}

pub fn f_functional(x: &Generator, spec: &RingSpec) -> Rational {
    x.f_value(spec)
}

/// u·D^λ = Σ λ_j (u·D_j).
pub fn u_dot_dlambda(u: &[i64], spec: &RingSpec) -> Result<Rational> {
    Monomial::new(u.to_vec()).qdegree(spec)
}

/// |γ|_SH = |(γ,u)| + u·D^λ.
pub fn sh_index_from_cap(capped_index: &Rational, u_dot_dlambda: &Rational) -> Rational {
    capped_index + u_dot_dlambda
}

/// A^SH = A(γ,u) + κ·u·D^λ.
pub fn sh_action_from_cap(capped_action: &Rational, u_dot_dlambda: &Rational, spec: &RingSpec) -> Rational {
    capped_action + spec.kappa() * u_dot_dlambda
}

/// Generators sorted by id; the index order is the canonical input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    gens: Vec<Generator>,
    index: BTreeMap<String, usize>,
    strict_parity: bool,
}

impl GradedBasis {
    pub fn new(mut gens: Vec<Generator>, spec: &RingSpec, strict_parity: bool) -> Result<Self> {
        gens.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate generator id `{}`", g.id)));
            }
        }
        let basis = Self { gens, index, strict_parity };
        for g in &basis.gens {
            basis.validate_generator(g, spec)?;
        }
        Ok(basis)
    }

    fn validate_generator(&self, g: &Generator, spec: &RingSpec) -> Result<()> {
        if g.degree.parity > 1 || g.t_exp > 1 {
            return Err(Error::Validation(format!("generator `{}`: parity and t_exp must be 0 or 1", g.id)));
        }
        match g.kind {
            GenKind::FormalDivisor(j) => {
                if j >= spec.n() {
                    return Err(Error::Validation(format!(
                        "generator `{}` labels divisor {j}, but N = {}",
                        g.id,
                        spec.n()
                    )));
                }
                let base = Generator::formal(&g.id, j, spec);
                let expected = if g.t_exp == 1 { base.degree.shift(-1) } else { base.degree.clone() };
                if g.level != 0 || g.degree != expected || g.action != base.action {
                    return Err(Error::Validation(format!(
                        "formal generator `{}` must have level 0, degree {}, action {}",
                        g.id,
                        expected,
                        show(&base.action)
                    )));
                }
            }
            GenKind::Orbit => {
                if g.level < 1 {
                    return Err(Error::Validation(format!("orbit generator `{}` needs level >= 1", g.id)));
                }
                if self.strict_parity && !g.degree.is_consistent() {
                    return Err(Error::Validation(format!(
                        "orbit generator `{}` has degree {} with mismatched parity",
                        g.id, g.degree
                    )));
                }
            }
        }
        if g.t_exp == 1 {
            let base = self.t_base(g).ok_or_else(|| {
                Error::Validation(format!("t-decorated generator `{}` has no untagged partner", g.id))
            })?;
            let b = &self.gens[base];
            if b.t_exp != 0
                || b.kind != g.kind
                || b.level != g.level
                || b.action != g.action
                || b.degree.shift(-1) != g.degree
            {
                return Err(Error::Validation(format!(
                    "t-decorated generator `{}` is inconsistent with `{}`",
                    g.id, b.id
                )));
            }
        }
        Ok(())
    }

    fn t_base(&self, g: &Generator) -> Option<usize> {
        g.id.strip_prefix("t.").and_then(|b| self.index.get(b).copied())
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn strict_parity(&self) -> bool {
        self.strict_parity
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn get(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownGenerator(id.into()))
    }

    /// ∂_t: t.γ ↦ γ, γ ↦ 0 (as basis index).
    pub fn dt_partner(&self, i: usize) -> Option<usize> {
        let g = &self.gens[i];
        if g.t_exp == 1 {
            self.t_base(g)
        } else {
            None
        }
    }

    /// Index of t.γ for an untagged γ, if present.
    pub fn t_partner(&self, i: usize) -> Option<usize> {
        self.index.get(&format!("t.{}", self.gens[i].id)).copied()
    }

    /// Index of the untagged formal generator x^{D_j}.
    pub fn formal_index(&self, j: usize) -> Option<usize> {
        self.gens.iter().position(|g| g.kind == GenKind::FormalDivisor(j) && g.t_exp == 0)
    }
}

/// A finite combination Σ c·q^m·x with an optional Q-truncation order K:
/// when `order = Some(K)` the element is only meaningful modulo Q_{≥K}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    nvars: usize,
    terms: BTreeMap<(usize, Monomial), Rational>,
    order: Option<i64>,
}

impl Element {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new(), order: None }
    }

    pub fn generator(nvars: usize, gen: usize) -> Self {
        Self::term(nvars, gen, Monomial::one(nvars), Rational::one())
    }

    pub fn term(nvars: usize, gen: usize, m: Monomial, c: Rational) -> Self {
        let mut e = Self::zero(nvars);
        e.add_term(gen, m, c);
        e
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn with_order(mut self, order: Option<i64>) -> Self {
        if let Some(k) = order {
            self = self.truncate(k);
        }
        self
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

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, &Rational)> {
        self.terms.iter().map(|((g, m), c)| (*g, m, c))
    }

    pub fn add_term(&mut self, gen: usize, m: Monomial, c: Rational) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        if let Some(k) = self.order {
            if m.word_length() >= k {
                return;
            }
        }
        let key = (gen, m);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, gen: usize, m: &Monomial) -> Rational {
        self.terms.get(&(gen, m.clone())).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of generator `gen` as a polynomial.
    pub fn coefficient_of(&self, gen: usize) -> NovikovPolynomial {
        let items: Vec<(Monomial, Rational)> = self
            .terms
            .range((gen, Monomial::new(Vec::new()))..)
            .take_while(|((g, _), _)| *g == gen)
            .map(|((_, m), c)| (m.clone(), c.clone()))
            .collect();
        let mode = if items.iter().all(|(m, _)| m.is_nonnegative()) { Mode::Plus } else { Mode::Localized };
        NovikovPolynomial::from_terms(self.nvars, mode, items).expect("consistent monomials")
    }

    /// Generators with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.terms.keys().map(|(g, _)| *g).collect();
        s.dedup();
        s
    }

    fn merge_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let order = Self::merge_order(self.order, other.order);
        let mut out = self.clone().with_order(order);
        out.order = order;
        for ((g, m), c) in &other.terms {
            out.add_term(*g, m.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Element) {
        *self = self.add(other);
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Element {
        let mut out = Element { nvars: self.nvars, terms: BTreeMap::new(), order: self.order };
        if c.is_zero() {
            return out;
        }
        for ((g, m), x) in &self.terms {
            out.terms.insert((*g, m.clone()), x * c);
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Element {
        let mut out = Element { nvars: self.nvars, terms: BTreeMap::new(), order: self.order };
        for ((g, m), c) in &self.terms {
            out.add_term(*g, m.mul(mono), c.clone());
        }
        out
    }

    /// Quotient by Q_{≥k}; the order becomes min(order, k).
    pub fn truncate(&self, k: i64) -> Element {
        let order = Self::merge_order(self.order, Some(k));
        Element {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|((_, m), _)| m.word_length() < k)
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
            order,
        }
    }

    /// Keep only the terms on generators satisfying `keep`.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> Element {
        Element {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|((g, _), _)| keep(*g)).map(|(k, c)| (k.clone(), c.clone())).collect(),
            order: self.order,
        }
    }

    /// Equality modulo Q_{≥k}.
    pub fn eq_mod(&self, other: &Element, k: i64) -> bool {
        self.sub(other).truncate(k).is_zero()
    }

    /// Smallest word length among the terms; `None` for zero (weight +∞).
    pub fn filtration_weight(&self) -> Option<i64> {
        self.terms.keys().map(|(_, m)| m.word_length()).min()
    }

    /// The total degree when homogeneous; `Ok(None)` for zero.
    pub fn degree_of(&self, basis: &GradedBasis, spec: &RingSpec) -> Result<Option<Degree>> {
        let mut deg: Option<Degree> = None;
        for (g, m) in self.terms.keys() {
            let d = basis.get(*g).degree.shift_even(&m.qdegree(spec)?);
            match &deg {
                None => deg = Some(d),
                Some(prev) if *prev != d => {
                    return Err(Error::Degree(format!("element mixes degrees {prev} and {d}: {}", self.display(basis))))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Split into the parts supported on even and odd generators.
    pub fn parity_parts(&self, basis: &GradedBasis) -> [Element; 2] {
        [self.restrict(|g| basis.get(g).parity() == 0), self.restrict(|g| basis.get(g).parity() == 1)]
    }

    pub fn display<'a>(&'a self, basis: &'a GradedBasis) -> ElementDisplay<'a> {
        ElementDisplay { e: self, basis }
    }
}

pub struct ElementDisplay<'a> {
    e: &'a Element,
    basis: &'a GradedBasis,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((g, m), c) in &self.e.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{}*", show(&a))?;
            }
            if !m.is_one() {
                write!(f, "{m}*")?;
            }
            write!(f, "{}", self.basis.get(*g).id)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;

    fn spec(l: Rational, c: Rational) -> RingSpec {
        RingSpec::new(vec![l], int(1), c).unwrap()
    }

    #[test]
    fn formal_generator_p_is_minus_two() {
        for l in [rat(1, 2), int(1), int(2), rat(7, 3)] {
            let s = spec(l.clone(), int(3));
            let x = Generator::formal("x", 0, &s);
            assert_eq!(p_functional(&x, &s), int(-2));
            assert_eq!(f_functional(&x, &s), -l);
        }
    }

    #[test]
    fn functional_examples() {
        let s = spec(int(2), int(3));
        let z = Generator::orbit("z", Degree::integer(0), 1, int(0));
        let z0 = Generator { level: 0, ..z.clone() };
        assert_eq!(p_functional(&z0, &s), int(0));
        assert_eq!(f_functional(&z0, &s), int(0));
        let y = Generator::orbit("y", Degree::integer(1), 1, int(1));
        assert_eq!(p_functional(&y, &s), int(3));
        let w = Generator::orbit("w", Degree::integer(0), 2, int(-1));
        assert_eq!(f_functional(&w, &s), int(5));
        assert_eq!(p_functional(&y, &s), f_functional(&y, &s) - int(1));
    }

    #[test]
    fn cap_formulas() {
        let s = spec(int(1), int(0));
        assert_eq!(sh_index_from_cap(&int(0), &int(2)), int(2));
        assert_eq!(sh_index_from_cap(&int(5), &int(0)), int(5));
        assert_eq!(sh_action_from_cap(&int(1), &int(1), &s), int(2));
        assert_eq!(sh_action_from_cap(&rat(3, 2), &int(0), &s), rat(3, 2));
    }

    #[test]
    fn basis_validation() {
        let s = spec(int(2), int(3));
        let x = Generator::formal("x", 0, &s);
        let tx = x.t_decorated();
        let a = Generator::orbit("a", Degree::integer(1), 1, int(0));
        let b = GradedBasis::new(vec![tx.clone(), a.clone(), x.clone()], &s, true).unwrap();
        assert_eq!(b.get(0).id, "a");
        assert_eq!(b.dt_partner(b.index_of("t.x").unwrap()), Some(b.index_of("x").unwrap()));
        assert_eq!(b.t_partner(b.index_of("x").unwrap()), Some(b.index_of("t.x").unwrap()));

        let bad = Generator { action: int(0), ..x.clone() };
        assert!(GradedBasis::new(vec![bad], &s, true).is_err());
        let lonely = GradedBasis::new(vec![tx], &s, true);
        assert!(lonely.is_err());
        let level0 = Generator { level: 0, ..a.clone() };
        assert!(GradedBasis::new(vec![level0], &s, true).is_err());
        let odd = Generator::orbit("o", Degree::new(int(2), 1), 1, int(0));
        assert!(GradedBasis::new(vec![odd.clone()], &s, true).is_err());
        assert!(GradedBasis::new(vec![odd], &s, false).is_ok());
    }

    #[test]
    fn element_arithmetic() {
        let s = spec(int(2), int(3));
        let x = Generator::formal("x", 0, &s);
        let basis = GradedBasis::new(vec![x], &s, true).unwrap();
        let e = Element::generator(1, 0);
        assert_eq!(e.add(&Element::zero(1)), e);
        let qx = Element::term(1, 0, Monomial::var(1, 0), int(1));
        assert_eq!(qx.filtration_weight(), Some(1));
        assert_eq!(qx.degree_of(&basis, &s).unwrap(), Some(Degree::new(int(2), 0)));
        let mixed = qx.add(&e);
        assert!(mixed.degree_of(&basis, &s).is_err());
        let tr = qx.truncate(3).add(&e.truncate(2));
        assert_eq!(tr.order(), Some(2));
        assert_eq!(format!("{}", qx.scale(&rat(-1, 2)).display(&basis)), "-1/2*q*x");
    }
}
