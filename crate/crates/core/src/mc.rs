//! Maurer–Cartan elements, deformed operations and the gauge flow.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::coeff::{Monomial, RingSpec};
use crate::error::{Error, Result};
use crate::graded::{Degree, Element, GradedBasis};
use crate::linf::LInfStructure;
use crate::rational::{inv_factorial, Rational};
use crate::tau::{tau_extend, TauElement};

fn check_positive(x: &Element, what: &str) -> Result<()> {
    match x.filtration_weight() {
        Some(w) if w < 1 => Err(Error::Filtration(format!("{what} has a term of word length {w}, outside Q_{{>=1}}"))),
        _ => Ok(()),
    }
}

fn check_degree(x: &Element, l: &LInfStructure, want: i64, what: &str) -> Result<()> {
    match x.degree_of(l.basis(), l.spec())? {
        Some(d) if d != Degree::integer(want) => {
            Err(Error::Degree(format!("{what} has degree {d}, expected {}", Degree::integer(want))))
        }
        _ => Ok(()),
    }
}

/// ℓ^d(β, …, β) with d copies.
fn power_apply(l: &LInfStructure, beta: &Element, d: usize, rest: &[&Element]) -> Result<Element> {
    let mut args: Vec<&Element> = vec![beta; d];
    args.extend_from_slice(rest);
    l.apply(&args)
}

/// ℱ(β) = Σ_{d ≥ 1} (1/d!) ℓ^d(β, …, β) modulo Q_{≥K}. The d-fold term lies
/// in Q_{≥d}, so the sum stops at d = K − 1.
pub fn curvature(beta: &Element, l: &LInfStructure, k: i64) -> Result<Element> {
    check_positive(beta, "beta")?;
    check_degree(beta, l, 2, "beta")?;
    let beta = beta.truncate(k);
    let mut out = Element::zero(l.nvars()).with_order(Some(k));
    let top = usize::try_from(k - 1).unwrap_or(0).min(l.max_arity());
    for d in 1..=top {
        out.add_assign(&power_apply(l, &beta, d, &[])?.scale(&inv_factorial(d)));
    }
    Ok(out.truncate(k))
}

/// Whether ℱ(β) ≡ 0 modulo Q_{≥K}, with the residual.
pub fn is_mc(beta: &Element, l: &LInfStructure, k: i64) -> Result<(bool, Element)> {
    let r = curvature(beta, l, k)?;
    Ok((r.is_zero(), r))
}

/// ℓ_β^d(x₁, …, x_d) = Σ_k (1/k!) ℓ^{k+d}(β^k, x₁, …, x_d) on basis inputs,
/// for d ≤ `up_to`, exact modulo Q_{≥K}.
pub fn deform(l: &LInfStructure, beta: &Element, k: i64, up_to: usize) -> Result<LInfStructure> {
    check_positive(beta, "beta")?;
    check_degree(beta, l, 2, "beta")?;
    let beta = beta.truncate(k);
    let up_to = up_to.min(l.max_arity());
    let mut out = LInfStructure::new(l.spec().clone(), l.basis().clone(), up_to).with_order(Some(k));
    let n = l.basis().len();
    for d in 1..=up_to {
        let mut idx = vec![0usize; d];
        loop {
            let gens: Vec<Element> = idx.iter().map(|&g| Element::generator(l.nvars(), g)).collect();
            let refs: Vec<&Element> = gens.iter().collect();
            let mut total = Element::zero(l.nvars()).with_order(Some(k));
            let mut j = 0usize;
            while j + d <= l.max_arity() && (j as i64) < k {
                total.add_assign(&power_apply(l, &beta, j, &refs)?.scale(&inv_factorial(j)));
                j += 1;
            }
            out.insert_indices(idx.clone(), total)?;
            let Some(p) = (0..d).rev().find(|&p| idx[p] + 1 < n) else { break };
            let v = idx[p] + 1;
            for q in p..d {
                idx[q] = v;
            }
        }
    }
    Ok(out)
}

/// A τ-polynomial path c_τ with gauge term γ_τ, both modulo Q_{≥K} and τ^{T+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauPath {
    /// c[i] is the coefficient of τ^i.
    pub c: Vec<Element>,
    pub gamma: Vec<Element>,
    pub k: i64,
    pub t: usize,
}

impl TauPath {
    pub fn eval(&self, at: &Rational) -> Element {
        let nvars = self.c[0].nvars();
        TauElement::polynomial(&self.c, nvars).eval(at).truncate(self.k)
    }

    /// α_τ = c_τ + γ_τ dτ.
    pub fn alpha(&self) -> TauElement {
        let nvars = self.c[0].nvars();
        let mut a = TauElement::polynomial(&self.c, nvars);
        for (i, g) in self.gamma.iter().enumerate() {
            a.add_part(i, true, g);
        }
        a
    }

    /// Whether every c_i lies in Q_{≥i}.
    pub fn filtration_gain(&self) -> bool {
        self.c.iter().enumerate().all(|(i, x)| x.filtration_weight().is_none_or(|w| w >= i as i64))
    }

    /// The part of c_τ on generators selected by `keep`, per τ-power.
    pub fn restrict<F: Fn(usize) -> bool + Copy>(&self, keep: F) -> Vec<Element> {
        self.c.iter().map(|x| x.restrict(keep)).collect()
    }
}

/// [τ^power] ℓ^d(p₁(τ), …, p_d(τ)) for τ-polynomials p_k.
fn tau_coefficient(l: &LInfStructure, polys: &[&[Element]], power: usize) -> Result<Element> {
    let d = polys.len();
    let mut out = Element::zero(l.nvars());
    let mut parts = vec![0usize; d];
    fn rec(
        l: &LInfStructure,
        polys: &[&[Element]],
        slot: usize,
        left: usize,
        parts: &mut Vec<usize>,
        out: &mut Element,
    ) -> Result<()> {
        let d = polys.len();
        if slot + 1 == d {
            if left >= polys[slot].len() || polys[slot][left].is_zero() {
                return Ok(());
            }
            parts[slot] = left;
            let args: Vec<&Element> = (0..d).map(|s| &polys[s][parts[s]]).collect();
            out.add_assign(&l.apply(&args)?);
            return Ok(());
        }
        for i in 0..=left.min(polys[slot].len().saturating_sub(1)) {
            if polys[slot].is_empty() || polys[slot][i].is_zero() {
                continue;
            }
            parts[slot] = i;
            rec(l, polys, slot + 1, left - i, parts, out)?;
        }
        Ok(())
    }
    if d > 0 {
        rec(l, polys, 0, power, &mut parts, &mut out)?;
    }
    Ok(out)
}

/// dc/dτ = −Σ_{d ≥ 0} (1/d!) ℓ^{1+d}(γ_τ, c_τ, …, c_τ), c₀ = α₀, solved
/// order by order: c_{i+1} = −[τ^i](right side)/(i + 1).
pub fn gauge_flow(l: &LInfStructure, alpha0: &Element, gamma: &[Element], k: i64, t: usize) -> Result<TauPath> {
    check_positive(alpha0, "alpha0")?;
    check_degree(alpha0, l, 2, "alpha0")?;
    for g in gamma {
        check_positive(g, "gamma")?;
        check_degree(g, l, 1, "gamma")?;
    }
    let nvars = l.nvars();
    let mut gamma: Vec<Element> = gamma.iter().map(|g| g.truncate(k)).collect();
    gamma.resize(t + 1, Element::zero(nvars));
    let mut c = vec![alpha0.truncate(k)];
    for i in 0..t {
        let mut rhs = Element::zero(nvars).with_order(Some(k));
        let mut d = 0usize;
        // ℓ^{1+d}(γ, c^d) lies in Q_{≥1+d}
        while d < l.max_arity() && (d as i64) + 1 < k {
            let mut polys: Vec<&[Element]> = vec![&gamma[..=i]];
            polys.extend(core::iter::repeat_n(&c[..], d));
            rhs.add_assign(&tau_coefficient(l, &polys, i)?.scale(&inv_factorial(d)));
            d += 1;
        }
        let next = rhs.scale(&-Rational::from_integer((i as i64 + 1).into()).recip()).truncate(k);
        c.push(next);
    }
    Ok(TauPath { c, gamma, k, t })
}

/// [τ^i] ℱ(c_τ) for i ≤ T.
pub fn path_curvature(l: &LInfStructure, path: &TauPath) -> Result<Vec<Element>> {
    let top = usize::try_from(path.k - 1).unwrap_or(0).min(l.max_arity());
    let mut out = Vec::with_capacity(path.t + 1);
    for i in 0..=path.t {
        let mut acc = Element::zero(l.nvars()).with_order(Some(path.k));
        for d in 1..=top {
            let polys: Vec<&[Element]> = vec![&path.c[..]; d];
            acc.add_assign(&tau_coefficient(l, &polys, i)?.scale(&inv_factorial(d)));
        }
        out.push(acc.truncate(path.k));
    }
    Ok(out)
}

/// Curvature of α_τ = c_τ + γ_τ dτ in 𝔤_τ, truncated at τ^T and Q_{≥K}.
pub fn tau_curvature(l: &LInfStructure, path: &TauPath) -> Result<TauElement> {
    let tl = tau_extend(l, path.t);
    let alpha = path.alpha();
    let top = usize::try_from(path.k - 1).unwrap_or(0).min(l.max_arity());
    let mut out = TauElement::zero(l.nvars());
    for d in 1..=top {
        let args = vec![&alpha; d];
        out = out.add(&tl.apply(&args)?.scale(&inv_factorial(d)));
    }
    Ok(out.truncate(path.k))
}

/// α₀ = Σ_j q_j·x^{D_j}.
pub fn tautological_mc(spec: &RingSpec, basis: &GradedBasis) -> Result<Element> {
    let mut out = Element::zero(spec.n());
    for j in 0..spec.n() {
        let g = basis
            .formal_index(j)
            .ok_or_else(|| Error::Model(format!("no formal generator for divisor component {}", j + 1)))?;
        out.add_term(g, Monomial::var(spec.n(), j), Rational::one());
    }
    Ok(out)
}

/// The gauge term −Σ_j q_j·t.x^{D_j}, constant in τ.
pub fn divisor_gamma(spec: &RingSpec, basis: &GradedBasis) -> Result<Element> {
    let mut out = Element::zero(spec.n());
    for j in 0..spec.n() {
        let x = basis
            .formal_index(j)
            .ok_or_else(|| Error::Model(format!("no formal generator for divisor component {}", j + 1)))?;
        let tx = basis
            .t_partner(x)
            .ok_or_else(|| Error::Model(format!("formal generator `{}` has no t-decoration", basis.get(x).id)))?;
        out.add_term(tx, Monomial::var(spec.n(), j), -Rational::one());
    }
    Ok(out)
}

/// Flow from α₀ with γ_τ = −Σ q_j·t.x^{D_j}; returns the path and α₁ = c_τ|_{τ=1}.
pub fn divisor_flow(l: &LInfStructure, k: i64, t: usize) -> Result<(TauPath, Element)> {
    if let Some(v) = l.check_formal_vanishing().into_iter().next() {
        return Err(Error::Model(format!("constant on {:?}: {}", v.inputs, v.detail)));
    }
    let alpha0 = tautological_mc(l.spec(), l.basis())?;
    let gamma = divisor_gamma(l.spec(), l.basis())?;
    let path = gauge_flow(l, &alpha0, &[gamma], k, t)?;
    let alpha1 = path.eval(&Rational::one());
    Ok((path, alpha1))
}

/// Weight-zero part of c_τ: its terms on formal generators.
pub fn weight_zero_part(l: &LInfStructure, path: &TauPath) -> Vec<Element> {
    let basis = l.basis();
    path.restrict(|g| basis.get(g).is_formal())
}
