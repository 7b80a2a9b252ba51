//! The extension 𝔤_τ = 𝔤 ⊗ 𝕜[τ, dτ], truncated at τ^T.
//!
//! ℓ̄^d(x₁⊗θ₁, …, x_d⊗θ_d) = (−1)^† ℓ^d(x₁, …, x_d) ⊗ θ₁⋯θ_d with
//! † = Σ_{k<l} |x_k||θ_l|, plus (−1)^{|x|} x ⊗ dθ when d = 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::complex::{CGen, CochainComplex};
use crate::error::Result;
use crate::graded::Element;
use crate::linf::LInfStructure;
use crate::rational::{sign, Rational};

/// Σ x_{i} ⊗ τ^i + Σ y_{i} ⊗ τ^i dτ. Keys are (power of τ, has dτ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauElement {
    nvars: usize,
    parts: BTreeMap<(usize, bool), Element>,
    /// Set when a product reached past the truncation and was dropped.
    pub overflow: bool,
}

impl TauElement {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, parts: BTreeMap::new(), overflow: false }
    }

    /// x ⊗ τ^power (⊗ dτ when `dtau`).
    pub fn pure(x: Element, power: usize, dtau: bool) -> Self {
        let mut t = Self::zero(x.nvars());
        t.add_part(power, dtau, &x);
        t
    }

    /// x ⊗ 1.
    pub fn constant(x: Element) -> Self {
        Self::pure(x, 0, false)
    }

    /// Σ_i coeffs[i] ⊗ τ^i.
    pub fn polynomial(coeffs: &[Element], nvars: usize) -> Self {
        let mut t = Self::zero(nvars);
        for (i, x) in coeffs.iter().enumerate() {
            t.add_part(i, false, x);
        }
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, bool, &Element)> {
        self.parts.iter().map(|((p, dt), x)| (*p, *dt, x))
    }

    pub fn component(&self, power: usize, dtau: bool) -> Element {
        self.parts.get(&(power, dtau)).cloned().unwrap_or_else(|| Element::zero(self.nvars))
    }

    pub fn add_part(&mut self, power: usize, dtau: bool, x: &Element) {
        let sum = match self.parts.remove(&(power, dtau)) {
            Some(old) => old.add(x),
            None => x.clone(),
        };
        if !sum.is_zero() {
            self.parts.insert((power, dtau), sum);
        }
    }

    pub fn add(&self, other: &TauElement) -> TauElement {
        let mut out = self.clone();
        for ((p, dt), x) in &other.parts {
            out.add_part(*p, *dt, x);
        }
        out.overflow |= other.overflow;
        out
    }

    pub fn scale(&self, c: &Rational) -> TauElement {
        let mut out = TauElement::zero(self.nvars);
        for ((p, dt), x) in &self.parts {
            out.add_part(*p, *dt, &x.scale(c));
        }
        out.overflow = self.overflow;
        out
    }

    pub fn truncate(&self, k: i64) -> TauElement {
        let mut out = TauElement::zero(self.nvars);
        for ((p, dt), x) in &self.parts {
            out.add_part(*p, *dt, &x.truncate(k));
        }
        out.overflow = self.overflow;
        out
    }

    /// ev_c: τ ↦ c, dτ ↦ 0.
    pub fn eval(&self, c: &Rational) -> Element {
        let mut out = Element::zero(self.nvars);
        for ((p, dt), x) in &self.parts {
            if !*dt {
                out.add_assign(&x.scale(&num_traits::pow(c.clone(), *p)));
            }
        }
        out
    }
}

/// ℓ̄ on 𝔤_τ truncated at τ^T.
#[derive(Clone, Debug)]
pub struct TauStructure<'a> {
    pub base: &'a LInfStructure,
    pub t: usize,
}

pub fn tau_extend(base: &LInfStructure, t: usize) -> TauStructure<'_> {
    TauStructure { base, t }
}

/// One homogeneous slice of an input: x of a single parity tensored with θ.
struct Slice {
    x: Element,
    parity: u8,
    power: usize,
    dtau: bool,
}

impl TauStructure<'_> {
    fn fits(&self, power: usize, dtau: bool) -> bool {
        if dtau {
            power < self.t
        } else {
            power <= self.t
        }
    }

    fn slices(&self, x: &TauElement) -> Vec<Slice> {
        let mut out = Vec::new();
        for (power, dtau, e) in x.parts() {
            for (parity, part) in e.parity_parts(self.base.basis()).into_iter().enumerate() {
                if !part.is_zero() {
                    out.push(Slice { x: part, parity: parity as u8, power, dtau });
                }
            }
        }
        out
    }

    /// ℓ̄^d(x₁, …, x_d).
    pub fn apply(&self, inputs: &[&TauElement]) -> Result<TauElement> {
        let nvars = self.base.nvars();
        let mut out = TauElement::zero(nvars);
        let d = inputs.len();
        if d == 0 {
            return Ok(out);
        }
        let slices: Vec<Vec<Slice>> = inputs.iter().map(|x| self.slices(x)).collect();
        if slices.iter().any(|s| s.is_empty()) {
            return Ok(out);
        }
        let mut idx = alloc::vec![0usize; d];
        loop {
            let chosen: Vec<&Slice> = idx.iter().enumerate().map(|(k, &i)| &slices[k][i]).collect();
            let dts = chosen.iter().filter(|s| s.dtau).count();
            if dts <= 1 {
                let power: usize = chosen.iter().map(|s| s.power).sum();
                if self.fits(power, dts == 1) {
                    let mut dagger = 0u8;
                    for k in 0..d {
                        for l in k + 1..d {
                            dagger ^= chosen[k].parity & u8::from(chosen[l].dtau);
                        }
                    }
                    let args: Vec<&Element> = chosen.iter().map(|s| &s.x).collect();
                    let y = self.base.apply(&args)?;
                    out.add_part(power, dts == 1, &y.scale(&sign(dagger)));
                } else {
                    out.overflow = true;
                }
            }
            let mut slot = d;
            let done = loop {
                if slot == 0 {
                    break true;
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < slices[slot].len() {
                    break false;
                }
                idx[slot] = 0;
            };
            if done {
                break;
            }
        }
        if d == 1 {
            // the dτ-derivative term
            for s in &slices[0] {
                if !s.dtau && s.power > 0 {
                    let c = sign(s.parity) * Rational::from_integer(s.power.into());
                    out.add_part(s.power - 1, true, &s.x.scale(&c));
                }
            }
        }
        Ok(out)
    }

    /// Basis of 𝔤_τ as (generator, power, dτ) triples.
    pub fn basis(&self) -> Vec<(usize, usize, bool)> {
        let n = self.base.basis().len();
        let mut out = Vec::new();
        for g in 0..n {
            for p in 0..=self.t {
                out.push((g, p, false));
            }
            for p in 0..self.t {
                out.push((g, p, true));
            }
        }
        out
    }

    /// (𝔤_τ, ℓ̄¹) as a complex over R. ℓ¹ must square to zero on the base.
    pub fn complex(&self) -> Result<CochainComplex> {
        let basis = self.basis();
        let b = self.base.basis();
        let index: BTreeMap<(usize, usize, bool), usize> = basis.iter().enumerate().map(|(k, key)| (*key, k)).collect();
        let gens = basis
            .iter()
            .map(|&(g, p, dt)| {
                let x = b.get(g);
                let id = match (p, dt) {
                    (0, false) => x.id.clone(),
                    (_, false) => format!("{}*tau^{p}", x.id),
                    (0, true) => format!("{}*dtau", x.id),
                    (_, true) => format!("{}*tau^{p}*dtau", x.id),
                };
                CGen::new(&id, if dt { x.degree.shift(1) } else { x.degree.clone() })
            })
            .collect();
        let mut c = CochainComplex::over_r(self.base.spec().clone(), gens);
        for (k, &(g, p, dt)) in basis.iter().enumerate() {
            let x = TauElement::pure(Element::generator(self.base.nvars(), g), p, dt);
            let y = self.apply(&[&x])?;
            for (q, dq, e) in y.parts() {
                for target in e.support() {
                    c.add_entry(k, index[&(target, q, dq)], e.coefficient_of(target).localize())?;
                }
            }
        }
        Ok(c)
    }
}

/// The base complex (𝔤, ℓ¹) over R on the whole basis.
pub fn base_complex(l: &LInfStructure) -> Result<CochainComplex> {
    let all: Vec<usize> = (0..l.basis().len()).collect();
    crate::complex::linf_complex(l, &all)
}
