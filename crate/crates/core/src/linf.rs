//! Sparse L∞ structures.
//!
//! Operations ℓ^d are odd (degree 3 − 2d) and graded symmetric. A structure
//! constant is stored once, on the input tuple sorted by generator id, and
//! evaluation on any other ordering picks up the Koszul sign of the sort.
//! The relations are
//!
//! ```text
//! Σ_{j=1..d} Σ_{s ∈ Unsh(j, d−j)} (−1)^{ε(s;x)} ℓ^{d−j+1}(ℓ^j(x_{s(0..j)}), x_{s(j..d)}) = 0.
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::coeff::{Monomial, RingSpec};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedBasis};
use crate::koszul::{act, koszul_epsilon, sorting_permutation, unshuffles};
use crate::rational::{sign, Rational};

/// 𝔤_{>a}: orbit generators with 𝒫 > a plus every formal generator and its
/// t-decoration. `threshold = None` admits the whole basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialDomain {
    pub threshold: Option<Rational>,
}

impl PartialDomain {
    pub fn above(a: Rational) -> Self {
        Self { threshold: Some(a) }
    }

    pub fn everything() -> Self {
        Self { threshold: None }
    }

    pub fn contains(&self, basis: &GradedBasis, spec: &RingSpec, i: usize) -> bool {
        let g = basis.get(i);
        match &self.threshold {
            None => true,
            Some(_) if g.is_formal() => true,
            Some(a) => g.p_value(spec) > *a,
        }
    }

    pub fn members(&self, basis: &GradedBasis, spec: &RingSpec) -> Vec<usize> {
        (0..basis.len()).filter(|&i| self.contains(basis, spec, i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    DegreeLaw,
    PLaw,
    Symmetry,
    FormalVanishing,
    DtRule,
    Domain,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::DegreeLaw => "degree law",
            ViolationKind::PLaw => "P law",
            ViolationKind::Symmetry => "graded symmetry",
            ViolationKind::FormalVanishing => "formal vanishing",
            ViolationKind::DtRule => "d_t rule",
            ViolationKind::Domain => "partial domain",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub inputs: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationViolation {
    pub inputs: Vec<usize>,
    pub residual: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub up_to_d: usize,
    pub tuples_checked: usize,
    pub exhaustive: bool,
    pub violations: Vec<RelationViolation>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Smallest arity at which a relation fails.
    pub fn first_failing_arity(&self) -> Option<usize> {
        self.violations.iter().map(|v| v.inputs.len()).min()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationOptions {
    /// Tuples per arity before switching to seeded sampling.
    pub max_tuples: usize,
    pub seed: u64,
}

impl Default for RelationOptions {
    fn default() -> Self {
        Self { max_tuples: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInfStructure {
    spec: RingSpec,
    basis: GradedBasis,
    constants: BTreeMap<Vec<usize>, Element>,
    max_arity: usize,
    order: Option<i64>,
}

impl LInfStructure {
    pub fn new(spec: RingSpec, basis: GradedBasis, max_arity: usize) -> Self {
        Self { spec, basis, constants: BTreeMap::new(), max_arity, order: None }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.spec.n()
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// Truncation order: constants are exact modulo Q_{≥K}.
    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn with_order(mut self, order: Option<i64>) -> Self {
        self.order = order;
        if let Some(k) = order {
            self.constants = core::mem::take(&mut self.constants)
                .into_iter()
                .map(|(key, e)| (key, e.truncate(k)))
                .filter(|(_, e)| !e.is_zero())
                .collect();
        }
        self
    }

    pub fn constants(&self) -> impl Iterator<Item = (&[usize], &Element)> {
        self.constants.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn num_constants(&self) -> usize {
        self.constants.len()
    }

    pub fn constant(&self, inputs: &[usize]) -> Option<&Element> {
        self.constants.get(inputs)
    }

    pub fn ids(&self, inputs: &[usize]) -> Vec<String> {
        inputs.iter().map(|&i| self.basis.get(i).id.clone()).collect()
    }

    /// Add a constant given by generator ids, which must already be in
    /// canonical (sorted) order.
    pub fn insert(&mut self, ids: &[&str], output: Element) -> Result<()> {
        let inputs = ids.iter().map(|id| self.basis.index_of(id)).collect::<Result<Vec<_>>>()?;
        if !ids.windows(2).all(|w| w[0] <= w[1]) {
            let mut sorted: Vec<&str> = ids.to_vec();
            sorted.sort_unstable();
            return Err(Error::Validation(format!(
                "inputs {:?} are not in canonical order; write them as {:?}",
                ids, sorted
            )));
        }
        self.insert_indices(inputs, output)
    }

    /// Add a constant on a sorted tuple of basis indices.
    pub fn insert_indices(&mut self, inputs: Vec<usize>, output: Element) -> Result<()> {
        let d = inputs.len();
        if d == 0 {
            return Err(Error::Validation("structure constants need at least one input".into()));
        }
        if d > self.max_arity {
            return Err(Error::Arity { requested: d, max: self.max_arity });
        }
        if !inputs.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::Validation(format!("inputs {:?} are not in canonical order", self.ids(&inputs))));
        }
        if output.nvars() != self.nvars() {
            return Err(Error::Validation("output element has the wrong number of q variables".into()));
        }
        if self.constants.contains_key(&inputs) {
            return Err(Error::Validation(format!("duplicate constant on {:?}", self.ids(&inputs))));
        }
        let output = match self.order {
            Some(k) => output.truncate(k),
            None => output,
        };
        if !output.is_zero() {
            self.constants.insert(inputs, output);
        }
        Ok(())
    }

    /// Replace (or remove, when zero) the constant on a sorted tuple.
    pub fn set_constant(&mut self, inputs: Vec<usize>, output: Element) {
        if output.is_zero() {
            self.constants.remove(&inputs);
        } else {
            self.constants.insert(inputs, output);
        }
    }

    /// Keep only the constants selected by `keep`.
    pub fn filter_constants<F: Fn(&[usize]) -> bool>(&self, keep: F) -> LInfStructure {
        let mut out = self.clone();
        out.constants.retain(|k, _| keep(k));
        out
    }

    /// ℓ^d on basis generators in any order.
    pub fn apply_generators(&self, gens: &[usize]) -> Element {
        let mut out = Element::zero(self.nvars());
        self.accumulate(gens, &Monomial::one(self.nvars()), &Rational::one(), &mut out);
        out.with_order(self.order)
    }

    fn accumulate(&self, gens: &[usize], m: &Monomial, c: &Rational, out: &mut Element) {
        let s = sorting_permutation(gens);
        let sorted = act(&s, gens);
        let Some(k) = self.constants.get(&sorted) else { return };
        let parities: Vec<u8> = gens.iter().map(|&g| self.basis.get(g).parity()).collect();
        let c = c * sign(koszul_epsilon(&s, &parities));
        for (g, mono, x) in k.terms() {
            out.add_term(g, mono.mul(m), x * &c);
        }
    }

    /// ℓ^d(x_1, …, x_d), extended multilinearly with Koszul signs.
    pub fn apply(&self, inputs: &[&Element]) -> Result<Element> {
        let d = inputs.len();
        if d > self.max_arity {
            return Err(Error::Arity { requested: d, max: self.max_arity });
        }
        let mut order = self.order;
        for x in inputs {
            if x.nvars() != self.nvars() {
                return Err(Error::Validation("element has the wrong number of q variables".into()));
            }
            order = match (order, x.order()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            };
        }
        let mut out = Element::zero(self.nvars()).with_order(order);
        if d == 0 || inputs.iter().any(|x| x.is_zero()) {
            return Ok(out);
        }
        let terms: Vec<Vec<(usize, &Monomial, &Rational)>> = inputs.iter().map(|x| x.terms().collect()).collect();
        let mut gens = vec![0usize; d];
        let mut idx = vec![0usize; d];
        loop {
            let mut m = Monomial::one(self.nvars());
            let mut c = Rational::one();
            for (slot, &t) in idx.iter().enumerate() {
                let (g, mono, x) = terms[slot][t];
                gens[slot] = g;
                m = m.mul(mono);
                c *= x;
            }
            let skip = order.is_some_and(|k| m.word_length() >= k && m.is_nonnegative());
            if !skip {
                self.accumulate(&gens, &m, &c, &mut out);
            }
            // odometer over the term lists
            let mut slot = d;
            loop {
                if slot == 0 {
                    return Ok(out);
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < terms[slot].len() {
                    break;
                }
                idx[slot] = 0;
            }
        }
    }

    // ---- load-time validation --------------------------------------------

    /// Output degree = Σ input degrees + (3 − 2d), parity shifted by 1.
    pub fn check_degree_law(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (inputs, e) in &self.constants {
            let d = inputs.len() as i64;
            let mut expected = crate::graded::Degree::integer(3 - 2 * d);
            for &i in inputs {
                let g = &self.basis.get(i).degree;
                expected = crate::graded::Degree::new(&expected.qpart + &g.qpart, expected.parity ^ g.parity);
            }
            for (g, m, _) in e.terms() {
                let got = match m.qdegree(&self.spec) {
                    Ok(q) => self.basis.get(g).degree.shift_even(&q),
                    Err(err) => {
                        out.push(self.violation(ViolationKind::DegreeLaw, inputs, format!("{err}")));
                        continue;
                    }
                };
                if got != expected {
                    out.push(self.violation(
                        ViolationKind::DegreeLaw,
                        inputs,
                        format!("output term on `{}` has degree {got}, expected {expected}", self.basis.get(g).id),
                    ));
                }
            }
        }
        out
    }

    /// 𝒫(x₀) ≥ Σ 𝒫(x_i) + 2d − 3 for every output generator.
    pub fn check_p_law(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (inputs, e) in &self.constants {
            let d = inputs.len() as i64;
            let bound = inputs.iter().map(|&i| self.basis.get(i).p_value(&self.spec)).sum::<Rational>()
                + Rational::from_integer((2 * d - 3).into());
            for g in e.support() {
                let p = self.basis.get(g).p_value(&self.spec);
                if p < bound {
                    out.push(self.violation(
                        ViolationKind::PLaw,
                        inputs,
                        format!(
                            "output `{}` has P = {}, below the bound {}",
                            self.basis.get(g).id,
                            crate::rational::show(&p),
                            crate::rational::show(&bound)
                        ),
                    ));
                }
            }
        }
        out
    }

    /// A repeated odd input forces the constant to vanish.
    pub fn check_symmetry(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for inputs in self.constants.keys() {
            if inputs.windows(2).any(|w| w[0] == w[1] && self.basis.get(w[0]).parity() == 1) {
                out.push(self.violation(
                    ViolationKind::Symmetry,
                    inputs,
                    "nonzero constant with a repeated odd input".into(),
                ));
            }
        }
        out
    }

    /// Constants vanish when every input is an untagged formal generator.
    pub fn check_formal_vanishing(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for inputs in self.constants.keys() {
            if inputs.iter().all(|&i| {
                let g = self.basis.get(i);
                g.is_formal() && g.t_exp == 0
            }) {
                out.push(self.violation(
                    ViolationKind::FormalVanishing,
                    inputs,
                    "constant on formal generators only must vanish".into(),
                ));
            }
        }
        out
    }

    /// ℓ¹(t.γ) contains (−1)^{|t.γ|}·γ, the ∂_t part of the differential.
    pub fn check_dt_rule(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for i in 0..self.basis.len() {
            let Some(base) = self.basis.dt_partner(i) else { continue };
            let expected = sign(self.basis.get(i).parity());
            let got = self
                .constants
                .get(&vec![i])
                .map(|e| e.coefficient(base, &Monomial::one(self.nvars())))
                .unwrap_or_else(Rational::zero);
            if got != expected {
                out.push(self.violation(
                    ViolationKind::DtRule,
                    &[i],
                    format!(
                        "coefficient of `{}` is {}, the d_t term requires {}",
                        self.basis.get(base).id,
                        crate::rational::show(&got),
                        crate::rational::show(&expected)
                    ),
                ));
            }
        }
        out
    }

    /// ℓ¹ maps 𝔤_{>1} into 𝔤_{>0}.
    pub fn check_domain(&self) -> Vec<Violation> {
        let inner = PartialDomain::above(Rational::one());
        let outer = PartialDomain::above(Rational::zero());
        let mut out = Vec::new();
        for i in inner.members(&self.basis, &self.spec) {
            if let Some(e) = self.constants.get(&vec![i]) {
                for g in e.support() {
                    if !outer.contains(&self.basis, &self.spec, g) {
                        out.push(self.violation(
                            ViolationKind::Domain,
                            &[i],
                            format!("l1 leaves the domain through `{}`", self.basis.get(g).id),
                        ));
                    }
                }
            }
        }
        out
    }

    /// Degree law and graded symmetry only.
    pub fn validate_algebraic(&self) -> Vec<Violation> {
        let mut v = self.check_degree_law();
        v.extend(self.check_symmetry());
        v
    }

    /// Every load-time model validation.
    pub fn validate_model(&self) -> Vec<Violation> {
        let mut v = self.validate_algebraic();
        v.extend(self.check_p_law());
        v.extend(self.check_formal_vanishing());
        v.extend(self.check_dt_rule());
        v.extend(self.check_domain());
        v
    }

    fn violation(&self, kind: ViolationKind, inputs: &[usize], detail: String) -> Violation {
        Violation { kind, inputs: self.ids(inputs), detail }
    }

    // ---- relations ---------------------------------------------------------

    /// The left side of the arity-d relation on basis generators `x`.
    pub fn relation_residual(&self, x: &[usize]) -> Result<Element> {
        let d = x.len();
        let parities: Vec<u8> = x.iter().map(|&g| self.basis.get(g).parity()).collect();
        let mut total = Element::zero(self.nvars()).with_order(self.order);
        for j in 1..=d {
            if j > self.max_arity || d - j + 1 > self.max_arity {
                continue;
            }
            for s in unshuffles(d, j) {
                let xs = act(&s, x);
                let inner = self.apply_generators(&xs[..j]);
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<Element> = xs[j..].iter().map(|&g| Element::generator(self.nvars(), g)).collect();
                let mut args: Vec<&Element> = vec![&inner];
                args.extend(rest.iter());
                let term = self.apply(&args)?;
                total.add_assign(&term.scale(&sign(koszul_epsilon(&s, &parities))));
            }
        }
        Ok(total)
    }

    /// Sorted input tuples of size `d` drawn from `domain`: all of them when
    /// there are at most `max_tuples`, otherwise a seeded sample.
    pub fn relation_tuples(&self, domain: &PartialDomain, d: usize, opts: &RelationOptions) -> (Vec<Vec<usize>>, bool) {
        let members = domain.members(&self.basis, &self.spec);
        let n = members.len();
        if n == 0 || d == 0 {
            return (Vec::new(), true);
        }
        let total = multiset_count(n, d);
        if total.is_some_and(|t| t <= opts.max_tuples) {
            let mut out = Vec::new();
            let mut idx = vec![0usize; d];
            loop {
                out.push(idx.iter().map(|&i| members[i]).collect());
                let Some(p) = (0..d).rev().find(|&p| idx[p] + 1 < n) else { break };
                let v = idx[p] + 1;
                for q in p..d {
                    idx[q] = v;
                }
            }
            return (out, true);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((d as u64) << 32));
        let mut out = Vec::with_capacity(opts.max_tuples);
        for _ in 0..opts.max_tuples {
            let mut t: Vec<usize> = (0..d).map(|_| members[(rng.next_u64() % n as u64) as usize]).collect();
            t.sort_unstable();
            out.push(t);
        }
        out.sort();
        out.dedup();
        (out, false)
    }

    /// Check the relations for arities 1..=up_to_d on tuples from `domain`.
    pub fn check_linf_relations(
        &self,
        domain: &PartialDomain,
        up_to_d: usize,
        opts: &RelationOptions,
    ) -> Result<RelationReport> {
        let mut report = RelationReport { up_to_d, tuples_checked: 0, exhaustive: true, violations: Vec::new() };
        for d in 1..=up_to_d {
            let (tuples, exhaustive) = self.relation_tuples(domain, d, opts);
            report.exhaustive &= exhaustive;
            for t in tuples {
                report.tuples_checked += 1;
                let r = self.relation_residual(&t)?;
                if !r.is_zero() {
                    report.violations.push(RelationViolation { inputs: t, residual: r });
                }
            }
        }
        Ok(report)
    }
}

/// binomial(n + d − 1, d), or `None` on overflow.
fn multiset_count(n: usize, d: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..d {
        acc = acc.checked_mul(n + i)? / (i + 1);
    }
    Some(acc)
}
