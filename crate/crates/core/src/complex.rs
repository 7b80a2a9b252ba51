//! Finite cochain complexes over ℚ or over the Laurent ring R, telescopes,
//! truncations and the cap conjugation Φ.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::coeff::{Mode, Monomial, NovikovPolynomial, RingSpec, SphereClass};
use crate::error::{Error, Result};
use crate::graded::{Degree, GradedBasis};
use crate::linalg::{rank_laurent, rank_q};
use crate::linf::LInfStructure;
use crate::rational::{rem_euclid, show, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CGen {
    pub id: String,
    pub degree: Degree,
    /// ℱ-value, when the complex is filtered.
    pub fval: Option<Rational>,
}

impl CGen {
    pub fn new(id: &str, degree: Degree) -> Self {
        Self { id: id.into(), degree, fval: None }
    }

    pub fn filtered(id: &str, degree: Degree, fval: Rational) -> Self {
        Self { id: id.into(), degree, fval: Some(fval) }
    }
}

/// A complex on a finite basis. `entries[(i, j)]` is the coefficient of
/// generator j in d(generator i). Without a ring the coefficients are
/// rational constants (polynomials in zero variables).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    gens: Vec<CGen>,
    ring: Option<RingSpec>,
    entries: BTreeMap<(usize, usize), NovikovPolynomial>,
}

impl CochainComplex {
    pub fn over_q(gens: Vec<CGen>) -> Self {
        Self { gens, ring: None, entries: BTreeMap::new() }
    }

    pub fn over_r(ring: RingSpec, gens: Vec<CGen>) -> Self {
        Self { gens, ring: Some(ring), entries: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.ring.as_ref().map_or(0, |r| r.n())
    }

    pub fn ring(&self) -> Option<&RingSpec> {
        self.ring.as_ref()
    }

    pub fn gens(&self) -> &[CGen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.gens.iter().position(|g| g.id == id).ok_or_else(|| Error::UnknownGenerator(id.into()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &NovikovPolynomial)> {
        self.entries.iter().map(|((i, j), p)| (*i, *j, p))
    }

    pub fn entry(&self, from: usize, to: usize) -> Option<&NovikovPolynomial> {
        self.entries.get(&(from, to))
    }

    /// Add `p` to the coefficient of `to` in d(`from`).
    pub fn add_entry(&mut self, from: usize, to: usize, p: NovikovPolynomial) -> Result<()> {
        if from >= self.len() || to >= self.len() {
            return Err(Error::Chain(format!("entry ({from}, {to}) is outside the basis")));
        }
        if p.nvars() != self.nvars() {
            return Err(Error::Chain("entry has the wrong number of q variables".into()));
        }
        let p = match self.entries.remove(&(from, to)) {
            Some(old) => old.localize().add(&p.localize())?,
            None => p,
        };
        if !p.is_zero() {
            self.entries.insert((from, to), p);
        }
        Ok(())
    }

    pub fn add_rational(&mut self, from: usize, to: usize, c: Rational) -> Result<()> {
        let p = NovikovPolynomial::constant(self.nvars(), Mode::Localized, c);
        self.add_entry(from, to, p)
    }

    fn qdeg(&self, m: &Monomial) -> Result<Rational> {
        match &self.ring {
            Some(r) => m.qdegree(r),
            None => Ok(Rational::zero()),
        }
    }

    /// Every entry raises total degree by one.
    pub fn check_degree_law(&self) -> Result<()> {
        for ((i, j), p) in &self.entries {
            let expected = self.gens[*i].degree.shift(1);
            for (m, _) in p.terms() {
                let got = self.gens[*j].degree.shift_even(&self.qdeg(m)?);
                if got != expected {
                    return Err(Error::Chain(format!(
                        "d({}) has a term on `{}` of degree {got}, expected {expected}",
                        self.gens[*i].id, self.gens[*j].id
                    )));
                }
            }
        }
        Ok(())
    }

    /// d ∘ d as a sparse matrix.
    pub fn d_squared(&self) -> Result<BTreeMap<(usize, usize), NovikovPolynomial>> {
        compose(&self.entries, &self.entries)
    }

    pub fn check_d_squared(&self) -> Result<()> {
        match self.d_squared()?.into_iter().next() {
            None => Ok(()),
            Some(((i, k), p)) => {
                Err(Error::Chain(format!("d^2({}) has coefficient {p} on `{}`", self.gens[i].id, self.gens[k].id)))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.check_degree_law()?;
        self.check_d_squared()
    }

    /// Keep the generators selected by `keep`, with the entries between them.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> CochainComplex {
        let mut map = BTreeMap::new();
        let mut gens = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            if keep(i) {
                map.insert(i, gens.len());
                gens.push(g.clone());
            }
        }
        let entries =
            self.entries.iter().filter_map(|((i, j), p)| Some(((*map.get(i)?, *map.get(j)?), p.clone()))).collect();
        CochainComplex { gens, ring: self.ring.clone(), entries }
    }

    /// Degree class of generator `i`: the degree itself over ℚ, and the
    /// degree modulo the lattice of q-degrees over R.
    pub fn degree_class(&self, i: usize) -> Degree {
        let d = &self.gens[i].degree;
        match &self.ring {
            None => d.clone(),
            Some(r) => Degree::new(rem_euclid(&d.qpart, &r.degree_lattice()), d.parity),
        }
    }

    fn class_of(&self, d: &Degree) -> Degree {
        match &self.ring {
            None => d.clone(),
            Some(r) => Degree::new(rem_euclid(&d.qpart, &r.degree_lattice()), d.parity),
        }
    }

    fn classes(&self) -> BTreeMap<Degree, Vec<usize>> {
        let mut out: BTreeMap<Degree, Vec<usize>> = BTreeMap::new();
        for i in 0..self.len() {
            out.entry(self.degree_class(i)).or_default().push(i);
        }
        out
    }

    /// Rank of d from class `src` into the next class.
    fn block_rank(&self, src: &[usize], dst: &[usize]) -> usize {
        if src.is_empty() || dst.is_empty() {
            return 0;
        }
        let zero = NovikovPolynomial::zero(self.nvars(), Mode::Localized);
        let rows: Vec<Vec<NovikovPolynomial>> = src
            .iter()
            .map(|&i| dst.iter().map(|&j| self.entries.get(&(i, j)).cloned().unwrap_or_else(|| zero.clone())).collect())
            .collect();
        if self.nvars() == 0 {
            let one = Monomial::one(0);
            let rows_q: Vec<Vec<Rational>> =
                rows.iter().map(|r| r.iter().map(|p| p.coefficient(&one)).collect()).collect();
            rank_q(&rows_q)
        } else {
            rank_laurent(&rows)
        }
    }

    /// Cohomology ranks per degree (over ℚ) or per degree class (over
    /// Frac(R)). Classes with no generators are omitted.
    pub fn cohomology_ranks(&self) -> BTreeMap<Degree, usize> {
        let classes = self.classes();
        let empty = Vec::new();
        let mut out = BTreeMap::new();
        for (deg, idx) in &classes {
            let next = classes.get(&self.class_of(&deg.shift(1))).unwrap_or(&empty);
            let prev = classes.get(&self.class_of(&deg.shift(-1))).unwrap_or(&empty);
            let r_out = self.block_rank(idx, next);
            let r_in = self.block_rank(prev, idx);
            out.insert(deg.clone(), idx.len() - r_out - r_in);
        }
        out
    }

    /// For one q variable: 𝕜-dimensions of the graded pieces H^δ, one
    /// representative δ per class. The graded Laurent ring is a graded field
    /// here, so these equal the ranks over R.
    pub fn graded_piece_ranks(&self) -> Result<BTreeMap<Degree, usize>> {
        let ring = match &self.ring {
            Some(r) if r.n() == 1 => r.clone(),
            _ => return Err(Error::Chain("graded pieces need exactly one q variable".into())),
        };
        let lam = ring.lambda()[0].clone();
        // exponent k with |g| + k·λ = δ
        let k_for = |g: usize, delta: &Degree| -> i64 {
            let k = (&delta.qpart - &self.gens[g].degree.qpart) / &lam;
            debug_assert!(k.is_integer());
            i64::try_from(k.to_integer()).expect("exponent fits in i64")
        };
        let classes = self.classes();
        let empty = Vec::new();
        let mut out = BTreeMap::new();
        for (delta, idx) in &classes {
            let rank_from = |src: &[usize], dsrc: &Degree, dst: &[usize], ddst: &Degree| -> usize {
                let rows: Vec<Vec<Rational>> = src
                    .iter()
                    .map(|&i| {
                        dst.iter()
                            .map(|&j| match self.entries.get(&(i, j)) {
                                None => Rational::zero(),
                                Some(p) => {
                                    let e = k_for(j, ddst) - k_for(i, dsrc);
                                    p.coefficient(&Monomial::new(vec![e]))
                                }
                            })
                            .collect()
                    })
                    .collect();
                rank_q(&rows)
            };
            let up = delta.shift(1);
            let down = delta.shift(-1);
            let next = classes.get(&self.class_of(&up)).unwrap_or(&empty);
            let prev = classes.get(&self.class_of(&down)).unwrap_or(&empty);
            let r_out = rank_from(idx, delta, next, &up);
            let r_in = rank_from(prev, &down, idx, delta);
            out.insert(delta.clone(), idx.len() - r_out - r_in);
        }
        Ok(out)
    }

    /// σ_{<p}: the quotient complex on generators of degree below `p`.
    pub fn truncate_below(&self, p: &Rational) -> CochainComplex {
        self.restrict(|i| self.gens[i].degree.qpart < *p)
    }

    /// ℱ_{≥p}: the subcomplex on generators with ℱ ≥ p (`None` keeps all).
    /// Over R a coefficient q^m adds deg(q^m) to ℱ. Fails when some entry
    /// lowers ℱ, naming the entry.
    pub fn f_subcomplex(&self, p: Option<&Rational>) -> Result<CochainComplex> {
        let f = |i: usize| {
            self.gens[i]
                .fval
                .clone()
                .ok_or_else(|| Error::Chain(format!("generator `{}` has no F-value", self.gens[i].id)))
        };
        for ((i, j), poly) in &self.entries {
            for (m, _) in poly.terms() {
                let reached = f(*j)? + self.qdeg(m)?;
                if reached < f(*i)? {
                    return Err(Error::Chain(format!(
                        "d({}) reaches `{}`, lowering F from {} to {}",
                        self.gens[*i].id,
                        self.gens[*j].id,
                        show(&f(*i)?),
                        show(&reached)
                    )));
                }
            }
        }
        let mut keep = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            keep.push(match p {
                None => true,
                Some(p) => f(i)? >= *p,
            });
        }
        Ok(self.restrict(|i| keep[i]))
    }

    /// The associated graded: entries that keep ℱ fixed.
    pub fn associated_graded(&self) -> Result<CochainComplex> {
        let mut out = self.clone();
        for (i, j) in self.entries.keys() {
            let (fi, fj) = (&self.gens[*i].fval, &self.gens[*j].fval);
            match (fi, fj) {
                (Some(a), Some(b)) => {
                    if a != b {
                        out.entries.remove(&(*i, *j));
                    }
                }
                _ => return Err(Error::Chain("associated graded needs F-values".into())),
            }
        }
        Ok(out)
    }
}

/// Rank tables agree, reading a missing degree as rank 0.
pub fn ranks_agree(a: &BTreeMap<Degree, usize>, b: &BTreeMap<Degree, usize>) -> bool {
    a.iter().chain(b.iter()).all(|(d, _)| a.get(d).copied().unwrap_or(0) == b.get(d).copied().unwrap_or(0))
}

fn compose(
    first: &BTreeMap<(usize, usize), NovikovPolynomial>,
    second: &BTreeMap<(usize, usize), NovikovPolynomial>,
) -> Result<BTreeMap<(usize, usize), NovikovPolynomial>> {
    let mut out: BTreeMap<(usize, usize), NovikovPolynomial> = BTreeMap::new();
    for ((i, j), p) in first {
        for ((_, k), r) in second.range((*j, 0)..(*j + 1, 0)) {
            let prod = p.localize().mul(&r.localize())?;
            let sum = match out.remove(&(*i, *k)) {
                Some(old) => old.add(&prod)?,
                None => prod,
            };
            if !sum.is_zero() {
                out.insert((*i, *k), sum);
            }
        }
    }
    Ok(out)
}

/// Differences of two sparse maps, for chain-map checks.
fn map_difference(
    a: &BTreeMap<(usize, usize), NovikovPolynomial>,
    b: &BTreeMap<(usize, usize), NovikovPolynomial>,
) -> Result<Option<(usize, usize)>> {
    let keys: BTreeSet<(usize, usize)> = a.keys().chain(b.keys()).copied().collect();
    for k in keys {
        let equal = match (a.get(&k), b.get(&k)) {
            (Some(x), Some(y)) => x.localize() == y.localize(),
            _ => false,
        };
        if !equal {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// A degree-0 map between complexes; `entries[(i, j)]` is the coefficient of
/// target generator j in f(source generator i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub source: CochainComplex,
    pub target: CochainComplex,
    pub entries: BTreeMap<(usize, usize), NovikovPolynomial>,
}

impl ChainMap {
    pub fn new(source: CochainComplex, target: CochainComplex) -> Self {
        Self { source, target, entries: BTreeMap::new() }
    }

    pub fn identity(c: &CochainComplex) -> Self {
        let mut f = Self::new(c.clone(), c.clone());
        for i in 0..c.len() {
            f.set_rational(i, i, Rational::one());
        }
        f
    }

    pub fn set_rational(&mut self, from: usize, to: usize, c: Rational) {
        if c.is_zero() {
            self.entries.remove(&(from, to));
        } else {
            self.entries.insert((from, to), NovikovPolynomial::constant(self.source.nvars(), Mode::Localized, c));
        }
    }

    /// f ∘ d = d ∘ f and f preserves degree.
    pub fn validate(&self) -> Result<()> {
        for ((i, j), p) in &self.entries {
            for (m, _) in p.terms() {
                let got = self.target.gens[*j].degree.shift_even(&self.target.qdeg(m)?);
                if got != self.source.gens[*i].degree {
                    return Err(Error::Chain(format!(
                        "map sends `{}` to `{}` with a degree change",
                        self.source.gens[*i].id, self.target.gens[*j].id
                    )));
                }
            }
        }
        let df = compose(&self.source.entries, &self.entries)?;
        let fd = compose(&self.entries, &self.target.entries)?;
        if let Some((i, k)) = map_difference(&df, &fd)? {
            return Err(Error::Chain(format!(
                "not a chain map: f(d({})) and d(f({})) differ on `{}`",
                self.source.gens[i].id, self.source.gens[i].id, self.target.gens[k].id
            )));
        }
        Ok(())
    }

    /// Cone(f): source shifted down by one, then target;
    /// d(a) = −d(a) + f(a), d(b) = d(b).
    pub fn cone(&self) -> Result<CochainComplex> {
        let n = self.source.len();
        let mut gens: Vec<CGen> = self
            .source
            .gens
            .iter()
            .map(|g| CGen { id: format!("s.{}", g.id), degree: g.degree.shift(-1), fval: g.fval.clone() })
            .collect();
        gens.extend(self.target.gens.iter().cloned());
        let mut cone = CochainComplex { gens, ring: self.source.ring.clone(), entries: BTreeMap::new() };
        for ((i, j), p) in &self.source.entries {
            cone.add_entry(*i, *j, p.scale(&-Rational::one()))?;
        }
        for ((i, j), p) in &self.entries {
            cone.add_entry(*i, n + j, p.clone())?;
        }
        for ((i, j), p) in &self.target.entries {
            cone.add_entry(n + i, n + j, p.clone())?;
        }
        Ok(cone)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QisReport {
    pub quasi_iso: bool,
    pub cone_ranks: BTreeMap<Degree, usize>,
    /// Verdict on the associated graded, for filtered maps.
    pub graded: Option<bool>,
}

/// f is a quasi-isomorphism iff its cone is acyclic.
pub fn quasi_iso_check(f: &ChainMap) -> Result<QisReport> {
    f.validate()?;
    let cone = f.cone()?;
    let cone_ranks = cone.cohomology_ranks();
    let quasi_iso = cone_ranks.values().all(|&r| r == 0);
    let filtered = cone.gens.iter().all(|g| g.fval.is_some());
    let graded = if filtered && !cone.is_empty() {
        let monotone = cone.entries.keys().all(|(i, j)| cone.gens[*j].fval >= cone.gens[*i].fval);
        if monotone {
            Some(cone.associated_graded()?.cohomology_ranks().values().all(|&r| r == 0))
        } else {
            None
        }
    } else {
        None
    };
    Ok(QisReport { quasi_iso, cone_ranks, graded })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TelescopeMode {
    /// No t-copies on the last level: the finite homotopy colimit.
    Truncated,
    /// t-copies on every level, with zero continuation past the last.
    Literal,
}

/// CF_1 → CF_2 → … → CF_m with degree-0 chain maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedSystem {
    pub levels: Vec<CochainComplex>,
    /// `maps[n][(i, j)]`: coefficient of generator j of level n+1 in c(generator i of level n).
    pub maps: Vec<BTreeMap<(usize, usize), NovikovPolynomial>>,
}

impl DirectedSystem {
    pub fn validate(&self) -> Result<()> {
        if self.maps.len() + 1 != self.levels.len() && !(self.levels.is_empty() && self.maps.is_empty()) {
            return Err(Error::Chain(format!(
                "{} levels need {} continuation maps, got {}",
                self.levels.len(),
                self.levels.len().saturating_sub(1),
                self.maps.len()
            )));
        }
        for c in &self.levels {
            c.validate()?;
        }
        for (n, m) in self.maps.iter().enumerate() {
            let f = ChainMap { source: self.levels[n].clone(), target: self.levels[n + 1].clone(), entries: m.clone() };
            f.validate().map_err(|e| Error::Chain(format!("continuation map {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    /// Ranks agree on the last two levels.
    pub fn stable(&self) -> bool {
        match self.levels.len() {
            0 | 1 => true,
            m => self.levels[m - 2].cohomology_ranks() == self.levels[m - 1].cohomology_ranks(),
        }
    }
}

/// The telescope: generators `γ@n` and `t.γ@n`, with
/// d(γ) = (−1)^{|γ|} dγ and d(tγ) = (−1)^{|γ|} (t dγ + c(γ) − γ).
pub fn telescope(system: &DirectedSystem, mode: TelescopeMode) -> Result<CochainComplex> {
    system.validate()?;
    let m = system.levels.len();
    let ring = system.levels.first().and_then(|c| c.ring.clone());
    let mut gens = Vec::new();
    // (level, local index) → (plain index, t index)
    let mut plain: Vec<Vec<usize>> = Vec::new();
    let mut tagged: Vec<Vec<Option<usize>>> = Vec::new();
    for (n, c) in system.levels.iter().enumerate() {
        let with_t = mode == TelescopeMode::Literal || n + 1 < m;
        let mut p = Vec::new();
        let mut t = Vec::new();
        for g in &c.gens {
            p.push(gens.len());
            gens.push(CGen { id: format!("{}@{}", g.id, n + 1), degree: g.degree.clone(), fval: g.fval.clone() });
        }
        for g in &c.gens {
            if with_t {
                t.push(Some(gens.len()));
                gens.push(CGen {
                    id: format!("t.{}@{}", g.id, n + 1),
                    degree: g.degree.shift(-1),
                    fval: g.fval.clone(),
                });
            } else {
                t.push(None);
            }
        }
        plain.push(p);
        tagged.push(t);
    }
    let mut out = CochainComplex { gens, ring, entries: BTreeMap::new() };
    for (n, c) in system.levels.iter().enumerate() {
        for ((i, j), p) in &c.entries {
            let s = crate::rational::sign(c.gens[*i].degree.parity);
            out.add_entry(plain[n][*i], plain[n][*j], p.scale(&s))?;
            if let (Some(ti), Some(tj)) = (tagged[n][*i], tagged[n][*j]) {
                out.add_entry(ti, tj, p.scale(&s))?;
            }
        }
        for (i, g) in c.gens.iter().enumerate() {
            let Some(ti) = tagged[n][i] else { continue };
            let s = crate::rational::sign(g.degree.parity);
            out.add_rational(ti, plain[n][i], -s.clone())?;
            if let Some(map) = system.maps.get(n) {
                for ((_, j), p) in map.range((i, 0)..(i + 1, 0)) {
                    out.add_entry(ti, plain[n + 1][*j], p.scale(&s))?;
                }
            }
        }
    }
    Ok(out)
}

/// The ℓ¹ complex of `l` on the listed basis generators, over R.
/// Fails when ℓ¹ leaves the listed generators.
pub fn linf_complex(l: &LInfStructure, gens: &[usize]) -> Result<CochainComplex> {
    let basis: &GradedBasis = l.basis();
    let spec = l.spec();
    let local: BTreeMap<usize, usize> = gens.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let cgens = gens
        .iter()
        .map(|&g| {
            let x = basis.get(g);
            CGen::filtered(&x.id, x.degree.clone(), x.f_value(spec))
        })
        .collect();
    let mut c = CochainComplex::over_r(spec.clone(), cgens);
    for (k, &g) in gens.iter().enumerate() {
        let d = l.apply_generators(&[g]);
        for target in d.support() {
            let Some(&t) = local.get(&target) else {
                return Err(Error::Chain(format!(
                    "l1({}) leaves the chosen generators through `{}`",
                    basis.get(g).id,
                    basis.get(target).id
                )));
            };
            let poly = d.coefficient_of(target).localize();
            c.add_entry(k, t, poly)?;
        }
    }
    Ok(c)
}

/// Reference caps: the intersection vector u·D per capped generator.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CapAssignment {
    pub caps: BTreeMap<String, Vec<i64>>,
}

impl CapAssignment {
    pub fn get(&self, id: &str) -> Result<&[i64]> {
        self.caps.get(id).map(|v| v.as_slice()).ok_or_else(|| Error::Chain(format!("generator `{id}` has no cap")))
    }

    /// Recap one generator by a sphere class: u ↦ u − A·D. Its capped degree
    /// moves by +2c₁(A), which `capped_degree` reproduces.
    pub fn recap(&self, id: &str, a: &SphereClass, spec: &RingSpec) -> Result<CapAssignment> {
        a.validate(spec)?;
        let u = self.get(id)?;
        let mut out = self.clone();
        out.caps.insert(id.into(), u.iter().zip(&a.intersections).map(|(x, y)| x - y).collect());
        Ok(out)
    }

    /// |(γ, u)| = |γ|_SH − u·D^λ.
    pub fn capped_degree(&self, id: &str, sh: &Degree, spec: &RingSpec) -> Result<Degree> {
        let u = self.get(id)?;
        if u.len() != spec.n() {
            return Err(Error::Chain(format!("cap of `{id}` has {} entries, N = {}", u.len(), spec.n())));
        }
        let shift = Monomial::new(u.to_vec()).qdegree(spec)?;
        Ok(sh.shift_even(&-shift))
    }
}

/// Conjugate by Φ(γ) = [γ, u] ⊗ q^{u·D}: an entry γ₁ → γ₀ with coefficient p
/// becomes p·q^{u₀ − u₁}, and generators carry their capped degrees.
pub fn phi_conjugate(sc: &CochainComplex, caps: &CapAssignment) -> Result<CochainComplex> {
    let spec = sc.ring.clone().ok_or_else(|| Error::Chain("the conjugated complex must live over R".into()))?;
    let mut gens = Vec::with_capacity(sc.len());
    let mut us = Vec::with_capacity(sc.len());
    for g in &sc.gens {
        gens.push(CGen {
            id: g.id.clone(),
            degree: caps.capped_degree(&g.id, &g.degree, &spec)?,
            fval: g.fval.clone(),
        });
        us.push(Monomial::new(caps.get(&g.id)?.to_vec()));
    }
    let mut out = CochainComplex { gens, ring: Some(spec), entries: BTreeMap::new() };
    for ((i, j), p) in &sc.entries {
        let shift = us[*j].mul(&us[*i].inverse());
        out.add_entry(*i, *j, p.localize().mul_monomial(&shift)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn two_gen() -> CochainComplex {
        let mut c =
            CochainComplex::over_q(vec![CGen::new("x", Degree::integer(0)), CGen::new("y", Degree::integer(1))]);
        c.add_rational(0, 1, int(1)).unwrap();
        c
    }

    #[test]
    fn zero_differential_counts_basis() {
        let c = CochainComplex::over_q(vec![CGen::new("a", Degree::integer(0)), CGen::new("b", Degree::integer(0))]);
        assert_eq!(c.cohomology_ranks().get(&Degree::integer(0)), Some(&2));
    }

    #[test]
    fn acyclic_pair() {
        let c = two_gen();
        c.validate().unwrap();
        assert!(c.cohomology_ranks().values().all(|&r| r == 0));
    }

    #[test]
    fn degree_law_enforced() {
        let mut c =
            CochainComplex::over_q(vec![CGen::new("x", Degree::integer(0)), CGen::new("y", Degree::integer(2))]);
        c.add_rational(0, 1, int(1)).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_level_literal_telescope_is_acyclic() {
        let sys = DirectedSystem { levels: vec![two_gen()], maps: vec![] };
        let lit = telescope(&sys, TelescopeMode::Literal).unwrap();
        lit.validate().unwrap();
        assert_eq!(lit.len(), 4);
        assert!(lit.cohomology_ranks().values().all(|&r| r == 0));
        let tr = telescope(&sys, TelescopeMode::Truncated).unwrap();
        assert_eq!(tr, {
            let mut c = CochainComplex::over_q(vec![
                CGen::new("x@1", Degree::integer(0)),
                CGen::new("y@1", Degree::integer(1)),
            ]);
            c.add_rational(0, 1, int(1)).unwrap();
            c
        });
    }

    #[test]
    fn identity_system_keeps_cohomology() {
        let cf = CochainComplex::over_q(vec![CGen::new("a", Degree::integer(0)), CGen::new("b", Degree::integer(1))]);
        let mut id = BTreeMap::new();
        id.insert((0, 0), NovikovPolynomial::constant(0, Mode::Localized, int(1)));
        id.insert((1, 1), NovikovPolynomial::constant(0, Mode::Localized, int(1)));
        let sys = DirectedSystem { levels: vec![cf.clone(), cf.clone(), cf.clone()], maps: vec![id.clone(), id] };
        let sc = telescope(&sys, TelescopeMode::Truncated).unwrap();
        sc.validate().unwrap();
        assert!(ranks_agree(&sc.cohomology_ranks(), &cf.cohomology_ranks()));
        assert!(sys.stable());
        let empty = DirectedSystem { levels: vec![], maps: vec![] };
        assert!(telescope(&empty, TelescopeMode::Truncated).unwrap().is_empty());
    }

    #[test]
    fn non_chain_map_rejected() {
        let a = two_gen();
        let b = CochainComplex::over_q(vec![CGen::new("x", Degree::integer(0)), CGen::new("y", Degree::integer(1))]);
        let mut m = BTreeMap::new();
        m.insert((1, 1), NovikovPolynomial::constant(0, Mode::Localized, int(1)));
        let sys = DirectedSystem { levels: vec![a, b], maps: vec![m] };
        assert!(telescope(&sys, TelescopeMode::Truncated).is_err());
    }

    #[test]
    fn truncation_extremes() {
        let c = two_gen();
        assert_eq!(c.truncate_below(&int(5)), c);
        assert!(c.truncate_below(&int(-3)).is_empty());
    }

    #[test]
    fn qis_identity_and_zero() {
        let c = CochainComplex::over_q(vec![CGen::new("a", Degree::integer(0))]);
        assert!(quasi_iso_check(&ChainMap::identity(&c)).unwrap().quasi_iso);
        assert!(!quasi_iso_check(&ChainMap::new(c.clone(), c)).unwrap().quasi_iso);
    }

    #[test]
    fn f_subcomplex_monotonicity() {
        let mut c = CochainComplex::over_q(vec![
            CGen::filtered("x", Degree::integer(0), int(1)),
            CGen::filtered("y", Degree::integer(1), int(0)),
        ]);
        c.add_rational(0, 1, int(1)).unwrap();
        assert!(c.f_subcomplex(None).is_err());
        let mut ok = CochainComplex::over_q(vec![
            CGen::filtered("x", Degree::integer(0), int(0)),
            CGen::filtered("y", Degree::integer(1), int(1)),
        ]);
        ok.add_rational(0, 1, int(1)).unwrap();
        assert_eq!(ok.f_subcomplex(None).unwrap(), ok);
        assert!(ok.f_subcomplex(Some(&int(9))).unwrap().is_empty());
        assert_eq!(ok.f_subcomplex(Some(&int(1))).unwrap().len(), 1);
    }

    #[test]
    fn graded_pieces_match_laurent_ranks() {
        let spec = RingSpec::new(vec![int(2)], int(1), int(3)).unwrap();
        // d(a) = q·b with |a| = 1, |b| = 0: acyclic over R
        let mut c = CochainComplex::over_r(
            spec,
            vec![
                CGen::new("a", Degree::integer(1)),
                CGen::new("b", Degree::integer(0)),
                CGen::new("w", Degree::integer(0)),
            ],
        );
        c.add_entry(0, 1, NovikovPolynomial::term(Mode::Plus, Monomial::new(vec![1]), int(1)).unwrap()).unwrap();
        c.validate().unwrap();
        let r = c.cohomology_ranks();
        assert_eq!(r, c.graded_piece_ranks().unwrap());
        assert_eq!(r.get(&Degree::integer(0)), Some(&1));
        assert_eq!(r.get(&Degree::integer(1)), Some(&0));
    }

    #[test]
    fn phi_with_zero_caps_is_verbatim() {
        let spec = RingSpec::new(vec![int(2)], int(1), int(3)).unwrap();
        let mut c =
            CochainComplex::over_r(spec, vec![CGen::new("a", Degree::integer(1)), CGen::new("b", Degree::integer(2))]);
        c.add_rational(0, 1, int(3)).unwrap();
        let mut caps = CapAssignment::default();
        caps.caps.insert("a".into(), vec![0]);
        caps.caps.insert("b".into(), vec![0]);
        assert_eq!(phi_conjugate(&c, &caps).unwrap(), c);
        caps.caps.remove("b");
        assert!(phi_conjugate(&c, &caps).is_err());
    }
}
