//! Toric chamber model: radial Hamiltonians, orbit families and their
//! action, index and 𝒫 bookkeeping.
//!
//! On the chamber of stratum i the radial coordinate is ρ = 1 − r_i/κ_i, and
//! a level-n orbit family sits where n·h′(ρ)/κ_i is an integer m ≥ 0.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::coeff::RingSpec;
use crate::error::{Error, Result};
use crate::rational::{ceil, int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorModel {
    pub spec: RingSpec,
    pub eta: Rational,
    pub slope: Rational,
    pub hess_bound: Rational,
}

impl DivisorModel {
    pub fn new(spec: RingSpec, eta: Rational, slope: Rational, hess_bound: Rational) -> Result<Self> {
        if !(eta.is_positive() && eta < rat(1, 10)) {
            return Err(Error::Validation("eta must satisfy 0 < eta < 1/10".into()));
        }
        if !slope.is_positive() {
            return Err(Error::Validation("slope must be positive".into()));
        }
        if hess_bound.is_negative() {
            return Err(Error::Validation("hess_bound must be nonnegative".into()));
        }
        Ok(Self { spec, eta, slope, hess_bound })
    }

    /// σ = 1 − 2η.
    pub fn sigma(&self) -> Rational {
        int(1) - int(2) * &self.eta
    }

    pub fn sigma_plus(&self) -> Rational {
        int(1) - &self.eta
    }

    pub fn sigma_minus(&self) -> Rational {
        int(1) - int(3) * &self.eta
    }

    /// Start of the interpolation region, 1 − 5η.
    pub fn flat_end(&self) -> Rational {
        int(1) - int(5) * &self.eta
    }

    /// κ_i = κ·λ_i.
    pub fn kappa_i(&self, i: usize) -> Rational {
        self.spec.wrapping(i)
    }

    /// The same model with the slope multiplied by `factor`, together with
    /// the filtration constant C scaled the same way.
    pub fn scale_slope(&self, factor: &Rational, c: &Rational) -> Result<(DivisorModel, Rational)> {
        let m = DivisorModel::new(self.spec.clone(), self.eta.clone(), &self.slope * factor, self.hess_bound.clone())?;
        Ok((m, c * factor))
    }
}

/// One cubic piece on [x0, x1]: h = Σ coeffs[k]·s^k with s = (ρ − x0)/(x1 − x0).
#[derive(Clone, Debug, PartialEq, Eq)]
struct Piece {
    x0: Rational,
    x1: Rational,
    coeffs: [Rational; 4],
}

impl Piece {
    fn hermite(x0: Rational, x1: Rational, y0: Rational, y1: Rational, d0: Rational, d1: Rational) -> Self {
        let w = &x1 - &x0;
        let (m0, m1) = (d0 * &w, d1 * &w);
        let c2 = int(3) * (&y1 - &y0) - int(2) * &m0 - &m1;
        let c3 = int(2) * (&y0 - &y1) + &m0 + &m1;
        Self { x0, x1, coeffs: [y0, m0, c2, c3] }
    }

    fn s(&self, rho: &Rational) -> Rational {
        (rho - &self.x0) / (&self.x1 - &self.x0)
    }

    fn value(&self, rho: &Rational) -> Rational {
        let s = self.s(rho);
        let c = &self.coeffs;
        &c[0] + &s * (&c[1] + &s * (&c[2] + &s * &c[3]))
    }

    /// dh/dρ as a quadratic in s: [a0, a1, a2].
    fn derivative(&self) -> [Rational; 3] {
        let w = &self.x1 - &self.x0;
        let c = &self.coeffs;
        [&c[1] / &w, int(2) * &c[2] / &w, int(3) * &c[3] / &w]
    }

    fn slope_at(&self, rho: &Rational) -> Rational {
        let s = self.s(rho);
        let a = self.derivative();
        &a[0] + &s * (&a[1] + &s * &a[2])
    }
}

/// Extremes of a quadratic on [0, 1].
fn quad_range(a: &[Rational; 3]) -> (Rational, Rational) {
    let eval = |s: &Rational| &a[0] + s * (&a[1] + s * &a[2]);
    let mut vals = alloc::vec![eval(&Rational::zero()), eval(&Rational::one())];
    if !a[2].is_zero() {
        let v = -&a[1] / (int(2) * &a[2]);
        if v.is_positive() && v < Rational::one() {
            vals.push(eval(&v));
        }
    }
    let lo = vals.iter().min().cloned().unwrap_or_else(Rational::zero);
    let hi = vals.iter().max().cloned().unwrap_or_else(Rational::zero);
    (lo, hi)
}

/// h = 0 for ρ ≤ 1 − 5η, h = slope·(ρ − (1 − 4η)) for ρ ≥ σ₋, and a C¹
/// monotone cubic Hermite interpolant through the knots in between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialHamiltonian {
    flat_end: Rational,
    linear_start: Rational,
    slope: Rational,
    offset: Rational,
    pieces: Vec<Piece>,
}

impl RadialHamiltonian {
    /// `knots` are interior (ρ, h) points, strictly increasing in ρ.
    pub fn new(model: &DivisorModel, knots: &[(Rational, Rational)]) -> Result<Self> {
        let a = model.flat_end();
        let b = model.sigma_minus();
        let offset = int(1) - int(4) * &model.eta;
        let hb = &model.slope * (&b - &offset);
        let mut xs = alloc::vec![a.clone()];
        let mut ys = alloc::vec![Rational::zero()];
        for (x, y) in knots {
            if !(*x > a && *x < b) {
                return Err(Error::Model(format!(
                    "knot rho = {} is outside the interpolation region",
                    crate::rational::show(x)
                )));
            }
            xs.push(x.clone());
            ys.push(y.clone());
        }
        xs.push(b.clone());
        ys.push(hb);
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Model("knots must be strictly increasing in rho".into()));
        }
        if !ys.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::Model("knot values must be nondecreasing".into()));
        }
        let k = xs.len();
        let secants: Vec<Rational> = (0..k - 1).map(|i| (&ys[i + 1] - &ys[i]) / (&xs[i + 1] - &xs[i])).collect();
        let mut ds = alloc::vec![Rational::zero(); k];
        ds[k - 1] = model.slope.clone();
        for i in 1..k - 1 {
            let (l, r) = (&secants[i - 1], &secants[i]);
            // harmonic mean of the neighbouring secants keeps the pieces monotone
            ds[i] = if l.is_positive() && r.is_positive() { int(2) * l * r / (l + r) } else { Rational::zero() };
        }
        let pieces: Vec<Piece> = (0..k - 1)
            .map(|i| {
                Piece::hermite(
                    xs[i].clone(),
                    xs[i + 1].clone(),
                    ys[i].clone(),
                    ys[i + 1].clone(),
                    ds[i].clone(),
                    ds[i + 1].clone(),
                )
            })
            .collect();
        for p in &pieces {
            let (lo, hi) = quad_range(&p.derivative());
            if lo.is_negative() {
                return Err(Error::Model(format!(
                    "interpolant decreases on [{}, {}]",
                    crate::rational::show(&p.x0),
                    crate::rational::show(&p.x1)
                )));
            }
            if hi > model.slope {
                return Err(Error::Model(format!(
                    "interpolant is steeper than the slope on [{}, {}]",
                    crate::rational::show(&p.x0),
                    crate::rational::show(&p.x1)
                )));
            }
        }
        Ok(Self { flat_end: a, linear_start: b, slope: model.slope.clone(), offset, pieces })
    }

    fn check_range(rho: &Rational) -> Result<()> {
        if rho.is_positive() && *rho < Rational::one() {
            Ok(())
        } else {
            Err(Error::Validation(format!("rho = {} is outside (0, 1)", crate::rational::show(rho))))
        }
    }

    fn piece(&self, rho: &Rational) -> Option<&Piece> {
        self.pieces.iter().find(|p| *rho >= p.x0 && *rho <= p.x1)
    }

    pub fn h_eval(&self, rho: &Rational) -> Result<Rational> {
        Self::check_range(rho)?;
        if *rho <= self.flat_end {
            return Ok(Rational::zero());
        }
        if *rho >= self.linear_start {
            return Ok(&self.slope * (rho - &self.offset));
        }
        Ok(self.piece(rho).expect("pieces cover the region").value(rho))
    }

    pub fn h_prime(&self, rho: &Rational) -> Result<Rational> {
        Self::check_range(rho)?;
        if *rho <= self.flat_end {
            return Ok(Rational::zero());
        }
        if *rho >= self.linear_start {
            return Ok(self.slope.clone());
        }
        Ok(self.piece(rho).expect("pieces cover the region").slope_at(rho))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OrbitClass {
    SH,
    D,
}

impl OrbitClass {
    pub fn name(self) -> &'static str {
        match self {
            OrbitClass::SH => "SH",
            OrbitClass::D => "D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitFamily {
    pub stratum: usize,
    pub level: u32,
    pub winding: i64,
    /// Exact root, or the midpoint of an isolating interval.
    pub rho: Rational,
    /// False when ρ is irrational and only isolated.
    pub exact: bool,
    /// Part of a resonant linear-segment continuum.
    pub resonant: bool,
    pub action: Rational,
    pub index_center: Rational,
    pub index_halfwidth: Rational,
    pub class: OrbitClass,
}

/// Roots in [0, 1] of a0 + a1·s + a2·s²: exact when rational, otherwise
/// isolated to width below 2^-48.
fn quad_roots(a: &[Rational; 3]) -> Vec<(Rational, bool)> {
    let in_unit = |s: &Rational| !s.is_negative() && *s <= Rational::one();
    let mut out = Vec::new();
    if a[2].is_zero() {
        if !a[1].is_zero() {
            let s = -&a[0] / &a[1];
            if in_unit(&s) {
                out.push((s, true));
            }
        }
        return out;
    }
    let disc = &a[1] * &a[1] - int(4) * &a[0] * &a[2];
    if disc.is_negative() {
        return out;
    }
    let (n, d) = (disc.numer().clone(), disc.denom().clone());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn == n && &rd * &rd == d {
        let sq = Rational::new(rn, rd);
        for sgn in [-1, 1] {
            let s = (-&a[1] + int(sgn) * &sq) / (int(2) * &a[2]);
            if in_unit(&s) && !out.iter().any(|(r, _)| *r == s) {
                out.push((s, true));
            }
        }
        out.sort();
        return out;
    }
    // irrational: split [0, 1] at the vertex and bisect sign changes
    let f = |s: &Rational| &a[0] + s * (&a[1] + s * &a[2]);
    let v = -&a[1] / (int(2) * &a[2]);
    let mut cuts = alloc::vec![Rational::zero()];
    if v.is_positive() && v < Rational::one() {
        cuts.push(v);
    }
    cuts.push(Rational::one());
    let eps = Rational::new(BigInt::one(), BigInt::one() << 48);
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        let (flo, fhi) = (f(&lo), f(&hi));
        if flo.is_zero() || fhi.is_zero() || flo.signum() == fhi.signum() {
            continue;
        }
        while &hi - &lo > eps {
            let mid = (&lo + &hi) / int(2);
            if f(&mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(((lo + hi) / int(2), false));
    }
    out
}

/// D-orbit iff ρ > σ; ρ = σ counts as SH.
pub fn classify(model: &DivisorModel, rho: &Rational) -> OrbitClass {
    if *rho > model.sigma() {
        OrbitClass::D
    } else {
        OrbitClass::SH
    }
}

/// A = n·h(ρ) + m·κ_i·(1 − ρ).
pub fn action(
    model: &DivisorModel,
    h: &RadialHamiltonian,
    stratum: usize,
    level: u32,
    winding: i64,
    rho: &Rational,
) -> Result<Rational> {
    Ok(int(level.into()) * h.h_eval(rho)? + int(winding) * model.kappa_i(stratum) * (int(1) - rho))
}

/// (2⌈m⌉, hess_bound).
pub fn index_interval(model: &DivisorModel, winding: &Rational) -> (Rational, Rational) {
    (Rational::from_integer(ceil(winding) * 2), model.hess_bound.clone())
}

fn family(
    model: &DivisorModel,
    h: &RadialHamiltonian,
    stratum: usize,
    level: u32,
    winding: i64,
    rho: Rational,
    exact: bool,
    resonant: bool,
) -> Result<OrbitFamily> {
    let (index_center, index_halfwidth) = index_interval(model, &int(winding));
    Ok(OrbitFamily {
        stratum,
        level,
        winding,
        action: action(model, h, stratum, level, winding, &rho)?,
        class: classify(model, &rho),
        rho,
        exact,
        resonant,
        index_center,
        index_halfwidth,
    })
}

/// All level-n families on the chamber of stratum i, sorted by (m, ρ).
pub fn orbit_scan(model: &DivisorModel, h: &RadialHamiltonian, level: u32, stratum: usize) -> Result<Vec<OrbitFamily>> {
    if level == 0 {
        return Err(Error::Validation("orbit levels start at 1".into()));
    }
    if stratum >= model.spec.n() {
        return Err(Error::Validation(format!("stratum {stratum} does not exist")));
    }
    let n = int(level.into());
    let ki = model.kappa_i(stratum);
    let mut out = alloc::vec![family(model, h, stratum, level, 0, model.flat_end(), true, false)?];
    // windings reachable on the interpolation region: n·h′/κ_i ≤ n·slope/κ_i
    let top = (&n * &model.slope / &ki).floor().to_integer();
    let top = i64::try_from(top).map_err(|_| Error::Model("winding range too large".into()))?;
    for m in 1..=top {
        let target = int(m) * &ki / &n;
        for p in &h.pieces {
            let d = p.derivative();
            let shifted = [&d[0] - &target, d[1].clone(), d[2].clone()];
            for (s, exact) in quad_roots(&shifted) {
                let rho = &p.x0 + s * (&p.x1 - &p.x0);
                if rho >= h.linear_start {
                    continue;
                }
                if out.iter().any(|f| f.winding == m && f.rho == rho) {
                    continue;
                }
                out.push(family(model, h, stratum, level, m, rho, exact, false)?);
            }
        }
    }
    let m_lin = &n * &model.slope / &ki;
    if m_lin.is_integer() {
        // the whole linear segment is a continuum of orbits; keep one
        // representative on each side of σ
        let m = i64::try_from(m_lin.to_integer()).map_err(|_| Error::Model("winding too large".into()))?;
        out.retain(|f| !(f.winding == m && f.rho == h.linear_start));
        out.push(family(model, h, stratum, level, m, model.sigma_minus(), true, true)?);
        out.push(family(model, h, stratum, level, m, model.sigma_plus(), true, true)?);
    }
    out.sort_by(|a, b| (a.winding, &a.rho).cmp(&(b.winding, &b.rho)));
    Ok(out)
}

/// Whether n·h′(ρ)/κ_i equals the recorded winding exactly.
pub fn winding_exact(model: &DivisorModel, h: &RadialHamiltonian, f: &OrbitFamily) -> Result<bool> {
    if !f.exact {
        return Ok(false);
    }
    let m = int(f.level.into()) * h.h_prime(&f.rho)? / model.kappa_i(f.stratum);
    Ok(m == int(f.winding))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCheck {
    pub family: OrbitFamily,
    /// max of 𝒫 over the index interval: C·n + A/κ − (center − halfwidth).
    pub worst_p: Rational,
    /// −worst_p; positive means a strict pass.
    pub margin: Rational,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PReport {
    pub checks: Vec<PCheck>,
}

impl PReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violators(&self) -> impl Iterator<Item = &PCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Worst-case 𝒫 of a family over its index interval.
pub fn worst_p(model: &DivisorModel, f: &OrbitFamily, c: &Rational) -> Rational {
    c * int(f.level.into()) + &f.action / model.spec.kappa() - (&f.index_center - &f.index_halfwidth)
}

/// 𝒫 < 0 across the index interval for every D-orbit family; SH families
/// are exempt.
pub fn p_negativity_check(model: &DivisorModel, families: &[OrbitFamily], c: &Rational) -> PReport {
    let checks = families
        .iter()
        .filter(|f| f.class == OrbitClass::D)
        .map(|f| {
            let w = worst_p(model, f, c);
            PCheck { family: f.clone(), margin: -w.clone(), passed: w.is_negative(), worst_p: w }
        })
        .collect();
    PReport { checks }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub c_condition: bool,
    /// (level, stratum) pairs with n·slope/κ_i ∈ ℤ.
    pub resonances: Vec<(u32, usize)>,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.c_condition && self.resonances.is_empty()
    }
}

/// C + κ⁻¹·C_n > 2 and no resonance n·slope/κ_i ∈ ℤ for n in `levels`.
pub fn slope_admissible(
    model: &DivisorModel,
    c: &Rational,
    c_n_lower_bound: &Rational,
    levels: &[u32],
) -> Admissibility {
    let c_condition = c + c_n_lower_bound / model.spec.kappa() > int(2);
    let mut resonances = Vec::new();
    for &n in levels {
        for i in 0..model.spec.n() {
            if (int(n.into()) * &model.slope / model.kappa_i(i)).is_integer() {
                resonances.push((n, i));
            }
        }
    }
    Admissibility { c_condition, resonances }
}

/// Total order used for reports.
pub fn report_order(a: &OrbitFamily, b: &OrbitFamily) -> Ordering {
    (a.stratum, a.level, a.winding, &a.rho).cmp(&(b.stratum, b.level, b.winding, &b.rho))
}
