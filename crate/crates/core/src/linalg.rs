//! Exact ranks over ℚ and over the fraction field of a Laurent polynomial ring.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::coeff::NovikovPolynomial;
use crate::rational::Rational;

/// Rank of a dense rational matrix by row reduction.
pub fn rank_q(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for c in col..ncols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..ncols {
                    let delta = &f * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Sparse univariate polynomial over ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly(BTreeMap<u64, Rational>);

impl UPoly {
    pub fn zero() -> Self {
        Self(BTreeMap::new())
    }

    pub fn monomial(e: u64, c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.0.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.0.keys().next_back().copied()
    }

    fn lead(&self) -> Option<(u64, &Rational)> {
        self.0.iter().next_back().map(|(e, c)| (*e, c))
    }

    fn add_term(&mut self, e: u64, c: Rational) {
        let entry = self.0.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let mut out = self.clone();
        for (e, c) in &other.0 {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        let mut out = UPoly::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Quotient by `d`, which must divide `self` exactly.
    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let (de, dc) = d.lead().expect("division by zero polynomial");
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut q = UPoly::zero();
        while let Some((re, rc)) = rem.lead() {
            assert!(re >= de, "inexact polynomial division");
            let c = rc / &dc;
            rem = rem.sub(&UPoly::monomial(re - de, c.clone()).mul(d));
            q.add_term(re - de, c);
        }
        q
    }
}

/// Rank over ℚ(t) by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut m: Vec<Vec<UPoly>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut prev = UPoly::monomial(0, Rational::one());
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let num = m[rank][col].mul(&m[r][c]).sub(&m[r][col].mul(&m[rank][c]));
                m[r][c] = num.div_exact(&prev);
            }
            m[r][col] = UPoly::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over Frac(𝕜[q^±]) of a matrix of Laurent polynomials.
///
/// Every entry is multiplied by one monomial so all exponents are
/// nonnegative, then q_j ↦ t^{B^j} with B larger than any exponent a minor
/// can reach. That substitution is injective on the monomials of every minor,
/// so nonzero minors stay nonzero and the rank is preserved.
pub fn rank_laurent(rows: &[Vec<NovikovPolynomial>]) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    let nvars = rows[0][0].nvars();
    let mut lo = alloc::vec![i64::MAX; nvars];
    let mut hi = alloc::vec![i64::MIN; nvars];
    let mut any = false;
    for p in rows.iter().flatten() {
        for (m, _) in p.terms() {
            any = true;
            for (j, &e) in m.exponents().iter().enumerate() {
                lo[j] = lo[j].min(e);
                hi[j] = hi[j].max(e);
            }
        }
    }
    if !any {
        return 0;
    }
    let span = (0..nvars).map(|j| (hi[j] - lo[j]) as u64).max().unwrap_or(0);
    let size = nrows.min(ncols) as u64;
    let base = span * size + 1;
    let subst = |p: &NovikovPolynomial| -> UPoly {
        let mut out = UPoly::zero();
        for (m, c) in p.terms() {
            let mut e = 0u64;
            let mut scale = 1u64;
            for (j, &x) in m.exponents().iter().enumerate() {
                e += (x - lo[j]) as u64 * scale;
                scale *= base;
            }
            out.add_term(e, c.clone());
        }
        out
    };
    bareiss_rank(rows.iter().map(|r| r.iter().map(subst).collect()).collect())
}
