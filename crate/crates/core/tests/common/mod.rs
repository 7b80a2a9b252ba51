//! Shared builders and an independent rank oracle for the integration tests.
#![allow(dead_code)]

use mcflow_core::complex::{CGen, CochainComplex};
use mcflow_core::rational::{int, rat};
use mcflow_core::{Degree, Element, Generator, GradedBasis, LInfStructure, Monomial, Rational, RingSpec};
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::collections::BTreeMap;

pub fn spec_n1() -> RingSpec {
    RingSpec::new(vec![int(2)], int(1), int(3)).unwrap()
}

pub fn gen(l: &LInfStructure, id: &str) -> Element {
    Element::generator(l.nvars(), l.basis().index_of(id).unwrap())
}

/// `c·q^e·id` in a one-variable structure.
pub fn qterm(l: &LInfStructure, id: &str, e: i64, c: Rational) -> Element {
    Element::term(l.nvars(), l.basis().index_of(id).unwrap(), Monomial::new(vec![e]), c)
}

/// Orbit generators with integer degrees, level 1 and zero action, and
/// constants written as (inputs, [(coeff, output)]).
pub fn plain_structure(
    gens: &[(&str, i64)],
    max_arity: usize,
    constants: &[(&[&str], &[(i64, &str)])],
) -> LInfStructure {
    let spec = spec_n1();
    let gs = gens.iter().map(|(id, d)| Generator::orbit(id, Degree::integer(*d), 1, int(0))).collect();
    let basis = GradedBasis::new(gs, &spec, true).unwrap();
    let mut l = LInfStructure::new(spec, basis, max_arity);
    for (inputs, out) in constants {
        let mut e = Element::zero(1);
        for (c, id) in out.iter() {
            e = e.add(&gen(&l, id).scale(&int(*c)));
        }
        l.insert(inputs, e).unwrap();
    }
    l
}

pub fn abelian() -> LInfStructure {
    plain_structure(
        &[("a", 0), ("b", 1), ("c", 1), ("e", 2)],
        1,
        &[(&["a"], &[(1, "b"), (1, "c")]), (&["b"], &[(1, "e")]), (&["c"], &[(-1, "e")])],
    )
}

pub fn heisenberg() -> LInfStructure {
    plain_structure(&[("e1", 1), ("e2", 1), ("e3", 1)], 2, &[(&["e1", "e2"], &[(1, "e3")])])
}

/// The binary part alone violates the arity-3 relation on (a, y, y); the
/// ternary constant cancels the defect.
pub fn five_gen() -> LInfStructure {
    five_gen_with(-2)
}

pub fn five_gen_with(ternary: i64) -> LInfStructure {
    plain_structure(
        &[("a", 1), ("b", 2), ("c", 3), ("x", 2), ("y", 2)],
        3,
        &[
            (&["a"], &[(1, "x")]),
            (&["b"], &[(-1, "c")]),
            (&["a", "y"], &[(1, "b")]),
            (&["b", "y"], &[(1, "c")]),
            (&["x", "y"], &[(1, "c")]),
            (&["x", "y", "y"], &[(ternary, "c")]),
        ],
    )
}

/// N = 1, λ = 2, κ = 1, C = 3: formal x with its t-partner and three orbits.
pub fn pipeline_example() -> LInfStructure {
    let spec = spec_n1();
    let x = Generator::formal("x", 0, &spec);
    let gens = vec![
        x.t_decorated(),
        x,
        Generator::orbit("w", Degree::integer(0), 1, int(0)),
        Generator::orbit("a", Degree::integer(1), 1, int(4)),
        Generator::orbit("b", Degree::integer(2), 1, int(1)),
    ];
    let basis = GradedBasis::new(gens, &spec, true).unwrap();
    let mut l = LInfStructure::new(spec, basis, 3);
    let (w, x, a) = (gen(&l, "w"), gen(&l, "x"), gen(&l, "a"));
    l.insert(&["t.x"], w.sub(&x)).unwrap();
    l.insert(&["b", "x"], a.clone()).unwrap();
    l.insert(&["b", "w"], a).unwrap();
    l
}

/// λ = 1/2 with a quadratic correction: the flow runs to second order.
pub fn flow2_example() -> LInfStructure {
    let spec = RingSpec::new(vec![rat(1, 2)], int(1), int(3)).unwrap();
    let x = Generator::formal("x", 0, &spec);
    let gens = vec![
        x.t_decorated(),
        x,
        Generator::orbit("w1", Degree::new(rat(3, 2), 0), 1, int(0)),
        Generator::orbit("w2", Degree::new(int(1), 0), 1, int(0)),
    ];
    let basis = GradedBasis::new(gens, &spec, false).unwrap();
    let mut l = LInfStructure::new(spec, basis, 2);
    let (w1, w2, x) = (gen(&l, "w1"), gen(&l, "w2"), gen(&l, "x"));
    l.insert(&["t.x"], w1.sub(&x)).unwrap();
    l.insert(&["t.x", "x"], w2.clone()).unwrap();
    l.insert(&["t.x", "w1"], w2.scale(&int(2))).unwrap();
    l
}

/// Exact rank by plain Gaussian elimination on a dense rational matrix.
pub fn oracle_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &pivot;
                for c in col..cols {
                    let v = &f * &m[rank][c];
                    m[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A cochain complex over ℚ as integer degrees and a dense matrix with
/// `d[i][j]` the coefficient of generator j in d(generator i).
#[derive(Clone, Debug)]
pub struct Dense {
    pub degrees: Vec<i64>,
    pub d: Vec<Vec<Rational>>,
}

impl Dense {
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    /// dim H^k from the dense matrix alone.
    pub fn oracle_h(&self, k: i64) -> usize {
        let idx = |deg: i64| -> Vec<usize> { (0..self.len()).filter(|&i| self.degrees[i] == deg).collect() };
        let block = |from: &[usize], to: &[usize]| -> Vec<Vec<Rational>> {
            from.iter().map(|&i| to.iter().map(|&j| self.d[i][j].clone()).collect()).collect()
        };
        let (prev, here, next) = (idx(k - 1), idx(k), idx(k + 1));
        here.len() - oracle_rank(block(&here, &next)) - oracle_rank(block(&prev, &here))
    }

    pub fn to_complex(&self, prefix: &str) -> CochainComplex {
        let gens =
            (0..self.len()).map(|i| CGen::new(&format!("{prefix}{i}"), Degree::integer(self.degrees[i]))).collect();
        let mut c = CochainComplex::over_q(gens);
        for i in 0..self.len() {
            for j in 0..self.len() {
                if !self.d[i][j].is_zero() {
                    c.add_rational(i, j, self.d[i][j].clone()).unwrap();
                }
            }
        }
        c
    }
}

pub fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect()).collect()
}

pub fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Seeded draws so every run sees the same random cases.
pub struct Draws(ChaCha8Rng);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// A random complex with d² = 0: a direct sum of acyclic pairs and
/// singletons, then a random degree-preserving change of basis.
pub fn random_complex(r: &mut Draws, max_gens: usize, max_deg: i64) -> Dense {
    let mut degrees = Vec::new();
    let mut pairs = Vec::new();
    let target = 1 + r.below(max_gens as u64) as usize;
    while degrees.len() < target {
        let k = r.range(0, max_deg);
        if degrees.len() + 2 <= target && r.below(2) == 0 && k < max_deg {
            pairs.push((degrees.len(), degrees.len() + 1));
            degrees.push(k);
            degrees.push(k + 1);
        } else {
            degrees.push(k);
        }
    }
    let n = degrees.len();
    let mut d0 = vec![vec![Rational::zero(); n]; n];
    for (i, j) in pairs {
        d0[i][j] = Rational::one();
    }
    let (g, ginv) = random_change(r, &degrees);
    Dense { d: matmul(&matmul(&ginv, &d0), &g), degrees }
}

/// A random degree-preserving invertible matrix and its inverse, built from
/// elementary row operations.
pub fn random_change(r: &mut Draws, degrees: &[i64]) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let n = degrees.len();
    let (mut g, mut ginv) = (identity(n), identity(n));
    for _ in 0..3 * n {
        let (i, j) = (r.below(n as u64) as usize, r.below(n as u64) as usize);
        if degrees[i] != degrees[j] {
            continue;
        }
        if i == j {
            let s = Rational::from_integer(r.range(1, 3).into()) * if r.below(2) == 0 { int(1) } else { int(-1) };
            let mut e = identity(n);
            e[i][i] = s.clone();
            let mut einv = identity(n);
            einv[i][i] = s.recip();
            g = matmul(&e, &g);
            ginv = matmul(&ginv, &einv);
        } else {
            let c = int(r.range(-2, 2));
            let mut e = identity(n);
            e[i][j] = c.clone();
            let mut einv = identity(n);
            einv[i][j] = -c;
            g = matmul(&e, &g);
            ginv = matmul(&ginv, &einv);
        }
    }
    (g, ginv)
}

pub fn rank_table(c: &CochainComplex) -> BTreeMap<Degree, usize> {
    c.cohomology_ranks()
}
