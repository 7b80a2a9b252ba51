mod common;

use common::*;
use mcflow_core::complex::{quasi_iso_check, telescope, CGen, ChainMap, CochainComplex, DirectedSystem, TelescopeMode};
use mcflow_core::rational::{int, rat};
use mcflow_core::{Degree, Rational};
use num_traits::Zero;

/// A complex over ℚ read back into dense form.
fn dense_of(c: &CochainComplex) -> Dense {
    let n = c.len();
    let mut d = vec![vec![Rational::zero(); n]; n];
    for (i, j, p) in c.entries() {
        let mut it = p.terms();
        let (m, v) = it.next().unwrap();
        assert!(it.next().is_none() && m.exponents().iter().all(|&e| e == 0));
        d[i][j] = v.clone();
    }
    let degrees = c.gens().iter().map(|g| g.degree.qpart.to_integer().try_into().unwrap()).collect();
    Dense { degrees, d }
}

/// m levels, each the previous one conjugated by a random invertible
/// degree-preserving matrix, which is also the continuation map.
fn random_system(r: &mut Draws) -> (DirectedSystem, Vec<Dense>) {
    let levels = r.range(1, 4) as usize;
    let mut dense = vec![random_complex(r, 4, 3)];
    let mut maps = Vec::new();
    for n in 1..levels {
        let prev = dense[n - 1].clone();
        let (g, ginv) = random_change(r, &prev.degrees);
        let next = Dense { d: matmul(&matmul(&ginv, &prev.d), &g), degrees: prev.degrees.clone() };
        let mut f = ChainMap::new(prev.to_complex("g"), next.to_complex("g"));
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                f.set_rational(i, j, v.clone());
            }
        }
        maps.push(f.entries);
        dense.push(next);
    }
    let system = DirectedSystem { levels: dense.iter().map(|d| d.to_complex("g")).collect(), maps };
    (system, dense)
}

#[test]
fn telescope_computes_the_colimit() {
    let mut r = Draws::new(5);
    for case in 0..50 {
        let (system, dense) = random_system(&mut r);
        let tel = telescope(&system, TelescopeMode::Truncated).unwrap();
        tel.validate().unwrap();
        assert!(tel.d_squared().unwrap().is_empty());
        // with invertible continuations the colimit is the last level
        let last = dense.last().unwrap();
        let ranks = tel.cohomology_ranks();
        let tel_dense = dense_of(&tel);
        for k in -1..=5 {
            let want = last.oracle_h(k);
            assert_eq!(ranks.get(&Degree::integer(k)).copied().unwrap_or(0), want, "case {case}, degree {k}");
            assert_eq!(tel_dense.oracle_h(k), want, "case {case}, degree {k} (dense)");
        }
    }
}

#[test]
fn literal_telescope_of_one_complex_is_acyclic() {
    let mut r = Draws::new(11);
    for _ in 0..10 {
        let c = random_complex(&mut r, 4, 3).to_complex("g");
        let system = DirectedSystem { levels: vec![c.clone()], maps: vec![] };
        let lit = telescope(&system, TelescopeMode::Literal).unwrap();
        lit.validate().unwrap();
        assert!(lit.cohomology_ranks().values().all(|&x| x == 0));
        let tr = telescope(&system, TelescopeMode::Truncated).unwrap();
        assert_eq!(tr.len(), c.len());
    }
}

#[test]
fn telescope_rejects_a_non_chain_continuation() {
    let mut c = CochainComplex::over_q(vec![CGen::new("x", Degree::integer(0)), CGen::new("y", Degree::integer(1))]);
    c.add_rational(0, 1, int(1)).unwrap();
    let mut f = ChainMap::new(c.clone(), c.clone());
    f.set_rational(0, 0, int(1));
    let system = DirectedSystem { levels: vec![c.clone(), c], maps: vec![f.entries] };
    assert!(telescope(&system, TelescopeMode::Truncated).is_err());
}

#[test]
fn truncation_keeps_low_cohomology() {
    let mut r = Draws::new(6);
    for case in 0..50 {
        let dense = random_complex(&mut r, 8, 5);
        let c = dense.to_complex("g");
        let p = rat(r.range(2, 12), 2);
        let cut = c.truncate_below(&p);
        cut.validate().unwrap();
        let (full, low) = (c.cohomology_ranks(), cut.cohomology_ranks());
        for j in -1..=5 {
            if Rational::from_integer(j.into()) < &p - int(1) {
                let want = dense.oracle_h(j);
                assert_eq!(full.get(&Degree::integer(j)).copied().unwrap_or(0), want, "case {case}, j = {j}");
                assert_eq!(low.get(&Degree::integer(j)).copied().unwrap_or(0), want, "case {case}, j = {j}, p = {p}");
            }
        }
    }
}

#[test]
fn truncation_can_change_the_top_degree() {
    // x → y with y in degree 1; cutting below 1 leaves x as a cocycle
    let mut c = CochainComplex::over_q(vec![CGen::new("x", Degree::integer(0)), CGen::new("y", Degree::integer(1))]);
    c.add_rational(0, 1, int(1)).unwrap();
    assert_eq!(c.cohomology_ranks().get(&Degree::integer(0)).copied().unwrap_or(0), 0);
    let cut = c.truncate_below(&int(1));
    assert_eq!(cut.cohomology_ranks().get(&Degree::integer(0)), Some(&1));
}

#[test]
fn rank_oracle_agrees_on_random_complexes() {
    let mut r = Draws::new(8);
    for _ in 0..50 {
        let dense = random_complex(&mut r, 8, 4);
        let ranks = dense.to_complex("g").cohomology_ranks();
        for k in -1..=5 {
            assert_eq!(ranks.get(&Degree::integer(k)).copied().unwrap_or(0), dense.oracle_h(k));
        }
    }
}

#[test]
fn change_of_basis_is_a_quasi_isomorphism() {
    let mut r = Draws::new(9);
    for _ in 0..20 {
        let a = random_complex(&mut r, 6, 3);
        let (g, ginv) = random_change(&mut r, &a.degrees);
        let b = Dense { d: matmul(&matmul(&ginv, &a.d), &g), degrees: a.degrees.clone() };
        let mut f = ChainMap::new(a.to_complex("g"), b.to_complex("g"));
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                f.set_rational(i, j, v.clone());
            }
        }
        assert!(quasi_iso_check(&f).unwrap().quasi_iso);
        // the zero map is a quasi-isomorphism only between acyclic complexes
        let z = ChainMap::new(a.to_complex("g"), b.to_complex("g"));
        let acyclic = (-1..=4).all(|k| a.oracle_h(k) == 0);
        assert_eq!(quasi_iso_check(&z).unwrap().quasi_iso, acyclic);
    }
}

#[test]
fn filtered_subcomplex_and_associated_graded() {
    let gens = vec![
        CGen::filtered("u", Degree::integer(0), int(1)),
        CGen::filtered("v", Degree::integer(1), int(1)),
        CGen::filtered("w", Degree::integer(1), int(3)),
    ];
    let mut c = CochainComplex::over_q(gens);
    c.add_rational(0, 1, int(1)).unwrap();
    c.add_rational(0, 2, int(2)).unwrap();
    c.validate().unwrap();
    let sub = c.f_subcomplex(Some(&int(2))).unwrap();
    assert_eq!(sub.len(), 1);
    let gr = c.associated_graded().unwrap();
    assert_eq!(gr.entries().count(), 1);
    // an entry that lowers F is refused
    let gens = vec![CGen::filtered("u", Degree::integer(0), int(3)), CGen::filtered("v", Degree::integer(1), int(1))];
    let mut down = CochainComplex::over_q(gens);
    down.add_rational(0, 1, int(1)).unwrap();
    assert!(down.f_subcomplex(None).is_err());
}
