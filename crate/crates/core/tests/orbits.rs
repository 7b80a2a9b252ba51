use mcflow_core::orbit::{
    action, classify, orbit_scan, p_negativity_check, slope_admissible, winding_exact, DivisorModel, OrbitClass,
    RadialHamiltonian,
};
use mcflow_core::rational::{int, rat};
use mcflow_core::{Rational, RingSpec};
use num_traits::Signed;

fn model(slope: Rational) -> DivisorModel {
    let spec = RingSpec::new(vec![int(2)], int(1), int(3)).unwrap();
    DivisorModel::new(spec, rat(1, 20), slope, rat(1, 2)).unwrap()
}

#[test]
fn scan_matches_closed_form_roots() {
    // on [3/4, 17/20] the single cubic piece is h = (7/40)s², s = 10(ρ − 3/4),
    // so h′ = 35(ρ − 3/4) and n·h′/2 = m gives ρ = 3/4 + 2m/(35n)
    let m = model(rat(7, 2));
    let h = RadialHamiltonian::new(&m, &[]).unwrap();
    for n in 1..=3u32 {
        let fams = orbit_scan(&m, &h, n, 0).unwrap();
        let top = (7 * n as i64) / 4;
        assert_eq!(fams.len() as i64, top + 1, "level {n}");
        assert_eq!(fams[0].winding, 0);
        for f in &fams[1..] {
            let rho = rat(3, 4) + rat(2 * f.winding, 35 * n as i64);
            assert_eq!(f.rho, rho);
            assert!(f.exact && !f.resonant);
            assert!(winding_exact(&m, &h, f).unwrap());
            let s = (&rho - rat(3, 4)) * int(10);
            let by_hand = int(n.into()) * rat(7, 40) * &s * &s + int(f.winding) * int(2) * (int(1) - &rho);
            assert_eq!(f.action, by_hand);
            assert_eq!(f.index_center, int(2 * f.winding));
            assert_eq!(f.class, OrbitClass::SH);
        }
    }
}

#[test]
fn admissible_model_passes_every_check() {
    let m = model(rat(7, 2));
    let h = RadialHamiltonian::new(&m, &[]).unwrap();
    let mut all = Vec::new();
    for n in 1..=3 {
        all.extend(orbit_scan(&m, &h, n, 0).unwrap());
    }
    assert!(all.iter().all(|f| winding_exact(&m, &h, f).unwrap()));
    assert!(all.iter().all(|f| (f.class == OrbitClass::D) == (f.rho > m.sigma())));
    assert!(p_negativity_check(&m, &all, &int(3)).passed());
    let adm = slope_admissible(&m, &int(3), &int(0), &[1, 2, 3]);
    assert!(adm.c_condition && adm.resonances.is_empty() && adm.admissible());
}

#[test]
fn resonant_slope_is_flagged_and_its_d_orbits_violate() {
    // slope = κ₁ makes the whole linear segment one orbit family
    let m = model(int(2));
    let h = RadialHamiltonian::new(&m, &[]).unwrap();
    let fams = orbit_scan(&m, &h, 1, 0).unwrap();
    let d: Vec<_> = fams.iter().filter(|f| f.class == OrbitClass::D).collect();
    assert_eq!(d.len(), 1);
    assert!(d[0].resonant);
    // A = 2·(3η) + 2·η = 8η = 2/5; 𝒫 ≤ 3 + 2/5 − (2 − 1/2)
    assert_eq!(d[0].action, rat(2, 5));
    let report = p_negativity_check(&m, &fams, &int(3));
    assert!(!report.passed());
    assert_eq!(report.violators().next().unwrap().worst_p, rat(19, 10));
    assert_eq!(slope_admissible(&m, &int(3), &int(0), &[1]).resonances, vec![(1, 0)]);
}

#[test]
fn slow_levels_have_only_constant_orbits() {
    let m = model(rat(3, 2));
    let h = RadialHamiltonian::new(&m, &[]).unwrap();
    let fams = orbit_scan(&m, &h, 1, 0).unwrap();
    assert_eq!(fams.len(), 1);
    assert_eq!(fams[0].action, int(0));
    assert_eq!(classify(&m, &fams[0].rho), OrbitClass::SH);
}

#[test]
fn action_example_by_substitution() {
    // m = 1, κ₁ = 2, ρ = 1/2 in the flat region: A = 0 + 1·2·(1/2)
    let m = model(rat(7, 2));
    let h = RadialHamiltonian::new(&m, &[]).unwrap();
    assert_eq!(action(&m, &h, 0, 1, 1, &rat(1, 2)).unwrap(), int(1));
}

#[test]
fn knotted_hamiltonian_roots_are_exact_or_isolated() {
    let m = model(rat(7, 2));
    let h = RadialHamiltonian::new(&m, &[(rat(4, 5), rat(1, 25)), (rat(33, 40), rat(11, 100))]).unwrap();
    for n in 1..=3 {
        let fams = orbit_scan(&m, &h, n, 0).unwrap();
        assert!(fams.len() > 1);
        for f in &fams[1..] {
            let w = int(n.into()) * h.h_prime(&f.rho).unwrap() / int(2);
            if f.exact {
                assert_eq!(w, int(f.winding));
            } else {
                assert!((w - int(f.winding)).abs() < rat(1, 1 << 30));
            }
        }
    }
}

#[test]
fn doubling_the_slope_doubles_c() {
    let m = model(rat(7, 2));
    let (m2, c2) = m.scale_slope(&int(2), &int(3)).unwrap();
    assert_eq!(m2.slope, int(7));
    assert_eq!(c2, int(6));
    // C grows with the slope, so the C-condition is kept
    assert!(slope_admissible(&m2, &c2, &int(0), &[]).c_condition);
}

#[test]
fn invalid_inputs_are_rejected() {
    let spec = RingSpec::new(vec![int(2)], int(1), int(3)).unwrap();
    assert!(DivisorModel::new(spec.clone(), rat(1, 10), int(1), int(0)).is_err());
    assert!(DivisorModel::new(spec, rat(1, 20), int(0), int(0)).is_err());
    let m = model(rat(7, 2));
    let h = RadialHamiltonian::new(&m, &[]).unwrap();
    assert!(h.h_eval(&int(0)).is_err());
    assert!(orbit_scan(&m, &h, 0, 0).is_err());
    assert!(orbit_scan(&m, &h, 1, 1).is_err());
    // decreasing values and an overshooting interpolant are refused
    assert!(RadialHamiltonian::new(&m, &[(rat(4, 5), rat(1, 40)), (rat(33, 40), rat(1, 10))]).is_err());
    assert!(RadialHamiltonian::new(&m, &[(rat(4, 5), rat(1, 10)), (rat(33, 40), rat(1, 20))]).is_err());
}
