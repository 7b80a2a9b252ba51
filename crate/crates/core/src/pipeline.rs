//! The comparison pipeline: divisor flow to α₁, the deformed SC complex over
//! R, the Φ-conjugated α₀ complex, and per-class rank equality.
//!
//! The quantum-side differential is the Φ-conjugate of ℓ¹_{α₀}; no second
//! family of almost complex structures is modelled.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::One;

use crate::complex::{linf_complex, phi_conjugate, ranks_agree, CapAssignment, CochainComplex};
use crate::error::{Error, Result};
use crate::graded::{Degree, Element};
use crate::linf::{LInfStructure, PartialDomain, RelationOptions};
use crate::mc::{deform, divisor_flow, is_mc, path_curvature, tautological_mc, weight_zero_part, TauPath};
use crate::rational::{show, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub name: &'static str,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub k: i64,
    pub t: usize,
    /// ℱ threshold for the filtered evidence, if any.
    pub p: Option<Rational>,
    /// Arity bound for the relation check on 𝔤_{>1}.
    pub relation_arity: usize,
    pub relations: RelationOptions,
}

impl PipelineOptions {
    pub fn new(k: i64) -> Self {
        Self { k, t: k.max(1) as usize, p: None, relation_arity: 4, relations: RelationOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub stages: Vec<Stage>,
    pub alpha0: Element,
    pub alpha1: Element,
    pub path: TauPath,
    pub sc_alpha1: CochainComplex,
    pub sc_alpha0: CochainComplex,
    pub qc: CochainComplex,
    pub ranks_sc_alpha1: BTreeMap<Degree, usize>,
    pub ranks_sc_alpha0: BTreeMap<Degree, usize>,
    pub ranks_qc: BTreeMap<Degree, usize>,
    /// Ranks of ℱ_{≥p} SC, when a threshold was given.
    pub ranks_filtered: Option<BTreeMap<Degree, usize>>,
    pub verdict: bool,
}

fn fail(stage: &'static str, witness: impl ToString) -> Error {
    Error::Stage { stage: stage.into(), witness: witness.to_string() }
}

/// Run every stage; the first failing stage aborts with its witness.
pub fn theorem_pipeline(l: &LInfStructure, caps: &CapAssignment, opts: &PipelineOptions) -> Result<PipelineReport> {
    let spec = l.spec();
    let basis = l.basis();
    let mut stages = Vec::new();

    // validate
    if let Some(v) = l.validate_model().into_iter().next() {
        return Err(fail("validate", format!("{} on {:?}: {}", v.kind.name(), v.inputs, v.detail)));
    }
    let domain = PartialDomain::above(Rational::one());
    let rel = l.check_linf_relations(&domain, opts.relation_arity.min(l.max_arity() + 1), &opts.relations)?;
    if let Some(v) = rel.violations.first() {
        return Err(fail(
            "validate",
            format!("relation fails on {:?}: residual {}", l.ids(&v.inputs), v.residual.display(basis)),
        ));
    }
    stages.push(Stage {
        name: "validate",
        notes: alloc::vec![format!(
            "{} constants; relations hold on {} tuples of g_{{>1}} up to arity {}{}",
            l.num_constants(),
            rel.tuples_checked,
            rel.up_to_d,
            if rel.exhaustive { "" } else { " (sampled)" }
        )],
    });

    // hypothesis
    if !spec.hypothesis_flag() {
        return Err(fail("hypothesis", "some lambda_j exceeds 2"));
    }
    stages.push(Stage { name: "hypothesis", notes: alloc::vec!["lambda_j <= 2 for all j".into()] });

    // divisor flow
    let alpha0 = tautological_mc(spec, basis)?;
    let (path, alpha1) = divisor_flow(l, opts.k, opts.t).map_err(|e| fail("divisor_flow", e))?;
    let wz = weight_zero_part(l, &path);
    for (i, x) in wz.iter().enumerate() {
        let want = match i {
            0 => alpha0.clone(),
            1 => alpha0.scale(&-Rational::one()),
            _ => Element::zero(l.nvars()),
        };
        if !x.eq_mod(&want, opts.k) {
            return Err(fail("divisor_flow", format!("weight-zero part at tau^{i} is {}", x.display(basis))));
        }
    }
    for (i, r) in path_curvature(l, &path)?.iter().enumerate() {
        if !r.is_zero() {
            return Err(fail("divisor_flow", format!("curvature at tau^{i} is {}", r.display(basis))));
        }
    }
    if !path.filtration_gain() {
        return Err(fail("divisor_flow", "some c_i leaves Q_{>=i}"));
    }
    for g in alpha1.support() {
        let x = basis.get(g);
        if !x.is_orbit() || x.p_value(spec) <= Rational::one() {
            return Err(fail("divisor_flow", format!("alpha_1 has a term on `{}`", x.id)));
        }
    }
    let (ok, residual) = is_mc(&alpha1, l, opts.k)?;
    if !ok {
        return Err(fail("divisor_flow", format!("alpha_1 has curvature {}", residual.display(basis))));
    }
    stages.push(Stage {
        name: "divisor_flow",
        notes: alloc::vec![
            format!("alpha_0 = {}", alpha0.display(basis)),
            format!("alpha_1 = {}", alpha1.display(basis)),
            format!("weight-zero part (1 - tau)*alpha_0; curvature zero through tau^{}", opts.t),
        ],
    });

    // deform and build the SC complexes on the orbit generators
    let orbits: Vec<usize> = (0..basis.len()).filter(|&g| basis.get(g).is_orbit()).collect();
    let def1 = deform(l, &alpha1, opts.k, 1).map_err(|e| fail("deform", e))?;
    let def0 = deform(l, &alpha0, opts.k, 1).map_err(|e| fail("deform", e))?;
    let sc_alpha1 = linf_complex(&def1, &orbits).map_err(|e| fail("deform", e))?;
    let sc_alpha0 = linf_complex(&def0, &orbits).map_err(|e| fail("deform", e))?;
    sc_alpha1.validate().map_err(|e| fail("deform", e))?;
    sc_alpha0.validate().map_err(|e| fail("deform", e))?;
    stages.push(Stage {
        name: "deform",
        notes: alloc::vec![format!(
            "l1 deformed by alpha_0 and alpha_1 on {} orbit generators, mod Q_{{>={}}}",
            orbits.len(),
            opts.k
        )],
    });

    // Φ conjugation
    let qc = phi_conjugate(&sc_alpha0, caps).map_err(|e| fail("phi", e))?;
    qc.validate().map_err(|e| fail("phi", e))?;
    stages.push(Stage { name: "phi", notes: alloc::vec!["QC differential = Phi o l1_{alpha_0} o Phi^-1".into()] });

    // ranks
    let ranks_sc_alpha1 = sc_alpha1.cohomology_ranks();
    let ranks_sc_alpha0 = sc_alpha0.cohomology_ranks();
    let ranks_qc = if spec.n() == 1 { qc.graded_piece_ranks()? } else { qc.cohomology_ranks() };
    if !ranks_agree(&ranks_sc_alpha0, &ranks_sc_alpha1) {
        return Err(fail("compare", "ranks under alpha_0 and alpha_1 differ"));
    }
    if !ranks_agree(&ranks_sc_alpha1, &ranks_qc) {
        return Err(fail("compare", "SC and QC ranks differ"));
    }
    stages.push(Stage {
        name: "compare",
        notes: alloc::vec![format!(
            "SC ranks by fraction-free elimination, QC ranks by {}",
            if spec.n() == 1 { "graded pieces" } else { "fraction-free elimination" }
        )],
    });

    let ranks_filtered = match &opts.p {
        None => None,
        Some(p) => {
            let sub = sc_alpha1.f_subcomplex(Some(p)).map_err(|e| fail("filtration", e))?;
            stages.push(Stage {
                name: "filtration",
                notes: alloc::vec![format!(
                    "F_{{>={}}} keeps {} of {} generators",
                    show(p),
                    sub.len(),
                    sc_alpha1.len()
                )],
            });
            Some(sub.cohomology_ranks())
        }
    };

    Ok(PipelineReport {
        stages,
        alpha0,
        alpha1,
        path,
        sc_alpha1,
        sc_alpha0,
        qc,
        ranks_sc_alpha1,
        ranks_sc_alpha0,
        ranks_qc,
        ranks_filtered,
        verdict: true,
    })
}
