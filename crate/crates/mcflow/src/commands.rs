//! One function per subcommand. Each returns both renderings of its report
//! so the caller only picks a format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use mcflow_core::complex::{telescope, CochainComplex, TelescopeMode};
use mcflow_core::linf::RelationOptions;
use mcflow_core::mc::{curvature, deform, divisor_flow, path_curvature, tautological_mc, weight_zero_part};
use mcflow_core::orbit::{orbit_scan, p_negativity_check, report_order, slope_admissible, worst_p, OrbitClass};
use mcflow_core::pipeline::{theorem_pipeline, PipelineOptions};
use mcflow_core::rational::show;
use mcflow_core::{Degree, Element, GradedBasis, LInfStructure, PartialDomain, Rational};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::io::rational_value;
use crate::parallel::{check_relations, pool};
use crate::workspace::{CliError, Workspace};

/// Flag values shared by every command.
#[derive(Clone, Debug)]
pub struct Settings {
    pub k: i64,
    pub t: Option<usize>,
    pub max_arity: Option<usize>,
    pub p: Option<Rational>,
    pub seed: u64,
    pub mode: TelescopeMode,
    pub levels: Vec<u32>,
    pub cn_bound: Rational,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            k: 4,
            t: None,
            max_arity: None,
            p: None,
            seed: 0,
            mode: TelescopeMode::Truncated,
            levels: vec![1, 2, 3],
            cn_bound: Rational::zero(),
        }
    }
}

impl Settings {
    fn t(&self) -> usize {
        self.t.unwrap_or(self.k.max(1) as usize)
    }

    fn relations(&self) -> RelationOptions {
        RelationOptions { seed: self.seed, ..RelationOptions::default() }
    }
}

/// A finished report. `code` is the process exit code and `diagnostic`
/// goes to stderr.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Self { code: 0, text, json, diagnostic: None }
    }

    fn failed(mut self, why: String) -> Self {
        self.code = 1;
        self.diagnostic = Some(why);
        self
    }
}

pub fn element_json(e: &Element, basis: &GradedBasis) -> Value {
    Value::Array(
        e.terms()
            .map(|(g, m, c)| json!({"gen": basis.get(g).id, "coeff": rational_value(c), "monomial": m.exponents()}))
            .collect(),
    )
}

fn ranks_json(r: &BTreeMap<Degree, usize>) -> Value {
    Value::Array(
        r.iter().map(|(d, n)| json!({"qdeg": rational_value(&d.qpart), "parity": d.parity, "rank": n})).collect(),
    )
}

fn ranks_text(out: &mut String, label: &str, r: &BTreeMap<Degree, usize>) {
    let cells: Vec<String> = r.iter().filter(|(_, &n)| n > 0).map(|(d, n)| format!("H{d} = {n}")).collect();
    let body = if cells.is_empty() { "all zero".to_string() } else { cells.join(", ") };
    let _ = writeln!(out, "{label}: {body}");
}

fn constants_json(l: &LInfStructure) -> Value {
    Value::Array(
        l.constants()
            .map(|(ins, e)| json!({"d": ins.len(), "inputs": l.ids(ins), "output": element_json(e, l.basis())}))
            .collect(),
    )
}

fn default_beta(ws: &Workspace, l: &LInfStructure) -> Result<Element, CliError> {
    match &ws.beta {
        Some(b) => Ok(b.clone()),
        None => Ok(tautological_mc(l.spec(), l.basis())?),
    }
}

/// Writes `Σ s_i τ^i` as `(1 - tau)`, `(2 + 3*tau^2)` and so on.
fn tau_poly(s: &[Rational]) -> String {
    let mut out = String::new();
    for (i, c) in s.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let a = if c < &Rational::zero() { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if c < &Rational::zero() {
                out.push('-');
            }
        } else {
            out.push_str(if c < &Rational::zero() { " - " } else { " + " });
        }
        let var = match i {
            0 => String::new(),
            1 => "tau".into(),
            _ => format!("tau^{i}"),
        };
        match (a.is_one(), var.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&var),
            (false, true) => out.push_str(&show(&a)),
            (false, false) => {
                let _ = write!(out, "{}*{var}", show(&a));
            }
        }
    }
    format!("({out})")
}

/// c_τ written as (polynomial in τ)·c₀ when every c_i is a multiple of c₀.
fn factored(c: &[Element], basis: &GradedBasis) -> Option<String> {
    let first = c.first().filter(|x| !x.is_zero())?;
    let (g, m, lead) = first.terms().next()?;
    let mut s = Vec::with_capacity(c.len());
    for x in c {
        let ratio = x.coefficient(g, m) / lead;
        if !x.eq_mod(&first.scale(&ratio), i64::MAX) {
            return None;
        }
        s.push(ratio);
    }
    Some(format!("{}*({})", tau_poly(&s), first.display(basis)))
}

pub fn validate(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let mut text = String::new();
    let mut report = serde_json::Map::new();
    let mut failure: Option<String> = None;
    let note = |failure: &mut Option<String>, text: &mut String, ok: bool, line: String| {
        let _ = writeln!(text, "{} {line}", if ok { "ok  " } else { "FAIL" });
        if !ok && failure.is_none() {
            *failure = Some(line);
        }
    };

    if let Some(l) = &ws.structure {
        let violations = l.validate_model();
        let first = violations.first().map(|v| format!("{} on {:?}: {}", v.kind.name(), v.inputs, v.detail));
        note(
            &mut failure,
            &mut text,
            first.is_none(),
            first.clone().unwrap_or_else(|| {
                format!(
                    "{} generators, {} constants: degree law, P law, symmetry and d_t rule hold",
                    l.basis().len(),
                    l.num_constants()
                )
            }),
        );
        let up_to = s.max_arity.unwrap_or(4);
        let rel = check_relations(&pool()?, l, &PartialDomain::everything(), up_to, &s.relations())?;
        let witness = rel.violations.first().map(|v| {
            format!(
                "relation fails at arity {} on {:?}: residual {}",
                v.inputs.len(),
                l.ids(&v.inputs),
                v.residual.display(l.basis())
            )
        });
        note(
            &mut failure,
            &mut text,
            rel.passed(),
            witness.clone().unwrap_or_else(|| {
                format!(
                    "relations hold up to arity {up_to} on {} tuples{}",
                    rel.tuples_checked,
                    if rel.exhaustive { "" } else { " (sampled)" }
                )
            }),
        );
        report.insert(
            "structure".into(),
            json!({
                "generators": l.basis().len(),
                "constants": l.num_constants(),
                "violations": violations.len(),
                "first_violation": first,
                "relations": {
                    "up_to_d": up_to,
                    "tuples_checked": rel.tuples_checked,
                    "exhaustive": rel.exhaustive,
                    "failures": rel.violations.len(),
                    "first_failing_arity": rel.first_failing_arity(),
                    "witness": witness,
                },
            }),
        );
        if let Some(caps) = &ws.caps {
            let missing: Vec<&str> = l
                .basis()
                .generators()
                .iter()
                .filter(|g| g.is_orbit() && caps.get(&g.id).is_err())
                .map(|g| g.id.as_str())
                .collect();
            note(
                &mut failure,
                &mut text,
                missing.is_empty(),
                if missing.is_empty() {
                    "caps cover every orbit generator".into()
                } else {
                    format!("no cap for {missing:?}")
                },
            );
            report.insert("caps_missing".into(), json!(missing));
        }
    }
    if let Some(c) = &ws.complex {
        let r = c.validate();
        note(
            &mut failure,
            &mut text,
            r.is_ok(),
            match &r {
                Ok(()) => format!("complex on {} generators: degree law and d^2 = 0 hold", c.len()),
                Err(e) => format!("complex: {e}"),
            },
        );
        report.insert("complex".into(), json!({"generators": c.len(), "error": r.err().map(|e| e.to_string())}));
    }
    if let Some(sys) = &ws.system {
        let r = sys.validate();
        note(
            &mut failure,
            &mut text,
            r.is_ok(),
            match &r {
                Ok(()) => format!("directed system of {} levels: complexes and chain maps check out", sys.levels.len()),
                Err(e) => format!("directed system: {e}"),
            },
        );
        report.insert("system".into(), json!({"levels": sys.levels.len(), "error": r.err().map(|e| e.to_string())}));
    }
    if let Some((m, _)) = &ws.orbit {
        note(
            &mut failure,
            &mut text,
            true,
            format!(
                "orbit model: eta = {}, slope = {}, Hamiltonian monotone and within the slope",
                show(&m.eta),
                show(&m.slope)
            ),
        );
        report.insert("orbit_model".into(), json!(true));
    }
    if report.is_empty() {
        return Err(CliError::input("nothing to validate"));
    }
    report.insert("passed".into(), json!(failure.is_none()));
    let out = Outcome::ok(text, Value::Object(report));
    Ok(match failure {
        Some(w) => out.failed(w),
        None => out,
    })
}

pub fn curvature_cmd(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let l = ws.structure()?;
    let beta = default_beta(ws, l)?;
    let f = curvature(&beta, l, s.k)?;
    let basis = l.basis();
    let text = format!(
        "beta = {}\nF(beta) mod Q_{{>={}}} = {}\nMaurer-Cartan: {}\n",
        beta.display(basis),
        s.k,
        f.display(basis),
        if f.is_zero() { "yes" } else { "no" }
    );
    let json = json!({
        "K": s.k,
        "beta": element_json(&beta, basis),
        "curvature": element_json(&f, basis),
        "is_mc": f.is_zero(),
    });
    Ok(Outcome::ok(text, json))
}

pub fn deform_cmd(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let l = ws.structure()?;
    let beta = default_beta(ws, l)?;
    let up_to = s.max_arity.unwrap_or(l.max_arity());
    let def = deform(l, &beta, s.k, up_to)?;
    let basis = def.basis();
    let mut text =
        format!("beta = {}\nconstants of l_beta up to arity {up_to}, mod Q_{{>={}}}:\n", beta.display(basis), s.k);
    for (ins, e) in def.constants() {
        let _ = writeln!(text, "  l{}({}) = {}", ins.len(), def.ids(ins).join(", "), e.display(basis));
    }
    let json =
        json!({"K": s.k, "beta": element_json(&beta, basis), "max_arity": up_to, "constants": constants_json(&def)});
    Ok(Outcome::ok(text, json))
}

pub fn flow(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let l = ws.structure()?;
    let basis = l.basis();
    let t = s.t();
    let (path, alpha1) = divisor_flow(l, s.k, t)?;
    let alpha0 = &path.c[0];
    let wz = weight_zero_part(l, &path);
    let wz_ok = wz.iter().enumerate().all(|(i, x)| {
        let want = match i {
            0 => alpha0.clone(),
            1 => alpha0.scale(&-Rational::one()),
            _ => Element::zero(l.nvars()),
        };
        x.eq_mod(&want, s.k)
    });
    let curv = path_curvature(l, &path)?;
    let nonzero: Vec<usize> = curv.iter().enumerate().filter(|(_, r)| !r.is_zero()).map(|(i, _)| i).collect();
    let gain = path.filtration_gain();

    let mut text = String::new();
    let _ = writeln!(text, "flow mod Q_{{>={}}} and tau^{}", s.k, t + 1);
    let _ = writeln!(text, "alpha_0 = {}", alpha0.display(basis));
    let _ = writeln!(text, "gamma = {}", path.gamma[0].display(basis));
    for (i, c) in path.c.iter().enumerate() {
        let _ = writeln!(text, "c_{i} = {}", c.display(basis));
    }
    if let Some(f) = factored(&path.c, basis) {
        let _ = writeln!(text, "c_tau = {f}");
    }
    match factored(&wz, basis) {
        Some(f) => {
            let _ = writeln!(text, "weight-zero part = {f}");
        }
        None => {
            for (i, x) in wz.iter().enumerate() {
                let _ = writeln!(text, "weight-zero part at tau^{i} = {}", x.display(basis));
            }
        }
    }
    for (i, r) in curv.iter().enumerate().filter(|(_, r)| !r.is_zero()) {
        let _ = writeln!(text, "[tau^{i}] F(c_tau) = {}", r.display(basis));
    }
    let _ = writeln!(text, "alpha_1 = {}", alpha1.display(basis));
    let _ = writeln!(text, "weight-zero part is (1 - tau)*alpha_0: {}", if wz_ok { "yes" } else { "no" });
    let _ = writeln!(
        text,
        "F(c_tau) = 0 at every tau-order: {} ({} nonzero)",
        if nonzero.is_empty() { "yes" } else { "no" },
        nonzero.len()
    );
    let _ = writeln!(text, "c_i in Q_{{>=i}}: {}", if gain { "yes" } else { "no" });

    let json = json!({
        "K": s.k,
        "T": t,
        "alpha0": element_json(alpha0, basis),
        "gamma": element_json(&path.gamma[0], basis),
        "c": path.c.iter().map(|c| element_json(c, basis)).collect::<Vec<_>>(),
        "weight_zero": wz.iter().map(|c| element_json(c, basis)).collect::<Vec<_>>(),
        "curvature": curv.iter().map(|c| element_json(c, basis)).collect::<Vec<_>>(),
        "alpha1": element_json(&alpha1, basis),
        "checks": {
            "weight_zero_is_one_minus_tau_alpha0": wz_ok,
            "curvature_nonzero_orders": nonzero,
            "filtration_gain": gain,
        },
    });
    let out = Outcome::ok(text, json);
    Ok(if !wz_ok {
        out.failed("weight-zero part of the flow is not (1 - tau)*alpha_0".into())
    } else if let Some(i) = nonzero.first() {
        out.failed(format!("curvature of c_tau is nonzero at tau^{i}"))
    } else if !gain {
        out.failed("some c_i leaves Q_{>=i}".into())
    } else {
        out
    })
}

fn complex_report(label: &str, c: &CochainComplex) -> (String, Value) {
    let ranks = c.cohomology_ranks();
    let mut text = String::new();
    ranks_text(&mut text, label, &ranks);
    (text, ranks_json(&ranks))
}

pub fn telescope_cmd(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let sys = ws.system.as_ref().ok_or_else(|| CliError::input("no directed system was loaded"))?;
    sys.validate()?;
    let tel = telescope(sys, s.mode)?;
    tel.validate()?;
    let mode = match s.mode {
        TelescopeMode::Truncated => "truncated",
        TelescopeMode::Literal => "literal",
    };
    let mut text = format!("telescope ({mode}) of {} levels: {} generators, d^2 = 0\n", sys.levels.len(), tel.len());
    let (t, tel_ranks) = complex_report("telescope", &tel);
    text.push_str(&t);
    let mut levels = Vec::new();
    for (n, c) in sys.levels.iter().enumerate() {
        let (t, r) = complex_report(&format!("level {}", n + 1), c);
        text.push_str(&t);
        levels.push(r);
    }
    let _ = writeln!(text, "last two levels agree: {}", if sys.stable() { "yes" } else { "no" });
    let json = json!({
        "mode": mode,
        "generators": tel.len(),
        "ranks": tel_ranks,
        "level_ranks": levels,
        "stable": sys.stable(),
    });
    Ok(Outcome::ok(text, json))
}

pub fn cohomology(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let c = ws.complex.as_ref().ok_or_else(|| CliError::input("no complex was loaded"))?;
    c.validate()?;
    let (mut text, ranks) = complex_report("H", c);
    let mut json = json!({"generators": c.len(), "ranks": ranks});
    if let Some(p) = &s.p {
        let cut = c.truncate_below(p);
        let (t, r) = complex_report(&format!("H of the truncation below {}", show(p)), &cut);
        text.push_str(&t);
        json["p"] = rational_value(p);
        json["truncated_ranks"] = r;
    }
    Ok(Outcome::ok(text, json))
}

pub fn compare(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let l = ws.structure()?;
    let caps = ws.caps.as_ref().ok_or_else(|| CliError::input("compare needs a caps file"))?;
    let mut opts = PipelineOptions::new(s.k);
    opts.t = s.t();
    opts.p = s.p.clone();
    opts.relations = s.relations();
    if let Some(a) = s.max_arity {
        opts.relation_arity = a;
    }
    let r = theorem_pipeline(l, caps, &opts)?;
    let mut text = String::new();
    for st in &r.stages {
        let _ = writeln!(text, "[{}]", st.name);
        for n in &st.notes {
            let _ = writeln!(text, "  {n}");
        }
    }
    ranks_text(&mut text, "SC with l1_{alpha_1}", &r.ranks_sc_alpha1);
    ranks_text(&mut text, "SC with l1_{alpha_0}", &r.ranks_sc_alpha0);
    ranks_text(&mut text, "QC", &r.ranks_qc);
    if let Some(f) = &r.ranks_filtered {
        ranks_text(&mut text, "F_{>=p} SC", f);
    }
    let _ = writeln!(text, "verdict: {}", if r.verdict { "ranks agree" } else { "ranks differ" });
    let basis = l.basis();
    let json = json!({
        "stages": r.stages.iter().map(|st| json!({"name": st.name, "notes": st.notes})).collect::<Vec<_>>(),
        "alpha0": element_json(&r.alpha0, basis),
        "alpha1": element_json(&r.alpha1, basis),
        "ranks_sc_alpha1": ranks_json(&r.ranks_sc_alpha1),
        "ranks_sc_alpha0": ranks_json(&r.ranks_sc_alpha0),
        "ranks_qc": ranks_json(&r.ranks_qc),
        "ranks_filtered": r.ranks_filtered.as_ref().map(ranks_json),
        "verdict": r.verdict,
    });
    let out = Outcome::ok(text, json);
    Ok(if r.verdict { out } else { out.failed("stage `compare` failed: ranks differ".into()) })
}

pub fn orbits(ws: &Workspace, s: &Settings) -> Result<Outcome, CliError> {
    let (model, h) = ws.orbit.as_ref().ok_or_else(|| CliError::input("no orbit model was loaded"))?;
    let c = model.spec.c().clone();
    let mut fams = Vec::new();
    for &n in &s.levels {
        for i in 0..model.spec.n() {
            fams.extend(orbit_scan(model, h, n, i)?);
        }
    }
    fams.sort_by(report_order);
    let p = p_negativity_check(model, &fams, &c);
    let adm = slope_admissible(model, &c, &s.cn_bound, &s.levels);

    let mut text = String::from("stratum,n,m,rho,action,index_center,index_halfwidth,class,P_value\n");
    let mut rows = Vec::new();
    for f in &fams {
        let pv = worst_p(model, f, &c);
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{}",
            f.stratum + 1,
            f.level,
            f.winding,
            show(&f.rho),
            show(&f.action),
            show(&f.index_center),
            show(&f.index_halfwidth),
            f.class.name(),
            show(&pv)
        );
        rows.push(json!({
            "stratum": f.stratum + 1,
            "n": f.level,
            "m": f.winding,
            "rho": rational_value(&f.rho),
            "rho_exact": f.exact,
            "resonant": f.resonant,
            "action": rational_value(&f.action),
            "index_center": rational_value(&f.index_center),
            "index_halfwidth": rational_value(&f.index_halfwidth),
            "class": f.class.name(),
            "P_value": rational_value(&pv),
        }));
    }
    let d_count = fams.iter().filter(|f| f.class == OrbitClass::D).count();
    let _ = writeln!(text, "# index intervals use the unperturbed Hessian bound {}", show(&model.hess_bound));
    let _ = writeln!(text, "# D families: {d_count}, P < 0 on all of them: {}", if p.passed() { "yes" } else { "no" });
    let _ = writeln!(text, "# C + C_n bound > slope: {}", if adm.c_condition { "yes" } else { "no" });
    let resonances: Vec<(u32, usize)> = adm.resonances.iter().map(|&(n, i)| (n, i + 1)).collect();
    let _ = writeln!(text, "# resonances (n, i): {resonances:?}");
    let json = json!({
        "families": rows,
        "p_negativity": {"d_families": d_count, "passed": p.passed()},
        "admissibility": {"c_condition": adm.c_condition, "resonances": resonances, "admissible": adm.admissible()},
    });
    let out = Outcome::ok(text, json);
    Ok(if let Some(&(n, i)) = resonances.first() {
        out.failed(format!("slope is inadmissible: resonance at (n, i) = ({n}, {i})"))
    } else if !adm.c_condition {
        out.failed("slope is inadmissible: C + C_n does not exceed the slope".into())
    } else if let Some(v) = p.violators().next() {
        out.failed(format!(
            "D family at n = {}, m = {} has P up to {}",
            v.family.level,
            v.family.winding,
            show(&v.worst_p)
        ))
    } else {
        out
    })
}
