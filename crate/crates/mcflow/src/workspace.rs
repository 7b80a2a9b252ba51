//! Loading and merging input files into core objects.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use mcflow_core::complex::{CGen, CapAssignment, CochainComplex, DirectedSystem};
use mcflow_core::orbit::{DivisorModel, RadialHamiltonian};
use mcflow_core::{
    Degree, Element, Error, GenKind, Generator, GradedBasis, LInfStructure, Mode, Monomial, NovikovPolynomial, RingSpec,
};

use crate::io::{ComplexJson, EntryJson, FileJson, GeneratorJson, KindJson, SpecJson, TermJson};

/// Exit code 2 for unreadable or malformed input, 1 for everything that
/// parses but fails a check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn semantic(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::semantic(e.to_string())
    }
}

/// Everything loaded from the input files.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub spec: Option<RingSpec>,
    pub structure: Option<LInfStructure>,
    pub beta: Option<Element>,
    pub complex: Option<CochainComplex>,
    pub system: Option<DirectedSystem>,
    pub caps: Option<CapAssignment>,
    pub orbit: Option<(DivisorModel, RadialHamiltonian)>,
}

impl Workspace {
    pub fn structure(&self) -> Result<&LInfStructure, CliError> {
        self.structure.as_ref().ok_or_else(|| CliError::input("no generators or structure constants were loaded"))
    }

    pub fn spec(&self) -> Result<&RingSpec, CliError> {
        self.spec.as_ref().ok_or_else(|| CliError::input("no ring spec was loaded"))
    }
}

pub fn read_file(path: &Path) -> Result<FileJson, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn set_once<T: PartialEq>(slot: &mut Option<T>, value: Option<T>, what: &str) -> Result<(), CliError> {
    if let Some(v) = value {
        match slot {
            Some(old) if *old != v => return Err(CliError::semantic(format!("input files disagree on {what}"))),
            _ => *slot = Some(v),
        }
    }
    Ok(())
}

/// Merge files in order. Lists concatenate; single-valued sections must
/// agree wherever they are repeated.
pub fn merge(files: Vec<FileJson>) -> Result<FileJson, CliError> {
    let mut out = FileJson::default();
    for f in files {
        set_once(&mut out.spec, f.spec, "the ring spec")?;
        set_once(&mut out.strict_parity, f.strict_parity, "strict_parity")?;
        set_once(&mut out.max_arity, f.max_arity, "max_arity")?;
        set_once(&mut out.beta, f.beta, "beta")?;
        set_once(&mut out.basis, f.basis, "the complex basis")?;
        set_once(&mut out.differential, f.differential, "the differential")?;
        set_once(&mut out.system, f.system, "the directed system")?;
        set_once(&mut out.eta, f.eta, "eta")?;
        set_once(&mut out.slope, f.slope, "slope")?;
        set_once(&mut out.hess_bound, f.hess_bound, "hess_bound")?;
        set_once(&mut out.h_knots, f.h_knots, "h_knots")?;
        if let Some(g) = f.generators {
            out.generators.get_or_insert_with(Vec::new).extend(g);
        }
        if let Some(c) = f.constants {
            out.constants.get_or_insert_with(Vec::new).extend(c);
        }
        if let Some(c) = f.caps {
            let caps = out.caps.get_or_insert_with(BTreeMap::new);
            for (id, u) in c {
                if caps.get(&id).is_some_and(|old| *old != u) {
                    return Err(CliError::semantic(format!("input files give two caps for `{id}`")));
                }
                caps.insert(id, u);
            }
        }
        if out.description.is_none() {
            out.description = f.description;
        }
    }
    Ok(out)
}

pub fn load(paths: &[impl AsRef<Path>]) -> Result<Workspace, CliError> {
    if paths.is_empty() {
        return Err(CliError::input("no input files"));
    }
    let files = paths.iter().map(|p| read_file(p.as_ref())).collect::<Result<Vec<_>, _>>()?;
    build(merge(files)?)
}

fn spec_of(s: &SpecJson) -> Result<RingSpec, CliError> {
    if s.lambda.len() != s.n {
        return Err(CliError::semantic(format!("spec has N = {} but {} lambda entries", s.n, s.lambda.len())));
    }
    Ok(RingSpec::new(s.lambda.iter().map(|r| r.0.clone()).collect(), s.kappa.0.clone(), s.c.0.clone())?)
}

fn generator_of(g: &GeneratorJson) -> Result<Generator, CliError> {
    let kind = match &g.kind {
        KindJson::Tag(t) if t == "orbit" => GenKind::Orbit,
        KindJson::Tag(t) => return Err(CliError::input(format!("generator `{}` has unknown kind \"{t}\"", g.id))),
        KindJson::Formal { formal } => GenKind::FormalDivisor(*formal),
    };
    Ok(Generator {
        id: g.id.clone(),
        degree: Degree::new(g.qdeg.0.clone(), g.parity),
        kind,
        level: g.level,
        action: g.action.0.clone(),
        t_exp: g.t_exp,
    })
}

fn monomial(m: &[i64], nvars: usize, what: &str) -> Result<Monomial, CliError> {
    if m.is_empty() {
        return Ok(Monomial::one(nvars));
    }
    if m.len() != nvars {
        return Err(CliError::semantic(format!("{what}: monomial {m:?} needs {nvars} exponents")));
    }
    Ok(Monomial::new(m.to_vec()))
}

fn element_of(terms: &[TermJson], basis: &GradedBasis, nvars: usize) -> Result<Element, CliError> {
    let mut e = Element::zero(nvars);
    for t in terms {
        let g = basis.index_of(&t.gen)?;
        e.add_term(g, monomial(&t.monomial, nvars, &t.gen)?, t.coeff.0.clone());
    }
    Ok(e)
}

fn complex_of(c: &ComplexJson, spec: Option<&RingSpec>) -> Result<CochainComplex, CliError> {
    let mut gens = Vec::with_capacity(c.basis.len());
    for g in &c.basis {
        let x = generator_of(g)?;
        gens.push(match spec {
            Some(s) => CGen::filtered(&x.id, x.degree.clone(), x.f_value(s)),
            None => CGen::new(&x.id, x.degree.clone()),
        });
    }
    let mut out = match spec {
        Some(s) => CochainComplex::over_r(s.clone(), gens),
        None => CochainComplex::over_q(gens),
    };
    let entries = entries_of(&c.differential, &out, &out)?;
    for ((i, j), p) in entries {
        out.add_entry(i, j, p)?;
    }
    Ok(out)
}

fn entries_of(
    entries: &[EntryJson],
    source: &CochainComplex,
    target: &CochainComplex,
) -> Result<BTreeMap<(usize, usize), NovikovPolynomial>, CliError> {
    let nvars = source.nvars();
    let mut out: BTreeMap<(usize, usize), NovikovPolynomial> = BTreeMap::new();
    for e in entries {
        let (i, j) = (source.index_of(&e.from)?, target.index_of(&e.to)?);
        let what = format!("entry {} -> {}", e.from, e.to);
        let p = NovikovPolynomial::term(Mode::Localized, monomial(&e.monomial, nvars, &what)?, e.coeff.0.clone())?;
        let sum = match out.remove(&(i, j)) {
            Some(old) => old.add(&p)?,
            None => p,
        };
        if !sum.is_zero() {
            out.insert((i, j), sum);
        }
    }
    Ok(out)
}

pub fn build(f: FileJson) -> Result<Workspace, CliError> {
    let mut ws = Workspace::default();
    let spec = f.spec.as_ref().map(spec_of).transpose()?;
    ws.spec = spec.clone();

    if f.generators.is_some() || f.constants.is_some() {
        let spec = spec.clone().ok_or_else(|| CliError::input("generators need a ring spec"))?;
        let gens = f.generators.iter().flatten().map(generator_of).collect::<Result<Vec<_>, _>>()?;
        let basis = GradedBasis::new(gens, &spec, f.strict_parity.unwrap_or(true))?;
        let constants = f.constants.clone().unwrap_or_default();
        let max_arity = f.max_arity.unwrap_or_else(|| constants.iter().map(|c| c.d).max().unwrap_or(1).max(1));
        let mut l = LInfStructure::new(spec.clone(), basis, max_arity);
        for c in &constants {
            if c.d != c.inputs.len() {
                return Err(CliError::semantic(format!(
                    "constant on {:?} declares d = {} but has {} inputs",
                    c.inputs,
                    c.d,
                    c.inputs.len()
                )));
            }
            let ids: Vec<&str> = c.inputs.iter().map(String::as_str).collect();
            let out = element_of(&c.output, l.basis(), spec.n())?;
            l.insert(&ids, out)?;
        }
        if let Some(b) = &f.beta {
            ws.beta = Some(element_of(b, l.basis(), spec.n())?);
        }
        ws.structure = Some(l);
    } else if f.beta.is_some() {
        return Err(CliError::input("beta needs generators"));
    }

    match (&f.basis, &f.differential) {
        (Some(basis), differential) => {
            let c = ComplexJson { basis: basis.clone(), differential: differential.clone().unwrap_or_default() };
            ws.complex = Some(complex_of(&c, spec.as_ref())?);
        }
        (None, Some(_)) => return Err(CliError::input("a differential needs a basis")),
        (None, None) => {}
    }

    if let Some(s) = &f.system {
        let levels = s.levels.iter().map(|c| complex_of(c, spec.as_ref())).collect::<Result<Vec<_>, _>>()?;
        if s.maps.len() + 1 != levels.len() && !levels.is_empty() {
            return Err(CliError::semantic(format!(
                "{} levels need {} continuation maps, got {}",
                levels.len(),
                levels.len() - 1,
                s.maps.len()
            )));
        }
        let maps = s
            .maps
            .iter()
            .enumerate()
            .map(|(n, m)| entries_of(m, &levels[n], &levels[n + 1]))
            .collect::<Result<Vec<_>, _>>()?;
        ws.system = Some(DirectedSystem { levels, maps });
    }

    if let Some(c) = &f.caps {
        ws.caps = Some(CapAssignment { caps: c.clone() });
    }

    match (&f.eta, &f.slope, &f.hess_bound) {
        (Some(eta), Some(slope), Some(hess)) => {
            let spec = spec.clone().ok_or_else(|| CliError::input("an orbit model needs a ring spec"))?;
            let model = DivisorModel::new(spec, eta.0.clone(), slope.0.clone(), hess.0.clone())?;
            let knots: Vec<_> = f.h_knots.iter().flatten().map(|(a, b)| (a.0.clone(), b.0.clone())).collect();
            let h = RadialHamiltonian::new(&model, &knots)?;
            ws.orbit = Some((model, h));
        }
        (None, None, None) if f.h_knots.is_none() => {}
        _ => return Err(CliError::input("an orbit model needs eta, slope and hess_bound")),
    }
    Ok(ws)
}
