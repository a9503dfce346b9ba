//! Scenario files: a JSON description of hypersurfaces, an optional
//! intersection and an optional projective-bundle case, plus the tasks to run
//! and frozen expected values.
//!
//! ```json
//! {
//!   "name": "two_planes_cap_plane_p3",
//!   "ambient": "P^3",
//!   "hypersurfaces": [
//!     { "name": "X1", "degree": 2, "segre": "linear(1)",
//!       "strata": [
//!         { "name": "reg", "closure": "hypersurface", "csm": "2*h + 5*h^2 + 4*h^3", "milnor_fiber_chi": 1 },
//!         { "name": "line", "closure": "linear(1)", "milnor_fiber_chi": 0 } ] },
//!     { "name": "X2", "degree": 1 }
//!   ],
//!   "intersection": { "hypersurfaces": ["X1", "X2"], "oracle": { "chi": 3 } },
//!   "expected": { "intersection.milnor": "h^3" }
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bundle::{line_bundle, BundleClass};
use crate::chow::{AmbientSpace, CycleClass};
use crate::classes::{
    aluffi_milnor, hypersurface_virtual, milnor_pp, mu_class, segre_builtin, ClassTriple,
    SegreCenter,
};
use crate::error::{Error, Result};
use crate::intersect::{
    cross_validate, Formula, IntersectionOracle, IntersectionReport, IntersectionScenario,
};
use crate::lecycles::{graded_pieces, le_to_milnor, milnor_to_le, total, LeCycles};
use crate::par::{self, ExecutionPolicy};
use crate::projbundle::{
    lemma1_pullback_check, milnor_general, verify_tangent_identities, GeneralCaseInput,
    IdentityCheck, ProjBundleRing,
};
use crate::strata::{closure_linear, closure_point, StratifiedHypersurface, Stratum};
use crate::verify::{run_suites, Suite, VerifyReport, DEFAULT_CASES};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Degree {
    One(i64),
    Multi(Vec<i64>),
}

impl Degree {
    fn to_vec(&self) -> Vec<i64> {
        match self {
            Degree::One(d) => vec![*d],
            Degree::Multi(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub ambient: String,
    #[serde(default)]
    pub hypersurfaces: Vec<HypersurfaceBlock>,
    #[serde(default)]
    pub intersection: Option<IntersectionBlock>,
    #[serde(default)]
    pub general_case: Option<GeneralCaseBlock>,
    #[serde(default)]
    pub tasks: Vec<Task>,
    /// Result key to canonical class text (or integer for Euler
    /// characteristics).
    #[serde(default)]
    pub expected: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub derivation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceBlock {
    pub name: String,
    pub degree: Degree,
    /// Absent with no `le_cycles`: the hypersurface is smooth.
    #[serde(default)]
    pub strata: Option<Vec<StratumBlock>>,
    /// Dimension `k` (as a string key) to `Λ_k`.
    #[serde(default)]
    pub le_cycles: Option<BTreeMap<String, String>>,
    /// `points(k)` or `linear(m)`, the center of the singular scheme.
    #[serde(default)]
    pub segre: Option<String>,
    #[serde(default)]
    pub mu_class: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumBlock {
    pub name: String,
    /// `point`, `linear(m)` or `hypersurface`.
    #[serde(default)]
    pub closure: Option<String>,
    #[serde(default)]
    pub dim: Option<u32>,
    #[serde(default)]
    pub class: Option<String>,
    #[serde(default)]
    pub csm: Option<String>,
    pub milnor_fiber_chi: i64,
    #[serde(default)]
    pub contained_in: Vec<String>,
    #[serde(default)]
    pub chi_open: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionBlock {
    pub hypersurfaces: Vec<String>,
    #[serde(default)]
    pub oracle: Option<OracleBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    #[serde(default)]
    pub csm: Option<String>,
    #[serde(default)]
    pub chi: Option<i64>,
    #[serde(default)]
    pub support: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralCaseBlock {
    pub base: String,
    pub bundle: BundleBlock,
    /// Class on the total space, in the base generators and `z`.
    #[serde(default)]
    pub milnor_of_tilde: Option<String>,
    /// Replaces the reduction rule for `z^r` (negative controls).
    #[serde(default)]
    pub relation: Option<Vec<String>>,
    /// Base classes for the pullback-pushforward check.
    #[serde(default)]
    pub pullback_classes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleBlock {
    #[serde(default)]
    pub split: Option<Vec<Degree>>,
    #[serde(default)]
    pub rank: Option<u32>,
    #[serde(default)]
    pub chern: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Task {
    Compute {
        compute: ComputeTarget,
    },
    Verify {
        verify: String,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        cases: Option<usize>,
    },
    Report {
        report: ReportFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputeTarget {
    Hypersurfaces,
    Intersection,
    GeneralCase,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Text,
    Machine,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::scenario(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// The report format requested by a `report` task, if any.
    pub fn report_format(&self) -> Option<ReportFormat> {
        self.tasks.iter().rev().find_map(|t| match t {
            Task::Report { report } => Some(*report),
            _ => None,
        })
    }
}

/// Parses `P^n` or `P^a x P^b x ...`.
pub fn parse_ambient(text: &str) -> Result<Arc<AmbientSpace>> {
    let bad = |reason: &str| Error::scenario("ambient", format!("`{text}`: {reason}"));
    let dims = text
        .split(['x', '×'])
        .map(|f| {
            let f = f.trim();
            f.strip_prefix("P^")
                .and_then(|n| n.trim().parse::<i64>().ok())
                .ok_or_else(|| bad("expected `P^n` or a product `P^a x P^b`"))
        })
        .collect::<Result<Vec<_>>>()?;
    match dims.as_slice() {
        [n] => AmbientSpace::proj_space(*n),
        _ => AmbientSpace::multi_proj(&dims),
    }
    .map_err(|e| bad(&e.to_string()))
}

fn class_at(amb: &Arc<AmbientSpace>, text: &str, field: &str) -> Result<CycleClass> {
    CycleClass::parse(amb, text).map_err(|e| Error::scenario(field, e.to_string()))
}

fn at<T>(r: Result<T>, field: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Scenario { .. } => e,
        other => Error::scenario(field, other.to_string()),
    })
}

/// A hypersurface built from its block.
#[derive(Clone, Debug)]
pub struct HypersurfaceModel {
    pub hyp: StratifiedHypersurface,
    /// False for hypersurfaces given only by Lê cycles.
    pub stratified: bool,
    pub segre: Option<CycleClass>,
    pub mu: Option<CycleClass>,
    pub le: Option<LeCycles>,
    pub classes: ClassTriple,
}

#[derive(Clone, Debug)]
pub struct GeneralModel {
    pub ring: ProjBundleRing,
    pub split: Option<Vec<Vec<i64>>>,
    pub milnor_of_tilde: Option<CycleClass>,
    pub pullback_classes: Vec<CycleClass>,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub ambient: Arc<AmbientSpace>,
    pub hypersurfaces: Vec<HypersurfaceModel>,
    pub intersection: Option<(Vec<usize>, Option<IntersectionOracle>)>,
    pub general: Option<GeneralModel>,
    pub file: ScenarioFile,
}

impl Scenario {
    pub fn build(file: &ScenarioFile) -> Result<Self> {
        let ambient = parse_ambient(&file.ambient)?;
        let mut names = BTreeSet::new();
        let mut hypersurfaces = Vec::new();
        for (i, hb) in file.hypersurfaces.iter().enumerate() {
            let field = format!("hypersurfaces[{i}]");
            if !names.insert(hb.name.clone()) {
                return Err(Error::scenario(
                    format!("{field}.name"),
                    format!("duplicate hypersurface name `{}`", hb.name),
                ));
            }
            hypersurfaces.push(build_hypersurface(&ambient, hb, &field)?);
        }
        let intersection = match &file.intersection {
            None => None,
            Some(ib) => {
                let mut idx = Vec::new();
                for (j, n) in ib.hypersurfaces.iter().enumerate() {
                    let i = file
                        .hypersurfaces
                        .iter()
                        .position(|h| &h.name == n)
                        .ok_or_else(|| {
                            Error::scenario(
                                format!("intersection.hypersurfaces[{j}]"),
                                format!("unknown hypersurface `{n}`"),
                            )
                        })?;
                    idx.push(i);
                }
                if idx.len() < 2 {
                    return Err(Error::scenario(
                        "intersection.hypersurfaces",
                        "an intersection needs at least 2 hypersurfaces",
                    ));
                }
                let oracle = ib
                    .oracle
                    .as_ref()
                    .map(|o| build_oracle(&ambient, o))
                    .transpose()?;
                Some((idx, oracle))
            }
        };
        let general = file.general_case.as_ref().map(build_general).transpose()?;
        for key in file.expected.keys() {
            check_expected_key(file, key)?;
        }
        Ok(Scenario {
            name: file.name.clone().unwrap_or_else(|| "scenario".into()),
            ambient,
            hypersurfaces,
            intersection,
            general,
            file: file.clone(),
        })
    }
}

fn check_expected_key(file: &ScenarioFile, key: &str) -> Result<()> {
    let field = format!("expected.{key}");
    let (head, tail) = key
        .split_once('.')
        .ok_or_else(|| Error::scenario(&field, "keys look like `<hypersurface>.<quantity>`"))?;
    let ok = match head {
        "intersection" => file.intersection.is_some() && ["milnor", "chi"].contains(&tail),
        "general_case" => file.general_case.is_some() && tail == "milnor",
        h => {
            file.hypersurfaces.iter().any(|x| x.name == h)
                && ["virtual", "csm", "milnor", "chi", "mu"].contains(&tail)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::scenario(
            field,
            format!("unknown result key `{key}`"),
        ))
    }
}

fn build_hypersurface(
    amb: &Arc<AmbientSpace>,
    hb: &HypersurfaceBlock,
    field: &str,
) -> Result<HypersurfaceModel> {
    let lb = at(
        line_bundle(amb, &hb.degree.to_vec()),
        &format!("{field}.degree"),
    )?;
    let n = amb.dim();
    let le = match &hb.le_cycles {
        None => None,
        Some(map) => {
            let mut m = BTreeMap::new();
            for (k, text) in map {
                let f = format!("{field}.le_cycles.{k}");
                let k: u32 = k
                    .parse()
                    .map_err(|_| Error::scenario(&f, "keys are dimensions 0, 1, ..."))?;
                m.insert(k, class_at(amb, text, &f)?);
            }
            Some(at(LeCycles::new(amb, m), &format!("{field}.le_cycles"))?)
        }
    };
    let (hyp, stratified) = match &hb.strata {
        Some(blocks) => {
            let known: BTreeSet<&str> = blocks.iter().map(|s| s.name.as_str()).collect();
            let mut strata = Vec::new();
            for (j, sb) in blocks.iter().enumerate() {
                let sf = format!("{field}.strata[{j}]");
                for (q, c) in sb.contained_in.iter().enumerate() {
                    if !known.contains(c.as_str()) {
                        return Err(Error::scenario(
                            format!("{sf}.contained_in[{q}]"),
                            format!("unknown stratum name `{c}`"),
                        ));
                    }
                }
                strata.push(build_stratum(amb, &lb, sb, &sf)?);
            }
            let h = at(
                StratifiedHypersurface::new(&hb.name, amb, lb.clone(), strata),
                &format!("{field}.strata"),
            )?;
            (h, true)
        }
        None => (
            at(
                StratifiedHypersurface::smooth(&hb.name, amb, lb.clone()),
                field,
            )?,
            le.is_none(),
        ),
    };
    let segre = hb
        .segre
        .as_ref()
        .map(|s| {
            let f = format!("{field}.segre");
            let c = at(SegreCenter::parse(s), &f)?;
            at(segre_builtin(amb, c), &f)
        })
        .transpose()?;
    let mu = match (&hb.mu_class, &segre) {
        (Some(t), _) => Some(class_at(amb, t, &format!("{field}.mu_class"))?),
        (None, Some(s)) => Some(at(mu_class(&hyp, s), &format!("{field}.segre"))?),
        (None, None) if stratified && hyp.is_smooth() => Some(CycleClass::zero(amb)),
        _ => None,
    };
    let virt = at(hypersurface_virtual(&hyp), field)?;
    let classes = if let (false, Some(le)) = (stratified, &le) {
        let m = total(
            amb,
            &at(le_to_milnor(le, &lb), &format!("{field}.le_cycles"))?,
        );
        at(ClassTriple::from_virtual_and_milnor(virt, m, 1), field)?
    } else {
        at(crate::classes::hypersurface_classes(&hyp), field)?
    };
    let _ = n;
    Ok(HypersurfaceModel {
        hyp,
        stratified,
        segre,
        mu,
        le,
        classes,
    })
}

fn build_stratum(
    amb: &Arc<AmbientSpace>,
    lb: &BundleClass,
    sb: &StratumBlock,
    field: &str,
) -> Result<Stratum> {
    let n = amb.dim();
    let explicit_csm = sb
        .csm
        .as_ref()
        .map(|t| class_at(amb, t, &format!("{field}.csm")))
        .transpose()?;
    let (dim, class, csm) = match sb.closure.as_deref().map(str::trim) {
        Some("point") => {
            let (c, s) = closure_point(amb);
            (0, c, Some(s))
        }
        Some("hypersurface") => (n - 1, lb.c1(), None),
        Some(other) => {
            let m = other
                .strip_prefix("linear(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|m| m.trim().parse::<u32>().ok())
                .ok_or_else(|| {
                    Error::scenario(
                        format!("{field}.closure"),
                        format!("`{other}`: expected `point`, `linear(m)` or `hypersurface`"),
                    )
                })?;
            let (c, s) = at(closure_linear(amb, m), &format!("{field}.closure"))?;
            (m, c, Some(s))
        }
        None => {
            let dim = sb.dim.ok_or_else(|| {
                Error::scenario(
                    format!("{field}.dim"),
                    "required without a closure shorthand",
                )
            })?;
            let text = sb.class.as_ref().ok_or_else(|| {
                Error::scenario(
                    format!("{field}.class"),
                    "required without a closure shorthand",
                )
            })?;
            (dim, class_at(amb, text, &format!("{field}.class"))?, None)
        }
    };
    if sb.closure.is_some() {
        if let Some(d) = sb.dim {
            if d != dim {
                return Err(Error::scenario(
                    format!("{field}.dim"),
                    format!("{d} contradicts the closure, which has dimension {dim}"),
                ));
            }
        }
        if sb.class.is_some() {
            return Err(Error::scenario(
                format!("{field}.class"),
                "give either a closure shorthand or an explicit class",
            ));
        }
    }
    let csm = match (explicit_csm, csm) {
        (Some(_), Some(_)) => {
            return Err(Error::scenario(
                format!("{field}.csm"),
                "the closure shorthand already fixes the CSM class",
            ))
        }
        (a, b) => a.or(b),
    };
    let mut s = Stratum::new(&sb.name, dim, class, csm, sb.milnor_fiber_chi)
        .inside(sb.contained_in.iter().cloned());
    s.chi_open = sb.chi_open;
    Ok(s)
}

fn build_oracle(amb: &Arc<AmbientSpace>, o: &OracleBlock) -> Result<IntersectionOracle> {
    Ok(IntersectionOracle {
        csm: o
            .csm
            .as_ref()
            .map(|t| class_at(amb, t, "intersection.oracle.csm"))
            .transpose()?,
        chi: o.chi,
        support: o
            .support
            .as_ref()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .map(|(i, t)| class_at(amb, t, &format!("intersection.oracle.support[{i}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?,
    })
}

fn build_general(g: &GeneralCaseBlock) -> Result<GeneralModel> {
    let base = parse_ambient(&g.base).map_err(|e| match e {
        Error::Scenario { reason, .. } => Error::scenario("general_case.base", reason),
        e => e,
    })?;
    let f = "general_case.bundle";
    let (e, split) = match (&g.bundle.split, &g.bundle.rank, &g.bundle.chern) {
        (Some(degs), None, None) => {
            let degs: Vec<Vec<i64>> = degs.iter().map(Degree::to_vec).collect();
            let e = at(crate::verify::split_bundle(&base, &degs), f)?;
            (e, Some(degs))
        }
        (None, Some(r), Some(c)) => {
            let chern = class_at(&base, c, &format!("{f}.chern"))?;
            (at(BundleClass::new(*r, chern), f)?, None)
        }
        _ => {
            return Err(Error::scenario(
                f,
                "give either `split` or both `rank` and `chern`",
            ))
        }
    };
    if e.rank() == 0 {
        return Err(Error::scenario(f, "the bundle needs rank >= 1"));
    }
    let ring = match &g.relation {
        None => at(ProjBundleRing::new(&base, &e), f)?,
        Some(rel) => {
            let rel = rel
                .iter()
                .enumerate()
                .map(|(i, t)| class_at(&base, t, &format!("general_case.relation[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            at(
                ProjBundleRing::with_relation(&base, &e, rel),
                "general_case.relation",
            )?
        }
    };
    let milnor_of_tilde = g
        .milnor_of_tilde
        .as_ref()
        .map(|t| class_at(ring.total(), t, "general_case.milnor_of_tilde"))
        .transpose()?;
    let pullback_classes = g
        .pullback_classes
        .iter()
        .enumerate()
        .map(|(i, t)| class_at(&base, t, &format!("general_case.pullback_classes[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneralModel {
        ring,
        split,
        milnor_of_tilde,
        pullback_classes,
    })
}

/// Which formulas to run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum FormulaSelection {
    #[default]
    All,
    Only(Vec<Formula>),
}

impl FormulaSelection {
    /// `thm41`, `cor11`, `cor12`, `pp`, `aluffi`, `le` or `all`.
    pub fn parse(text: &str) -> Result<Self> {
        let f = match text {
            "all" => return Ok(FormulaSelection::All),
            "thm41" => vec![Formula::Thm41],
            "cor11" => vec![Formula::Cor11],
            "cor12" => vec![Formula::Cor12],
            "pp" => vec![Formula::PpAis, Formula::PpFull],
            "aluffi" => vec![Formula::Aluffi],
            "le" => vec![Formula::Le],
            other => {
                return Err(Error::scenario(
                    "formula",
                    format!("unknown formula `{other}`; expected thm41, cor11, cor12, pp, aluffi, le or all"),
                ))
            }
        };
        Ok(FormulaSelection::Only(f))
    }

    fn intersection_formulas(&self) -> Vec<Formula> {
        match self {
            FormulaSelection::All => Vec::new(),
            FormulaSelection::Only(v) => v.clone(),
        }
    }

    fn wants_route(&self, route: &str) -> bool {
        match self {
            FormulaSelection::All => true,
            FormulaSelection::Only(v) => match route {
                "definition" => true,
                "pp" => v.contains(&Formula::PpAis),
                "aluffi" => v.contains(&Formula::Aluffi),
                "le" => v.contains(&Formula::Le),
                _ => false,
            },
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub formulas: FormulaSelection,
    pub policy: ExecutionPolicy,
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceReport {
    pub name: String,
    pub line_bundle: CycleClass,
    pub virt: CycleClass,
    pub csm: CycleClass,
    pub milnor: CycleClass,
    pub routes: Vec<(String, CycleClass)>,
    pub routes_agree: bool,
    pub chi: i64,
    /// From the stratification, when it determines `χ(X)`.
    pub chi_strata: Option<i64>,
    pub mu: Option<CycleClass>,
    pub le_cycles: Vec<(u32, CycleClass)>,
}

impl HypersurfaceReport {
    pub fn pass(&self) -> bool {
        self.routes_agree && self.chi_strata.is_none_or(|c| c == self.chi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralReport {
    pub total: String,
    pub checks: Vec<IdentityCheck>,
    pub milnor: Option<CycleClass>,
}

impl GeneralReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectCheck {
    pub key: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifySummary {
    pub suite: String,
    pub seed: u64,
    pub properties: usize,
    pub cases: usize,
    pub failed: usize,
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub name: String,
    pub ambient: String,
    pub hypersurfaces: Vec<HypersurfaceReport>,
    pub intersection: Option<(Vec<String>, IntersectionReport)>,
    pub general: Option<GeneralReport>,
    pub verify: Vec<VerifySummary>,
    pub expected: Vec<ExpectCheck>,
    pub elapsed_ms: Option<f64>,
}

impl ScenarioReport {
    pub fn pass(&self) -> bool {
        self.hypersurfaces.iter().all(HypersurfaceReport::pass)
            && self.intersection.as_ref().is_none_or(|(_, r)| r.pass())
            && self.general.as_ref().is_none_or(GeneralReport::pass)
            && self.verify.iter().all(|v| v.failed == 0)
            && self.expected.iter().all(|e| e.pass)
    }
}

pub fn run_compute(file: &ScenarioFile, opts: &RunOptions) -> Result<ScenarioReport> {
    let sc = Scenario::build(file)?;
    run_scenario(&sc, opts)
}

pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<ScenarioReport> {
    let start = Instant::now();
    let targets: BTreeSet<ComputeTarget> = sc
        .file
        .tasks
        .iter()
        .filter_map(|t| match t {
            Task::Compute { compute } => Some(*compute),
            _ => None,
        })
        .collect();
    let want = |t: ComputeTarget| {
        targets.is_empty() || targets.contains(&ComputeTarget::All) || targets.contains(&t)
    };

    let hypersurfaces = if want(ComputeTarget::Hypersurfaces) || !sc.file.expected.is_empty() {
        par::map(opts.policy, &sc.hypersurfaces, |h| {
            hypersurface_report(h, &opts.formulas)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let intersection = match &sc.intersection {
        Some((idx, oracle)) if want(ComputeTarget::Intersection) => {
            let models: Vec<&HypersurfaceModel> =
                idx.iter().map(|&i| &sc.hypersurfaces[i]).collect();
            let isc = intersection_scenario(&models)?;
            let rep = cross_validate(
                &isc,
                &opts.formulas.intersection_formulas(),
                oracle.as_ref(),
                opts.policy,
            );
            Some((
                models.iter().map(|m| m.hyp.name().to_string()).collect(),
                rep,
            ))
        }
        _ => None,
    };

    let general = match &sc.general {
        Some(g) if want(ComputeTarget::GeneralCase) => Some(general_report(g)?),
        _ => None,
    };

    let mut verify = Vec::new();
    for (i, t) in sc.file.tasks.iter().enumerate() {
        if let Task::Verify {
            verify: suite,
            seed,
            cases,
        } = t
        {
            let suites = if suite == "all" {
                Vec::new()
            } else {
                vec![suite.parse::<Suite>().map_err(|_| {
                    Error::scenario(
                        format!("tasks[{i}].verify"),
                        format!("unknown suite `{suite}`"),
                    )
                })?]
            };
            let rep: VerifyReport =
                run_suites(&suites, *seed, cases.unwrap_or(DEFAULT_CASES), opts.policy);
            verify.push(VerifySummary {
                suite: suite.clone(),
                seed: *seed,
                properties: rep.results.len(),
                cases: rep.total_cases(),
                failed: rep.results.iter().map(|r| r.failed).sum(),
            });
        }
    }

    let mut report = ScenarioReport {
        name: sc.name.clone(),
        ambient: sc.ambient.to_string(),
        hypersurfaces,
        intersection,
        general,
        verify,
        expected: Vec::new(),
        elapsed_ms: None,
    };
    report.expected = expected_checks(sc, &report);
    if opts.timing {
        report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// The intersection scenario of the given hypersurfaces, with the μ-class
/// and Lê routes enabled when every member has the data (smooth members
/// contribute zero).
pub fn intersection_scenario(models: &[&HypersurfaceModel]) -> Result<IntersectionScenario> {
    let hyps = models.iter().map(|m| m.hyp.clone()).collect();
    let classes = models.iter().map(|m| m.classes.clone()).collect();
    let mut isc = IntersectionScenario::with_classes(hyps, classes)?;
    if models.iter().any(|m| !m.stratified) {
        isc = isc.without_strata();
    }
    let amb = isc.ambient().clone();
    let smooth = |m: &HypersurfaceModel| m.stratified && m.hyp.is_smooth();
    if models.iter().all(|m| m.mu.is_some()) {
        isc = isc.with_mu_classes(models.iter().map(|m| m.mu.clone().unwrap()).collect())?;
    }
    if models.iter().any(|m| m.le.is_some()) && models.iter().all(|m| m.le.is_some() || smooth(m)) {
        let le = models
            .iter()
            .map(|m| m.le.clone().unwrap_or_else(|| LeCycles::zero(&amb)))
            .collect();
        isc = isc.with_le_cycles(le)?;
    }
    Ok(isc)
}

fn hypersurface_report(
    m: &HypersurfaceModel,
    sel: &FormulaSelection,
) -> Result<HypersurfaceReport> {
    let h = &m.hyp;
    let amb = h.ambient();
    let mut routes = Vec::new();
    if m.stratified && h.open_stratum().csm_closure.is_some() && sel.wants_route("definition") {
        routes.push(("definition".to_string(), m.classes.milnor.clone()));
    }
    if m.stratified && sel.wants_route("pp") {
        routes.push(("pp".to_string(), milnor_pp(h)));
    }
    if let Some(mu) = &m.mu {
        if sel.wants_route("aluffi") {
            routes.push(("aluffi".to_string(), aluffi_milnor(h, mu)?));
        }
    }
    if let Some(le) = &m.le {
        if sel.wants_route("le") {
            routes.push((
                "le".to_string(),
                total(amb, &le_to_milnor(le, h.line_bundle())?),
            ));
        }
    }
    let routes_agree = routes.iter().all(|(_, c)| c == &m.classes.milnor);
    let chi_strata = if m.stratified {
        h.euler_characteristic().ok()
    } else {
        None
    };
    let le_cycles = match &m.le {
        Some(le) => le.iter().map(|(k, c)| (k, c.clone())).collect(),
        None => milnor_to_le(amb, graded_pieces(&m.classes.milnor), h.line_bundle())?
            .iter()
            .map(|(k, c)| (k, c.clone()))
            .collect(),
    };
    Ok(HypersurfaceReport {
        name: h.name().to_string(),
        line_bundle: h.line_bundle().chern().clone(),
        virt: m.classes.virt.clone(),
        csm: m.classes.csm.clone(),
        milnor: m.classes.milnor.clone(),
        routes,
        routes_agree,
        chi: m.classes.euler_characteristic(),
        chi_strata,
        mu: m.mu.clone(),
        le_cycles,
    })
}

fn general_report(g: &GeneralModel) -> Result<GeneralReport> {
    let ring = &g.ring;
    let mut checks = verify_tangent_identities(ring, g.split.as_deref());
    let res = ring.relation_residue()?;
    checks.insert(
        0,
        IdentityCheck {
            name: "grothendieck-relation",
            pass: res.is_zero(),
            detail: format!("codim >= r part of c(p*E)/(1+z) = {res}"),
        },
    );
    let mut alphas = vec![CycleClass::one(ring.base())];
    alphas.extend(g.pullback_classes.iter().cloned());
    let ok = lemma1_pullback_check(ring, &alphas)?;
    checks.push(IdentityCheck {
        name: "pullback-pushforward",
        pass: ok,
        detail: format!("p_*(z^(r-1) p*a) = a for {} classes", alphas.len()),
    });
    let milnor = match &g.milnor_of_tilde {
        Some(m) if res.is_zero() => Some(milnor_general(&GeneralCaseInput {
            ring: ring.clone(),
            milnor_of_tilde: m.clone(),
        })?),
        _ => None,
    };
    if let (Some(m), Some(out), 1) = (&g.milnor_of_tilde, &milnor, ring.rank()) {
        let back = ring.pushforward(m)?;
        checks.push(IdentityCheck {
            name: "rank-one-identity",
            pass: &back == out,
            detail: format!("input {m}, output {out}"),
        });
    }
    Ok(GeneralReport {
        total: ring.total().to_string(),
        checks,
        milnor,
    })
}

fn expected_checks(sc: &Scenario, rep: &ScenarioReport) -> Vec<ExpectCheck> {
    let mut out = Vec::new();
    for (key, want) in &sc.file.expected {
        let (head, tail) = key.split_once('.').expect("validated key");
        let got: Option<String> = match head {
            "intersection" => rep.intersection.as_ref().and_then(|(_, r)| {
                let m = r.results.first().map(|(_, c)| c)?;
                match tail {
                    "milnor" => Some(m.to_string()),
                    _ => r
                        .oracle
                        .iter()
                        .find(|c| c.name == "chi")
                        .map(|c| c.got.clone())
                        .or_else(|| intersection_chi(sc, m)),
                }
            }),
            "general_case" => rep
                .general
                .as_ref()
                .and_then(|g| g.milnor.as_ref())
                .map(|c| c.to_string()),
            h => rep
                .hypersurfaces
                .iter()
                .find(|x| x.name == h)
                .and_then(|x| match tail {
                    "virtual" => Some(x.virt.to_string()),
                    "csm" => Some(x.csm.to_string()),
                    "milnor" => Some(x.milnor.to_string()),
                    "chi" => Some(x.chi.to_string()),
                    "mu" => x.mu.as_ref().map(|c| c.to_string()),
                    _ => None,
                }),
        };
        let expected = match want {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let pass = match (&got, want) {
            (Some(g), serde_json::Value::String(s)) => {
                let amb = match head {
                    "general_case" => sc.general.as_ref().map(|g| g.ring.base().clone()),
                    _ => Some(sc.ambient.clone()),
                };
                match amb.map(|a| (CycleClass::parse(&a, s), CycleClass::parse(&a, g))) {
                    Some((Ok(a), Ok(b))) => a == b,
                    _ => g == s,
                }
            }
            (Some(g), v) => serde_json::from_str::<serde_json::Value>(g).ok().as_ref() == Some(v),
            (None, _) => false,
        };
        out.push(ExpectCheck {
            key: key.clone(),
            expected,
            got: got.unwrap_or_else(|| "(not computed)".into()),
            pass,
        });
    }
    out
}

fn intersection_chi(sc: &Scenario, m: &CycleClass) -> Option<String> {
    let (idx, _) = sc.intersection.as_ref()?;
    let models: Vec<&HypersurfaceModel> = idx.iter().map(|&i| &sc.hypersurfaces[i]).collect();
    let isc = intersection_scenario(&models).ok()?;
    let virt = isc.intersection_virtual().ok()?;
    let n = sc.ambient.dim();
    let r = idx.len() as u32;
    Some(
        (&virt - &m.scale(crate::strata::sign(n - r)))
            .degree_i64()
            .to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PLANES: &str = r#"{
      "name": "tp",
      "ambient": "P^3",
      "hypersurfaces": [
        { "name": "X1", "degree": 2, "segre": "linear(1)",
          "strata": [
            { "name": "reg", "closure": "hypersurface", "csm": "2*h + 5*h^2 + 4*h^3", "milnor_fiber_chi": 1 },
            { "name": "line", "closure": "linear(1)", "milnor_fiber_chi": 0 } ] },
        { "name": "X2", "degree": 1 }
      ],
      "intersection": { "hypersurfaces": ["X1", "X2"], "oracle": { "chi": 3, "csm": "2*h^2 + 3*h^3" } },
      "expected": { "X1.milnor": "-h^2", "intersection.milnor": "h^3", "intersection.chi": 3 }
    }"#;

    #[test]
    fn two_planes_file() {
        let f = ScenarioFile::from_json(TWO_PLANES).unwrap();
        let rep = run_compute(&f, &RunOptions::default()).unwrap();
        assert!(rep.pass(), "{rep:#?}");
        let (_, ir) = rep.intersection.as_ref().unwrap();
        assert!(ir.results.len() >= 6);
        assert_eq!(rep.hypersurfaces[0].routes.len(), 3);
    }

    #[test]
    fn unknown_stratum_names_field() {
        let text = TWO_PLANES.replace(
            r#""milnor_fiber_chi": 0 }"#,
            r#""milnor_fiber_chi": 0, "contained_in": ["nope"] }"#,
        );
        let f = ScenarioFile::from_json(&text).unwrap();
        match Scenario::build(&f) {
            Err(Error::Scenario { field, .. }) => {
                assert_eq!(field, "hypersurfaces[0].strata[1].contained_in[0]")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = ScenarioFile::from_json("{\n \"ambient\": }").unwrap_err();
        assert!(matches!(e, Error::Scenario { ref field, .. } if field.starts_with("line 2")));
        let e = ScenarioFile::from_json(r#"{"ambient": "P^2", "bogus": 1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"));
    }

    #[test]
    fn ambients() {
        assert_eq!(parse_ambient("P^3").unwrap().to_string(), "P^3");
        assert_eq!(parse_ambient("P^1 x P^2").unwrap().to_string(), "P^1 x P^2");
        assert!(parse_ambient("Q^2").is_err());
    }

    #[test]
    fn wrong_expectation_fails() {
        let text = TWO_PLANES.replace(r#""X1.milnor": "-h^2""#, r#""X1.milnor": "h^2""#);
        let rep = run_compute(
            &ScenarioFile::from_json(&text).unwrap(),
            &RunOptions::default(),
        )
        .unwrap();
        assert!(!rep.pass());
    }

    #[test]
    fn le_only_hypersurface() {
        let text = r#"{
          "ambient": "P^3",
          "hypersurfaces": [
            { "name": "X1", "degree": 2, "le_cycles": { "1": "h^2", "0": "2*h^3" } },
            { "name": "X2", "degree": 1 }
          ],
          "intersection": { "hypersurfaces": ["X1", "X2"] },
          "expected": { "X1.milnor": "-h^2", "intersection.milnor": "h^3" }
        }"#;
        let rep = run_compute(
            &ScenarioFile::from_json(text).unwrap(),
            &RunOptions::default(),
        )
        .unwrap();
        assert!(rep.pass(), "{rep:#?}");
        let (_, ir) = rep.intersection.as_ref().unwrap();
        assert!(ir.class(Formula::PpFull).is_none());
        assert!(ir.class(Formula::Le).is_some());
    }

    #[test]
    fn general_case_block() {
        let text = r#"{
          "ambient": "P^2",
          "general_case": { "base": "P^2", "bundle": { "split": [1, 1] }, "milnor_of_tilde": "z",
                            "pullback_classes": ["h", "3*h^2"] },
          "expected": { "general_case.milnor": "h^2" }
        }"#;
        let rep = run_compute(
            &ScenarioFile::from_json(text).unwrap(),
            &RunOptions::default(),
        )
        .unwrap();
        assert!(rep.pass(), "{rep:#?}");
    }
}
