//! Milnor class of a transversal intersection `X = X_1 ∩ ... ∩ X_r` of
//! hypersurfaces. Four closed formulas (the selector sum, the `a_{j,i}`
//! product form, the product-difference form and the stratum-tuple
//! expansion) plus a μ-class route and a Lê-cycle route, all evaluated in
//! the ambient Chow ring and compared by [`cross_validate`].

use std::fmt;
use std::sync::Arc;

use crate::bundle::{direct_sum, tangent_bundle, BundleClass};
use crate::chow::{same_ambient, AmbientSpace, CycleClass};
use crate::classes::{aluffi_milnor, hypersurface_classes, virtual_class, ClassTriple};
use crate::error::{Error, Result};
use crate::lecycles::{milnor_from_le_intersection, LeCycles, LeInput};
use crate::par::{self, ExecutionPolicy};
use crate::strata::{gamma_weights, sign, StratifiedHypersurface};

/// `ε_i` per hypersurface: `true` picks `c_SM(X_i)`, `false` picks `M(X_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermSelector {
    pub choices: Vec<bool>,
}

impl TermSelector {
    /// All selectors except the all-`c_SM` one, in binary order.
    pub fn all_admissible(r: usize) -> Vec<TermSelector> {
        let full = (1u64 << r) - 1;
        (0..full)
            .map(|bits| TermSelector {
                choices: (0..r).map(|i| bits >> i & 1 == 1).collect(),
            })
            .collect()
    }

    pub fn is_all_csm(&self) -> bool {
        self.choices.iter().all(|&e| e)
    }
}

impl fmt::Display for TermSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .choices
            .iter()
            .enumerate()
            .map(|(i, &e)| format!("{}{}", if e { "csm" } else { "M" }, i + 1))
            .collect();
        f.write_str(&parts.join("*"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Thm41,
    Cor11,
    Cor12,
    PpAis,
    PpFull,
    Aluffi,
    Le,
}

impl Formula {
    pub const ALL: [Formula; 7] = [
        Formula::Thm41,
        Formula::Cor11,
        Formula::Cor12,
        Formula::PpAis,
        Formula::PpFull,
        Formula::Aluffi,
        Formula::Le,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::Thm41 => "thm41",
            Formula::Cor11 => "cor11",
            Formula::Cor12 => "cor12",
            Formula::PpAis => "pp-ais",
            Formula::PpFull => "pp-full",
            Formula::Aluffi => "aluffi",
            Formula::Le => "le",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpMode {
    PerStratumAis,
    FullExpansion,
}

#[derive(Clone, Debug)]
pub struct IntersectionScenario {
    ambient: Arc<AmbientSpace>,
    hyps: Vec<StratifiedHypersurface>,
    classes: Vec<ClassTriple>,
    prefactor: CycleClass,
    mu_classes: Option<Vec<CycleClass>>,
    le_cycles: Option<Vec<LeCycles>>,
    strata_known: bool,
    /// Not checked; transversality is a hypothesis on the geometry.
    pub transversality_assumed: bool,
}

impl IntersectionScenario {
    pub fn new(hyps: Vec<StratifiedHypersurface>) -> Result<Self> {
        let classes = hyps
            .iter()
            .map(hypersurface_classes)
            .collect::<Result<Vec<_>>>()?;
        Self::with_classes(hyps, classes)
    }

    pub fn with_classes(
        hyps: Vec<StratifiedHypersurface>,
        classes: Vec<ClassTriple>,
    ) -> Result<Self> {
        if hyps.len() < 2 {
            return Err(Error::TooFewHypersurfaces(hyps.len()));
        }
        if classes.len() != hyps.len() {
            return Err(Error::MissingData(format!(
                "{} class triples for {} hypersurfaces",
                classes.len(),
                hyps.len()
            )));
        }
        let ambient = hyps[0].ambient().clone();
        for h in &hyps[1..] {
            if !same_ambient(h.ambient(), &ambient) {
                return Err(crate::chow::mismatch(h.ambient(), &ambient));
            }
        }
        for c in &classes {
            if !same_ambient(c.virt.ambient(), &ambient) {
                return Err(crate::chow::mismatch(c.virt.ambient(), &ambient));
            }
        }
        let prefactor = tangent_prefactor(&ambient, hyps.len() as u32)?;
        Ok(IntersectionScenario {
            ambient,
            hyps,
            classes,
            prefactor,
            mu_classes: None,
            le_cycles: None,
            strata_known: true,
            transversality_assumed: true,
        })
    }

    /// μ-classes per hypersurface, enabling the μ-class route.
    pub fn with_mu_classes(mut self, mus: Vec<CycleClass>) -> Result<Self> {
        self.check_len(mus.len(), "μ-classes")?;
        self.mu_classes = Some(mus);
        Ok(self)
    }

    /// Lê cycles per hypersurface, enabling the Lê-cycle route.
    pub fn with_le_cycles(mut self, le: Vec<LeCycles>) -> Result<Self> {
        self.check_len(le.len(), "Lê cycle sets")?;
        self.le_cycles = Some(le);
        Ok(self)
    }

    /// Marks the stratifications as unknown, which disables the
    /// per-stratum routes.
    pub fn without_strata(mut self) -> Self {
        self.strata_known = false;
        self
    }

    fn check_len(&self, got: usize, what: &str) -> Result<()> {
        if got != self.hyps.len() {
            return Err(Error::MissingData(format!(
                "{got} {what} for {} hypersurfaces",
                self.hyps.len()
            )));
        }
        Ok(())
    }

    pub fn ambient(&self) -> &Arc<AmbientSpace> {
        &self.ambient
    }

    pub fn hypersurfaces(&self) -> &[StratifiedHypersurface] {
        &self.hyps
    }

    pub fn classes(&self) -> &[ClassTriple] {
        &self.classes
    }

    pub fn r(&self) -> u32 {
        self.hyps.len() as u32
    }

    /// `c((TM)^{⊕(r-1)})^{-1}`.
    pub fn prefactor(&self) -> &CycleClass {
        &self.prefactor
    }

    /// Formulas whose input data is present.
    pub fn applicable(&self) -> Vec<Formula> {
        Formula::ALL
            .into_iter()
            .filter(|f| match f {
                Formula::Aluffi => self.mu_classes.is_some(),
                Formula::Le => self.le_cycles.is_some(),
                Formula::PpAis | Formula::PpFull => self.strata_known,
                _ => true,
            })
            .collect()
    }

    /// Line bundle `L_1 ⊕ ... ⊕ L_r` cutting out `X`.
    pub fn total_bundle(&self) -> Result<BundleClass> {
        let mut e = self.hyps[0].line_bundle().clone();
        for h in &self.hyps[1..] {
            e = direct_sum(&e, h.line_bundle())?;
        }
        Ok(e)
    }

    /// Virtual class of `X`.
    pub fn intersection_virtual(&self) -> Result<CycleClass> {
        let e = self.total_bundle()?;
        let x = self
            .hyps
            .iter()
            .fold(CycleClass::one(&self.ambient), |acc, h| {
                &acc * h.hypersurface_class()
            });
        virtual_class(&self.ambient, &e, &x)
    }

    pub fn evaluate(&self, f: Formula) -> Result<CycleClass> {
        if !self.applicable().contains(&f) {
            return Err(Error::MissingData(format!(
                "{} needs data this scenario lacks",
                f.name()
            )));
        }
        match f {
            Formula::Thm41 => milnor_thm41(self),
            Formula::Cor11 => milnor_cor11(self),
            Formula::Cor12 => milnor_cor12(self),
            Formula::PpAis => milnor_pp_type(self, PpMode::PerStratumAis),
            Formula::PpFull => milnor_pp_type(self, PpMode::FullExpansion),
            Formula::Aluffi => milnor_aluffi_intersection(self),
            Formula::Le => milnor_le_intersection(self),
        }
    }
}

/// `c((TM)^{⊕(r-1)})^{-1}` on a projective ambient.
pub fn tangent_prefactor(ambient: &Arc<AmbientSpace>, r: u32) -> Result<CycleClass> {
    let t = tangent_bundle(ambient)?;
    t.chern().pow(r.saturating_sub(1)).inverse()
}

/// `a_{1,i} ··· a_{r-1,i}` for the (0-based) index `i`, with
/// `a_{j,i} = c_SM(X_j)` for `j ≤ i` and `c_Vir(X_{j+1})` otherwise
/// (1-based `j`).
pub fn a_product(triples: &[&ClassTriple], i: usize) -> CycleClass {
    let amb = triples[0].virt.ambient();
    let mut acc = CycleClass::one(amb);
    for j in 1..triples.len() {
        let f = if j <= i {
            &triples[j - 1].csm
        } else {
            &triples[j].virt
        };
        acc = &acc * f;
    }
    acc
}

/// Terms of the selector sum before the prefactor: `(selector, sign, P_1···P_r)`.
pub fn thm41_terms(sc: &IntersectionScenario) -> Vec<(TermSelector, i64, CycleClass)> {
    let n = sc.ambient.dim();
    TermSelector::all_admissible(sc.hyps.len())
        .into_iter()
        .map(|sel| {
            let mut exp = 0u32;
            let mut prod = CycleClass::one(&sc.ambient);
            for (t, &eps) in sc.classes.iter().zip(&sel.choices) {
                if eps {
                    exp += n - t.codim;
                    prod = &prod * &t.csm;
                } else {
                    prod = &prod * &t.milnor;
                }
            }
            (sel, sign(exp), prod)
        })
        .collect()
}

pub fn milnor_thm41(sc: &IntersectionScenario) -> Result<CycleClass> {
    let n = sc.ambient.dim();
    let r = sc.r();
    let sum = thm41_terms(sc)
        .into_iter()
        .fold(CycleClass::zero(&sc.ambient), |acc, (_, s, p)| {
            &acc + &p.scale(s)
        });
    Ok((&sc.prefactor * &sum).scale(sign(n * r - n)))
}

pub fn milnor_cor11(sc: &IntersectionScenario) -> Result<CycleClass> {
    let milnors: Vec<CycleClass> = sc.classes.iter().map(|t| t.milnor.clone()).collect();
    cor11_with(sc, &milnors)
}

/// The `a_{j,i}` assembly with arbitrary per-hypersurface Milnor classes.
fn cor11_with(sc: &IntersectionScenario, milnors: &[CycleClass]) -> Result<CycleClass> {
    let triples: Vec<&ClassTriple> = sc.classes.iter().collect();
    let mut sum = CycleClass::zero(&sc.ambient);
    for (i, m) in milnors.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        sum += &(&a_product(&triples, i) * m);
    }
    Ok((&sc.prefactor * &sum).scale(sign(sc.r() - 1)))
}

pub fn milnor_cor12(sc: &IntersectionScenario) -> Result<CycleClass> {
    let n = sc.ambient.dim();
    let one = CycleClass::one(&sc.ambient);
    let pv = sc.classes.iter().fold(one.clone(), |acc, t| &acc * &t.virt);
    let pc = sc.classes.iter().fold(one, |acc, t| &acc * &t.csm);
    Ok((&sc.prefactor * &(&pv - &pc)).scale(sign(n.abs_diff(sc.r()))))
}

/// One admissible choice per hypersurface in the stratum-tuple expansion:
/// the regular part (`ε = 1`) or a singular stratum with `γ ≠ 0`.
struct StratumChoice {
    regular: bool,
    weight: i64,
    /// `c(L_i)^{ε-1} ∩ c_SM(S̄)`.
    factor: CycleClass,
}

fn stratum_choices(sc: &IntersectionScenario, i: usize) -> Result<Vec<StratumChoice>> {
    let hyp = &sc.hyps[i];
    let inv_l = hyp.line_bundle().chern().inverse()?;
    let gammas = gamma_weights(hyp);
    let mut out = vec![StratumChoice {
        regular: true,
        weight: 1,
        factor: sc.classes[i].csm.clone(),
    }];
    for s in hyp.singular_strata() {
        let g = gammas[&s.name];
        if g == 0 {
            continue;
        }
        let csm = s.csm_closure.as_ref().ok_or_else(|| {
            Error::MissingData(format!(
                "stratum {} of {} has no closure class",
                s.name,
                hyp.name()
            ))
        })?;
        out.push(StratumChoice {
            regular: false,
            weight: g,
            factor: &inv_l * csm,
        });
    }
    Ok(out)
}

pub fn milnor_pp_type(sc: &IntersectionScenario, mode: PpMode) -> Result<CycleClass> {
    let choices = (0..sc.hyps.len())
        .map(|i| stratum_choices(sc, i))
        .collect::<Result<Vec<_>>>()?;
    match mode {
        PpMode::PerStratumAis => {
            let pp_milnors: Vec<CycleClass> = choices
                .iter()
                .map(|cs| {
                    cs.iter()
                        .filter(|c| !c.regular)
                        .fold(CycleClass::zero(&sc.ambient), |acc, c| {
                            &acc + &c.factor.scale(c.weight)
                        })
                })
                .collect();
            cor11_with(sc, &pp_milnors)
        }
        PpMode::FullExpansion => {
            let n = sc.ambient.dim();
            let r = sc.r();
            let mut sum = CycleClass::zero(&sc.ambient);
            let mut idx = vec![0usize; choices.len()];
            loop {
                let picked: Vec<&StratumChoice> =
                    idx.iter().zip(&choices).map(|(&k, cs)| &cs[k]).collect();
                if !picked.iter().all(|c| c.regular) {
                    let eps: u32 = picked.iter().map(|c| c.regular as u32).sum();
                    let thm_exp: u32 = picked
                        .iter()
                        .zip(&sc.classes)
                        .filter(|(c, _)| c.regular)
                        .map(|(_, t)| n - t.codim)
                        .sum();
                    assert_eq!(
                        sign((n - 1) * eps),
                        sign(thm_exp),
                        "tuple sign must match the selector sign for hypersurfaces"
                    );
                    let coeff: i64 =
                        picked.iter().map(|c| c.weight).product::<i64>() * sign((n - 1) * eps);
                    let kernel = picked
                        .iter()
                        .fold(CycleClass::one(&sc.ambient), |acc, c| &acc * &c.factor);
                    sum += &kernel.scale(coeff);
                }
                if !advance(&mut idx, &choices) {
                    break;
                }
            }
            Ok((&sc.prefactor * &sum).scale(sign(n * r - n)))
        }
    }
}

fn advance(idx: &mut [usize], choices: &[Vec<StratumChoice>]) -> bool {
    for (k, cs) in idx.iter_mut().zip(choices) {
        *k += 1;
        if *k < cs.len() {
            return true;
        }
        *k = 0;
    }
    false
}

/// The `a_{j,i}` assembly with each `M(X_i)` taken from its μ-class.
pub fn milnor_aluffi_intersection(sc: &IntersectionScenario) -> Result<CycleClass> {
    let mus = sc
        .mu_classes
        .as_ref()
        .ok_or_else(|| Error::MissingData("no μ-classes supplied".into()))?;
    let milnors = sc
        .hyps
        .iter()
        .zip(mus)
        .map(|(h, mu)| aluffi_milnor(h, mu))
        .collect::<Result<Vec<_>>>()?;
    cor11_with(sc, &milnors)
}

pub fn milnor_le_intersection(sc: &IntersectionScenario) -> Result<CycleClass> {
    let le = sc
        .le_cycles
        .as_ref()
        .ok_or_else(|| Error::MissingData("no Lê cycles supplied".into()))?;
    let inputs: Vec<LeInput<'_>> = sc
        .hyps
        .iter()
        .zip(le)
        .zip(&sc.classes)
        .map(|((h, le), t)| LeInput {
            le,
            line_bundle: h.line_bundle(),
            classes: t,
        })
        .collect();
    milnor_from_le_intersection(&sc.ambient, &inputs)
}

/// Independent data about `X` itself, supplied by a fixture.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionOracle {
    /// `c_SM(X)`; gives the Milnor class directly from the definition.
    pub csm: Option<CycleClass>,
    /// `χ(X)` from a stratified count.
    pub chi: Option<i64>,
    /// Closure classes of the singular locus of `X`; every monomial of the
    /// result must be divisible by a monomial of one of them.
    pub support: Option<Vec<CycleClass>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionReport {
    pub results: Vec<(Formula, CycleClass)>,
    pub errors: Vec<(Formula, String)>,
    pub agree: bool,
    pub oracle: Vec<OracleCheck>,
}

impl IntersectionReport {
    pub fn pass(&self) -> bool {
        self.agree && self.errors.is_empty() && self.oracle.iter().all(|c| c.pass)
    }

    pub fn class(&self, f: Formula) -> Option<&CycleClass> {
        self.results.iter().find(|(g, _)| *g == f).map(|(_, c)| c)
    }
}

/// Runs the selected formulas (the applicable ones when `selection` is
/// empty), compares them pairwise and against the oracle.
pub fn cross_validate(
    sc: &IntersectionScenario,
    selection: &[Formula],
    oracle: Option<&IntersectionOracle>,
    policy: ExecutionPolicy,
) -> IntersectionReport {
    let applicable = sc.applicable();
    let wanted: Vec<Formula> = if selection.is_empty() {
        applicable
    } else {
        selection
            .iter()
            .copied()
            .filter(|f| applicable.contains(f))
            .collect()
    };
    let outcomes = par::map(policy, &wanted, |&f| (f, sc.evaluate(f)));
    let mut results = Vec::new();
    let mut errors = Vec::new();
    for (f, r) in outcomes {
        match r {
            Ok(c) => results.push((f, c)),
            Err(e) => errors.push((f, e.to_string())),
        }
    }
    let agree = results.windows(2).all(|w| w[0].1 == w[1].1);
    let mut checks = Vec::new();
    if let (Some(o), Some((_, m))) = (oracle, results.first()) {
        checks = oracle_checks(sc, o, m);
    }
    IntersectionReport {
        results,
        errors,
        agree,
        oracle: checks,
    }
}

fn oracle_checks(
    sc: &IntersectionScenario,
    o: &IntersectionOracle,
    m: &CycleClass,
) -> Vec<OracleCheck> {
    let n = sc.ambient.dim();
    let r = sc.r();
    let mut out = Vec::new();
    let virt = sc.intersection_virtual();
    if let (Some(csm), Ok(virt)) = (&o.csm, &virt) {
        let direct = (virt - csm).scale(sign(n.abs_diff(r)));
        out.push(OracleCheck {
            name: "direct-milnor".into(),
            expected: direct.to_string(),
            got: m.to_string(),
            pass: &direct == m,
        });
    }
    if let (Some(chi), Ok(virt)) = (o.chi, &virt) {
        let csm = virt - &m.scale(sign(n.abs_diff(r)));
        let got = csm.degree_i64();
        out.push(OracleCheck {
            name: "chi".into(),
            expected: chi.to_string(),
            got: got.to_string(),
            pass: got == chi,
        });
    }
    if let Err(e) = &virt {
        if o.csm.is_some() || o.chi.is_some() {
            out.push(OracleCheck {
                name: "virtual".into(),
                expected: "virtual class of X".into(),
                got: e.to_string(),
                pass: false,
            });
        }
    }
    if let Some(support) = &o.support {
        let ok = m.terms().all(|(mono, _)| {
            support.iter().any(|s| {
                s.terms()
                    .any(|(sm, _)| sm.iter().zip(mono).all(|(a, b)| a <= b))
            })
        });
        let expected: Vec<String> = support.iter().map(|s| s.to_string()).collect();
        out.push(OracleCheck {
            name: "support".into(),
            expected: format!("supported on [{}]", expected.join(", ")),
            got: m.to_string(),
            pass: ok,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::line_bundle;
    use crate::lecycles::{graded_pieces, milnor_to_le};
    use crate::strata::Stratum;

    fn cls(a: &Arc<AmbientSpace>, s: &str) -> CycleClass {
        CycleClass::parse(a, s).unwrap()
    }

    fn two_planes(p3: &Arc<AmbientSpace>) -> StratifiedHypersurface {
        let reg = Stratum::new(
            "reg",
            2,
            cls(p3, "2*h"),
            Some(cls(p3, "2*h+5*h^2+4*h^3")),
            1,
        );
        let line = Stratum::linear(p3, "line", 1, 0).unwrap();
        StratifiedHypersurface::new("tp", p3, line_bundle(p3, &[2]).unwrap(), vec![reg, line])
            .unwrap()
    }

    fn plane(p3: &Arc<AmbientSpace>) -> StratifiedHypersurface {
        StratifiedHypersurface::smooth("H", p3, line_bundle(p3, &[1]).unwrap()).unwrap()
    }

    fn cone(p3: &Arc<AmbientSpace>) -> StratifiedHypersurface {
        let reg = Stratum::new("reg", 2, cls(p3, "2*h"), None, 1);
        let v = Stratum::point(p3, "vertex", 2);
        StratifiedHypersurface::new("Q", p3, line_bundle(p3, &[2]).unwrap(), vec![reg, v]).unwrap()
    }

    fn all_formulas(sc: &IntersectionScenario) -> Vec<CycleClass> {
        [
            Formula::Thm41,
            Formula::Cor11,
            Formula::Cor12,
            Formula::PpAis,
            Formula::PpFull,
        ]
        .iter()
        .map(|&f| sc.evaluate(f).unwrap())
        .collect()
    }

    #[test]
    fn two_planes_cap_plane() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let sc = IntersectionScenario::new(vec![two_planes(&p3), plane(&p3)]).unwrap();
        for m in all_formulas(&sc) {
            assert_eq!(m, cls(&p3, "h^3"));
        }
        let oracle = IntersectionOracle {
            csm: Some(cls(&p3, "2*h^2+3*h^3")),
            chi: Some(3),
            support: Some(vec![cls(&p3, "h^3")]),
        };
        let rep = cross_validate(&sc, &[], Some(&oracle), ExecutionPolicy::Parallel);
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(sc.intersection_virtual().unwrap(), cls(&p3, "2*h^2+2*h^3"));
    }

    #[test]
    fn cone_cap_plane_vanishes() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let sc = IntersectionScenario::new(vec![cone(&p3), plane(&p3)]).unwrap();
        assert_eq!(sc.classes()[0].milnor, cls(&p3, "h^3"));
        for m in all_formulas(&sc) {
            assert!(m.is_zero());
        }
    }

    #[test]
    fn smooth_inputs_vanish() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let q = StratifiedHypersurface::smooth("Q", &p3, line_bundle(&p3, &[2]).unwrap()).unwrap();
        let sc = IntersectionScenario::new(vec![q, plane(&p3), plane(&p3)]).unwrap();
        for m in all_formulas(&sc) {
            assert!(m.is_zero());
        }
    }

    #[test]
    fn too_few() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        assert!(matches!(
            IntersectionScenario::new(vec![plane(&p3)]),
            Err(Error::TooFewHypersurfaces(1))
        ));
    }

    #[test]
    fn sign_coherence_r2() {
        // (-1)^n M1 M2 + (-1)^{d1} csm1 M2 + (-1)^{d2} M1 csm2, d_i = codim X_i = 1
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let sc = IntersectionScenario::new(vec![two_planes(&p3), cone(&p3)]).unwrap();
        let [a, b] = [&sc.classes()[0], &sc.classes()[1]];
        let n = 3;
        let expect = vec![
            (vec![false, false], sign(n), &a.milnor * &b.milnor),
            (vec![true, false], sign(a.codim), &a.csm * &b.milnor),
            (vec![false, true], sign(b.codim), &a.milnor * &b.csm),
        ];
        // The printed expansion carries the overall (-1)^{nr-n} = (-1)^n.
        let got: Vec<_> = thm41_terms(&sc)
            .into_iter()
            .map(|(s, e, p)| (s.choices, e * sign(n), p))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn le_route_matches_cor11() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let tp = two_planes(&p3);
        let h = plane(&p3);
        let le_tp = milnor_to_le(&p3, graded_pieces(&cls(&p3, "-h^2")), tp.line_bundle()).unwrap();
        let le_h = LeCycles::zero(&p3);
        let sc = IntersectionScenario::new(vec![tp, h])
            .unwrap()
            .with_le_cycles(vec![le_tp, le_h])
            .unwrap();
        assert_eq!(sc.evaluate(Formula::Le).unwrap(), cls(&p3, "h^3"));
    }

    #[test]
    fn aluffi_route() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let sc = IntersectionScenario::new(vec![two_planes(&p3), plane(&p3)])
            .unwrap()
            .with_mu_classes(vec![cls(&p3, "h^2"), CycleClass::zero(&p3)])
            .unwrap();
        assert_eq!(sc.evaluate(Formula::Aluffi).unwrap(), cls(&p3, "h^3"));
    }

    #[test]
    fn gamma_corruption_detected() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let bad = two_planes(&p3).with_milnor_fiber_chi("line", 1).unwrap();
        let sc = IntersectionScenario::new(vec![bad, plane(&p3)]).unwrap();
        let rep = cross_validate(&sc, &[], None, ExecutionPolicy::Sequential);
        assert!(!rep.agree);
        assert!(!rep.pass());
    }

    #[test]
    fn seq_and_par_agree() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let sc = IntersectionScenario::new(vec![two_planes(&p3), cone(&p3), plane(&p3)]).unwrap();
        let a = cross_validate(&sc, &[], None, ExecutionPolicy::Sequential);
        let b = cross_validate(&sc, &[], None, ExecutionPolicy::Parallel);
        assert_eq!(a, b);
        assert!(a.agree);
    }

    #[test]
    fn selector_enumeration() {
        let s = TermSelector::all_admissible(3);
        assert_eq!(s.len(), 7);
        assert!(s.iter().all(|t| !t.is_all_csm()));
        assert_eq!(s[1].to_string(), "csm1*M2*M3");
    }
}
