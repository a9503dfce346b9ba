//! Seeded randomized property suites. Every case draws from its own ChaCha
//! stream derived from `(seed, suite, property, case)`, so results do not
//! depend on the execution policy or on which properties are selected.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{direct_sum, dual, line_bundle, tensor_line, top_chern, BundleClass};
use crate::chow::{AmbientSpace, CycleClass};
use crate::classes::{
    aluffi_dual, aluffi_milnor, aluffi_tensor, csm_from_milnor, hypersurface_virtual, milnor_pp,
    mu_class, segre_builtin, ClassTriple, SegreCenter,
};
use crate::error::Error;
use crate::intersect::{cross_validate, Formula, IntersectionScenario, PpMode};
use crate::lecycles::{graded_pieces, le_to_milnor, milnor_to_le, total, LeCycles};
use crate::par::{self, ExecutionPolicy};
use crate::projbundle::{
    lemma1_pullback_check, lemma2_split_check, milnor_general, verify_tangent_identities,
    GeneralCaseInput, ProjBundleRing,
};
use crate::strata::{mu_weight, StratifiedHypersurface, Stratum};

pub type CaseRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Ring,
    Bundle,
    Classes,
    Lecycles,
    Intersect,
    Projbundle,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Ring,
        Suite::Bundle,
        Suite::Classes,
        Suite::Lecycles,
        Suite::Intersect,
        Suite::Projbundle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ring => "ring",
            Suite::Bundle => "bundle",
            Suite::Classes => "classes",
            Suite::Lecycles => "lecycles",
            Suite::Intersect => "intersect",
            Suite::Projbundle => "projbundle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::scenario("suite", format!("unknown suite `{s}`")))
    }
}

type Check = fn(&mut CaseRng) -> Result<(), String>;

pub struct Property {
    pub suite: Suite,
    pub name: &'static str,
    check: Check,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyResult {
    pub suite: Suite,
    pub name: &'static str,
    pub cases: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    pub fn pass(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub seed: u64,
    pub results: Vec<PropertyResult>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.results.iter().all(PropertyResult::pass)
    }

    pub fn total_cases(&self) -> usize {
        self.results.iter().map(|r| r.cases).sum()
    }
}

pub const DEFAULT_CASES: usize = 100;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn name_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}

/// The generator for one case of one property.
pub fn case_rng(seed: u64, suite: Suite, property: &str, case: usize) -> CaseRng {
    let k = splitmix(seed ^ splitmix(name_hash(suite.name()) ^ splitmix(name_hash(property))));
    CaseRng::seed_from_u64(splitmix(k ^ case as u64))
}

pub fn properties() -> Vec<Property> {
    use Suite::*;
    let p = |suite, name, check: Check| Property { suite, name, check };
    vec![
        p(Ring, "mul-associative", ring_assoc),
        p(Ring, "mul-commutative-distributive", ring_comm_dist),
        p(Ring, "unit-inverse", ring_inverse),
        p(Ring, "parse-display-roundtrip", ring_parse),
        p(Ring, "sign-flip-multiplicative-involution", ring_sign_flip),
        p(Ring, "degree-additive", ring_degree),
        p(Bundle, "whitney", bundle_whitney),
        p(Bundle, "dual-involution", bundle_dual),
        p(Bundle, "twist-split-oracle", bundle_twist_oracle),
        p(Bundle, "twist-composition", bundle_twist_compose),
        p(Bundle, "twist-dual", bundle_twist_dual),
        p(Bundle, "twist-trivial", bundle_twist_trivial),
        p(Classes, "definition-roundtrip", classes_definition),
        p(Classes, "aluffi-equals-pp-isolated", classes_aluffi_pp),
        p(Classes, "isolated-milnor-number", classes_milnor_number),
        p(Classes, "smooth-hypersurface", classes_smooth),
        p(Classes, "aluffi-tensor-composition", classes_tensor),
        p(Classes, "aluffi-dual", classes_dual),
        p(Lecycles, "le-milnor-le", le_roundtrip),
        p(Lecycles, "milnor-le-milnor", le_roundtrip_back),
        p(Lecycles, "isolated-le0", le_isolated),
        p(Lecycles, "leformula-equals-cor11", le_formula),
        p(Lecycles, "linearity", le_linear),
        p(Lecycles, "top-piece", le_top),
        p(Intersect, "thm41-equals-cor11", int_cor11),
        p(Intersect, "thm41-equals-cor12", int_cor12),
        p(Intersect, "thm41-equals-pp-full", int_pp_full),
        p(Intersect, "pp-ais-equals-pp-full", int_pp_modes),
        p(Intersect, "smooth-vanishing", int_smooth),
        p(Intersect, "seq-par-identical", int_seq_par),
        p(Intersect, "support-dimension", int_support),
        p(Projbundle, "grothendieck-relation", pb_relation),
        p(Projbundle, "projection-formula", pb_projection),
        p(Projbundle, "tangent-identities", pb_tangent),
        p(Projbundle, "lemma2-split", pb_lemma2),
        p(Projbundle, "rank-one-degeneration", pb_rank_one),
        p(Projbundle, "normal-form-uniqueness", pb_normal_form),
        p(Projbundle, "lemma1-pullback", pb_lemma1),
    ]
}

/// Runs every property of the given suites (all suites when empty).
pub fn run_suites(
    suites: &[Suite],
    seed: u64,
    cases: usize,
    policy: ExecutionPolicy,
) -> VerifyReport {
    let start = Instant::now();
    let props: Vec<Property> = properties()
        .into_iter()
        .filter(|p| suites.is_empty() || suites.contains(&p.suite))
        .collect();
    let results = props
        .iter()
        .map(|p| run_property(p, seed, cases, policy))
        .collect();
    VerifyReport {
        seed,
        results,
        elapsed: start.elapsed(),
    }
}

/// One suite (or all of them for `None`) with the default case count.
pub fn run_verify(suite: Option<Suite>, seed: u64) -> VerifyReport {
    let suites: Vec<Suite> = suite.into_iter().collect();
    run_suites(&suites, seed, DEFAULT_CASES, ExecutionPolicy::default())
}

fn run_property(p: &Property, seed: u64, cases: usize, policy: ExecutionPolicy) -> PropertyResult {
    let outcomes = par::map_range(policy, cases, |i| {
        let mut rng = case_rng(seed, p.suite, p.name, i);
        (p.check)(&mut rng).map_err(|e| format!("case {i}: {e}"))
    });
    let failures: Vec<String> = outcomes.into_iter().filter_map(Result::err).collect();
    PropertyResult {
        suite: p.suite,
        name: p.name,
        cases,
        failed: failures.len(),
        first_failure: failures.into_iter().next(),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq(a: &CycleClass, b: &CycleClass, what: &str) -> Result<(), String> {
    ensure(a == b, || format!("{what}: {a} != {b}"))
}

fn e2s<T>(r: crate::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- generators

pub fn random_proj_space(rng: &mut CaseRng, lo: i64, hi: i64) -> Arc<AmbientSpace> {
    AmbientSpace::proj_space(rng.gen_range(lo..=hi)).expect("valid dimension")
}

/// Projective spaces, products and small projective bundles.
pub fn random_ambient(rng: &mut CaseRng) -> Arc<AmbientSpace> {
    match rng.gen_range(0..6) {
        0..=2 => random_proj_space(rng, 1, 4),
        3 => AmbientSpace::multi_proj(&[1, 1]).unwrap(),
        4 => AmbientSpace::multi_proj(&[1, rng.gen_range(1..=2)]).unwrap(),
        _ => random_pb_ring(rng, 3).total().clone(),
    }
}

pub fn random_class(rng: &mut CaseRng, amb: &Arc<AmbientSpace>, max_coeff: i64) -> CycleClass {
    let k = amb.ngens();
    let top = amb.top_monomial();
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(0..=5) {
        let m: Vec<u32> = (0..k).map(|i| rng.gen_range(0..=top[i].max(1))).collect();
        terms.push((m, rng.gen_range(-max_coeff..=max_coeff)));
    }
    CycleClass::from_terms(amb, terms).expect("valid exponents")
}

/// Homogeneous of the given codimension.
pub fn random_homogeneous(
    rng: &mut CaseRng,
    amb: &Arc<AmbientSpace>,
    codim: u32,
    max_coeff: i64,
) -> CycleClass {
    let mut c = CycleClass::zero(amb);
    for _ in 0..3 {
        let x = random_class(rng, amb, max_coeff)
            .component(codim as i64)
            .unwrap();
        c = &c + &x;
    }
    if c.is_zero() && codim <= amb.dim() {
        let m = monomial_of_codim(rng, amb, codim);
        c = CycleClass::monomial(amb, &m, rng.gen_range(1..=max_coeff.max(1)));
    }
    c
}

fn monomial_of_codim(rng: &mut CaseRng, amb: &Arc<AmbientSpace>, codim: u32) -> Vec<u32> {
    let top = amb.top_monomial();
    let mut m = vec![0u32; top.len()];
    let mut left = codim;
    while left > 0 {
        let i = rng.gen_range(0..m.len());
        if m[i] < top[i] || top.len() == 1 {
            m[i] += 1;
            left -= 1;
        }
    }
    m
}

pub fn random_unit(rng: &mut CaseRng, amb: &Arc<AmbientSpace>) -> CycleClass {
    let x = random_class(rng, amb, 4).truncate_below(1);
    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
    &CycleClass::constant(amb, s) + &x
}

pub fn random_multidegree(
    rng: &mut CaseRng,
    amb: &Arc<AmbientSpace>,
    lo: i64,
    hi: i64,
) -> Vec<i64> {
    (0..amb.ngens()).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// A bundle of rank `rank` with arbitrary Chern classes.
pub fn random_bundle(rng: &mut CaseRng, amb: &Arc<AmbientSpace>, rank: u32) -> BundleClass {
    let mut c = CycleClass::one(amb);
    for k in 1..=rank.min(amb.dim()) {
        c = &c + &random_class(rng, amb, 4).component(k as i64).unwrap();
    }
    BundleClass::new(rank, c).expect("components bounded by rank")
}

pub fn split_bundle(
    amb: &Arc<AmbientSpace>,
    degrees: &[Vec<i64>],
) -> crate::error::Result<BundleClass> {
    let mut e = BundleClass::trivial(amb, 0);
    for d in degrees {
        e = direct_sum(&e, &line_bundle(amb, d)?)?;
    }
    Ok(e)
}

/// Base `P^1` or `P^2`, rank 1..=max_rank, split or arbitrary Chern classes.
pub fn random_pb_ring(rng: &mut CaseRng, max_rank: u32) -> ProjBundleRing {
    let base = random_proj_space(rng, 1, 2);
    let r = rng.gen_range(1..=max_rank);
    let e = if rng.gen_bool(0.5) {
        let degs: Vec<Vec<i64>> = (0..r).map(|_| vec![rng.gen_range(-2..=3)]).collect();
        split_bundle(&base, &degs).unwrap()
    } else {
        random_bundle(rng, &base, r)
    };
    ProjBundleRing::new(&base, &e).expect("valid bundle")
}

/// A degree `1..=3` hypersurface in `P^n` with isolated singular points of
/// Milnor number `>= 1`, together with the total Milnor number.
pub fn random_isolated_hypersurface(
    rng: &mut CaseRng,
    amb: &Arc<AmbientSpace>,
) -> (StratifiedHypersurface, i64) {
    let n = amb.dim();
    let d = rng.gen_range(1..=3);
    let lb = line_bundle(amb, &[d]).unwrap();
    let mut strata = vec![Stratum::new("reg", n - 1, lb.c1(), None, 1)];
    let mut total_mu = 0;
    for j in 0..rng.gen_range(0..=3) {
        let mu: i64 = rng.gen_range(1..=3);
        // μ = (-1)^(n-1) (χ - 1)
        let chi = 1 + crate::strata::sign(n - 1) * mu;
        strata.push(Stratum::point(amb, format!("p{j}"), chi));
        total_mu += mu;
    }
    let h = StratifiedHypersurface::new("X", amb, lb, strata).expect("valid strata");
    (h, total_mu)
}

/// A degree `1..=3` hypersurface in `P^2` or `P^3` with builtin singular
/// strata: points, and in `P^3` possibly a line with points on or off it.
/// Local Euler characteristics are arbitrary in `-3..=3`.
pub fn random_hypersurface(
    rng: &mut CaseRng,
    amb: &Arc<AmbientSpace>,
    name: &str,
) -> StratifiedHypersurface {
    let n = amb.dim();
    let d = rng.gen_range(1..=3);
    let lb = line_bundle(amb, &[d]).unwrap();
    let mut strata = vec![Stratum::new("reg", n - 1, lb.c1(), None, 1)];
    let has_line = n >= 3 && rng.gen_bool(0.5);
    if has_line {
        strata.push(Stratum::linear(amb, "line", 1, rng.gen_range(-3..=3)).unwrap());
    }
    for j in 0..rng.gen_range(0..=2) {
        let mut s = Stratum::point(amb, format!("p{j}"), rng.gen_range(-3..=3));
        if has_line && rng.gen_bool(0.5) {
            s = s.inside(["line"]);
        }
        strata.push(s);
    }
    StratifiedHypersurface::new(name, amb, lb, strata).expect("valid strata")
}

/// `P^2` with `r = 2`, or `P^3` with `r = 2..=3`.
pub fn random_scenario(rng: &mut CaseRng) -> IntersectionScenario {
    let amb = random_proj_space(rng, 2, 3);
    let r = if amb.dim() == 2 {
        2
    } else {
        rng.gen_range(2..=3)
    };
    let hyps = (0..r)
        .map(|i| random_hypersurface(rng, &amb, &format!("X{}", i + 1)))
        .collect();
    IntersectionScenario::new(hyps).expect("valid scenario")
}

fn random_smooth_scenario(rng: &mut CaseRng) -> IntersectionScenario {
    let amb = random_proj_space(rng, 2, 4);
    let r = rng.gen_range(2..=amb.dim().min(3));
    let hyps = (0..r)
        .map(|i| {
            let lb = line_bundle(&amb, &[rng.gen_range(1..=4)]).unwrap();
            StratifiedHypersurface::smooth(format!("X{}", i + 1), &amb, lb).unwrap()
        })
        .collect();
    IntersectionScenario::new(hyps).unwrap()
}

// ---------------------------------------------------------------------- ring

fn ring_assoc(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_ambient(rng);
    let [a, b, c] = [0; 3].map(|_| random_class(rng, &amb, 5));
    eq(&(&(&a * &b) * &c), &(&a * &(&b * &c)), "(ab)c vs a(bc)")
}

fn ring_comm_dist(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_ambient(rng);
    let [a, b, c] = [0; 3].map(|_| random_class(rng, &amb, 5));
    eq(&(&a * &b), &(&b * &a), "ab vs ba")?;
    eq(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), "a(b+c)")
}

fn ring_inverse(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_ambient(rng);
    let u = random_unit(rng, &amb);
    let inv = e2s(u.inverse())?;
    ensure((&u * &inv).is_one(), || format!("{u} * {inv} != 1"))?;
    let x = random_class(rng, &amb, 3).truncate_below(1);
    let y = &CycleClass::constant(&amb, 2) + &x;
    ensure(y.inverse().is_err(), || {
        format!("{y} should not be invertible")
    })
}

fn ring_parse(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_ambient(rng);
    let a = random_class(rng, &amb, 50);
    let back = e2s(CycleClass::parse(&amb, &a.to_string()))?;
    eq(&back, &a, "parse(display)")
}

fn ring_sign_flip(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_ambient(rng);
    let [a, b] = [0; 2].map(|_| random_class(rng, &amb, 5));
    eq(&a.graded_sign_flip().graded_sign_flip(), &a, "double flip")?;
    eq(
        &(&a * &b).graded_sign_flip(),
        &(&a.graded_sign_flip() * &b.graded_sign_flip()),
        "flip(ab)",
    )
}

fn ring_degree(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_ambient(rng);
    let [a, b] = [0; 2].map(|_| random_class(rng, &amb, 5));
    ensure((&a + &b).degree() == a.degree() + b.degree(), || {
        format!("deg({a} + {b})")
    })?;
    ensure(CycleClass::point(&amb).degree_i64() == 1, || {
        "deg [pt] != 1".into()
    })
}

// -------------------------------------------------------------------- bundle

fn random_flat_ambient(rng: &mut CaseRng) -> Arc<AmbientSpace> {
    match rng.gen_range(0..4) {
        0..=2 => random_proj_space(rng, 1, 5),
        _ => AmbientSpace::multi_proj(&[rng.gen_range(1..=2), rng.gen_range(1..=2)]).unwrap(),
    }
}

fn bundle_whitney(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_flat_ambient(rng);
    let e = {
        let r = rng.gen_range(0..=4);
        random_bundle(rng, &amb, r)
    };
    let f = {
        let r = rng.gen_range(0..=4);
        random_bundle(rng, &amb, r)
    };
    let s = e2s(direct_sum(&e, &f))?;
    ensure(s.rank() == e.rank() + f.rank(), || {
        "rank not additive".into()
    })?;
    eq(s.chern(), &(e.chern() * f.chern()), "c(E+F)")?;
    eq(
        &top_chern(&s),
        &(&top_chern(&e) * &top_chern(&f)),
        "c_top(E+F)",
    )
}

fn bundle_dual(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_flat_ambient(rng);
    let e = {
        let r = rng.gen_range(0..=4);
        random_bundle(rng, &amb, r)
    };
    let f = {
        let r = rng.gen_range(0..=4);
        random_bundle(rng, &amb, r)
    };
    ensure(dual(&dual(&e)) == e, || "dual not involutive".into())?;
    let lhs = dual(&e2s(direct_sum(&e, &f))?);
    let rhs = e2s(direct_sum(&dual(&e), &dual(&f)))?;
    eq(lhs.chern(), rhs.chern(), "dual(E+F)")
}

fn bundle_twist_oracle(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_flat_ambient(rng);
    let r = rng.gen_range(1..=4);
    let degs: Vec<Vec<i64>> = (0..r)
        .map(|_| random_multidegree(rng, &amb, -3, 3))
        .collect();
    let ld = random_multidegree(rng, &amb, -3, 3);
    let e = e2s(split_bundle(&amb, &degs))?;
    let l = e2s(line_bundle(&amb, &ld))?;
    let got = e2s(tensor_line(&e, &l))?;
    let shifted: Vec<Vec<i64>> = degs
        .iter()
        .map(|d| d.iter().zip(&ld).map(|(a, b)| a + b).collect())
        .collect();
    let expect = e2s(split_bundle(&amb, &shifted))?;
    eq(got.chern(), expect.chern(), "twist of split bundle")
}

fn bundle_twist_compose(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_flat_ambient(rng);
    let e = {
        let r = rng.gen_range(1..=4);
        random_bundle(rng, &amb, r)
    };
    let (a, b) = (
        random_multidegree(rng, &amb, -3, 3),
        random_multidegree(rng, &amb, -3, 3),
    );
    let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let la = e2s(line_bundle(&amb, &a))?;
    let lb = e2s(line_bundle(&amb, &b))?;
    let lab = e2s(line_bundle(&amb, &ab))?;
    let lhs = e2s(tensor_line(&e2s(tensor_line(&e, &la))?, &lb))?;
    let rhs = e2s(tensor_line(&e, &lab))?;
    eq(lhs.chern(), rhs.chern(), "(E(x)A)(x)B")
}

fn bundle_twist_dual(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_flat_ambient(rng);
    let e = {
        let r = rng.gen_range(1..=4);
        random_bundle(rng, &amb, r)
    };
    let l = e2s(line_bundle(&amb, &random_multidegree(rng, &amb, -3, 3)))?;
    let lhs = dual(&e2s(tensor_line(&e, &l))?);
    let rhs = e2s(tensor_line(&dual(&e), &dual(&l)))?;
    eq(lhs.chern(), rhs.chern(), "dual(E(x)L)")
}

fn bundle_twist_trivial(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_flat_ambient(rng);
    let e = {
        let r = rng.gen_range(0..=4);
        random_bundle(rng, &amb, r)
    };
    let o = e2s(line_bundle(&amb, &vec![0; amb.ngens()]))?;
    let t = e2s(tensor_line(&e, &o))?;
    ensure(t == e, || format!("E(x)O = {t:?}, E = {e:?}"))
}

// ------------------------------------------------------------------- classes

fn classes_definition(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 1, 5);
    let codim = rng.gen_range(1..=amb.dim());
    let virt = random_class(rng, &amb, 6).truncate_below(codim);
    let csm = random_class(rng, &amb, 6).truncate_below(codim);
    let t = e2s(ClassTriple::from_virtual_and_csm(
        virt.clone(),
        csm.clone(),
        codim,
    ))?;
    ensure(t.definition_holds(), || "definition identity".into())?;
    let back = e2s(csm_from_milnor(&virt, &t.milnor, amb.dim(), codim))?;
    eq(&back, &csm, "csm from milnor")
}

fn classes_aluffi_pp(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 4);
    let (h, mu) = random_isolated_hypersurface(rng, &amb);
    let seg = e2s(segre_builtin(&amb, SegreCenter::Points(mu as u32)))?;
    let m = e2s(mu_class(&h, &seg))?;
    let a = e2s(aluffi_milnor(&h, &m))?;
    eq(&a, &milnor_pp(&h), "aluffi vs pp")
}

fn classes_milnor_number(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 4);
    let (h, mu) = random_isolated_hypersurface(rng, &amb);
    let m = milnor_pp(&h);
    let by_strata: i64 = h.singular_strata().map(|s| mu_weight(s, &h)).sum();
    ensure(by_strata == mu, || {
        format!("Σμ_S = {by_strata}, expected {mu}")
    })?;
    eq(&m, &CycleClass::point(&amb).scale(mu), "M = Σμ [pt]")
}

fn classes_smooth(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 1, 5);
    let n = amb.dim() as i64;
    let d = rng.gen_range(1..=5i64);
    let h = e2s(StratifiedHypersurface::smooth(
        "X",
        &amb,
        e2s(line_bundle(&amb, &[d]))?,
    ))?;
    ensure(milnor_pp(&h).is_zero(), || {
        "smooth Milnor class nonzero".into()
    })?;
    let chi = e2s(hypersurface_virtual(&h))?.degree_i64();
    // χ = ((1 - d)^(n+1) - 1) / d + n + 1
    let expect = ((1 - d).pow(n as u32 + 1) - 1) / d + n + 1;
    ensure(chi == expect, || {
        format!("χ = {chi}, expected {expect} (n={n}, d={d})")
    })
}

fn classes_tensor(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 1, 5);
    let a = random_class(rng, &amb, 6);
    let (x, y) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
    let lx = e2s(line_bundle(&amb, &[x]))?;
    let ly = e2s(line_bundle(&amb, &[y]))?;
    let lxy = e2s(line_bundle(&amb, &[x + y]))?;
    let lhs = e2s(aluffi_tensor(&e2s(aluffi_tensor(&a, &lx))?, &ly))?;
    eq(&lhs, &e2s(aluffi_tensor(&a, &lxy))?, "(a(x)L)(x)M")?;
    eq(
        &e2s(aluffi_tensor(&a, &e2s(line_bundle(&amb, &[0]))?))?,
        &a,
        "a(x)O",
    )
}

fn classes_dual(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 1, 5);
    let [a, b] = [0; 2].map(|_| random_class(rng, &amb, 6));
    eq(&aluffi_dual(&aluffi_dual(&a)), &a, "double dual")?;
    eq(
        &aluffi_dual(&(&a * &b)),
        &(&aluffi_dual(&a) * &aluffi_dual(&b)),
        "dual(ab)",
    )
}

// ------------------------------------------------------------------ lecycles

fn random_le(rng: &mut CaseRng, amb: &Arc<AmbientSpace>) -> LeCycles {
    let n = amb.dim();
    let top = rng.gen_range(0..n.max(1));
    let mut map = std::collections::BTreeMap::new();
    for k in 0..=top {
        if rng.gen_bool(0.8) {
            map.insert(k, random_homogeneous(rng, amb, n - k, 9));
        }
    }
    LeCycles::new(amb, map).expect("homogeneous by construction")
}

fn le_roundtrip(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 6);
    let l = e2s(line_bundle(&amb, &[rng.gen_range(-4..=6)]))?;
    let le = random_le(rng, &amb);
    let m = e2s(le_to_milnor(&le, &l))?;
    let back = e2s(milnor_to_le(&amb, m, &l))?;
    ensure(back == le, || format!("{back:?} != {le:?}"))
}

fn le_roundtrip_back(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 6);
    let l = e2s(line_bundle(&amb, &[rng.gen_range(-4..=6)]))?;
    let m = graded_pieces(&random_class(rng, &amb, 9).truncate_below(2));
    let le = e2s(milnor_to_le(&amb, m.clone(), &l))?;
    let back = e2s(le_to_milnor(&le, &l))?;
    ensure(back == m, || format!("{back:?} != {m:?}"))
}

fn le_isolated(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 4);
    let (h, _) = random_isolated_hypersurface(rng, &amb);
    let le = e2s(milnor_to_le(
        &amb,
        graded_pieces(&milnor_pp(&h)),
        h.line_bundle(),
    ))?;
    ensure(le.top().unwrap_or(0) == 0, || {
        "higher Lê cycle for isolated singularities".into()
    })?;
    eq(&le.get(0), &milnor_pp(&h), "Λ_0 vs M_0")
}

fn le_formula(rng: &mut CaseRng) -> Result<(), String> {
    let sc = random_scenario(rng);
    let le = sc
        .hypersurfaces()
        .iter()
        .zip(sc.classes())
        .map(|(h, t)| milnor_to_le(sc.ambient(), graded_pieces(&t.milnor), h.line_bundle()))
        .collect::<crate::error::Result<Vec<_>>>();
    let sc = e2s(sc.with_le_cycles(e2s(le)?))?;
    eq(
        &e2s(sc.evaluate(Formula::Le))?,
        &e2s(sc.evaluate(Formula::Cor11))?,
        "Lê route vs cor11",
    )
}

fn le_linear(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 5);
    let l = e2s(line_bundle(&amb, &[rng.gen_range(-4..=6)]))?;
    let (a, b) = (random_le(rng, &amb), random_le(rng, &amb));
    let mut sum = std::collections::BTreeMap::new();
    for k in 0..=amb.dim() {
        sum.insert(k, &a.get(k) + &b.get(k));
    }
    let s = e2s(LeCycles::new(&amb, sum))?;
    let lhs = total(&amb, &e2s(le_to_milnor(&s, &l))?);
    let rhs = &total(&amb, &e2s(le_to_milnor(&a, &l))?) + &total(&amb, &e2s(le_to_milnor(&b, &l))?);
    eq(&lhs, &rhs, "linearity")
}

fn le_top(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 6);
    let l = e2s(line_bundle(&amb, &[rng.gen_range(-4..=6)]))?;
    let le = random_le(rng, &amb);
    let Some(top) = le.top() else { return Ok(()) };
    let m = e2s(le_to_milnor(&le, &l))?;
    let sign = if top % 2 == 0 { 1 } else { -1 };
    eq(&m[&top], &le.get(top).scale(sign), "M_top")
}

// ----------------------------------------------------------------- intersect

fn formula_eq(sc: &IntersectionScenario, a: Formula, b: Formula) -> Result<(), String> {
    let x = e2s(sc.evaluate(a))?;
    let y = e2s(sc.evaluate(b))?;
    ensure(x == y, || format!("{a} = {x}, {b} = {y}"))
}

fn int_cor11(rng: &mut CaseRng) -> Result<(), String> {
    formula_eq(&random_scenario(rng), Formula::Thm41, Formula::Cor11)
}

fn int_cor12(rng: &mut CaseRng) -> Result<(), String> {
    formula_eq(&random_scenario(rng), Formula::Thm41, Formula::Cor12)
}

fn int_pp_full(rng: &mut CaseRng) -> Result<(), String> {
    formula_eq(&random_scenario(rng), Formula::Thm41, Formula::PpFull)
}

fn int_pp_modes(rng: &mut CaseRng) -> Result<(), String> {
    let sc = random_scenario(rng);
    let a = e2s(crate::intersect::milnor_pp_type(&sc, PpMode::PerStratumAis))?;
    let b = e2s(crate::intersect::milnor_pp_type(&sc, PpMode::FullExpansion))?;
    eq(&a, &b, "pp modes")
}

fn int_smooth(rng: &mut CaseRng) -> Result<(), String> {
    let sc = random_smooth_scenario(rng);
    for f in sc.applicable() {
        let m = e2s(sc.evaluate(f))?;
        ensure(m.is_zero(), || format!("{f} = {m} on smooth inputs"))?;
    }
    Ok(())
}

fn int_seq_par(rng: &mut CaseRng) -> Result<(), String> {
    let sc = random_scenario(rng);
    let a = cross_validate(&sc, &[], None, ExecutionPolicy::Sequential);
    let b = cross_validate(&sc, &[], None, ExecutionPolicy::Parallel);
    ensure(a == b, || "sequential and parallel reports differ".into())?;
    ensure(a.pass(), || format!("formulas disagree: {:?}", a.results))
}

fn int_support(rng: &mut CaseRng) -> Result<(), String> {
    let sc = random_scenario(rng);
    let n = sc.ambient().dim();
    let m = e2s(sc.evaluate(Formula::Thm41))?;
    let sing = sc
        .hypersurfaces()
        .iter()
        .filter_map(StratifiedHypersurface::singular_dim)
        .max();
    let bound = match sing {
        None => return ensure(m.is_zero(), || format!("{m} with smooth inputs")),
        Some(s) => s as i64 - (sc.r() as i64 - 1),
    };
    for c in m.codims() {
        let dim = (n - c) as i64;
        ensure(dim <= bound, || {
            format!("component of dimension {dim} in {m}, bound {bound}")
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------- projbundle

fn pb_relation(rng: &mut CaseRng) -> Result<(), String> {
    let ring = random_pb_ring(rng, 3);
    let res = e2s(ring.relation_residue())?;
    ensure(res.is_zero(), || format!("residue {res}"))?;
    e2s(ring.taut_sub_chern()).map(|_| ())
}

fn pb_projection(rng: &mut CaseRng) -> Result<(), String> {
    let ring = random_pb_ring(rng, 3);
    let a = random_class(rng, ring.base(), 5);
    let b = random_class(rng, ring.total(), 5);
    let lhs = e2s(ring.pushforward(&(&e2s(ring.pullback(&a))? * &b)))?;
    let rhs = &a * &e2s(ring.pushforward(&b))?;
    eq(&lhs, &rhs, "p_*(p*a b)")
}

fn pb_tangent(rng: &mut CaseRng) -> Result<(), String> {
    let ring = random_pb_ring(rng, 3);
    let checks = verify_tangent_identities(&ring, None);
    match checks.iter().find(|c| !c.pass) {
        Some(c) => Err(format!("{}: {}", c.name, c.detail)),
        None => Ok(()),
    }
}

fn pb_lemma2(rng: &mut CaseRng) -> Result<(), String> {
    let amb = random_proj_space(rng, 2, 4);
    let (a, b) = (rng.gen_range(-3..=4), rng.gen_range(-3..=4));
    let (d, t) = e2s(lemma2_split_check(&amb, a, b))?;
    eq(&d, &t, "direct vs transferred")
}

fn pb_rank_one(rng: &mut CaseRng) -> Result<(), String> {
    let base = random_proj_space(rng, 1, 4);
    let l = e2s(line_bundle(&base, &[rng.gen_range(-3..=3)]))?;
    let ring = e2s(ProjBundleRing::new(&base, &l))?;
    let m = random_class(rng, ring.total(), 5);
    let out = e2s(milnor_general(&GeneralCaseInput {
        ring: ring.clone(),
        milnor_of_tilde: m.clone(),
    }))?;
    let input_on_base = e2s(CycleClass::from_terms(
        &base,
        m.terms().map(|(mono, c)| (mono[..1].to_vec(), c.clone())),
    ))?;
    eq(&out, &input_on_base, "r = 1 output vs input")
}

fn pb_normal_form(rng: &mut CaseRng) -> Result<(), String> {
    let ring = random_pb_ring(rng, 3);
    let amb = ring.total();
    let k = rng.gen_range(2..=6);
    let gens: Vec<CycleClass> = (0..k)
        .map(|_| CycleClass::generator(amb, rng.gen_range(0..amb.ngens())))
        .collect();
    let left = gens.iter().skip(1).fold(gens[0].clone(), |acc, g| &acc * g);
    let right = gens
        .iter()
        .rev()
        .skip(1)
        .fold(gens[k - 1].clone(), |acc, g| g * &acc);
    let split = rng.gen_range(1..k);
    let a = gens[..split]
        .iter()
        .skip(1)
        .fold(gens[0].clone(), |acc, g| &acc * g);
    let b = gens[split..]
        .iter()
        .skip(1)
        .fold(gens[split].clone(), |acc, g| &acc * g);
    eq(&left, &right, "left vs right association")?;
    eq(&left, &(&a * &b), "split association")
}

fn pb_lemma1(rng: &mut CaseRng) -> Result<(), String> {
    let ring = random_pb_ring(rng, 3);
    let alphas: Vec<CycleClass> = (0..3).map(|_| random_class(rng, ring.base(), 5)).collect();
    ensure(e2s(lemma1_pullback_check(&ring, &alphas))?, || {
        "p_*(ζ^(r-1) p*α) != α".into()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_has_five_properties() {
        let props = properties();
        for s in Suite::ALL {
            assert!(props.iter().filter(|p| p.suite == s).count() >= 5, "{s}");
        }
    }

    #[test]
    fn run_verify_ring_default_cases() {
        let rep = run_verify(Some(Suite::Ring), 42);
        assert!(rep.pass());
        assert!(rep.results.len() >= 5);
        assert!(rep.results.iter().all(|r| r.cases == DEFAULT_CASES));
    }

    #[test]
    fn deterministic_across_policies() {
        let a = run_suites(&[Suite::Ring], 3, 10, ExecutionPolicy::Sequential);
        let b = run_suites(&[Suite::Ring], 3, 10, ExecutionPolicy::Parallel);
        assert_eq!(a.results, b.results);
        assert!(a.pass(), "{:?}", a.results);
    }

    #[test]
    fn all_suites_pass_small() {
        let rep = run_suites(&[], 11, 20, ExecutionPolicy::Parallel);
        let bad: Vec<_> = rep.results.iter().filter(|r| !r.pass()).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }
}
