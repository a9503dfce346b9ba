//! Acceptance gate. Every criterion is exact (integer tolerance zero) and
//! prints one PASS/FAIL line; the process exits nonzero if any fails.

use std::sync::Arc;
use std::time::Instant;

use milnor_core::bundle::line_bundle;
use milnor_core::chow::{AmbientSpace, CycleClass};
use milnor_core::classes::{aluffi_milnor, milnor_pp, ClassTriple};
use milnor_core::fixtures::{load_fixture, negative_controls};
use milnor_core::intersect::Formula;
use milnor_core::lecycles::{le_to_milnor, milnor_to_le, LeCycles};
use milnor_core::par::{self, ExecutionPolicy};
use milnor_core::projbundle::{
    lemma1_pullback_check, lemma2_split_check, milnor_general, verify_tangent_identities,
    GeneralCaseInput, ProjBundleRing,
};
use milnor_core::scenario::{RunOptions, Scenario, ScenarioReport};
use milnor_core::verify::{
    case_rng, random_homogeneous, random_scenario, run_suites, split_bundle, Suite,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cls(a: &Arc<AmbientSpace>, s: &str) -> CycleClass {
    CycleClass::parse(a, s).unwrap()
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn fixture(name: &str) -> Result<(Scenario, ScenarioReport), String> {
    let f = load_fixture(name).map_err(|e| e.to_string())?;
    let sc = Scenario::build(&f.file).map_err(|e| e.to_string())?;
    let rep = f.run(&RunOptions::default()).map_err(|e| e.to_string())?;
    Ok((sc, rep))
}

fn single(name: &str, milnor: &str, chi: i64) -> Result<(Scenario, ScenarioReport), String> {
    let (sc, rep) = fixture(name)?;
    let h = &rep.hypersurfaces[0];
    let amb = &sc.ambient;
    check(
        h.milnor == cls(amb, milnor),
        format!("milnor {} != {milnor}", h.milnor),
    )?;
    check(h.chi == chi, format!("chi {} != {chi}", h.chi))?;
    check(
        h.chi_strata == Some(chi),
        format!("stratified chi {:?}", h.chi_strata),
    )?;
    check(rep.pass(), "fixture verdict FAIL")?;
    Ok((sc, rep))
}

fn nodal_cubic() -> Outcome {
    let (sc, rep) = single("nodal_cubic_p2", "h^2", 1)?;
    let h = &rep.hypersurfaces[0];
    check(
        h.milnor.degree_i64() == 1,
        "degree of M is not one node's Milnor number",
    )?;
    check(h.csm.degree_i64() == 1, "csm degree")?;
    check(h.virt.degree_i64() == 0, "virtual degree")?;
    let hyp = &sc.hypersurfaces[0];
    let pp = milnor_pp(&hyp.hyp);
    let al = aluffi_milnor(&hyp.hyp, hyp.mu.as_ref().ok_or("no mu class")?)
        .map_err(|e| e.to_string())?;
    check(pp == al && pp == h.milnor, format!("pp {pp}, aluffi {al}"))?;
    Ok(format!(
        "M = {}, chi = 1, virtual degree 0, pp = aluffi",
        h.milnor
    ))
}

fn cuspidal_cubic() -> Outcome {
    let (_, rep) = single("cuspidal_cubic_p2", "2*h^2", 2)?;
    Ok(format!("M = {}, chi = 2", rep.hypersurfaces[0].milnor))
}

fn quadric_cone() -> Outcome {
    let (_, rep) = single("quadric_cone_p3", "h^3", 3)?;
    let v = rep.hypersurfaces[0].virt.degree_i64();
    check(v == 4, format!("virtual degree {v}"))?;
    Ok("M = h^3, chi = 3, virtual degree 4".into())
}

fn two_planes() -> Outcome {
    let (sc, rep) = single("two_planes_p3", "-h^2", 4)?;
    let h = &rep.hypersurfaces[0];
    let amb = &sc.ambient;
    check(
        h.virt == cls(amb, "2*h+4*h^2+4*h^3"),
        format!("virtual {}", h.virt),
    )?;
    check(
        h.csm == cls(amb, "2*h+5*h^2+4*h^3"),
        format!("csm {}", h.csm),
    )?;
    let pp = milnor_pp(&sc.hypersurfaces[0].hyp);
    let def = ClassTriple::from_virtual_and_csm(h.virt.clone(), h.csm.clone(), 1)
        .map_err(|e| e.to_string())?
        .milnor;
    check(
        pp == def && def == cls(amb, "-h^2"),
        format!("pp {pp}, definition {def}"),
    )?;
    Ok("M = -h^2 by stratum expansion and by definition".into())
}

const FOUR: [Formula; 5] = [
    Formula::Thm41,
    Formula::Cor11,
    Formula::Cor12,
    Formula::PpAis,
    Formula::PpFull,
];

fn four_formulas(rep: &ScenarioReport) -> Result<Vec<CycleClass>, String> {
    let ir = &rep.intersection.as_ref().ok_or("no intersection")?.1;
    FOUR.iter()
        .map(|&f| ir.class(f).cloned().ok_or_else(|| format!("{f} missing")))
        .collect()
}

fn two_planes_cap_plane() -> Outcome {
    let (sc, rep) = fixture("two_planes_cap_plane_p3")?;
    let amb = &sc.ambient;
    let direct =
        ClassTriple::from_virtual_and_csm(cls(amb, "2*h^2+2*h^3"), cls(amb, "2*h^2+3*h^3"), 2)
            .map_err(|e| e.to_string())?
            .milnor;
    check(
        direct == cls(amb, "h^3"),
        format!("direct Milnor class of the nodal conic {direct}"),
    )?;
    for (f, m) in FOUR.iter().zip(four_formulas(&rep)?) {
        check(m == direct, format!("{f} gives {m}"))?;
    }
    let (idx, _) = sc.intersection.as_ref().unwrap();
    let models: Vec<_> = idx.iter().map(|&i| &sc.hypersurfaces[i]).collect();
    let isc = milnor_core::scenario::intersection_scenario(&models).map_err(|e| e.to_string())?;
    let v = isc.intersection_virtual().map_err(|e| e.to_string())?;
    check(
        v == cls(amb, "2*h^2+2*h^3"),
        format!("virtual class of the intersection {v}"),
    )?;
    check(rep.pass(), "oracle checks")?;
    Ok("thm41, cor11, cor12, pp-ais, pp-full all h^3 = direct".into())
}

fn cone_cap_plane() -> Outcome {
    let (_, rep) = fixture("quadric_cone_cap_plane_p3")?;
    for (f, m) in FOUR.iter().zip(four_formulas(&rep)?) {
        check(m.is_zero(), format!("{f} gives {m}"))?;
    }
    check(rep.pass(), "oracle checks")?;
    Ok("all formulas 0".into())
}

fn random_agreement() -> Outcome {
    const N: usize = 250;
    let start = Instant::now();
    let out = par::map_range(ExecutionPolicy::Parallel, N, |i| {
        let mut rng = case_rng(2024, Suite::Intersect, "acceptance-four-formula", i);
        let sc = random_scenario(&mut rng);
        let ms: Vec<CycleClass> = FOUR
            .iter()
            .map(|&f| sc.evaluate(f).map_err(|e| format!("case {i}, {f}: {e}")))
            .collect::<Result<_, _>>()?;
        check(
            ms.windows(2).all(|w| w[0] == w[1]),
            format!("case {i}: {ms:?}"),
        )?;
        Ok::<(u32, bool), String>((sc.r(), !ms[0].is_zero()))
    });
    let elapsed = start.elapsed();
    let rs = out.into_iter().collect::<Result<Vec<_>, _>>()?;
    check(
        rs.iter().any(|c| c.0 == 2) && rs.iter().any(|c| c.0 == 3),
        "r = 2 and r = 3 not both covered",
    )?;
    let nonzero = rs.iter().filter(|c| c.1).count();
    // point strata meet the other hypersurfaces in nothing, so only the
    // line strata in P^3 give nonzero classes
    check(
        nonzero * 10 >= N,
        format!("only {nonzero} nonzero Milnor classes"),
    )?;
    check(elapsed.as_secs_f64() < 10.0, format!("took {elapsed:?}"))?;
    Ok(format!(
        "{N} scenarios ({nonzero} with nonzero Milnor class) agree in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn le_round_trip() -> Outcome {
    const N: usize = 150;
    for i in 0..N {
        let mut rng = case_rng(99, Suite::Lecycles, "acceptance-round-trip", i);
        let n = rng.gen_range(2..=5i64);
        let amb = AmbientSpace::proj_space(n).unwrap();
        let l = line_bundle(&amb, &[rng.gen_range(1..=5)]).unwrap();
        let mut pieces = std::collections::BTreeMap::new();
        for k in 0..(n as u32 - 1) {
            if rng.gen_bool(0.7) {
                pieces.insert(k, random_homogeneous(&mut rng, &amb, n as u32 - k, 9));
            }
        }
        let le = LeCycles::new(&amb, pieces).map_err(|e| e.to_string())?;
        let m = le_to_milnor(&le, &l).map_err(|e| e.to_string())?;
        let back = milnor_to_le(&amb, m, &l).map_err(|e| e.to_string())?;
        check(back == le, format!("case {i}: {back:?} != {le:?}"))?;
    }
    let mut fixtures = 0;
    for name in ["two_planes_cap_plane_p3", "quadric_cone_cap_plane_p3"] {
        let (_, rep) = fixture(name)?;
        let ir = &rep.intersection.as_ref().unwrap().1;
        let (le, c11) = (ir.class(Formula::Le), ir.class(Formula::Cor11));
        check(
            le.is_some() && le == c11,
            format!("{name}: le {le:?}, cor11 {c11:?}"),
        )?;
        fixtures += 1;
    }
    Ok(format!(
        "{N} round trips, le = cor11 on {fixtures} intersection fixtures"
    ))
}

fn projective_bundles() -> Outcome {
    let mut rings = 0;
    for n in 1..=3i64 {
        let base = AmbientSpace::proj_space(n).unwrap();
        let h = CycleClass::generator(&base, 0);
        for degs in [
            vec![0],
            vec![2],
            vec![1, 1],
            vec![1, 2],
            vec![-1, 3],
            vec![0, 1, 2],
            vec![1, -1, 2, 0],
        ] {
            let split: Vec<Vec<i64>> = degs.iter().map(|&d| vec![d]).collect();
            let e = split_bundle(&base, &split).map_err(|e| e.to_string())?;
            let ring = ProjBundleRing::new(&base, &e).map_err(|e| e.to_string())?;
            let res = ring.relation_residue().map_err(|e| e.to_string())?;
            check(
                res.is_zero(),
                format!("relation residue {res} for {degs:?} on P^{n}"),
            )?;
            let alphas: Vec<CycleClass> = (0..=n as u32)
                .map(|k| h.pow(k).scale(k as i64 + 2))
                .collect();
            check(
                lemma1_pullback_check(&ring, &alphas).map_err(|e| e.to_string())?,
                format!("projection formula for {degs:?} on P^{n}"),
            )?;
            for c in verify_tangent_identities(&ring, Some(&split)) {
                check(
                    c.pass,
                    format!("{} for {degs:?} on P^{n}: {}", c.name, c.detail),
                )?;
            }
            if degs.len() == 1 {
                let m = CycleClass::monomial(ring.total(), &[1, 0], 3);
                let out = milnor_general(&GeneralCaseInput {
                    ring: ring.clone(),
                    milnor_of_tilde: m.clone(),
                })
                .map_err(|e| e.to_string())?;
                let back = ring.pushforward(&m).map_err(|e| e.to_string())?;
                check(
                    out == back && out == h.scale(3),
                    format!("rank one: {out} != {back}"),
                )?;
            }
            rings += 1;
        }
    }
    let p3 = AmbientSpace::proj_space(3).unwrap();
    let mut twists = 0;
    for a in -2..=3 {
        for b in -2..=3 {
            let (d, t) = lemma2_split_check(&p3, a, b).map_err(|e| e.to_string())?;
            check(d == t, format!("split check O({a}) + O({b}): {d} != {t}"))?;
            twists += 1;
        }
    }
    Ok(format!(
        "{rings} bundles, {twists} twist pairs, all identities exact"
    ))
}

fn axiom_suites() -> Outcome {
    let rep = run_suites(
        &[Suite::Ring, Suite::Bundle],
        0,
        100,
        ExecutionPolicy::Parallel,
    );
    for name in [
        "mul-associative",
        "whitney",
        "dual-involution",
        "twist-split-oracle",
    ] {
        check(
            rep.results.iter().any(|r| r.name == name),
            format!("property {name} missing"),
        )?;
    }
    for r in &rep.results {
        check(r.cases >= 100, format!("{} ran {} cases", r.name, r.cases))?;
        check(r.pass(), format!("{}: {:?}", r.name, r.first_failure))?;
    }
    Ok(format!("{} properties x 100 cases", rep.results.len()))
}

fn negative_controls_fail() -> Outcome {
    let (_, rep) = fixture("two_planes_gamma_corrupted")?;
    check(!rep.pass(), "gamma-corrupted fixture passed")?;
    let ir = &rep.intersection.as_ref().unwrap().1;
    check(
        !ir.agree,
        "gamma corruption not seen by the intersection formulas",
    )?;
    let (_, rep) = fixture("flipped_relation_p1")?;
    check(!rep.pass(), "flipped relation passed")?;
    let g = rep.general.as_ref().ok_or("no general case")?;
    check(
        g.checks
            .iter()
            .any(|c| c.name == "grothendieck-relation" && !c.pass),
        "flipped relation not detected",
    )?;
    Ok(format!(
        "{} negative controls produce FAIL",
        negative_controls().len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("nodal cubic in P^2", nodal_cubic),
        ("cuspidal cubic in P^2", cuspidal_cubic),
        ("quadric cone in P^3", quadric_cone),
        ("two planes in P^3", two_planes),
        ("two planes cap a general plane", two_planes_cap_plane),
        ("quadric cone cap a vertex-avoiding plane", cone_cap_plane),
        (
            "four-formula agreement on random scenarios",
            random_agreement,
        ),
        ("Le cycle round trip", le_round_trip),
        ("projective-bundle identities", projective_bundles),
        ("ring and bundle axiom suites", axiom_suites),
        ("negative controls", negative_controls_fail),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match r {
            Ok(detail) => println!("PASS  A{:02} {name}: {detail} ({ms:.0} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  A{:02} {name}: {why} ({ms:.0} ms)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
