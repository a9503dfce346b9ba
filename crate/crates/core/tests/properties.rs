use std::collections::BTreeMap;
use std::sync::Arc;

use milnor_core::bundle::{direct_sum, dual, line_bundle, tensor_line, BundleClass};
use milnor_core::chow::{AmbientSpace, CycleClass};
use milnor_core::fixtures::{k_nodal_curve, list_examples, load_fixture};
use milnor_core::intersect::Formula;
use milnor_core::lecycles::{le_to_milnor, milnor_to_le, LeCycles};
use milnor_core::par::ExecutionPolicy;
use milnor_core::report::{render_json, render_text};
use milnor_core::scenario::{RunOptions, ScenarioFile};
use milnor_core::strata::mu_weight;
use milnor_core::verify::{case_rng, random_scenario, Suite};
use proptest::prelude::*;

fn pn(n: i64) -> Arc<AmbientSpace> {
    AmbientSpace::proj_space(n).unwrap()
}

/// `Σ c_i h^i` in `P^n`.
fn class(amb: &Arc<AmbientSpace>, coeffs: &[i64]) -> CycleClass {
    let terms = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| (vec![i as u32], c))
        .collect::<Vec<_>>();
    CycleClass::from_terms(amb, terms).unwrap()
}

fn split(amb: &Arc<AmbientSpace>, degs: &[i64]) -> BundleClass {
    degs[1..]
        .iter()
        .fold(line_bundle(amb, &[degs[0]]).unwrap(), |e, &d| {
            direct_sum(&e, &line_bundle(amb, &[d]).unwrap()).unwrap()
        })
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_parse_roundtrip(n in 1i64..6, c in coeffs()) {
        let amb = pn(n);
        let a = class(&amb, &c);
        prop_assert_eq!(CycleClass::parse(&amb, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn multiplication_associative_commutative(n in 1i64..6, a in coeffs(), b in coeffs(), c in coeffs()) {
        let amb = pn(n);
        let (a, b, c) = (class(&amb, &a), class(&amb, &b), class(&amb, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn units_invert(n in 1i64..6, mut c in coeffs(), neg in any::<bool>()) {
        let amb = pn(n);
        c[0] = if neg { -1 } else { 1 };
        let u = class(&amb, &c);
        prop_assert_eq!(&u * &u.inverse().unwrap(), CycleClass::one(&amb));
    }

    #[test]
    fn whitney_and_dual(n in 1i64..5, d1 in prop::collection::vec(-4i64..5, 1..4), d2 in prop::collection::vec(-4i64..5, 1..4)) {
        let amb = pn(n);
        let (e, f) = (split(&amb, &d1), split(&amb, &d2));
        prop_assert_eq!(direct_sum(&e, &f).unwrap().chern().clone(), e.chern() * f.chern());
        prop_assert_eq!(dual(&dual(&e)), e.clone());
        prop_assert_eq!(e.rank() as usize, d1.len());
    }

    #[test]
    fn twist_matches_split(n in 1i64..5, degs in prop::collection::vec(-4i64..5, 1..5), t in -3i64..4) {
        let amb = pn(n);
        let twisted: Vec<i64> = degs.iter().map(|d| d + t).collect();
        let l = line_bundle(&amb, &[t]).unwrap();
        prop_assert_eq!(tensor_line(&split(&amb, &degs), &l).unwrap(), split(&amb, &twisted));
    }

    #[test]
    fn le_round_trip(n in 2i64..6, d in 1i64..6, raw in prop::collection::vec(-20i64..20, 5)) {
        let amb = pn(n);
        let l = line_bundle(&amb, &[d]).unwrap();
        let mut pieces = BTreeMap::new();
        for k in 0..(n as u32 - 1) {
            pieces.insert(k, CycleClass::monomial(&amb, &[n as u32 - k], raw[k as usize]));
        }
        let le = LeCycles::new(&amb, pieces).unwrap();
        let m = le_to_milnor(&le, &l).unwrap();
        prop_assert_eq!(milnor_to_le(&amb, m, &l).unwrap(), le);
    }

    #[test]
    fn intersection_formulas_agree(seed in any::<u64>()) {
        let mut rng = case_rng(seed, Suite::Intersect, "proptest", 0);
        let sc = random_scenario(&mut rng);
        let base = sc.evaluate(Formula::Thm41).unwrap();
        for f in [Formula::Cor11, Formula::Cor12, Formula::PpAis, Formula::PpFull] {
            prop_assert_eq!(sc.evaluate(f).unwrap(), base.clone(), "{}", f);
        }
    }

    #[test]
    fn k_nodal_curves(d in 1i64..9, k in 0usize..12) {
        let f = k_nodal_curve(d, k).unwrap();
        let rep = f.run(&RunOptions::default()).unwrap();
        prop_assert!(rep.pass());
        prop_assert_eq!(rep.hypersurfaces[0].milnor.degree_i64(), k as i64);
        prop_assert_eq!(rep.hypersurfaces[0].chi, 3 * d - d * d + k as i64);
    }
}

#[test]
fn fixtures_reparse_and_rerun_identically() {
    for name in list_examples() {
        let f = load_fixture(name).unwrap();
        let again = ScenarioFile::from_json(&f.file.to_json()).unwrap();
        assert_eq!(again, f.file, "{name}");
        let opts = RunOptions::default();
        let seq = RunOptions {
            policy: ExecutionPolicy::Sequential,
            ..RunOptions::default()
        };
        let a = f.run(&opts).unwrap();
        let b = f.run(&seq).unwrap();
        assert_eq!(render_text(&a), render_text(&b), "{name}");
        assert_eq!(render_json(&a), render_json(&b), "{name}");
    }
}

#[test]
fn isolated_fixtures_sum_milnor_numbers() {
    for name in list_examples() {
        let f = load_fixture(name).unwrap();
        let sc = milnor_core::scenario::Scenario::build(&f.file).unwrap();
        let rep = f.run(&RunOptions::default()).unwrap();
        for (m, h) in sc.hypersurfaces.iter().zip(&rep.hypersurfaces) {
            if m.hyp.singular_dim().is_some_and(|d| d > 0) {
                continue;
            }
            let mu: i64 = m.hyp.singular_strata().map(|s| mu_weight(s, &m.hyp)).sum();
            assert_eq!(h.milnor.degree_i64(), mu, "{name}/{}", h.name);
        }
    }
}
