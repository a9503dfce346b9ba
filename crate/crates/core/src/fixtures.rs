//! Builtin fixtures with frozen expected values. Each one is also shipped as
//! a scenario file under `fixtures/`; the derivation of every expected value
//! travels with it.

use crate::error::{Error, Result};
use crate::scenario::{
    run_compute, Degree, HypersurfaceBlock, RunOptions, ScenarioFile, ScenarioReport, StratumBlock,
    Task,
};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub file: ScenarioFile,
}

impl Fixture {
    pub fn derivation(&self) -> &str {
        self.file.derivation.as_deref().unwrap_or("")
    }

    pub fn run(&self, opts: &RunOptions) -> Result<ScenarioReport> {
        run_compute(&self.file, opts)
    }
}

const BUILTIN: &[(&str, &str)] = &[
    (
        "nodal_cubic_p2",
        include_str!("../fixtures/nodal_cubic_p2.json"),
    ),
    (
        "cuspidal_cubic_p2",
        include_str!("../fixtures/cuspidal_cubic_p2.json"),
    ),
    (
        "quadric_cone_p3",
        include_str!("../fixtures/quadric_cone_p3.json"),
    ),
    (
        "two_planes_p3",
        include_str!("../fixtures/two_planes_p3.json"),
    ),
    (
        "two_planes_cap_plane_p3",
        include_str!("../fixtures/two_planes_cap_plane_p3.json"),
    ),
    (
        "quadric_cone_cap_plane_p3",
        include_str!("../fixtures/quadric_cone_cap_plane_p3.json"),
    ),
];

/// Fixtures that must fail: they check that disagreement is detected.
const NEGATIVE: &[(&str, &str)] = &[
    (
        "two_planes_gamma_corrupted",
        include_str!("../fixtures/negative/two_planes_gamma_corrupted.json"),
    ),
    (
        "flipped_relation_p1",
        include_str!("../fixtures/negative/flipped_relation_p1.json"),
    ),
];

pub fn list_examples() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn negative_controls() -> Vec<&'static str> {
    NEGATIVE.iter().map(|(n, _)| *n).collect()
}

fn parse(name: &str, text: &str) -> Fixture {
    Fixture {
        name: name.to_string(),
        file: ScenarioFile::from_json(text)
            .unwrap_or_else(|e| panic!("builtin fixture {name}: {e}")),
    }
}

/// A builtin or negative-control fixture by name.
pub fn load_fixture(name: &str) -> Result<Fixture> {
    BUILTIN
        .iter()
        .chain(NEGATIVE)
        .find(|(n, _)| *n == name)
        .map(|(n, t)| parse(n, t))
        .ok_or_else(|| Error::UnknownExample {
            name: name.to_string(),
            available: list_examples()
                .into_iter()
                .chain(negative_controls())
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Runs a builtin exactly as `run_compute` runs a file.
pub fn run_example(name: &str, opts: &RunOptions) -> Result<ScenarioReport> {
    load_fixture(name)?.run(opts)
}

/// A plane curve of degree `d` with `k` nodes. The open stratum has
/// `χ = 3d − d²`: a smoothing has that Euler characteristic, and each node
/// adds its Milnor number 1 to `χ(X)` while removing one point.
pub fn k_nodal_curve(d: i64, k: usize) -> Result<Fixture> {
    if d < 1 {
        return Err(Error::scenario(
            "degree",
            format!("{d}: a plane curve needs degree >= 1"),
        ));
    }
    let chi_smooth = 3 * d - d * d;
    let mut strata = vec![StratumBlock {
        name: "reg".into(),
        closure: Some("hypersurface".into()),
        dim: None,
        class: None,
        csm: None,
        milnor_fiber_chi: 1,
        contained_in: Vec::new(),
        chi_open: Some(chi_smooth),
    }];
    for i in 1..=k {
        strata.push(StratumBlock {
            name: format!("node{i}"),
            closure: Some("point".into()),
            dim: None,
            class: None,
            csm: None,
            milnor_fiber_chi: 0,
            contained_in: Vec::new(),
            chi_open: None,
        });
    }
    let segre = (k > 0).then(|| format!("points({k})"));
    let name = format!("k_nodal_curve_{d}_{k}");
    let mut expected = std::collections::BTreeMap::new();
    expected.insert("C.milnor".to_string(), format!("{k}*h^2").into());
    expected.insert("C.chi".to_string(), (chi_smooth + k as i64).into());
    let file = ScenarioFile {
        name: Some(name.clone()),
        ambient: "P^2".into(),
        hypersurfaces: vec![HypersurfaceBlock {
            name: "C".into(),
            degree: Degree::One(d),
            strata: Some(strata),
            le_cycles: None,
            segre,
            mu_class: None,
        }],
        intersection: None,
        general_case: None,
        tasks: vec![Task::Compute {
            compute: crate::scenario::ComputeTarget::Hypersurfaces,
        }],
        expected,
        derivation: Some(format!(
            "A smooth plane curve of degree {d} has chi = 3d - d^2 = {chi_smooth}. Each of the {k} nodes has Milnor number 1, so M = {k} h^2 and chi = {}.",
            chi_smooth + k as i64
        )),
    };
    Ok(Fixture { name, file })
}
