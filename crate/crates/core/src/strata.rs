//! Whitney-stratified hypersurfaces, inclusion-exclusion weights for the
//! Milnor class, and stratified Euler characteristics.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::bundle::BundleClass;
use crate::chow::{same_ambient, AmbientKind, AmbientSpace, CycleClass};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub name: String,
    pub dim: u32,
    /// `[S̄]` in the ambient.
    pub closure_class: CycleClass,
    /// `c_SM(S̄)` pushed to the ambient. Required for singular strata; for the
    /// open stratum it is the Schwartz-MacPherson class of the hypersurface
    /// itself and is optional.
    pub csm_closure: Option<CycleClass>,
    /// Euler characteristic of the local Milnor fibre at points of `S`.
    pub milnor_fiber_chi: i64,
    /// Names of the strata whose closures contain this one.
    pub contained_in: BTreeSet<String>,
    /// Euler characteristic of `S` itself, when known independently of any
    /// class (e.g. from a normalization). Otherwise it is derived from
    /// `csm_closure` by inclusion-exclusion.
    pub chi_open: Option<i64>,
}

impl Stratum {
    pub fn new(
        name: impl Into<String>,
        dim: u32,
        closure_class: CycleClass,
        csm_closure: Option<CycleClass>,
        milnor_fiber_chi: i64,
    ) -> Self {
        Stratum {
            name: name.into(),
            dim,
            closure_class,
            csm_closure,
            milnor_fiber_chi,
            contained_in: BTreeSet::new(),
            chi_open: None,
        }
    }

    /// A point stratum with its closure data filled in.
    pub fn point(
        ambient: &Arc<AmbientSpace>,
        name: impl Into<String>,
        milnor_fiber_chi: i64,
    ) -> Self {
        let (class, csm) = closure_point(ambient);
        Self::new(name, 0, class, Some(csm), milnor_fiber_chi)
    }

    /// A linearly embedded `P^m` stratum closure in `P^n`.
    pub fn linear(
        ambient: &Arc<AmbientSpace>,
        name: impl Into<String>,
        m: u32,
        milnor_fiber_chi: i64,
    ) -> Result<Self> {
        let (class, csm) = closure_linear(ambient, m)?;
        Ok(Self::new(name, m, class, Some(csm), milnor_fiber_chi))
    }

    pub fn inside<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.contained_in.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn with_chi_open(mut self, chi: i64) -> Self {
        self.chi_open = Some(chi);
        self
    }
}

/// `([pt], c_SM(pt))`.
pub fn closure_point(ambient: &Arc<AmbientSpace>) -> (CycleClass, CycleClass) {
    let pt = CycleClass::point(ambient);
    (pt.clone(), pt)
}

/// `([P^m], (1+h)^(m+1) ∩ [P^m])` for a linear subspace of `P^n`.
pub fn closure_linear(ambient: &Arc<AmbientSpace>, m: u32) -> Result<(CycleClass, CycleClass)> {
    let n = match ambient.kind() {
        AmbientKind::ProjSpace(n) => *n,
        _ => {
            return Err(Error::Unsupported(format!(
                "linear closures need a projective space ambient, got {ambient}"
            )))
        }
    };
    if m > n {
        return Err(Error::InvalidStrata(format!(
            "linear(P^{m}) does not fit in P^{n}"
        )));
    }
    let h = CycleClass::generator(ambient, 0);
    let class = h.pow(n - m);
    let csm = &(&CycleClass::one(ambient) + &h).pow(m + 1) * &class;
    Ok((class, csm))
}

/// A hypersurface `X = Z(s)`, `s` a section of a line bundle, with a Whitney
/// stratification.
#[derive(Clone, Debug)]
pub struct StratifiedHypersurface {
    name: String,
    ambient: Arc<AmbientSpace>,
    line_bundle: BundleClass,
    strata: Vec<Stratum>,
    hypersurface_class: CycleClass,
    open: usize,
    /// Transitive closure of `contained_in`, by index.
    above: Vec<BTreeSet<usize>>,
    /// Indices ordered so that every stratum comes after all strata whose
    /// closures contain it.
    order: Vec<usize>,
}

impl StratifiedHypersurface {
    pub fn new(
        name: impl Into<String>,
        ambient: &Arc<AmbientSpace>,
        line_bundle: BundleClass,
        strata: Vec<Stratum>,
    ) -> Result<Self> {
        let name = name.into();
        if line_bundle.rank() != 1 {
            return Err(Error::InvalidBundle(format!(
                "hypersurface `{name}` needs a line bundle, got rank {}",
                line_bundle.rank()
            )));
        }
        if !same_ambient(line_bundle.ambient(), ambient) {
            return Err(crate::chow::mismatch(line_bundle.ambient(), ambient));
        }
        let n = ambient.dim();
        if n == 0 {
            return Err(Error::InvalidStrata(
                "hypersurfaces need an ambient of positive dimension".into(),
            ));
        }
        let (open, above, order) = validate_strata(ambient, &strata, &name)?;
        let hypersurface_class = line_bundle.c1();
        Ok(StratifiedHypersurface {
            name,
            ambient: ambient.clone(),
            line_bundle,
            strata,
            hypersurface_class,
            open,
            above,
            order,
        })
    }

    /// A hypersurface whose only stratum is the regular part.
    pub fn smooth(
        name: impl Into<String>,
        ambient: &Arc<AmbientSpace>,
        line_bundle: BundleClass,
    ) -> Result<Self> {
        let n = ambient.dim();
        if n == 0 {
            return Err(Error::InvalidStrata(
                "hypersurfaces need an ambient of positive dimension".into(),
            ));
        }
        let reg = Stratum::new("reg", n - 1, line_bundle.c1(), None, 1);
        Self::new(name, ambient, line_bundle, vec![reg])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &Arc<AmbientSpace> {
        &self.ambient
    }

    pub fn line_bundle(&self) -> &BundleClass {
        &self.line_bundle
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn hypersurface_class(&self) -> &CycleClass {
        &self.hypersurface_class
    }

    pub fn open_stratum(&self) -> &Stratum {
        &self.strata[self.open]
    }

    pub fn singular_strata(&self) -> impl Iterator<Item = &Stratum> {
        self.strata
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.open)
            .map(|(_, s)| s)
    }

    pub fn is_smooth(&self) -> bool {
        self.strata.len() == 1
    }

    /// Largest dimension of a singular stratum, `None` when smooth.
    pub fn singular_dim(&self) -> Option<u32> {
        self.singular_strata().map(|s| s.dim).max()
    }

    pub fn stratum(&self, name: &str) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.name == name)
    }

    /// Copy with one stratum's Milnor-fibre Euler characteristic replaced.
    pub fn with_milnor_fiber_chi(&self, stratum: &str, chi: i64) -> Result<Self> {
        let mut strata = self.strata.clone();
        let s = strata
            .iter_mut()
            .find(|s| s.name == stratum)
            .ok_or_else(|| Error::InvalidStrata(format!("no stratum `{stratum}`")))?;
        s.milnor_fiber_chi = chi;
        Self::new(
            self.name.clone(),
            &self.ambient,
            self.line_bundle.clone(),
            strata,
        )
    }

    /// Euler characteristic of `X` from the stratification (all weights 1).
    pub fn euler_characteristic(&self) -> Result<i64> {
        self.weighted_euler_characteristic(|_| 1)
    }

    /// `Σ w(S) χ(S)` for a constructible function constant on the strata.
    pub fn weighted_euler_characteristic(&self, weight: impl Fn(&Stratum) -> i64) -> Result<i64> {
        let weighted: Vec<(i64, &Stratum)> = self.strata.iter().map(|s| (weight(s), s)).collect();
        weighted_chi(&weighted, &self.above, &self.order)
    }
}

fn validate_strata(
    ambient: &Arc<AmbientSpace>,
    strata: &[Stratum],
    hyp: &str,
) -> Result<(usize, Vec<BTreeSet<usize>>, Vec<usize>)> {
    let n = ambient.dim();
    let bad = |msg: String| Error::InvalidStrata(format!("hypersurface `{hyp}`: {msg}"));
    let mut index = BTreeMap::new();
    for (i, s) in strata.iter().enumerate() {
        if index.insert(s.name.as_str(), i).is_some() {
            return Err(bad(format!("duplicate stratum name `{}`", s.name)));
        }
    }
    let opens: Vec<usize> = strata
        .iter()
        .enumerate()
        .filter(|(_, s)| s.dim + 1 == n)
        .map(|(i, _)| i)
        .collect();
    if opens.len() != 1 {
        return Err(bad(format!(
            "expected exactly one open stratum of dimension {}, found {}",
            n - 1,
            opens.len()
        )));
    }
    let open = opens[0];
    let os = &strata[open];
    if !os.contained_in.is_empty() {
        return Err(bad(format!(
            "open stratum `{}` cannot lie in another closure",
            os.name
        )));
    }
    if os.milnor_fiber_chi != 1 {
        return Err(bad(format!(
            "open stratum `{}` must have Milnor fibre Euler characteristic 1, got {}",
            os.name, os.milnor_fiber_chi
        )));
    }
    for s in strata {
        if s.dim + 1 > n {
            return Err(bad(format!(
                "stratum `{}` has dimension {} >= {n}",
                s.name, s.dim
            )));
        }
        for c in std::iter::once(&s.closure_class).chain(s.csm_closure.iter()) {
            if !same_ambient(c.ambient(), ambient) {
                return Err(crate::chow::mismatch(c.ambient(), ambient));
            }
        }
        if !s.closure_class.is_homogeneous_of(n - s.dim) || s.closure_class.is_zero() {
            return Err(bad(format!(
                "closure class {} of `{}` is not a nonzero class of codimension {}",
                s.closure_class,
                s.name,
                n - s.dim
            )));
        }
        if s.name != os.name && s.csm_closure.is_none() {
            return Err(bad(format!(
                "singular stratum `{}` has no closure CSM class",
                s.name
            )));
        }
        if let Some(csm) = &s.csm_closure {
            let lead = csm.component((n - s.dim) as i64)?;
            if lead != s.closure_class || csm.codims().first().copied() != Some(n - s.dim) {
                return Err(bad(format!(
                    "CSM class {csm} of `{}` must start with its closure class {}",
                    s.name, s.closure_class
                )));
            }
        }
        for parent in &s.contained_in {
            if parent == &s.name {
                return Err(bad(format!(
                    "stratum `{}` lists itself in contained_in",
                    s.name
                )));
            }
            if !index.contains_key(parent.as_str()) {
                return Err(bad(format!(
                    "stratum `{}` refers to unknown stratum `{parent}`",
                    s.name
                )));
            }
        }
    }
    let mut direct: Vec<BTreeSet<usize>> = strata
        .iter()
        .map(|s| s.contained_in.iter().map(|p| index[p.as_str()]).collect())
        .collect();
    for (i, d) in direct.iter_mut().enumerate() {
        if i != open {
            d.insert(open);
        }
    }
    let order = topological_order(&direct).ok_or_else(|| bad("cyclic containment".into()))?;
    let above = transitive(&direct, &order);
    for (i, s) in strata.iter().enumerate() {
        for &j in &above[i] {
            if strata[j].dim <= s.dim {
                return Err(bad(format!(
                    "`{}` lies in the closure of `{}` but is not of smaller dimension",
                    s.name, strata[j].name
                )));
            }
        }
    }
    Ok((open, above, order))
}

/// Order in which every node follows all of its `parents`; `None` on a cycle.
fn topological_order(parents: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut indeg: Vec<usize> = parents.iter().map(|p| p.len()).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(i);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        out.push(i);
        for &c in &children[i] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    (out.len() == n).then_some(out)
}

fn transitive(parents: &[BTreeSet<usize>], order: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut above: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); parents.len()];
    for &i in order {
        let mut acc = BTreeSet::new();
        for &p in &parents[i] {
            acc.insert(p);
            acc.extend(above[p].iter().copied());
        }
        above[i] = acc;
    }
    above
}

/// Local Milnor number of a stratum, `(-1)^(dim X) (χ(F_x) - 1)`.
pub fn mu_weight(s: &Stratum, hyp: &StratifiedHypersurface) -> i64 {
    let dim_x = hyp.ambient.dim() - 1;
    sign(dim_x) * (s.milnor_fiber_chi - 1)
}

pub(crate) fn sign(e: u32) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `γ_S = μ_S - Σ_{S' ≠ S, S̄' ⊃ S} γ_{S'}`, keyed by stratum name.
pub fn gamma_weights(hyp: &StratifiedHypersurface) -> BTreeMap<String, i64> {
    let mut gamma = vec![0i64; hyp.strata.len()];
    for &i in &hyp.order {
        let mu = mu_weight(&hyp.strata[i], hyp);
        gamma[i] = mu - hyp.above[i].iter().map(|&j| gamma[j]).sum::<i64>();
    }
    hyp.strata
        .iter()
        .zip(gamma)
        .map(|(s, g)| (s.name.clone(), g))
        .collect()
}

/// `Σ weight_S · χ(S)` over the given strata, with the Euler characteristic of
/// each open stratum obtained by inclusion-exclusion over closures.
pub fn stratified_chi(strata: &[(i64, &Stratum)]) -> Result<i64> {
    let mut index = BTreeMap::new();
    for (i, (_, s)) in strata.iter().enumerate() {
        index.insert(s.name.as_str(), i);
    }
    let mut parents: Vec<BTreeSet<usize>> = Vec::with_capacity(strata.len());
    for (_, s) in strata {
        let mut ps = BTreeSet::new();
        for p in &s.contained_in {
            let j = index.get(p.as_str()).ok_or_else(|| {
                Error::InvalidStrata(format!(
                    "stratum `{}` refers to `{p}`, which is not in the list",
                    s.name
                ))
            })?;
            ps.insert(*j);
        }
        parents.push(ps);
    }
    let order = topological_order(&parents)
        .ok_or_else(|| Error::InvalidStrata("cyclic containment".into()))?;
    let above = transitive(&parents, &order);
    weighted_chi(strata, &above, &order)
}

fn weighted_chi(
    strata: &[(i64, &Stratum)],
    above: &[BTreeSet<usize>],
    order: &[usize],
) -> Result<i64> {
    let mut chi = vec![0i64; strata.len()];
    for &i in order.iter().rev() {
        let s = strata[i].1;
        chi[i] = match (s.chi_open, &s.csm_closure) {
            (Some(c), _) => c,
            (None, Some(csm)) => {
                let below: i64 = (0..strata.len())
                    .filter(|&j| above[j].contains(&i))
                    .map(|j| chi[j])
                    .sum();
                csm.degree_i64() - below
            }
            (None, None) => {
                return Err(Error::MissingData(format!(
                    "stratum `{}` has neither an open Euler characteristic nor a closure CSM class",
                    s.name
                )))
            }
        };
    }
    Ok(strata.iter().zip(&chi).map(|((w, _), c)| w * c).sum())
}
