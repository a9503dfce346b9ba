//! Lê cycles and the triangular transform relating them to the graded
//! pieces of the Milnor class of a hypersurface:
//!
//! `M_k = Σ_{l ≥ 0} (-1)^(k+l) C(l+k, k) c_1(L)^l ∩ Λ_{l+k}`
//!
//! where `M_k` and `Λ_k` are the dimension-`k` pieces. The sum runs until
//! `Λ_{l+k}` vanishes; the system has diagonal `(-1)^k` and is inverted by
//! back-substitution from the top dimension.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::bundle::BundleClass;
use crate::chow::{same_ambient, AmbientSpace, CycleClass};
use crate::classes::ClassTriple;
use crate::error::{Error, Result};
use crate::intersect::{a_product, tangent_prefactor};
use crate::strata::sign;

/// `Λ_k` keyed by dimension `k`; `Λ_k` has codimension `dim M - k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeCycles {
    ambient: Arc<AmbientSpace>,
    classes: BTreeMap<u32, CycleClass>,
}

impl LeCycles {
    pub fn new(ambient: &Arc<AmbientSpace>, classes: BTreeMap<u32, CycleClass>) -> Result<Self> {
        let classes = check_graded(ambient, classes, "Lê cycle")?;
        Ok(LeCycles {
            ambient: ambient.clone(),
            classes,
        })
    }

    pub fn zero(ambient: &Arc<AmbientSpace>) -> Self {
        LeCycles {
            ambient: ambient.clone(),
            classes: BTreeMap::new(),
        }
    }

    pub fn ambient(&self) -> &Arc<AmbientSpace> {
        &self.ambient
    }

    /// `Λ_k`, zero when absent.
    pub fn get(&self, k: u32) -> CycleClass {
        self.classes
            .get(&k)
            .cloned()
            .unwrap_or_else(|| CycleClass::zero(&self.ambient))
    }

    /// Nonzero cycles in ascending dimension.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &CycleClass)> {
        self.classes.iter().map(|(k, c)| (*k, c))
    }

    /// Largest `k` with `Λ_k ≠ 0`.
    pub fn top(&self) -> Option<u32> {
        self.classes.keys().next_back().copied()
    }
}

/// Drops zero entries and checks each piece is homogeneous of codimension
/// `dim M - k`.
fn check_graded(
    ambient: &Arc<AmbientSpace>,
    classes: BTreeMap<u32, CycleClass>,
    what: &str,
) -> Result<BTreeMap<u32, CycleClass>> {
    let n = ambient.dim();
    let mut out = BTreeMap::new();
    for (k, c) in classes {
        if !same_ambient(c.ambient(), ambient) {
            return Err(crate::chow::mismatch(c.ambient(), ambient));
        }
        if c.is_zero() {
            continue;
        }
        if k > n || !c.is_homogeneous_of(n - k) {
            return Err(Error::NonHomogeneous(format!(
                "{what} of dimension {k} must have codimension {} in {ambient}, got {c}",
                n.saturating_sub(k)
            )));
        }
        out.insert(k, c);
    }
    Ok(out)
}

/// Splits a class into its pieces by dimension.
pub fn graded_pieces(c: &CycleClass) -> BTreeMap<u32, CycleClass> {
    let n = c.ambient().dim();
    c.codims()
        .into_iter()
        .map(|j| (n - j, c.component(j as i64).expect("codim in range")))
        .collect()
}

pub fn total(ambient: &Arc<AmbientSpace>, pieces: &BTreeMap<u32, CycleClass>) -> CycleClass {
    pieces
        .values()
        .fold(CycleClass::zero(ambient), |acc, c| &acc + c)
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// One term `(-1)^(k+l) C(l+k, k) c_1(L)^l ∩ Λ_{l+k}`.
fn le_term(c1: &CycleClass, lam: &CycleClass, k: u32, l: u32) -> CycleClass {
    (&c1.pow(l) * lam).scale(binomial(l + k, k) * sign(k + l))
}

/// Graded Milnor class pieces `M_k` from Lê cycles.
pub fn le_to_milnor(le: &LeCycles, l: &BundleClass) -> Result<BTreeMap<u32, CycleClass>> {
    let amb = le.ambient();
    let c1 = l.c1().rebase(amb)?;
    let mut out = BTreeMap::new();
    let Some(top) = le.top() else {
        return Ok(out);
    };
    for k in 0..=top {
        let mut m = CycleClass::zero(amb);
        for lk in k..=top {
            m += &le_term(&c1, &le.get(lk), k, lk - k);
        }
        if !m.is_zero() {
            out.insert(k, m);
        }
    }
    Ok(out)
}

/// Inverse of [`le_to_milnor`].
pub fn milnor_to_le(
    ambient: &Arc<AmbientSpace>,
    milnor: BTreeMap<u32, CycleClass>,
    l: &BundleClass,
) -> Result<LeCycles> {
    let milnor = check_graded(ambient, milnor, "Milnor class piece")?;
    let c1 = l.c1().rebase(ambient)?;
    let Some(top) = milnor.keys().next_back().copied() else {
        return Ok(LeCycles::zero(ambient));
    };
    let mut lam: BTreeMap<u32, CycleClass> = BTreeMap::new();
    for k in (0..=top).rev() {
        let mut rest = milnor
            .get(&k)
            .cloned()
            .unwrap_or_else(|| CycleClass::zero(ambient));
        for (&lk, cyc) in lam.range(k + 1..) {
            rest = &rest - &le_term(&c1, cyc, k, lk - k);
        }
        let v = rest.scale(sign(k));
        if !v.is_zero() {
            lam.insert(k, v);
        }
    }
    LeCycles::new(ambient, lam)
}

/// Per-hypersurface data for the Lê-cycle route to the Milnor class of an
/// intersection.
#[derive(Clone, Copy, Debug)]
pub struct LeInput<'a> {
    pub le: &'a LeCycles,
    pub line_bundle: &'a BundleClass,
    pub classes: &'a ClassTriple,
}

/// Milnor class of `X_1 ∩ ... ∩ X_r` from the Lê cycles of each `X_i`:
/// the double sum over `k` and `l` inside the `a_{j,i}` products, assembled
/// over all `k`.
pub fn milnor_from_le_intersection(
    ambient: &Arc<AmbientSpace>,
    inputs: &[LeInput<'_>],
) -> Result<CycleClass> {
    if inputs.is_empty() {
        return Err(Error::MissingData("no hypersurfaces with Lê data".into()));
    }
    let r = inputs.len() as u32;
    let triples: Vec<&ClassTriple> = inputs.iter().map(|x| x.classes).collect();
    let mut sum = CycleClass::zero(ambient);
    for (i, inp) in inputs.iter().enumerate() {
        if !same_ambient(inp.le.ambient(), ambient) {
            return Err(crate::chow::mismatch(inp.le.ambient(), ambient));
        }
        let c1 = inp.line_bundle.c1().rebase(ambient)?;
        let a = a_product(&triples, i);
        let Some(top) = inp.le.top() else { continue };
        for k in 0..=top {
            for lk in k..=top {
                let term = le_term(&c1, &inp.le.get(lk), k, lk - k);
                if !term.is_zero() {
                    sum += &(&a * &term);
                }
            }
        }
    }
    let pref = tangent_prefactor(ambient, r)?;
    Ok((&pref * &sum).scale(sign(r - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::line_bundle;

    fn cls(a: &Arc<AmbientSpace>, s: &str) -> CycleClass {
        CycleClass::parse(a, s).unwrap()
    }

    #[test]
    fn isolated_points() {
        let p2 = AmbientSpace::proj_space(2).unwrap();
        let o3 = line_bundle(&p2, &[3]).unwrap();
        for s in ["h^2", "2*h^2"] {
            let le = LeCycles::new(&p2, BTreeMap::from([(0, cls(&p2, s))])).unwrap();
            let m = le_to_milnor(&le, &o3).unwrap();
            assert_eq!(m, BTreeMap::from([(0, cls(&p2, s))]));
            assert_eq!(milnor_to_le(&p2, m, &o3).unwrap(), le);
        }
    }

    #[test]
    fn one_dimensional_singular_locus() {
        // frozen from direct evaluation of the double sum:
        // M_1 = (-1)^1 Λ_1, M_0 = Λ_0 - C(1,0) c_1(L) Λ_1
        let p3 = AmbientSpace::proj_space(3).unwrap();
        for (a, b, d) in [(1i64, 0i64, 2i64), (3, -2, 5), (-1, 4, 1)] {
            let l = line_bundle(&p3, &[d]).unwrap();
            let le = LeCycles::new(
                &p3,
                BTreeMap::from([
                    (1, cls(&p3, &format!("{a}*h^2"))),
                    (0, cls(&p3, &format!("{b}*h^3"))),
                ]),
            )
            .unwrap();
            let m = le_to_milnor(&le, &l).unwrap();
            assert_eq!(m[&1], cls(&p3, &format!("{}*h^2", -a)));
            let m0 = m.get(&0).cloned().unwrap_or_else(|| CycleClass::zero(&p3));
            assert_eq!(m0, cls(&p3, &format!("{}*h^3", b - a * d)));
        }
    }

    #[test]
    fn two_planes_le_cycles() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let o2 = line_bundle(&p3, &[2]).unwrap();
        let le = milnor_to_le(&p3, graded_pieces(&cls(&p3, "-h^2")), &o2).unwrap();
        assert_eq!(le.get(1), cls(&p3, "h^2"));
        assert_eq!(le.get(0), cls(&p3, "2*h^3"));
    }

    #[test]
    fn zero_in_zero_out() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let o2 = line_bundle(&p3, &[2]).unwrap();
        let le = milnor_to_le(&p3, BTreeMap::new(), &o2).unwrap();
        assert!(le.top().is_none());
        assert!(le_to_milnor(&le, &o2).unwrap().is_empty());
    }

    #[test]
    fn non_homogeneous_rejected() {
        let p3 = AmbientSpace::proj_space(3).unwrap();
        let o2 = line_bundle(&p3, &[2]).unwrap();
        let bad = BTreeMap::from([(1, cls(&p3, "h^2+h^3"))]);
        assert!(matches!(
            milnor_to_le(&p3, bad.clone(), &o2),
            Err(Error::NonHomogeneous(_))
        ));
        assert!(LeCycles::new(&p3, bad).is_err());
        assert!(LeCycles::new(&p3, BTreeMap::from([(0, cls(&p3, "h^2"))])).is_err());
    }
}
