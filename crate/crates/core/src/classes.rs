//! Virtual (Fulton-Johnson), Schwartz-MacPherson and Milnor classes of
//! hypersurfaces, with two independent routes to the Milnor class: the
//! stratum-weight formula and Aluffi's μ-class formula.
//!
//! Every class lives in the Chow ring of the ambient (pushforward
//! representation) and is graded by codimension there.

use std::fmt;
use std::sync::Arc;

use crate::bundle::{dual, tangent_bundle, tensor_line, top_chern, BundleClass};
use crate::chow::{AmbientKind, AmbientSpace, CycleClass};
use crate::error::{Error, Result};
use crate::strata::{gamma_weights, sign, StratifiedHypersurface};

/// Virtual, Schwartz-MacPherson and Milnor class of a zero scheme `Y` of
/// codimension `codim`, tied together by
/// `milnor = (-1)^(dim M - codim) (virt - csm)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTriple {
    pub virt: CycleClass,
    pub csm: CycleClass,
    pub milnor: CycleClass,
    pub codim: u32,
}

impl ClassTriple {
    pub fn from_virtual_and_csm(virt: CycleClass, csm: CycleClass, codim: u32) -> Result<Self> {
        let dim_m = virt.ambient().dim();
        let milnor = milnor_from_definition(&virt, &csm, dim_m, codim)?;
        Ok(ClassTriple {
            virt,
            csm,
            milnor,
            codim,
        })
    }

    pub fn from_virtual_and_milnor(
        virt: CycleClass,
        milnor: CycleClass,
        codim: u32,
    ) -> Result<Self> {
        let dim_m = virt.ambient().dim();
        let csm = csm_from_milnor(&virt, &milnor, dim_m, codim)?;
        Ok(ClassTriple {
            virt,
            csm,
            milnor,
            codim,
        })
    }

    pub fn definition_holds(&self) -> bool {
        let dim_m = self.virt.ambient().dim();
        milnor_from_definition(&self.virt, &self.csm, dim_m, self.codim)
            .map(|m| m == self.milnor)
            .unwrap_or(false)
    }

    pub fn euler_characteristic(&self) -> i64 {
        chi_of_closure(&self.csm)
    }
}

/// `c(TM) c(E)^{-1} ∩ [Y]` for `Y` the zero scheme of a regular section of `E`.
pub fn virtual_class(
    ambient: &Arc<AmbientSpace>,
    e: &BundleClass,
    x_class: &CycleClass,
) -> Result<CycleClass> {
    let expected = top_chern(e);
    if &expected != x_class {
        return Err(Error::NotRegularSection(format!(
            "class {x_class} differs from c_top(E) = {expected}"
        )));
    }
    let tm = tangent_bundle(ambient)?;
    let ratio = tm.chern().checked_mul(&e.chern().inverse()?)?;
    ratio.checked_mul(x_class)
}

/// `Σ_S γ_S c(L)^{-1} ∩ c_SM(S̄)` over the singular strata.
pub fn milnor_pp(hyp: &StratifiedHypersurface) -> CycleClass {
    let gammas = gamma_weights(hyp);
    let inv_l = hyp
        .line_bundle()
        .chern()
        .inverse()
        .expect("line bundle Chern class is a unit");
    let mut total = CycleClass::zero(hyp.ambient());
    for s in hyp.singular_strata() {
        let g = gammas[&s.name];
        if g == 0 {
            continue;
        }
        let csm = s
            .csm_closure
            .as_ref()
            .expect("validated: singular strata carry closure CSM classes");
        total += &(&inv_l * csm).scale(g);
    }
    total
}

/// `(-1)^(dim_m - codim) (virt - csm)`.
pub fn milnor_from_definition(
    virt: &CycleClass,
    csm: &CycleClass,
    dim_m: u32,
    codim: u32,
) -> Result<CycleClass> {
    let diff = virt.checked_sub(csm)?;
    Ok(diff.scale(sign(dim_m.abs_diff(codim))))
}

/// `virt - (-1)^(dim_m - codim) milnor`.
pub fn csm_from_milnor(
    virt: &CycleClass,
    milnor: &CycleClass,
    dim_m: u32,
    codim: u32,
) -> Result<CycleClass> {
    virt.checked_sub(&milnor.scale(sign(dim_m.abs_diff(codim))))
}

/// `α^∨ = Σ_j (-1)^j α^j`, `α^j` the codimension-`j` piece in the ambient.
pub fn aluffi_dual(a: &CycleClass) -> CycleClass {
    a.graded_sign_flip()
}

/// `α ⊗ L = Σ_j α^j / c(L)^j`.
pub fn aluffi_tensor(a: &CycleClass, l: &BundleClass) -> Result<CycleClass> {
    if l.rank() != 1 {
        return Err(Error::InvalidBundle(format!(
            "Aluffi twist needs a line bundle, got rank {}",
            l.rank()
        )));
    }
    let inv = l.chern().rebase(a.ambient())?.inverse()?;
    let mut total = CycleClass::zero(a.ambient());
    for j in a.codims() {
        let piece = a.component(j as i64)?;
        total += &(&piece * &inv.pow(j));
    }
    Ok(total)
}

/// Centers with a closed-form Segre class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegreCenter {
    /// `k` points, each contributing `[pt]`.
    Points(u32),
    /// A linear `P^m` in `P^n`.
    Linear(u32),
}

impl SegreCenter {
    /// Parses `points(k)` or `linear(m)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let arg = |prefix: &str| -> Option<u32> {
            t.strip_prefix(prefix)?
                .strip_prefix('(')?
                .strip_suffix(')')?
                .trim()
                .parse()
                .ok()
        };
        if let Some(k) = arg("points") {
            return Ok(SegreCenter::Points(k));
        }
        if let Some(m) = arg("linear") {
            return Ok(SegreCenter::Linear(m));
        }
        Err(Error::Unsupported(format!(
            "Segre class of `{t}`: only points(k) and linear(m) centers have builtin Segre \
             classes; Segre classes of arbitrary singular schemes are not computed"
        )))
    }
}

impl fmt::Display for SegreCenter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegreCenter::Points(k) => write!(f, "points({k})"),
            SegreCenter::Linear(m) => write!(f, "linear({m})"),
        }
    }
}

/// `s(Z, M) = c(N_Z M)^{-1} ∩ [Z]` for the builtin regularly embedded centers.
pub fn segre_builtin(ambient: &Arc<AmbientSpace>, center: SegreCenter) -> Result<CycleClass> {
    match center {
        SegreCenter::Points(k) => Ok(CycleClass::point(ambient).scale(k)),
        SegreCenter::Linear(m) => {
            let n = match ambient.kind() {
                AmbientKind::ProjSpace(n) => *n,
                _ => {
                    return Err(Error::Unsupported(format!(
                        "linear Segre centers need a projective space ambient, got {ambient}"
                    )))
                }
            };
            if m >= n {
                return Err(Error::Unsupported(format!(
                    "linear({m}) is not a proper linear subspace of P^{n}"
                )));
            }
            let h = CycleClass::generator(ambient, 0);
            let normal = (&CycleClass::one(ambient) + &h).pow(n - m);
            Ok(&normal.inverse()? * &h.pow(n - m))
        }
    }
}

/// Aluffi's μ-class `c(T*M ⊗ L) ∩ s(Sing X, M)`.
pub fn mu_class(hyp: &StratifiedHypersurface, segre: &CycleClass) -> Result<CycleClass> {
    let cotangent = dual(&tangent_bundle(hyp.ambient())?);
    let twisted = tensor_line(&cotangent, hyp.line_bundle())?;
    twisted.chern().checked_mul(segre)
}

/// `c(L)^(n-1) ∩ (μ^∨ ⊗ L)` without the overall sign.
pub fn aluffi_milnor_unsigned(hyp: &StratifiedHypersurface, mu: &CycleClass) -> Result<CycleClass> {
    let n = hyp.ambient().dim();
    let l = hyp.line_bundle();
    let twisted = aluffi_tensor(&aluffi_dual(mu), l)?;
    l.chern().pow(n - 1).checked_mul(&twisted)
}

/// Overall sign of the μ-class route, `(-1)^(dim M)`.
///
/// Calibrated once on the nodal plane cubic against [`milnor_pp`]; the
/// exponent `dim M - 1` yields `-[pt]` there.
pub fn aluffi_sign(dim_m: u32) -> i64 {
    sign(dim_m)
}

/// Milnor class of a hypersurface from its μ-class.
pub fn aluffi_milnor(hyp: &StratifiedHypersurface, mu: &CycleClass) -> Result<CycleClass> {
    let n = hyp.ambient().dim();
    Ok(aluffi_milnor_unsigned(hyp, mu)?.scale(aluffi_sign(n)))
}

/// Degree of a Schwartz-MacPherson class, i.e. the Euler characteristic.
pub fn chi_of_closure(c: &CycleClass) -> i64 {
    c.degree_i64()
}

/// Virtual class of a hypersurface.
pub fn hypersurface_virtual(hyp: &StratifiedHypersurface) -> Result<CycleClass> {
    virtual_class(hyp.ambient(), hyp.line_bundle(), hyp.hypersurface_class())
}

/// Class triple of a hypersurface. When the open stratum carries the CSM class
/// of the whole hypersurface, the Milnor class follows from the definition;
/// otherwise the CSM class is reconstructed from [`milnor_pp`].
pub fn hypersurface_classes(hyp: &StratifiedHypersurface) -> Result<ClassTriple> {
    let virt = hypersurface_virtual(hyp)?;
    match &hyp.open_stratum().csm_closure {
        Some(csm) => ClassTriple::from_virtual_and_csm(virt, csm.clone(), 1),
        None => ClassTriple::from_virtual_and_milnor(virt, milnor_pp(hyp), 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{direct_sum, line_bundle};
    use crate::strata::Stratum;

    fn cls(a: &Arc<AmbientSpace>, s: &str) -> CycleClass {
        CycleClass::parse(a, s).unwrap()
    }

    fn p(n: i64) -> Arc<AmbientSpace> {
        AmbientSpace::proj_space(n).unwrap()
    }

    fn nodal_cubic(fiber_chi: i64) -> StratifiedHypersurface {
        let p2 = p(2);
        let reg = Stratum::new("reg", 1, cls(&p2, "3*h"), None, 1);
        let node = Stratum::point(&p2, "node", fiber_chi);
        StratifiedHypersurface::new("c", &p2, line_bundle(&p2, &[3]).unwrap(), vec![reg, node])
            .unwrap()
    }

    fn two_planes() -> StratifiedHypersurface {
        let p3 = p(3);
        let reg = Stratum::new("reg", 2, cls(&p3, "2*h"), None, 1);
        let line = Stratum::linear(&p3, "line", 1, 0).unwrap();
        StratifiedHypersurface::new("tp", &p3, line_bundle(&p3, &[2]).unwrap(), vec![reg, line])
            .unwrap()
    }

    fn quadric_cone() -> StratifiedHypersurface {
        let p3 = p(3);
        let reg = Stratum::new("reg", 2, cls(&p3, "2*h"), None, 1);
        let vertex = Stratum::point(&p3, "vertex", 2);
        StratifiedHypersurface::new(
            "qc",
            &p3,
            line_bundle(&p3, &[2]).unwrap(),
            vec![reg, vertex],
        )
        .unwrap()
    }

    #[test]
    fn virtual_examples() {
        let p2 = p(2);
        let o3 = line_bundle(&p2, &[3]).unwrap();
        let v = virtual_class(&p2, &o3, &cls(&p2, "3*h")).unwrap();
        assert_eq!(v, cls(&p2, "3*h"));
        assert_eq!(v.degree_i64(), 0);

        let p3 = p(3);
        let o2 = line_bundle(&p3, &[2]).unwrap();
        assert_eq!(
            virtual_class(&p3, &o2, &cls(&p3, "2*h")).unwrap(),
            cls(&p3, "2*h+4*h^2+4*h^3")
        );
        let e = direct_sum(&o2, &line_bundle(&p3, &[1]).unwrap()).unwrap();
        assert_eq!(
            virtual_class(&p3, &e, &cls(&p3, "2*h^2")).unwrap(),
            cls(&p3, "2*h^2+2*h^3")
        );
        assert!(matches!(
            virtual_class(&p3, &o2, &cls(&p3, "3*h")),
            Err(Error::NotRegularSection(_))
        ));
    }

    #[test]
    fn milnor_pp_examples() {
        let p2 = p(2);
        assert_eq!(milnor_pp(&nodal_cubic(0)), cls(&p2, "h^2"));
        assert_eq!(milnor_pp(&nodal_cubic(-1)), cls(&p2, "2*h^2"));
        let p3 = p(3);
        assert_eq!(milnor_pp(&two_planes()), cls(&p3, "-h^2"));
        assert_eq!(milnor_pp(&quadric_cone()), cls(&p3, "h^3"));
        let smooth =
            StratifiedHypersurface::smooth("s", &p3, line_bundle(&p3, &[3]).unwrap()).unwrap();
        assert!(milnor_pp(&smooth).is_zero());
    }

    #[test]
    fn definition_agrees_with_pp_on_two_planes() {
        let p3 = p(3);
        let virt = hypersurface_virtual(&two_planes()).unwrap();
        let csm = cls(&p3, "2*h+5*h^2+4*h^3");
        let m = milnor_from_definition(&virt, &csm, 3, 1).unwrap();
        assert_eq!(m, milnor_pp(&two_planes()));
    }

    #[test]
    fn csm_from_milnor_examples() {
        let p2 = p(2);
        let csm = csm_from_milnor(&cls(&p2, "3*h"), &cls(&p2, "h^2"), 2, 1).unwrap();
        assert_eq!(csm, cls(&p2, "3*h+h^2"));
        assert_eq!(chi_of_closure(&csm), 1);
        let p3 = p(3);
        let csm = csm_from_milnor(&cls(&p3, "2*h+4*h^2+4*h^3"), &cls(&p3, "h^3"), 3, 1).unwrap();
        assert_eq!(csm, cls(&p3, "2*h+4*h^2+3*h^3"));
        assert_eq!(chi_of_closure(&csm), 3);
        let v = cls(&p3, "2*h+4*h^2+4*h^3");
        assert_eq!(
            csm_from_milnor(&v, &CycleClass::zero(&p3), 3, 1).unwrap(),
            v
        );
    }

    #[test]
    fn aluffi_operations() {
        let p2 = p(2);
        assert_eq!(aluffi_dual(&cls(&p2, "3*h+h^2")), cls(&p2, "-3*h+h^2"));
        let c = cls(&p2, "1+5*h-7*h^2");
        assert_eq!(aluffi_dual(&aluffi_dual(&c)), c);
        assert_eq!(aluffi_dual(&cls(&p(3), "h^3")), cls(&p(3), "-h^3"));

        let o3 = line_bundle(&p2, &[3]).unwrap();
        assert_eq!(
            aluffi_tensor(&cls(&p2, "h^2"), &o3).unwrap(),
            cls(&p2, "h^2")
        );
        let o0 = line_bundle(&p2, &[0]).unwrap();
        assert_eq!(aluffi_tensor(&c, &o0).unwrap(), c);
        let o1 = line_bundle(&p2, &[1]).unwrap();
        assert_eq!(
            aluffi_tensor(&cls(&p2, "h"), &o1).unwrap(),
            cls(&p2, "h-h^2")
        );
    }

    #[test]
    fn segre_examples() {
        let p2 = p(2);
        let p3 = p(3);
        assert_eq!(
            segre_builtin(&p2, SegreCenter::Points(1)).unwrap(),
            cls(&p2, "h^2")
        );
        assert_eq!(
            segre_builtin(&p3, SegreCenter::Linear(1)).unwrap(),
            cls(&p3, "h^2-2*h^3")
        );
        assert_eq!(
            segre_builtin(&p3, SegreCenter::Points(3)).unwrap(),
            cls(&p3, "3*h^3")
        );
        assert!(segre_builtin(&p3, SegreCenter::Linear(3)).is_err());
        assert_eq!(
            SegreCenter::parse("linear(1)").unwrap(),
            SegreCenter::Linear(1)
        );
        assert_eq!(
            SegreCenter::parse(" points( 4 )").unwrap(),
            SegreCenter::Points(4)
        );
        let e = SegreCenter::parse("jacobian(x^2+y^3)").unwrap_err();
        assert!(e.to_string().contains("arbitrary singular schemes"));
    }

    #[test]
    fn mu_class_examples() {
        let p2 = p(2);
        let nc = nodal_cubic(0);
        assert_eq!(mu_class(&nc, &cls(&p2, "h^2")).unwrap(), cls(&p2, "h^2"));
        assert_eq!(
            mu_class(&nc, &cls(&p2, "4*h^2")).unwrap(),
            cls(&p2, "4*h^2")
        );
        let p3 = p(3);
        let s = segre_builtin(&p3, SegreCenter::Linear(1)).unwrap();
        assert_eq!(mu_class(&two_planes(), &s).unwrap(), cls(&p3, "h^2"));
    }

    #[test]
    fn aluffi_sign_calibration_on_nodal_cubic() {
        let p2 = p(2);
        let nc = nodal_cubic(0);
        let mu = mu_class(&nc, &segre_builtin(&p2, SegreCenter::Points(1)).unwrap()).unwrap();
        let unsigned = aluffi_milnor_unsigned(&nc, &mu).unwrap();
        // the exponent dim M - 1 would give the opposite sign
        assert_eq!(unsigned.scale(sign(2 - 1)), cls(&p2, "-h^2"));
        assert_eq!(aluffi_milnor(&nc, &mu).unwrap(), milnor_pp(&nc));
    }

    #[test]
    fn aluffi_matches_pp() {
        let p2 = p(2);
        let p3 = p(3);
        let cases = [
            (
                nodal_cubic(0),
                segre_builtin(&p2, SegreCenter::Points(1)).unwrap(),
            ),
            (
                nodal_cubic(-1),
                segre_builtin(&p2, SegreCenter::Points(2)).unwrap(),
            ),
            (
                two_planes(),
                segre_builtin(&p3, SegreCenter::Linear(1)).unwrap(),
            ),
            (
                quadric_cone(),
                segre_builtin(&p3, SegreCenter::Points(1)).unwrap(),
            ),
        ];
        for (hyp, s) in cases {
            let mu = mu_class(&hyp, &s).unwrap();
            assert_eq!(
                aluffi_milnor(&hyp, &mu).unwrap(),
                milnor_pp(&hyp),
                "{}",
                hyp.name()
            );
        }
        let smooth =
            StratifiedHypersurface::smooth("s", &p3, line_bundle(&p3, &[3]).unwrap()).unwrap();
        let mu = mu_class(&smooth, &CycleClass::zero(&p3)).unwrap();
        assert!(aluffi_milnor(&smooth, &mu).unwrap().is_zero());
    }

    #[test]
    fn triples() {
        let t = hypersurface_classes(&quadric_cone()).unwrap();
        let p3 = p(3);
        assert_eq!(t.milnor, cls(&p3, "h^3"));
        assert_eq!(t.csm, cls(&p3, "2*h+4*h^2+3*h^3"));
        assert_eq!(t.euler_characteristic(), 3);
        assert!(t.definition_holds());
        let mut broken = t.clone();
        broken.milnor = -broken.milnor;
        assert!(!broken.definition_holds());
    }
}
