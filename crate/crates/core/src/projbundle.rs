//! The projectivization `P(E^v) -> B` of a bundle `E` of rank `r`, with
//! `O(1)` the quotient of `p*E` and `F` the kernel:
//!
//! `0 -> F -> p*E -> O(1) -> 0`.
//!
//! Its Chow ring is `A(B)[ζ]` modulo the vanishing of `c_r(F)`, which reads
//! `ζ^r = c_1 ζ^(r-1) - c_2 ζ^(r-2) + ... + (-1)^(r-1) c_r`. Classes are kept
//! in the normal form `Σ_{j<r} p*(a_j) ζ^j` and `p_*` returns `a_{r-1}`.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::bundle::{dual, line_bundle, tangent_bundle, tensor_line, top_chern, BundleClass};
use crate::chow::{same_ambient, AmbientKind, AmbientSpace, CycleClass};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ProjBundleRing {
    base: Arc<AmbientSpace>,
    e: BundleClass,
    total: Arc<AmbientSpace>,
}

impl ProjBundleRing {
    pub fn new(base: &Arc<AmbientSpace>, e: &BundleClass) -> Result<Self> {
        let chern = e.chern().rebase(base)?;
        let total = AmbientSpace::proj_bundle(base, e.rank(), &chern)?;
        Ok(ProjBundleRing {
            base: base.clone(),
            e: BundleClass::new(e.rank(), chern)?,
            total,
        })
    }

    /// Ring with an explicit reduction rule for `ζ^r`; for negative controls.
    pub fn with_relation(
        base: &Arc<AmbientSpace>,
        e: &BundleClass,
        relation: Vec<CycleClass>,
    ) -> Result<Self> {
        let chern = e.chern().rebase(base)?;
        let total = AmbientSpace::proj_bundle_with_relation(base, e.rank(), &chern, relation)?;
        Ok(ProjBundleRing {
            base: base.clone(),
            e: BundleClass::new(e.rank(), chern)?,
            total,
        })
    }

    /// Ring of an existing projective-bundle ambient.
    pub fn from_total(total: &Arc<AmbientSpace>) -> Result<Self> {
        let pb = total
            .proj_bundle_data()
            .ok_or_else(|| Error::InvalidAmbient(format!("{total} is not a projective bundle")))?;
        Ok(ProjBundleRing {
            base: pb.base.clone(),
            e: BundleClass::new(pb.rank, pb.chern.clone())?,
            total: total.clone(),
        })
    }

    pub fn base(&self) -> &Arc<AmbientSpace> {
        &self.base
    }

    pub fn bundle(&self) -> &BundleClass {
        &self.e
    }

    pub fn total(&self) -> &Arc<AmbientSpace> {
        &self.total
    }

    pub fn rank(&self) -> u32 {
        self.e.rank()
    }

    /// `ζ = c_1(O(1))`.
    pub fn zeta(&self) -> CycleClass {
        CycleClass::generator(&self.total, self.base.ngens())
    }

    pub fn pullback(&self, a: &CycleClass) -> Result<CycleClass> {
        if !same_ambient(a.ambient(), &self.base) {
            return Err(crate::chow::mismatch(a.ambient(), &self.base));
        }
        CycleClass::from_terms(
            &self.total,
            a.terms().map(|(m, c)| {
                let mut m = m.to_vec();
                m.push(0);
                (m, c.clone())
            }),
        )
    }

    pub fn pullback_bundle(&self, b: &BundleClass) -> Result<BundleClass> {
        BundleClass::new(b.rank(), self.pullback(b.chern())?)
    }

    /// Coefficients `a_0, ..., a_{r-1}` of the normal form.
    pub fn normal_form(&self, a: &CycleClass) -> Result<Vec<CycleClass>> {
        if !same_ambient(a.ambient(), &self.total) {
            return Err(crate::chow::mismatch(a.ambient(), &self.total));
        }
        let k = self.base.ngens();
        let mut out: Vec<Vec<(Vec<u32>, BigInt)>> = vec![Vec::new(); self.rank() as usize];
        for (m, c) in a.terms() {
            out[m[k] as usize].push((m[..k].to_vec(), c.clone()));
        }
        out.into_iter()
            .map(|ts| CycleClass::from_terms(&self.base, ts))
            .collect()
    }

    /// `p_*`: the coefficient of `ζ^(r-1)`.
    pub fn pushforward(&self, a: &CycleClass) -> Result<CycleClass> {
        Ok(self.normal_form(a)?.pop().expect("rank >= 1"))
    }

    /// `O(1)`.
    pub fn o1(&self) -> BundleClass {
        let mut deg = vec![0; self.total.ngens()];
        deg[self.base.ngens()] = 1;
        line_bundle(&self.total, &deg).expect("generator count matches")
    }

    /// `p*E / (1 + ζ)` before any rank check.
    fn sub_chern_raw(&self) -> Result<CycleClass> {
        let pe = self.pullback(self.e.chern())?;
        Ok(&pe * &self.o1().chern().inverse()?)
    }

    /// Part of `c(p*E) (1+ζ)^{-1}` in codimension `>= r`; zero exactly when
    /// the ring relation is the one forced by the tautological sequence.
    pub fn relation_residue(&self) -> Result<CycleClass> {
        Ok(self.sub_chern_raw()?.truncate_below(self.rank()))
    }

    /// The tautological subbundle `F` of rank `r - 1`.
    pub fn taut_sub_chern(&self) -> Result<BundleClass> {
        BundleClass::new(self.rank() - 1, self.sub_chern_raw()?)
    }

    /// `p*E^v ⊗ O(1)`, of formal rank `r`.
    pub fn twisted_dual(&self) -> Result<BundleClass> {
        let pe = self.pullback_bundle(&self.e)?;
        tensor_line(&dual(&pe), &self.o1())
    }

    /// `T_{P/B}`, rank `r - 1`, from the relative Euler sequence.
    pub fn relative_tangent(&self) -> Result<BundleClass> {
        let t = self.twisted_dual()?;
        BundleClass::new(self.rank() - 1, t.chern().clone())
    }

    /// Tangent bundle of the total space, `p*T_B` extended by `T_{P/B}`.
    pub fn tangent_total(&self) -> Result<BundleClass> {
        let tb = self.pullback_bundle(&base_tangent(&self.base)?)?;
        let rel = self.relative_tangent()?;
        BundleClass::new(tb.rank() + rel.rank(), tb.chern() * rel.chern())
    }
}

fn base_tangent(base: &Arc<AmbientSpace>) -> Result<BundleClass> {
    match base.kind() {
        AmbientKind::ProjBundle(_) => ProjBundleRing::from_total(base)?.tangent_total(),
        _ => tangent_bundle(base),
    }
}

pub fn taut_sub_chern(ring: &ProjBundleRing) -> Result<BundleClass> {
    ring.taut_sub_chern()
}

pub fn pb_pushforward(ring: &ProjBundleRing, a: &CycleClass) -> Result<CycleClass> {
    ring.pushforward(a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// The relative tangent class computed two ways, plus two consequences:
/// 1. `c(p*E^v ⊗ O(1))` has no part in codimension `r` (the Euler sequence
///    makes it the class of a rank `r - 1` bundle);
/// 2. `c(TP) / c(p*T_B)` equals `c(p*E^v ⊗ O(1))`;
/// 3. when `E` is split as `⊕ O(a_i)`, the twist formula matches
///    `Π (1 - a_i + ζ)`;
/// 4. `∫ c_top(TP) = r χ(B)`.
pub fn verify_tangent_identities(
    ring: &ProjBundleRing,
    split: Option<&[Vec<i64>]>,
) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    let r = ring.rank();
    let twisted = match ring.twisted_dual() {
        Ok(t) => t,
        Err(e) => {
            out.push(IdentityCheck {
                name: "euler-sequence",
                pass: false,
                detail: e.to_string(),
            });
            return out;
        }
    };
    let top = twisted.chern().truncate_below(r);
    out.push(IdentityCheck {
        name: "euler-sequence",
        pass: top.is_zero(),
        detail: format!("codim >= {r} part of c(p*E^v (x) O(1)) = {top}"),
    });
    let ratio = ring
        .pullback_bundle(&base_tangent(ring.base()).expect("projective base"))
        .and_then(|tb| {
            let total = ring.tangent_total()?;
            Ok(total.chern() * &tb.chern().inverse()?)
        });
    out.push(match ratio {
        Ok(q) => IdentityCheck {
            name: "tangent-ratio",
            pass: &q == twisted.chern(),
            detail: format!(
                "c(TP)/c(p*TB) = {q}, c(p*E^v (x) O(1)) = {}",
                twisted.chern()
            ),
        },
        Err(e) => IdentityCheck {
            name: "tangent-ratio",
            pass: false,
            detail: e.to_string(),
        },
    });
    if let Some(degrees) = split {
        let res = (|| -> Result<CycleClass> {
            let one = CycleClass::one(ring.total());
            let mut prod = one.clone();
            for d in degrees {
                let a = line_bundle(ring.base(), d)?;
                let pa = ring.pullback(&a.c1())?;
                prod = &prod * &(&(&one - &pa) + &ring.zeta());
            }
            Ok(prod)
        })();
        out.push(match res {
            Ok(p) => IdentityCheck {
                name: "split-twist",
                pass: &p == twisted.chern(),
                detail: format!("product of root factors = {p}"),
            },
            Err(e) => IdentityCheck {
                name: "split-twist",
                pass: false,
                detail: e.to_string(),
            },
        });
    }
    let chi = (|| -> Result<(BigInt, BigInt)> {
        let t = ring.tangent_total()?;
        let tb = base_tangent(ring.base())?;
        Ok((top_chern(&t).degree(), top_chern(&tb).degree() * r))
    })();
    out.push(match chi {
        Ok((a, b)) => IdentityCheck {
            name: "euler-characteristic",
            pass: a == b,
            detail: format!("deg c_top(TP) = {a}, r chi(B) = {b}"),
        },
        Err(e) => IdentityCheck {
            name: "euler-characteristic",
            pass: false,
            detail: e.to_string(),
        },
    });
    out
}

/// `c(F)^{-1} c_top(F) ∩ class`.
pub fn lemma2_transfer(f: &BundleClass, class: &CycleClass) -> Result<CycleClass> {
    let c = f.chern().rebase(class.ambient())?;
    let t = top_chern(f).rebase(class.ambient())?;
    Ok(&(&c.inverse()? * &t) * class)
}

/// For `G = O(a) ⊕ O(b)`, the virtual class of the zero scheme of a section
/// of `G` against the transfer of the virtual class of a section of `O(b)`
/// along `O(a)`. Returns `(direct, transferred)`.
pub fn lemma2_split_check(
    ambient: &Arc<AmbientSpace>,
    a: i64,
    b: i64,
) -> Result<(CycleClass, CycleClass)> {
    let la = line_bundle(ambient, &[a])?;
    let lb = line_bundle(ambient, &[b])?;
    let g = crate::bundle::direct_sum(&la, &lb)?;
    let direct = crate::classes::virtual_class(ambient, &g, &top_chern(&g))?;
    let zh = crate::classes::virtual_class(ambient, &lb, &top_chern(&lb))?;
    Ok((direct, lemma2_transfer(&la, &zh)?))
}

#[derive(Clone, Debug)]
pub struct GeneralCaseInput {
    pub ring: ProjBundleRing,
    /// Milnor class of the hypersurface cut out by the induced section on
    /// the total space.
    pub milnor_of_tilde: CycleClass,
}

/// `p_*([c(p*E^v ⊗ O(1))^{-1} ζ^(r-1) c(F)^{-1} c_top(F)] ∩ M̃)`.
pub fn milnor_general(inp: &GeneralCaseInput) -> Result<CycleClass> {
    let ring = &inp.ring;
    let m = inp.milnor_of_tilde.rebase(ring.total())?;
    let kernel = general_kernel(ring)?;
    ring.pushforward(&(&kernel * &m))
}

/// The bracketed factor of [`milnor_general`].
pub fn general_kernel(ring: &ProjBundleRing) -> Result<CycleClass> {
    let f = ring.taut_sub_chern()?;
    let tw = ring.twisted_dual()?;
    let zr = ring.zeta().pow(ring.rank() - 1);
    let ff = &f.chern().inverse()? * &top_chern(&f);
    Ok(&(&tw.chern().inverse()? * &zr) * &ff)
}

/// `p_*(ζ^(r-1) p*(α)) = α` for each `α`, with an injectable pushforward.
pub fn lemma1_pullback_check_with<F>(
    ring: &ProjBundleRing,
    alphas: &[CycleClass],
    push: F,
) -> Result<bool>
where
    F: Fn(&ProjBundleRing, &CycleClass) -> Result<CycleClass>,
{
    let zr = ring.zeta().pow(ring.rank() - 1);
    for a in alphas {
        let up = &zr * &ring.pullback(a)?;
        if &push(ring, &up)? != a {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn lemma1_pullback_check(ring: &ProjBundleRing, alphas: &[CycleClass]) -> Result<bool> {
    lemma1_pullback_check_with(ring, alphas, pb_pushforward)
}
