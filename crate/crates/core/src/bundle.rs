//! Formal vector bundles: a rank and a total Chern class.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::chow::{AmbientKind, AmbientSpace, CycleClass};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct BundleClass {
    rank: u32,
    chern: CycleClass,
}

impl BundleClass {
    /// Checks `c_0 = 1` and `c_k = 0` for `k > rank`.
    pub fn new(rank: u32, chern: CycleClass) -> Result<Self> {
        if !chern.constant_term().eq(&BigInt::from(1)) {
            return Err(Error::InvalidBundle(format!(
                "total Chern class {chern} must have degree-0 part 1"
            )));
        }
        if let Some(k) = chern.codims().into_iter().find(|&k| k > rank) {
            return Err(Error::InvalidBundle(format!(
                "rank {rank} bundle has nonzero c_{k} in {chern}"
            )));
        }
        Ok(BundleClass { rank, chern })
    }

    pub fn trivial(ambient: &Arc<AmbientSpace>, rank: u32) -> Self {
        BundleClass {
            rank,
            chern: CycleClass::one(ambient),
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn chern(&self) -> &CycleClass {
        &self.chern
    }

    pub fn ambient(&self) -> &Arc<AmbientSpace> {
        self.chern.ambient()
    }

    /// `c_k`, zero when `k` exceeds the ambient dimension.
    pub fn chern_k(&self, k: u32) -> CycleClass {
        self.chern
            .component(k as i64)
            .unwrap_or_else(|_| CycleClass::zero(self.ambient()))
    }

    pub fn c1(&self) -> CycleClass {
        self.chern_k(1)
    }
}

impl fmt::Debug for BundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BundleClass(rank {}, c = {})", self.rank, self.chern)
    }
}

/// Line bundle with `c_1 = sum_j d_j g_j` over the ambient's generators.
pub fn line_bundle(ambient: &Arc<AmbientSpace>, multidegree: &[i64]) -> Result<BundleClass> {
    if multidegree.len() != ambient.ngens() {
        return Err(Error::InvalidBundle(format!(
            "multidegree {multidegree:?} has {} entries, {ambient} has {} generators",
            multidegree.len(),
            ambient.ngens()
        )));
    }
    let mut c = CycleClass::one(ambient);
    for (j, &d) in multidegree.iter().enumerate() {
        c += &CycleClass::generator(ambient, j).scale(d);
    }
    Ok(BundleClass { rank: 1, chern: c })
}

pub fn direct_sum(e: &BundleClass, f: &BundleClass) -> Result<BundleClass> {
    Ok(BundleClass {
        rank: e.rank + f.rank,
        chern: e.chern.checked_mul(&f.chern)?,
    })
}

pub fn dual(e: &BundleClass) -> BundleClass {
    BundleClass {
        rank: e.rank,
        chern: e.chern.graded_sign_flip(),
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `E (x) L` for a line bundle `L`:
/// `c_k(E (x) L) = sum_{i<=k} C(rank - i, k - i) c_i(E) c_1(L)^(k - i)`.
pub fn tensor_line(e: &BundleClass, l: &BundleClass) -> Result<BundleClass> {
    if l.rank != 1 {
        return Err(Error::InvalidBundle(format!(
            "tensor_line needs a line bundle, got rank {}",
            l.rank
        )));
    }
    let amb = e.ambient();
    let ell = l.c1().rebase(amb)?;
    let ell_pows: Vec<CycleClass> = (0..=e.rank).map(|k| ell.pow(k)).collect();
    let mut total = CycleClass::zero(amb);
    for k in 0..=e.rank.min(amb.dim()) {
        for i in 0..=k {
            let coeff = binomial(e.rank - i, k - i);
            let term = &e.chern_k(i) * &ell_pows[(k - i) as usize];
            total += &term.scale(coeff);
        }
    }
    Ok(BundleClass {
        rank: e.rank,
        chern: total,
    })
}

/// Tangent bundle of `P^n` or of a product of projective spaces.
pub fn tangent_bundle(ambient: &Arc<AmbientSpace>) -> Result<BundleClass> {
    match ambient.kind() {
        AmbientKind::ProjSpace(n) => {
            let h = CycleClass::generator(ambient, 0);
            let c = (&CycleClass::one(ambient) + &h).pow(n + 1);
            Ok(BundleClass { rank: *n, chern: c })
        }
        AmbientKind::MultiProj(ns) => {
            let one = CycleClass::one(ambient);
            let mut c = one.clone();
            for (i, n) in ns.iter().enumerate() {
                c = &c * &(&one + &CycleClass::generator(ambient, i)).pow(n + 1);
            }
            Ok(BundleClass {
                rank: ns.iter().sum(),
                chern: c,
            })
        }
        AmbientKind::ProjBundle(_) => Err(Error::Unsupported(
            "tangent bundle of a projective bundle: use projbundle::tangent_total".into(),
        )),
    }
}

pub fn top_chern(e: &BundleClass) -> CycleClass {
    e.chern_k(e.rank)
}
