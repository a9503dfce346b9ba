//! Truncated graded Chow rings with exact integer coefficients.
//!
//! Three kinds of ambient space are supported: a projective space `P^n`
//! (one generator `h`, relation `h^(n+1) = 0`), a finite product of
//! projective spaces (generators `h1..hk`, relations `hi^(ni+1) = 0`), and
//! the projectivization `P(E^v)` of the dual of a bundle `E` of rank `r` over
//! another supported ambient. The latter adds one generator `z`, the first
//! Chern class of the tautological quotient `O(1)` of `p*E`, subject to
//! `z^r = c1(E) z^(r-1) - c2(E) z^(r-2) + ... + (-1)^(r-1) cr(E)`.
//!
//! A [`CycleClass`] is always stored in normal form: every monomial respects
//! the relations and zero coefficients are dropped. Grading is by
//! codimension in the ambient; every generator has codimension one.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bundle::BundleClass;
use crate::error::{Error, Result};

/// Exponent vector, one entry per generator of the ambient.
pub type Monomial = Box<[u32]>;

type Terms = BTreeMap<Monomial, BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmbientKind {
    ProjSpace(u32),
    MultiProj(Vec<u32>),
    ProjBundle(ProjBundleData),
}

/// Data of `P(E^v) -> base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjBundleData {
    pub base: Arc<AmbientSpace>,
    pub rank: u32,
    /// Total Chern class of `E`, on the base.
    pub chern: CycleClass,
    /// `relation[i - 1]` multiplies `z^(r - i)` in the reduction of `z^r`.
    pub relation: Vec<CycleClass>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbientSpace {
    kind: AmbientKind,
    dim: u32,
    names: Vec<String>,
}

/// Unvalidated description of an ambient space.
#[derive(Clone, Debug)]
pub enum AmbientSpec {
    ProjSpace(i64),
    MultiProj(Vec<i64>),
    ProjBundle {
        base: Arc<AmbientSpace>,
        bundle: BundleClass,
    },
}

pub fn make_ambient(spec: &AmbientSpec) -> Result<Arc<AmbientSpace>> {
    match spec {
        AmbientSpec::ProjSpace(n) => AmbientSpace::proj_space(*n),
        AmbientSpec::MultiProj(ns) => AmbientSpace::multi_proj(ns),
        AmbientSpec::ProjBundle { base, bundle } => {
            AmbientSpace::proj_bundle(base, bundle.rank(), bundle.chern())
        }
    }
}

fn check_dim(n: i64) -> Result<u32> {
    if n < 0 {
        return Err(Error::InvalidAmbient(format!("negative dimension {n}")));
    }
    u32::try_from(n).map_err(|_| Error::InvalidAmbient(format!("dimension {n} too large")))
}

impl AmbientSpace {
    pub fn proj_space(n: i64) -> Result<Arc<Self>> {
        let n = check_dim(n)?;
        Ok(Arc::new(AmbientSpace {
            kind: AmbientKind::ProjSpace(n),
            dim: n,
            names: vec!["h".to_string()],
        }))
    }

    pub fn multi_proj(ns: &[i64]) -> Result<Arc<Self>> {
        if ns.is_empty() {
            return Err(Error::InvalidAmbient(
                "a product needs at least one factor".into(),
            ));
        }
        let dims = ns
            .iter()
            .map(|&n| check_dim(n))
            .collect::<Result<Vec<_>>>()?;
        let names = (1..=dims.len()).map(|i| format!("h{i}")).collect();
        Ok(Arc::new(AmbientSpace {
            dim: dims.iter().sum(),
            kind: AmbientKind::MultiProj(dims),
            names,
        }))
    }

    /// `P(E^v)` for `E` of the given rank and total Chern class over `base`.
    pub fn proj_bundle(base: &Arc<Self>, rank: u32, chern: &CycleClass) -> Result<Arc<Self>> {
        if rank == 0 {
            return Err(Error::InvalidAmbient(
                "projective bundle needs rank >= 1".into(),
            ));
        }
        let relation = (1..=rank)
            .map(|i| {
                let c = chern
                    .component(i as i64)
                    .unwrap_or_else(|_| CycleClass::zero(base));
                if i % 2 == 1 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        Self::proj_bundle_with_relation(base, rank, chern, relation)
    }

    /// Like [`AmbientSpace::proj_bundle`] but with an explicit reduction rule
    /// for `z^r`. Used to build deliberately inconsistent rings for negative
    /// controls.
    pub fn proj_bundle_with_relation(
        base: &Arc<Self>,
        rank: u32,
        chern: &CycleClass,
        relation: Vec<CycleClass>,
    ) -> Result<Arc<Self>> {
        if rank == 0 {
            return Err(Error::InvalidAmbient(
                "projective bundle needs rank >= 1".into(),
            ));
        }
        if !same_ambient(chern.ambient(), base) {
            return Err(mismatch(chern.ambient(), base));
        }
        if relation.len() != rank as usize {
            return Err(Error::InvalidAmbient(format!(
                "relation has {} coefficients, expected {rank}",
                relation.len()
            )));
        }
        if let Some(c) = relation.iter().find(|c| !same_ambient(c.ambient(), base)) {
            return Err(mismatch(c.ambient(), base));
        }
        let mut names = base.names.clone();
        let mut zeta = "z".to_string();
        let mut k = 2;
        while names.contains(&zeta) {
            zeta = format!("z{k}");
            k += 1;
        }
        names.push(zeta);
        Ok(Arc::new(AmbientSpace {
            dim: base.dim + rank - 1,
            kind: AmbientKind::ProjBundle(ProjBundleData {
                base: base.clone(),
                rank,
                chern: chern.clone(),
                relation,
            }),
            names,
        }))
    }

    pub fn kind(&self) -> &AmbientKind {
        &self.kind
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn proj_bundle_data(&self) -> Option<&ProjBundleData> {
        match &self.kind {
            AmbientKind::ProjBundle(pb) => Some(pb),
            _ => None,
        }
    }

    /// Exponent vector of the point class.
    pub fn top_monomial(&self) -> Vec<u32> {
        match &self.kind {
            AmbientKind::ProjSpace(n) => vec![*n],
            AmbientKind::MultiProj(ns) => ns.clone(),
            AmbientKind::ProjBundle(pb) => {
                let mut m = pb.base.top_monomial();
                m.push(pb.rank - 1);
                m
            }
        }
    }

    /// Per-generator exponent bounds when the relations are monomial.
    fn monomial_bounds(&self) -> Option<&[u32]> {
        match &self.kind {
            AmbientKind::ProjSpace(n) => Some(std::slice::from_ref(n)),
            AmbientKind::MultiProj(ns) => Some(ns),
            AmbientKind::ProjBundle(_) => None,
        }
    }

    fn normalize(self: &Arc<Self>, raw: Terms) -> Terms {
        match &self.kind {
            AmbientKind::ProjSpace(_) | AmbientKind::MultiProj(_) => {
                let bounds = self.monomial_bounds().unwrap();
                raw.into_iter()
                    .filter(|(m, c)| !c.is_zero() && m.iter().zip(bounds).all(|(e, b)| e <= b))
                    .collect()
            }
            AmbientKind::ProjBundle(pb) => {
                let k = pb.base.ngens();
                let r = pb.rank;
                let mut groups: BTreeMap<u32, Terms> = BTreeMap::new();
                for (m, c) in raw {
                    if c.is_zero() {
                        continue;
                    }
                    let bm: Monomial = m[..k].into();
                    *groups
                        .entry(m[k])
                        .or_default()
                        .entry(bm)
                        .or_insert_with(BigInt::zero) += c;
                }
                let max_e = groups.keys().next_back().copied().unwrap_or(0);
                let mut coeffs: Vec<CycleClass> = (0..=max_e.max(r - 1))
                    .map(|_| CycleClass::zero(&pb.base))
                    .collect();
                for (e, g) in groups {
                    coeffs[e as usize] = CycleClass {
                        ambient: pb.base.clone(),
                        terms: pb.base.normalize(g),
                    };
                }
                for e in (r..=max_e).rev() {
                    let a = std::mem::replace(&mut coeffs[e as usize], CycleClass::zero(&pb.base));
                    if a.is_zero() {
                        continue;
                    }
                    for i in 1..=r {
                        let t = &a * &pb.relation[(i - 1) as usize];
                        coeffs[(e - i) as usize] += &t;
                    }
                }
                let mut out = Terms::new();
                for (e, a) in coeffs.into_iter().enumerate().take(r as usize) {
                    for (bm, c) in a.terms {
                        let mut m = bm.into_vec();
                        m.push(e as u32);
                        out.insert(m.into_boxed_slice(), c);
                    }
                }
                out
            }
        }
    }

    fn mul_terms(self: &Arc<Self>, a: &Terms, b: &Terms) -> Terms {
        let bounds = self.monomial_bounds();
        let mut raw = Terms::new();
        for (ma, ca) in a {
            'inner: for (mb, cb) in b {
                let mut m = Vec::with_capacity(ma.len());
                for (i, (x, y)) in ma.iter().zip(mb.iter()).enumerate() {
                    let e = x + y;
                    if let Some(bd) = bounds {
                        if e > bd[i] {
                            continue 'inner;
                        }
                    }
                    m.push(e);
                }
                *raw.entry(m.into_boxed_slice()).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        self.normalize(raw)
    }
}

impl fmt::Display for AmbientSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AmbientKind::ProjSpace(n) => write!(f, "P^{n}"),
            AmbientKind::MultiProj(ns) => {
                let parts: Vec<String> = ns.iter().map(|n| format!("P^{n}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            AmbientKind::ProjBundle(pb) => write!(
                f,
                "P(E^v) over {} [rank {}, c(E) = {}]",
                pb.base, pb.rank, pb.chern
            ),
        }
    }
}

pub(crate) fn same_ambient(a: &Arc<AmbientSpace>, b: &Arc<AmbientSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn mismatch(a: &AmbientSpace, b: &AmbientSpace) -> Error {
    Error::AmbientMismatch {
        left: a.to_string(),
        right: b.to_string(),
    }
}

/// An element of the Chow ring of an [`AmbientSpace`].
#[derive(Clone, PartialEq, Eq)]
pub struct CycleClass {
    ambient: Arc<AmbientSpace>,
    terms: Terms,
}

impl CycleClass {
    pub fn zero(ambient: &Arc<AmbientSpace>) -> Self {
        CycleClass {
            ambient: ambient.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(ambient: &Arc<AmbientSpace>) -> Self {
        Self::constant(ambient, 1)
    }

    pub fn constant(ambient: &Arc<AmbientSpace>, c: i64) -> Self {
        let mut terms = Terms::new();
        if c != 0 {
            terms.insert(vec![0; ambient.ngens()].into_boxed_slice(), BigInt::from(c));
        }
        CycleClass {
            ambient: ambient.clone(),
            terms,
        }
    }

    /// The `i`-th generator (`h`, `hi`, or `z`).
    pub fn generator(ambient: &Arc<AmbientSpace>, i: usize) -> Self {
        let mut m = vec![0; ambient.ngens()];
        m[i] = 1;
        Self::monomial(ambient, &m, 1)
    }

    pub fn monomial(ambient: &Arc<AmbientSpace>, exps: &[u32], coeff: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), ambient.ngens(), "exponent vector length");
        let mut raw = Terms::new();
        raw.insert(exps.into(), coeff.into());
        CycleClass {
            ambient: ambient.clone(),
            terms: ambient.normalize(raw),
        }
    }

    pub fn from_terms<I, C>(ambient: &Arc<AmbientSpace>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
        C: Into<BigInt>,
    {
        let mut raw = Terms::new();
        for (m, c) in terms {
            if m.len() != ambient.ngens() {
                return Err(Error::InvalidAmbient(format!(
                    "monomial {:?} has {} exponents, ambient {} has {} generators",
                    m,
                    m.len(),
                    ambient,
                    ambient.ngens()
                )));
            }
            *raw.entry(m.into_boxed_slice()).or_insert_with(BigInt::zero) += c.into();
        }
        Ok(CycleClass {
            ambient: ambient.clone(),
            terms: ambient.normalize(raw),
        })
    }

    /// The point class.
    pub fn point(ambient: &Arc<AmbientSpace>) -> Self {
        Self::monomial(ambient, &ambient.top_monomial(), 1)
    }

    pub fn ambient(&self) -> &Arc<AmbientSpace> {
        &self.ambient
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(m, c)| (&m[..], c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .iter()
            .find(|(m, _)| m.iter().all(|&e| e == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigInt::zero)
    }

    fn check_codim(&self, codim: i64) -> Result<()> {
        if codim < 0 || codim > self.ambient.dim as i64 {
            return Err(Error::CodimOutOfRange {
                codim,
                dim: self.ambient.dim,
            });
        }
        Ok(())
    }

    /// Graded piece of the given codimension.
    pub fn component(&self, codim: i64) -> Result<Self> {
        self.check_codim(codim)?;
        Ok(CycleClass {
            ambient: self.ambient.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| codim_of(m) == codim as u32)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    /// Sum of the components of codimension at least `codim`.
    pub fn truncate_below(&self, codim: u32) -> Self {
        CycleClass {
            ambient: self.ambient.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| codim_of(m) >= codim)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Codimensions that carry a nonzero component, ascending.
    pub fn codims(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|m| codim_of(m)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_homogeneous_of(&self, codim: u32) -> bool {
        self.terms.keys().all(|m| codim_of(m) == codim)
    }

    /// Integral over the ambient: the coefficient of the point class.
    pub fn degree(&self) -> BigInt {
        let top = self.ambient.top_monomial();
        self.terms
            .get(&top[..])
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn degree_i64(&self) -> i64 {
        self.degree().to_i64().expect("degree does not fit in i64")
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(BigInt::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Ok(CycleClass {
            ambient: self.ambient.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(CycleClass {
            ambient: self.ambient.clone(),
            terms: self.ambient.mul_terms(&self.terms, &other.terms),
        })
    }

    pub fn scale(&self, m: impl Into<BigInt>) -> Self {
        let m = m.into();
        if m.is_zero() {
            return Self::zero(&self.ambient);
        }
        CycleClass {
            ambient: self.ambient.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c * &m))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ambient);
        for _ in 0..k {
            if acc.is_zero() {
                break;
            }
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; the degree-0 part must be `+1` or `-1`.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.constant_term();
        if a0.abs() != BigInt::one() {
            return Err(Error::NotInvertible(a0.to_string()));
        }
        let one = Self::one(&self.ambient);
        // a0 * a = 1 + x with x nilpotent; a0^2 = 1
        let neg_x = &one - &self.scale(a0.clone());
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..self.ambient.dim {
            power = &power * &neg_x;
            if power.is_zero() {
                break;
            }
            acc += &power;
        }
        Ok(acc.scale(a0))
    }

    /// Flip the sign of every component of odd codimension.
    pub fn graded_sign_flip(&self) -> Self {
        CycleClass {
            ambient: self.ambient.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if codim_of(m) % 2 == 1 { -c } else { c.clone() };
                    (m.clone(), c)
                })
                .collect(),
        }
    }

    /// Same coefficients, reinterpreted on an equal ambient.
    pub fn rebase(&self, ambient: &Arc<AmbientSpace>) -> Result<Self> {
        if !same_ambient(&self.ambient, ambient) {
            return Err(mismatch(&self.ambient, ambient));
        }
        Ok(CycleClass {
            ambient: ambient.clone(),
            terms: self.terms.clone(),
        })
    }

    fn same(&self, other: &Self) -> Result<()> {
        if same_ambient(&self.ambient, &other.ambient) {
            Ok(())
        } else {
            Err(mismatch(&self.ambient, &other.ambient))
        }
    }

    pub fn parse(ambient: &Arc<AmbientSpace>, text: &str) -> Result<Self> {
        parse::parse_class(ambient, text)
    }
}

pub(crate) fn codim_of(m: &[u32]) -> u32 {
    m.iter().sum()
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut order: Vec<(&Monomial, &BigInt)> = self.terms.iter().collect();
        order.sort_by(|(a, _), (b, _)| codim_of(b).cmp(&codim_of(a)).then_with(|| b.cmp(a)));
        for (i, (m, c)) in order.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let factors: Vec<String> = m
                .iter()
                .zip(&self.ambient.names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| {
                    if *e == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycleClass({self} on {})", self.ambient)
    }
}

fn expect_same(a: &CycleClass, b: &CycleClass) {
    if let Err(e) = a.same(b) {
        panic!("{e}");
    }
}

impl Add for &CycleClass {
    type Output = CycleClass;
    fn add(self, rhs: &CycleClass) -> CycleClass {
        expect_same(self, rhs);
        self.checked_add(rhs).unwrap()
    }
}

impl Sub for &CycleClass {
    type Output = CycleClass;
    fn sub(self, rhs: &CycleClass) -> CycleClass {
        expect_same(self, rhs);
        self.checked_sub(rhs).unwrap()
    }
}

impl Mul for &CycleClass {
    type Output = CycleClass;
    fn mul(self, rhs: &CycleClass) -> CycleClass {
        expect_same(self, rhs);
        self.checked_mul(rhs).unwrap()
    }
}

impl Neg for &CycleClass {
    type Output = CycleClass;
    fn neg(self) -> CycleClass {
        CycleClass {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for CycleClass {
    type Output = CycleClass;
    fn neg(self) -> CycleClass {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<CycleClass> for CycleClass {
            type Output = CycleClass;
            fn $method(self, rhs: CycleClass) -> CycleClass {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycleClass> for CycleClass {
            type Output = CycleClass;
            fn $method(self, rhs: &CycleClass) -> CycleClass {
                (&self).$method(rhs)
            }
        }
        impl $tr<CycleClass> for &CycleClass {
            type Output = CycleClass;
            fn $method(self, rhs: CycleClass) -> CycleClass {
                self.$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<&CycleClass> for CycleClass {
    fn add_assign(&mut self, rhs: &CycleClass) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for CycleClass {
    /// Panics on an empty iterator: there is no ambient to put the zero in.
    fn sum<I: Iterator<Item = CycleClass>>(mut iter: I) -> CycleClass {
        let first = iter.next().expect("sum of an empty iterator of classes");
        iter.fold(first, |acc, x| &acc + &x)
    }
}

mod parse {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Int(BigInt),
        Ident(String),
        Plus,
        Minus,
        Star,
        Caret,
    }

    fn lex(text: &str) -> std::result::Result<Vec<Tok>, String> {
        let mut out = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                ' ' | '\t' | '\n' => i += 1,
                '+' => {
                    out.push(Tok::Plus);
                    i += 1
                }
                '-' => {
                    out.push(Tok::Minus);
                    i += 1
                }
                '*' => {
                    out.push(Tok::Star);
                    i += 1
                }
                '^' => {
                    out.push(Tok::Caret);
                    i += 1
                }
                d if d.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    out.push(Tok::Int(s.parse().unwrap()));
                }
                a if a.is_ascii_alphabetic() => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push(Tok::Ident(chars[start..i].iter().collect()));
                }
                other => return Err(format!("unexpected character `{other}`")),
            }
        }
        Ok(out)
    }

    pub(super) fn parse_class(ambient: &Arc<AmbientSpace>, text: &str) -> Result<CycleClass> {
        let err = |reason: String| Error::Parse {
            text: text.to_string(),
            reason,
        };
        let toks = lex(text).map_err(err)?;
        if toks.is_empty() {
            return Err(err("empty expression".into()));
        }
        let n = ambient.ngens();
        let mut raw: Vec<(Vec<u32>, BigInt)> = Vec::new();
        let mut pos = 0;
        let mut first = true;
        while pos < toks.len() {
            let mut sign = BigInt::one();
            match toks.get(pos) {
                Some(Tok::Plus) => pos += 1,
                Some(Tok::Minus) => {
                    sign = -sign;
                    pos += 1
                }
                _ if first => {}
                Some(t) => return Err(err(format!("expected `+` or `-`, found {t:?}"))),
                None => unreachable!(),
            }
            first = false;
            let mut coeff = sign;
            let mut exps = vec![0u32; n];
            let mut need_factor = true;
            while need_factor {
                match toks.get(pos) {
                    Some(Tok::Int(v)) => {
                        coeff *= v;
                        pos += 1;
                    }
                    Some(Tok::Ident(name)) => {
                        let idx =
                            ambient
                                .names
                                .iter()
                                .position(|g| g == name)
                                .ok_or_else(|| {
                                    err(format!(
                                        "unknown generator `{name}` (ambient has {})",
                                        ambient.names.join(", ")
                                    ))
                                })?;
                        pos += 1;
                        let mut e = 1u32;
                        if toks.get(pos) == Some(&Tok::Caret) {
                            pos += 1;
                            match toks.get(pos) {
                                Some(Tok::Int(v)) => {
                                    e = v
                                        .to_u32()
                                        .ok_or_else(|| err("exponent too large".into()))?;
                                    pos += 1;
                                }
                                _ => return Err(err("expected integer exponent after `^`".into())),
                            }
                        }
                        exps[idx] += e;
                    }
                    Some(t) => return Err(err(format!("expected factor, found {t:?}"))),
                    None => return Err(err("unexpected end of expression".into())),
                }
                if toks.get(pos) == Some(&Tok::Star) {
                    pos += 1;
                } else {
                    need_factor = false;
                }
            }
            raw.push((exps, coeff));
        }
        CycleClass::from_terms(ambient, raw)
    }
}
