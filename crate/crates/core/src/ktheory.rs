//! Ordered K₀ calculus for towers of finite groups.
//!
//! A [`TowerSpec`] describes a nested union of finite groups by the index of
//! each inclusion step (a finite prefix followed by a repeating cycle). The
//! invariants computed here are the supernatural number of the tower, the
//! coarse finiteness class, and a decidable calculus for equality and
//! positivity of K₀ classes represented as eventually periodic integer
//! sequences over the level-n blocks.
//!
//! Everything is exact integer arithmetic; verdicts are `Yes`/`No` only when
//! the answer is proved, with an honest `Undetermined` fallback.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::bigint::BigUint;
use num::integer::{gcd, lcm};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::Rational;

/// Tower of finite groups given by inclusion indices: step i has index
/// `prefix[i]` for i < prefix.len(), then the `cycle` repeats forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub prefix: Vec<u64>,
    pub cycle: Vec<u64>,
}

impl TowerSpec {
    pub fn new(prefix: Vec<u64>, cycle: Vec<u64>) -> Result<Self> {
        let t = TowerSpec { prefix, cycle };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidParameter("tower cycle must be nonempty".into()));
        }
        if self.prefix.iter().chain(&self.cycle).any(|&m| m == 0) {
            return Err(Error::InvalidParameter(
                "tower inclusion indices must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Index of inclusion step i.
    pub fn increment(&self, i: usize) -> u64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Order of the level-n group: the product of the first n indices.
    pub fn group_order(&self, n: usize) -> BigUint {
        (0..n).fold(BigUint::one(), |acc, i| acc * BigUint::from(self.increment(i)))
    }

    /// A tower is finite exactly when the repeating part is trivial.
    pub fn is_finite(&self) -> bool {
        self.cycle.iter().all(|&m| m == 1)
    }

    /// For a finite tower, the level past which the group stops growing.
    pub fn stable_level(&self) -> usize {
        self.prefix.len()
    }
}

// -- supernatural numbers -----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exponent {
    Finite(u32),
    Omega,
}

/// Formal product of prime powers with exponents in N ∪ {ω}; the least
/// common multiple of the group orders of a tower.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupernaturalNumber {
    pub factors: BTreeMap<u64, Exponent>,
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl SupernaturalNumber {
    pub fn from_tower(tower: &TowerSpec) -> Result<Self> {
        tower.validate()?;
        let mut factors: BTreeMap<u64, Exponent> = BTreeMap::new();
        for &m in &tower.prefix {
            for (p, e) in factorize(m) {
                let entry = factors.entry(p).or_insert(Exponent::Finite(0));
                if let Exponent::Finite(old) = *entry {
                    *entry = Exponent::Finite(old + e);
                }
            }
        }
        // a prime dividing any cycle index accumulates without bound
        for &m in &tower.cycle {
            for (p, _) in factorize(m) {
                factors.insert(p, Exponent::Omega);
            }
        }
        Ok(SupernaturalNumber { factors })
    }

    pub fn is_finite(&self) -> bool {
        self.factors
            .values()
            .all(|e| matches!(e, Exponent::Finite(_)))
    }

    /// Whether m divides the supernatural number.
    pub fn divides(&self, m: u64) -> bool {
        factorize(m).into_iter().all(|(p, e)| match self.factors.get(&p) {
            Some(Exponent::Omega) => true,
            Some(Exponent::Finite(f)) => *f >= e,
            None => false,
        })
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| match e {
                Exponent::Omega => format!("{p}^w"),
                Exponent::Finite(1) => format!("{p}"),
                Exponent::Finite(k) => format!("{p}^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

// -- coarse classification ----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum CoarseClass {
    Finite { order: String },
    Infinite,
}

/// Coarse type of the tower space: every infinite tower space falls in one
/// coarse equivalence class, every finite one in another.
pub fn coarse_class(tower: &TowerSpec) -> Result<CoarseClass> {
    tower.validate()?;
    if tower.is_finite() {
        Ok(CoarseClass::Finite {
            order: tower.group_order(tower.stable_level()).to_string(),
        })
    } else {
        Ok(CoarseClass::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerComparison {
    pub sn_left: String,
    pub sn_right: String,
    /// Supernatural numbers coincide.
    pub sn_equal: bool,
    /// Exists a bijective coarse equivalence of the tower spaces.
    pub bijective_coarse_equivalence: bool,
    /// K₀ groups isomorphic as scaled ordered groups with order unit.
    pub unit_ordered_k0_isomorphic: bool,
    /// Exists a coarse equivalence of the tower spaces.
    pub coarse_equivalence: bool,
    /// K₀ groups isomorphic as scaled ordered groups (unit ignored).
    pub ordered_k0_isomorphic: bool,
}

/// The rigidity dictionary for tower spaces: bijective coarse equivalence,
/// unit-preserving ordered K₀ isomorphism, and equality of supernatural
/// numbers are one condition; coarse equivalence and ordered K₀ isomorphism
/// only see whether the towers are finite or infinite.
pub fn compare_towers(a: &TowerSpec, b: &TowerSpec) -> Result<TowerComparison> {
    let sa = SupernaturalNumber::from_tower(a)?;
    let sb = SupernaturalNumber::from_tower(b)?;
    let sn_equal = sa == sb;
    let coarse = coarse_class(a)? == coarse_class(b)?
        || matches!(
            (coarse_class(a)?, coarse_class(b)?),
            (CoarseClass::Finite { .. }, CoarseClass::Finite { .. })
        );
    Ok(TowerComparison {
        sn_left: sa.to_string(),
        sn_right: sb.to_string(),
        sn_equal,
        bijective_coarse_equivalence: sn_equal,
        unit_ordered_k0_isomorphic: sn_equal,
        coarse_equivalence: coarse,
        ordered_k0_isomorphic: coarse,
    })
}

// -- K0 classes ---------------------------------------------------------------

/// K₀ class of the limit algebra, represented at level 0 as an eventually
/// periodic integer sequence over blocks: coordinate i carries
/// `preperiod[i]` for i < preperiod.len(), then `period` repeats forever.
///
/// Passing from level n to level n+1 sums blocks in groups of the inclusion
/// index ([`K0Class::push`]); two representations denote the same class when
/// they agree after pushing to a common level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K0Class {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl K0Class {
    pub fn new(preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidParameter("period must be nonempty".into()));
        }
        Ok(K0Class { preperiod, period })
    }

    pub fn from_i64(preperiod: &[i64], period: &[i64]) -> Result<Self> {
        Self::new(
            preperiod.iter().map(|&v| BigInt::from(v)).collect(),
            period.iter().map(|&v| BigInt::from(v)).collect(),
        )
    }

    pub fn zero() -> Self {
        K0Class {
            preperiod: vec![],
            period: vec![BigInt::zero()],
        }
    }

    /// The class of the identity: 1 in every block.
    pub fn order_unit() -> Self {
        K0Class {
            preperiod: vec![],
            period: vec![BigInt::one()],
        }
    }

    pub fn value(&self, i: usize) -> BigInt {
        if i < self.preperiod.len() {
            self.preperiod[i].clone()
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()].clone()
        }
    }

    pub fn is_zero_representation(&self) -> bool {
        self.preperiod.iter().all(|v| v.is_zero()) && self.period.iter().all(|v| v.is_zero())
    }

    pub fn is_nonneg_representation(&self) -> bool {
        self.preperiod.iter().all(|v| !v.is_negative())
            && self.period.iter().all(|v| !v.is_negative())
    }

    pub fn period_sum(&self) -> BigInt {
        self.period.iter().sum()
    }

    fn pointwise(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        let p = self.preperiod.len().max(other.preperiod.len());
        let l = lcm(self.period.len(), other.period.len());
        K0Class {
            preperiod: (0..p).map(|i| f(&self.value(i), &other.value(i))).collect(),
            period: (p..p + l)
                .map(|i| f(&self.value(i), &other.value(i)))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.pointwise(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.pointwise(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        K0Class {
            preperiod: self.preperiod.iter().map(|v| -v).collect(),
            period: self.period.iter().map(|v| -v).collect(),
        }
    }

    /// One level up: sum blocks in groups of m. The result is again
    /// eventually periodic with period length len / gcd(len, m).
    pub fn push(&self, m: u64) -> Self {
        let m = m as usize;
        assert!(m >= 1, "inclusion index must be >= 1");
        if m == 1 {
            return self.clone();
        }
        let p = self.preperiod.len().div_ceil(m);
        let l = self.period.len() / gcd(self.period.len(), m);
        let block = |j: usize| -> BigInt { (0..m).map(|t| self.value(j * m + t)).sum() };
        K0Class {
            preperiod: (0..p).map(block).collect(),
            period: (p..p + l).map(block).collect(),
        }
    }

    /// Representation of the same class at the given level of the tower.
    pub fn push_to_level(&self, tower: &TowerSpec, level: usize) -> Self {
        (0..level).fold(self.clone(), |c, i| c.push(tower.increment(i)))
    }
}

// -- decision procedures --------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub result: Answer,
    /// Level at which a Yes answer is witnessed.
    pub level: Option<u64>,
    pub reason: String,
}

impl Verdict {
    fn yes(level: usize, reason: impl Into<String>) -> Self {
        Verdict {
            result: Answer::Yes,
            level: Some(level as u64),
            reason: reason.into(),
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        Verdict {
            result: Answer::No,
            level: None,
            reason: reason.into(),
        }
    }

    fn undetermined(reason: impl Into<String>) -> Self {
        Verdict {
            result: Answer::Undetermined,
            level: None,
            reason: reason.into(),
        }
    }
}

/// Smallest level whose block size is at least `p` and divisible by `l`,
/// if one exists within `cap` levels.
fn aligned_level(tower: &TowerSpec, p: usize, l: usize, cap: usize) -> Option<usize> {
    let mut k = BigUint::one();
    for n in 0..=cap {
        if k >= BigUint::from(p) && (k.clone() % BigUint::from(l)).is_zero() {
            return Some(n);
        }
        k *= BigUint::from(tower.increment(n));
    }
    None
}

/// Sum of the first `count mod period-length` tail values of `d`, plus the
/// whole preperiod: the value of block 0 at an aligned level, assuming the
/// period sums to zero.
fn initial_block_correction(d: &K0Class, k: &BigUint) -> BigInt {
    let l = d.period.len();
    let partial = ((k - BigUint::from(d.preperiod.len())) % BigUint::from(l))
        .try_into()
        .map(|r: u64| r as usize)
        .unwrap_or(0);
    let pre: BigInt = d.preperiod.iter().sum();
    let tail: BigInt = d.period[..partial].iter().sum();
    pre + tail
}

fn decide_finite_tower(
    tower: &TowerSpec,
    d: &K0Class,
    accept: impl Fn(&K0Class) -> bool,
) -> Verdict {
    let mut c = d.clone();
    for level in 0..=tower.stable_level() {
        if accept(&c) {
            return Verdict::yes(level, "representation stabilizes on a finite tower");
        }
        c = c.push(tower.increment(level));
    }
    Verdict::no("representation is stable past the finite tower's top level")
}

/// Decides whether two K₀ class representations denote the same class:
/// whether their difference pushes to the zero representation at some level.
pub fn class_equal(tower: &TowerSpec, x: &K0Class, y: &K0Class, budget: usize) -> Result<Verdict> {
    tower.validate()?;
    let d = x.sub(y);
    if d.is_zero_representation() {
        return Ok(Verdict::yes(0, "representations are identical"));
    }
    let sigma = d.period_sum();
    if !sigma.is_zero() {
        return Ok(Verdict::no(format!(
            "difference has period sum {sigma} != 0, so some block is nonzero at every level"
        )));
    }
    if tower.is_finite() {
        return Ok(decide_finite_tower(tower, &d, K0Class::is_zero_representation));
    }
    let sn = SupernaturalNumber::from_tower(tower)?;
    let l = d.period.len();
    if sn.divides(l as u64) {
        if let Some(n) = aligned_level(tower, d.preperiod.len(), l, budget + 64) {
            let c = initial_block_correction(&d, &tower.group_order(n));
            return Ok(if c.is_zero() {
                Verdict::yes(n, "difference vanishes at the aligned level")
            } else {
                Verdict::no(format!(
                    "initial block correction {c} != 0 persists at every level"
                ))
            });
        }
    }
    // period length never divides a block size: scan within budget
    let mut c = d;
    for level in 0..=budget {
        if c.is_zero_representation() {
            return Ok(Verdict::yes(level, "difference vanishes within the scan budget"));
        }
        c = c.push(tower.increment(level));
    }
    Ok(Verdict::undetermined(format!(
        "no decision within {budget} levels"
    )))
}

/// Decides whether a K₀ class is positive (>= 0 in the ordered group):
/// whether it pushes to an entrywise nonnegative representation.
pub fn class_positive(tower: &TowerSpec, x: &K0Class, budget: usize) -> Result<Verdict> {
    tower.validate()?;
    if x.is_nonneg_representation() {
        return Ok(Verdict::yes(0, "representation is already nonnegative"));
    }
    let sigma = x.period_sum();
    if sigma.is_negative() {
        return Ok(Verdict::no(format!(
            "period sum {sigma} < 0 forces a negative block at every level"
        )));
    }
    if tower.is_finite() {
        return Ok(decide_finite_tower(tower, x, K0Class::is_nonneg_representation));
    }
    if sigma.is_zero() {
        let sn = SupernaturalNumber::from_tower(tower)?;
        let l = x.period.len();
        if sn.divides(l as u64) {
            if let Some(n) = aligned_level(tower, x.preperiod.len(), l, budget + 64) {
                let c = initial_block_correction(x, &tower.group_order(n));
                return Ok(if !c.is_negative() {
                    Verdict::yes(n, "tail blocks vanish and the initial block is nonnegative")
                } else {
                    Verdict::no(format!(
                        "initial block correction {c} < 0 persists at every level"
                    ))
                });
            }
        }
    }
    // sigma > 0 guarantees eventual positivity; sigma = 0 without alignment
    // may still become nonnegative within the budget
    let mut c = x.clone();
    for level in 0..=budget {
        if c.is_nonneg_representation() {
            return Ok(Verdict::yes(level, "nonnegative within the scan budget"));
        }
        c = c.push(tower.increment(level));
    }
    Ok(Verdict::undetermined(format!(
        "no decision within {budget} levels"
    )))
}

// -- idempotents over tower windows --------------------------------------------

/// K₀ class of an idempotent over a tower window, read off block by block at
/// the given level: entry b is the rank of the restriction of `op` to block b
/// (blocks of size `group_order(block_level)`), padded by zeros.
///
/// Requires `op` idempotent and block-diagonal for that block structure.
pub fn idempotent_class(
    op: &SparseOperator<Rational>,
    tower: &TowerSpec,
    block_level: usize,
) -> Result<K0Class> {
    tower.validate()?;
    let bs: usize = tower
        .group_order(block_level)
        .try_into()
        .map_err(|_| Error::InvalidParameter("block size too large".into()))?;
    if bs == 0 || !op.dim().is_multiple_of(bs) {
        return Err(Error::Precondition(format!(
            "operator dimension {} is not a multiple of the block size {bs}",
            op.dim()
        )));
    }
    if !op.is_idempotent() {
        return Err(Error::Precondition("operator is not idempotent".into()));
    }
    if op.iter().any(|(x, y, _)| x / bs != y / bs) {
        return Err(Error::Precondition(
            "operator is not block-diagonal at this level".into(),
        ));
    }
    let mut entries = Vec::with_capacity(op.dim() / bs);
    for b in 0..op.dim() / bs {
        let block: Vec<usize> = (b * bs..(b + 1) * bs).collect();
        let tr = op.restrict(&block).trace();
        if !tr.is_integer() || tr.is_negative() {
            return Err(Error::IdentityFailed(format!(
                "block {b} has non-rank trace {tr}"
            )));
        }
        entries.push(tr.to_integer());
    }
    K0Class::new(entries, vec![BigInt::zero()])
}

// -- independent oracle ----------------------------------------------------------

/// Truncated-limit oracle: expands the representation coordinate by
/// coordinate, sums blocks of size group_order(top_level) directly, and
/// inspects enough blocks to cover the full phase period. Because pushing
/// preserves both the zero and the nonnegative cones, a class decided Yes at
/// any level <= top_level must be accepted here.
pub struct TruncatedLimitOracle {
    pub top_level: usize,
}

impl TruncatedLimitOracle {
    fn block_sums(&self, tower: &TowerSpec, x: &K0Class) -> Result<Vec<BigInt>> {
        tower.validate()?;
        let k: usize = tower
            .group_order(self.top_level)
            .try_into()
            .map_err(|_| Error::InvalidParameter("top level block size too large".into()))?;
        if k == 0 {
            return Err(Error::InvalidParameter("empty oracle block".into()));
        }
        // prefix sums let each block be summed in O(1); sum over [s, e)
        let mut pre_ps = vec![BigInt::zero()];
        for v in &x.preperiod {
            pre_ps.push(pre_ps.last().expect("nonempty") + v);
        }
        let mut per_ps = vec![BigInt::zero()];
        for v in &x.period {
            per_ps.push(per_ps.last().expect("nonempty") + v);
        }
        let p = x.preperiod.len();
        let l = x.period.len();
        let tail_sum = |count: usize| -> BigInt {
            let full = BigInt::from(count / l) * per_ps.last().expect("nonempty");
            full + &per_ps[count % l]
        };
        let range_sum = |s: usize, e: usize| -> BigInt {
            let pre = &pre_ps[e.min(p)] - &pre_ps[s.min(p)];
            let tail = tail_sum(e.saturating_sub(p)) - tail_sum(s.saturating_sub(p));
            pre + tail
        };
        let blocks = x.preperiod.len().div_ceil(k) + x.period.len();
        Ok((0..blocks).map(|b| range_sum(b * k, (b + 1) * k)).collect())
    }

    /// Whether the class is zero when viewed at `top_level`.
    pub fn is_zero(&self, tower: &TowerSpec, x: &K0Class) -> Result<bool> {
        Ok(self.block_sums(tower, x)?.iter().all(|v| v.is_zero()))
    }

    /// Whether the class is nonnegative when viewed at `top_level`.
    pub fn is_nonneg(&self, tower: &TowerSpec, x: &K0Class) -> Result<bool> {
        Ok(self
            .block_sums(tower, x)?
            .iter()
            .all(|v| !v.is_negative()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::RationalOperator;

    fn tower(prefix: &[u64], cycle: &[u64]) -> TowerSpec {
        TowerSpec::new(prefix.to_vec(), cycle.to_vec()).unwrap()
    }

    #[test]
    fn tower_validation_and_orders() {
        assert!(TowerSpec::new(vec![], vec![]).is_err());
        assert!(TowerSpec::new(vec![0], vec![2]).is_err());
        let t = tower(&[], &[2]);
        assert_eq!(t.group_order(3), BigUint::from(8u32));
        let t = tower(&[6], &[1]);
        assert_eq!(t.group_order(1), BigUint::from(6u32));
        assert_eq!(t.group_order(5), BigUint::from(6u32));
        assert!(t.is_finite());
        assert!(!tower(&[], &[2, 3]).is_finite());
    }

    #[test]
    fn supernatural_numbers() {
        let s = SupernaturalNumber::from_tower(&tower(&[], &[2])).unwrap();
        assert_eq!(s.to_string(), "2^w");
        assert!(s.divides(8));
        assert!(!s.divides(3));

        let s = SupernaturalNumber::from_tower(&tower(&[6], &[1])).unwrap();
        assert_eq!(s.to_string(), "2*3");
        assert!(s.is_finite());
        assert!(s.divides(6));
        assert!(!s.divides(4));

        let s = SupernaturalNumber::from_tower(&tower(&[], &[2, 3])).unwrap();
        assert_eq!(s.to_string(), "2^w*3^w");
        assert!(s.divides(12));
    }

    #[test]
    fn doubling_and_quadrupling_agree() {
        let cmp = compare_towers(&tower(&[], &[2]), &tower(&[], &[4])).unwrap();
        assert!(cmp.sn_equal);
        assert!(cmp.bijective_coarse_equivalence);
        assert!(cmp.unit_ordered_k0_isomorphic);
        assert!(cmp.coarse_equivalence);
        assert!(cmp.ordered_k0_isomorphic);
    }

    #[test]
    fn doubling_vs_six_mixed() {
        let cmp = compare_towers(&tower(&[], &[2]), &tower(&[], &[6])).unwrap();
        assert!(!cmp.sn_equal);
        assert!(!cmp.bijective_coarse_equivalence);
        assert!(!cmp.unit_ordered_k0_isomorphic);
        assert!(cmp.coarse_equivalence);
        assert!(cmp.ordered_k0_isomorphic);
    }

    #[test]
    fn finite_vs_infinite_all_false() {
        let cmp = compare_towers(&tower(&[4], &[1]), &tower(&[], &[2])).unwrap();
        assert!(!cmp.sn_equal);
        assert!(!cmp.bijective_coarse_equivalence);
        assert!(!cmp.coarse_equivalence);
        assert!(!cmp.ordered_k0_isomorphic);
    }

    #[test]
    fn two_finite_towers_coarse_but_not_bijective() {
        let cmp = compare_towers(&tower(&[4], &[1]), &tower(&[8], &[1])).unwrap();
        assert!(!cmp.sn_equal);
        assert!(!cmp.bijective_coarse_equivalence);
        assert!(cmp.coarse_equivalence);
    }

    #[test]
    fn push_examples() {
        let x = K0Class::from_i64(&[1], &[1, -1]).unwrap();
        let y = x.push(2);
        assert_eq!(y, K0Class::from_i64(&[2], &[0]).unwrap());
        // pushing by 1 is the identity
        assert_eq!(x.push(1), x);
        // the unit sums to the block size
        let u = K0Class::order_unit();
        assert_eq!(u.push(3), K0Class::from_i64(&[], &[3]).unwrap());
    }

    #[test]
    fn class_arithmetic() {
        let x = K0Class::from_i64(&[1, 2], &[3]).unwrap();
        let y = K0Class::from_i64(&[1], &[1, 2]).unwrap();
        let s = x.add(&y);
        assert_eq!(s.value(0), BigInt::from(2));
        assert_eq!(s.value(1), BigInt::from(3));
        // x is 3 from index 2 on; y alternates 1,2 from index 1 on
        assert_eq!(s.value(2), BigInt::from(5));
        assert_eq!(s.value(3), BigInt::from(4));
        assert_eq!(s.value(4), BigInt::from(5));
        assert!(x.sub(&x).is_zero_representation());
        assert_eq!(x.neg().add(&x), x.sub(&x));
    }

    #[test]
    fn equal_detects_nonzero_period_sum() {
        let t = tower(&[], &[2]);
        let x = K0Class::from_i64(&[], &[1]).unwrap();
        let v = class_equal(&t, &x, &K0Class::zero(), 10).unwrap();
        assert_eq!(v.result, Answer::No);
    }

    #[test]
    fn equal_aligned_level_correction() {
        // preperiod (1), period (1,-1): aligned blocks vanish but block 0
        // carries correction 2, so the class is nonzero
        let t = tower(&[], &[2]);
        let x = K0Class::from_i64(&[1], &[1, -1]).unwrap();
        let v = class_equal(&t, &x, &K0Class::zero(), 10).unwrap();
        assert_eq!(v.result, Answer::No);
        assert!(v.reason.contains('2'), "reason: {}", v.reason);
        // but the same class is positive
        let v = class_positive(&t, &x, 10).unwrap();
        assert_eq!(v.result, Answer::Yes);
    }

    #[test]
    fn equal_yes_cases() {
        let t = tower(&[], &[2]);
        // (1,-1) repeating cancels in blocks of 2
        let x = K0Class::from_i64(&[], &[1, -1]).unwrap();
        let v = class_equal(&t, &x, &K0Class::zero(), 10).unwrap();
        assert_eq!(v.result, Answer::Yes);
        assert_eq!(v.level, Some(1));
        // two representations of the unit
        let u = K0Class::order_unit();
        let u2 = u.push_to_level(&t, 3);
        // u2 lives at level 3; it is NOT equal to u as a level-0 sequence
        let v = class_equal(&t, &u2, &K0Class::from_i64(&[], &[8]).unwrap(), 10).unwrap();
        assert_eq!(v.result, Answer::Yes);
    }

    #[test]
    fn positivity_rules() {
        let t = tower(&[], &[2]);
        // negative period sum: never positive
        let x = K0Class::from_i64(&[5], &[-1]).unwrap();
        assert_eq!(class_positive(&t, &x, 10).unwrap().result, Answer::No);
        // positive period sum swallows a negative preperiod
        let x = K0Class::from_i64(&[-3], &[1]).unwrap();
        let v = class_positive(&t, &x, 32).unwrap();
        assert_eq!(v.result, Answer::Yes);
        // sigma = 0 aligned with negative correction
        let x = K0Class::from_i64(&[-1], &[1, -1]).unwrap();
        // correction = -1 + period[0] = 0 -> nonnegative
        let v = class_positive(&t, &x, 10).unwrap();
        assert_eq!(v.result, Answer::Yes);
        let x = K0Class::from_i64(&[-3], &[1, -1]).unwrap();
        let v = class_positive(&t, &x, 10).unwrap();
        assert_eq!(v.result, Answer::No);
    }

    #[test]
    fn finite_tower_decisions() {
        let t = tower(&[2], &[1]);
        let x = K0Class::from_i64(&[1, -1], &[0]).unwrap();
        let v = class_equal(&t, &x, &K0Class::zero(), 10).unwrap();
        assert_eq!(v.result, Answer::Yes);
        assert_eq!(v.level, Some(1));
        let x = K0Class::from_i64(&[1, -2], &[0]).unwrap();
        let v = class_equal(&t, &x, &K0Class::zero(), 10).unwrap();
        assert_eq!(v.result, Answer::No);
    }

    #[test]
    fn misaligned_period_undetermined() {
        // period length 3 never divides a power of 2 and the sequence never
        // cancels, so the scan gives up honestly
        let t = tower(&[], &[2]);
        let x = K0Class::from_i64(&[], &[1, -2, 1]).unwrap();
        let v = class_equal(&t, &x, &K0Class::zero(), 8).unwrap();
        assert_eq!(v.result, Answer::Undetermined);
    }

    #[test]
    fn oracle_matches_decisions() {
        let t = tower(&[], &[2]);
        let oracle = TruncatedLimitOracle { top_level: 12 };
        let cases = [
            K0Class::from_i64(&[], &[1, -1]).unwrap(),
            K0Class::from_i64(&[1], &[1, -1]).unwrap(),
            K0Class::from_i64(&[2, -1, -1], &[0]).unwrap(),
            K0Class::from_i64(&[], &[2]).unwrap(),
        ];
        for x in &cases {
            let v = class_equal(&t, x, &K0Class::zero(), 12).unwrap();
            match v.result {
                Answer::Yes => assert!(oracle.is_zero(&t, x).unwrap()),
                Answer::No => assert!(!oracle.is_zero(&t, x).unwrap()),
                Answer::Undetermined => {}
            }
            let v = class_positive(&t, x, 12).unwrap();
            match v.result {
                Answer::Yes => {
                    if v.level.unwrap() <= 12 {
                        assert!(oracle.is_nonneg(&t, x).unwrap());
                    }
                }
                Answer::No => assert!(!oracle.is_nonneg(&t, x).unwrap()),
                Answer::Undetermined => {}
            }
        }
    }

    #[test]
    fn idempotent_class_of_indicator() {
        let t = tower(&[], &[2]);
        // window of order 8, blocks of size 2 at level 1
        let p = RationalOperator::indicator(8, &[0, 1, 2]);
        let c = idempotent_class(&p, &t, 1).unwrap();
        assert_eq!(c, K0Class::from_i64(&[2, 1, 0, 0], &[0]).unwrap());
        // non-idempotent rejected
        let a = RationalOperator::from_entries(8, [(0, 0, rat(2))]).unwrap();
        assert!(idempotent_class(&a, &t, 1).is_err());
        // idempotent with off-block support rejected: e_00 + e_03
        let b = RationalOperator::unit(8, 0, 0).add(&RationalOperator::unit(8, 0, 3));
        assert!(b.is_idempotent());
        assert!(idempotent_class(&b, &t, 1).is_err());
    }

    #[test]
    fn json_round_trips() {
        let t = tower(&[6], &[2, 3]);
        let j = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<TowerSpec>(&j).unwrap(), t);
        let x = K0Class::from_i64(&[1, -2], &[3]).unwrap();
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<K0Class>(&j).unwrap(), x);
        let v = Verdict::yes(3, "test");
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["result"], "yes");
        assert_eq!(j["level"], 3);
    }
}
