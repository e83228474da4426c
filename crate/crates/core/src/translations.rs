//! Partial translations on a space and their induced 0/1 operators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::scalar::Scalar;
use crate::space::Space;

/// Injective map between two subsets of a space, with its displacement
/// bound max d(x, t(x)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialTranslation {
    /// (source, target) pairs, sorted by source.
    map: BTreeMap<usize, usize>,
    displacement: u64,
}

impl PartialTranslation {
    pub fn empty() -> Self {
        PartialTranslation {
            map: BTreeMap::new(),
            displacement: 0,
        }
    }

    /// Builds a translation from explicit pairs, checking injectivity.
    pub fn from_pairs(space: &Space, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut targets = BTreeMap::new();
        for &(src, dst) in pairs {
            if src >= space.len() || dst >= space.len() {
                return Err(Error::InvalidParameter(format!(
                    "pair ({src},{dst}) outside the space"
                )));
            }
            if map.insert(src, dst).is_some() {
                return Err(Error::NotInjective(format!(
                    "duplicate source {:?}",
                    space.id(src)
                )));
            }
            if targets.insert(dst, src).is_some() {
                return Err(Error::NotInjective(format!(
                    "duplicate target {:?}",
                    space.id(dst)
                )));
            }
        }
        let displacement = map
            .iter()
            .map(|(&s, &d)| space.dist(s, d))
            .max()
            .unwrap_or(0);
        Ok(PartialTranslation { map, displacement })
    }

    pub fn identity_on(space: &Space, set: &[usize]) -> Self {
        let pairs: Vec<(usize, usize)> = set.iter().map(|&x| (x, x)).collect();
        Self::from_pairs(space, &pairs).expect("identity is injective")
    }

    pub fn displacement(&self) -> u64 {
        self.displacement
    }

    pub fn domain(&self) -> Vec<usize> {
        self.map.keys().copied().collect()
    }

    pub fn range(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.map.values().copied().collect();
        r.sort_unstable();
        r
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&s, &d)| (s, d))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// Composition self after other, with the domain restricted to
    /// other^{-1}(dom(self) ∩ ran(other)). The empty composition is allowed.
    pub fn compose(&self, other: &Self, space: &Space) -> Self {
        let pairs: Vec<(usize, usize)> = other
            .pairs()
            .filter_map(|(x, mid)| self.apply(mid).map(|y| (x, y)))
            .collect();
        Self::from_pairs(space, &pairs).expect("composition of injective maps is injective")
    }

    /// Swaps domain and range; the displacement is unchanged.
    pub fn inverse(&self) -> Self {
        PartialTranslation {
            map: self.map.iter().map(|(&s, &d)| (d, s)).collect(),
            displacement: self.displacement,
        }
    }

    pub fn to_json(&self, space: &Space) -> serde_json::Value {
        serde_json::json!({
            "pairs": self.pairs()
                .map(|(s, d)| [space.id(s), space.id(d)])
                .collect::<Vec<_>>(),
            "displacement": self.displacement,
        })
    }

    pub fn from_json(v: &serde_json::Value, space: &Space) -> Result<Self> {
        let raw = v
            .get("pairs")
            .and_then(|p| p.as_array())
            .ok_or_else(|| Error::InvalidParameter("translation JSON missing 'pairs'".into()))?;
        let mut pairs = Vec::new();
        for p in raw {
            let pair = p
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::InvalidParameter("pair must be [src,dst]".into()))?;
            let src = pair[0]
                .as_str()
                .ok_or_else(|| Error::InvalidParameter("pair fields must be ids".into()))?;
            let dst = pair[1]
                .as_str()
                .ok_or_else(|| Error::InvalidParameter("pair fields must be ids".into()))?;
            pairs.push((space.index_of(src)?, space.index_of(dst)?));
        }
        Self::from_pairs(space, &pairs)
    }
}

/// The 0/1 operator V_t with (V_t)_{xy} = 1 iff x = t(y). Its propagation
/// equals the displacement, and rows/columns carry at most one nonzero.
pub fn to_operator<T: Scalar>(space: &Space, t: &PartialTranslation) -> SparseOperator<T> {
    let mut op = SparseOperator::zero(space.len());
    for (src, dst) in t.pairs() {
        op.set(dst, src, T::one());
    }
    op
}

/// Finite family of partial translations covering every pair at distance
/// <= R exactly once, built over an S-separated partition with S = 2R+1.
///
/// `t_ij` sends y in class j to the unique x in class i with d(x,y) <= R,
/// when such x exists. Returned in row-major (i, j) order.
pub fn tij_family(space: &Space, r: u64) -> Result<Vec<((usize, usize), PartialTranslation)>> {
    let sep = space.separated_partition(2 * r + 1)?;
    let classes = &sep.classes;
    let mut out = Vec::with_capacity(classes.len() * classes.len());
    for (i, ci) in classes.iter().enumerate() {
        for (j, cj) in classes.iter().enumerate() {
            let mut pairs = Vec::new();
            for &y in cj {
                // S > 2R forces at most one candidate
                let mut candidates = ci.iter().filter(|&&x| space.dist(x, y) <= r);
                if let Some(&x) = candidates.next() {
                    debug_assert!(candidates.next().is_none());
                    pairs.push((y, x));
                }
            }
            out.push(((i, j), PartialTranslation::from_pairs(space, &pairs)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_window, Family};
    use crate::RationalOperator;

    fn z10() -> Space {
        make_window(&Family::Z, 10).unwrap()
    }

    fn shift(space: &Space, lo: usize, hi: usize) -> PartialTranslation {
        let pairs: Vec<(usize, usize)> = (lo..hi).map(|x| (x, x + 1)).collect();
        PartialTranslation::from_pairs(space, &pairs).unwrap()
    }

    #[test]
    fn displacement_and_injectivity() {
        let s = z10();
        let id = PartialTranslation::identity_on(&s, &[2, 5, 7]);
        assert_eq!(id.displacement(), 0);
        let t = shift(&s, 0, 9);
        assert_eq!(t.displacement(), 1);
        let err = PartialTranslation::from_pairs(&s, &[(0, 1), (2, 1)]);
        assert!(matches!(err, Err(Error::NotInjective(_))));
    }

    #[test]
    fn compose_and_inverse() {
        let s = z10();
        let t = shift(&s, 0, 9);
        let tt = t.compose(&t, &s);
        assert_eq!(tt.domain(), (0..8).collect::<Vec<_>>());
        assert_eq!(tt.apply(3), Some(5));
        assert_eq!(tt.displacement(), 2);

        let round = t.inverse().compose(&t, &s);
        assert_eq!(round, PartialTranslation::identity_on(&s, &t.domain()));

        // disjoint dom/ran composes to the empty translation
        let a = PartialTranslation::from_pairs(&s, &[(0, 1)]).unwrap();
        let b = PartialTranslation::from_pairs(&s, &[(5, 6)]).unwrap();
        assert!(a.compose(&b, &s).is_empty());
        assert!(PartialTranslation::empty().inverse().is_empty());
    }

    #[test]
    fn operator_of_translation() {
        let s = make_window(&Family::Z, 3).unwrap();
        let t = shift(&s, 0, 2);
        let v: RationalOperator = to_operator(&s, &t);
        assert_eq!(v.support(), vec![(1, 0), (2, 1)]);
        assert_eq!(v.propagation(&s), 1);

        let vt: RationalOperator = to_operator(&s, &t.inverse());
        assert_eq!(v.transpose(), vt);
    }

    #[test]
    fn partial_isometry_relations() {
        let s = z10();
        let t = shift(&s, 2, 7);
        let v: RationalOperator = to_operator(&s, &t);
        let w: RationalOperator = to_operator(&s, &t.inverse());
        assert_eq!(
            w.mul(&v),
            RationalOperator::indicator(10, &t.domain())
        );
        assert_eq!(
            v.mul(&w),
            RationalOperator::indicator(10, &t.range())
        );
    }

    #[test]
    fn tij_family_covers_each_pair_once() {
        let s = z10();
        let fam = tij_family(&s, 1).unwrap();
        // classes mod 3 -> 9 translations
        assert_eq!(fam.len(), 9);
        for ((i, j), t) in &fam {
            if i == j {
                for (src, dst) in t.pairs() {
                    assert_eq!(src, dst);
                }
            }
        }
        // every pair at distance <= 1 matched exactly once
        for x in 0..10 {
            for y in 0..10 {
                if s.dist(x, y) <= 1 {
                    let hits = fam
                        .iter()
                        .filter(|(_, t)| t.apply(y) == Some(x))
                        .count();
                    assert_eq!(hits, 1, "pair ({x},{y})");
                }
            }
        }
        // t_{01} on the mod-3 classes: 1->0, 4->3, 7->6
        let t01 = &fam.iter().find(|((i, j), _)| (*i, *j) == (0, 1)).unwrap().1;
        assert_eq!(t01.apply(1), Some(0));
        assert_eq!(t01.apply(4), Some(3));
        assert_eq!(t01.apply(7), Some(6));
    }

    #[test]
    fn tij_family_r_zero_is_identities() {
        let s = z10();
        let fam = tij_family(&s, 0).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].1, PartialTranslation::identity_on(&s, &(0..10).collect::<Vec<_>>()));
    }

    #[test]
    fn tij_transpose_symmetry() {
        let s = z10();
        let fam = tij_family(&s, 1).unwrap();
        let get = |i: usize, j: usize| -> &PartialTranslation {
            &fam.iter().find(|((a, b), _)| (*a, *b) == (i, j)).unwrap().1
        };
        let n = (fam.len() as f64).sqrt() as usize;
        for i in 0..n {
            for j in 0..n {
                let vij: RationalOperator = to_operator(&s, get(i, j));
                let vji: RationalOperator = to_operator(&s, get(j, i));
                assert_eq!(vij.transpose(), vji);
            }
        }
    }

    #[test]
    fn operator_respects_composition() {
        let s = z10();
        let t1 = shift(&s, 0, 9);
        let t2 = PartialTranslation::from_pairs(&s, &[(3, 1), (4, 2), (9, 5)]).unwrap();
        let v1: RationalOperator = to_operator(&s, &t1);
        let v2: RationalOperator = to_operator(&s, &t2);
        let vc: RationalOperator = to_operator(&s, &t1.compose(&t2, &s));
        assert_eq!(v1.mul(&v2), vc);
    }
}
