//! Finite windows of bounded-geometry metric spaces and their coarse
//! decompositions.
//!
//! A [`Space`] is an honest finite metric space with an exact nonnegative
//! integer metric, tagged with the infinite family it is a window of. No
//! attempt is made to model the infinite space beyond the family tag and the
//! interior designation of [`Space::interior`].

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ktheory::TowerSpec;

/// Which infinite family a window was cut from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    ZWindow { n: u64 },
    ZdWindow { d: u32, n: u64 },
    FreeGroupBall { gens: u32, radius: u64 },
    GapUnion { sizes: Vec<u64>, gaps: Vec<u64> },
    TowerGroupWindow { tower: TowerSpec, level: u32 },
    Explicit,
}

/// Specification of a built-in family, before a window size is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Z,
    Zd { d: u32 },
    FreeGroup { gens: u32 },
    GapUnion { sizes: Vec<u64>, gaps: Vec<u64> },
    TowerGroup { tower: TowerSpec },
    /// Explicit metric table; `metric` is dense lower-triangular, row-major,
    /// diagonal included.
    Explicit { ids: Vec<String>, metric: Vec<u64> },
}

/// Finite point set with an exact integer metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    ids: Vec<String>,
    /// Lower-triangular distance table, row-major, diagonal included.
    metric: Vec<u64>,
    family: FamilyTag,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpaceJson {
    family_tag: FamilyTag,
    points: Vec<String>,
    metric: Vec<u64>,
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceJson {
            family_tag: self.family.clone(),
            points: self.ids.clone(),
            metric: self.metric.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SpaceJson::deserialize(d)?;
        Space::from_table(raw.points, raw.metric, raw.family_tag).map_err(serde::de::Error::custom)
    }
}

fn tri_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl Space {
    /// Builds a space from an explicit lower-triangular metric table,
    /// validating the metric axioms.
    pub fn from_table(ids: Vec<String>, metric: Vec<u64>, family: FamilyTag) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidParameter("space must be nonempty".into()));
        }
        if metric.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidMetric(format!(
                "expected {} lower-triangular entries for {} points, got {}",
                n * (n + 1) / 2,
                n,
                metric.len()
            )));
        }
        let mut seen = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if seen.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidMetric(format!("duplicate point id {id:?}")));
            }
        }
        let space = Space { ids, metric, family };
        for i in 0..n {
            if space.dist(i, i) != 0 {
                return Err(Error::InvalidMetric(format!(
                    "d(x,x) != 0 at point {:?}",
                    space.ids[i]
                )));
            }
            for j in 0..i {
                if space.dist(i, j) == 0 {
                    return Err(Error::InvalidMetric(format!(
                        "d(x,y) = 0 for distinct points {:?}, {:?}",
                        space.ids[i], space.ids[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if space.dist(i, j) > space.dist(i, k) + space.dist(k, j) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails on ({:?},{:?},{:?})",
                            space.ids[i], space.ids[j], space.ids[k]
                        )));
                    }
                }
            }
        }
        Ok(space)
    }

    fn from_coords_unchecked<F>(ids: Vec<String>, family: FamilyTag, dist: F) -> Self
    where
        F: Fn(usize, usize) -> u64,
    {
        let n = ids.len();
        let mut metric = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                metric.push(dist(i, j));
            }
        }
        Space { ids, metric, family }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn family(&self) -> &FamilyTag {
        &self.family
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn dist(&self, i: usize, j: usize) -> u64 {
        self.metric[tri_index(i, j)]
    }

    /// Closed ball of radius `r` around `x`, as point indices.
    pub fn ball(&self, x: usize, r: u64) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.dist(x, y) <= r).collect()
    }

    pub fn dist_to_set(&self, x: usize, set: &[usize]) -> Option<u64> {
        set.iter().map(|&y| self.dist(x, y)).min()
    }

    pub fn diameter_of(&self, set: &[usize]) -> u64 {
        let mut d = 0;
        for (k, &x) in set.iter().enumerate() {
            for &y in &set[k + 1..] {
                d = d.max(self.dist(x, y));
            }
        }
        d
    }

    /// Closed r-neighborhood of a point set.
    pub fn neighborhood(&self, set: &[usize], r: u64) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.dist_to_set(x, set).map(|d| d <= r).unwrap_or(false))
            .collect()
    }

    /// Max ball size at each requested radius.
    pub fn growth_profile(&self, radii: &[u64]) -> Vec<usize> {
        radii
            .iter()
            .map(|&r| {
                (0..self.len())
                    .map(|x| self.ball(x, r).len())
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Equivalence classes of the relation generated by `d(x,y) <= r`.
    /// `r = 0` yields singletons.
    pub fn r_components(&self, r: u64) -> Partition {
        let mut uf = UnionFind::new(self.len());
        if r > 0 {
            for i in 0..self.len() {
                for j in 0..i {
                    if self.dist(i, j) <= r {
                        uf.unite(i, j);
                    }
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.len() {
            classes.entry(uf.find(i)).or_default().push(i);
        }
        let mut classes: Vec<Vec<usize>> = classes.into_values().collect();
        // deterministic order: by smallest member
        classes.sort_by_key(|c| c[0]);
        Partition {
            parameter: r,
            classes,
        }
    }

    /// Greedy first-fit partition into S-separated classes, following the
    /// stored point order. Within a class, distinct points are at distance
    /// >= S.
    pub fn separated_partition(&self, s: u64) -> Result<SeparatedPartition> {
        if s < 1 {
            return Err(Error::InvalidParameter("separation must be >= 1".into()));
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.len() {
            let slot = classes
                .iter()
                .position(|c| c.iter().all(|&y| self.dist(x, y) >= s));
            match slot {
                Some(k) => classes[k].push(x),
                None => classes.push(vec![x]),
            }
        }
        Ok(SeparatedPartition {
            separation: s,
            classes,
        })
    }

    /// Points whose ambient ball of radius `r` lies inside the window.
    ///
    /// For families where the window is the whole intended space
    /// (`GapUnion`, `Explicit`), every point is interior.
    pub fn interior(&self, r: u64) -> Vec<usize> {
        match &self.family {
            FamilyTag::ZWindow { n } => (0..self.len())
                .filter(|&i| {
                    let x = i as u64;
                    x >= r && x + r < *n
                })
                .collect(),
            FamilyTag::ZdWindow { n, .. } => (0..self.len())
                .filter(|&i| {
                    self.ids[i]
                        .split(',')
                        .all(|c| {
                            let x: u64 = c.parse().unwrap();
                            x >= r && x + r < *n
                        })
                })
                .collect(),
            FamilyTag::FreeGroupBall { radius, .. } => (0..self.len())
                .filter(|&i| word_len(&self.ids[i]) + r <= *radius)
                .collect(),
            FamilyTag::TowerGroupWindow { level, .. } => {
                if r <= u64::from(*level) {
                    (0..self.len()).collect()
                } else {
                    Vec::new()
                }
            }
            FamilyTag::GapUnion { .. } | FamilyTag::Explicit => (0..self.len()).collect(),
        }
    }
}

/// Partition of the point set, remembering the parameter that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub parameter: u64,
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn to_json(&self, space: &Space) -> serde_json::Value {
        serde_json::json!({
            "parameter": self.parameter,
            "classes": self.classes.iter()
                .map(|c| c.iter().map(|&i| space.id(i)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    /// Index of the class containing each point.
    pub fn class_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (k, c) in self.classes.iter().enumerate() {
            for &x in c {
                out[x] = k;
            }
        }
        out
    }
}

/// Partition into classes that are pairwise `separation`-separated inside
/// each class (distance >= separation between distinct members).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedPartition {
    pub separation: u64,
    pub classes: Vec<Vec<usize>>,
}

impl SeparatedPartition {
    pub fn verify(&self, space: &Space) -> Result<()> {
        let mut covered = vec![false; space.len()];
        for c in &self.classes {
            for (k, &x) in c.iter().enumerate() {
                if covered[x] {
                    return Err(Error::BadCertificate("classes overlap".into()));
                }
                covered[x] = true;
                for &y in &c[k + 1..] {
                    if space.dist(x, y) < self.separation {
                        return Err(Error::BadCertificate(format!(
                            "points {:?},{:?} at distance {} < {}",
                            space.id(x),
                            space.id(y),
                            space.dist(x, y),
                            self.separation
                        )));
                    }
                }
            }
        }
        if covered.iter().any(|&c| !c) {
            return Err(Error::BadCertificate("classes do not cover".into()));
        }
        Ok(())
    }
}

/// Two-colour decomposition witnessing asymptotic dimension at most one:
/// pieces within each colour are pairwise at distance > r, and every piece
/// has diameter <= bound. Between-piece separation uses strict `> r`; the
/// within-class convention of [`SeparatedPartition`] uses `>= S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UVDecomposition {
    pub u_pieces: Vec<Vec<usize>>,
    pub v_pieces: Vec<Vec<usize>>,
    pub r: u64,
    pub bound: u64,
}

impl UVDecomposition {
    pub fn verify(&self, space: &Space) -> Result<()> {
        let mut covered = vec![false; space.len()];
        for piece in self.u_pieces.iter().chain(&self.v_pieces) {
            if piece.is_empty() {
                return Err(Error::BadCertificate("empty piece".into()));
            }
            for &x in piece {
                if covered[x] {
                    return Err(Error::BadCertificate("pieces overlap".into()));
                }
                covered[x] = true;
            }
            if space.diameter_of(piece) > self.bound {
                return Err(Error::BadCertificate(format!(
                    "piece diameter {} exceeds bound {}",
                    space.diameter_of(piece),
                    self.bound
                )));
            }
        }
        if covered.iter().any(|&c| !c) {
            return Err(Error::BadCertificate("pieces do not cover".into()));
        }
        for family in [&self.u_pieces, &self.v_pieces] {
            for (a, pa) in family.iter().enumerate() {
                for pb in &family[a + 1..] {
                    let min = pa
                        .iter()
                        .flat_map(|&x| pb.iter().map(move |&y| space.dist(x, y)))
                        .min()
                        .unwrap();
                    if min <= self.r {
                        return Err(Error::BadCertificate(format!(
                            "same-colour pieces at distance {} <= r = {}",
                            min, self.r
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the window of the named family at the given size.
///
/// The size parameter means: point count for `Z`, side length for `Zd`, ball
/// radius for `FreeGroup`, block count for `GapUnion`, and tower level for
/// `TowerGroup`. `TowerGroup` windows use d(g,h) = min{n : g^{-1}h in
/// Gamma_n}.
pub fn make_window(family: &Family, size: u64) -> Result<Space> {
    // radius-0 free-group balls and level-0 towers are the one-point space
    if size < 1
        && !matches!(
            family,
            Family::TowerGroup { .. } | Family::Explicit { .. } | Family::FreeGroup { .. }
        )
    {
        return Err(Error::InvalidParameter("window size must be >= 1".into()));
    }
    match family {
        Family::Z => {
            let ids: Vec<String> = (0..size).map(|x| x.to_string()).collect();
            Ok(Space::from_coords_unchecked(
                ids,
                FamilyTag::ZWindow { n: size },
                move |i, j| (i as i64 - j as i64).unsigned_abs(),
            ))
        }
        Family::Zd { d } => {
            let d = *d;
            if d == 0 {
                return Err(Error::InvalidParameter("dimension must be >= 1".into()));
            }
            let mut coords: Vec<Vec<u64>> = vec![vec![]];
            for _ in 0..d {
                coords = coords
                    .into_iter()
                    .flat_map(|c| {
                        (0..size).map(move |x| {
                            let mut c2 = c.clone();
                            c2.push(x);
                            c2
                        })
                    })
                    .collect();
            }
            let ids: Vec<String> = coords
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            let cs = coords.clone();
            Ok(Space::from_coords_unchecked(
                ids,
                FamilyTag::ZdWindow { d, n: size },
                move |i, j| {
                    cs[i]
                        .iter()
                        .zip(&cs[j])
                        .map(|(&a, &b)| a.abs_diff(b))
                        .sum()
                },
            ))
        }
        Family::FreeGroup { gens } => {
            let gens = *gens;
            if gens == 0 {
                return Err(Error::InvalidParameter("need at least one generator".into()));
            }
            let words = free_group_ball(gens, size);
            let ids: Vec<String> = words.iter().map(word_id).collect();
            let ws = words.clone();
            Ok(Space::from_coords_unchecked(
                ids,
                FamilyTag::FreeGroupBall { gens, radius: size },
                move |i, j| word_dist(&ws[i], &ws[j]),
            ))
        }
        Family::GapUnion { sizes, gaps } => {
            let take = (size as usize).min(sizes.len());
            gap_union(&sizes[..take], gaps)
        }
        Family::TowerGroup { tower } => tower_window(tower, size as u32),
        Family::Explicit { ids, metric } => {
            Space::from_table(ids.clone(), metric.clone(), FamilyTag::Explicit)
        }
    }
}

/// Disjoint union of integer intervals on a line, with d(X_{k+1}, earlier
/// blocks) equal to the k-th gap.
pub fn gap_union(sizes: &[u64], gaps: &[u64]) -> Result<Space> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "block sizes must be nonempty and positive".into(),
        ));
    }
    if gaps.len() + 1 < sizes.len() {
        return Err(Error::InvalidParameter(format!(
            "need at least {} gaps for {} blocks",
            sizes.len() - 1,
            sizes.len()
        )));
    }
    let used = &gaps[..sizes.len().saturating_sub(1)];
    if used.windows(2).any(|w| w[1] <= w[0]) || used.contains(&0) {
        return Err(Error::InvalidParameter(
            "gap rule must be positive and strictly increasing".into(),
        ));
    }
    let mut coords = Vec::new();
    let mut blocks = Vec::new();
    let mut start: u64 = 0;
    for (k, &sz) in sizes.iter().enumerate() {
        let block: Vec<u64> = (start..start + sz).collect();
        coords.extend(block.iter().copied());
        blocks.push(block);
        if k + 1 < sizes.len() {
            start = start + sz - 1 + used[k];
        }
    }
    let ids: Vec<String> = coords.iter().map(|x| x.to_string()).collect();
    let cs = coords.clone();
    Ok(Space::from_coords_unchecked(
        ids,
        FamilyTag::GapUnion {
            sizes: sizes.to_vec(),
            gaps: used.to_vec(),
        },
        move |i, j| cs[i].abs_diff(cs[j]),
    ))
}

/// Block index sets of a gap-union space: block k holds the points of the
/// k-th interval, in stored order.
pub fn gap_blocks(space: &Space) -> Result<Vec<Vec<usize>>> {
    match space.family() {
        FamilyTag::GapUnion { sizes, .. } => {
            let mut out = Vec::new();
            let mut at = 0usize;
            for &sz in sizes {
                out.push((at..at + sz as usize).collect());
                at += sz as usize;
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParameter(
            "expected a gap_union space".into(),
        )),
    }
}

fn tower_window(tower: &TowerSpec, level: u32) -> Result<Space> {
    tower.validate()?;
    let incs: Vec<u64> = (0..level as usize).map(|i| tower.increment(i)).collect();
    let total: u64 = incs.iter().product();
    if total > 100_000 {
        return Err(Error::InvalidParameter(format!(
            "tower window of order {total} is too large"
        )));
    }
    // digit 1 runs fastest, so Gamma_m-cosets are contiguous blocks of size k_m
    let mut digits: Vec<Vec<u64>> = Vec::with_capacity(total as usize);
    for m in 0..total {
        let mut v = Vec::with_capacity(incs.len());
        let mut rest = m;
        for &r in &incs {
            v.push(rest % r);
            rest /= r;
        }
        digits.push(v);
    }
    let ids: Vec<String> = digits
        .iter()
        .map(|v| {
            if v.is_empty() {
                "e".to_string()
            } else {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            }
        })
        .collect();
    let ds = digits.clone();
    Ok(Space::from_coords_unchecked(
        ids,
        FamilyTag::TowerGroupWindow {
            tower: tower.clone(),
            level,
        },
        move |i, j| {
            // d(g,h) = min{n : g^{-1}h in Gamma_n} = largest differing digit index
            ds[i]
                .iter()
                .zip(&ds[j])
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(k, _)| k as u64 + 1)
                .max()
                .unwrap_or(0)
        },
    ))
}

// -- free group words ------------------------------------------------------

/// Reduced word over generators 1..=gens; negative = inverse.
type Word = Vec<i32>;

fn free_group_ball(gens: u32, radius: u64) -> Vec<Word> {
    let letters: Vec<i32> = (1..=gens as i32).flat_map(|g| [g, -g]).collect();
    let mut out: Vec<Word> = vec![vec![]];
    let mut frontier: Vec<Word> = vec![vec![]];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last().copied() == Some(-l) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn word_dist(u: &Word, v: &Word) -> u64 {
    let lcp = u.iter().zip(v).take_while(|(a, b)| a == b).count();
    (u.len() + v.len() - 2 * lcp) as u64
}

fn word_id(w: &Word) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.iter()
        .map(|&l| {
            let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
            if l > 0 {
                c
            } else {
                c.to_ascii_uppercase()
            }
        })
        .collect()
}

fn word_len(id: &str) -> u64 {
    if id == "e" {
        0
    } else {
        id.chars().count() as u64
    }
}

fn parse_word(id: &str) -> Word {
    if id == "e" {
        return vec![];
    }
    id.chars()
        .map(|c| {
            let g = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
            if c.is_ascii_lowercase() {
                g
            } else {
                -g
            }
        })
        .collect()
}

// -- asymptotic dimension witnesses ----------------------------------------

/// Max r-component size for each requested window of the family. A bounded
/// trace across growing windows is the desk-scale witness for asymptotic
/// dimension zero.
pub fn asdim_zero_witness(family: &Family, r: u64, window_sizes: &[u64]) -> Result<Vec<usize>> {
    window_sizes
        .iter()
        .map(|&sz| {
            let space = make_window(family, sz)?;
            Ok(space
                .r_components(r)
                .classes
                .iter()
                .map(|c| c.len())
                .max()
                .unwrap_or(0))
        })
        .collect()
}

/// Two-colour decomposition witnessing asymptotic dimension at most one.
/// Built-in constructions exist for `ZWindow` (intervals of length 2r,
/// alternately coloured) and `FreeGroupBall` (annuli of width 2r split by
/// subtree). The result is re-verified before being returned.
pub fn asdim_one_decomposition(space: &Space, r: u64) -> Result<UVDecomposition> {
    if r < 1 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let uv = match space.family() {
        FamilyTag::ZWindow { .. } => {
            let mut u_pieces = Vec::new();
            let mut v_pieces = Vec::new();
            let w = 2 * r as usize;
            let mut at = 0usize;
            let mut k = 0usize;
            while at < space.len() {
                let piece: Vec<usize> = (at..space.len().min(at + w)).collect();
                if k.is_multiple_of(2) {
                    u_pieces.push(piece);
                } else {
                    v_pieces.push(piece);
                }
                at += w;
                k += 1;
            }
            UVDecomposition {
                u_pieces,
                v_pieces,
                r,
                bound: 2 * r - 1,
            }
        }
        FamilyTag::FreeGroupBall { .. } => {
            let words: Vec<Word> = space.ids().iter().map(|id| parse_word(id)).collect();
            let w = 2 * r;
            // annulus j = lengths [jw, jw+w); pieces share the prefix at a
            // depth shallow enough that distinct pieces are > r apart
            let back = (r + 1).div_ceil(2);
            let mut pieces: BTreeMap<(u64, Word), Vec<usize>> = BTreeMap::new();
            for (i, word) in words.iter().enumerate() {
                let len = word.len() as u64;
                let j = len / w;
                let root_depth = (j * w).saturating_sub(back) as usize;
                let root: Word = word[..root_depth.min(word.len())].to_vec();
                pieces.entry((j, root)).or_default().push(i);
            }
            let mut u_pieces = Vec::new();
            let mut v_pieces = Vec::new();
            let mut bound = 0;
            for ((j, _), piece) in pieces {
                bound = bound.max(space.diameter_of(&piece));
                if j % 2 == 0 {
                    u_pieces.push(piece);
                } else {
                    v_pieces.push(piece);
                }
            }
            UVDecomposition {
                u_pieces,
                v_pieces,
                r,
                bound,
            }
        }
        other => {
            return Err(Error::NotImplemented(format!(
                "asdim-one decomposition for {other:?}"
            )))
        }
    };
    uv.verify(space)?;
    Ok(uv)
}

// -- union-find ------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn unite(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Independent BFS oracle for r-components, used by tests to cross-check the
/// union-find path.
pub fn r_components_bfs(space: &Space, r: u64) -> Vec<Vec<usize>> {
    let mut seen = vec![false; space.len()];
    let mut classes = Vec::new();
    for start in 0..space.len() {
        if seen[start] {
            continue;
        }
        let mut class = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            class.push(x);
            if r == 0 {
                continue;
            }
            for y in 0..space.len() {
                if !seen[y] && space.dist(x, y) <= r {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower2() -> TowerSpec {
        TowerSpec::new(vec![], vec![2]).unwrap()
    }

    #[test]
    fn z_window_metric() {
        let s = make_window(&Family::Z, 10).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.dist(0, 9), 9);
        assert_eq!(s.dist(3, 3), 0);
    }

    #[test]
    fn free_group_ball_sizes() {
        // |B_r| in F_2: 1, 5, 17, 53, 161, 485
        for (r, expect) in [(0, 1), (1, 5), (2, 17), (3, 53), (4, 161), (5, 485)] {
            let s = make_window(&Family::FreeGroup { gens: 2 }, r).unwrap();
            assert_eq!(s.len(), expect, "radius {r}");
        }
    }

    #[test]
    fn tower_window_metric_range() {
        let s = make_window(&Family::TowerGroup { tower: tower2() }, 3).unwrap();
        assert_eq!(s.len(), 8);
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..8 {
            for j in 0..8 {
                seen.insert(s.dist(i, j));
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn r_components_line_and_gaps() {
        let s = make_window(&Family::Z, 10).unwrap();
        let p = s.r_components(1);
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].len(), 10);

        let g = gap_union(&[1, 1, 1], &[10, 20]).unwrap();
        let p = g.r_components(5);
        assert_eq!(p.classes.len(), 3);
        assert!(p.classes.iter().all(|c| c.len() == 1));

        let f = make_window(&Family::FreeGroup { gens: 2 }, 2).unwrap();
        let p = f.r_components(1);
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].len(), 17);
    }

    #[test]
    fn r_components_zero_radius() {
        let s = make_window(&Family::Z, 5).unwrap();
        let p = s.r_components(0);
        assert_eq!(p.classes.len(), 5);
    }

    #[test]
    fn separated_partition_line() {
        let s = make_window(&Family::Z, 10).unwrap();
        let p = s.separated_partition(2).unwrap();
        assert_eq!(p.classes.len(), 2);
        assert_eq!(p.classes[0], vec![0, 2, 4, 6, 8]);
        assert_eq!(p.classes[1], vec![1, 3, 5, 7, 9]);
        p.verify(&s).unwrap();

        let p = s.separated_partition(3).unwrap();
        assert_eq!(p.classes.len(), 3);
        assert_eq!(p.classes[0], vec![0, 3, 6, 9]);

        // S = 1: any integer metric keeps all points in one class
        let p = s.separated_partition(1).unwrap();
        assert_eq!(p.classes.len(), 1);
    }

    #[test]
    fn growth_profiles() {
        let s = make_window(&Family::Z, 100).unwrap();
        assert_eq!(s.growth_profile(&[1, 2]), vec![3, 5]);
        let f = make_window(&Family::FreeGroup { gens: 2 }, 4).unwrap();
        assert_eq!(f.growth_profile(&[1]), vec![5]);
    }

    #[test]
    fn gap_union_coordinates() {
        let g = gap_union(&[2, 2], &[5]).unwrap();
        assert_eq!(g.ids(), ["0", "1", "6", "7"]);
        // d(X_2, X_1) equals the gap
        assert_eq!(g.dist(1, 2), 5);

        let g = gap_union(&[2, 2, 2], &[1, 2]).unwrap();
        let blocks = gap_blocks(&g).unwrap();
        let d1 = g.dist(blocks[0][1], blocks[1][0]);
        let d2 = g.dist(blocks[1][1], blocks[2][0]);
        assert_eq!((d1, d2), (1, 2));

        assert!(gap_union(&[2, 2, 2], &[3, 2]).is_err());
        let single = gap_union(&[1], &[]).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn gap_union_blocks_are_components() {
        let g = gap_union(&[3, 2, 4], &[5, 9]).unwrap();
        let blocks = gap_blocks(&g).unwrap();
        for r in 1..5 {
            let p = g.r_components(r);
            assert_eq!(p.classes, blocks, "R = {r} below min gap");
        }
    }

    #[test]
    fn asdim_zero_witness_values() {
        let w = asdim_zero_witness(&Family::TowerGroup { tower: tower2() }, 1, &[1, 2, 3, 4, 5])
            .unwrap();
        assert_eq!(w, vec![2, 2, 2, 2, 2]);

        let w = asdim_zero_witness(&Family::Z, 1, &[10, 20, 40]).unwrap();
        assert_eq!(w, vec![10, 20, 40]);

        let w = asdim_zero_witness(&Family::Z, 0, &[10, 20]).unwrap();
        assert_eq!(w, vec![1, 1]);
    }

    #[test]
    fn asdim_one_z() {
        let s = make_window(&Family::Z, 40).unwrap();
        let uv = asdim_one_decomposition(&s, 3).unwrap();
        assert_eq!(uv.u_pieces[0], (0..6).collect::<Vec<_>>());
        assert_eq!(uv.u_pieces[1], (12..18).collect::<Vec<_>>());
        assert_eq!(uv.v_pieces[0], (6..12).collect::<Vec<_>>());
        assert!(uv.bound <= 4 * 3);

        let s = make_window(&Family::Z, 10).unwrap();
        let uv = asdim_one_decomposition(&s, 1).unwrap();
        assert!(uv
            .u_pieces
            .iter()
            .chain(&uv.v_pieces)
            .all(|p| s.diameter_of(p) <= 2));
    }

    #[test]
    fn asdim_one_free_group() {
        let s = make_window(&Family::FreeGroup { gens: 2 }, 4).unwrap();
        let uv = asdim_one_decomposition(&s, 1).unwrap();
        uv.verify(&s).unwrap();
        // annuli {0,1}, {2,3}, {4}: colours alternate by |w| / 2
        for piece in &uv.u_pieces {
            for &x in piece {
                assert_eq!((word_len(s.id(x)) / 2) % 2, 0);
            }
        }

        let g = gap_union(&[2, 2], &[4]).unwrap();
        assert!(matches!(
            asdim_one_decomposition(&g, 1),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn explicit_table_validation() {
        // asymmetric input is impossible by construction (lower triangular);
        // triangle violation is caught
        let err = Space::from_table(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0, 1, 0, 5, 1, 0],
            FamilyTag::Explicit,
        );
        assert!(matches!(err, Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn space_json_round_trip() {
        let s = make_window(&Family::FreeGroup { gens: 2 }, 2).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let s2: Space = serde_json::from_str(&j).unwrap();
        assert_eq!(s, s2);
    }
}
