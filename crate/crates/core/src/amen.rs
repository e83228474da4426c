//! Følner sets, paradoxicality certificates, and trace approximation.
//!
//! A true paradoxical decomposition exists only for infinite spaces; the
//! desk-scale object built here is a matching of two copies of the window's
//! interior into the window (Hall/Whyte style). Window-scale Følner failure
//! is evidence about the ambient family, not proof; exhaustion reports say so
//! explicitly.

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::scalar::Scalar;
use crate::space::{make_window, Family, Space};
use crate::Rational;

/// R-boundary of A: points within R of both A and its complement.
pub fn boundary(space: &Space, a: &[usize], r: u64) -> Vec<usize> {
    let member = {
        let mut m = vec![false; space.len()];
        for &x in a {
            m[x] = true;
        }
        m
    };
    let complement: Vec<usize> = (0..space.len()).filter(|&x| !member[x]).collect();
    (0..space.len())
        .filter(|&x| {
            space.dist_to_set(x, a).map(|d| d <= r).unwrap_or(false)
                && space
                    .dist_to_set(x, &complement)
                    .map(|d| d <= r)
                    .unwrap_or(false)
        })
        .collect()
}

/// Exact |∂_R A| / |A|.
pub fn folner_ratio(space: &Space, a: &[usize], r: u64) -> Result<Rational> {
    if a.is_empty() {
        return Err(Error::Precondition("Folner set must be nonempty".into()));
    }
    let b = boundary(space, a, r);
    Ok(BigRational::new((b.len() as i64).into(), (a.len() as i64).into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FolnerWitness {
    pub set: Vec<usize>,
    pub r: u64,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum FolnerStrategy {
    /// Scan metric balls of radius 0..=max_radius around a central point of
    /// a window sized to keep the scan ambient-faithful.
    Balls { max_radius: u64 },
    /// Scan every R-connected subset of up to `max_size` points.
    Exhaustive { max_size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FolnerOutcome {
    Witness(FolnerWitness),
    /// No candidate qualified; the minimum ratio seen is window-scale
    /// evidence of non-amenability, not a proof.
    Exhausted {
        min_ratio: Option<Rational>,
        best_set: Vec<usize>,
        candidates_checked: usize,
    },
}

fn search_window(family: &Family, reach: u64) -> Result<Space> {
    match family {
        Family::Z => make_window(family, 2 * reach.min(2000) + 1),
        Family::Zd { d } => {
            // keep the point count desk-scale in higher dimensions
            let mut side = 2 * reach + 1;
            while side > 3 && side.pow(*d) > 30_000 {
                side -= 2;
            }
            make_window(family, side)
        }
        // ball sizes grow geometrically; radius 6 is already 1457 points
        Family::FreeGroup { .. } => make_window(family, reach.min(6)),
        Family::TowerGroup { tower } => {
            // cap the level so the window stays desk-scale
            let mut level = 0u32;
            let mut order: u64 = 1;
            while u64::from(level) < reach {
                let inc = tower.increment(level as usize);
                if order.saturating_mul(inc) > 4096 {
                    break;
                }
                order *= inc;
                level += 1;
            }
            make_window(family, u64::from(level))
        }
        Family::GapUnion { .. } | Family::Explicit { .. } => make_window(family, reach.max(1)),
    }
}

fn window_center(space: &Space) -> usize {
    (0..space.len())
        .min_by_key(|&x| (0..space.len()).map(|y| space.dist(x, y)).max().unwrap_or(0))
        .unwrap_or(0)
}

/// Searches for an (R, eps)-Følner set in a window of the family. Returns the
/// first witness with ratio <= eps, or an exhaustion report with the minimum
/// ratio found. The window is also returned so indices can be resolved.
pub fn folner_search(
    family: &Family,
    r: u64,
    eps: &Rational,
    strategy: &FolnerStrategy,
) -> Result<(Space, FolnerOutcome)> {
    if *eps <= BigRational::from_integer(0.into()) {
        return Err(Error::InvalidParameter("epsilon must be > 0".into()));
    }
    let mut min_ratio: Option<Rational> = None;
    let mut best_set = Vec::new();
    let mut checked = 0usize;

    match strategy {
        FolnerStrategy::Balls { max_radius } => {
            // a ball of radius max_radius needs a 2R margin for its boundary
            // to be ambient-faithful
            let space = search_window(family, max_radius + 2 * r)?;
            let center = window_center(&space);
            for rad in 0..=*max_radius {
                let set = space.ball(center, rad);
                let ratio = folner_ratio(&space, &set, r)?;
                checked += 1;
                if ratio <= *eps {
                    return Ok((space, FolnerOutcome::Witness(FolnerWitness { set, r, ratio })));
                }
                if min_ratio.as_ref().map(|m| ratio < *m).unwrap_or(true) {
                    min_ratio = Some(ratio);
                    best_set = set;
                }
            }
            Ok((
                space,
                FolnerOutcome::Exhausted {
                    min_ratio,
                    best_set,
                    candidates_checked: checked,
                },
            ))
        }
        FolnerStrategy::Exhaustive { max_size } => {
            let space = search_window(family, (*max_size as u64) * r.max(1) + 2 * r)?;
            let step = r.max(1);
            let subsets = connected_subsets(&space, step, *max_size);
            for set in subsets {
                let ratio = folner_ratio(&space, &set, r)?;
                checked += 1;
                if ratio <= *eps {
                    return Ok((space, FolnerOutcome::Witness(FolnerWitness { set, r, ratio })));
                }
                if min_ratio.as_ref().map(|m| ratio < *m).unwrap_or(true) {
                    min_ratio = Some(ratio);
                    best_set = set;
                }
            }
            Ok((
                space,
                FolnerOutcome::Exhausted {
                    min_ratio,
                    best_set,
                    candidates_checked: checked,
                },
            ))
        }
    }
}

/// All subsets of at most `max_size` points that are connected under steps
/// of length <= step. Each subset is reported once (sorted).
pub fn connected_subsets(space: &Space, step: u64, max_size: usize) -> Vec<Vec<usize>> {
    let n = space.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| y != x && space.dist(x, y) <= step)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    // root each subset at its smallest member; extensions only use larger ids
    for root in 0..n {
        let mut current = vec![root];
        let mut frontier: Vec<usize> = adj[root].iter().copied().filter(|&y| y > root).collect();
        extend(&adj, root, &mut current, &mut frontier, max_size, &mut out);
    }
    out
}

fn extend(
    adj: &[Vec<usize>],
    root: usize,
    current: &mut Vec<usize>,
    frontier: &mut Vec<usize>,
    max_size: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let mut sorted = current.clone();
    sorted.sort_unstable();
    out.push(sorted);
    if current.len() == max_size {
        return;
    }
    let snapshot = frontier.clone();
    for (k, &next) in snapshot.iter().enumerate() {
        current.push(next);
        let mut new_frontier: Vec<usize> = snapshot[k + 1..].to_vec();
        for &y in &adj[next] {
            if y > root && !current.contains(&y) && !new_frontier.contains(&y) {
                new_frontier.push(y);
            }
        }
        extend(adj, root, current, &mut new_frontier, max_size, out);
        current.pop();
    }
}

// -- paradox certificates ----------------------------------------------------

/// Finite shadow of a paradoxical decomposition: two injections of the
/// window's interior into the window, each moving points at most R, with
/// disjoint images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadoxCertificate {
    pub r: u64,
    pub collar: u64,
    pub interior: Vec<usize>,
    pub plus_pairs: Vec<(usize, usize)>,
    pub minus_pairs: Vec<(usize, usize)>,
}

impl ParadoxCertificate {
    pub fn x_plus(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.plus_pairs.iter().map(|&(_, d)| d).collect();
        v.sort_unstable();
        v
    }

    pub fn x_minus(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.minus_pairs.iter().map(|&(_, d)| d).collect();
        v.sort_unstable();
        v
    }

    /// Re-checks every invariant: both branches are injections defined on the
    /// whole interior, both move points at most R, and the images are
    /// disjoint.
    pub fn verify(&self, space: &Space) -> Result<()> {
        let mut taken = vec![false; space.len()];
        for (pairs, name) in [(&self.plus_pairs, "plus"), (&self.minus_pairs, "minus")] {
            if pairs.len() != self.interior.len() {
                return Err(Error::BadCertificate(format!(
                    "{name} branch does not cover the interior"
                )));
            }
            let mut sources: Vec<usize> = pairs.iter().map(|&(s, _)| s).collect();
            sources.sort_unstable();
            let mut interior = self.interior.clone();
            interior.sort_unstable();
            if sources != interior {
                return Err(Error::BadCertificate(format!(
                    "{name} branch sources differ from the interior"
                )));
            }
            for &(s, d) in pairs {
                if space.dist(s, d) > self.r {
                    return Err(Error::BadCertificate(format!(
                        "{name} branch moves {:?} by {} > R",
                        space.id(s),
                        space.dist(s, d)
                    )));
                }
                if taken[d] {
                    return Err(Error::BadCertificate(format!(
                        "image point {:?} used twice",
                        space.id(d)
                    )));
                }
                taken[d] = true;
            }
        }
        Ok(())
    }

    pub fn to_json(&self, space: &Space) -> serde_json::Value {
        let pairs = |ps: &[(usize, usize)]| {
            ps.iter()
                .map(|&(s, d)| [space.id(s).to_string(), space.id(d).to_string()])
                .collect::<Vec<_>>()
        };
        serde_json::json!({
            "R": self.r,
            "collar": self.collar,
            "interior": self.interior.iter().map(|&i| space.id(i)).collect::<Vec<_>>(),
            "plus_pairs": pairs(&self.plus_pairs),
            "minus_pairs": pairs(&self.minus_pairs),
        })
    }

    pub fn from_json(v: &serde_json::Value, space: &Space) -> Result<Self> {
        let get_pairs = |key: &str| -> Result<Vec<(usize, usize)>> {
            v.get(key)
                .and_then(|p| p.as_array())
                .ok_or_else(|| Error::InvalidParameter(format!("certificate missing '{key}'")))?
                .iter()
                .map(|p| {
                    let a = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                        Error::InvalidParameter("pair must be [src,dst]".into())
                    })?;
                    Ok((
                        space.index_of(a[0].as_str().unwrap_or_default())?,
                        space.index_of(a[1].as_str().unwrap_or_default())?,
                    ))
                })
                .collect()
        };
        let interior = v
            .get("interior")
            .and_then(|p| p.as_array())
            .ok_or_else(|| Error::InvalidParameter("certificate missing 'interior'".into()))?
            .iter()
            .map(|p| space.index_of(p.as_str().unwrap_or_default()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ParadoxCertificate {
            r: v.get("R").and_then(|x| x.as_u64()).unwrap_or(0),
            collar: v.get("collar").and_then(|x| x.as_u64()).unwrap_or(0),
            interior,
            plus_pairs: get_pairs("plus_pairs")?,
            minus_pairs: get_pairs("minus_pairs")?,
        })
    }
}

/// A set of doubled-interior vertices with fewer neighbors than members.
/// `true` in the left component marks the minus copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallViolation {
    pub left: Vec<(usize, bool)>,
    pub neighborhood: Vec<usize>,
}

impl HallViolation {
    /// Re-checks |N(A)| < |A| by enumeration.
    pub fn verify(&self, space: &Space, r: u64) -> Result<()> {
        let mut neigh = vec![false; space.len()];
        for &(x, _) in &self.left {
            for y in 0..space.len() {
                if space.dist(x, y) <= r {
                    neigh[y] = true;
                }
            }
        }
        let computed: Vec<usize> = (0..space.len()).filter(|&y| neigh[y]).collect();
        if computed != self.neighborhood {
            return Err(Error::BadCertificate(
                "recorded neighborhood differs from enumeration".into(),
            ));
        }
        if self.neighborhood.len() >= self.left.len() {
            return Err(Error::BadCertificate(format!(
                "|N(A)| = {} is not below |A| = {}",
                self.neighborhood.len(),
                self.left.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParadoxOutcome {
    Certificate(ParadoxCertificate),
    HallViolation(HallViolation),
    /// No point of the window has its collar-ball inside the window.
    EmptyInterior,
}

/// Tries to match two copies of the window's interior into the window with
/// displacement <= R. Saturation yields a [`ParadoxCertificate`]; failure
/// yields a verified [`HallViolation`].
pub fn paradox_certificate(space: &Space, r: u64, collar: u64) -> Result<ParadoxOutcome> {
    if collar < r {
        return Err(Error::InvalidParameter(format!(
            "collar {collar} must be >= R = {r}"
        )));
    }
    let interior = space.interior(collar);
    if interior.is_empty() {
        return Ok(ParadoxOutcome::EmptyInterior);
    }
    // left vertex 2k = plus copy of interior[k], 2k+1 = minus copy
    let left_count = 2 * interior.len();
    let adj: Vec<Vec<usize>> = (0..left_count)
        .map(|l| {
            let x = interior[l / 2];
            (0..space.len()).filter(|&y| space.dist(x, y) <= r).collect()
        })
        .collect();

    let (matched_right, saturated) = kuhn_matching(&adj, space.len());
    if saturated {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut left_match = vec![usize::MAX; left_count];
        for (y, &l) in matched_right.iter().enumerate() {
            if l != usize::MAX {
                left_match[l] = y;
            }
        }
        for (k, &x) in interior.iter().enumerate() {
            plus.push((x, left_match[2 * k]));
            minus.push((x, left_match[2 * k + 1]));
        }
        let cert = ParadoxCertificate {
            r,
            collar,
            interior: interior.clone(),
            plus_pairs: plus,
            minus_pairs: minus,
        };
        cert.verify(space)?;
        Ok(ParadoxOutcome::Certificate(cert))
    } else {
        // alternating reachability from unmatched left vertices
        let mut left_match = vec![usize::MAX; left_count];
        for (y, &l) in matched_right.iter().enumerate() {
            if l != usize::MAX {
                left_match[l] = y;
            }
        }
        let mut in_a = vec![false; left_count];
        let mut in_n = vec![false; space.len()];
        let mut queue: Vec<usize> = (0..left_count).filter(|&l| left_match[l] == usize::MAX).collect();
        queue.iter().for_each(|&l| in_a[l] = true);
        while let Some(l) = queue.pop() {
            for &y in &adj[l] {
                if !in_n[y] {
                    in_n[y] = true;
                    let l2 = matched_right[y];
                    if l2 != usize::MAX && !in_a[l2] {
                        in_a[l2] = true;
                        queue.push(l2);
                    }
                }
            }
        }
        let violation = HallViolation {
            left: (0..left_count)
                .filter(|&l| in_a[l])
                .map(|l| (interior[l / 2], l % 2 == 1))
                .collect(),
            neighborhood: (0..space.len()).filter(|&y| in_n[y]).collect(),
        };
        violation.verify(space, r)?;
        Ok(ParadoxOutcome::HallViolation(violation))
    }
}

/// Augmenting-path maximum matching with deterministic vertex order.
/// Returns (right -> left assignment, whether every left vertex is matched).
fn kuhn_matching(adj: &[Vec<usize>], right_count: usize) -> (Vec<usize>, bool) {
    let mut matched_right = vec![usize::MAX; right_count];
    let mut saturated = true;
    for l in 0..adj.len() {
        let mut visited = vec![false; right_count];
        if !augment(adj, l, &mut matched_right, &mut visited) {
            saturated = false;
        }
    }
    (matched_right, saturated)
}

fn augment(adj: &[Vec<usize>], l: usize, matched_right: &mut [usize], visited: &mut [bool]) -> bool {
    for &y in &adj[l] {
        if visited[y] {
            continue;
        }
        visited[y] = true;
        if matched_right[y] == usize::MAX || augment(adj, matched_right[y], matched_right, visited) {
            matched_right[y] = l;
            return true;
        }
    }
    false
}

// -- traces -------------------------------------------------------------------

/// Følner-averaged diagonal: (1/|F|) sum over x in F of a_xx.
pub fn approx_trace<T: Scalar>(a: &SparseOperator<T>, f: &[usize]) -> Result<T> {
    if f.is_empty() {
        return Err(Error::Precondition("averaging set must be nonempty".into()));
    }
    let sum = f.iter().fold(T::zero(), |acc, &x| acc + a.get(x, x));
    Ok(sum / T::from_int(f.len() as i64))
}

/// |approx_trace(ab - ba, F)|.
pub fn trace_defect<T: Scalar>(
    a: &SparseOperator<T>,
    b: &SparseOperator<T>,
    f: &[usize],
) -> Result<T> {
    let comm = a.mul(b).sub(&b.mul(a));
    Ok(approx_trace(&comm, f)?.abs())
}

/// The unique normalized trace of the full matrix algebra on the window:
/// (1/|X|) sum of the diagonal.
pub fn normalized_trace<T: Scalar>(space: &Space, a: &SparseOperator<T>) -> T {
    a.trace() / T::from_int(space.len() as i64)
}
