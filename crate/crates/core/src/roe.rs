//! Exact constructions inside the algebra of finite-propagation operators:
//! the diagonal expectation, truncated ray shifts, quasidiagonality
//! projections, ideal witnesses, Mayer–Vietoris splitting and gluing, block
//! decomposition over component classes, Cuntz-type isometry pairs with their
//! Leavitt relations, algebraic equivalence of idempotents, and the
//! non-cancellation witness built from families of rays.
//!
//! Every identity produced here is verified in exact rational arithmetic
//! before being returned.

use num::One;

use crate::amen::ParadoxCertificate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{gap_blocks, Space, UVDecomposition};
use crate::translations::{tij_family, to_operator, PartialTranslation};
use crate::{rat, Rational, RationalOperator};

/// Diagonal conditional expectation: keeps the diagonal, kills the rest.
/// Idempotent, and a bimodule map over diagonal operators.
pub fn cond_expectation(a: &RationalOperator) -> RationalOperator {
    let mut out = RationalOperator::zero(a.dim());
    for (x, y, v) in a.iter() {
        if x == y {
            out.set(x, y, v.clone());
        }
    }
    out
}

/// Truncated one-sided shift along a ray: S fixes every off-ray basis
/// vector, maps each ray point to its successor, and kills the last ray
/// point (the window truncation). T is the transpose, so T·S = 1 minus the
/// matrix unit at the last ray point, while the first ray point is
/// orthogonal to every column of S.
pub fn shift_from_ray(
    space: &Space,
    ray: &[usize],
    r: u64,
) -> Result<(RationalOperator, RationalOperator)> {
    if ray.is_empty() {
        return Err(Error::InvalidParameter("ray must be nonempty".into()));
    }
    let mut seen = vec![false; space.len()];
    for &x in ray {
        if x >= space.len() {
            return Err(Error::InvalidParameter(format!(
                "ray point {x} outside the space"
            )));
        }
        if seen[x] {
            return Err(Error::InvalidParameter(format!(
                "ray visits {:?} twice",
                space.id(x)
            )));
        }
        seen[x] = true;
    }
    for w in ray.windows(2) {
        if space.dist(w[0], w[1]) > r {
            return Err(Error::Precondition(format!(
                "ray step {:?} -> {:?} has length {} > {r}",
                space.id(w[0]),
                space.id(w[1]),
                space.dist(w[0], w[1])
            )));
        }
    }
    let mut s = RationalOperator::zero(space.len());
    for x in 0..space.len() {
        if !seen[x] {
            s.set(x, x, Rational::one());
        }
    }
    for w in ray.windows(2) {
        s.set(w[1], w[0], Rational::one());
    }
    let t = s.transpose();

    // structural checks promised by the contract
    let last = *ray.last().expect("ray is nonempty");
    let expected =
        RationalOperator::identity(space.len()).sub(&RationalOperator::unit(space.len(), last, last));
    if t.mul(&s) != expected {
        return Err(Error::IdentityFailed("TS != 1 - e_last,last".into()));
    }
    let first = ray[0];
    if s.iter().any(|(x, _, _)| x == first) {
        return Err(Error::IdentityFailed(
            "a column of S touches the first ray point".into(),
        ));
    }
    Ok((s, t))
}

// -- quasidiagonality ----------------------------------------------------------

/// Evidence attached to a quasidiagonality projection: which block count was
/// chosen and why it qualifies.
#[derive(Debug, Clone, PartialEq)]
pub struct QdCertificate {
    pub n: usize,
    pub projection: RationalOperator,
    /// The commutator with every supplied operator is exactly zero.
    pub commutators_zero: bool,
    /// ‖P_n ξ − ξ‖_p for each supplied vector, all below the tolerance.
    pub residuals: Vec<f64>,
    pub norm_p1: Rational,
    pub norm_pinf: Rational,
}

fn vec_p_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Least n >= 1 such that P_n (the diagonal indicator of the first n gap
/// blocks) commutes exactly with every operator in `ops` and moves every
/// vector in `vectors` by less than `eps` in l^p. Taking all blocks gives
/// the identity, so the search always terminates.
pub fn qd_projection(
    gap_space: &Space,
    ops: &[RationalOperator],
    vectors: &[Vec<Rational>],
    eps: f64,
    p: f64,
) -> Result<(usize, QdCertificate)> {
    if eps <= 0.0 {
        return Err(Error::InvalidParameter("eps must be > 0".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
    }
    let blocks = gap_blocks(gap_space)?;
    for a in ops {
        if a.dim() != gap_space.len() {
            return Err(Error::InvalidParameter(
                "operator dimension does not match the space".into(),
            ));
        }
    }
    for xi in vectors {
        if xi.len() != gap_space.len() {
            return Err(Error::InvalidParameter(
                "vector supported beyond the window".into(),
            ));
        }
    }
    for n in 1..=blocks.len() {
        let first_n: Vec<usize> = blocks[..n].iter().flatten().copied().collect();
        let pn = RationalOperator::indicator(gap_space.len(), &first_n);
        let commutators_zero = ops
            .iter()
            .all(|a| a.mul(&pn).sub(&pn.mul(a)).is_zero());
        if !commutators_zero {
            continue;
        }
        let residuals: Vec<f64> = vectors
            .iter()
            .map(|xi| {
                let moved: Vec<f64> = pn
                    .apply(xi)
                    .iter()
                    .zip(xi)
                    .map(|(a, b)| (a.clone() - b.clone()).as_f64())
                    .collect();
                vec_p_norm(&moved, p)
            })
            .collect();
        if residuals.iter().all(|&d| d < eps) {
            let cert = QdCertificate {
                n,
                norm_p1: pn.norm_p1(),
                norm_pinf: pn.norm_pinf(),
                projection: pn,
                commutators_zero,
                residuals,
            };
            return Ok((n, cert));
        }
    }
    Err(Error::Precondition(
        "no block count satisfies the vector tolerance".into(),
    ))
}

// -- ideal witnesses -------------------------------------------------------------

/// Exact witness that the corner over A lies in the ideal generated by the
/// corner over B: 1_A = f · 1_A · Σ T_ji 1_B T_ij.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealWitness {
    pub f: RationalOperator,
    /// Diagonal counts Σ T_ji 1_B T_ij; entries on A lie in 1..=classes.
    pub counts: RationalOperator,
    pub family: Vec<((usize, usize), PartialTranslation)>,
}

pub fn ideal_witness(space: &Space, a: &[usize], b: &[usize], r: u64) -> Result<IdealWitness> {
    for &x in a {
        match space.dist_to_set(x, b) {
            Some(d) if d <= r => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "point {:?} of A is farther than {r} from B",
                    space.id(x)
                )))
            }
        }
    }
    let family = tij_family(space, r)?;
    let one_b = RationalOperator::indicator(space.len(), b);
    let mut counts = RationalOperator::zero(space.len());
    for ((_, _), t) in &family {
        let v: RationalOperator = to_operator(space, t);
        let w = v.transpose();
        counts = counts.add(&w.mul(&one_b).mul(&v));
    }
    if !counts.is_diagonal() {
        return Err(Error::IdentityFailed("count operator is not diagonal".into()));
    }
    let classes = (family.len() as f64).sqrt() as i64;
    let mut f = RationalOperator::zero(space.len());
    for &x in a {
        let c = counts.get(x, x);
        if c < rat(1) || c > rat(classes) {
            return Err(Error::IdentityFailed(format!(
                "count {c} at {:?} outside 1..={classes}",
                space.id(x)
            )));
        }
        f.set(x, x, Rational::one() / c);
    }
    let one_a = RationalOperator::indicator(space.len(), a);
    if f.mul(&one_a).mul(&counts) != one_a {
        return Err(Error::IdentityFailed(
            "1_A = f 1_A sum T_ji 1_B T_ij failed".into(),
        ));
    }
    Ok(IdealWitness { f, counts, family })
}

// -- Mayer-Vietoris --------------------------------------------------------------

fn union_of(pieces: &[Vec<usize>]) -> Vec<usize> {
    let mut v: Vec<usize> = pieces.iter().flatten().copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Splits a = 1_U·a + 1_V·a along the two colours of a decomposition.
pub fn mv_split(
    a: &RationalOperator,
    uv: &UVDecomposition,
) -> (RationalOperator, RationalOperator) {
    let u = union_of(&uv.u_pieces);
    let v = union_of(&uv.v_pieces);
    let row_indicator = |set: &[usize]| {
        let mut out = RationalOperator::zero(a.dim());
        for (x, y, val) in a.iter() {
            if set.binary_search(&x).is_ok() {
                out.set(x, y, val.clone());
            }
        }
        out
    };
    (row_indicator(&u), row_indicator(&v))
}

/// Glues two operators that agree up to epsilon: c = (a·χ' + b·χ)/2 where χ,
/// χ' indicate the r-neighborhoods of the U- and V-colours. Requires a
/// supported in the U-neighborhood and b in the V-neighborhood; then
/// ‖a−c‖ and ‖b−c‖ are at most ‖a−b‖, comfortably below (5/2)·ε.
pub fn mv_glue(
    a: &RationalOperator,
    b: &RationalOperator,
    uv: &UVDecomposition,
    space: &Space,
    r: u64,
) -> Result<RationalOperator> {
    let chi_set = space.neighborhood(&union_of(&uv.u_pieces), r);
    let chi_prime_set = space.neighborhood(&union_of(&uv.v_pieces), r);
    let chi = RationalOperator::indicator(space.len(), &chi_set);
    let chi_prime = RationalOperator::indicator(space.len(), &chi_prime_set);
    if chi.mul(a).mul(&chi) != *a {
        return Err(Error::Precondition(
            "a is not supported in the U-neighborhood".into(),
        ));
    }
    if chi_prime.mul(b).mul(&chi_prime) != *b {
        return Err(Error::Precondition(
            "b is not supported in the V-neighborhood".into(),
        ));
    }
    let half = crate::ratio(1, 2);
    Ok(a.mul(&chi_prime).add(&b.mul(&chi)).scale(&half))
}

// -- block decomposition -----------------------------------------------------------

/// a cut along the r-component classes: one block per class, plus whatever
/// is left over. The residue is exactly zero iff propagation(a) <= the
/// component parameter allows (every entry stays inside one class).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub classes: Vec<Vec<usize>>,
    pub blocks: Vec<RationalOperator>,
    pub residue: RationalOperator,
}

pub fn block_decompose(a: &RationalOperator, space: &Space, r: u64) -> BlockDecomposition {
    let classes = space.r_components(r).classes;
    let blocks: Vec<RationalOperator> = classes.iter().map(|c| a.restrict(c)).collect();
    let mut residue = a.clone();
    for b in &blocks {
        residue = residue.sub(b);
    }
    BlockDecomposition {
        classes,
        blocks,
        residue,
    }
}

// -- Cuntz-type isometries ------------------------------------------------------------

/// The two isometry shadows cut from a paradox certificate, with their
/// transposes.
#[derive(Debug, Clone, PartialEq)]
pub struct CuntzQuad {
    pub s1: RationalOperator,
    pub s2: RationalOperator,
    pub t1: RationalOperator,
    pub t2: RationalOperator,
    pub interior: Vec<usize>,
    pub range: Vec<usize>,
}

pub fn cuntz_build(space: &Space, cert: &ParadoxCertificate) -> Result<CuntzQuad> {
    cert.verify(space)?;
    let branch = |pairs: &[(usize, usize)]| {
        let mut op = RationalOperator::zero(space.len());
        for &(src, dst) in pairs {
            op.set(dst, src, Rational::one());
        }
        op
    };
    let s1 = branch(&cert.plus_pairs);
    let s2 = branch(&cert.minus_pairs);
    let mut range: Vec<usize> = cert.x_plus();
    range.extend(cert.x_minus());
    range.sort_unstable();
    Ok(CuntzQuad {
        t1: s1.transpose(),
        t2: s2.transpose(),
        s1,
        s2,
        interior: cert.interior.clone(),
        range,
    })
}

/// Outcome of checking the Leavitt relations restricted to the interior
/// sub-identity: T_i S_i = 1_I, T_i S_j = 0 for i != j, and
/// S_1 T_1 + S_2 T_2 = the indicator of the matched range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeavittReport {
    pub t1_s1_is_interior_identity: bool,
    pub t2_s2_is_interior_identity: bool,
    pub t1_s2_is_zero: bool,
    pub t2_s1_is_zero: bool,
    pub range_identity_sums: bool,
}

impl LeavittReport {
    pub fn all_hold(&self) -> bool {
        self.t1_s1_is_interior_identity
            && self.t2_s2_is_interior_identity
            && self.t1_s2_is_zero
            && self.t2_s1_is_zero
            && self.range_identity_sums
    }
}

pub fn leavitt_verify(quad: &CuntzQuad) -> LeavittReport {
    let dim = quad.s1.dim();
    let one_i = RationalOperator::indicator(dim, &quad.interior);
    let one_range = RationalOperator::indicator(dim, &quad.range);
    LeavittReport {
        t1_s1_is_interior_identity: quad.t1.mul(&quad.s1) == one_i,
        t2_s2_is_interior_identity: quad.t2.mul(&quad.s2) == one_i,
        t1_s2_is_zero: quad.t1.mul(&quad.s2).is_zero(),
        t2_s1_is_zero: quad.t2.mul(&quad.s1).is_zero(),
        range_identity_sums: quad.s1.mul(&quad.t1).add(&quad.s2.mul(&quad.t2)) == one_range,
    }
}

/// Idempotents e = xy and f = yx with the witnessing pair, normalized so
/// that x = e·x·f and y = f·y·e. All four identities are re-verified.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivWitness {
    pub e: RationalOperator,
    pub f: RationalOperator,
    pub x: RationalOperator,
    pub y: RationalOperator,
}

/// Checks that (x, y) witnesses the algebraic equivalence of the
/// idempotents e and f, naming the first violated identity on failure.
pub fn alg_equiv_check(
    e: &RationalOperator,
    f: &RationalOperator,
    x: &RationalOperator,
    y: &RationalOperator,
) -> Result<EquivWitness> {
    if !e.is_idempotent() {
        return Err(Error::IdentityFailed("e^2 = e".into()));
    }
    if !f.is_idempotent() {
        return Err(Error::IdentityFailed("f^2 = f".into()));
    }
    if x.mul(y) != *e {
        return Err(Error::IdentityFailed("xy = e".into()));
    }
    if y.mul(x) != *f {
        return Err(Error::IdentityFailed("yx = f".into()));
    }
    let xn = e.mul(x).mul(f);
    let yn = f.mul(y).mul(e);
    // normalization preserves the witness identities
    if xn.mul(&yn) != *e || yn.mul(&xn) != *f {
        return Err(Error::IdentityFailed(
            "normalized witnesses broke the identities".into(),
        ));
    }
    Ok(EquivWitness {
        e: e.clone(),
        f: f.clone(),
        x: xn,
        y: yn,
    })
}

/// e = S_1 T_1 together with verified witnesses for e ~ 1_I and
/// (1_range − e) ~ 1_I: the finite shadow of a properly infinite idempotent
/// in standard form.
pub fn standard_form_witness(
    quad: &CuntzQuad,
) -> Result<(RationalOperator, EquivWitness, EquivWitness)> {
    let report = leavitt_verify(quad);
    if !report.all_hold() {
        return Err(Error::IdentityFailed(
            "Leavitt relations do not hold for this quad".into(),
        ));
    }
    let dim = quad.s1.dim();
    let one_i = RationalOperator::indicator(dim, &quad.interior);
    let one_range = RationalOperator::indicator(dim, &quad.range);
    let e = quad.s1.mul(&quad.t1);
    let w1 = alg_equiv_check(&e, &one_i, &quad.s1, &quad.t1)?;
    let rest = one_range.sub(&e);
    let w2 = alg_equiv_check(&rest, &one_i, &quad.s2, &quad.t2)?;
    Ok((e, w1, w2))
}

// -- non-cancellation ----------------------------------------------------------------

/// Idempotents p, q with wv = p and vw = q where 1−p and 1−q are the
/// indicators of the rays' last and first points: equinumerous but
/// structurally distinct complements.
#[derive(Debug, Clone, PartialEq)]
pub struct NoncancellationWitness {
    pub p: RationalOperator,
    pub q: RationalOperator,
    pub v: RationalOperator,
    pub w: RationalOperator,
    pub first_points: Vec<usize>,
    pub last_points: Vec<usize>,
}

pub fn noncancellation_witness(
    space: &Space,
    r: u64,
    rays: &[Vec<usize>],
) -> Result<NoncancellationWitness> {
    if rays.len() < 2 {
        return Err(Error::InvalidParameter("need at least two rays".into()));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let mut seen = vec![false; space.len()];
    for ray in rays {
        if ray.is_empty() {
            return Err(Error::InvalidParameter("empty ray".into()));
        }
        for &x in ray {
            if x >= space.len() {
                return Err(Error::InvalidParameter(format!(
                    "ray point {x} outside the space"
                )));
            }
            if seen[x] {
                return Err(Error::Precondition("rays are not disjoint".into()));
            }
            seen[x] = true;
        }
        // spacing along the ray: the i-th step point sits between i·r and
        // (i+1)·r from the ray's first point
        for (i, &x) in ray.iter().enumerate().skip(1) {
            let d = space.dist(ray[0], x);
            let i = i as u64;
            if d < i * r || d > (i + 1) * r {
                return Err(Error::Precondition(format!(
                    "ray point {:?} at distance {d} from the start, outside [{}, {}]",
                    space.id(x),
                    i * r,
                    (i + 1) * r
                )));
            }
        }
    }
    for w in rays.windows(2) {
        if w[0].len() >= w[1].len() {
            return Err(Error::Precondition(
                "ray lengths must be strictly increasing".into(),
            ));
        }
    }
    let mut last_gap = 0;
    for (k, ray_a) in rays.iter().enumerate() {
        for ray_b in &rays[k + 1..] {
            let gap = ray_a
                .iter()
                .flat_map(|&x| ray_b.iter().map(move |&y| space.dist(x, y)))
                .min()
                .expect("rays are nonempty");
            if gap <= last_gap || gap <= 2 * r {
                return Err(Error::Precondition(format!(
                    "mutual ray gap {gap} is not strictly growing beyond 2r"
                )));
            }
            last_gap = gap;
        }
    }

    // v shifts every ray forward by one step and fixes the rest of the
    // window; w is the transpose
    let mut v = RationalOperator::zero(space.len());
    for x in 0..space.len() {
        if !seen[x] {
            v.set(x, x, Rational::one());
        }
    }
    for ray in rays {
        for step in ray.windows(2) {
            v.set(step[1], step[0], Rational::one());
        }
    }
    let w = v.transpose();
    let p = w.mul(&v);
    let q = v.mul(&w);

    let first_points: Vec<usize> = rays.iter().map(|ray| ray[0]).collect();
    let last_points: Vec<usize> = rays.iter().map(|ray| *ray.last().expect("nonempty")).collect();
    let one = RationalOperator::identity(space.len());
    if one.sub(&p) != RationalOperator::indicator(space.len(), &last_points) {
        return Err(Error::IdentityFailed("1 - p != indicator of last points".into()));
    }
    if one.sub(&q) != RationalOperator::indicator(space.len(), &first_points) {
        return Err(Error::IdentityFailed("1 - q != indicator of first points".into()));
    }
    Ok(NoncancellationWitness {
        p,
        q,
        v,
        w,
        first_points,
        last_points,
    })
}
