//! The rank-2 toric minimal model program: Gale duality and wall crossings.
//!
//! A complete simplicial fan on `n + 2` rays has a rank-2 lattice of ray
//! relations.  Reading each ray off the relation lattice gives `n + 2`
//! vectors in the plane (the Gale table); the fan corresponds to a chamber
//! between two angularly consecutive Gale directions, and its two extremal
//! contractions are the crossings of the chamber walls.  Crossing a wall
//! re-triangulates every amalgam touched by the circuit at once, which is
//! what makes flips over positive-dimensional centres come out uniformly.
//!
//! Sign conventions: a crossing relation is normalized to pair positively
//! with the interior of the chamber it leaves, so flips have positive
//! anticanonical degree, flops zero, antiflips negative, divisorial
//! contractions a single negative entry, fibrations none.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fan::{gorenstein_data, Cone, Fan, GorensteinData, SimplexVariety};
use crate::lattice::{gcd, IntMat, IntVec};
use crate::Result;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Fibration,
    Divisorial,
    Flip,
    Flop,
    Antiflip,
}

impl CrossingKind {
    pub fn is_small(self) -> bool {
        matches!(
            self,
            CrossingKind::Flip | CrossingKind::Flop | CrossingKind::Antiflip
        )
    }
}

impl std::fmt::Display for CrossingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CrossingKind::Fibration => "fibration",
            CrossingKind::Divisorial => "divisorial",
            CrossingKind::Flip => "flip",
            CrossingKind::Flop => "flop",
            CrossingKind::Antiflip => "antiflip",
        };
        f.write_str(s)
    }
}

/// A circuit relation at a chamber wall, oriented away from the incoming
/// chamber.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WallCrossing {
    pub relation: IntVec,
    pub kind: CrossingKind,
    pub k_degree: i64,
    wall: [i64; 2],
}

impl WallCrossing {
    pub fn positive_support(&self) -> Vec<usize> {
        (0..self.relation.dim())
            .filter(|&i| self.relation[i] > 0)
            .collect()
    }

    pub fn negative_support(&self) -> Vec<usize> {
        (0..self.relation.dim())
            .filter(|&i| self.relation[i] < 0)
            .collect()
    }

    pub fn spectators(&self) -> Vec<usize> {
        (0..self.relation.dim())
            .filter(|&i| self.relation[i] == 0)
            .collect()
    }
}

fn cross2(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0].checked_mul(b[1])
        .and_then(|x| x.checked_sub(a[1].checked_mul(b[0])?))
        .expect("integer overflow in planar cross product")
}

fn dot2(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

fn add2(a: [i64; 2], b: [i64; 2]) -> [i64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn primitive2(a: [i64; 2]) -> [i64; 2] {
    let g = gcd(a[0], a[1]);
    debug_assert!(g > 0);
    [a[0] / g, a[1] / g]
}

/// Angular order on nonzero plane vectors, counterclockwise from the
/// positive x-axis.
fn angle_class(a: [i64; 2]) -> u8 {
    if a[1] > 0 || (a[1] == 0 && a[0] > 0) {
        0
    } else {
        1
    }
}

fn angle_lt(a: [i64; 2], b: [i64; 2]) -> bool {
    let (ca, cb) = (angle_class(a), angle_class(b));
    if ca != cb {
        return ca < cb;
    }
    cross2(a, b) > 0
}

fn strictly_inside(x: [i64; 2], lo: [i64; 2], hi: [i64; 2]) -> bool {
    cross2(lo, x) > 0 && cross2(x, hi) > 0
}

/// A `Q`-factorial model of Picard rank 2: a complete simplicial fan on
/// `n + 2` rays with its Gale table and chamber data.
#[derive(Clone, Debug)]
pub struct RankTwoModel {
    fan: Fan,
    basis: [IntVec; 2],
    gale: Vec<[i64; 2]>,
    chamber: ([i64; 2], [i64; 2]),
    incoming: WallCrossing,
    outgoing: WallCrossing,
}

impl RankTwoModel {
    /// Builds the model knowing which extremal crossing leads back where the
    /// model came from.  `incoming_relation` must be one of the two wall
    /// crossings, oriented away from this chamber.
    pub fn new(fan: Fan, incoming_relation: &IntVec) -> Result<RankTwoModel> {
        let n = fan.dim();
        if fan.rays().len() != n + 2 {
            return Err(Error::degenerate(format!(
                "rank-2 model needs {} rays, got {}",
                n + 2,
                fan.rays().len()
            )));
        }
        let kernel = IntMat::from_cols(fan.rays()).kernel_basis();
        if kernel.len() != 2 {
            return Err(Error::degenerate("relation lattice does not have rank 2"));
        }
        // canonical basis: the incoming relation first, completed to a basis
        let coords = in_kernel_coords(&kernel, incoming_relation)
            .ok_or_else(|| Error::arg("incoming relation is not a ray relation"))?;
        let g = gcd(coords[0], coords[1]);
        if g != 1 {
            return Err(Error::arg("incoming relation is not primitive"));
        }
        let (x, y) = bezout_complement(coords[0], coords[1]);
        let b0 = incoming_relation.clone();
        let mut b1 = kernel[0].scaled(x).add(&kernel[1].scaled(y));

        // shear-normalize the complement, then orient so the incoming wall
        // is the counterclockwise chamber boundary
        b1 = shear_reduce(&b1, &b0);
        let mut model = Self::assemble(fan, b0.clone(), b1.clone())?;
        if model.incoming.relation != *incoming_relation {
            // the y-axis wall came out on the wrong side; flip the
            // complement and rebuild
            model = Self::assemble(model.fan, b0.clone(), b1.neg())?;
        }
        if model.incoming.relation != *incoming_relation {
            return Err(Error::arg(format!(
                "relation {incoming_relation} is not an extremal crossing of this model"
            )));
        }
        Ok(model)
    }

    /// Builds the model without an incoming context; the crossing with the
    /// lexicographically smaller relation is designated incoming.
    pub fn from_fan(fan: Fan) -> Result<RankTwoModel> {
        let kernel = IntMat::from_cols(fan.rays()).kernel_basis();
        if kernel.len() != 2 {
            return Err(Error::degenerate("relation lattice does not have rank 2"));
        }
        let probe = Self::assemble(fan, kernel[0].clone(), kernel[1].clone())?;
        let pick = if probe.incoming.relation.0 <= probe.outgoing.relation.0 {
            probe.incoming.relation.clone()
        } else {
            probe.outgoing.relation.clone()
        };
        Self::new(probe.fan, &pick)
    }

    fn assemble(fan: Fan, b0: IntVec, b1: IntVec) -> Result<RankTwoModel> {
        let gale: Vec<[i64; 2]> = (0..fan.rays().len()).map(|i| [b0[i], b1[i]]).collect();
        for (i, w) in gale.iter().enumerate() {
            if *w == [0, 0] {
                return Err(Error::degenerate(format!("ray {i} carries no relation")));
            }
        }
        let dirs = sorted_directions(&gale);
        if dirs.len() < 2 {
            return Err(Error::degenerate("Gale directions lie on a single ray"));
        }
        // the effective cone is convex: at most one cyclic gap of 180
        // degrees or more (the outside)
        let wide_gaps = (0..dirs.len())
            .filter(|&k| cross2(dirs[k], dirs[(k + 1) % dirs.len()]) <= 0)
            .count();
        if wide_gaps > 1 {
            return Err(Error::degenerate(
                "Gale directions are not the rays of a convex cone",
            ));
        }
        let pairs = complement_pairs(&fan, &gale)?;
        let mut chamber = None;
        for k in 0..dirs.len() {
            let (lo, hi) = (dirs[k], dirs[(k + 1) % dirs.len()]);
            if cross2(lo, hi) <= 0 {
                continue;
            }
            let probe = add2(lo, hi);
            if pairs.iter().all(|&(a, b)| strictly_inside(probe, a, b)) {
                if chamber.is_some() {
                    return Err(Error::degenerate("fan occupies more than one chamber"));
                }
                chamber = Some((lo, hi));
            }
        }
        let chamber = chamber
            .ok_or_else(|| Error::degenerate("fan does not match any chamber of its Gale table"))?;
        let (lo, hi) = chamber;
        let interior = add2(lo, hi);
        let outgoing = crossing_at(&b0, &b1, &gale, lo, interior);
        let incoming = crossing_at(&b0, &b1, &gale, hi, interior);
        Ok(RankTwoModel {
            fan,
            basis: [b0, b1],
            gale,
            chamber,
            incoming,
            outgoing,
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// Gale table in the canonical basis (incoming relation first).
    pub fn gale(&self) -> &[[i64; 2]] {
        &self.gale
    }

    pub fn kernel_basis(&self) -> [&IntVec; 2] {
        [&self.basis[0], &self.basis[1]]
    }

    /// The crossing that undoes the step which produced this model.
    pub fn incoming(&self) -> &WallCrossing {
        &self.incoming
    }

    /// The other extremal crossing: the next step of the two-ray game.
    pub fn outgoing(&self) -> &WallCrossing {
        &self.outgoing
    }

    pub fn is_fano(&self) -> bool {
        self.fan.is_fano()
    }

    /// Stable identifier of the fan (rays plus max cones).
    pub fn snapshot_key(&self) -> String {
        let rays: Vec<String> = self.fan.rays().iter().map(|r| r.to_string()).collect();
        let mut cones: Vec<String> = self
            .fan
            .cones()
            .iter()
            .map(|c| {
                c.rays
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        cones.sort();
        format!("{}|{}", rays.join(";"), cones.join(";"))
    }

    fn chamber_beyond(&self, wall: [i64; 2]) -> Result<([i64; 2], [i64; 2])> {
        let dirs = sorted_directions(&self.gale);
        let idx = dirs
            .iter()
            .position(|&d| d == wall)
            .ok_or_else(|| Error::degenerate("crossing wall is not a Gale direction"))?;
        let (lo, hi) = self.chamber;
        let beyond = if wall == lo {
            let prev = dirs[(idx + dirs.len() - 1) % dirs.len()];
            (prev, lo)
        } else if wall == hi {
            let next = dirs[(idx + 1) % dirs.len()];
            (hi, next)
        } else {
            return Err(Error::arg("crossing does not belong to this chamber"));
        };
        if cross2(beyond.0, beyond.1) <= 0 {
            return Err(Error::degenerate("no chamber beyond this wall"));
        }
        Ok(beyond)
    }

    /// Executes a flip, flop or antiflip: same rays, the unique alternative
    /// triangulation on the other side of the wall.
    pub fn cross_small(&self, crossing: &WallCrossing) -> Result<RankTwoModel> {
        if !crossing.kind.is_small() {
            return Err(Error::arg(format!(
                "{} crossing is not small",
                crossing.kind
            )));
        }
        let (lo, hi) = self.chamber_beyond(crossing.wall)?;
        let probe = add2(lo, hi);
        let mut cones = Vec::new();
        let ray_count = self.fan.rays().len();
        for i in 0..ray_count {
            for j in i + 1..ray_count {
                let (wi, wj) = (self.gale[i], self.gale[j]);
                if cross2(wi, wj) == 0 {
                    continue;
                }
                let (a, b) = if cross2(wi, wj) > 0 {
                    (wi, wj)
                } else {
                    (wj, wi)
                };
                if strictly_inside(probe, a, b) {
                    cones.push(Cone::new(
                        (0..ray_count).filter(|&k| k != i && k != j).collect(),
                    ));
                }
            }
        }
        let fan = Fan::new(self.fan.rays().to_vec(), cones)?;
        if fan.rays().len() != ray_count {
            return Err(Error::degenerate("small crossing lost a ray"));
        }
        RankTwoModel::new(fan, &crossing.relation.neg())
    }

    /// Executes a divisorial contraction: removes the unique negative ray
    /// and returns the target simplex together with the removed ray and its
    /// index in the old ray table.
    pub fn contract_divisor(&self, crossing: &WallCrossing) -> Result<(SimplexVariety, usize)> {
        if crossing.kind != CrossingKind::Divisorial {
            return Err(Error::arg(format!(
                "{} crossing is not divisorial",
                crossing.kind
            )));
        }
        let removed = crossing.negative_support()[0];
        let rays: Vec<IntVec> = self
            .fan
            .rays()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != removed)
            .map(|(_, r)| r.clone())
            .collect();
        let target = SimplexVariety::from_rays(rays)?;
        Ok((target, removed))
    }

    /// Splits the model along a fibration crossing into fibre and base
    /// simplex varieties.
    pub fn fibration_data(
        &self,
        crossing: &WallCrossing,
    ) -> Result<(SimplexVariety, SimplexVariety)> {
        if crossing.kind != CrossingKind::Fibration {
            return Err(Error::arg(format!(
                "{} crossing is not a fibration",
                crossing.kind
            )));
        }
        let fibre_rays_idx = crossing.positive_support();
        let base_rays_idx = crossing.spectators();
        if base_rays_idx.len() < 2 {
            return Err(Error::degenerate(
                "fibration without a positive-dimensional base",
            ));
        }
        let n = self.fan.dim();
        let fibre_dim = fibre_rays_idx.len() - 1;
        let fibre_cols: Vec<IntVec> = fibre_rays_idx
            .iter()
            .map(|&i| self.fan.rays()[i].clone())
            .collect();
        let smith = IntMat::from_cols(&fibre_cols).smith();
        if smith.rank() != fibre_dim {
            return Err(Error::degenerate("fibre rays have unexpected rank"));
        }
        // saturated basis of the fibre span: the first rank columns of U^-1
        let sat_basis: Vec<IntVec> = (0..fibre_dim).map(|i| smith.u_inv.col(i)).collect();
        let fibre_rays = fibre_cols
            .iter()
            .map(|r| in_lattice_coords(&sat_basis, r))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::degenerate("fibre ray outside its saturated span"))?;
        let fibre = SimplexVariety::from_rays(fibre_rays)?;
        // quotient projection: the rows of U past the rank
        let base_rays = base_rays_idx
            .iter()
            .map(|&i| {
                let full = smith.u.mul_vec(&self.fan.rays()[i]);
                let img = IntVec(full.0[fibre_dim..n].to_vec());
                let (prim, _) = img.primitive_part()?;
                Ok(prim)
            })
            .collect::<Result<Vec<_>>>()?;
        let base = SimplexVariety::from_rays(base_rays)?;
        debug_assert_eq!(
            fibre.weights().to_vec(),
            fibre_rays_idx
                .iter()
                .map(|&i| crossing.relation[i])
                .collect::<Vec<_>>(),
            "fibre weights must match the fibration relation"
        );
        Ok((fibre, base))
    }

    /// The midpoint of a flop: the common contraction of both sides, a
    /// rank-1 Fano with non-simplicial spanning fan.
    pub fn flop_base(&self, crossing: &WallCrossing) -> Result<MidpointFan> {
        if crossing.kind != CrossingKind::Flop {
            return Err(Error::arg(format!(
                "{} crossing is not a flop",
                crossing.kind
            )));
        }
        let wall = crossing.wall;
        let ray_count = self.fan.rays().len();
        let mut cones: Vec<Vec<usize>> = Vec::new();
        for k in 0..ray_count {
            let w = self.gale[k];
            if cross2(w, wall) == 0 && dot2(w, wall) > 0 {
                cones.push((0..ray_count).filter(|&i| i != k).collect());
            }
        }
        for i in 0..ray_count {
            for j in i + 1..ray_count {
                let (wi, wj) = (self.gale[i], self.gale[j]);
                if cross2(wi, wj) == 0 {
                    continue;
                }
                let (a, b) = if cross2(wi, wj) > 0 {
                    (wi, wj)
                } else {
                    (wj, wi)
                };
                if strictly_inside(wall, a, b) {
                    cones.push((0..ray_count).filter(|&k| k != i && k != j).collect());
                }
            }
        }
        cones.sort();
        let gorenstein = gorenstein_data(self.fan.rays())?;
        Ok(MidpointFan {
            rays: self.fan.rays().to_vec(),
            cones,
            gorenstein,
        })
    }
}

/// The amalgamated (non-simplicial) fan of a flop midpoint with its
/// anticanonical data.
#[derive(Clone, Debug)]
pub struct MidpointFan {
    pub rays: Vec<IntVec>,
    pub cones: Vec<Vec<usize>>,
    pub gorenstein: GorensteinData,
}

/// Integer coordinates of `v` in a rank-2 lattice basis, if `v` lies in it.
fn in_kernel_coords(basis: &[IntVec], v: &IntVec) -> Option<[i64; 2]> {
    // pick two coordinate positions where the basis is nonsingular
    let m = v.dim();
    for p in 0..m {
        for q in p + 1..m {
            let det = basis[0][p] * basis[1][q] - basis[0][q] * basis[1][p];
            if det == 0 {
                continue;
            }
            let num_a = v[p] * basis[1][q] - v[q] * basis[1][p];
            let num_b = basis[0][p] * v[q] - basis[0][q] * v[p];
            if num_a % det != 0 || num_b % det != 0 {
                return None;
            }
            let (a, b) = (num_a / det, num_b / det);
            let rec = basis[0].scaled(a).add(&basis[1].scaled(b));
            return (&rec == v).then_some([a, b]);
        }
    }
    None
}

/// Integer coordinates of `v` in the lattice spanned by `basis` (full
/// column rank), if integral.
fn in_lattice_coords(basis: &[IntVec], v: &IntVec) -> Option<IntVec> {
    let k = basis.len();
    let n = v.dim();
    // choose k independent rows
    let mut rows: Vec<usize> = Vec::new();
    for r in 0..n {
        let mut trial = rows.clone();
        trial.push(r);
        let m = IntMat::from_rows(
            &trial
                .iter()
                .map(|&ri| IntVec(basis.iter().map(|b| b[ri]).collect()))
                .collect::<Vec<_>>(),
        );
        if m.rank() == trial.len() {
            rows = trial;
        }
        if rows.len() == k {
            break;
        }
    }
    if rows.len() < k {
        return None;
    }
    let m = IntMat::from_rows(
        &rows
            .iter()
            .map(|&ri| IntVec(basis.iter().map(|b| b[ri]).collect()))
            .collect::<Vec<_>>(),
    );
    let rhs = IntVec(rows.iter().map(|&ri| v[ri]).collect());
    let sol = m.solve(&rhs)?;
    let coords: Option<Vec<i64>> = sol.iter().map(|c| c.as_integer()).collect();
    let coords = IntVec(coords?);
    // verify on all rows
    let mut rec = IntVec::zero(n);
    for (b, &c) in basis.iter().zip(&coords.0) {
        rec = rec.add(&b.scaled(c));
    }
    (&rec == v).then_some(coords)
}

/// `(x, y)` with `a * y - b * x = 1` for coprime `(a, b)`.
fn bezout_complement(a: i64, b: i64) -> (i64, i64) {
    // extended gcd: find s, t with s*a + t*b = 1, then (x, y) = (-t, s)
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert!(r0 == 1 || r0 == -1);
    if r0 < 0 {
        s0 = -s0;
        t0 = -t0;
    }
    (-t0, s0)
}

/// Reduce `b1` modulo multiples of `b0` to the representative of smallest
/// coefficient sum (ties to the smaller shift).
fn shear_reduce(b1: &IntVec, b0: &IntVec) -> IntVec {
    let bound: i64 = b1.0.iter().map(|c| c.abs()).max().unwrap_or(0) + 1;
    let mut best = b1.clone();
    let mut best_score: i64 = best.0.iter().map(|c| c.abs()).sum();
    for k in -bound..=bound {
        let cand = b1.add(&b0.scaled(k));
        let score: i64 = cand.0.iter().map(|c| c.abs()).sum();
        if score < best_score {
            best = cand;
            best_score = score;
        }
    }
    best
}

fn sorted_directions(gale: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut dirs: Vec<[i64; 2]> = gale.iter().map(|&w| primitive2(w)).collect();
    dirs.sort_by(|&a, &b| {
        if a == b {
            std::cmp::Ordering::Equal
        } else if angle_lt(a, b) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    dirs.dedup();
    dirs
}

/// The oriented Gale cones spanned by each max cone's omitted ray pair.
fn complement_pairs(fan: &Fan, gale: &[[i64; 2]]) -> Result<Vec<([i64; 2], [i64; 2])>> {
    let ray_count = fan.rays().len();
    let mut pairs = Vec::with_capacity(fan.cones().len());
    for cone in fan.cones() {
        let omitted: Vec<usize> = (0..ray_count).filter(|i| !cone.contains_ray(*i)).collect();
        if omitted.len() != 2 {
            return Err(Error::degenerate("top cone does not omit exactly two rays"));
        }
        let (wi, wj) = (gale[omitted[0]], gale[omitted[1]]);
        let c = cross2(wi, wj);
        if c == 0 {
            return Err(Error::degenerate("degenerate Gale pair for a top cone"));
        }
        pairs.push(if c > 0 { (wi, wj) } else { (wj, wi) });
    }
    Ok(pairs)
}

fn crossing_at(
    b0: &IntVec,
    b1: &IntVec,
    gale: &[[i64; 2]],
    wall: [i64; 2],
    interior: [i64; 2],
) -> WallCrossing {
    let mut alpha = -wall[1];
    let mut beta = wall[0];
    if alpha * interior[0] + beta * interior[1] < 0 {
        alpha = -alpha;
        beta = -beta;
    }
    let relation = b0.scaled(alpha).add(&b1.scaled(beta));
    debug_assert_eq!(relation.gcd(), 1, "wall relation must be primitive");
    debug_assert!(gale
        .iter()
        .zip(&relation.0)
        .all(|(w, &r)| w[0] * alpha + w[1] * beta == r));
    let k_degree: i64 = relation.0.iter().sum();
    let neg = relation.0.iter().filter(|&&x| x < 0).count();
    let pos = relation.0.iter().filter(|&&x| x > 0).count();
    let kind = match neg {
        0 => CrossingKind::Fibration,
        1 => CrossingKind::Divisorial,
        _ => {
            debug_assert!(pos >= 2, "small crossing needs two positive entries");
            match k_degree.cmp(&0) {
                std::cmp::Ordering::Greater => CrossingKind::Flip,
                std::cmp::Ordering::Equal => CrossingKind::Flop,
                std::cmp::Ordering::Less => CrossingKind::Antiflip,
            }
        }
    };
    WallCrossing {
        relation,
        kind,
        k_degree,
        wall,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::Rat;

    fn v(c: &[i64]) -> IntVec {
        IntVec(c.to_vec())
    }

    fn p3() -> SimplexVariety {
        SimplexVariety::from_rays(vec![
            v(&[1, 0, 0]),
            v(&[0, 1, 0]),
            v(&[0, 0, 1]),
            v(&[-1, -1, -1]),
        ])
        .unwrap()
    }

    /// P^3 blown up along the line through the first two coordinate points.
    fn blown_line_model() -> RankTwoModel {
        let fan = p3().fan().star_subdivide(&v(&[1, 1, 0])).unwrap();
        // blowdown relation: e1 + e2 - v5 = 0
        RankTwoModel::new(fan, &v(&[1, 1, 0, 0, -1])).unwrap()
    }

    #[test]
    fn gale_table_reconstructs_kernel() {
        let m = blown_line_model();
        let [b0, b1] = m.kernel_basis();
        // both basis vectors are ray relations
        for b in [b0, b1] {
            let mut acc = IntVec::zero(3);
            for (i, r) in m.fan().rays().iter().enumerate() {
                acc = acc.add(&r.scaled(b[i]));
            }
            assert!(acc.is_zero());
        }
        assert_eq!(b0, &v(&[1, 1, 0, 0, -1]));
        // the Gale table is exactly the basis coordinates
        for (i, w) in m.gale().iter().enumerate() {
            assert_eq!(*w, [b0[i], b1[i]]);
        }
    }

    #[test]
    fn blown_line_has_blowdown_and_fibration() {
        let m = blown_line_model();
        assert_eq!(m.incoming().kind, CrossingKind::Divisorial);
        assert_eq!(m.incoming().relation, v(&[1, 1, 0, 0, -1]));
        assert_eq!(m.outgoing().kind, CrossingKind::Fibration);
        assert_eq!(m.outgoing().relation, v(&[0, 0, 1, 1, 1]));
    }

    #[test]
    fn blown_line_fibration_splits_p2_over_p1() {
        let m = blown_line_model();
        let (fibre, base) = m.fibration_data(m.outgoing()).unwrap();
        assert_eq!(fibre.weights_sorted(), vec![1, 1, 1]);
        assert!(fibre.discriminant().is_empty());
        assert_eq!(base.weights_sorted(), vec![1, 1]);
    }

    #[test]
    fn point_blowup_gives_p1_fibration() {
        // blowing up a point of P^3: the exceptional side is a P^1 bundle
        let fan = p3().fan().star_subdivide(&v(&[1, 1, 1])).unwrap();
        let m = RankTwoModel::new(fan, &v(&[1, 1, 1, 0, -1])).unwrap();
        assert_eq!(m.outgoing().kind, CrossingKind::Fibration);
        let (fibre, base) = m.fibration_data(m.outgoing()).unwrap();
        assert_eq!(fibre.weights_sorted(), vec![1, 1]);
        assert_eq!(base.weights_sorted(), vec![1, 1, 1]);
    }

    #[test]
    fn divisorial_contraction_recovers_p3() {
        let m = blown_line_model();
        let (target, removed) = m.contract_divisor(m.incoming()).unwrap();
        assert_eq!(removed, 4);
        assert_eq!(target.weights_sorted(), vec![1, 1, 1, 1]);
        assert_eq!(target.key(), p3().key());
    }

    /// The explicit flip of the fake projective space link: subdividing
    /// <v1, v3, v4, v5> the other way.
    #[test]
    fn quotient_space_flip() {
        let x = SimplexVariety::from_rays(vec![
            v(&[0, 1, 1]),
            v(&[-1, 0, -2]),
            v(&[-1, -2, 1]),
            v(&[2, 1, 0]),
        ])
        .unwrap();
        let y1_fan = x.fan().star_subdivide(&v(&[1, 1, 0])).unwrap();
        // 5 v5 = 2 v1 + 1 v2 + 3 v4
        let y1 = RankTwoModel::new(y1_fan, &v(&[2, 1, 0, 3, -5])).unwrap();
        assert_eq!(y1.incoming().kind, CrossingKind::Divisorial);
        let flip = y1.outgoing();
        assert_eq!(flip.kind, CrossingKind::Flip);
        // 5 v5 + v3 = v1 + 2 v4: relation (-1, 0, 1, -2, 5)
        assert_eq!(flip.relation, v(&[-1, 0, 1, -2, 5]));
        assert_eq!(flip.k_degree, 3);

        let y2 = y1.cross_small(flip).unwrap();
        // shed volume strictly drops across a flip
        assert!(y2.fan().shed_volume() < y1.fan().shed_volume());
        // crossing back is an involution
        let back = y2.cross_small(y2.incoming()).unwrap();
        assert_eq!(back.snapshot_key(), y1.snapshot_key());

        // the other contraction of Y2 closes the link onto P(1,2,3,5)
        assert_eq!(y2.outgoing().kind, CrossingKind::Divisorial);
        assert_eq!(y2.outgoing().relation, v(&[0, 1, 2, -1, 5]));
        let (target, removed) = y2.contract_divisor(y2.outgoing()).unwrap();
        assert_eq!(removed, 3);
        assert_eq!(target.weights_sorted(), vec![1, 2, 3, 5]);
        assert!(target.discriminant().is_empty());
    }

    #[test]
    fn flop_preserves_shed_volume_and_has_gorenstein_base() {
        // P^4 blown up at a (1,1,2,2)-weighted point starts with a flop
        let p4 = SimplexVariety::wps(&[1, 1, 1, 1, 1]).unwrap();
        let rays = p4.fan().rays().to_vec();
        let pt = rays[0]
            .scaled(1)
            .add(&rays[1].scaled(1))
            .add(&rays[2].scaled(2))
            .add(&rays[3].scaled(2));
        let y1_fan = p4.fan().star_subdivide(&pt).unwrap();
        let mut incoming = vec![1, 1, 2, 2, 0, -1];
        incoming.resize(6, 0);
        let y1 = RankTwoModel::new(y1_fan, &IntVec(incoming)).unwrap();
        let out = y1.outgoing();
        assert_eq!(out.kind, CrossingKind::Flop);
        assert_eq!(out.k_degree, 0);

        let base = y1.flop_base(out).unwrap();
        assert!(!base.cones.is_empty());
        assert!(
            base.cones.iter().any(|c| c.len() == 5),
            "flop base has an amalgamated cone"
        );

        let y2 = y1.cross_small(out).unwrap();
        assert_eq!(y2.fan().shed_volume(), y1.fan().shed_volume());
        assert!(y1.fan().is_terminal() && y2.fan().is_terminal());
    }

    #[test]
    fn kind_matches_roof_hyperplane_test() {
        // reconstruct the hyperplane criterion: take an incoming cone of the
        // circuit, evaluate its support covector on the omitted positive ray
        let examples: Vec<RankTwoModel> = vec![blown_line_model(), {
            let x = SimplexVariety::from_rays(vec![
                v(&[0, 1, 1]),
                v(&[-1, 0, -2]),
                v(&[-1, -2, 1]),
                v(&[2, 1, 0]),
            ])
            .unwrap();
            let f = x.fan().star_subdivide(&v(&[1, 1, 0])).unwrap();
            RankTwoModel::new(f, &v(&[2, 1, 0, 3, -5])).unwrap()
        }];
        for m in &examples {
            for crossing in [m.incoming(), m.outgoing()] {
                if !crossing.kind.is_small() {
                    continue;
                }
                let pos = crossing.positive_support();
                let j = pos[0];
                let mut cone_rays: Vec<usize> = (0..m.fan().rays().len())
                    .filter(|&i| i != j && crossing.relation[i] != 0)
                    .collect();
                cone_rays.extend(crossing.spectators());
                cone_rays.sort_unstable();
                let ci = m
                    .fan()
                    .cones()
                    .iter()
                    .position(|c| {
                        let mut needed: Vec<usize> = (0..m.fan().rays().len())
                            .filter(|&i| crossing.relation[i] != 0 && i != j)
                            .collect();
                        needed.sort_unstable();
                        needed.iter().all(|r| c.contains_ray(*r))
                    })
                    .expect("incoming cone of the circuit exists");
                let val = m.fan().covector(ci).eval(&m.fan().rays()[j]);
                match crossing.kind {
                    CrossingKind::Flip => assert!(val < Rat::ONE),
                    CrossingKind::Flop => assert_eq!(val, Rat::ONE),
                    CrossingKind::Antiflip => assert!(val > Rat::ONE),
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn from_fan_is_deterministic() {
        let fan = p3().fan().star_subdivide(&v(&[1, 1, 0])).unwrap();
        let a = RankTwoModel::from_fan(fan.clone()).unwrap();
        let b = RankTwoModel::from_fan(fan).unwrap();
        assert_eq!(a.incoming().relation, b.incoming().relation);
        assert_eq!(a.gale(), b.gale());
    }
}
