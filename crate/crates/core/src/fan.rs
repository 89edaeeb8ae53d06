//! Complete simplicial fans and the predicates of toric Fano geometry.
//!
//! A [`Fan`] is validated on construction: rays primitive and distinct, top
//! cones simplicial, every interior facet shared by exactly two cones lying
//! on opposite sides, and a generic point covered exactly once.  Everything
//! downstream (terminality, discrepancies, the two-ray game) assumes these
//! invariants, so there is no unchecked constructor.
//!
//! A [`SimplexVariety`] is a complete simplex fan on `n + 1` rays: a fake
//! weighted projective space, carrying its weights, discriminant group and
//! normal-form key.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lattice::{box_point_of_scaled, box_points_scaled, gcd, lcm, IntMat, IntVec};
use crate::normal_form::{normal_form, NormalFormKey};
use crate::rat::Rat;
use crate::Result;

/// A top-dimensional simplicial cone, as sorted indices into the ray table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Cone {
    pub rays: Vec<usize>,
}

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Cone {
        rays.sort_unstable();
        Cone { rays }
    }

    pub fn contains_ray(&self, i: usize) -> bool {
        self.rays.binary_search(&i).is_ok()
    }
}

/// The linear form evaluating to 1 on every primitive generator of one top
/// cone, stored both rationally and as a cleared-denominator integral pair
/// `form / level`.
#[derive(Clone, Debug)]
pub struct Covector {
    pub coeffs: Vec<Rat>,
    pub form: IntVec,
    pub level: i64,
}

impl Covector {
    pub fn eval(&self, v: &IntVec) -> Rat {
        Rat::new(self.form.dot(v), self.level)
    }
}

/// A complete simplicial fan.
#[derive(Clone)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVec>,
    cones: Vec<Cone>,
    covectors: Vec<Covector>,
    cone_dets: Vec<i64>,
}

impl Fan {
    pub fn new(rays: Vec<IntVec>, cones: Vec<Cone>) -> Result<Fan> {
        if rays.is_empty() {
            return Err(Error::invalid_fan("no rays"));
        }
        let dim = rays[0].dim();
        if dim == 0 {
            return Err(Error::invalid_fan("ambient dimension must be positive"));
        }
        if dim == 1 {
            // the only complete fan on a line: rays +1 and -1
            let mut sorted = rays.clone();
            sorted.sort();
            if sorted != vec![IntVec(vec![-1]), IntVec(vec![1])]
                || cones.len() != 2
                || cones.iter().any(|c| c.rays.len() != 1)
                || cones[0].rays == cones[1].rays
                || cones.iter().any(|c| c.rays[0] >= 2)
            {
                return Err(Error::invalid_fan(
                    "a complete fan on a line has rays +1 and -1",
                ));
            }
            let covectors = cones
                .iter()
                .map(|c| {
                    let r = &rays[c.rays[0]];
                    Covector {
                        coeffs: vec![Rat::int(r[0])],
                        form: r.clone(),
                        level: 1,
                    }
                })
                .collect();
            return Ok(Fan {
                dim,
                rays,
                cones,
                covectors,
                cone_dets: vec![1, 1],
            });
        }
        for r in &rays {
            if r.dim() != dim {
                return Err(Error::invalid_fan("rays of mixed dimension"));
            }
            if r.is_zero() {
                return Err(Error::invalid_fan("zero ray"));
            }
            if !r.is_primitive() {
                return Err(Error::invalid_fan(format!("ray {r} is not primitive")));
            }
        }
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if rays[i] == rays[j] {
                    return Err(Error::invalid_fan(format!("duplicate ray {}", rays[i])));
                }
            }
        }
        if cones.is_empty() {
            return Err(Error::invalid_fan("no top cones"));
        }
        let mut used = vec![false; rays.len()];
        let mut cone_dets = Vec::with_capacity(cones.len());
        for cone in &cones {
            if cone.rays.len() != dim {
                return Err(Error::invalid_fan("top cone with wrong number of rays"));
            }
            if cone.rays.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid_fan(
                    "cone ray indices not sorted and distinct",
                ));
            }
            if cone.rays.iter().any(|&i| i >= rays.len()) {
                return Err(Error::invalid_fan("cone ray index out of range"));
            }
            let det = IntMat::from_cols(
                &cone
                    .rays
                    .iter()
                    .map(|&i| rays[i].clone())
                    .collect::<Vec<_>>(),
            )
            .det();
            if det == 0 {
                return Err(Error::invalid_fan("degenerate top cone"));
            }
            for &i in &cone.rays {
                used[i] = true;
            }
            cone_dets.push(det.abs());
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::invalid_fan(format!(
                "ray {} not used by any cone",
                rays[i]
            )));
        }

        let fan = Fan {
            dim,
            rays,
            cones,
            covectors: Vec::new(),
            cone_dets,
        };
        fan.check_facet_pairing()?;
        fan.check_single_cover()?;
        let covectors = fan
            .cones
            .iter()
            .map(|c| fan.compute_covector(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Fan { covectors, ..fan })
    }

    /// The spanning fan of a simplex: `n + 1` rays, one top cone per omitted
    /// ray.
    pub fn simplex(rays: Vec<IntVec>) -> Result<Fan> {
        let dim = rays.first().map_or(0, IntVec::dim);
        if rays.len() != dim + 1 {
            return Err(Error::invalid_fan(format!(
                "a simplex fan in dimension {dim} needs {} rays, got {}",
                dim + 1,
                rays.len()
            )));
        }
        let cones = (0..rays.len())
            .map(|omit| Cone::new((0..rays.len()).filter(|&i| i != omit).collect()))
            .collect();
        Fan::new(rays, cones)
    }

    fn check_facet_pairing(&self) -> Result<()> {
        // each facet (as a ray subset) must appear in exactly two top cones,
        // with the two omitted rays strictly on opposite sides
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for cone in &self.cones {
            for omit in 0..cone.rays.len() {
                let facet: Vec<usize> = cone
                    .rays
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != omit)
                    .map(|(_, &r)| r)
                    .collect();
                facets.entry(facet).or_default().push(cone.rays[omit]);
            }
        }
        for (facet, opposite) in &facets {
            if opposite.len() != 2 {
                return Err(Error::invalid_fan(format!(
                    "facet {facet:?} belongs to {} top cones instead of 2",
                    opposite.len()
                )));
            }
            let m = IntMat::from_rows(
                &facet
                    .iter()
                    .map(|&i| self.rays[i].clone())
                    .collect::<Vec<_>>(),
            );
            let kernel = m.kernel_basis();
            if kernel.len() != 1 {
                return Err(Error::invalid_fan("facet does not span a hyperplane"));
            }
            let h = &kernel[0];
            let a = h.dot(&self.rays[opposite[0]]);
            let b = h.dot(&self.rays[opposite[1]]);
            if a == 0 || b == 0 || (a > 0) == (b > 0) {
                return Err(Error::invalid_fan(format!(
                    "cones across facet {facet:?} do not lie on opposite sides"
                )));
            }
        }
        Ok(())
    }

    fn check_single_cover(&self) -> Result<()> {
        // a deterministic generic point must lie in exactly one top cone
        let base = &self.cones[0];
        'try_t: for t in 1..=64i64 {
            let mut p = IntVec::zero(self.dim);
            let mut scale = 1i64;
            for &ri in &base.rays {
                p = p.add(&self.rays[ri].scaled(scale));
                scale = scale
                    .checked_mul(t)
                    .ok_or_else(|| Error::invalid_fan("cover check overflow"))?;
            }
            // p must avoid every facet hyperplane to count as generic
            for cone in &self.cones {
                for omit in 0..cone.rays.len() {
                    let facet: Vec<IntVec> = cone
                        .rays
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != omit)
                        .map(|(_, &r)| self.rays[r].clone())
                        .collect();
                    let kernel = IntMat::from_rows(&facet).kernel_basis();
                    if kernel.len() == 1 && kernel[0].dot(&p) == 0 {
                        continue 'try_t;
                    }
                }
            }
            let mut count = 0;
            for cone in &self.cones {
                let m = self.cone_matrix(cone);
                if let Some(sol) = m.solve(&p) {
                    if sol.iter().all(|c| *c > Rat::ZERO) {
                        count += 1;
                    }
                }
            }
            if count == 1 {
                return Ok(());
            }
            return Err(Error::invalid_fan(format!(
                "generic point covered {count} times; fan does not tile space"
            )));
        }
        Err(Error::invalid_fan(
            "could not find a generic point for the cover check",
        ))
    }

    fn cone_matrix(&self, cone: &Cone) -> IntMat {
        IntMat::from_cols(
            &cone
                .rays
                .iter()
                .map(|&i| self.rays[i].clone())
                .collect::<Vec<_>>(),
        )
    }

    fn compute_covector(&self, cone: &Cone) -> Result<Covector> {
        let m = self.cone_matrix(cone).transpose();
        let ones = IntVec(vec![1; self.dim]);
        let coeffs = m
            .solve(&ones)
            .ok_or_else(|| Error::degenerate("degenerate cone"))?;
        let level = coeffs.iter().fold(1i64, |l, c| lcm(l, c.den()));
        let form = IntVec(coeffs.iter().map(|c| c.num() * (level / c.den())).collect());
        Ok(Covector {
            coeffs,
            form,
            level,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn covector(&self, cone_index: usize) -> &Covector {
        &self.covectors[cone_index]
    }

    pub fn cone_det(&self, cone_index: usize) -> i64 {
        self.cone_dets[cone_index]
    }

    pub fn ray_index(&self, v: &IntVec) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// The first top cone containing `v`, with barycentric coordinates.
    pub fn cone_containing(&self, v: &IntVec) -> (usize, Vec<Rat>) {
        for (ci, cone) in self.cones.iter().enumerate() {
            let m = self.cone_matrix(cone);
            if let Some(sol) = m.solve(v) {
                if sol.iter().all(|c| *c >= Rat::ZERO) {
                    return (ci, sol);
                }
            }
        }
        unreachable!("complete fan must contain every point")
    }

    /// `psi(v) - 1` for the piecewise-linear support function with
    /// `psi = 1` on the primitive ray generators.
    pub fn discrepancy(&self, v: &IntVec) -> Result<Rat> {
        if v.is_zero() {
            return Err(Error::arg("discrepancy of the zero vector"));
        }
        let (ci, _) = self.cone_containing(v);
        Ok(self.covectors[ci].eval(v) - Rat::ONE)
    }

    /// A nonzero box point with `psi <= 1` (breaking terminality), if any.
    pub fn terminal_witness(&self) -> Option<(IntVec, Rat)> {
        self.singular_witness(false)
    }

    /// A nonzero box point with `psi < 1` (breaking canonicity), if any.
    pub fn canonical_witness(&self) -> Option<(IntVec, Rat)> {
        self.singular_witness(true)
    }

    fn singular_witness(&self, strict_interior: bool) -> Option<(IntVec, Rat)> {
        for (ci, cone) in self.cones.iter().enumerate() {
            if self.cone_dets[ci] == 1 {
                continue;
            }
            let rays: Vec<IntVec> = cone.rays.iter().map(|&i| self.rays[i].clone()).collect();
            let (d, scaled) = box_points_scaled(&rays).expect("cone rays are independent");
            for t in scaled {
                // psi of the box point is the scaled coordinate sum over d
                let sum: i64 = t.iter().sum();
                if sum == 0 {
                    continue;
                }
                let bad = if strict_interior { sum < d } else { sum <= d };
                if bad {
                    let p = box_point_of_scaled(&rays, d, &t);
                    return Some((p, Rat::new(sum, d) - Rat::ONE));
                }
            }
        }
        None
    }

    /// No lattice points in the shed except its vertices and the origin.
    pub fn is_terminal(&self) -> bool {
        self.terminal_witness().is_none()
    }

    /// No lattice points strictly inside the shed except the origin.
    pub fn is_canonical(&self) -> bool {
        self.canonical_witness().is_none()
    }

    /// True when the fan is the spanning fan of the convex hull of its rays,
    /// i.e. the support function is strictly convex across every wall.
    pub fn is_fano(&self) -> bool {
        for (ci, cone) in self.cones.iter().enumerate() {
            for (ri, ray) in self.rays.iter().enumerate() {
                if !cone.contains_ray(ri) && self.covectors[ci].eval(ray) >= Rat::ONE {
                    return false;
                }
            }
        }
        true
    }

    /// Normalized volume of the shed: `sum |det(cone)| / n!`.
    pub fn shed_volume(&self) -> Rat {
        let factorial: i64 = (1..=self.dim as i64).product();
        let mut total = Rat::ZERO;
        for &d in &self.cone_dets {
            total = total + Rat::new(d, factorial);
        }
        total
    }

    /// The subdivision of the fan by the ray through a new primitive vertex.
    pub fn star_subdivide(&self, v: &IntVec) -> Result<Fan> {
        if v.is_zero() {
            return Err(Error::arg("cannot subdivide at the origin"));
        }
        if !v.is_primitive() {
            return Err(Error::arg(format!(
                "subdivision point {v} is not primitive"
            )));
        }
        if self.ray_index(v).is_some() {
            return Err(Error::arg(format!("{v} is already a ray of the fan")));
        }
        let new_ray = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v.clone());
        let mut cones = Vec::new();
        for cone in &self.cones {
            let m = self.cone_matrix(cone);
            let sol = m.solve(v).expect("top cones are nonsingular");
            if sol.iter().all(|c| *c >= Rat::ZERO) {
                // join v to the facets of the cone that do not contain it
                for (k, t) in sol.iter().enumerate() {
                    if *t > Rat::ZERO {
                        let mut idx: Vec<usize> = cone
                            .rays
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != k)
                            .map(|(_, &r)| r)
                            .collect();
                        idx.push(new_ray);
                        cones.push(Cone::new(idx));
                    }
                }
            } else {
                cones.push(cone.clone());
            }
        }
        Fan::new(rays, cones)
    }
}

impl std::fmt::Debug for Fan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fan(dim {}, rays", self.dim)?;
        for r in &self.rays {
            write!(f, " {r}")?;
        }
        write!(f, ", cones")?;
        for c in &self.cones {
            write!(f, " {:?}", c.rays)?;
        }
        write!(f, ")")
    }
}

/// Summary of a simplex variety for records and dedup: sorted weights,
/// discriminant invariant factors and the normal-form key.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct VarietyInfo {
    pub weights: Vec<i64>,
    pub discriminant: Vec<i64>,
    pub key: NormalFormKey,
}

impl VarietyInfo {
    /// Table-style name, e.g. `P(1,2,3,5)` or `P(1,1,1,1)/5`.
    pub fn name(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(|a| a.to_string()).collect();
        let mut s = format!("P({})", w.join(","));
        if !self.discriminant.is_empty() {
            let d: Vec<String> = self.discriminant.iter().map(|d| d.to_string()).collect();
            s.push('/');
            s.push_str(&d.join("x"));
        }
        s
    }
}

/// A fake weighted projective space: a complete simplex fan with cached
/// weights, discriminant group and normal-form key.
#[derive(Clone, Debug)]
pub struct SimplexVariety {
    fan: Fan,
    weights: Vec<i64>,
    discriminant: Vec<i64>,
    key: NormalFormKey,
}

impl SimplexVariety {
    pub fn from_rays(rays: Vec<IntVec>) -> Result<SimplexVariety> {
        let dim = rays.first().map_or(0, IntVec::dim);
        if rays.len() != dim + 1 {
            return Err(Error::degenerate(format!(
                "a simplex variety in dimension {dim} needs {} rays",
                dim + 1
            )));
        }
        let m = IntMat::from_cols(&rays);
        let kernel = m.kernel_basis();
        if kernel.len() != 1 {
            return Err(Error::degenerate("rays do not span the ambient space"));
        }
        let mut weights = kernel.into_iter().next().unwrap();
        if weights.0.iter().all(|&w| w < 0) {
            weights = weights.neg();
        }
        if weights.0.iter().any(|&w| w <= 0) {
            return Err(Error::degenerate(
                "ray relation is not positive; the simplex does not contain the origin",
            ));
        }
        let discriminant = m.smith().torsion();
        let fan = Fan::simplex(rays)?;
        let key = normal_form(fan.rays())?;
        Ok(SimplexVariety {
            fan,
            weights: weights.0,
            discriminant,
            key,
        })
    }

    /// The weighted projective space `P(a_0, ..., a_n)` on a canonical ray
    /// basis.  Requires a well-formed system: every `n` of the `n + 1`
    /// weights coprime.
    pub fn wps(weights: &[i64]) -> Result<SimplexVariety> {
        if weights.len() < 3 {
            return Err(Error::arg("need at least three weights"));
        }
        if weights.iter().any(|&a| a <= 0) {
            return Err(Error::arg("weights must be positive"));
        }
        for omit in 0..weights.len() {
            let g = weights
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != omit)
                .fold(0, |g, (_, &a)| gcd(g, a));
            if g != 1 {
                return Err(Error::arg(format!(
                    "weight system {weights:?} is not well-formed (gcd omitting position {omit} is {g})"
                )));
            }
        }
        // the quotient Z^{n+1} / Z.weights is free of rank n; read the rays
        // off a unimodular transform sending the weight vector to e_1
        let col = IntMat::from_cols(&[IntVec(weights.to_vec())]);
        let smith = col.smith();
        debug_assert_eq!(smith.diag, vec![1]);
        let n = weights.len() - 1;
        let sign = smith.v[(0, 0)];
        let rays: Vec<IntVec> = (0..weights.len())
            .map(|i| IntVec((1..=n).map(|r| sign * smith.u[(r, i)]).collect()))
            .collect();
        SimplexVariety::from_rays(rays)
    }

    /// Quotient of `P(weights)` by the cyclic action `1/r(c_0, ..., c_n)`:
    /// the lattice is enlarged by the point `(1/r) sum c_i v_i`.
    pub fn fake_quotient(weights: &[i64], r: i64, action: &[i64]) -> Result<SimplexVariety> {
        if r <= 1 {
            return Err(Error::arg("quotient order must be at least 2"));
        }
        if action.len() != weights.len() {
            return Err(Error::arg("action must assign one weight per coordinate"));
        }
        let base = SimplexVariety::wps(weights)?;
        let n = base.fan.dim();
        let mut w = IntVec::zero(n);
        for (i, &c) in action.iter().enumerate() {
            w = w.add(&base.fan.rays()[i].scaled(c));
        }
        // lattice generated by r*Z^n and w, scaled back down by r afterwards
        let mut gens: Vec<IntVec> = (0..n)
            .map(|i| {
                let mut e = IntVec::zero(n);
                e[i] = r;
                e
            })
            .collect();
        gens.push(w.clone());
        let m = IntMat::from_cols(&gens);
        let smith = m.smith();
        if smith.rank() < n {
            return Err(Error::degenerate("quotient lattice degenerate"));
        }
        let basis: Vec<IntVec> = (0..n)
            .map(|i| smith.u_inv.col(i).scaled(smith.diag[i]))
            .collect();
        let b = IntMat::from_cols(&basis);
        // the enlarged lattice (1/r) * span(basis) must contain Z^n with
        // index exactly r
        let det_b = (b.det() as i128).abs();
        let rn = (r as i128).pow(n as u32);
        if rn % det_b != 0 || rn / det_b != r as i128 {
            return Err(Error::arg(format!(
                "action 1/{r}{action:?} does not generate a quotient of order {r}"
            )));
        }
        let rays = base
            .fan
            .rays()
            .iter()
            .map(|x| {
                let sol = b
                    .solve(&x.scaled(r))
                    .ok_or_else(|| Error::degenerate("singular basis"))?;
                let coords: Vec<i64> = sol
                    .iter()
                    .map(|c| {
                        c.as_integer().ok_or_else(|| {
                            Error::degenerate("non-integral ray in quotient lattice")
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(IntVec(coords))
            })
            .collect::<Result<Vec<_>>>()?;
        for ray in &rays {
            if !ray.is_primitive() {
                return Err(Error::degenerate(format!(
                    "quotient by 1/{r}{action:?} makes ray {ray} imprimitive"
                )));
            }
        }
        SimplexVariety::from_rays(rays)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    /// Weights in ray order.
    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weights_sorted(&self) -> Vec<i64> {
        let mut w = self.weights.clone();
        w.sort_unstable();
        w
    }

    /// Invariant factors `> 1` of the discriminant group.
    pub fn discriminant(&self) -> &[i64] {
        &self.discriminant
    }

    /// Order of the discriminant group.
    pub fn index(&self) -> i64 {
        self.discriminant.iter().product()
    }

    pub fn key(&self) -> &NormalFormKey {
        &self.key
    }

    pub fn info(&self) -> VarietyInfo {
        VarietyInfo {
            weights: self.weights_sorted(),
            discriminant: self.discriminant.clone(),
            key: self.key.clone(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.fan.is_terminal()
    }
}

/// Anticanonical data of a rank-1 Fano given by the vertices of its
/// polytope: `degree = n! vol(dual)` and `h0 = #(dual lattice points)`;
/// `reflexive` records whether the dual is a lattice polytope (the
/// Gorenstein case).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GorensteinData {
    pub degree: Rat,
    pub h0: i64,
    pub reflexive: bool,
}

pub fn gorenstein_data(rays: &[IntVec]) -> Result<GorensteinData> {
    let n = rays.first().map_or(0, IntVec::dim);
    if rays.len() <= n {
        return Err(Error::DualUndefined("too few vertices".into()));
    }
    if IntMat::from_cols(rays).rank() < n {
        return Err(Error::DualUndefined("vertices do not span".into()));
    }
    // the origin must be strictly interior: no hyperplane spanned by n-1 of
    // the rays may have every ray weakly on one side
    for s in subsets_of(rays.len(), n - 1) {
        let m = IntMat::from_rows(&s.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>());
        let kernel = m.kernel_basis();
        if kernel.len() != 1 {
            continue;
        }
        let h = &kernel[0];
        let vals: Vec<i64> = rays.iter().map(|r| h.dot(r)).collect();
        if vals.iter().all(|&v| v >= 0) || vals.iter().all(|&v| v <= 0) {
            return Err(Error::DualUndefined(
                "origin is not interior to the hull of the vertices".into(),
            ));
        }
    }
    // dual vertices: solutions of <u, v_s> = -1 on n independent rays that
    // satisfy every other constraint
    let mut dual: Vec<Vec<Rat>> = Vec::new();
    for s in subsets_of(rays.len(), n) {
        let m = IntMat::from_rows(&s.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>());
        let Some(u) = m.solve(&IntVec(vec![-1; n])) else {
            continue;
        };
        let ok = rays.iter().all(|r| {
            let mut acc = Rat::ZERO;
            for (c, ur) in r.0.iter().zip(&u) {
                acc = acc + *ur * Rat::int(*c);
            }
            acc >= Rat::int(-1)
        });
        if ok && !dual.contains(&u) {
            dual.push(u);
        }
    }
    if dual.len() <= n {
        return Err(Error::DualUndefined("dual polytope degenerate".into()));
    }
    dual.sort();
    let reflexive = dual.iter().all(|u| u.iter().all(Rat::is_integer));
    let factorial: i64 = (1..=n as i64).product();
    let degree = convex_volume(&dual) * Rat::int(factorial);
    let h0 = count_dual_points(rays, &dual);
    Ok(GorensteinData {
        degree,
        h0,
        reflexive,
    })
}

fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact volume of the convex hull of rational points, by recursive
/// cone-over-facet decomposition.  Inputs here are tiny: at most a few
/// dozen points in dimension at most 5.
pub fn convex_volume(points: &[Vec<Rat>]) -> Rat {
    let d = points.first().map_or(0, Vec::len);
    if points.len() <= d {
        return Rat::ZERO;
    }
    if d == 1 {
        let min = points.iter().map(|p| p[0]).min().unwrap();
        let max = points.iter().map(|p| p[0]).max().unwrap();
        return max - min;
    }
    let mut centroid = vec![Rat::ZERO; d];
    for p in points {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c = *c + *x;
        }
    }
    let count = Rat::int(points.len() as i64);
    for c in centroid.iter_mut() {
        *c = *c / count;
    }

    let mut seen: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut total = Rat::ZERO;
    for s in subsets_of(points.len(), d) {
        let Some((normal, offset)) =
            affine_hyperplane(&s.iter().map(|&i| points[i].clone()).collect::<Vec<_>>())
        else {
            continue;
        };
        let side = |p: &[Rat]| -> Rat { dot_rat(&normal, p) - offset };
        let (mut pos, mut neg) = (false, false);
        for p in points {
            let v = side(p);
            if v > Rat::ZERO {
                pos = true;
            }
            if v < Rat::ZERO {
                neg = true;
            }
        }
        if pos && neg {
            continue; // not a supporting hyperplane
        }
        // orient outward relative to the centroid
        let (normal, offset) = if side(&centroid) > Rat::ZERO {
            (normal.iter().map(|x| -*x).collect::<Vec<_>>(), -offset)
        } else {
            (normal, offset)
        };
        if seen
            .iter()
            .any(|(n0, o0)| same_hyperplane(n0, *o0, &normal, offset))
        {
            continue;
        }
        let facet: Vec<Vec<Rat>> = points
            .iter()
            .filter(|p| dot_rat(&normal, p) == offset)
            .cloned()
            .collect();
        seen.push((normal, offset));
        let base = facet[0].clone();
        let dirs = independent_directions(&facet, &base, d - 1);
        let chart_pts: Vec<Vec<Rat>> = facet
            .iter()
            .map(|p| {
                let delta: Vec<Rat> = p.iter().zip(&base).map(|(a, b)| *a - *b).collect();
                solve_in_span(&dirs, &delta)
            })
            .collect();
        let face_vol = convex_volume(&chart_pts);
        if face_vol.is_zero() {
            continue;
        }
        // cone from the centroid over the facet
        let mut cols: Vec<Vec<Rat>> =
            vec![base.iter().zip(&centroid).map(|(a, b)| *a - *b).collect()];
        cols.extend(dirs.iter().cloned());
        let height_det = rat_det(&cols);
        total = total + face_vol * height_det.abs() / Rat::int(d as i64);
    }
    total
}

fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::ZERO, |acc, (x, y)| acc + *x * *y)
}

fn same_hyperplane(n0: &[Rat], o0: Rat, n1: &[Rat], o1: Rat) -> bool {
    // both normals outward, so equality means proportional by a positive
    // factor
    for i in 0..n0.len() {
        if n0[i].is_zero() != n1[i].is_zero() {
            return false;
        }
        if !n0[i].is_zero() {
            let k = n1[i] / n0[i];
            if k <= Rat::ZERO {
                return false;
            }
            return n0.iter().zip(n1).all(|(a, b)| *a * k == *b) && o0 * k == o1;
        }
    }
    false
}

/// Normal and offset of the affine hyperplane through `d` points, when they
/// are affinely independent.
fn affine_hyperplane(pts: &[Vec<Rat>]) -> Option<(Vec<Rat>, Rat)> {
    let d = pts[0].len();
    debug_assert_eq!(pts.len(), d);
    let mut rows: Vec<Vec<Rat>> = pts
        .iter()
        .map(|p| {
            let mut r = p.clone();
            r.push(Rat::ONE);
            r
        })
        .collect();
    let kernel = rat_kernel(&mut rows)?;
    let normal: Vec<Rat> = kernel[..d].to_vec();
    if normal.iter().all(Rat::is_zero) {
        return None;
    }
    let offset = -kernel[d];
    Some((normal, offset))
}

/// One kernel vector of a rational matrix with one more column than its
/// rank, if the rows are independent.
#[allow(clippy::needless_range_loop)]
fn rat_kernel(rows: &mut [Vec<Rat>]) -> Option<Vec<Rat>> {
    let nrows = rows.len();
    let ncols = rows[0].len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = *x * inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c];
                for j in 0..ncols {
                    let sub = rows[r][j] * f;
                    rows[i][j] = rows[i][j] - sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == nrows {
            break;
        }
    }
    if pivots.len() != nrows {
        return None;
    }
    let free = (0..ncols).find(|c| pivots.iter().all(|&(_, pc)| pc != *c))?;
    let mut kernel = vec![Rat::ZERO; ncols];
    kernel[free] = Rat::ONE;
    for &(pr, pc) in &pivots {
        kernel[pc] = -rows[pr][free];
    }
    Some(kernel)
}

/// `count` linearly independent difference vectors within a point set.
fn independent_directions(pts: &[Vec<Rat>], base: &[Rat], count: usize) -> Vec<Vec<Rat>> {
    let mut dirs: Vec<Vec<Rat>> = Vec::new();
    for p in pts.iter().skip(1) {
        if dirs.len() == count {
            break;
        }
        let delta: Vec<Rat> = p.iter().zip(base).map(|(a, b)| *a - *b).collect();
        let mut trial = dirs.clone();
        trial.push(delta.clone());
        if rat_rank(&trial) == trial.len() {
            dirs.push(delta);
        }
    }
    assert_eq!(dirs.len(), count, "facet is not full-dimensional");
    dirs
}

#[allow(clippy::needless_range_loop)]
fn rat_rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for x in m[rank].iter_mut() {
            *x = *x * inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..ncols {
                    let sub = m[rank][j] * f;
                    m[i][j] = m[i][j] - sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Coordinates of `target` in the span of `dirs` (assumed consistent).
#[allow(clippy::needless_range_loop)]
fn solve_in_span(dirs: &[Vec<Rat>], target: &[Rat]) -> Vec<Rat> {
    let k = dirs.len();
    let d = target.len();
    let mut m: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for row in 0..d {
        if m.len() == k {
            break;
        }
        let cand: Vec<Rat> = dirs.iter().map(|dir| dir[row]).collect();
        let mut trial = m.clone();
        trial.push(cand.clone());
        if rat_rank(&trial) == trial.len() {
            m.push(cand);
            rhs.push(target[row]);
        }
    }
    assert_eq!(m.len(), k, "span solve: directions are dependent");
    for c in 0..k {
        let p = (c..k)
            .find(|&i| !m[i][c].is_zero())
            .expect("independent by construction");
        m.swap(c, p);
        rhs.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = *x * inv;
        }
        rhs[c] = rhs[c] * inv;
        for i in 0..k {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..k {
                    let sub = m[c][j] * f;
                    m[i][j] = m[i][j] - sub;
                }
                let sub = rhs[c] * f;
                rhs[i] = rhs[i] - sub;
            }
        }
    }
    rhs
}

#[allow(clippy::needless_range_loop)]
fn rat_det(cols: &[Vec<Rat>]) -> Rat {
    let d = cols.len();
    let mut m: Vec<Vec<Rat>> = (0..d)
        .map(|i| (0..d).map(|j| cols[j][i]).collect())
        .collect();
    let mut det = Rat::ONE;
    for c in 0..d {
        let Some(p) = (c..d).find(|&i| !m[i][c].is_zero()) else {
            return Rat::ZERO;
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det = det * m[c][c];
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = *x * inv;
        }
        for i in c + 1..d {
            if !m[i][c].is_zero() {
                let f = m[i][c];
                for j in c..d {
                    let sub = m[c][j] * f;
                    m[i][j] = m[i][j] - sub;
                }
            }
        }
    }
    det
}

/// Floor division valid for either sign of the divisor (`div_euclid` is
/// not: it rounds toward the remainder's sign, which flips for negative
/// divisors).
fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

/// Lattice points of `{ m : <m, v_i> >= -1 }`; the innermost coordinate is
/// counted by exact interval intersection rather than enumeration.
fn count_dual_points(rays: &[IntVec], dual_vertices: &[Vec<Rat>]) -> i64 {
    let n = rays[0].dim();
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for u in dual_vertices {
        for (i, c) in u.iter().enumerate() {
            lo[i] = lo[i].min(c.floor());
            hi[i] = hi[i].max(-(-*c).floor());
        }
    }
    fn rec(
        depth: usize,
        n: usize,
        lo: &[i64],
        hi: &[i64],
        rays: &[IntVec],
        point: &mut Vec<i64>,
        count: &mut i64,
    ) {
        if depth == n - 1 {
            let mut lo_last = lo[n - 1];
            let mut hi_last = hi[n - 1];
            for r in rays {
                let mut partial: i64 = 0;
                for i in 0..n - 1 {
                    partial += r[i] * point[i];
                }
                let c = r[n - 1];
                // partial + c * x >= -1
                if c == 0 {
                    if partial < -1 {
                        return;
                    }
                } else if c > 0 {
                    lo_last = lo_last.max(ceil_div(-1 - partial, c));
                } else {
                    hi_last = hi_last.min(floor_div(-1 - partial, c));
                }
            }
            if hi_last >= lo_last {
                *count += hi_last - lo_last + 1;
            }
            return;
        }
        for x in lo[depth]..=hi[depth] {
            point[depth] = x;
            rec(depth + 1, n, lo, hi, rays, point, count);
        }
    }
    let mut count = 0i64;
    let mut point = vec![0i64; n - 1];
    rec(0, n, &lo, &hi, rays, &mut point, &mut count);
    count
}
