//! Enumeration of toric terminal extractions from a simplex variety.
//!
//! A candidate is a primitive non-ray lattice point of the shed whose star
//! subdivision is again terminal; its discrepancy is bounded by the
//! configured maximum.  Enumeration walks each top cone through its box
//! points plus nonnegative ray shifts, which covers the dilated shed
//! exactly, in time linear in the number of points produced.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::fan::SimplexVariety;
use crate::lattice::{box_point_of_scaled, box_points_scaled, lcm, IntMat, IntVec};
use crate::normal_form::automorphisms;
use crate::rat::Rat;
use crate::Result;

/// Where a blowup (or blowdown) ray sits inside a simplex variety: the
/// smallest containing cone, the minimal integral relation, and the data of
/// the centre being blown up.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtractionSite {
    pub point: IntVec,
    /// Ray indices of the smallest cone containing the point.
    pub tau: Vec<usize>,
    /// Lattice index of that cone.
    pub cone_index: i64,
    /// Minimal `r` with `r * point` integral on the cone's rays.
    pub r: i64,
    /// `r * point = sum coeffs[i] * ray_tau[i]`, all entries positive.
    pub coeffs: Vec<i64>,
    pub discrepancy: Rat,
    /// Dimension of the centre: `n - |tau|`.
    pub centre_dim: usize,
    /// Display prefix: `[cone_index]` for a point centre, otherwise the
    /// weights of the stratum being blown up.
    pub centre_weights: Vec<i64>,
}

impl ExtractionSite {
    /// Relation vector over all rays of the blown-up model: `coeffs` on the
    /// cone rays, `-r` on the new ray appended at the end.
    pub fn model_relation(&self, ray_count: usize) -> IntVec {
        let mut rel = vec![0i64; ray_count + 1];
        for (&t, &c) in self.tau.iter().zip(&self.coeffs) {
            rel[t] = c;
        }
        rel[ray_count] = -self.r;
        IntVec(rel)
    }

    /// Relation as the display multiset `(-r, b_1, ..., b_k)`.
    pub fn relation_display(&self) -> Vec<i64> {
        let mut b = self.coeffs.clone();
        b.sort_unstable();
        let mut out = vec![-self.r];
        out.extend(b);
        out
    }
}

/// Resolves the site data of a primitive point inside the variety.
pub fn extraction_site(x: &SimplexVariety, v: &IntVec) -> Result<ExtractionSite> {
    if v.is_zero() {
        return Err(Error::arg("the origin is not a blowup centre"));
    }
    if !v.is_primitive() {
        return Err(Error::arg(format!("{v} is not primitive")));
    }
    let n = x.dim();
    let (ci, bary) = x.fan().cone_containing(v);
    let cone = &x.fan().cones()[ci];
    let mut tau = Vec::new();
    let mut tau_bary = Vec::new();
    for (k, t) in bary.iter().enumerate() {
        if !t.is_zero() {
            tau.push(cone.rays[k]);
            tau_bary.push(*t);
        }
    }
    let r = tau_bary.iter().fold(1i64, |l, t| lcm(l, t.den()));
    let coeffs: Vec<i64> = tau_bary.iter().map(|t| t.num() * (r / t.den())).collect();
    let tau_mat = IntMat::from_cols(
        &tau.iter()
            .map(|&i| x.fan().rays()[i].clone())
            .collect::<Vec<_>>(),
    );
    let smith = tau_mat.smith();
    let cone_index: i64 = smith.diag.iter().filter(|&&d| d != 0).product();
    let centre_dim = n - tau.len();
    let centre_weights = if centre_dim == 0 {
        vec![cone_index]
    } else {
        // the stratum dual to tau is cut out by the coordinates on tau; its
        // displayed weights are the ambient weights of the remaining rays
        let mut w: Vec<i64> = (0..x.fan().rays().len())
            .filter(|j| !tau.contains(j))
            .map(|j| x.weights()[j])
            .collect();
        w.sort_unstable();
        w
    };
    let discrepancy = x.fan().covector(ci).eval(v) - Rat::ONE;
    Ok(ExtractionSite {
        point: v.clone(),
        tau,
        cone_index,
        r,
        coeffs,
        discrepancy,
        centre_dim,
        centre_weights,
    })
}

/// True when the star subdivision at `v` has terminal singularities.  Only
/// the cones touched by the subdivision need checking; the rest of the fan
/// is untouched and the ambient variety is assumed terminal.
pub fn is_terminal_extraction(x: &SimplexVariety, v: &IntVec) -> bool {
    if v.is_zero() || !v.is_primitive() || x.fan().ray_index(v).is_some() {
        return false;
    }
    let fan = x.fan();
    for cone in fan.cones() {
        let m = IntMat::from_cols(
            &cone
                .rays
                .iter()
                .map(|&i| fan.rays()[i].clone())
                .collect::<Vec<_>>(),
        );
        let Some(bary) = m.solve(v) else { continue };
        if bary.iter().any(|t| *t < Rat::ZERO) {
            continue;
        }
        for (k, t) in bary.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            let mut rays: Vec<IntVec> = cone
                .rays
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &ri)| fan.rays()[ri].clone())
                .collect();
            rays.push(v.clone());
            if !sub_cone_terminal(&rays) {
                return false;
            }
        }
    }
    true
}

fn sub_cone_terminal(rays: &[IntVec]) -> bool {
    let (d, scaled) = box_points_scaled(rays).expect("independent rays");
    scaled.iter().all(|t| {
        let sum: i64 = t.iter().sum();
        sum == 0 || sum > d
    })
}

/// All terminal extractions from `x` of discrepancy at most `dmax`,
/// lexicographically ordered by point.  With `symmetry_dedup` one
/// representative per orbit of the automorphism group of `x` is kept.
pub fn candidate_points(
    x: &SimplexVariety,
    dmax: Rat,
    symmetry_dedup: bool,
) -> Vec<ExtractionSite> {
    let fan = x.fan();
    let n = x.dim();
    let mut seen: BTreeSet<IntVec> = BTreeSet::new();
    for cone in fan.cones() {
        let rays: Vec<IntVec> = cone.rays.iter().map(|&i| fan.rays()[i].clone()).collect();
        let (d, scaled) = box_points_scaled(&rays).expect("top cone is nonsingular");
        for t in scaled {
            let base_psi = Rat::new(t.iter().sum(), d);
            let slack = Rat::ONE + dmax - base_psi;
            if slack < Rat::ZERO {
                continue;
            }
            let b = box_point_of_scaled(&rays, d, &t);
            let budget = slack.floor();
            let mut shift = vec![0i64; n];
            enumerate_shifts(&mut shift, 0, budget, &mut |shift| {
                let mut p = b.clone();
                for (k, &times) in shift.iter().enumerate() {
                    if times > 0 {
                        p = p.add(&rays[k].scaled(times));
                    }
                }
                if !p.is_zero() {
                    seen.insert(p);
                }
            });
        }
    }
    let mut points: Vec<IntVec> = seen
        .into_iter()
        .filter(|p| p.is_primitive() && fan.ray_index(p).is_none())
        .filter(|p| {
            let d = fan.discrepancy(p).expect("nonzero point");
            d > Rat::ZERO && d <= dmax
        })
        .filter(|p| is_terminal_extraction(x, p))
        .collect();
    if symmetry_dedup {
        let auts = automorphisms(fan.rays());
        if auts.len() > 1 {
            points.retain(|p| {
                let orbit_min = auts
                    .iter()
                    .map(|u| u.mul_vec(p))
                    .min()
                    .expect("at least the identity");
                orbit_min == *p
            });
        }
    }
    points
        .into_iter()
        .map(|p| extraction_site(x, &p).expect("candidate points are primitive and nonzero"))
        .collect()
}

fn enumerate_shifts(shift: &mut Vec<i64>, pos: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
    if pos == shift.len() {
        f(shift);
        return;
    }
    for k in 0..=budget {
        shift[pos] = k;
        enumerate_shifts(shift, pos + 1, budget - k, f);
    }
    shift[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> IntVec {
        IntVec(c.to_vec())
    }

    fn p3() -> SimplexVariety {
        SimplexVariety::wps(&[1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn p3_candidates_at_low_discrepancy() {
        let x = p3();
        let one = candidate_points(&x, Rat::ONE, false);
        // only the six edge midpoints (1,1,0)-type survive at dmax 1
        assert_eq!(one.len(), 6);
        assert!(one
            .iter()
            .all(|s| s.discrepancy == Rat::ONE && s.centre_dim == 1));

        let two = candidate_points(&x, Rat::int(2), false);
        // adds the four point blowups (1,1,1) of discrepancy 2
        assert_eq!(two.len(), 10);
        assert!(two
            .iter()
            .any(|s| s.discrepancy == Rat::int(2) && s.centre_dim == 0));
    }

    #[test]
    fn p3_candidates_with_symmetry() {
        let x = p3();
        let two = candidate_points(&x, Rat::int(2), true);
        // one orbit of line blowups, one of point blowups
        assert_eq!(two.len(), 2);
    }

    #[test]
    fn kawamata_point_always_included() {
        let x = SimplexVariety::wps(&[1, 2, 3, 5]).unwrap();
        let sites = candidate_points(&x, Rat::new(1, 5), false);
        assert!(sites
            .iter()
            .any(|s| s.discrepancy == Rat::new(1, 5) && s.r == 5 && {
                let mut c = s.coeffs.clone();
                c.sort_unstable();
                c == vec![1, 2, 3]
            }));
    }

    #[test]
    fn weighted_point_blowups_of_p3_are_terminal_iff_coprime() {
        let x = p3();
        let e = x.fan().rays().to_vec();
        for (a, b) in [(2i64, 3i64), (2, 5), (3, 4), (4, 5)] {
            let pt = e[0].clone().add(&e[1].scaled(a)).add(&e[2].scaled(b));
            assert!(
                is_terminal_extraction(&x, &pt),
                "(1,{a},{b}) blowup should be terminal"
            );
        }
        // non-coprime weights fail
        let pt = e[0].clone().add(&e[1].scaled(2)).add(&e[2].scaled(2));
        assert!(!is_terminal_extraction(&x, &pt));
        let pt = e[0].clone().add(&e[1].scaled(2)).add(&e[2].scaled(4));
        assert!(!is_terminal_extraction(&x, &pt));
    }

    #[test]
    fn non_kawamata_interior_points_fail() {
        // inside the 1/5(1,2,3) cone only the Kawamata point works
        let x = SimplexVariety::from_rays(vec![
            v(&[0, 1, 1]),
            v(&[-1, 0, -2]),
            v(&[-1, -2, 1]),
            v(&[2, 1, 0]),
        ])
        .unwrap();
        let sites = candidate_points(&x, Rat::ONE, false);
        let kawamata: Vec<_> = sites.iter().filter(|s| s.discrepancy < Rat::ONE).collect();
        assert_eq!(kawamata.len(), 4, "one Kawamata point per singular cone");
        assert!(kawamata.iter().all(|s| s.discrepancy == Rat::new(1, 5)));
    }

    #[test]
    fn completeness_against_bounding_box_scan() {
        // brute force: scan all primitive points in a box, keep those with
        // positive discrepancy at most dmax and terminal subdivision
        let x = SimplexVariety::wps(&[1, 1, 2, 3]).unwrap();
        let dmax = Rat::int(3);
        let fast: BTreeSet<IntVec> = candidate_points(&x, dmax, false)
            .into_iter()
            .map(|s| s.point)
            .collect();
        let mut slow = BTreeSet::new();
        let bound = 8i64;
        let mut p = [-bound, -bound, -bound];
        loop {
            let pt = v(&p);
            if !pt.is_zero() && pt.is_primitive() && x.fan().ray_index(&pt).is_none() {
                let d = x.fan().discrepancy(&pt).unwrap();
                if d > Rat::ZERO && d <= dmax && is_terminal_extraction(&x, &pt) {
                    slow.insert(pt);
                }
            }
            let mut i = 0;
            loop {
                p[i] += 1;
                if p[i] <= bound {
                    break;
                }
                p[i] = -bound;
                i += 1;
                if i == 3 {
                    assert_eq!(fast, slow);
                    return;
                }
            }
        }
    }

    #[test]
    fn threefold_kawamata_uniqueness() {
        // every singular cone of a terminal 3-fold simplex admits exactly
        // one interior extraction, of discrepancy 1/r
        for x in crate::classify::classify_dim3() {
            let sites = candidate_points(&x, Rat::int(1), false);
            for (ci, cone) in x.fan().cones().iter().enumerate() {
                let r = x.fan().cone_det(ci);
                if r == 1 {
                    continue;
                }
                let interior: Vec<_> = sites
                    .iter()
                    .filter(|s| s.tau == cone.rays && s.tau.len() == 3)
                    .collect();
                assert_eq!(interior.len(), 1, "cone {ci} of {}", x.info().name());
                assert_eq!(interior[0].discrepancy, Rat::new(1, r));
                assert_eq!(interior[0].r, r);
            }
        }
    }

    #[test]
    fn centre_weights_of_curve_blowups() {
        // [2,2](-2,1,1,1): Kawamata blowup along a curve of transverse
        // 1/2(1,1,1) points inside P(1,1,1,2,2)
        let x = SimplexVariety::wps(&[1, 1, 1, 2, 2]).unwrap();
        let rays = x.fan().rays().to_vec();
        // tau = the three weight-1 rays; v = (s0 + s1 + s2) / 2
        let double = rays[0].add(&rays[1]).add(&rays[2]);
        let (half, g) = double.primitive_part().unwrap();
        assert_eq!(g, 2);
        let site = extraction_site(&x, &half).unwrap();
        assert_eq!(site.r, 2);
        assert_eq!(site.coeffs, vec![1, 1, 1]);
        assert_eq!(site.centre_dim, 1);
        assert_eq!(site.centre_weights, vec![2, 2]);
        assert!(is_terminal_extraction(&x, &half));

        // [2,4](-2,1,1,1) from P(1,1,2,3,4)
        let x = SimplexVariety::wps(&[1, 1, 2, 3, 4]).unwrap();
        let rays = x.fan().rays().to_vec();
        let double = rays[0].add(&rays[1]).add(&rays[3]);
        let (half, g) = double.primitive_part().unwrap();
        assert_eq!(g, 2);
        let site = extraction_site(&x, &half).unwrap();
        assert_eq!(site.r, 2);
        assert_eq!(site.coeffs, vec![1, 1, 1]);
        assert_eq!(site.centre_weights, vec![2, 4]);
    }

    #[test]
    fn point_centre_prefix_is_cone_index() {
        // [1](-1,1,1,1,2): weighted blowup of a smooth point of P^4
        let x = SimplexVariety::wps(&[1, 1, 1, 1, 1]).unwrap();
        let rays = x.fan().rays().to_vec();
        let pt = rays[0].add(&rays[1]).add(&rays[2]).add(&rays[3].scaled(2));
        let site = extraction_site(&x, &pt).unwrap();
        assert_eq!(site.centre_dim, 0);
        assert_eq!(site.centre_weights, vec![1]);
        assert_eq!(site.r, 1);
        assert_eq!(site.relation_display(), vec![-1, 1, 1, 1, 2]);

        // the index-5 point of P(1,2,3,4,5)
        let x = SimplexVariety::wps(&[1, 2, 3, 4, 5]).unwrap();
        let sites = candidate_points(&x, Rat::int(1), false);
        let kawamata: Vec<_> = sites
            .iter()
            .filter(|s| s.cone_index == 5 && s.r == 5)
            .collect();
        assert_eq!(
            kawamata.len(),
            4,
            "four interior points of the index-5 cone"
        );
        for s in kawamata {
            assert_eq!(s.centre_weights, vec![5]);
            let mut c = s.coeffs.clone();
            c.sort_unstable();
            assert_eq!(c, vec![1, 2, 3, 4]);
            assert_eq!(s.discrepancy, Rat::ONE);
        }
    }
}
