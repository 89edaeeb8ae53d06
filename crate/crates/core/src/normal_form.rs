//! Canonical forms of vertex configurations up to lattice automorphism and
//! vertex reordering.
//!
//! The key of a configuration is the lexicographically smallest row Hermite
//! normal form over all admissible column orders.  Left-multiplying by any
//! `GL(n, Z)` matrix leaves each candidate HNF unchanged, so equal keys are
//! exactly the `GL(n, Z) x permutation` orbits.  Candidate orders are pruned
//! by a per-vertex invariant (the multiset of cone determinants through the
//! vertex), which collapses the search to almost nothing for the weight
//! systems that occur in practice.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lattice::{IntMat, IntVec};
use crate::Result;

/// Canonical byte string identifying a vertex configuration up to
/// `GL(n, Z)` and reordering.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalFormKey(pub String);

impl fmt::Display for NormalFormKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NormalFormKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "key[{}]", self.0)
    }
}

/// Per-vertex invariant: sorted absolute determinants of all full-size
/// subsets through the vertex.
fn vertex_invariants(vertices: &[IntVec]) -> Vec<Vec<i64>> {
    let n = vertices[0].dim();
    let k = vertices.len();
    let mut invs = vec![Vec::new(); k];
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let det = IntMat::from_cols(
            &subset
                .iter()
                .map(|&i| vertices[i].clone())
                .collect::<Vec<_>>(),
        )
        .det()
        .abs();
        for &i in &subset {
            invs[i].push(det);
        }
        // advance to the next n-subset of 0..k
        let mut pos = n;
        loop {
            if pos == 0 {
                for inv in invs.iter_mut() {
                    inv.sort_unstable();
                }
                return invs;
            }
            pos -= 1;
            subset[pos] += 1;
            if subset[pos] <= k - n + pos {
                for p in pos + 1..n {
                    subset[p] = subset[p - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Column orders compatible with the invariant grouping: groups appear in
/// invariant order, vertices permute freely within their group.
fn candidate_orders(vertices: &[IntVec]) -> Vec<Vec<usize>> {
    let invs = vertex_invariants(vertices);
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| invs[a].cmp(&invs[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if invs[g[0]] == invs[i] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for g in groups {
        let perms = permutations(&g);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for p in &perms {
                let mut o = prefix.clone();
                o.extend_from_slice(p);
                next.push(o);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let rest: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &y)| y)
            .collect();
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn hnf_entries(vertices: &[IntVec], order: &[usize]) -> Vec<i64> {
    let cols: Vec<IntVec> = order.iter().map(|&i| vertices[i].clone()).collect();
    let h = IntMat::from_cols(&cols).row_hnf();
    let mut entries = Vec::with_capacity(h.nrows() * h.ncols());
    for i in 0..h.nrows() {
        entries.extend_from_slice(h.row(i));
    }
    entries
}

/// Canonical key of a spanning vertex configuration.
pub fn normal_form(vertices: &[IntVec]) -> Result<NormalFormKey> {
    let n = vertices.first().map_or(0, IntVec::dim);
    if vertices.len() < n || IntMat::from_cols(vertices).rank() < n {
        return Err(Error::degenerate("vertices do not span the ambient space"));
    }
    let best = candidate_orders(vertices)
        .iter()
        .map(|o| hnf_entries(vertices, o))
        .min()
        .expect("at least one candidate order");
    let body: Vec<String> = best.iter().map(|e| e.to_string()).collect();
    Ok(NormalFormKey(format!(
        "{}x{}:{}",
        n,
        vertices.len(),
        body.join(",")
    )))
}

/// Permutations of the vertices that preserve the per-vertex invariant
/// classes, written as full maps `i -> sigma(i)`.
fn class_preserving_perms(vertices: &[IntVec]) -> Vec<Vec<usize>> {
    let invs = vertex_invariants(vertices);
    let k = vertices.len();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        match groups.iter_mut().find(|g| invs[g[0]] == invs[i]) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut out: Vec<Vec<usize>> = vec![vec![usize::MAX; k]];
    for g in groups {
        let perms = permutations(&g);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for partial in &out {
            for p in &perms {
                let mut sigma = partial.clone();
                for (pos, &img) in g.iter().zip(p) {
                    sigma[*pos] = img;
                }
                next.push(sigma);
            }
        }
        out = next;
    }
    out
}

/// All lattice automorphisms permuting the vertex configuration, returned as
/// matrices `U` with `U * {v_i} = {v_i}` setwise.
pub fn automorphisms(vertices: &[IntVec]) -> Vec<IntMat> {
    let n = vertices[0].dim();
    let k = vertices.len();
    let mut base: Vec<usize> = Vec::new();
    for i in 0..k {
        let mut trial = base.clone();
        trial.push(i);
        let m = IntMat::from_cols(
            &trial
                .iter()
                .map(|&j| vertices[j].clone())
                .collect::<Vec<_>>(),
        );
        if m.rank() == trial.len() {
            base = trial;
        }
        if base.len() == n {
            break;
        }
    }
    if base.len() < n {
        return Vec::new();
    }
    let base_mat = IntMat::from_cols(
        &base
            .iter()
            .map(|&j| vertices[j].clone())
            .collect::<Vec<_>>(),
    );
    let bt = base_mat.transpose();
    let mut out = Vec::new();
    'orders: for sigma in class_preserving_perms(vertices) {
        // solve U * v_i = v_sigma(i) on the independent base, then check all
        let target_mat = IntMat::from_cols(
            &base
                .iter()
                .map(|&j| vertices[sigma[j]].clone())
                .collect::<Vec<_>>(),
        );
        let mut u_rows: Vec<IntVec> = Vec::with_capacity(n);
        for r in 0..n {
            let rhs = IntVec((0..n).map(|c| target_mat[(r, c)]).collect());
            let Some(sol) = bt.solve(&rhs) else {
                continue 'orders;
            };
            let mut row = Vec::with_capacity(n);
            for s in &sol {
                match s.as_integer() {
                    Some(x) => row.push(x),
                    None => continue 'orders,
                }
            }
            u_rows.push(IntVec(row));
        }
        let u = IntMat::from_rows(&u_rows);
        if u.det().abs() != 1 {
            continue;
        }
        for i in 0..k {
            if u.mul_vec(&vertices[i]) != vertices[sigma[i]] {
                continue 'orders;
            }
        }
        out.push(u);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> IntVec {
        IntVec(c.to_vec())
    }

    fn p3_rays() -> Vec<IntVec> {
        vec![
            v(&[1, 0, 0]),
            v(&[0, 1, 0]),
            v(&[0, 0, 1]),
            v(&[-1, -1, -1]),
        ]
    }

    #[test]
    fn key_is_gl_invariant() {
        let rays = p3_rays();
        let key = normal_form(&rays).unwrap();
        let u = IntMat::from_rows(&[v(&[1, 2, 0]), v(&[0, 1, 0]), v(&[3, 5, 1])]);
        assert_eq!(u.det().abs(), 1);
        let mut image: Vec<IntVec> = rays.iter().map(|r| u.mul_vec(r)).collect();
        image.rotate_left(2);
        assert_eq!(normal_form(&image).unwrap(), key);
    }

    #[test]
    fn different_weights_different_keys() {
        let a = crate::fan::SimplexVariety::wps(&[1, 1, 1, 2]).unwrap();
        let b = crate::fan::SimplexVariety::wps(&[1, 1, 2, 3]).unwrap();
        assert_ne!(
            normal_form(a.fan().rays()).unwrap(),
            normal_form(b.fan().rays()).unwrap()
        );
    }

    #[test]
    fn quotient_differs_from_plain() {
        let quotient = vec![
            v(&[0, 1, 1]),
            v(&[-1, 0, -2]),
            v(&[-1, -2, 1]),
            v(&[2, 1, 0]),
        ];
        assert_ne!(
            normal_form(&quotient).unwrap(),
            normal_form(&p3_rays()).unwrap()
        );
    }

    #[test]
    fn degenerate_input_rejected() {
        assert!(normal_form(&[v(&[1, 0, 0]), v(&[0, 1, 0])]).is_err());
    }

    #[test]
    fn p3_automorphism_group_is_s4() {
        assert_eq!(automorphisms(&p3_rays()).len(), 24);
    }

    #[test]
    fn distinct_weights_trivial_automorphisms() {
        let x = crate::fan::SimplexVariety::wps(&[1, 2, 3, 5]).unwrap();
        assert_eq!(automorphisms(x.fan().rays()).len(), 1);
    }
}
