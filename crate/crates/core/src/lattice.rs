//! Exact integer linear algebra over the ambient lattice.
//!
//! Everything here is `i64` data with `i128` intermediates.  Any value that
//! does not fit back into `i64` panics immediately ("fail loudly, never
//! wrap"): for the lattice sizes this engine targets (coordinates in the
//! hundreds, indices in the thousands) a genuine overflow means a bug, not a
//! precision problem worth escalating to bignums.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat::Rat;
use crate::Result;

#[inline]
pub fn fit_i64(x: i128) -> i64 {
    i64::try_from(x).unwrap_or_else(|_| panic!("integer overflow: {x} does not fit in 64 bits"))
}

#[inline]
fn mul64(a: i64, b: i64) -> i64 {
    a.checked_mul(b)
        .unwrap_or_else(|| panic!("integer overflow in {a} * {b}"))
}

#[inline]
fn add64(a: i64, b: i64) -> i64 {
    a.checked_add(b)
        .unwrap_or_else(|| panic!("integer overflow in {a} + {b}"))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    fit_i64((a as i128 / gcd(a, b) as i128) * b as i128).abs()
}

/// A lattice vector of fixed dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVec(pub Vec<i64>);

impl IntVec {
    pub fn zero(dim: usize) -> IntVec {
        IntVec(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0, |g, &c| gcd(g, c))
    }

    /// Writes `self = g * w` with `w` primitive; errors on the zero vector.
    pub fn primitive_part(&self) -> Result<(IntVec, i64)> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let g = self.gcd();
        Ok((IntVec(self.0.iter().map(|&c| c / g).collect()), g))
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    pub fn dot(&self, other: &IntVec) -> i64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc: i128 = 0;
        for (&a, &b) in self.0.iter().zip(&other.0) {
            acc += a as i128 * b as i128;
        }
        fit_i64(acc)
    }

    pub fn add(&self, other: &IntVec) -> IntVec {
        IntVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| add64(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntVec) -> IntVec {
        IntVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| add64(a, -b))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntVec {
        IntVec(self.0.iter().map(|&a| -a).collect())
    }

    pub fn scaled(&self, k: i64) -> IntVec {
        IntVec(self.0.iter().map(|&a| mul64(a, k)).collect())
    }
}

impl Index<usize> for IntVec {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntVec {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> IntMat {
        IntMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[IntVec]) -> IntMat {
        let r = rows.len();
        let c = rows.first().map_or(0, IntVec::dim);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.dim(), c, "ragged rows");
            data.extend_from_slice(&row.0);
        }
        IntMat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_cols(cols: &[IntVec]) -> IntMat {
        IntMat::from_rows(cols).transpose()
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> IntVec {
        IntVec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += self[(i, k)] as i128 * other[(k, j)] as i128;
                }
                out[(i, j)] = fit_i64(acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &IntVec) -> IntVec {
        assert_eq!(self.cols, v.dim());
        IntVec(
            (0..self.rows)
                .map(|i| {
                    let mut acc: i128 = 0;
                    for k in 0..self.cols {
                        acc += self[(i, k)] as i128 * v[k] as i128;
                    }
                    fit_i64(acc)
                })
                .collect(),
        )
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        fit_i64(self.det_i128())
    }

    fn det_i128(&self) -> i128 {
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let at = |a: &Vec<i128>, i: usize, j: usize| a[i * n + j];
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if at(&a, k, k) == 0 {
                match (k + 1..n).find(|&i| at(&a, i, k) != 0) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = at(&a, i, j)
                        .checked_mul(at(&a, k, k))
                        .and_then(|x| {
                            x.checked_sub(at(&a, i, k).checked_mul(at(&a, k, j)).expect("overflow"))
                        })
                        .expect("integer overflow in determinant");
                    a[i * n + j] = num / prev;
                }
                a[i * n + k] = 0;
            }
            prev = at(&a, k, k);
        }
        sign * at(&a, n - 1, n - 1)
    }

    /// Solves `self * x = b` exactly; `None` when the matrix is singular.
    pub fn solve(&self, b: &IntVec) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.dim());
        let d = self.det_i128();
        if d == 0 {
            return None;
        }
        let n = self.rows;
        let mut x = Vec::with_capacity(n);
        for j in 0..n {
            let mut m = self.clone();
            for i in 0..n {
                m[(i, j)] = b[i];
            }
            let dj = m.det_i128();
            let g = gcd_i128(dj, d);
            let (mut num, mut den) = if g == 0 { (0, 1) } else { (dj / g, d / g) };
            if den < 0 {
                num = -num;
                den = -den;
            }
            x.push(Rat::new(fit_i64(num), fit_i64(den)));
        }
        Some(x)
    }

    pub fn rank(&self) -> usize {
        self.clone().smith().rank()
    }

    /// Row-style Hermite normal form: the unique `H = U * self` with `U`
    /// unimodular, pivots positive, zeros below each pivot and entries above
    /// a pivot reduced into `[0, pivot)`.
    pub fn row_hnf(&self) -> IntMat {
        let mut h = self.clone();
        let (rows, cols) = (h.rows, h.cols);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            // clear below (r, c) by gcd steps
            loop {
                let mut piv: Option<usize> = None;
                for i in r..rows {
                    if h[(i, c)] != 0 && piv.is_none_or(|p| h[(i, c)].abs() < h[(p, c)].abs()) {
                        piv = Some(i);
                    }
                }
                let Some(p) = piv else { break };
                if p != r {
                    h.swap_rows(p, r);
                }
                let mut done = true;
                for i in r + 1..rows {
                    let q = h[(i, c)].div_euclid(h[(r, c)]);
                    if q != 0 {
                        h.row_sub_mul(i, r, q);
                    }
                    if h[(i, c)] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h[(r, c)] == 0 {
                continue;
            }
            if h[(r, c)] < 0 {
                h.negate_row(r);
            }
            for i in 0..r {
                let q = h[(i, c)].div_euclid(h[(r, c)]);
                if q != 0 {
                    h.row_sub_mul(i, r, q);
                }
            }
            r += 1;
        }
        h
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        for j in 0..self.cols {
            self.data.swap(i * self.cols + j, k * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    /// `row_i -= q * row_k`
    fn row_sub_mul(&mut self, i: usize, k: usize, q: i64) {
        for j in 0..self.cols {
            self[(i, j)] = add64(self[(i, j)], -mul64(q, self[(k, j)]));
        }
    }

    pub fn smith(&self) -> SmithData {
        let mut calc = SmithCalc::new(self.clone());
        calc.run();
        let n = self.rows.min(self.cols);
        let diag = (0..n).map(|i| calc.a[(i, i)]).collect();
        let data = SmithData {
            diag,
            u: calc.u,
            u_inv: calc.u_inv,
            v: calc.v,
            v_inv: calc.v_inv,
        };
        debug_assert!(data.verify(self), "smith transform check failed");
        data
    }

    /// A saturated basis of the integer kernel `{ x : self * x = 0 }`.
    pub fn kernel_basis(&self) -> Vec<IntVec> {
        let s = self.smith();
        let r = s.rank();
        (r..self.cols).map(|j| s.v.col(j)).collect()
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Invariant-factor decomposition `U * M * V = diag(d_1, ..., d_r, 0, ...)`
/// with `d_i | d_{i+1}` and both transforms unimodular.
pub struct SmithData {
    pub diag: Vec<i64>,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
}

impl SmithData {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d != 0).count()
    }

    /// Nontrivial invariant factors (those `> 1`).
    pub fn torsion(&self) -> Vec<i64> {
        self.diag.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn verify(&self, m: &IntMat) -> bool {
        let prod = self.u.mul(m).mul(&self.v);
        for i in 0..prod.nrows() {
            for j in 0..prod.ncols() {
                let want = if i == j && i < self.diag.len() {
                    self.diag[i]
                } else {
                    0
                };
                if prod[(i, j)] != want {
                    return false;
                }
            }
        }
        for i in 0..self.diag.len().saturating_sub(1) {
            if self.diag[i] != 0
                && self.diag[i + 1] % self.diag[i].max(1) != 0
                && self.diag[i + 1] != 0
            {
                return false;
            }
        }
        self.u.mul(&self.u_inv) == IntMat::identity(self.u.nrows())
            && self.v.mul(&self.v_inv) == IntMat::identity(self.v.nrows())
    }
}

struct SmithCalc {
    a: IntMat,
    u: IntMat,
    u_inv: IntMat,
    v: IntMat,
    v_inv: IntMat,
}

impl SmithCalc {
    fn new(a: IntMat) -> SmithCalc {
        let (n, m) = (a.nrows(), a.ncols());
        SmithCalc {
            a,
            u: IntMat::identity(n),
            u_inv: IntMat::identity(n),
            v: IntMat::identity(m),
            v_inv: IntMat::identity(m),
        }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap_rows(i, k);
        self.u.swap_rows(i, k);
        // (U^-1 <- U^-1 * swap) swaps columns
        for r in 0..self.u_inv.nrows() {
            let (x, y) = (self.u_inv[(r, i)], self.u_inv[(r, k)]);
            self.u_inv[(r, i)] = y;
            self.u_inv[(r, k)] = x;
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        for r in 0..self.a.nrows() {
            let (x, y) = (self.a[(r, j)], self.a[(r, k)]);
            self.a[(r, j)] = y;
            self.a[(r, k)] = x;
        }
        for r in 0..self.v.nrows() {
            let (x, y) = (self.v[(r, j)], self.v[(r, k)]);
            self.v[(r, j)] = y;
            self.v[(r, k)] = x;
        }
        self.v_inv.swap_rows(j, k);
    }

    /// `row_i -= q * row_k`
    fn row_op(&mut self, i: usize, k: usize, q: i64) {
        self.a.row_sub_mul(i, k, q);
        self.u.row_sub_mul(i, k, q);
        // U^-1 <- U^-1 * (I + q E_ik): col_k += q * col_i
        for r in 0..self.u_inv.nrows() {
            self.u_inv[(r, k)] = add64(self.u_inv[(r, k)], mul64(q, self.u_inv[(r, i)]));
        }
    }

    /// `col_j -= q * col_k`
    fn col_op(&mut self, j: usize, k: usize, q: i64) {
        for r in 0..self.a.nrows() {
            self.a[(r, j)] = add64(self.a[(r, j)], -mul64(q, self.a[(r, k)]));
        }
        for r in 0..self.v.nrows() {
            self.v[(r, j)] = add64(self.v[(r, j)], -mul64(q, self.v[(r, k)]));
        }
        // V^-1 <- (I + q E_jk) * V^-1: row_k += q * row_j
        for c in 0..self.v_inv.ncols() {
            self.v_inv[(k, c)] = add64(self.v_inv[(k, c)], mul64(q, self.v_inv[(j, c)]));
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        for r in 0..self.u_inv.nrows() {
            self.u_inv[(r, i)] = -self.u_inv[(r, i)];
        }
    }

    fn run(&mut self) {
        let (n, m) = (self.a.nrows(), self.a.ncols());
        for t in 0..n.min(m) {
            'pivot: loop {
                // smallest nonzero entry in the trailing submatrix
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..m {
                        if self.a[(i, j)] != 0
                            && best.is_none_or(|(bi, bj)| {
                                self.a[(i, j)].abs() < self.a[(bi, bj)].abs()
                            })
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else { return };
                if bi != t {
                    self.swap_rows(bi, t);
                }
                if bj != t {
                    self.swap_cols(bj, t);
                }
                let mut clean = true;
                for i in t + 1..n {
                    let q = self.a[(i, t)].div_euclid(self.a[(t, t)]);
                    if q != 0 {
                        self.row_op(i, t, q);
                    }
                    if self.a[(i, t)] != 0 {
                        clean = false;
                    }
                }
                for j in t + 1..m {
                    let q = self.a[(t, j)].div_euclid(self.a[(t, t)]);
                    if q != 0 {
                        self.col_op(j, t, q);
                    }
                    if self.a[(t, j)] != 0 {
                        clean = false;
                    }
                }
                if !clean {
                    continue 'pivot;
                }
                // pivot must divide the rest of the submatrix for the
                // invariant-factor chain
                for i in t + 1..n {
                    for j in t + 1..m {
                        if self.a[(i, j)] % self.a[(t, t)] != 0 {
                            self.row_op(t, i, -1); // row_t += row_i
                            continue 'pivot;
                        }
                    }
                }
                break;
            }
            if self.a[(t, t)] < 0 {
                self.negate_row(t);
            }
        }
    }
}

/// Index of the finite quotient `Z^n / <rays>`; errors when the rays do not
/// span.
pub fn sublattice_index(rays: &[IntVec]) -> Result<i64> {
    if rays.is_empty() {
        return Err(Error::degenerate("no rays"));
    }
    let n = rays[0].dim();
    let m = IntMat::from_cols(rays);
    let s = m.smith();
    if s.rank() < n {
        return Err(Error::degenerate("rays do not span the ambient space"));
    }
    let mut idx: i64 = 1;
    for &d in &s.diag {
        idx = mul64(idx, d);
    }
    Ok(idx)
}

/// Barycentric coordinates of the box points of a cone, scaled by
/// `D = |det(rays)|`: each returned vector `t` has entries in `[0, D)` and
/// represents the lattice point `rays * t / D`.  There are exactly `D` of
/// them, the origin (all zeros) included.
pub fn box_points_scaled(rays: &[IntVec]) -> Result<(i64, Vec<Vec<i64>>)> {
    let n = rays.len();
    if n == 0 || rays[0].dim() != n {
        return Err(Error::degenerate(
            "box_points needs n independent rays in dimension n",
        ));
    }
    let s = IntMat::from_cols(rays);
    let d = s.det().abs();
    if d == 0 {
        return Err(Error::degenerate("dependent rays"));
    }
    if d == 1 {
        return Ok((1, vec![vec![0; n]]));
    }
    let smith = s.smith();
    // scaled barycentric coordinates of the quotient-group generators
    let gens: Vec<Vec<i64>> = (0..n)
        .map(|k| {
            let t = s.solve(&smith.u_inv.col(k)).expect("nonsingular");
            t.iter()
                .map(|c| (c.num() * (d / c.den())).rem_euclid(d))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(d as usize);
    let mut counter = vec![0i64; n];
    let mut current = vec![0i64; n];
    loop {
        out.push(current.clone());
        // advance the mixed-radix counter, updating the scaled coordinates
        let mut i = 0;
        loop {
            if i == n {
                debug_assert_eq!(out.len() as i64, d);
                return Ok((d, out));
            }
            counter[i] += 1;
            for (c, g) in current.iter_mut().zip(&gens[i]) {
                *c = (*c + g) % d;
            }
            if counter[i] < smith.diag[i].max(1) {
                break;
            }
            // roll this digit back to zero
            for (c, g) in current.iter_mut().zip(&gens[i]) {
                *c = (*c - (g * counter[i]) % d).rem_euclid(d);
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// The lattice point of a scaled box coordinate vector.
pub fn box_point_of_scaled(rays: &[IntVec], d: i64, t: &[i64]) -> IntVec {
    let n = rays[0].dim();
    let mut p = vec![0i128; n];
    for (ray, &ti) in rays.iter().zip(t) {
        for (acc, &c) in p.iter_mut().zip(&ray.0) {
            *acc += c as i128 * ti as i128;
        }
    }
    IntVec(
        p.into_iter()
            .map(|x| {
                debug_assert_eq!(x % d as i128, 0, "box point is not a lattice point");
                fit_i64(x / d as i128)
            })
            .collect(),
    )
}

/// All lattice points `p = sum t_i * rays_i` with every `t_i` in `[0, 1)`,
/// together with their barycentric coordinates.  There are exactly
/// `|det(rays)|` of them, the origin included.
pub fn box_points(rays: &[IntVec]) -> Result<Vec<(IntVec, Vec<Rat>)>> {
    let (d, scaled) = box_points_scaled(rays)?;
    let mut out: Vec<(IntVec, Vec<Rat>)> = scaled
        .into_iter()
        .map(|t| {
            let p = box_point_of_scaled(rays, d, &t);
            (p, t.iter().map(|&ti| Rat::new(ti, d)).collect())
        })
        .collect();
    out.sort();
    Ok(out)
}
