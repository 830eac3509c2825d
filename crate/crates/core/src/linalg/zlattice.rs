//! Integer lattice algebra: Hermite and Smith normal forms, saturated
//! kernels, membership solving, and basis completion. Works on raw BigInt
//! rows for speed; `Matrix` wrappers convert at the boundary.

use super::Matrix;
use crate::error::{Error, Result};
use crate::ring::{RingDescriptor, RingElement};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) type ZRows = Vec<Vec<BigInt>>;

pub(crate) fn to_bigint_rows(m: &Matrix) -> ZRows {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|e| e.as_bigint().expect("integer matrix").clone())
                .collect()
        })
        .collect()
}

pub(crate) fn from_bigint_rows(rows: &[Vec<BigInt>], cols: usize) -> Matrix {
    let desc = RingDescriptor::Integer;
    let data: Vec<Vec<RingElement>> = rows
        .iter()
        .map(|r| {
            debug_assert_eq!(r.len(), cols);
            r.iter().map(|x| RingElement::from_bigint(desc, x)).collect()
        })
        .collect();
    if rows.is_empty() {
        Matrix::zeros(desc, 0, cols)
    } else {
        Matrix::from_rows(desc, data).expect("consistent rows")
    }
}

fn row_sub_scaled(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// Row Hermite form: returns (H, U, rank) with U unimodular, U·A = H, H in
/// row-echelon form with positive pivots and reduced entries above pivots.
/// When `with_transform` is false, U is empty.
pub(crate) fn row_hnf(a: &[Vec<BigInt>], cols: usize, with_transform: bool) -> (ZRows, ZRows, usize) {
    let n = a.len();
    let mut h: ZRows = a.to_vec();
    let mut u: ZRows = if with_transform {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut rank = 0usize;
    for c in 0..cols {
        if rank == n {
            break;
        }
        loop {
            // pivot with the smallest nonzero magnitude keeps growth down
            let mut piv: Option<usize> = None;
            for i in rank..n {
                if !h[i][c].is_zero()
                    && piv.map_or(true, |p| h[i][c].magnitude() < h[p][c].magnitude())
                {
                    piv = Some(i);
                }
            }
            let piv = match piv {
                Some(p) => p,
                None => break,
            };
            let mut done = true;
            for i in rank..n {
                if i == piv || h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[piv][c]);
                let (hp, hi) = two_rows(&mut h, piv, i);
                row_sub_scaled(hi, hp, &q);
                if with_transform {
                    let (up, ui) = two_rows(&mut u, piv, i);
                    row_sub_scaled(ui, up, &q);
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                h.swap(rank, piv);
                if with_transform {
                    u.swap(rank, piv);
                }
                if h[rank][c].is_negative() {
                    for x in h[rank].iter_mut() {
                        *x = -std::mem::take(x);
                    }
                    if with_transform {
                        for x in u[rank].iter_mut() {
                            *x = -std::mem::take(x);
                        }
                    }
                }
                // reduce entries above the pivot
                for i in 0..rank {
                    if h[i][c].is_zero() {
                        continue;
                    }
                    let q = h[i][c].div_floor(&h[rank][c]);
                    let (hr, hi) = two_rows(&mut h, rank, i);
                    row_sub_scaled(hi, hr, &q);
                    if with_transform {
                        let (ur, ui) = two_rows(&mut u, rank, i);
                        row_sub_scaled(ui, ur, &q);
                    }
                }
                rank += 1;
                break;
            }
        }
    }
    (h, u, rank)
}

fn two_rows<'a>(rows: &'a mut ZRows, a: usize, b: usize) -> (&'a [BigInt], &'a mut [BigInt]) {
    assert_ne!(a, b);
    if a < b {
        let (left, right) = rows.split_at_mut(b);
        (&left[a], &mut right[0])
    } else {
        let (left, right) = rows.split_at_mut(a);
        (&right[0] as &[BigInt], &mut left[b])
    }
}

/// Saturated basis of the left kernel {v : v·A = 0} of an integer matrix.
/// The rows of U matching zero rows of H form a basis of a direct summand,
/// hence the lattice is saturated.
pub(crate) fn left_kernel(a: &[Vec<BigInt>], cols: usize) -> ZRows {
    let (h, u, rank) = row_hnf(a, cols, true);
    let n = a.len();
    let mut ker = Vec::with_capacity(n - rank);
    for i in rank..n {
        debug_assert!(h[i].iter().all(|x| x.is_zero()));
        ker.push(u[i].clone());
    }
    ker
}

/// Saturation of the row lattice of `rows` inside ℤ^cols: the double left
/// kernel. Returns a saturated basis.
pub(crate) fn saturate(rows: &[Vec<BigInt>], cols: usize) -> ZRows {
    if rows.is_empty() {
        return Vec::new();
    }
    let t = transpose(rows, cols);
    let right_kernel = left_kernel(&t, rows.len());
    if right_kernel.is_empty() {
        // full rank: saturation is all of ℤ^cols
        return (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
    }
    let t2 = transpose(&right_kernel, cols);
    left_kernel(&t2, right_kernel.len())
}

pub(crate) fn transpose(rows: &[Vec<BigInt>], cols: usize) -> ZRows {
    (0..cols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Repeated-solve helper: factor K once, then answer x·K = d queries.
pub(crate) struct LatticeSolver {
    h: ZRows,
    u: ZRows,
    pivots: Vec<usize>,
    nrows: usize,
}

impl LatticeSolver {
    pub fn new(k: &[Vec<BigInt>], cols: usize) -> Self {
        let (h, u, rank) = row_hnf(k, cols, true);
        let pivots = (0..rank)
            .map(|i| h[i].iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        LatticeSolver {
            h,
            u,
            pivots,
            nrows: k.len(),
        }
    }

    /// Integer x with x·K = d, or None when d is outside the row lattice.
    pub fn solve(&self, d: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rem = d.to_vec();
        let mut coeff = vec![BigInt::zero(); self.nrows];
        for (i, &c) in self.pivots.iter().enumerate() {
            if rem[c].is_zero() {
                continue;
            }
            let (q, r) = rem[c].div_rem(&self.h[i][c]);
            if !r.is_zero() {
                return None;
            }
            row_sub_scaled(&mut rem, &self.h[i], &q);
            coeff[i] = q;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut out = vec![BigInt::zero(); self.nrows];
        for (i, c) in coeff.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, ui) in out.iter_mut().zip(&self.u[i]) {
                *o += c * ui;
            }
        }
        Some(out)
    }
}

/// Column operations bringing a saturated full-rank s×r matrix C to [T | 0]
/// with T unimodular, tracking V⁻¹. The returned rows s..r of V⁻¹ project to
/// a basis of ℤ^r / rowspace(C).
pub(crate) fn quotient_complement(c: &[Vec<BigInt>], r: usize) -> ZRows {
    let s = c.len();
    let mut m: ZRows = c.to_vec();
    // column-major access helper on m (s rows, r cols)
    let mut vinv: ZRows = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut col = 0usize;
    for row in 0..s {
        if col == r {
            break;
        }
        loop {
            let mut piv: Option<usize> = None;
            for j in col..r {
                if !m[row][j].is_zero()
                    && piv.map_or(true, |p| m[row][j].magnitude() < m[row][p].magnitude())
                {
                    piv = Some(j);
                }
            }
            let piv = match piv {
                Some(p) => p,
                None => break,
            };
            let mut done = true;
            for j in col..r {
                if j == piv || m[row][j].is_zero() {
                    continue;
                }
                let q = m[row][j].div_floor(&m[row][piv]);
                if !q.is_zero() {
                    // col_j -= q · col_piv on m; V⁻¹ row_piv += q · row_j
                    for i in row..s {
                        let t = &m[i][piv] * &q;
                        m[i][j] -= t;
                    }
                    let (src, dst) = two_rows(&mut vinv, j, piv);
                    for (d2, s2) in dst.iter_mut().zip(src) {
                        *d2 += &q * s2;
                    }
                }
                if !m[row][j].is_zero() {
                    done = false;
                }
            }
            if done {
                if piv != col {
                    for i in 0..s {
                        m[i].swap(piv, col);
                    }
                    vinv.swap(piv, col);
                }
                col += 1;
                break;
            }
        }
    }
    debug_assert_eq!(col, s, "quotient_complement expects full-rank saturated input");
    vinv.split_off(col)
}

/// Exact integer determinant (Bareiss fraction-free elimination).
pub(crate) fn det_bareiss(mut a: ZRows) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t.checked_div(&prev).expect("bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Smith normal form data: left·input·right = diagonal, transforms unimodular.
#[derive(Clone, Debug)]
pub struct SmithData {
    pub left: Matrix,
    pub right: Matrix,
    /// Elementary divisors in divisibility order, padded with zeros.
    pub diagonal: Vec<RingElement>,
}

/// Smith normal form of an integer matrix, with unimodular transforms.
pub fn smith_normal_form(m: &Matrix) -> Result<SmithData> {
    if m.descriptor() != RingDescriptor::Integer {
        return Err(Error::UnsupportedRing {
            op: "smith_normal_form",
            ring: m.descriptor().name(),
        });
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut a = to_bigint_rows(m);
    let ident = |n: usize| -> ZRows {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect()
    };
    let mut u = ident(rows);
    let mut v = ident(cols);
    let r = rows.min(cols);
    let mut t = 0usize;
    while t < r {
        // locate minimal nonzero entry in the trailing submatrix
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].magnitude() < a[bi][bj].magnitude())
                {
                    best = Some((i, j));
                }
            }
        }
        let (bi, bj) = match best {
            Some(b) => b,
            None => break,
        };
        a.swap(t, bi);
        u.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        v.swap(t, bj); // v kept as rows of Vᵀ; see transpose note below
        loop {
            let mut dirty = false;
            // clear column t
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let (at, ai) = two_rows(&mut a, t, i);
                row_sub_scaled(ai, at, &q);
                let (ut, ui) = two_rows(&mut u, t, i);
                row_sub_scaled(ui, ut, &q);
                if !a[i][t].is_zero() {
                    // remainder smaller than pivot: swap it up and restart
                    a.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            // clear row t
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let s = &row[t] * &q;
                        row[j] -= s;
                    }
                    let (vt, vj) = two_rows(&mut v, t, j);
                    for (d, s) in vj.iter_mut().zip(vt) {
                        *d -= &q * s;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    v.swap(t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        // divisibility: pivot must divide every later entry
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    let (ai, at) = two_rows(&mut a, i, t);
                    for (d, s) in at.iter_mut().zip(ai) {
                        *d += s;
                    }
                    let (ui, ut) = two_rows(&mut u, i, t);
                    for (d, s) in ut.iter_mut().zip(ui) {
                        *d += s;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if a[t][t].is_negative() {
            for row in a.iter_mut() {
                row[t] = -std::mem::take(&mut row[t]);
            }
            for x in v[t].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        t += 1;
    }
    let diagonal: Vec<RingElement> = (0..r)
        .map(|i| RingElement::from_bigint(RingDescriptor::Integer, &a[i][i]))
        .collect();
    // v was maintained as rows of Vᵀ (column ops as row ops on the tracker)
    let vt = from_bigint_rows(&v, cols);
    Ok(SmithData {
        left: from_bigint_rows(&u, rows),
        right: vt.transpose(),
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zm(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_i64(RingDescriptor::Integer, rows)
    }

    #[test]
    fn snf_diag_2_3() {
        let m = zm(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&m).unwrap();
        let d: Vec<String> = s.diagonal.iter().map(|x| x.to_string()).collect();
        assert_eq!(d, ["1", "6"]);
        let prod = s.left.mul(&m).unwrap().mul(&s.right).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { d[i].clone() } else { "0".into() };
                assert_eq!(prod.get(i, j).to_string(), want);
            }
        }
    }

    #[test]
    fn snf_zero_matrix() {
        let m = Matrix::zeros(RingDescriptor::Integer, 3, 2);
        let s = smith_normal_form(&m).unwrap();
        assert!(s.diagonal.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn snf_transforms_unimodular_and_consistent() {
        let m = zm(&[
            vec![2, 4, 4],
            vec![-6, 6, 12],
            vec![10, 4, 16],
        ]);
        let s = smith_normal_form(&m).unwrap();
        let dl = s.left.det().unwrap().to_string();
        let dr = s.right.det().unwrap().to_string();
        assert!(dl == "1" || dl == "-1");
        assert!(dr == "1" || dr == "-1");
        let prod = s.left.mul(&m).unwrap().mul(&s.right).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(prod.get(i, j).is_zero());
                } else {
                    assert_eq!(prod.get(i, j), &s.diagonal[i]);
                }
            }
        }
        // divisibility chain
        let d: Vec<BigInt> = s
            .diagonal
            .iter()
            .map(|x| x.as_bigint().unwrap().clone())
            .collect();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn kernel_is_saturated_and_annihilates() {
        let a = vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(3), BigInt::from(6)],
        ];
        let k = left_kernel(&a, 2);
        assert_eq!(k.len(), 2);
        for row in &k {
            for j in 0..2 {
                let s: BigInt = row.iter().zip(&a).map(|(x, ar)| x * &ar[j]).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn solver_membership() {
        let k = vec![
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(2)],
            vec![BigInt::from(0), BigInt::from(3), BigInt::from(1)],
        ];
        let s = LatticeSolver::new(&k, 3);
        let d = vec![BigInt::from(2), BigInt::from(3), BigInt::from(5)];
        let x = s.solve(&d).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(1)]);
        let outside = vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)];
        assert!(s.solve(&outside).is_none());
    }

    #[test]
    fn quotient_complement_completes_basis() {
        // saturated rank-1 sublattice of Z^3
        let c = vec![vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]];
        let tail = quotient_complement(&c, 3);
        assert_eq!(tail.len(), 2);
        // stacking C with the tail must be unimodular
        let mut all = c.clone();
        all.extend(tail);
        let d = det_bareiss(all);
        assert!(d.magnitude() == BigInt::one().magnitude());
    }
}
