//! Left kernels {v : v·M = 0} over ℤ (saturated lattice basis), fields, and
//! the local rings 𝔽_p[y]/(y^p).

use super::{zlattice, Matrix};
use crate::error::{Error, Result};
use crate::ring::{RingDescriptor, RingElement};

/// Kernel generators. Over ℤ and fields the rows are a basis; over
/// 𝔽_p[y]/(y^p) they generate, and `annihilator_exponents[i] = a` records
/// that y^a kills generator i (a = p for free generators).
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub rows: Matrix,
    pub annihilator_exponents: Option<Vec<u32>>,
}

/// Basis (or generating set) of the left kernel of `m`.
pub fn kernel_basis(m: &Matrix) -> Result<KernelBasis> {
    match m.descriptor() {
        RingDescriptor::Integer => {
            let a = zlattice::to_bigint_rows(m);
            let k = zlattice::left_kernel(&a, m.cols());
            Ok(KernelBasis {
                rows: zlattice::from_bigint_rows(&k, m.rows()),
                annihilator_exponents: None,
            })
        }
        RingDescriptor::Rational | RingDescriptor::IntegerModP(_) => Ok(KernelBasis {
            rows: field_left_kernel(m)?,
            annihilator_exponents: None,
        }),
        RingDescriptor::TruncatedPoly(p) => local_left_kernel(m, p),
        other => Err(Error::UnsupportedRing {
            op: "kernel_basis",
            ring: other.name(),
        }),
    }
}

/// Reduced row echelon form of a field matrix; returns (echelon rows, pivot
/// columns).
pub(crate) fn field_rref(m: &Matrix) -> Result<(Vec<Vec<RingElement>>, Vec<usize>)> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<RingElement>> = (0..rows).map(|i| m.row_vec(i)).collect();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = match (r..rows).find(|&i| !a[i][c].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        a.swap(r, piv);
        let inv = a[r][c].invert()?;
        for j in 0..cols {
            a[r][j] = a[r][j].mul(&inv)?;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..cols {
                let t = a[r][j].mul(&f)?;
                a[i][j] = a[i][j].sub(&t)?;
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Ok((a, pivots))
}

/// Left kernel over a field via the echelon form of the transpose.
fn field_left_kernel(m: &Matrix) -> Result<Matrix> {
    let desc = m.descriptor();
    let n = m.rows();
    let (ech, pivots) = field_rref(&m.transpose())?;
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![RingElement::zero(desc); n];
        v[free] = RingElement::one(desc);
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = ech[i][free].neg();
        }
        basis.push(v);
    }
    if basis.is_empty() {
        Ok(Matrix::zeros(desc, 0, n))
    } else {
        Matrix::from_rows(desc, basis)
    }
}

/// Kernel over 𝔽_p[y]/(y^p): Smith-like diagonalization with y-power pivots.
/// Entries have a y-valuation; the minimal-valuation entry clears its row and
/// column exactly, leaving a diagonal of y-powers.
fn local_left_kernel(m: &Matrix, p: u64) -> Result<KernelBasis> {
    let desc = m.descriptor();
    let rows = m.rows();
    let cols = m.cols();
    let val = |e: &RingElement| -> u32 {
        let c = e.as_poly().unwrap();
        for (i, &x) in c.iter().enumerate() {
            if x != 0 {
                return i as u32;
            }
        }
        p as u32
    };
    // shift the coefficients of e down by v (exact when val(e) >= v)
    let shift_down = |e: &RingElement, v: u32| -> RingElement {
        let c = e.as_poly().unwrap();
        let mut out = vec![0i64; p as usize];
        for (i, &x) in c.iter().enumerate().skip(v as usize) {
            out[i - v as usize] = x as i64;
        }
        RingElement::poly_coeffs(p, &out)
    };
    let y_pow = |k: u32| -> RingElement {
        let mut out = vec![0i64; p as usize];
        if (k as usize) < p as usize {
            out[k as usize] = 1;
        }
        RingElement::poly_coeffs(p, &out)
    };
    let mut a: Vec<Vec<RingElement>> = (0..rows).map(|i| m.row_vec(i)).collect();
    let mut u: Vec<Vec<RingElement>> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| RingElement::from_i64(desc, (i == j) as i64))
                .collect()
        })
        .collect();
    let r = rows.min(cols);
    let mut diag_vals = Vec::new();
    let mut t = 0usize;
    while t < r {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = val(&a[i][j]);
                if v < p as u32 && best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let (bi, bj, v) = match best {
            Some(b) => b,
            None => break,
        };
        a.swap(t, bi);
        u.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        // normalize the pivot to y^v: pivot = y^v·unit, multiply row by unit⁻¹
        let unit = shift_down(&a[t][t], v);
        let unit_inv = unit.invert()?;
        for j in 0..cols {
            a[t][j] = a[t][j].mul(&unit_inv)?;
        }
        for x in u[t].iter_mut() {
            *x = x.mul(&unit_inv)?;
        }
        // clear column t (rows below) and row t (columns right); every other
        // entry has valuation >= v so the division is exact
        for i in 0..rows {
            if i == t || a[i][t].is_zero() {
                continue;
            }
            let f = shift_down(&a[i][t], v);
            for j in 0..cols {
                let s = f.mul(&a[t][j])?;
                a[i][j] = a[i][j].sub(&s)?;
            }
            let ft = f.clone();
            for j in 0..rows {
                let s = ft.mul(&u[t][j])?;
                u[i][j] = u[i][j].sub(&s)?;
            }
        }
        for j in 0..cols {
            if j == t || a[t][j].is_zero() {
                continue;
            }
            let f = shift_down(&a[t][j], v);
            // column op: col_j -= f·col_t; only row t is nonzero in col t now
            let s = f.mul(&a[t][t])?;
            a[t][j] = a[t][j].sub(&s)?;
        }
        diag_vals.push(v);
        t += 1;
    }
    // kernel of the diagonal: y^{p-v}·e_i for v > 0, e_i for rows beyond rank
    let mut gens = Vec::new();
    let mut anns = Vec::new();
    for (i, &v) in diag_vals.iter().enumerate() {
        if v > 0 {
            let c = y_pow(p as u32 - v);
            let row: Vec<RingElement> = u[i].iter().map(|x| x.mul(&c)).collect::<Result<_>>()?;
            gens.push(row);
            anns.push(v);
        }
    }
    for row in u.iter().take(rows).skip(t) {
        gens.push(row.clone());
        anns.push(p as u32);
    }
    let rows_m = if gens.is_empty() {
        Matrix::zeros(desc, 0, rows)
    } else {
        Matrix::from_rows(desc, gens)?
    };
    Ok(KernelBasis {
        rows: rows_m,
        annihilator_exponents: Some(anns),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_empty_kernel() {
        for desc in [
            RingDescriptor::Integer,
            RingDescriptor::Rational,
            RingDescriptor::IntegerModP(5),
        ] {
            let m = Matrix::identity(desc, 4);
            assert_eq!(kernel_basis(&m).unwrap().rows.rows(), 0);
        }
    }

    #[test]
    fn zero_matrix_full_kernel_over_q() {
        let m = Matrix::zeros(RingDescriptor::Rational, 3, 2);
        let k = kernel_basis(&m).unwrap();
        assert_eq!(k.rows.rows(), 3);
    }

    #[test]
    fn integer_kernel_annihilates_and_rank_nullity() {
        // fixed 4x6 integer matrix of rank 2
        let m = Matrix::from_i64(
            RingDescriptor::Integer,
            &[
                vec![1, 2, 3, 0, 1, -1],
                vec![2, 4, 6, 0, 2, -2],
                vec![0, 1, -1, 2, 0, 3],
                vec![1, 3, 2, 2, 1, 2],
            ],
        );
        let k = kernel_basis(&m).unwrap().rows;
        assert_eq!(k.rows(), 2);
        let prod = k.mul(&m).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn f2y_kernel_of_y_scalar() {
        // multiplication by y on R^2: kernel = (y)·R^2, annihilators y^1
        let desc = RingDescriptor::TruncatedPoly(2);
        let y = RingElement::poly_coeffs(2, &[0, 1]);
        let mut m = Matrix::zeros(desc, 2, 2);
        m.set(0, 0, y.clone());
        m.set(1, 1, y.clone());
        let k = kernel_basis(&m).unwrap();
        assert_eq!(k.rows.rows(), 2);
        assert_eq!(k.annihilator_exponents.unwrap(), vec![1, 1]);
        assert!(k.rows.mul(&m).unwrap().is_zero());
    }
}
