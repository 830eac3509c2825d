//! Exact signature of symmetric matrices over ℤ or ℚ by congruence
//! diagonalization; Sylvester's law is the invariant being computed, no
//! floating point anywhere.

use super::Matrix;
use crate::error::{Error, Result};
use crate::ring::RingDescriptor;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// (positive, negative, zero) inertia counts of a symmetric matrix.
pub fn signature(w: &Matrix) -> Result<(usize, usize, usize)> {
    match w.descriptor() {
        RingDescriptor::Integer | RingDescriptor::Rational => {}
        other => {
            return Err(Error::UnsupportedRing {
                op: "signature",
                ring: other.name(),
            })
        }
    }
    if !w.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = w.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match w.descriptor() {
                    RingDescriptor::Integer => {
                        BigRational::from(w.get(i, j).as_bigint().unwrap().clone())
                    }
                    _ => w.get(i, j).as_rational().unwrap().clone(),
                })
                .collect()
        })
        .collect();
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut zero = 0usize;
    let mut size = n;
    while size > 0 {
        // a nonzero diagonal pivot, else create one from an off-diagonal pair
        let dpiv = (0..size).find(|&i| !a[i][i].is_zero());
        let piv = match dpiv {
            Some(p) => p,
            None => {
                let mut off = None;
                'outer: for i in 0..size {
                    for j in i + 1..size {
                        if !a[i][j].is_zero() {
                            off = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                match off {
                    None => {
                        zero += size;
                        break;
                    }
                    Some((i, j)) => {
                        // hyperbolic pair: e_i += e_j makes a[i][i] = 2·a[i][j]
                        for t in 0..size {
                            let x = a[j][t].clone();
                            a[i][t] += x;
                        }
                        for t in 0..size {
                            let x = a[t][j].clone();
                            a[t][i] += x;
                        }
                        i
                    }
                }
            }
        };
        if piv != 0 {
            a.swap(0, piv);
            for row in a.iter_mut().take(size) {
                row.swap(0, piv);
            }
        }
        let pv = a[0][0].clone();
        if pv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in 1..size {
            if a[i][0].is_zero() {
                continue;
            }
            let f = &a[i][0] / &pv;
            for t in 0..size {
                let s = &f * &a[0][t];
                a[i][t] -= s;
            }
            for t in 0..size {
                let s = &f * &a[t][0];
                a[t][i] -= s;
            }
        }
        a = a
            .into_iter()
            .skip(1)
            .take(size - 1)
            .map(|row| row.into_iter().skip(1).take(size - 1).collect())
            .collect();
        size -= 1;
    }
    Ok((pos, neg, zero))
}

/// Convenience: signature as p − n.
pub fn signature_index(w: &Matrix) -> Result<i64> {
    let (p, n, _) = signature(w)?;
    Ok(p as i64 - n as i64)
}

/// Rational rank of an integer or rational matrix.
pub(crate) fn rational_rank(m: &Matrix) -> Result<usize> {
    let n = m.rows();
    let c = m.cols();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..c)
                .map(|j| match m.descriptor() {
                    RingDescriptor::Integer => {
                        BigRational::from(m.get(i, j).as_bigint().unwrap().clone())
                    }
                    RingDescriptor::Rational => m.get(i, j).as_rational().unwrap().clone(),
                    _ => unreachable!(),
                })
                .collect()
        })
        .collect();
    let mut r = 0usize;
    for col in 0..c {
        if r == n {
            break;
        }
        let piv = match (r..n).find(|&i| !a[i][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        a.swap(r, piv);
        let pv = a[r][col].clone();
        for j in col..c {
            a[r][j] = &a[r][j] / &pv;
        }
        for i in 0..n {
            if i == r || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in col..c {
                let s = &f * &a[r][j];
                a[i][j] -= s;
            }
        }
        r += 1;
    }
    Ok(r)
}
