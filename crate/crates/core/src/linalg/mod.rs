//! Dense exact matrices over the supported rings.
//!
//! Row vectors act on the right of matrices throughout (v ↦ v·M).

use crate::error::{Error, Result};
use crate::ring::{RingDescriptor, RingElement};
use num_traits::One;
use std::fmt;

pub mod classify;
pub mod kernel;
pub mod signature;
pub mod zlattice;

pub use classify::{classify_form, e8_form, hyperbolic_form, FormClass, Parity};
pub use kernel::{kernel_basis, KernelBasis};
pub use signature::signature;
pub use zlattice::{smith_normal_form, SmithData};

/// Dense row-major matrix with exact entries sharing one ring descriptor.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    desc: RingDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl Matrix {
    pub fn zeros(desc: RingDescriptor, rows: usize, cols: usize) -> Self {
        Matrix {
            desc,
            rows,
            cols,
            data: vec![RingElement::zero(desc); rows * cols],
        }
    }

    pub fn identity(desc: RingDescriptor, n: usize) -> Self {
        let mut m = Self::zeros(desc, n, n);
        for i in 0..n {
            m.set(i, i, RingElement::one(desc));
        }
        m
    }

    pub fn from_fn(
        desc: RingDescriptor,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> RingElement,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                if e.descriptor() != desc {
                    return Err(Error::RingMismatch(desc.name(), e.descriptor().name()));
                }
                data.push(e);
            }
        }
        Ok(Matrix {
            desc,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(desc: RingDescriptor, rows: Vec<Vec<RingElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dim("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for e in row {
                if e.descriptor() != desc {
                    return Err(Error::RingMismatch(desc.name(), e.descriptor().name()));
                }
                data.push(e);
            }
        }
        Ok(Matrix {
            desc,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Integer matrix from machine ints, in any ring.
    pub fn from_i64(desc: RingDescriptor, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for &n in row {
                data.push(RingElement::from_i64(desc, n));
            }
        }
        Matrix {
            desc,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn descriptor(&self) -> RingDescriptor {
        self.desc
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        assert_eq!(v.descriptor(), self.desc, "ring mismatch in Matrix::set");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RingElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<RingElement> {
        self.row(i).to_vec()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    /// Some(c) when the matrix is c·I.
    pub fn scalar_of(&self) -> Option<RingElement> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i == j {
                    if self.get(i, j) != &c {
                        return None;
                    }
                } else if !self.get(i, j).is_zero() {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.desc, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn map_entries(
        &self,
        desc: RingDescriptor,
        f: impl Fn(&RingElement) -> Result<RingElement>,
    ) -> Result<Matrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for e in &self.data {
            let v = f(e)?;
            if v.descriptor() != desc {
                return Err(Error::RingMismatch(desc.name(), v.descriptor().name()));
            }
            data.push(v);
        }
        Ok(Matrix {
            desc,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn involute_entrywise(&self) -> Matrix {
        Matrix {
            desc: self.desc,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.involute()).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim(format!(
                "add {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.data.len());
        for (a, b) in self.data.iter().zip(&other.data) {
            data.push(a.add(b)?);
        }
        Ok(Matrix {
            desc: self.desc,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            desc: self.desc,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.desc != other.desc {
            return Err(Error::RingMismatch(self.desc.name(), other.desc.name()));
        }
        if self.cols != other.rows {
            return Err(Error::Dim(format!(
                "mul {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.desc, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(t, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b)?;
                    let cur = out.get(i, j).add(&prod)?;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &RingElement) -> Result<Matrix> {
        self.map_entries(self.desc, |e| e.mul(c))
    }

    /// v·M for a row vector v.
    pub fn row_times(&self, v: &[RingElement]) -> Result<Vec<RingElement>> {
        if v.len() != self.rows {
            return Err(Error::Dim(format!(
                "row_times: len {} vs {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![RingElement::zero(self.desc); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let b = self.get(i, j);
                if b.is_zero() {
                    continue;
                }
                out[j] = out[j].add(&x.mul(b)?)?;
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols || self.desc != other.desc {
            return Err(Error::Dim("vstack mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            desc: self.desc,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.desc != other.desc {
            return Err(Error::Dim("hstack mismatch".into()));
        }
        let mut data = Vec::with_capacity((self.cols + other.cols) * self.rows);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        Ok(Matrix {
            desc: self.desc,
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Direct sum with a zero block of the given size.
    pub fn direct_sum_zero(&self, z: usize) -> Matrix {
        let n = self.rows + z;
        let mut out = Matrix::zeros(self.desc, n, self.cols + z);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant. Bareiss over ℤ and ℤ[ζ₁₆], Gaussian elimination
    /// over fields; unsupported over 𝔽_p[y]/(y^p).
    pub fn det(&self) -> Result<RingElement> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(RingElement::one(self.desc));
        }
        match self.desc {
            RingDescriptor::Integer => {
                let a = zlattice::to_bigint_rows(self);
                Ok(RingElement::from_bigint(
                    self.desc,
                    &zlattice::det_bareiss(a),
                ))
            }
            RingDescriptor::Cyclotomic16 => self.det_bareiss_ring(),
            RingDescriptor::Rational | RingDescriptor::IntegerModP(_) => self.det_gauss(),
            RingDescriptor::TruncatedPoly(_) => Err(Error::UnsupportedRing {
                op: "det",
                ring: self.desc.name(),
            }),
        }
    }

    fn det_bareiss_ring(&self) -> Result<RingElement> {
        let n = self.rows;
        let mut a: Vec<Vec<RingElement>> = (0..n).map(|i| self.row_vec(i)).collect();
        let mut sign = false;
        let mut prev = RingElement::one(self.desc);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = !sign;
                    }
                    None => return Ok(RingElement::zero(self.desc)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = a[i][j].mul(&a[k][k])?.sub(&a[i][k].mul(&a[k][j])?)?;
                    a[i][j] = t.div_exact(&prev)?;
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if sign { d.neg() } else { d })
    }

    fn det_gauss(&self) -> Result<RingElement> {
        let n = self.rows;
        let mut a: Vec<Vec<RingElement>> = (0..n).map(|i| self.row_vec(i)).collect();
        let mut det = RingElement::one(self.desc);
        for c in 0..n {
            let piv = match (c..n).find(|&i| !a[i][c].is_zero()) {
                Some(p) => p,
                None => return Ok(RingElement::zero(self.desc)),
            };
            if piv != c {
                a.swap(c, piv);
                det = det.neg();
            }
            det = det.mul(&a[c][c])?;
            let inv = a[c][c].invert()?;
            for j in c..n {
                a[c][j] = a[c][j].mul(&inv)?;
            }
            for i in c + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                for j in c..n {
                    let t = a[c][j].mul(&f)?;
                    a[i][j] = a[i][j].sub(&t)?;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse. Errors with `Singular` when not invertible over the
    /// ring (for ℤ and ℤ[ζ₁₆] that includes non-unit determinants).
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        match self.desc {
            RingDescriptor::Rational | RingDescriptor::IntegerModP(_) => self.inverse_gauss(),
            RingDescriptor::TruncatedPoly(_) => self.inverse_gauss(),
            RingDescriptor::Integer => {
                let q = self.map_entries(RingDescriptor::Rational, |e| {
                    Ok(RingElement::from_bigint(
                        RingDescriptor::Rational,
                        e.as_bigint().unwrap(),
                    ))
                })?;
                let inv = q.inverse_gauss()?;
                inv.map_entries(RingDescriptor::Integer, |e| {
                    let r = e.as_rational().unwrap();
                    if r.denom().is_one() {
                        Ok(RingElement::from_bigint(RingDescriptor::Integer, r.numer()))
                    } else {
                        Err(Error::Singular)
                    }
                })
            }
            RingDescriptor::Cyclotomic16 => self.inverse_adjugate(),
        }
    }

    /// Gauss-Jordan over fields, and over 𝔽_p[y]/(y^p) with unit pivots
    /// (a matrix over the local ring is invertible iff one exists at every
    /// step).
    fn inverse_gauss(&self) -> Result<Matrix> {
        let n = self.rows;
        let mut a: Vec<Vec<RingElement>> = (0..n)
            .map(|i| {
                let mut r = self.row_vec(i);
                for j in 0..n {
                    r.push(RingElement::from_i64(self.desc, (i == j) as i64));
                }
                r
            })
            .collect();
        for c in 0..n {
            let piv = (c..n)
                .find(|&i| a[i][c].is_unit())
                .ok_or(Error::Singular)?;
            a.swap(c, piv);
            let inv = a[c][c].invert()?;
            for j in 0..2 * n {
                a[c][j] = a[c][j].mul(&inv)?;
            }
            for i in 0..n {
                if i == c || a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = a[c][j].mul(&f)?;
                    a[i][j] = a[i][j].sub(&t)?;
                }
            }
        }
        Matrix::from_rows(self.desc, a.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    fn inverse_adjugate(&self) -> Result<Matrix> {
        let n = self.rows;
        let det = self.det()?;
        let det_inv = det.invert().map_err(|_| Error::Singular)?;
        let mut adj = Matrix::zeros(self.desc, n, n);
        for i in 0..n {
            for j in 0..n {
                // cofactor C_ji for the (i,j) entry of the adjugate
                let minor = self.minor(j, i)?;
                let mut c = minor.det()?;
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                adj.set(i, j, c.mul(&det_inv)?);
            }
        }
        Ok(adj)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Result<Matrix> {
        let rows: Vec<Vec<RingElement>> = (0..self.rows)
            .filter(|&i| i != skip_row)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| j != skip_col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect();
        Matrix::from_rows(self.desc, rows)
    }

    /// Entrywise image under the ℤ[ζ₁₆] → 𝔽_p[y]/(y^p) base change.
    pub fn base_change_eq5(&self, p: u64) -> Result<Matrix> {
        self.map_entries(RingDescriptor::truncated_poly(p)?, |e| e.base_change_eq5(p))
    }

    /// Parse from a ring header and array-of-arrays of entry strings.
    pub fn parse_entries(desc: RingDescriptor, entries: &[Vec<String>]) -> Result<Matrix> {
        let rows: Result<Vec<Vec<RingElement>>> = entries
            .iter()
            .map(|row| row.iter().map(|s| RingElement::parse(desc, s)).collect())
            .collect();
        Matrix::from_rows(desc, rows?)
    }

    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.to_string()).collect())
            .collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.desc)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
