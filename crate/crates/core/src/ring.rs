//! Exact arithmetic in the supported coefficient rings, with involution.
//!
//! Supported rings: ℤ, ℚ, ℤ/P (P prime), 𝔽_p[y]/(y^p), and ℤ[ζ₁₆] presented
//! as ℤ[x]/(x⁸+1). Every element is kept in canonical form so that equality
//! is payload equality.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Identifies a coefficient ring. Cheap to copy and compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    Integer,
    Rational,
    IntegerModP(u64),
    /// 𝔽_p[y]/(y^p) for a prime p.
    TruncatedPoly(u64),
    /// ℤ[ζ₁₆] = ℤ[x]/(x⁸+1), ζ a primitive 16th root of unity.
    Cyclotomic16,
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc: u128 = 1;
        let m = n as u128;
        let mut bb = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m;
            }
            bb = bb * bb % m;
            e >>= 1;
        }
        b = acc as u64;
        b
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = pow(x, 2);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl RingDescriptor {
    pub fn integer_mod_p(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(RingDescriptor::IntegerModP(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn truncated_poly(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(RingDescriptor::TruncatedPoly(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// Parse "Z" | "Q" | "Zmod:P" | "Fpy:p" | "Zzeta16".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "Z" => return Ok(RingDescriptor::Integer),
            "Q" => return Ok(RingDescriptor::Rational),
            "Zzeta16" => return Ok(RingDescriptor::Cyclotomic16),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("Zmod:") {
            let p: u64 = p.parse().map_err(|_| Error::BadDescriptor(s.into()))?;
            return Self::integer_mod_p(p);
        }
        if let Some(p) = s.strip_prefix("Fpy:") {
            let p: u64 = p.parse().map_err(|_| Error::BadDescriptor(s.into()))?;
            return Self::truncated_poly(p);
        }
        Err(Error::BadDescriptor(s.into()))
    }

    pub fn name(&self) -> String {
        match self {
            RingDescriptor::Integer => "Z".into(),
            RingDescriptor::Rational => "Q".into(),
            RingDescriptor::IntegerModP(p) => format!("Zmod:{p}"),
            RingDescriptor::TruncatedPoly(p) => format!("Fpy:{p}"),
            RingDescriptor::Cyclotomic16 => "Zzeta16".into(),
        }
    }

    /// Only ℤ[ζ₁₆] carries a nontrivial involution (ζ ↦ ζ⁻¹).
    pub fn has_involution(&self) -> bool {
        matches!(self, RingDescriptor::Cyclotomic16)
    }

    pub fn is_field(&self) -> bool {
        matches!(
            self,
            RingDescriptor::Rational | RingDescriptor::IntegerModP(_)
        )
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Value {
    Int(BigInt),
    Rat(BigRational),
    /// Residue in [0, P).
    ModP(u64),
    /// Coefficients c_0..c_{p-1} of a class mod y^p, each in [0, p).
    Poly(Vec<u64>),
    /// Coefficients of 1, ζ, ..., ζ⁷ mod x⁸+1.
    Cyc(Vec<BigInt>),
}

/// An exact scalar carrying its ring descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    desc: RingDescriptor,
    val: Value,
}

fn check_same(a: &RingElement, b: &RingElement) -> Result<()> {
    if a.desc != b.desc {
        return Err(Error::RingMismatch(a.desc.name(), b.desc.name()));
    }
    Ok(())
}

impl RingElement {
    pub fn descriptor(&self) -> RingDescriptor {
        self.desc
    }

    pub fn zero(desc: RingDescriptor) -> Self {
        Self::from_i64(desc, 0)
    }

    pub fn one(desc: RingDescriptor) -> Self {
        Self::from_i64(desc, 1)
    }

    pub fn from_i64(desc: RingDescriptor, n: i64) -> Self {
        let val = match desc {
            RingDescriptor::Integer => Value::Int(BigInt::from(n)),
            RingDescriptor::Rational => Value::Rat(BigRational::from(BigInt::from(n))),
            RingDescriptor::IntegerModP(p) => Value::ModP(n.rem_euclid(p as i64) as u64),
            RingDescriptor::TruncatedPoly(p) => {
                let mut c = vec![0u64; p as usize];
                c[0] = n.rem_euclid(p as i64) as u64;
                Value::Poly(c)
            }
            RingDescriptor::Cyclotomic16 => {
                let mut c = vec![BigInt::zero(); 8];
                c[0] = BigInt::from(n);
                Value::Cyc(c)
            }
        };
        RingElement { desc, val }
    }

    pub fn from_bigint(desc: RingDescriptor, n: &BigInt) -> Self {
        let val = match desc {
            RingDescriptor::Integer => Value::Int(n.clone()),
            RingDescriptor::Rational => Value::Rat(BigRational::from(n.clone())),
            RingDescriptor::IntegerModP(p) => {
                let m = n.mod_floor_u64(p);
                Value::ModP(m)
            }
            RingDescriptor::TruncatedPoly(p) => {
                let mut c = vec![0u64; p as usize];
                c[0] = n.mod_floor_u64(p);
                Value::Poly(c)
            }
            RingDescriptor::Cyclotomic16 => {
                let mut c = vec![BigInt::zero(); 8];
                c[0] = n.clone();
                Value::Cyc(c)
            }
        };
        RingElement { desc, val }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        RingElement {
            desc: RingDescriptor::Rational,
            val: Value::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    /// ζ^k for any integer k (ζ⁸ = −1).
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(16) as usize;
        let mut c = vec![BigInt::zero(); 8];
        if k < 8 {
            c[k] = BigInt::one();
        } else {
            c[k - 8] = BigInt::from(-1);
        }
        RingElement {
            desc: RingDescriptor::Cyclotomic16,
            val: Value::Cyc(c),
        }
    }

    /// The class of y in 𝔽_p[y]/(y^p).
    pub fn poly_y(p: u64) -> Self {
        let mut c = vec![0u64; p as usize];
        if p > 1 {
            c[1] = 1;
        }
        RingElement {
            desc: RingDescriptor::TruncatedPoly(p),
            val: Value::Poly(c),
        }
    }

    pub fn cyclotomic(coeffs: [i64; 8]) -> Self {
        RingElement {
            desc: RingDescriptor::Cyclotomic16,
            val: Value::Cyc(coeffs.iter().map(|&c| BigInt::from(c)).collect()),
        }
    }

    pub fn poly_coeffs(p: u64, coeffs: &[i64]) -> Self {
        let mut c = vec![0u64; p as usize];
        for (i, &x) in coeffs.iter().enumerate().take(p as usize) {
            c[i] = x.rem_euclid(p as i64) as u64;
        }
        RingElement {
            desc: RingDescriptor::TruncatedPoly(p),
            val: Value::Poly(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.val {
            Value::Int(n) => n.is_zero(),
            Value::Rat(r) => r.is_zero(),
            Value::ModP(r) => *r == 0,
            Value::Poly(c) => c.iter().all(|&x| x == 0),
            Value::Cyc(c) => c.iter().all(|x| x.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.desc)
    }

    /// Exposes the integer payload when the ring is ℤ.
    pub fn as_bigint(&self) -> Option<&BigInt> {
        match &self.val {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.val {
            Value::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Residue payload for ℤ/P.
    pub fn as_modp(&self) -> Option<u64> {
        match &self.val {
            Value::ModP(r) => Some(*r),
            _ => None,
        }
    }

    /// Coefficients (c_0.., each in [0,p)) for 𝔽_p[y]/(y^p).
    pub fn as_poly(&self) -> Option<&[u64]> {
        match &self.val {
            Value::Poly(c) => Some(c),
            _ => None,
        }
    }

    /// Coefficients of 1, ζ, ..., ζ⁷.
    pub fn as_cyclotomic(&self) -> Option<&[BigInt]> {
        match &self.val {
            Value::Cyc(c) => Some(c),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        let val = match (&self.val, &other.val) {
            (Value::Int(a), Value::Int(b)) => Value::Int(a + b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::ModP(a), Value::ModP(b)) => {
                let p = self.modp_p();
                Value::ModP(((*a as u128 + *b as u128) % p as u128) as u64)
            }
            (Value::Poly(a), Value::Poly(b)) => {
                let p = self.poly_p();
                Value::Poly(a.iter().zip(b).map(|(x, y)| (x + y) % p).collect())
            }
            (Value::Cyc(a), Value::Cyc(b)) => {
                Value::Cyc(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => unreachable!(),
        };
        Ok(RingElement {
            desc: self.desc,
            val,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let val = match &self.val {
            Value::Int(a) => Value::Int(-a),
            Value::Rat(a) => Value::Rat(-a),
            Value::ModP(a) => {
                let p = self.modp_p();
                Value::ModP(if *a == 0 { 0 } else { p - a })
            }
            Value::Poly(c) => {
                let p = self.poly_p();
                Value::Poly(c.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect())
            }
            Value::Cyc(c) => Value::Cyc(c.iter().map(|x| -x).collect()),
        };
        RingElement {
            desc: self.desc,
            val,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        let val = match (&self.val, &other.val) {
            (Value::Int(a), Value::Int(b)) => Value::Int(a * b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            (Value::ModP(a), Value::ModP(b)) => {
                let p = self.modp_p();
                Value::ModP((*a as u128 * *b as u128 % p as u128) as u64)
            }
            (Value::Poly(a), Value::Poly(b)) => {
                let p = self.poly_p();
                let n = a.len();
                let mut out = vec![0u64; n];
                for (i, &x) in a.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in b.iter().enumerate() {
                        if i + j >= n || y == 0 {
                            continue;
                        }
                        out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128)
                            % p as u128) as u64;
                    }
                }
                Value::Poly(out)
            }
            (Value::Cyc(a), Value::Cyc(b)) => {
                let mut out = vec![BigInt::zero(); 8];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let k = i + j;
                        if k < 8 {
                            out[k] += x * y;
                        } else {
                            // ζ⁸ = −1
                            out[k - 8] -= x * y;
                        }
                    }
                }
                Value::Cyc(out)
            }
            _ => unreachable!(),
        };
        Ok(RingElement {
            desc: self.desc,
            val,
        })
    }

    /// Identity on every ring except ℤ[ζ₁₆], where ζ^k ↦ ζ^{−k}.
    pub fn involute(&self) -> Self {
        match &self.val {
            Value::Cyc(c) => {
                let mut out = vec![BigInt::zero(); 8];
                out[0] = c[0].clone();
                for (k, x) in c.iter().enumerate().skip(1) {
                    // ζ^{-k} = -ζ^{8-k}
                    out[8 - k] -= x;
                }
                RingElement {
                    desc: self.desc,
                    val: Value::Cyc(out),
                }
            }
            _ => self.clone(),
        }
    }

    /// Exact multiplicative inverse; errors on non-units.
    pub fn invert(&self) -> Result<Self> {
        Self::one(self.desc).div_exact(self)
    }

    pub fn is_unit(&self) -> bool {
        self.invert().is_ok()
    }

    /// Exact division a/b inside the ring; for ℤ and ℤ[ζ₁₆] the quotient is
    /// computed over the fraction field and asserted integral.
    pub fn div_exact(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        if other.is_zero() {
            return Err(Error::ZeroDivision);
        }
        let val = match (&self.val, &other.val) {
            (Value::Int(a), Value::Int(b)) => {
                use num_integer::Integer;
                let (q, r) = a.div_rem(b);
                if !r.is_zero() {
                    return Err(Error::NonIntegralDivision(a.to_string(), b.to_string()));
                }
                Value::Int(q)
            }
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a / b),
            (Value::ModP(a), Value::ModP(b)) => {
                let p = self.modp_p();
                let binv = modp_inverse(*b, p).ok_or(Error::ZeroDivision)?;
                Value::ModP((*a as u128 * binv as u128 % p as u128) as u64)
            }
            (Value::Poly(_), Value::Poly(b)) => {
                let p = self.poly_p();
                let binv = poly_inverse(b, p)
                    .ok_or_else(|| Error::NotAUnit(other.to_string()))?;
                let inv = RingElement {
                    desc: self.desc,
                    val: Value::Poly(binv),
                };
                return self.mul(&inv);
            }
            (Value::Cyc(a), Value::Cyc(b)) => {
                let binv = cyc_rational_inverse(b)?;
                // a * b^{-1} over ℚ[x]/(x⁸+1), then integrality check
                let mut out = vec![BigRational::zero(); 8];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let xr = BigRational::from(x.clone());
                    for (j, y) in binv.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let k = i + j;
                        let prod = &xr * y;
                        if k < 8 {
                            out[k] += prod;
                        } else {
                            out[k - 8] -= prod;
                        }
                    }
                }
                let mut ints = Vec::with_capacity(8);
                for r in &out {
                    if !r.denom().is_one() {
                        return Err(Error::NonIntegralDivision(
                            self.to_string(),
                            other.to_string(),
                        ));
                    }
                    ints.push(r.numer().clone());
                }
                Value::Cyc(ints)
            }
            _ => unreachable!(),
        };
        Ok(RingElement {
            desc: self.desc,
            val,
        })
    }

    /// The base change of Eq.-style ζ_{p^t} ↦ 1+y, here 16 = 2⁴ so only p = 2
    /// is meaningful: ℤ[ζ₁₆] → 𝔽₂[y]/(y²).
    pub fn base_change_eq5(&self, p: u64) -> Result<RingElement> {
        if self.desc != RingDescriptor::Cyclotomic16 {
            return Err(Error::UnsupportedRing {
                op: "base_change_eq5",
                ring: self.desc.name(),
            });
        }
        if p != 2 {
            return Err(Error::UnsupportedBaseChange(p));
        }
        let c = self.as_cyclotomic().unwrap();
        // ζ^k ↦ (1+y)^k = 1 + k·y over 𝔽₂[y]/(y²)
        let mut c0 = 0u64;
        let mut c1 = 0u64;
        for (k, x) in c.iter().enumerate() {
            let b = x.mod_floor_u64(2);
            c0 ^= b;
            c1 ^= b * (k as u64 % 2);
        }
        Ok(RingElement {
            desc: RingDescriptor::TruncatedPoly(2),
            val: Value::Poly(vec![c0, c1]),
        })
    }

    fn modp_p(&self) -> u64 {
        match self.desc {
            RingDescriptor::IntegerModP(p) => p,
            _ => unreachable!(),
        }
    }

    fn poly_p(&self) -> u64 {
        match self.desc {
            RingDescriptor::TruncatedPoly(p) => p,
            _ => unreachable!(),
        }
    }

    /// Parse the canonical string forms; whitespace-insensitive.
    pub fn parse(desc: RingDescriptor, s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse {
            what: "ring element",
            text: s.to_string(),
        };
        match desc {
            RingDescriptor::Integer => {
                let n: BigInt = compact.parse().map_err(|_| bad())?;
                Ok(RingElement {
                    desc,
                    val: Value::Int(n),
                })
            }
            RingDescriptor::Rational => {
                if let Some((a, b)) = compact.split_once('/') {
                    let num: BigInt = a.parse().map_err(|_| bad())?;
                    let den: BigInt = b.parse().map_err(|_| bad())?;
                    if den.is_zero() {
                        return Err(bad());
                    }
                    Ok(RingElement {
                        desc,
                        val: Value::Rat(BigRational::new(num, den)),
                    })
                } else {
                    let n: BigInt = compact.parse().map_err(|_| bad())?;
                    Ok(RingElement {
                        desc,
                        val: Value::Rat(BigRational::from(n)),
                    })
                }
            }
            RingDescriptor::IntegerModP(_) => {
                let n: BigInt = compact.parse().map_err(|_| bad())?;
                Ok(Self::from_bigint(desc, &n))
            }
            RingDescriptor::TruncatedPoly(p) => {
                let terms = parse_poly_terms(&compact, 'y', p as usize).ok_or_else(bad)?;
                let mut c = vec![0u64; p as usize];
                for (k, coeff) in terms {
                    let r = coeff.mod_floor_u64(p);
                    c[k] = (c[k] + r) % p;
                }
                Ok(RingElement {
                    desc,
                    val: Value::Poly(c),
                })
            }
            RingDescriptor::Cyclotomic16 => {
                let terms = parse_poly_terms(&compact, 'z', 8).ok_or_else(bad)?;
                let mut c = vec![BigInt::zero(); 8];
                for (k, coeff) in terms {
                    c[k] += coeff;
                }
                Ok(RingElement {
                    desc,
                    val: Value::Cyc(c),
                })
            }
        }
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        let m = self.mod_floor(&BigInt::from(p));
        let (_, digits) = m.to_u64_digits();
        if digits.is_empty() {
            0
        } else {
            digits[0]
        }
    }
}

fn modp_inverse(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    Some(s0.rem_euclid(p as i128) as u64)
}

/// Inverse in 𝔽_p[y]/(y^p): unit iff constant term nonzero; computed from
/// the finite geometric series for (c₀(1+n))⁻¹ with n nilpotent.
fn poly_inverse(c: &[u64], p: u64) -> Option<Vec<u64>> {
    let c0inv = modp_inverse(c[0], p)?;
    let n = c.len();
    // n_part = c0^{-1} * c - 1 (nilpotent)
    let mut nil = vec![0u64; n];
    for (i, &x) in c.iter().enumerate().skip(1) {
        nil[i] = (x as u128 * c0inv as u128 % p as u128) as u64;
    }
    // sum (-nil)^k for k < p
    let mut acc = vec![0u64; n];
    acc[0] = 1;
    let mut term = vec![0u64; n];
    term[0] = 1;
    for _ in 1..n {
        // term *= -nil
        let mut next = vec![0u64; n];
        for (i, &x) in term.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in nil.iter().enumerate() {
                if i + j >= n || y == 0 {
                    continue;
                }
                let add = (p as u128 - y as u128) % p as u128 * x as u128 % p as u128;
                next[i + j] = ((next[i + j] as u128 + add) % p as u128) as u64;
            }
        }
        term = next;
        for i in 0..n {
            acc[i] = ((acc[i] as u128 + term[i] as u128) % p as u128) as u64;
        }
    }
    for x in acc.iter_mut() {
        *x = (*x as u128 * c0inv as u128 % p as u128) as u64;
    }
    Some(acc)
}

/// Inverse of a nonzero element of ℚ[x]/(x⁸+1) by extended Euclid (x⁸+1 is
/// irreducible over ℚ, so every nonzero class is invertible in the field).
fn cyc_rational_inverse(c: &[BigInt]) -> Result<Vec<BigRational>> {
    type Poly = Vec<BigRational>;
    let deg = |p: &Poly| -> isize {
        for i in (0..p.len()).rev() {
            if !p[i].is_zero() {
                return i as isize;
            }
        }
        -1
    };
    let mut modulus: Poly = vec![BigRational::zero(); 9];
    modulus[0] = BigRational::one();
    modulus[8] = BigRational::one();
    let a: Poly = c.iter().map(|x| BigRational::from(x.clone())).collect();
    if deg(&a) < 0 {
        return Err(Error::ZeroDivision);
    }
    let pmul = |p: &Poly, q: &Poly| -> Poly {
        let mut out = vec![BigRational::zero(); p.len() + q.len()];
        for (i, x) in p.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in q.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let prod = x * y;
                out[i + j] += prod;
            }
        }
        out
    };
    let psub = |p: &Poly, q: &Poly| -> Poly {
        let n = p.len().max(q.len());
        (0..n)
            .map(|i| {
                let x = p.get(i).cloned().unwrap_or_else(BigRational::zero);
                let y = q.get(i).cloned().unwrap_or_else(BigRational::zero);
                x - y
            })
            .collect()
    };
    // divmod returning quotient
    let pdiv = |num: &Poly, den: &Poly| -> (Poly, Poly) {
        let mut rem = num.clone();
        let dd = deg(den);
        let mut quot = vec![BigRational::zero(); num.len()];
        while deg(&rem) >= dd && deg(&rem) >= 0 {
            let dn = deg(&rem) as usize;
            let coeff = &rem[dn] / &den[dd as usize];
            quot[dn - dd as usize] = coeff.clone();
            for i in 0..=dd as usize {
                let sub = &coeff * &den[i];
                rem[dn - dd as usize + i] -= sub;
            }
        }
        (quot, rem)
    };
    let (mut r0, mut r1) = (a, modulus);
    let (mut s0, mut s1): (Poly, Poly) = (vec![BigRational::one()], vec![BigRational::zero()]);
    while deg(&r1) >= 0 {
        let (q, r) = pdiv(&r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
        let s_next = psub(&s0, &pmul(&q, &s1));
        s0 = std::mem::replace(&mut s1, s_next);
    }
    debug_assert_eq!(deg(&r0), 0);
    let lead = r0[0].clone();
    let mut inv: Poly = s0.iter().map(|x| x / &lead).collect();
    // reduce mod x⁸+1
    inv.resize(inv.len().max(9), BigRational::zero());
    for i in (8..inv.len()).rev() {
        if !inv[i].is_zero() {
            let x = inv[i].clone();
            inv[i - 8] -= x;
            inv[i] = BigRational::zero();
        }
    }
    inv.truncate(8);
    inv.resize(8, BigRational::zero());
    Ok(inv)
}

/// Parse "c0+c1*v+c2*v^2" style polynomial strings (input pre-compacted).
fn parse_poly_terms(s: &str, var: char, max_deg: usize) -> Option<Vec<(usize, BigInt)>> {
    if s.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        // take sign
        let mut sign = BigInt::one();
        while let Some(stripped) = rest.strip_prefix(['+', '-']) {
            if rest.starts_with('-') {
                sign = -sign;
            }
            rest = stripped;
        }
        if rest.is_empty() {
            return None;
        }
        // split at next top-level + or -
        let end = rest
            .char_indices()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        // term is coeff, coeff*v^k, coeff*v, v^k, or v
        let (coeff_str, pow): (&str, usize) = if let Some(pos) = term.find(var) {
            let coeff_part = &term[..pos];
            let after = &term[pos + var.len_utf8()..];
            let k = if let Some(e) = after.strip_prefix('^') {
                e.parse().ok()?
            } else if after.is_empty() {
                1
            } else {
                return None;
            };
            (coeff_part.trim_end_matches('*'), k)
        } else {
            (term, 0)
        };
        let coeff: BigInt = if coeff_str.is_empty() {
            BigInt::one()
        } else {
            coeff_str.parse().ok()?
        };
        if pow >= max_deg {
            return None;
        }
        terms.push((pow, sign * coeff));
    }
    Some(terms)
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.val {
            Value::Int(n) => write!(f, "{n}"),
            Value::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Value::ModP(r) => write!(f, "{r}"),
            Value::Poly(c) => fmt_poly(f, c.iter().map(|&x| BigInt::from(x)), 'y'),
            Value::Cyc(c) => fmt_poly(f, c.iter().cloned(), 'z'),
        }
    }
}

fn fmt_poly(
    f: &mut fmt::Formatter<'_>,
    coeffs: impl Iterator<Item = BigInt>,
    var: char,
) -> fmt::Result {
    let mut wrote = false;
    for (k, c) in coeffs.enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if wrote {
            write!(f, "{}", if neg { "-" } else { "+" })?;
        } else if neg {
            write!(f, "-")?;
        }
        if k == 0 {
            write!(f, "{abs}")?;
        } else {
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            if k == 1 {
                write!(f, "{var}")?;
            } else {
                write!(f, "{var}^{k}")?;
            }
        }
        wrote = true;
    }
    if !wrote {
        write!(f, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> RingElement {
        RingElement::from_i64(RingDescriptor::Integer, n)
    }

    #[test]
    fn integer_arith() {
        assert_eq!(z(2).add(&z(3)).unwrap(), z(5));
        assert_eq!(z(2).mul(&z(3)).unwrap(), z(6));
        assert_eq!(z(2).sub(&z(3)).unwrap(), z(-1));
    }

    #[test]
    fn mixed_rings_rejected() {
        let q = RingElement::from_i64(RingDescriptor::Rational, 2);
        assert!(z(1).add(&q).is_err());
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let z4 = RingElement::zeta_pow(4);
        assert_eq!(z4.mul(&z4).unwrap(), RingElement::cyclotomic([-1, 0, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn f2y_one_plus_y_squares_to_one() {
        let p = RingElement::poly_coeffs(2, &[1, 1]);
        assert!(p.mul(&p).unwrap().is_one());
    }

    #[test]
    fn involution_on_integers_is_identity() {
        assert_eq!(z(7).involute(), z(7));
    }

    #[test]
    fn involute_zeta() {
        // ζ ↦ ζ⁻¹ = −ζ⁷
        let i = RingElement::zeta_pow(1).involute();
        assert_eq!(i, RingElement::cyclotomic([0, 0, 0, 0, 0, 0, 0, -1]));
    }

    #[test]
    fn invert_one_plus_y() {
        let p = RingElement::poly_coeffs(2, &[1, 1]);
        assert_eq!(p.invert().unwrap(), p);
    }

    #[test]
    fn geometric_sum_identity() {
        // (1−ζ⁷)·invert(1−ζ) = 1+ζ+...+ζ⁶
        let one = RingElement::one(RingDescriptor::Cyclotomic16);
        let num = one.sub(&RingElement::zeta_pow(7)).unwrap();
        let den = one.sub(&RingElement::zeta_pow(1)).unwrap();
        let q = num.div_exact(&den).unwrap();
        assert_eq!(q, RingElement::cyclotomic([1, 1, 1, 1, 1, 1, 1, 0]));
    }

    #[test]
    fn one_plus_zeta_is_not_a_unit() {
        // N(1+ζ) = 2; the extended-Euclid inverse has non-integer coordinates.
        let a = RingElement::cyclotomic([1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(a.invert().is_err());
        let b = RingElement::cyclotomic([1, -1, 0, 0, 0, 0, 0, 0]);
        assert!(b.invert().is_err());
    }

    #[test]
    fn cyclotomic_unit_inverse() {
        // 1+ζ+ζ² = (1−ζ³)/(1−ζ) is a unit with integral inverse.
        let u = RingElement::cyclotomic([1, 1, 1, 0, 0, 0, 0, 0]);
        let inv = u.invert().unwrap();
        assert_eq!(inv, RingElement::cyclotomic([0, -1, 1, 0, -1, 1, 0, -1]));
        assert!(u.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn base_change_values() {
        let one = RingElement::one(RingDescriptor::Cyclotomic16);
        assert_eq!(
            one.base_change_eq5(2).unwrap(),
            RingElement::from_i64(RingDescriptor::TruncatedPoly(2), 1)
        );
        let zeta = RingElement::zeta_pow(1);
        assert_eq!(
            zeta.base_change_eq5(2).unwrap(),
            RingElement::poly_coeffs(2, &[1, 1])
        );
        let zeta2 = RingElement::zeta_pow(2);
        assert!(zeta2.base_change_eq5(2).unwrap().is_one());
        assert!(zeta.base_change_eq5(3).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let desc = RingDescriptor::Cyclotomic16;
        let a = RingElement::cyclotomic([1, -2, 0, 0, 0, 5, 0, -1]);
        let s = a.to_string();
        assert_eq!(RingElement::parse(desc, &s).unwrap(), a);
        assert_eq!(
            RingElement::parse(desc, " 1 - 2*z + 5*z^5 - z^7 ").unwrap(),
            a
        );
        let r = RingElement::rational(-6, 4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(
            RingElement::parse(RingDescriptor::Rational, "-3/2").unwrap(),
            r
        );
        let p = RingElement::poly_coeffs(2, &[1, 1]);
        assert_eq!(p.to_string(), "1+y");
        assert_eq!(
            RingElement::parse(RingDescriptor::TruncatedPoly(2), "1+y").unwrap(),
            p
        );
    }

    #[test]
    fn prime_checks() {
        assert!(RingDescriptor::integer_mod_p(5).is_ok());
        assert!(RingDescriptor::integer_mod_p(6).is_err());
        assert!(RingDescriptor::truncated_poly(2).is_ok());
        assert!(RingDescriptor::truncated_poly(9).is_err());
        assert!(is_prime(4294967291));
        assert!(!is_prime(4294967295));
    }

    #[test]
    fn descriptor_parse() {
        assert_eq!(
            RingDescriptor::parse("Zmod:5").unwrap(),
            RingDescriptor::IntegerModP(5)
        );
        assert!(RingDescriptor::parse("Zmod:4").is_err());
        assert_eq!(
            RingDescriptor::parse("Zzeta16").unwrap(),
            RingDescriptor::Cyclotomic16
        );
    }
}
