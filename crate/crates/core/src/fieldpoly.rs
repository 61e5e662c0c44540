//! Polynomials over prime fields `F_p`, moduli, and the truncated
//! Laurent-digit map that places polynomial lattice points in `[0, 1)`.
//!
//! Coefficients are stored in ascending order of degree with no trailing
//! zeros, so the zero polynomial is the empty vector. A polynomial is
//! identified with the integer whose base-`p` digits are its coefficients;
//! that index fixes the total order used for all tie-breaking downstream.

use std::fmt;

use crate::error::{Error, Result};

/// Largest prime accepted for coefficient arithmetic (`p^2` must fit in `u64`).
pub const MAX_PRIME: u64 = 1 << 31;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Parameter(format!("{p} is not prime")));
    }
    if p > MAX_PRIME {
        return Err(Error::Parameter(format!("prime {p} exceeds {MAX_PRIME}")));
    }
    Ok(())
}

pub(crate) fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, p - 2, p)
}

/// `p^e`, or `None` on overflow.
pub fn checked_pow(p: u64, e: usize) -> Option<u64> {
    let e = u32::try_from(e).ok()?;
    p.checked_pow(e)
}

/// `p^e` for sizes already known to be addressable.
pub(crate) fn pow(p: u64, e: usize) -> u64 {
    checked_pow(p, e).expect("p^e overflows u64")
}

/// Polynomial over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, each already in `[0, p)`.
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::Parameter(format!("field size {p} < 2")));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= p) {
            return Err(Error::Parameter(format!(
                "coefficient {c} not below p = {p}"
            )));
        }
        Ok(Self::from_reduced(p, coeffs))
    }

    /// Builds a polynomial, reducing every coefficient modulo `p`.
    pub fn from_reduced(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut poly = Self { p, coeffs };
        poly.normalize();
        poly
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn zero(p: u64) -> Self {
        Self {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn one(p: u64) -> Self {
        Self { p, coeffs: vec![1] }
    }

    pub fn x(p: u64) -> Self {
        Self::monomial(p, 1, 1)
    }

    /// `c x^degree`.
    pub fn monomial(p: u64, degree: usize, c: u64) -> Self {
        let c = c % p;
        if c == 0 {
            return Self::zero(p);
        }
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self { p, coeffs }
    }

    /// The polynomial whose coefficients are the base-`p` digits of `k`.
    pub fn from_index(mut k: u64, p: u64) -> Self {
        let mut coeffs = Vec::new();
        while k > 0 {
            coeffs.push(k % p);
            k /= p;
        }
        Self { p, coeffs }
    }

    /// Inverse of [`Poly::from_index`], or `None` if the index overflows `u64`.
    pub fn try_index(&self) -> Option<u64> {
        let mut k = 0u64;
        for &c in self.coeffs.iter().rev() {
            k = k.checked_mul(self.p)?.checked_add(c)?;
        }
        Some(k)
    }

    /// Inverse of [`Poly::from_index`].
    ///
    /// Panics if the index does not fit in `u64`.
    pub fn index(&self) -> u64 {
        self.try_index().expect("polynomial index overflows u64")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn leading_coeff(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == 1
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(self.p, other.p, "polynomials over different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| (self.coeff(i) + other.coeff(i)) % self.p)
            .collect();
        Self::from_reduced(self.p, coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect();
        Self::from_reduced(self.p, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Self::from_reduced(p, out)
    }

    /// Multiplies every coefficient by the scalar `c`.
    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        let coeffs = self.coeffs.iter().map(|&a| a * c % self.p).collect();
        Self::from_reduced(self.p, coeffs)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { p: self.p, coeffs }
    }

    /// Reduction modulo `x^l`.
    pub fn truncate(&self, l: usize) -> Self {
        let coeffs = self.coeffs.iter().take(l).copied().collect();
        Self::from_reduced(self.p, coeffs)
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if self.p != d.p {
            return Err(Error::Parameter(format!(
                "mismatched fields: p = {} and p = {}",
                self.p, d.p
            )));
        }
        let dd = d
            .degree()
            .ok_or_else(|| Error::Parameter("division by the zero polynomial".into()))?;
        let p = self.p;
        let inv = mod_inv(d.leading_coeff(), p);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(p), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = rem[top] * inv % p;
            if c == 0 {
                continue;
            }
            let shift = top - dd;
            quot[shift] = c;
            for (i, &b) in d.coeffs.iter().enumerate() {
                let sub = c * b % p;
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        rem.truncate(dd);
        Ok((Self::from_reduced(p, quot), Self::from_reduced(p, rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Scales to leading coefficient one; the zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(mod_inv(self.leading_coeff(), self.p))
    }

    /// `true` if `self` divides `other` exactly.
    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[F_{}]({})", self.p, self)
    }
}

pub fn poly_from_index(k: u64, p: u64) -> Poly {
    Poly::from_index(k, p)
}

pub fn poly_index(a: &Poly) -> u64 {
    a.index()
}

/// `a * b mod f`.
pub fn poly_mul_mod(a: &Poly, b: &Poly, f: &Poly) -> Result<Poly> {
    if a.p != b.p || a.p != f.p {
        return Err(Error::Parameter(format!(
            "mismatched fields: {}, {}, {}",
            a.p, b.p, f.p
        )));
    }
    if f.is_zero() {
        return Err(Error::Parameter("modulus is the zero polynomial".into()));
    }
    a.mul(b).rem(f)
}

/// Monic greatest common divisor.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.p != b.p {
        return Err(Error::Parameter(format!(
            "mismatched fields: p = {} and p = {}",
            a.p, b.p
        )));
    }
    if a.is_zero() && b.is_zero() {
        return Err(Error::Undefined("gcd(0, 0)".into()));
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.monic())
}

/// Irreducibility by trial division with every monic polynomial of degree
/// at most `deg(f) / 2`.
pub fn is_irreducible(f: &Poly) -> Result<bool> {
    let m = match f.degree() {
        Some(m) if m >= 1 => m,
        _ => {
            return Err(Error::Parameter(
                "irreducibility is undefined for constants".into(),
            ))
        }
    };
    let p = f.p;
    for d in 1..=m / 2 {
        let lo = checked_pow(p, d)
            .ok_or_else(|| Error::Capacity(format!("trial division degree {d}")))?;
        // monic degree-d polynomials have indices in [p^d, 2 p^d)
        for k in lo..2 * lo {
            let q = Poly::from_index(k, p);
            if f.rem(&q)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The monic irreducible polynomial of degree `m` with the smallest index.
pub fn smallest_irreducible(p: u64, m: usize) -> Result<Poly> {
    check_prime(p)?;
    if m == 0 {
        return Err(Error::Parameter("degree must be at least 1".into()));
    }
    let lo = checked_pow(p, m).ok_or_else(|| Error::Capacity(format!("p^{m} overflows")))?;
    for k in lo..2 * lo {
        let f = Poly::from_index(k, p);
        if is_irreducible(&f)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// First `count` digits `t_1, ..., t_count` of the Laurent expansion
/// `g / f = (polynomial part) + sum_l t_l x^{-l}`.
pub fn laurent_digits(g: &Poly, f: &Poly, count: usize) -> Result<Vec<u64>> {
    if g.p != f.p {
        return Err(Error::Parameter("mismatched fields".into()));
    }
    let deg = f
        .degree()
        .ok_or_else(|| Error::Parameter("modulus is the zero polynomial".into()))?;
    let p = f.p;
    let inv = mod_inv(f.leading_coeff(), p);
    let mut r = g.rem(f)?;
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        r = r.shift(1);
        let t = r.coeff(deg) * inv % p;
        if t != 0 {
            r = r.sub(&f.scale(t));
        }
        digits.push(t);
    }
    Ok(digits)
}

/// Index of the image of every input index under an `F_p`-linear map.
///
/// `basis[k]` holds the ascending output digits of the image of `x^k`
/// (equivalently of input index `p^k`). Inputs are enumerated as an odometer,
/// so each step adds one basis vector per changed digit.
pub(crate) fn linear_index_table(p: u64, basis: &[Vec<u64>], out_len: usize) -> Vec<u64> {
    let in_len = basis.len();
    let total = pow(p, in_len) as usize;
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0u64; in_len];
    let mut acc = vec![0u64; out_len];
    let weights: Vec<u64> = (0..out_len).map(|i| pow(p, i)).collect();
    out.push(0);
    for _ in 1..total {
        let mut j = 0;
        loop {
            digits[j] += 1;
            for (a, &b) in acc.iter_mut().zip(&basis[j]) {
                *a = (*a + b) % p;
            }
            if digits[j] == p {
                digits[j] = 0;
                j += 1;
                continue;
            }
            break;
        }
        out.push(acc.iter().zip(&weights).map(|(&a, &w)| a * w).sum());
    }
    out
}

/// For every `n < p^m`, the integer `p^m * phi_m(n(x) u(x) / f(x))`.
pub fn phi_numerator_table(u: &Poly, f: &Poly, m: usize) -> Result<Vec<u64>> {
    let p = f.p;
    let mut basis = Vec::with_capacity(m);
    for k in 0..m {
        let t = laurent_digits(&u.shift(k), f, m)?;
        // numerator = sum_l t_l p^{m-l}: ascending position m-l holds t_l
        basis.push(t.into_iter().rev().collect());
    }
    Ok(linear_index_table(p, &basis, m))
}

/// For every `h` of degree `< deg(f)`, the index of `h * u mod f`.
pub(crate) fn residue_index_table(u: &Poly, f: &Poly) -> Result<Vec<u64>> {
    let m = f
        .degree()
        .ok_or_else(|| Error::Parameter("modulus is the zero polynomial".into()))?;
    let p = f.p;
    let mut basis = Vec::with_capacity(m);
    for k in 0..m {
        let r = u.shift(k).rem(f)?;
        basis.push((0..m).map(|i| r.coeff(i)).collect());
    }
    Ok(linear_index_table(p, &basis, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulusKind {
    MonomialXm,
    Irreducible,
}

/// Degree-`m` modulus `f` of a polynomial lattice point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    poly: Poly,
    kind: ModulusKind,
}

impl Modulus {
    /// `f = x^m`.
    pub fn monomial(p: u64, m: usize) -> Result<Self> {
        check_prime(p)?;
        if m == 0 {
            return Err(Error::Parameter("modulus degree must be at least 1".into()));
        }
        Ok(Self {
            poly: Poly::monomial(p, m, 1),
            kind: ModulusKind::MonomialXm,
        })
    }

    /// A monic irreducible modulus.
    pub fn irreducible(f: Poly) -> Result<Self> {
        check_prime(f.p)?;
        if !f.is_monic() {
            return Err(Error::Parameter(format!("modulus {f} is not monic")));
        }
        if !is_irreducible(&f)? {
            return Err(Error::Parameter(format!("modulus {f} is reducible")));
        }
        Ok(Self {
            poly: f,
            kind: ModulusKind::Irreducible,
        })
    }

    pub fn smallest_irreducible(p: u64, m: usize) -> Result<Self> {
        Self::irreducible(smallest_irreducible(p, m)?)
    }

    /// Reassembles a modulus from its stored parts, re-checking the kind.
    pub fn from_parts(kind: ModulusKind, f: Poly) -> Result<Self> {
        match kind {
            ModulusKind::MonomialXm => {
                let m = f.degree().unwrap_or(0);
                let expected = Poly::monomial(f.p, m, 1);
                if m == 0 || f != expected {
                    return Err(Error::Parameter(format!("{f} is not of the form x^m")));
                }
                Self::monomial(f.p, m)
            }
            ModulusKind::Irreducible => Self::irreducible(f),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn kind(&self) -> ModulusKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("modulus is nonzero")
    }

    pub fn p(&self) -> u64 {
        self.poly.p
    }
}
