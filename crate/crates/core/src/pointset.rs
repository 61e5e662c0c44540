//! Polynomial lattice point sets `P(g, f)` and Walsh functions on them.
//!
//! Coordinates are stored as exact integer numerators over `p^m`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::character::{roots_of_unity, CharacterValue};
use crate::error::{Error, Result};
use crate::fieldpoly::{laurent_digits, phi_numerator_table, pow, Modulus, Poly};
use crate::quality::GeneratingVector;

/// `N = p^m` points in `[0, 1)^s`; coordinate `(i, j)` is `numerators[i * s + j] / p^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    p: u64,
    m: usize,
    s: usize,
    numerators: Vec<u64>,
}

impl PointSet {
    pub fn from_numerators(p: u64, m: usize, s: usize, numerators: Vec<u64>) -> Result<Self> {
        let n = crate::fieldpoly::checked_pow(p, m)
            .ok_or_else(|| Error::Capacity(format!("p^m = {p}^{m} overflows")))?;
        if numerators.len() as u64 != n * s as u64 {
            return Err(Error::Parameter(format!(
                "expected {} numerators for {n} points in dimension {s}, got {}",
                n * s as u64,
                numerators.len()
            )));
        }
        if numerators.iter().any(|&x| x >= n) {
            return Err(Error::Parameter(format!("numerator not below {n}")));
        }
        Ok(Self {
            p,
            m,
            s,
            numerators,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn n_points(&self) -> usize {
        if self.s == 0 {
            pow(self.p, self.m) as usize
        } else {
            self.numerators.len() / self.s
        }
    }

    /// Common denominator `p^m`.
    pub fn denominator(&self) -> u64 {
        pow(self.p, self.m)
    }

    pub fn point(&self, i: usize) -> &[u64] {
        &self.numerators[i * self.s..(i + 1) * self.s]
    }

    pub fn coordinate(&self, i: usize, j: usize) -> f64 {
        self.numerators[i * self.s + j] as f64 / self.denominator() as f64
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    /// Projection onto the listed coordinates; points keep their multiplicity.
    pub fn project(&self, coords: &[usize]) -> PointSet {
        let mut numerators = Vec::with_capacity(self.n_points() * coords.len());
        for i in 0..self.n_points() {
            let row = self.point(i);
            numerators.extend(coords.iter().map(|&j| row[j]));
        }
        PointSet {
            p: self.p,
            m: self.m,
            s: coords.len(),
            numerators,
        }
    }
}

/// `p^m * phi_m(n(x) g(x) / f(x))` for `0 <= n < p^m`.
pub fn phi_m_numerator(n: u64, g: &Poly, f: &Modulus) -> Result<u64> {
    let p = f.p();
    let m = f.degree();
    if n >= pow(p, m) {
        return Err(Error::Parameter(format!("index {n} not below p^m")));
    }
    let digits = laurent_digits(&Poly::from_index(n, p).mul(g), f.poly(), m)?;
    Ok(digits.iter().fold(0, |acc, &t| acc * p + t))
}

/// The point set of the shifted generating vector `(x^{w_j} g_j)_j`.
pub fn generate_point_set(gvec: &GeneratingVector) -> Result<PointSet> {
    let p = gvec.p();
    let m = gvec.m();
    let s = gvec.dim();
    let n = pow(p, m) as usize;
    let columns = gvec
        .shifted()
        .iter()
        .map(|u| phi_numerator_table(u, gvec.modulus().poly(), m))
        .collect::<Result<Vec<_>>>()?;
    let mut numerators = Vec::with_capacity(n * s);
    for i in 0..n {
        numerators.extend(columns.iter().map(|c| c[i]));
    }
    PointSet::from_numerators(p, m, s, numerators)
}

/// `sum_i h_i x_{i+1} mod p`, where `h_i` are the digits of `h` and `x_i`
/// the base-`p` digits of `numerator / p^m` (most significant first).
pub(crate) fn walsh_exponent(h: u64, numerator: u64, p: u64, m: usize) -> u64 {
    let mut h = h;
    let mut e = 0;
    let mut i = 0;
    while h > 0 && i < m {
        let hd = h % p;
        if hd != 0 {
            let xd = numerator / pow(p, m - 1 - i) % p;
            e = (e + hd * xd) % p;
        }
        h /= p;
        i += 1;
    }
    e
}

/// `wal_h(numerator / p^m)`.
pub fn walsh_value(h: u64, numerator: u64, p: u64, m: usize) -> Complex64 {
    let e = walsh_exponent(h, numerator, p, m);
    roots_of_unity(p)[e as usize]
}

/// `(1/N) sum_n prod_j wal_{h_j}(x_n^{(j)})` over the point set of `gvec`.
///
/// The exact value is 1 if `h` is in the dual lattice and 0 otherwise.
pub fn walsh_dual_average(gvec: &GeneratingVector, h: &[u64]) -> Result<CharacterValue> {
    if h.len() != gvec.dim() {
        return Err(Error::Parameter(format!(
            "frequency vector has {} entries, dimension is {}",
            h.len(),
            gvec.dim()
        )));
    }
    let p = gvec.p();
    let m = gvec.m();
    let n = pow(p, m);
    if h.iter().any(|&x| x >= n) {
        return Err(Error::Parameter("frequency not below p^m".into()));
    }
    let ps = generate_point_set(gvec)?;
    let roots = roots_of_unity(p);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..ps.n_points() {
        let e = ps
            .point(i)
            .iter()
            .zip(h)
            .fold(0, |e, (&x, &hj)| (e + walsh_exponent(hj, x, p, m)) % p);
        acc += roots[e as usize];
    }
    Ok(CharacterValue::from_complex(acc / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    /// `k/p^m` with the unreduced denominator.
    Fraction,
    /// Fixed-point decimals with `floor(m log10 p) + 2` digits.
    Decimal,
}

pub fn decimal_digits(p: u64, m: usize) -> usize {
    (m as f64 * (p as f64).log10() + 2.0).floor() as usize
}

/// One point per line, coordinates separated by a single space.
pub fn format_points(ps: &PointSet, format: PointFormat) -> String {
    let denom = ps.denominator();
    let digits = decimal_digits(ps.p(), ps.m());
    let mut out = String::new();
    for i in 0..ps.n_points() {
        for (j, &x) in ps.point(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            match format {
                PointFormat::Fraction => write!(out, "{x}/{denom}").unwrap(),
                PointFormat::Decimal => {
                    write!(out, "{:.*}", digits, x as f64 / denom as f64).unwrap()
                }
            }
        }
        out.push('\n');
    }
    out
}
