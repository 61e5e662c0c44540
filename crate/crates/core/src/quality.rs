//! The figure of merit `R_gamma^d` for product weights, in three independent
//! forms, and the character-sum identities the forms are built from.
//!
//! * [`r_direct`] enumerates the dual lattice `{h : h . g = 0 mod f}`.
//! * [`r_character`] averages explicit additive characters over `v in G_{p,m}`.
//! * [`r_walsh`] evaluates the product of `1 + gamma + gamma psi` over the
//!   points of the lattice (monomial modulus only).
//!
//! The forms are used as oracles for one another.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::character::{residue_coefficient, roots_of_unity, CharacterValue};
use crate::error::{Error, Result};
use crate::fieldpoly::{
    checked_pow, phi_numerator_table, poly_gcd, pow, residue_index_table, Modulus, ModulusKind,
    Poly,
};

/// Default cap on the number of tuples a brute-force enumeration may visit.
pub const DEFAULT_MAX_ENUM: u64 = 1 << 24;

/// Product weights `gamma_j` and reduction indices `w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    gammas: Vec<f64>,
    ws: Vec<u32>,
}

impl WeightSystem {
    /// Requires `gammas` non-increasing in `(0, 1]` and `ws` non-decreasing.
    pub fn new(gammas: Vec<f64>, ws: Vec<u32>) -> Result<Self> {
        if gammas.len() != ws.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights but {} reduction indices",
                gammas.len(),
                ws.len()
            )));
        }
        if let Some(g) = gammas
            .iter()
            .find(|g| !(g.is_finite() && **g > 0.0 && **g <= 1.0))
        {
            return Err(Error::InvalidWeights(format!("weight {g} outside (0, 1]")));
        }
        if gammas.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidWeights(
                "weights must be non-increasing".into(),
            ));
        }
        if ws.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidWeights(
                "reduction indices must be non-decreasing".into(),
            ));
        }
        Ok(Self { gammas, ws })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn ws(&self) -> &[u32] {
        &self.ws
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// `max{j : w_j < m}`, 0 if there is none.
    pub fn t(&self, m: usize) -> usize {
        self.ws.iter().filter(|&&w| (w as usize) < m).count()
    }

    /// `sum_j gamma_j / (1 + gamma_j)`.
    pub fn big_gamma(&self) -> f64 {
        self.gammas.iter().map(|g| g / (1.0 + g)).sum()
    }

    /// `w_1 > 0` lies outside the hypothesis of the published error bounds.
    pub fn w1_nonzero(&self) -> bool {
        self.ws.first().is_some_and(|&w| w > 0)
    }

    pub fn prefix(&self, d: usize) -> Self {
        Self {
            gammas: self.gammas[..d].to_vec(),
            ws: self.ws[..d].to_vec(),
        }
    }

    /// Weights of the listed coordinates (ascending indices keep the ordering invariants).
    pub fn select(&self, coords: &[usize]) -> Self {
        Self {
            gammas: coords.iter().map(|&j| self.gammas[j]).collect(),
            ws: coords.iter().map(|&j| self.ws[j]).collect(),
        }
    }
}

/// `true` iff `g` belongs to the reduced search set for reduction index `w`.
pub fn in_reduced_search_set(g: &Poly, w: u32, modulus: &Modulus) -> bool {
    let m = modulus.degree();
    if g.p() != modulus.p() {
        return false;
    }
    if w as usize >= m {
        return g.is_one();
    }
    match g.degree() {
        None => false,
        Some(deg) if deg >= m - w as usize => false,
        Some(_) => poly_gcd(g, modulus.poly())
            .map(|d| d.is_one())
            .unwrap_or(false),
    }
}

/// Reduced components `g_j` together with the shifted components `x^{w_j} g_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingVector {
    modulus: Modulus,
    weights: WeightSystem,
    reduced: Vec<Poly>,
    shifted: Vec<Poly>,
}

impl GeneratingVector {
    /// Checks `g_j` against its reduced search set; `weights` may be longer
    /// than the vector and is truncated to its dimension.
    pub fn new(modulus: Modulus, weights: WeightSystem, reduced: Vec<Poly>) -> Result<Self> {
        let s = reduced.len();
        if s == 0 {
            return Err(Error::Parameter("generating vector is empty".into()));
        }
        if weights.len() < s {
            return Err(Error::InvalidWeights(format!(
                "{} weights for dimension {s}",
                weights.len()
            )));
        }
        let weights = weights.prefix(s);
        for (j, (g, &w)) in reduced.iter().zip(weights.ws()).enumerate() {
            if !in_reduced_search_set(g, w, &modulus) {
                return Err(Error::Parameter(format!(
                    "component {} = {g} is not in the reduced search set for w = {w}",
                    j + 1
                )));
            }
        }
        let shifted = reduced
            .iter()
            .zip(weights.ws())
            .map(|(g, &w)| g.shift(w as usize))
            .collect();
        Ok(Self {
            modulus,
            weights,
            reduced,
            shifted,
        })
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn m(&self) -> usize {
        self.modulus.degree()
    }

    pub fn dim(&self) -> usize {
        self.reduced.len()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn reduced(&self) -> &[Poly] {
        &self.reduced
    }

    pub fn shifted(&self) -> &[Poly] {
        &self.shifted
    }

    /// The first `d` components.
    pub fn prefix(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.dim() {
            return Err(Error::Parameter(format!(
                "prefix length {d} outside 1..={}",
                self.dim()
            )));
        }
        Self::new(
            self.modulus.clone(),
            self.weights.prefix(d),
            self.reduced[..d].to_vec(),
        )
    }

    /// The components at the listed (ascending) coordinates.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        Self::new(
            self.modulus.clone(),
            self.weights.select(coords),
            coords.iter().map(|&j| self.reduced[j].clone()).collect(),
        )
    }
}

fn check_prefix(gvec: &GeneratingVector, d: usize) -> Result<()> {
    if d == 0 || d > gvec.dim() {
        return Err(Error::Parameter(format!(
            "dimension {d} outside 1..={}",
            gvec.dim()
        )));
    }
    Ok(())
}

/// `1 / (p^{a+1} sin^2(pi h_a / p))` for every index `0 < h < p^m`; entry 0 is unused.
pub(crate) fn r_plain_table(p: u64, m: usize) -> Vec<f64> {
    let n = pow(p, m) as usize;
    let mut table = vec![0.0; n];
    let mut scale = p as f64;
    let mut lo = 1usize;
    for _a in 0..m {
        let hi = lo * p as usize;
        for (h, r) in table.iter_mut().enumerate().take(hi).skip(lo) {
            let lead = (h / lo) as f64;
            let s = (PI * lead / p as f64).sin();
            *r = 1.0 / (scale * s * s);
        }
        scale *= p as f64;
        lo = hi;
    }
    table
}

/// `r_p(h)` for nonzero `h`.
pub fn r_plain(h: &Poly) -> Result<f64> {
    let a = h
        .degree()
        .ok_or_else(|| Error::Parameter("r_p(h) is defined for h != 0".into()))?;
    let p = h.p() as f64;
    let s = (PI * h.leading_coeff() as f64 / p).sin();
    Ok(1.0 / (p.powi(a as i32 + 1) * s * s))
}

/// `r_p(h, gamma)`: `1 + gamma` for `h = 0`, `gamma r_p(h)` otherwise.
pub fn r_weight(h: &Poly, gamma: f64) -> f64 {
    match r_plain(h) {
        Ok(r) => gamma * r,
        Err(_) => 1.0 + gamma,
    }
}

/// `m (p^2 - 1) / (3p)`, the sum of `r_p(h)` over all nonzero `h` of degree `< m`.
pub fn r_total(p: u64, m: usize) -> f64 {
    let p = p as f64;
    m as f64 * (p * p - 1.0) / (3.0 * p)
}

/// Sum of `r_p(h)` over nonzero multiples of `a` of degree `< m`, by two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipleSum {
    pub enumerated: f64,
    pub closed_form: f64,
}

pub fn r_sum_multiples(a: &Poly, m: usize) -> Result<MultipleSum> {
    if !a.is_monic() {
        return Err(Error::Parameter(format!("{a} is not monic")));
    }
    let p = a.p();
    let deg_a = a.degree().expect("monic polynomials are nonzero");
    let n = checked_pow(p, m).ok_or_else(|| Error::Capacity(format!("p^{m} overflows")))?;
    if n > DEFAULT_MAX_ENUM {
        return Err(Error::Capacity(format!("{n} polynomials to enumerate")));
    }
    let table = r_plain_table(p, m);
    let mut enumerated = 0.0;
    for k in 1..n {
        let h = Poly::from_index(k, p);
        if h.rem(a)?.is_zero() {
            enumerated += table[k as usize];
        }
    }
    let closed_form = if deg_a >= m {
        0.0
    } else {
        r_total(p, m - deg_a) * (p as f64).powi(-(deg_a as i32))
    };
    Ok(MultipleSum {
        enumerated,
        closed_form,
    })
}

/// Sum over the dual lattice of `prod_i r_p(h_i, gamma_i)`, enumerating
/// every `h in G_{p,m}^d \ {0}`.
pub fn r_direct(gvec: &GeneratingVector, d: usize, max_enum: u64) -> Result<f64> {
    check_prefix(gvec, d)?;
    let p = gvec.p();
    let m = gvec.m();
    let f = gvec.modulus().poly();
    let size = checked_pow(p, m * d).unwrap_or(u64::MAX);
    if size > max_enum {
        return Err(Error::Capacity(format!(
            "dual enumeration of {p}^{} tuples exceeds {max_enum}",
            m * d
        )));
    }
    let n = pow(p, m) as usize;
    let gammas = &gvec.weights().gammas()[..d];
    let r = r_plain_table(p, m);
    let weighted: Vec<Vec<f64>> = gammas
        .iter()
        .map(|&g| {
            let mut row: Vec<f64> = r.iter().map(|x| g * x).collect();
            row[0] = 1.0 + g;
            row
        })
        .collect();
    let residues = gvec.shifted()[..d]
        .iter()
        .map(|u| residue_index_table(u, f))
        .collect::<Result<Vec<_>>>()?;

    // coordinates 1..d-1 are enumerated; the last one is matched by residue
    let last = d - 1;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for h in 0..n {
        buckets[residues[last][h] as usize].push(h);
    }
    let digits = |mut k: u64| -> Vec<u64> {
        (0..m)
            .map(|_| {
                let d = k % p;
                k /= p;
                d
            })
            .collect()
    };
    let residue_digits: Vec<Vec<Vec<u64>>> = residues[..last]
        .iter()
        .map(|t| t.iter().map(|&k| digits(k)).collect())
        .collect();

    let mut total = 0.0;
    let mut h = vec![0usize; last];
    let outer = pow(p, m * last);
    let mut sum = vec![0u64; m];
    for _ in 0..outer {
        sum.iter_mut().for_each(|x| *x = 0);
        let mut prod = 1.0;
        for i in 0..last {
            for (s, &c) in sum.iter_mut().zip(&residue_digits[i][h[i]]) {
                *s = (*s + c) % p;
            }
            prod *= weighted[i][h[i]];
        }
        let target = sum.iter().rev().fold(0u64, |acc, &c| acc * p + (p - c) % p) as usize;
        let prefix_zero = h.iter().all(|&x| x == 0);
        for &hl in &buckets[target] {
            if prefix_zero && hl == 0 {
                continue;
            }
            total += prod * weighted[last][hl];
        }
        // odometer over the enumerated coordinates
        for x in h.iter_mut() {
            *x += 1;
            if *x < n {
                break;
            }
            *x = 0;
        }
    }
    Ok(total)
}

/// The character-sum form
/// `-prod(1+gamma_i) + p^{-m} sum_v prod_i (1 + gamma_i + gamma_i sum_{h != 0} r_p(h) X_p(v h u_i / f))`,
/// with every character evaluated on an explicit Laurent residue.
pub fn r_character(gvec: &GeneratingVector, d: usize, max_enum: u64) -> Result<CharacterValue> {
    check_prefix(gvec, d)?;
    let p = gvec.p();
    let m = gvec.m();
    let f = gvec.modulus().poly();
    let n = pow(p, m);
    if (n as u128) * (n as u128) * d as u128 > max_enum as u128 {
        return Err(Error::Capacity(format!(
            "character sums over {n}^2 x {d} terms exceed {max_enum}"
        )));
    }
    let roots = roots_of_unity(p);
    let r = r_plain_table(p, m);
    let gammas = &gvec.weights().gammas()[..d];
    let hs: Vec<Poly> = (0..n).map(|k| Poly::from_index(k, p)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for v in &hs {
        let mut prod = Complex64::new(1.0, 0.0);
        for (u, &gamma) in gvec.shifted()[..d].iter().zip(gammas) {
            let y = v.mul(u).rem(f)?;
            let mut inner = Complex64::new(0.0, 0.0);
            for (k, h) in hs.iter().enumerate().skip(1) {
                let c = residue_coefficient(&y.mul(h), f)?;
                inner += roots[c as usize] * r[k];
            }
            prod *= Complex64::new(1.0 + gamma, 0.0) + inner * gamma;
        }
        acc += prod;
    }
    let base: f64 = gammas.iter().map(|g| 1.0 + g).product();
    Ok(CharacterValue::from_complex(
        acc / n as f64 - Complex64::new(base, 0.0),
    ))
}

/// `sum_{c=1}^{p-1} omega^{c y} / sin^2(pi c / p)` for `y = 0, ..., p-1`.
fn psi_digit_kernel(p: u64) -> Vec<f64> {
    (0..p)
        .map(|y| {
            (1..p)
                .map(|c| {
                    let s = (PI * c as f64 / p as f64).sin();
                    let theta = 2.0 * PI * (c * y % p) as f64 / p as f64;
                    theta.cos() / (s * s)
                })
                .sum()
        })
        .collect()
}

fn psi_from_kernel(kernel: &[f64], numerator: u64, p: u64, m: usize) -> f64 {
    // leading zero digits of numerator / p^m, most significant first
    let mut zeros = 0;
    let mut next_digit = 0;
    for i in 0..m {
        let digit = numerator / pow(p, m - 1 - i) % p;
        if digit != 0 {
            next_digit = digit;
            break;
        }
        zeros += 1;
    }
    let mut value = zeros as f64 * kernel[0];
    if zeros < m {
        value += kernel[next_digit as usize];
    }
    value / p as f64
}

/// `psi(y) = sum_{h=1}^{p^m-1} r_p(h) wal_h(y)` at `y = numerator / p^m`.
///
/// Summing the series over each class of leading digit position `a` leaves
/// `sum_a [y_1 = ... = y_a = 0] p^{-1} sum_c omega^{c y_{a+1}} / sin^2(pi c / p)`,
/// which costs `O(m)` per value.
pub fn psi_value(numerator: u64, p: u64, m: usize) -> f64 {
    psi_from_kernel(&psi_digit_kernel(p), numerator, p, m)
}

/// `psi` at every grid point `k / p^m`.
pub fn psi_table(p: u64, m: usize) -> Vec<f64> {
    let kernel = psi_digit_kernel(p);
    (0..pow(p, m))
        .map(|k| psi_from_kernel(&kernel, k, p, m))
        .collect()
}

fn eta_form(gvec: &GeneratingVector, d: usize) -> Result<f64> {
    let p = gvec.p();
    let m = gvec.m();
    let n = pow(p, m) as usize;
    let psi = psi_table(p, m);
    let gammas = &gvec.weights().gammas()[..d];
    let columns = gvec.shifted()[..d]
        .iter()
        .map(|u| phi_numerator_table(u, gvec.modulus().poly(), m))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = 0.0;
    for k in 0..n {
        let mut eta = 1.0;
        for (col, &g) in columns.iter().zip(gammas) {
            eta *= 1.0 + g + g * psi[col[k] as usize];
        }
        sum += eta;
    }
    let base: f64 = gammas.iter().map(|g| 1.0 + g).product();
    Ok(-base + sum / n as f64)
}

/// `-prod(1+gamma_i) + p^{-m} sum_n prod_i (1 + gamma_i + gamma_i psi(x_n^{(i)}))`
/// over the points of the lattice. Derived for `f = x^m` only.
pub fn r_walsh(gvec: &GeneratingVector, d: usize) -> Result<f64> {
    check_prefix(gvec, d)?;
    if gvec.modulus().kind() != ModulusKind::MonomialXm {
        return Err(Error::Unsupported(
            "the Walsh form is derived for f = x^m only".into(),
        ));
    }
    eta_form(gvec, d)
}

/// The character form of [`r_character`] with each inner sum tabulated:
/// `sum_{h != 0} r_p(h) X_p(y h / f) = psi(phi_m(y / f))`, since the residue
/// of `y h / f` is `sum_k h_k t_{k+1}` for the Laurent digits `t_l` of `y / f`.
/// Valid for every modulus; costs `O(d p^m)` after `O(m p^m)` tables.
pub fn r_kernel(gvec: &GeneratingVector, d: usize) -> Result<f64> {
    check_prefix(gvec, d)?;
    eta_form(gvec, d)
}

/// `sum_{v in G_{p,m}} X_p(v g / f)`, which is `p^m` if `f | g` and 0 otherwise.
pub fn char_orthogonality(g: &Poly, f: &Poly) -> Result<CharacterValue> {
    let m = f
        .degree()
        .ok_or_else(|| Error::Parameter("modulus is the zero polynomial".into()))?;
    if g.p() != f.p() {
        return Err(Error::Parameter("mismatched fields".into()));
    }
    let p = f.p();
    let roots = roots_of_unity(p);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..pow(p, m) {
        let c = residue_coefficient(&Poly::from_index(k, p).mul(g), f)?;
        acc += roots[c as usize];
    }
    Ok(CharacterValue::from_complex(acc))
}

/// `Y_{p^m,w}(v, x^m) = sum_{g} sum_{h != 0} r_p(h) X_p(v h x^w g / x^m)`,
/// with `g` over the reduced search set of `x^m` for index `w`.
pub fn y_sum(v: &Poly, w: u32, p: u64, m: usize) -> Result<CharacterValue> {
    let f = Modulus::monomial(p, m)?;
    if v.p() != p || v.degree().is_some_and(|d| d >= m) {
        return Err(Error::Parameter(format!("{v} is not in G_{{p,m}}")));
    }
    let roots = roots_of_unity(p);
    let r = r_plain_table(p, m);
    let mut acc = Complex64::new(0.0, 0.0);
    for g in crate::cbc::search_set(&f, w) {
        let vg = v.mul(&g.shift(w as usize));
        for (k, &rk) in r.iter().enumerate().skip(1) {
            let c = residue_coefficient(&vg.mul(&Poly::from_index(k as u64, p)), f.poly())?;
            acc += roots[c as usize] * rk;
        }
    }
    Ok(CharacterValue::from_complex(acc))
}

/// `(1 / #search set) sum_v |Y_{p^m,w}(v, x^m)|`.
pub fn y_average(w: u32, p: u64, m: usize) -> Result<f64> {
    let f = Modulus::monomial(p, m)?;
    let size = crate::cbc::search_set(&f, w).len() as f64;
    let mut total = 0.0;
    for k in 0..pow(p, m) {
        total += y_sum(&Poly::from_index(k, p), w, p, m)?.value.abs();
    }
    Ok(total / size)
}

/// `2 p^{min(w, m)} m (p^2 - 1) / (3p)`.
pub fn y_average_bound(w: u32, p: u64, m: usize) -> f64 {
    2.0 * (p as f64).powi((w as usize).min(m) as i32) * r_total(p, m)
}
