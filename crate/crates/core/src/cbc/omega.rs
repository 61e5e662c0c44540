//! Application of the block matrix `Omega^{(l)}` to a folded `eta` vector.
//!
//! Row `g` of `Omega^{(l)}` holds `psi(n' x^w g / x^m)` for `n' < p^l`, where
//! `l = m - w`, and the argument reduces to `p^w * index(n' g mod x^l)`.

use std::collections::HashMap;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::unit_group::UnitGroup;
use crate::error::{Error, Result};
use crate::fieldpoly::{pow, residue_index_table, Poly};
use crate::quality::psi_table;

/// How `Omega^{(l)}` is applied inside the fast construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaStrategy {
    /// Row by row through the tabulated `psi`.
    #[default]
    Direct,
    /// Split `n'` by its power of `x` and evaluate each part as a
    /// correlation over the unit group of `F_p[x] / x^L` with FFTs.
    Structured,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct OmegaCost {
    pub psi_applications: u64,
    pub work: u64,
}

/// `folded[n'] = sum of eta[n]` over `n` whose low `l` digits equal `n'`.
pub fn fold_eta(eta: &[f64], p: u64, l: usize) -> Vec<f64> {
    let len = pow(p, l) as usize;
    let mut folded = vec![0.0; len];
    for (n, &e) in eta.iter().enumerate() {
        folded[n % len] += e;
    }
    folded
}

/// Units mod `x^l` of degree `< l`, in ascending index order.
pub(crate) fn unit_candidates(p: u64, l: usize) -> Vec<u64> {
    (0..pow(p, l)).filter(|k| k % p != 0).collect()
}

pub(crate) fn omega_direct(
    l: usize,
    w: usize,
    folded: &[f64],
    psi: &[f64],
    p: u64,
) -> (Vec<f64>, OmegaCost) {
    let len = pow(p, l);
    let stride = pow(p, w) as usize;
    let xl = Poly::monomial(p, l, 1);
    let candidates = unit_candidates(p, l);
    let mut cost = OmegaCost::default();
    let scores = candidates
        .iter()
        .map(|&g| {
            let table = residue_index_table(&Poly::from_index(g, p), &xl)
                .expect("x^l is a nonzero modulus");
            cost.psi_applications += len;
            cost.work += 2 * len;
            table
                .iter()
                .zip(folded)
                .map(|(&k, &e)| psi[stride * k as usize] * e)
                .sum()
        })
        .collect();
    (scores, cost)
}

fn transform_len(n: usize) -> u64 {
    let n = n as u64;
    n * (64 - (n.max(2) - 1).leading_zeros()) as u64
}

fn fft_nd(data: &mut [Complex64], dims: &[usize], planner: &mut FftPlanner<f64>, inverse: bool) {
    let total = data.len();
    let mut stride = 1;
    let mut line = Vec::new();
    for &n in dims {
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        line.resize(n, Complex64::new(0.0, 0.0));
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (t, z) in line.iter_mut().enumerate() {
                    *z = data[base + t * stride];
                }
                fft.process(&mut line);
                for (t, z) in line.iter().enumerate() {
                    data[base + t * stride] = *z;
                }
            }
        }
        stride = block;
    }
}

/// `c(alpha) = sum_beta a(alpha + beta) b(beta)` over a product of cyclic groups.
fn correlate(a: &[f64], b: &[f64], dims: &[usize], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = a.len();
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_nd(&mut fa, dims, planner, false);
    fft_nd(&mut fb, dims, planner, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y.conj();
    }
    fft_nd(&mut fa, dims, planner, true);
    fa.iter().map(|z| z.re / n as f64).collect()
}

/// Unit group tables keyed by `L`, built on first use.
#[derive(Default)]
pub(crate) struct GroupCache {
    groups: HashMap<usize, UnitGroup>,
    planner: Option<FftPlanner<f64>>,
}

impl GroupCache {
    /// The group mod `x^L` and the work spent building it (0 when cached).
    fn get(&mut self, p: u64, l: usize) -> Result<(&UnitGroup, u64)> {
        let mut built = 0;
        if let std::collections::hash_map::Entry::Vacant(e) = self.groups.entry(l) {
            let g = UnitGroup::new(p, l)?;
            built = g.len() as u64;
            e.insert(g);
        }
        Ok((&self.groups[&l], built))
    }
}

pub(crate) fn omega_structured(
    l: usize,
    w: usize,
    folded: &[f64],
    psi: &[f64],
    p: u64,
    cache: &mut GroupCache,
) -> Result<(Vec<f64>, OmegaCost, u64)> {
    let candidates = unit_candidates(p, l);
    let mut scores = vec![psi[0] * folded[0]; candidates.len()];
    let mut cost = OmegaCost {
        psi_applications: 1,
        work: candidates.len() as u64,
    };
    let mut setup = 0;
    let mut planner = cache.planner.take().unwrap_or_else(FftPlanner::new);
    for k in 0..l {
        let big_l = l - k;
        let (group, built) = cache.get(p, big_l)?;
        setup += built;
        let a_stride = pow(p, w + k) as usize;
        let b_stride = pow(p, k) as usize;
        let a: Vec<f64> = group
            .elements
            .iter()
            .map(|&z| psi[a_stride * z as usize])
            .collect();
        let b: Vec<f64> = group
            .elements
            .iter()
            .map(|&u| folded[b_stride * u as usize])
            .collect();
        let c = correlate(&a, &b, &group.dims, &mut planner);
        let n = group.len();
        let modulus = pow(p, big_l);
        for (score, &g) in scores.iter_mut().zip(&candidates) {
            *score += c[group.position[(g % modulus) as usize]];
        }
        cost.psi_applications += n as u64;
        cost.work += 3 * n as u64 + 3 * transform_len(n) + candidates.len() as u64;
    }
    cache.planner = Some(planner);
    Ok((scores, cost, setup))
}

/// `Omega^{(l)}` applied to `folded`, one entry per unit `g` mod `x^l` in
/// ascending index order, with `psi` taken at `m = l + w` digits.
pub fn omega_multiply(
    l: usize,
    w: usize,
    folded: &[f64],
    p: u64,
    strategy: OmegaStrategy,
) -> Result<Vec<f64>> {
    if l == 0 {
        return Err(Error::Parameter("block size l must be at least 1".into()));
    }
    if folded.len() as u64 != pow(p, l) {
        return Err(Error::Parameter(format!(
            "folded vector has length {}, expected {p}^{l}",
            folded.len()
        )));
    }
    let psi = psi_table(p, l + w);
    Ok(match strategy {
        OmegaStrategy::Direct => omega_direct(l, w, folded, &psi, p).0,
        OmegaStrategy::Structured => {
            omega_structured(l, w, folded, &psi, p, &mut GroupCache::default())?.0
        }
    })
}
