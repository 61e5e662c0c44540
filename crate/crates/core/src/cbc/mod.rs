//! Reduced component-by-component construction.
//!
//! Both constructions keep `eta_d(n) = prod_{i <= d} (1 + gamma_i + gamma_i psi_i(n))`
//! for every point index `n`, where `psi_i(n)` is `psi` at the `i`-th
//! coordinate of point `n`. A candidate `g` for the next component is scored
//! by `T(g) = sum_n eta_d(n) psi(phi_m(n x^w g / f))`, since
//! `R^{d+1}(g) = (1 + gamma) R^d + gamma T(g) / N` up to terms independent of `g`.
//!
//! For an irreducible `f` the character sum `sum_{h != 0} r_p(h) X_p(y h / f)`
//! equals `psi(phi_m(y / f))`, because the residue of `y h / f` is
//! `sum_k h_k t_{k+1}` with `t_l` the Laurent digits of `y / f`. Both moduli
//! therefore share the same scoring; only the monomial modulus admits the
//! folded `Omega` evaluation of [`cbc_reduced_fast`].

mod omega;
mod unit_group;

pub use omega::{fold_eta, omega_multiply, OmegaStrategy};

use omega::{omega_direct, omega_structured, unit_candidates, GroupCache, OmegaCost};

use crate::error::{Error, Result};
use crate::fieldpoly::{checked_pow, phi_numerator_table, pow, Modulus, ModulusKind, Poly};
use crate::quality::{psi_table, GeneratingVector, WeightSystem};

/// Scores within this fraction of `psi(0) sum |eta|` of the minimum count as ties.
const TIE_WINDOW: f64 = 1e-14;

/// The reduced search set for reduction index `w`, in ascending index order.
pub fn search_set(modulus: &Modulus, w: u32) -> Vec<Poly> {
    let p = modulus.p();
    let m = modulus.degree();
    if w as usize >= m {
        return vec![Poly::one(p)];
    }
    let l = m - w as usize;
    match modulus.kind() {
        ModulusKind::MonomialXm => unit_candidates(p, l)
            .into_iter()
            .map(|k| Poly::from_index(k, p))
            .collect(),
        // nonzero polynomials of degree < m are coprime to an irreducible f of degree m
        ModulusKind::Irreducible => (1..pow(p, l)).map(|k| Poly::from_index(k, p)).collect(),
    }
}

/// Cardinality of [`search_set`] without enumerating it.
pub fn search_set_size(modulus: &Modulus, w: u32) -> u64 {
    let p = modulus.p();
    let m = modulus.degree();
    if w as usize >= m {
        return 1;
    }
    let l = m - w as usize;
    match modulus.kind() {
        ModulusKind::MonomialXm => pow(p, l - 1) * (p - 1),
        ModulusKind::Irreducible => pow(p, l) - 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CbcOptions {
    /// Largest admissible `N = p^m`.
    pub max_points: u64,
    /// `Omega` application used by [`cbc_reduced_fast`].
    pub omega: OmegaStrategy,
}

impl Default for CbcOptions {
    fn default() -> Self {
        Self {
            max_points: 1 << 22,
            omega: OmegaStrategy::Direct,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub dimension: usize,
    pub chosen: Poly,
    /// `R_gamma^d` of the prefix ending at this component.
    pub r_value: f64,
    pub search_set_size: u64,
    pub candidate_evaluations: u64,
    pub psi_applications: u64,
    /// Elementary operations spent in this step.
    pub work: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstructionTrace {
    pub steps: Vec<TraceStep>,
    /// `psi` table and unit group tables.
    pub setup_work: u64,
}

impl ConstructionTrace {
    pub fn r_values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.r_value).collect()
    }

    pub fn total_work(&self) -> u64 {
        self.setup_work + self.steps.iter().map(|s| s.work).sum::<u64>()
    }

    pub fn total_psi_applications(&self) -> u64 {
        self.steps.iter().map(|s| s.psi_applications).sum()
    }
}

/// `eta_d` stored as `scale * eta`; components that vanish mod `f` only touch `scale`.
struct EtaState {
    eta: Vec<f64>,
    scale: f64,
    base: f64,
}

impl EtaState {
    fn new(n: usize) -> Self {
        Self {
            eta: vec![1.0; n],
            scale: 1.0,
            base: 1.0,
        }
    }

    /// Multiplies in the factor of component `u`; returns the work spent.
    fn apply(&mut self, u: &Poly, f: &Poly, m: usize, psi: &[f64], gamma: f64) -> Result<u64> {
        self.base *= 1.0 + gamma;
        if u.rem(f)?.is_zero() {
            self.scale *= 1.0 + gamma + gamma * psi[0];
            return Ok(1);
        }
        let column = phi_numerator_table(u, f, m)?;
        for (e, &k) in self.eta.iter_mut().zip(&column) {
            *e *= 1.0 + gamma + gamma * psi[k as usize];
        }
        Ok(2 * self.eta.len() as u64)
    }

    fn r_value(&self) -> f64 {
        let sum: f64 = self.eta.iter().sum();
        (-self.base + self.scale * sum / self.eta.len() as f64).max(0.0)
    }

    fn tie_window(&self, psi0: f64) -> f64 {
        TIE_WINDOW * psi0 * self.eta.iter().map(|e| e.abs()).sum::<f64>()
    }
}

/// First score (in candidate order) within `window` of the minimum.
fn select(scores: &[f64], window: f64) -> usize {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    scores
        .iter()
        .position(|&s| s <= min + window)
        .expect("search sets are nonempty")
}

fn check_setup(
    modulus: &Modulus,
    weights: &WeightSystem,
    s: usize,
    opts: &CbcOptions,
) -> Result<()> {
    if s == 0 {
        return Err(Error::Parameter("dimension s must be at least 1".into()));
    }
    if weights.len() < s {
        return Err(Error::InvalidWeights(format!(
            "{} weights for dimension {s}",
            weights.len()
        )));
    }
    let n = checked_pow(modulus.p(), modulus.degree()).unwrap_or(u64::MAX);
    if n > opts.max_points {
        return Err(Error::Capacity(format!(
            "N = {}^{} exceeds the limit of {} points",
            modulus.p(),
            modulus.degree(),
            opts.max_points
        )));
    }
    Ok(())
}

enum Scoring<'a> {
    Naive,
    Fast(OmegaStrategy, &'a mut GroupCache),
}

fn construct(
    modulus: &Modulus,
    weights: &WeightSystem,
    s: usize,
    opts: &CbcOptions,
    mut scoring: Scoring,
) -> Result<(GeneratingVector, ConstructionTrace)> {
    check_setup(modulus, weights, s, opts)?;
    let p = modulus.p();
    let m = modulus.degree();
    let f = modulus.poly();
    let n = pow(p, m) as usize;
    let psi = psi_table(p, m);
    let mut trace = ConstructionTrace {
        steps: Vec::with_capacity(s),
        setup_work: n as u64,
    };
    let mut state = EtaState::new(n);
    let mut chosen = Vec::with_capacity(s);

    for d in 0..s {
        let w = weights.ws()[d];
        let gamma = weights.gammas()[d];
        let size = search_set_size(modulus, w);
        let mut cost = OmegaCost::default();
        let g = if d == 0 || size == 1 {
            Poly::one(p)
        } else {
            let candidates = search_set(modulus, w);
            let window = state.tie_window(psi[0]);
            let scores = match &mut scoring {
                Scoring::Naive => candidates
                    .iter()
                    .map(|g| {
                        let column = phi_numerator_table(&g.shift(w as usize), f, m)?;
                        cost.psi_applications += n as u64;
                        cost.work += 3 * n as u64;
                        Ok(column
                            .iter()
                            .zip(&state.eta)
                            .map(|(&k, &e)| psi[k as usize] * e)
                            .sum())
                    })
                    .collect::<Result<Vec<f64>>>()?,
                Scoring::Fast(strategy, cache) => {
                    let l = m - w as usize;
                    let folded = fold_eta(&state.eta, p, l);
                    cost.work += n as u64;
                    let (scores, omega_cost) = match strategy {
                        OmegaStrategy::Direct => omega_direct(l, w as usize, &folded, &psi, p),
                        OmegaStrategy::Structured => {
                            let (scores, c, setup) =
                                omega_structured(l, w as usize, &folded, &psi, p, cache)?;
                            trace.setup_work += setup;
                            (scores, c)
                        }
                    };
                    cost.psi_applications += omega_cost.psi_applications;
                    cost.work += omega_cost.work;
                    scores
                }
            };
            candidates[select(&scores, window)].clone()
        };
        cost.work += state.apply(&g.shift(w as usize), f, m, &psi, gamma)?;
        trace.steps.push(TraceStep {
            dimension: d + 1,
            chosen: g.clone(),
            r_value: state.r_value(),
            search_set_size: size,
            candidate_evaluations: if d == 0 { 1 } else { size },
            psi_applications: cost.psi_applications,
            work: cost.work,
        });
        chosen.push(g);
    }
    let gvec = GeneratingVector::new(modulus.clone(), weights.prefix(s), chosen)?;
    Ok((gvec, trace))
}

/// Reduced CBC: `g_1 = 1`, then each `g_{d+1}` minimizes `R_gamma^{d+1}` over
/// its reduced search set, ties going to the smallest index.
pub fn cbc_reduced_naive(
    modulus: &Modulus,
    weights: &WeightSystem,
    s: usize,
    opts: &CbcOptions,
) -> Result<(GeneratingVector, ConstructionTrace)> {
    construct(modulus, weights, s, opts, Scoring::Naive)
}

/// Reduced fast CBC for `f = x^m`: `eta` is folded into `p^{m - w}` block sums
/// and all candidates are scored by one application of `Omega^{(m - w)}`.
pub fn cbc_reduced_fast(
    modulus: &Modulus,
    weights: &WeightSystem,
    s: usize,
    opts: &CbcOptions,
) -> Result<(GeneratingVector, ConstructionTrace)> {
    if modulus.kind() != ModulusKind::MonomialXm {
        return Err(Error::Unsupported(
            "the fast construction is derived for f = x^m only".into(),
        ));
    }
    let mut cache = GroupCache::default();
    construct(
        modulus,
        weights,
        s,
        opts,
        Scoring::Fast(opts.omega, &mut cache),
    )
}
