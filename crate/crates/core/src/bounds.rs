//! Closed-form error bounds, tractability checks and reduction-index rules.

use crate::error::{Error, Result};
use crate::fieldpoly::{check_prime, ModulusKind};
use crate::quality::WeightSystem;

/// Per-coordinate constant multiplying `gamma_i p^{min(w_i, m)}` in the bound products.
fn case_constant(p: u64, m: usize, kind: ModulusKind) -> f64 {
    let p = p as f64;
    let m = m as f64;
    match kind {
        ModulusKind::MonomialXm => 2.0 * m * (p * p - 1.0) / (3.0 * p),
        ModulusKind::Irreducible => m * (p + 1.0) / 3.0,
    }
}

/// `prod_{i <= d} (1 + gamma_i + gamma_i c p^{min(w_i, m)})`, with `c` from [`case_constant`].
pub fn product_constant(gammas: &[f64], ws: &[u32], p: u64, m: usize, kind: ModulusKind) -> f64 {
    let c = case_constant(p, m, kind);
    let pf = p as f64;
    gammas
        .iter()
        .zip(ws)
        .map(|(&g, &w)| 1.0 + g + g * c * pf.powi((w as usize).min(m) as i32))
        .product()
}

/// Upper bound on `R_gamma^d` of a constructed vector: `p^{-m}` times [`product_constant`].
pub fn theorem_bound(
    weights: &WeightSystem,
    p: u64,
    m: usize,
    d: usize,
    kind: ModulusKind,
) -> Result<f64> {
    if d == 0 || d > weights.len() {
        return Err(Error::Parameter(format!(
            "dimension {d} outside 1..={}",
            weights.len()
        )));
    }
    let prod = product_constant(&weights.gammas()[..d], &weights.ws()[..d], p, m, kind);
    Ok(prod * (p as f64).powi(-(m as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoeSum {
    /// `prod(1 + gamma_i) - prod(1 + gamma_i (1 - 1/N))`.
    pub exact: f64,
    /// `max(1, Gamma) e^{sum gamma_i} / N`.
    pub upper: f64,
}

/// `sum_{u != {}} gamma_u (1 - (1 - 1/N)^{|u|})` for product weights.
pub fn joe_sum(gammas: &[f64], n: u64) -> Result<JoeSum> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let q = 1.0 - 1.0 / n as f64;
    let full: f64 = gammas.iter().map(|g| 1.0 + g).product();
    let shrunk: f64 = gammas.iter().map(|g| 1.0 + g * q).product();
    let big_gamma: f64 = gammas.iter().map(|g| g / (1.0 + g)).sum();
    let sum: f64 = gammas.iter().sum();
    Ok(JoeSum {
        exact: full - shrunk,
        upper: big_gamma.max(1.0) * sum.exp() / n as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub joe_term: f64,
    pub product_term: f64,
    pub total: f64,
    pub case: ModulusKind,
    /// Hypotheses of the published bound that the parameters violate.
    pub hypothesis_flags: Vec<String>,
}

pub const FLAG_W1_NONZERO: &str = "w1_nonzero";

/// Upper bound on the weighted star discrepancy of a constructed point set:
/// Joe's term plus `p^{-m} prod_{i <= s}(...)`.
pub fn discrepancy_bound(
    p: u64,
    m: usize,
    s: usize,
    weights: &WeightSystem,
    kind: ModulusKind,
) -> Result<BoundReport> {
    check_prime(p)?;
    if s == 0 || s > weights.len() {
        return Err(Error::Parameter(format!(
            "dimension {s} outside 1..={}",
            weights.len()
        )));
    }
    let n = crate::fieldpoly::checked_pow(p, m)
        .ok_or_else(|| Error::Capacity(format!("{p}^{m} overflows")))?;
    let joe = joe_sum(&weights.gammas()[..s], n)?;
    let product_term = theorem_bound(weights, p, m, s, kind)?;
    let mut hypothesis_flags = Vec::new();
    if weights.w1_nonzero() {
        hypothesis_flags.push(FLAG_W1_NONZERO.to_string());
    }
    Ok(BoundReport {
        joe_term: joe.exact,
        product_term,
        total: joe.exact + product_term,
        case: kind,
        hypothesis_flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConvergentLooking,
    DivergentLooking,
}

/// Numerical evidence only: the verdict looks at the last increment.
#[derive(Debug, Clone, PartialEq)]
pub struct TractabilityReport {
    /// `sum_{j <= S} gamma_j p^{w_j}` for `S = 1, ..., horizon`.
    pub partial_sums: Vec<f64>,
    pub verdict: Verdict,
}

pub const DEFAULT_TRACTABILITY_TOL: f64 = 1e-9;

/// Partial sums of `sum_j gamma_j p^{w_j}` over the given sequences.
pub fn tractability_check(
    gammas: &[f64],
    ws: &[u32],
    p: u64,
    tol: f64,
) -> Result<TractabilityReport> {
    if gammas.is_empty() || gammas.len() != ws.len() {
        return Err(Error::Parameter(
            "need equally long, nonempty weight and reduction sequences".into(),
        ));
    }
    let mut acc = 0.0;
    let mut last = 0.0;
    let partial_sums = gammas
        .iter()
        .zip(ws)
        .map(|(&g, &w)| {
            last = g * (p as f64).powi(w as i32);
            acc += last;
            acc
        })
        .collect();
    let verdict = if last < tol {
        Verdict::ConvergentLooking
    } else {
        Verdict::DivergentLooking
    };
    Ok(TractabilityReport {
        partial_sums,
        verdict,
    })
}

/// `w_j = floor((k - alpha) log_p j)` for `j = 1, ..., count`.
pub fn suggest_ws(k: f64, alpha: f64, p: u64, count: usize) -> Result<Vec<u32>> {
    if !(alpha > 1.0 && alpha < k) {
        return Err(Error::Parameter(format!(
            "alpha = {alpha} must lie in (1, {k})"
        )));
    }
    check_prime(p)?;
    let ln_p = (p as f64).ln();
    Ok((1..=count)
        .map(|j| {
            let x = (k - alpha) * (j as f64).ln() / ln_p;
            // exact powers of p land on integers up to rounding
            (x + 1e-9).floor() as u32
        })
        .collect())
}

/// Weight sequences selectable from the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaRule {
    /// `gamma_j = j^{-k}`.
    Poly(f64),
    /// `gamma_j = q^j`.
    Geo(f64),
    List(Vec<f64>),
}

impl GammaRule {
    pub fn gammas(&self, count: usize) -> Result<Vec<f64>> {
        match self {
            GammaRule::Poly(k) if *k > 0.0 => {
                Ok((1..=count).map(|j| (j as f64).powf(-k)).collect())
            }
            GammaRule::Geo(q) if *q > 0.0 && *q <= 1.0 => {
                Ok((1..=count).map(|j| q.powi(j as i32)).collect())
            }
            GammaRule::List(v) if v.len() >= count => Ok(v[..count].to_vec()),
            GammaRule::List(v) => Err(Error::InvalidWeights(format!(
                "{} weights listed for dimension {count}",
                v.len()
            ))),
            GammaRule::Poly(k) => Err(Error::InvalidWeights(format!(
                "decay exponent {k} must be positive"
            ))),
            GammaRule::Geo(q) => Err(Error::InvalidWeights(format!(
                "ratio {q} must lie in (0, 1]"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionRule {
    None,
    /// [`suggest_ws`] with the decay exponent of a [`GammaRule::Poly`] rule.
    Auto(f64),
    List(Vec<u32>),
}

impl ReductionRule {
    pub fn ws(&self, gammas: &GammaRule, p: u64, count: usize) -> Result<Vec<u32>> {
        match self {
            ReductionRule::None => Ok(vec![0; count]),
            ReductionRule::Auto(alpha) => match gammas {
                GammaRule::Poly(k) => suggest_ws(*k, *alpha, p, count),
                _ => Err(Error::Parameter(
                    "automatic reduction indices need polynomially decaying weights".into(),
                )),
            },
            ReductionRule::List(v) if v.len() >= count => Ok(v[..count].to_vec()),
            ReductionRule::List(v) => Err(Error::InvalidWeights(format!(
                "{} reduction indices listed for dimension {count}",
                v.len()
            ))),
        }
    }
}

/// Both rules evaluated for `count` coordinates.
pub fn weight_system(
    gammas: &GammaRule,
    ws: &ReductionRule,
    p: u64,
    count: usize,
) -> Result<WeightSystem> {
    WeightSystem::new(gammas.gammas(count)?, ws.ws(gammas, p, count)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NStar {
    pub m: usize,
    pub n: u64,
}

/// Smallest `m <= m_cap` whose [`discrepancy_bound`] is at most `epsilon`.
/// This bounds `N*(s, epsilon)` from above; it is not the true minimum.
pub fn n_star_bound(
    weights: &WeightSystem,
    p: u64,
    s: usize,
    epsilon: f64,
    kind: ModulusKind,
    m_cap: usize,
) -> Result<NStar> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    for m in 1..=m_cap {
        // w_j >= m coordinates change with m, so the bound is recomputed each time
        if discrepancy_bound(p, m, s, weights, kind)?.total <= epsilon {
            let n = crate::fieldpoly::checked_pow(p, m)
                .ok_or_else(|| Error::Capacity(format!("{p}^{m} overflows")))?;
            return Ok(NStar { m, n });
        }
    }
    Err(Error::Capacity(format!(
        "bound stays above {epsilon} for all m <= {m_cap}"
    )))
}
