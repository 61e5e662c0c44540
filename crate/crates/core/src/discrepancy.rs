//! Exact local, star and weighted star discrepancy of small point sets.
//!
//! All coordinates lie on the `p^{-m}` grid, so the supremum over anchored
//! boxes is reached at corners built from point coordinates and 1, either
//! at the corner itself (half-open count) or in the limit from above it
//! (closed count). Counts and volumes are compared as exact integers.

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Size limits for the brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscrepancyLimits {
    pub max_dim: usize,
    pub max_points: usize,
}

impl Default for DiscrepancyLimits {
    fn default() -> Self {
        Self {
            max_dim: 3,
            max_points: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionValue {
    /// Zero-based coordinates of the projection.
    pub coords: Vec<usize>,
    pub weight: f64,
    pub star_discrepancy: f64,
    /// `weight * star_discrepancy`.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    pub value: f64,
    /// Upper corner `t` of the extremal box, 1 outside the maximizing projection.
    pub witness: Vec<f64>,
    /// `true` when the value is approached as `t` decreases to `witness`.
    pub closed: bool,
    /// One entry per nonempty projection, in order of the coordinate bitmask;
    /// empty for the unweighted discrepancy.
    pub projections: Vec<ProjectionValue>,
}

/// `#{x_n in [0, t)} / N - prod t_j`.
pub fn local_discrepancy(ps: &PointSet, t: &[f64]) -> Result<f64> {
    if t.len() != ps.dim() {
        return Err(Error::Parameter(format!(
            "corner has {} coordinates, point set has {}",
            t.len(),
            ps.dim()
        )));
    }
    if let Some(x) = t.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
        return Err(Error::Parameter(format!(
            "corner coordinate {x} outside (0, 1]"
        )));
    }
    let den = ps.denominator() as f64;
    let inside = (0..ps.n_points())
        .filter(|&i| {
            ps.point(i)
                .iter()
                .zip(t)
                .all(|(&k, &tj)| (k as f64) < tj * den)
        })
        .count();
    Ok(inside as f64 / ps.n_points() as f64 - t.iter().product::<f64>())
}

fn check_limits(ps: &PointSet, limits: &DiscrepancyLimits) -> Result<()> {
    if ps.dim() > limits.max_dim || ps.n_points() > limits.max_points {
        return Err(Error::Capacity(format!(
            "exact discrepancy limited to s <= {} and N <= {}, got s = {}, N = {}",
            limits.max_dim,
            limits.max_points,
            ps.dim(),
            ps.n_points()
        )));
    }
    Ok(())
}

struct Extremum {
    /// Scaled by `N * den^s`.
    numerator: i128,
    corner: Vec<u64>,
    closed: bool,
}

fn star_extremum(ps: &PointSet) -> Extremum {
    let s = ps.dim();
    let n = ps.n_points();
    let den = ps.denominator();
    let grids: Vec<Vec<u64>> = (0..s)
        .map(|j| {
            let mut g: Vec<u64> = (0..n).map(|i| ps.point(i)[j]).collect();
            g.push(den);
            g.sort_unstable();
            g.dedup();
            g
        })
        .collect();
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
    let strides: Vec<usize> = sizes
        .iter()
        .scan(1, |acc, &len| {
            let st = *acc;
            *acc *= len;
            Some(st)
        })
        .collect();
    let cells: usize = sizes.iter().product();

    let mut counts = vec![0i128; cells];
    for i in 0..n {
        let flat: usize = (0..s)
            .map(|j| {
                grids[j]
                    .binary_search(&ps.point(i)[j])
                    .expect("coordinate on grid")
                    * strides[j]
            })
            .sum();
        counts[flat] += 1;
    }
    // closed[c] = #{points with rank <= c componentwise}
    for j in 0..s {
        for c in 0..cells {
            if !(c / strides[j]).is_multiple_of(sizes[j]) {
                counts[c] += counts[c - strides[j]];
            }
        }
    }

    let scale = den.pow(s as u32) as i128;
    let mut best = Extremum {
        numerator: -1,
        corner: vec![den; s],
        closed: false,
    };
    let mut rank = vec![0usize; s];
    for c in 0..cells {
        let mut rem = c;
        for j in 0..s {
            rank[j] = rem % sizes[j];
            rem /= sizes[j];
        }
        let vol: i128 = (0..s).map(|j| grids[j][rank[j]] as i128).product::<i128>() * n as i128;
        let closed = counts[c] * scale;
        let open_count = if rank.iter().all(|&r| r > 0) {
            counts[c - strides.iter().sum::<usize>()]
        } else {
            0
        };
        let open = open_count * scale;
        for (value, is_closed) in [(vol - open, false), (closed - vol, true)] {
            if value > best.numerator {
                best = Extremum {
                    numerator: value,
                    corner: (0..s).map(|j| grids[j][rank[j]]).collect(),
                    closed: is_closed,
                };
            }
        }
    }
    best
}

fn extremum_value(ps: &PointSet, e: &Extremum) -> f64 {
    let denom = ps.n_points() as f64 * (ps.denominator() as f64).powi(ps.dim() as i32);
    e.numerator as f64 / denom
}

/// `sup_t |Delta(t)|` over anchored boxes, computed exactly.
pub fn star_discrepancy_exact(
    ps: &PointSet,
    limits: &DiscrepancyLimits,
) -> Result<DiscrepancyResult> {
    check_limits(ps, limits)?;
    let e = star_extremum(ps);
    let den = ps.denominator() as f64;
    Ok(DiscrepancyResult {
        value: extremum_value(ps, &e),
        witness: e.corner.iter().map(|&k| k as f64 / den).collect(),
        closed: e.closed,
        projections: Vec::new(),
    })
}

/// `max_{u != {}} gamma_u D*(P_u)`, projections keeping repeated points.
pub fn weighted_star_discrepancy_exact(
    ps: &PointSet,
    gammas: &[f64],
    limits: &DiscrepancyLimits,
) -> Result<DiscrepancyResult> {
    check_limits(ps, limits)?;
    let s = ps.dim();
    if gammas.len() < s {
        return Err(Error::InvalidWeights(format!(
            "{} weights for dimension {s}",
            gammas.len()
        )));
    }
    let den = ps.denominator() as f64;
    let mut projections = Vec::with_capacity((1 << s) - 1);
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for mask in 1u32..1 << s {
        let coords: Vec<usize> = (0..s).filter(|j| mask >> j & 1 == 1).collect();
        let weight: f64 = coords.iter().map(|&j| gammas[j]).product();
        let projected = ps.project(&coords);
        let e = star_extremum(&projected);
        let star = extremum_value(&projected, &e);
        let weighted = weight * star;
        if best.as_ref().is_none_or(|b| weighted > b.0) {
            let mut witness = vec![1.0; s];
            for (&j, &k) in coords.iter().zip(&e.corner) {
                witness[j] = k as f64 / den;
            }
            best = Some((weighted, witness, e.closed));
        }
        projections.push(ProjectionValue {
            coords,
            weight,
            star_discrepancy: star,
            weighted,
        });
    }
    let (value, witness, closed) = best.expect("at least one projection");
    Ok(DiscrepancyResult {
        value,
        witness,
        closed,
        projections,
    })
}
