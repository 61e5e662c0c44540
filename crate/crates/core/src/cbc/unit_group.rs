//! The unit group of `F_p[x] / x^L` as a product of cyclic groups.
//!
//! `U_L = <c> x prod_{j < L, p does not divide j} <1 - x^j>`, where `c` is a
//! primitive root mod `p` and `1 - x^j` has order `p^{e_j}` with `e_j`
//! minimal such that `j p^{e_j} >= L`. The decomposition is checked when the
//! table is built.

use crate::error::{Error, Result};
use crate::fieldpoly::{mod_pow, pow, Poly};

#[derive(Debug, Clone)]
pub(crate) struct UnitGroup {
    /// Cyclic factor orders; axis 0 has stride 1.
    pub dims: Vec<usize>,
    /// Polynomial index of the element at each flat exponent position.
    pub elements: Vec<u64>,
    /// Flat exponent position of each polynomial index; `usize::MAX` for non-units.
    pub position: Vec<usize>,
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&c| factors.iter().all(|&q| mod_pow(c, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

impl UnitGroup {
    pub fn new(p: u64, l: usize) -> Result<Self> {
        let mut gens: Vec<(Poly, usize)> = Vec::new();
        if p > 2 {
            gens.push((
                Poly::from_reduced(p, vec![primitive_root(p)]),
                (p - 1) as usize,
            ));
        }
        for j in 1..l {
            if (j as u64).is_multiple_of(p) {
                continue;
            }
            let mut e = 0;
            let mut reach = j as u64;
            while reach < l as u64 {
                reach *= p;
                e += 1;
            }
            let gen = Poly::one(p).sub(&Poly::monomial(p, j, 1));
            gens.push((gen, pow(p, e) as usize));
        }

        let mut elements = vec![Poly::one(p)];
        let mut dims = Vec::with_capacity(gens.len());
        for (gen, order) in gens {
            let mut next = Vec::with_capacity(elements.len() * order);
            let mut power = Poly::one(p);
            for _ in 0..order {
                next.extend(elements.iter().map(|e| e.mul(&power).truncate(l)));
                power = power.mul(&gen).truncate(l);
            }
            if !power.is_one() {
                return Err(Error::Parameter(format!(
                    "generator {gen} does not have order {order} mod x^{l}"
                )));
            }
            elements = next;
            dims.push(order);
        }

        let size = pow(p, l) as usize;
        let expected = size / p as usize * (p as usize - 1);
        let mut position = vec![usize::MAX; size];
        for (k, e) in elements.iter().enumerate() {
            let idx = e.index() as usize;
            if position[idx] != usize::MAX {
                return Err(Error::Parameter(format!(
                    "unit group decomposition mod x^{l} is not injective"
                )));
            }
            position[idx] = k;
        }
        if elements.len() != expected {
            return Err(Error::Parameter(format!(
                "unit group decomposition mod x^{l} has {} elements, expected {expected}",
                elements.len()
            )));
        }
        dims.retain(|&d| d > 1);
        Ok(Self {
            dims,
            elements: elements.iter().map(Poly::index).collect(),
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }
}
