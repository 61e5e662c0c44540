//! JSON file format for constructed generating vectors.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::fieldpoly::{Modulus, ModulusKind, Poly};
use crate::quality::{GeneratingVector, WeightSystem};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindRecord {
    Xm,
    Irr,
}

impl From<ModulusKind> for KindRecord {
    fn from(kind: ModulusKind) -> Self {
        match kind {
            ModulusKind::MonomialXm => KindRecord::Xm,
            ModulusKind::Irreducible => KindRecord::Irr,
        }
    }
}

impl From<KindRecord> for ModulusKind {
    fn from(kind: KindRecord) -> Self {
        match kind {
            KindRecord::Xm => ModulusKind::MonomialXm,
            KindRecord::Irr => ModulusKind::Irreducible,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Fast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusRecord {
    pub kind: KindRecord,
    /// Ascending degree.
    pub coeffs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsRecord {
    pub gammas: Vec<f64>,
    pub ws: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub reduced_coeffs: Vec<u64>,
    pub shifted_coeffs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRecord {
    pub joe_term: f64,
    pub product_term: f64,
    pub total: f64,
    pub case: KindRecord,
    pub hypothesis_flags: Vec<String>,
}

impl From<&BoundReport> for BoundRecord {
    fn from(b: &BoundReport) -> Self {
        Self {
            joe_term: b.joe_term,
            product_term: b.product_term,
            total: b.total,
            case: b.case.into(),
            hypothesis_flags: b.hypothesis_flags.clone(),
        }
    }
}

impl From<&BoundRecord> for BoundReport {
    fn from(b: &BoundRecord) -> Self {
        Self {
            joe_term: b.joe_term,
            product_term: b.product_term,
            total: b.total,
            case: b.case.into(),
            hypothesis_flags: b.hypothesis_flags.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub version: u32,
    pub p: u64,
    pub m: usize,
    pub s: usize,
    pub modulus: ModulusRecord,
    pub weights: WeightsRecord,
    pub generators: Vec<GeneratorRecord>,
    pub r_values: Vec<f64>,
    pub bound: BoundRecord,
    pub algorithm: Algorithm,
}

impl VectorFile {
    pub fn new(
        gvec: &GeneratingVector,
        r_values: Vec<f64>,
        bound: &BoundReport,
        algorithm: Algorithm,
    ) -> Self {
        Self {
            version: FORMAT_VERSION,
            p: gvec.p(),
            m: gvec.m(),
            s: gvec.dim(),
            modulus: ModulusRecord {
                kind: gvec.modulus().kind().into(),
                coeffs: gvec.modulus().poly().coeffs().to_vec(),
            },
            weights: WeightsRecord {
                gammas: gvec.weights().gammas().to_vec(),
                ws: gvec.weights().ws().to_vec(),
            },
            generators: gvec
                .reduced()
                .iter()
                .zip(gvec.shifted())
                .map(|(g, u)| GeneratorRecord {
                    reduced_coeffs: g.coeffs().to_vec(),
                    shifted_coeffs: u.coeffs().to_vec(),
                })
                .collect(),
            r_values,
            bound: bound.into(),
            algorithm,
        }
    }

    /// Rebuilds the generating vector, checking every stored field against it.
    pub fn generating_vector(&self) -> Result<GeneratingVector> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parameter(format!(
                "unsupported file version {}",
                self.version
            )));
        }
        let f = Poly::new(self.p, self.modulus.coeffs.clone())?;
        let modulus = Modulus::from_parts(self.modulus.kind.into(), f)?;
        if modulus.degree() != self.m {
            return Err(Error::Parameter(format!(
                "modulus has degree {}, file says m = {}",
                modulus.degree(),
                self.m
            )));
        }
        if self.generators.len() != self.s || self.r_values.len() != self.s {
            return Err(Error::Parameter(format!(
                "file declares s = {} but lists {} generators and {} R values",
                self.s,
                self.generators.len(),
                self.r_values.len()
            )));
        }
        let weights = WeightSystem::new(self.weights.gammas.clone(), self.weights.ws.clone())?;
        let reduced = self
            .generators
            .iter()
            .map(|g| Poly::new(self.p, g.reduced_coeffs.clone()))
            .collect::<Result<Vec<_>>>()?;
        let gvec = GeneratingVector::new(modulus, weights, reduced)?;
        for (j, (rec, u)) in self.generators.iter().zip(gvec.shifted()).enumerate() {
            if Poly::new(self.p, rec.shifted_coeffs.clone())? != *u {
                return Err(Error::Parameter(format!(
                    "shifted component {} does not equal x^w g",
                    j + 1
                )));
            }
        }
        Ok(gvec)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("vector files serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parameter(format!("malformed vector file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::discrepancy_bound;
    use crate::cbc::{cbc_reduced_naive, CbcOptions};
    use proptest::prelude::*;

    fn build(p: u64, m: usize, gammas: Vec<f64>, ws: Vec<u32>, irr: bool) -> VectorFile {
        let s = gammas.len();
        let f = if irr {
            Modulus::smallest_irreducible(p, m).unwrap()
        } else {
            Modulus::monomial(p, m).unwrap()
        };
        let w = WeightSystem::new(gammas, ws).unwrap();
        let (g, trace) = cbc_reduced_naive(&f, &w, s, &CbcOptions::default()).unwrap();
        let b = discrepancy_bound(p, m, s, &w, f.kind()).unwrap();
        VectorFile::new(&g, trace.r_values(), &b, Algorithm::Naive)
    }

    #[test]
    fn regression_file_layout() {
        let v = build(2, 2, vec![1.0, 1.0], vec![0, 0], false);
        let json = v.to_json();
        assert!(json.contains("\"kind\": \"xm\""));
        assert!(json.contains("\"algorithm\": \"naive\""));
        assert_eq!(v.generators[1].reduced_coeffs, vec![1, 1]);
        assert_eq!(v.modulus.coeffs, vec![0, 0, 1]);
    }

    #[test]
    fn tampered_files_are_rejected() {
        let v = build(3, 2, vec![1.0, 0.5], vec![0, 1], false);
        let mut bad = v.clone();
        bad.generators[1].shifted_coeffs = vec![1];
        assert!(bad.generating_vector().is_err());
        let mut bad = v.clone();
        bad.m = 3;
        assert!(bad.generating_vector().is_err());
        let mut bad = v;
        bad.generators[1].reduced_coeffs = vec![0];
        assert!(bad.generating_vector().is_err());
        assert!(VectorFile::from_json("{\"version\": 1}").is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip(
            p in prop_oneof![Just(2u64), Just(3u64)],
            m in 1usize..4,
            s in 1usize..4,
            decay in 1.0f64..3.0,
            irr in any::<bool>(),
        ) {
            let gammas: Vec<f64> = (1..=s).map(|j| (j as f64).powf(-decay)).collect();
            let ws: Vec<u32> = (0..s as u32).map(|j| j / 2).collect();
            let v = build(p, m, gammas, ws, irr);
            let back = VectorFile::from_json(&v.to_json()).unwrap();
            prop_assert_eq!(&back, &v);
            let g = back.generating_vector().unwrap();
            prop_assert_eq!(VectorFile::new(&g, v.r_values.clone(), &(&v.bound).into(), v.algorithm), v);
        }
    }
}
