use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lattice::{LatticePoint, PlanePoint};
use crate::rational::{format_rational, to_f64, NumOrString, Rational};

use super::TropicalError;

/// `F(x, y) = min over (k, l) in A of (k·x + l·y + a_{k,l})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    terms: BTreeMap<LatticePoint, Rational>,
}

/// Value of a polynomial at a point and the monomials attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Rational,
    pub argmin: Vec<LatticePoint>,
}

impl TropicalPolynomial {
    pub fn new<I>(terms: I) -> Result<Self, TropicalError>
    where
        I: IntoIterator<Item = (LatticePoint, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (k, a) in terms {
            if map.insert(k, a).is_some() {
                return Err(TropicalError::DuplicateMonomial(k));
            }
        }
        if map.is_empty() {
            return Err(TropicalError::Empty);
        }
        Ok(Self { terms: map })
    }

    /// Convenience constructor from `((k, l), a)` pairs.
    pub fn from_terms(terms: &[((i64, i64), Rational)]) -> Result<Self, TropicalError> {
        Self::new(terms.iter().map(|&(k, a)| (k.into(), a)))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.terms.keys().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (LatticePoint, Rational)> + '_ {
        self.terms.iter().map(|(k, a)| (*k, *a))
    }

    pub fn coefficient(&self, k: LatticePoint) -> Option<Rational> {
        self.terms.get(&k).copied()
    }

    pub fn set_coefficient(&mut self, k: LatticePoint, a: Rational) {
        self.terms.insert(k, a);
    }

    pub fn monomial_at(k: LatticePoint, a: &Rational, p: &PlanePoint) -> Rational {
        Rational::from_integer(k.x as i128) * p.x + Rational::from_integer(k.y as i128) * p.y + a
    }

    pub fn evaluate(&self, p: &PlanePoint) -> Evaluation {
        let mut best: Option<Rational> = None;
        let mut argmin = Vec::new();
        for (k, a) in &self.terms {
            let v = Self::monomial_at(*k, a, p);
            match best {
                Some(b) if v > b => {}
                Some(b) if v == b => argmin.push(*k),
                _ => {
                    best = Some(v);
                    argmin.clear();
                    argmin.push(*k);
                }
            }
        }
        Evaluation { value: best.expect("non-empty support"), argmin }
    }

    pub fn value(&self, p: &PlanePoint) -> Rational {
        self.evaluate(p).value
    }

    pub fn evaluate_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, a)| k.x as f64 * x + k.y as f64 * y + to_f64(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Adds `c` to every coefficient.
    pub fn shifted(&self, c: Rational) -> Self {
        Self { terms: self.terms.iter().map(|(k, a)| (*k, a + c)).collect() }
    }

    /// `a_{k,l} ↦ a_{k,l} + k·t₁ + l·t₂`, which moves the corner locus by `(−t₁, −t₂)`.
    pub fn translated(&self, t: &PlanePoint) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (*k, a + Rational::from_integer(k.x as i128) * t.x + Rational::from_integer(k.y as i128) * t.y))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PolynomialJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, TropicalError> {
        let j: PolynomialJson = serde_json::from_str(s).map_err(|e| TropicalError::Format(e.to_string()))?;
        j.try_into()
    }
}

/// Wire form: `{"support": [[k,l],...], "coeffs": ["a/b",...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub support: Vec<[i64; 2]>,
    pub coeffs: Vec<NumOrString>,
}

impl From<&TropicalPolynomial> for PolynomialJson {
    fn from(p: &TropicalPolynomial) -> Self {
        Self {
            support: p.terms.keys().map(|k| [k.x, k.y]).collect(),
            coeffs: p.terms.values().map(|a| NumOrString::Str(format_rational(a))).collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for TropicalPolynomial {
    type Error = TropicalError;

    fn try_from(j: PolynomialJson) -> Result<Self, TropicalError> {
        if j.support.len() != j.coeffs.len() {
            return Err(TropicalError::Format(format!(
                "{} exponents but {} coefficients",
                j.support.len(),
                j.coeffs.len()
            )));
        }
        let mut terms = Vec::with_capacity(j.support.len());
        for (k, c) in j.support.iter().zip(&j.coeffs) {
            let a = c.to_rational().map_err(|e| TropicalError::Format(e.to_string()))?;
            terms.push((LatticePoint::new(k[0], k[1]), a));
        }
        TropicalPolynomial::new(terms)
    }
}
