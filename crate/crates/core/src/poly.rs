//! Polynomials with rational coefficients in abstract symbols, evaluated in
//! any scalar domain. Used for eigencoordinate equations on weakly special
//! subvarieties, chart equations, and polynomial parametrizations.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{AlgebraError, Result};
use crate::rational::{format_rational, Rational};
use crate::scalar::Scalar;

/// Sparse polynomial over Q in `vars` symbols.
#[derive(Clone, PartialEq, Debug)]
pub struct QPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl QPoly {
    pub fn zero(vars: usize) -> Self {
        QPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, value: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !num_traits::Zero::is_zero(&value) {
            p.terms.insert(vec![0; vars], value);
        }
        p
    }

    pub fn variable(vars: usize, index: usize) -> Result<Self> {
        if index >= vars {
            return Err(AlgebraError::IndexOutOfBounds(format!(
                "polynomial variable {index} of {vars}"
            )));
        }
        let mut exps = vec![0u32; vars];
        exps[index] = 1;
        Ok(Self::from_terms(vars, vec![(exps, Rational::from_integer(1.into()))]).unwrap())
    }

    pub fn from_terms(
        vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != vars {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "exponent vector of length {} in a polynomial with {} variables",
                    exps.len(),
                    vars
                )));
            }
            if num_traits::Zero::is_zero(&coeff) {
                continue;
            }
            let entry = map
                .entry(exps)
                .or_insert_with(|| Rational::from_integer(0.into()));
            *entry += coeff;
        }
        map.retain(|_, c: &mut Rational| !num_traits::Zero::is_zero(c));
        Ok(QPoly { vars, terms: map })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.vars])
            .cloned()
            .unwrap_or_else(|| Rational::from_integer(0.into()))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.vars != other.vars {
            return Err(AlgebraError::ShapeMismatch(
                "polynomial variable counts differ".into(),
            ));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms
                .entry(e.clone())
                .or_insert_with(|| Rational::from_integer(0.into()));
            *entry += c;
        }
        terms.retain(|_, c| !num_traits::Zero::is_zero(c));
        Ok(QPoly {
            vars: self.vars,
            terms,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.vars != other.vars {
            return Err(AlgebraError::ShapeMismatch(
                "polynomial variable counts differ".into(),
            ));
        }
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms
                    .entry(exps)
                    .or_insert_with(|| Rational::from_integer(0.into()));
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !num_traits::Zero::is_zero(c));
        Ok(QPoly {
            vars: self.vars,
            terms,
        })
    }

    pub fn scaled(&self, q: &Rational) -> Self {
        if num_traits::Zero::is_zero(q) {
            return Self::zero(self.vars);
        }
        QPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(),
        }
    }

    /// Evaluates at a point in any scalar domain (the witness fixes shapes).
    pub fn evaluate<K: Scalar>(&self, point: &[K], witness: &K) -> Result<K> {
        if point.len() != self.vars {
            return Err(AlgebraError::ShapeMismatch(format!(
                "evaluation point of length {} for {} symbols",
                point.len(),
                self.vars
            )));
        }
        let mut total = witness.zero_like();
        for (exps, coeff) in &self.terms {
            let mut term = witness.embed_rational(coeff);
            for (value, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    term = term.mul(value);
                }
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    /// Partial derivative with respect to one symbol.
    pub fn partial_derivative(&self, var: usize) -> Result<Self> {
        if var >= self.vars {
            return Err(AlgebraError::IndexOutOfBounds(format!(
                "derivative in symbol {var} of {}",
                self.vars
            )));
        }
        let mut terms = BTreeMap::new();
        for (exps, coeff) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut lowered = exps.clone();
            lowered[var] = e - 1;
            terms.insert(lowered, coeff * Rational::from_integer(i64::from(e).into()));
        }
        Ok(QPoly {
            vars: self.vars,
            terms,
        })
    }

    pub fn render(&self, symbols: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (exps, coeff) in &self.terms {
            let mut factors = Vec::new();
            let trivial = exps.iter().all(|&e| e == 0);
            if !coeff.eq(&Rational::from_integer(1.into())) || trivial {
                factors.push(format_rational(coeff));
            }
            for (i, &e) in exps.iter().enumerate() {
                let name = symbols
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("x{}", i + 1));
                if e == 1 {
                    factors.push(name);
                } else if e > 1 {
                    factors.push(format!("{name}^{e}"));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

/// Polynomial map Q^params -> Q^outputs used as a parametrization.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub params: usize,
    pub outputs: Vec<QPoly>,
}

impl PolyMap {
    pub fn new(params: usize, outputs: Vec<QPoly>) -> Result<Self> {
        for p in &outputs {
            if p.vars() != params {
                return Err(AlgebraError::ShapeMismatch(
                    "parametrization output over a different parameter count".into(),
                ));
            }
        }
        Ok(PolyMap { params, outputs })
    }

    pub fn evaluate<K: Scalar>(&self, point: &[K], witness: &K) -> Result<Vec<K>> {
        self.outputs
            .iter()
            .map(|p| p.evaluate(point, witness))
            .collect()
    }

    /// Exact Jacobian rank at sampled rational points: the dimension of the
    /// image of the map, generically.
    pub fn jacobian_rank_at_samples(&self, samples: u32, seed: u64, height: u32) -> usize {
        use crate::linalg::exact_rank;
        use crate::matrix::Matrix;
        if self.params == 0 || self.outputs.is_empty() {
            return 0;
        }
        let partials: Vec<Vec<QPoly>> = self
            .outputs
            .iter()
            .map(|p| {
                (0..self.params)
                    .map(|v| p.partial_derivative(v).expect("var in range"))
                    .collect()
            })
            .collect();
        let mut best = 0usize;
        for s in 0..samples {
            let mut rng = stream_rng_for_map(seed, s);
            let point: Vec<Rational> = (0..self.params)
                .map(|_| crate::rational::random_rational(&mut rng, height))
                .collect();
            let witness = Rational::from_integer(0.into());
            let values = Matrix::from_fn(self.outputs.len(), self.params, |r, c| {
                partials[r][c]
                    .evaluate(&point, &witness)
                    .expect("lengths checked")
            });
            best = best.max(exact_rank(&values));
            if best == self.params.min(self.outputs.len()) {
                break;
            }
        }
        best
    }
}

fn stream_rng_for_map(seed: u64, sample: u32) -> impl Rng {
    crate::rng::stream_rng(seed, 0x706d_0000 + u64::from(sample))
}
