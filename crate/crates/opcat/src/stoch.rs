//! The classical operational representation: row-stochastic matrices and
//! their signed (row-sum-1) variant, distribution states, random-variable
//! measurements, and the global-assignment encoding used by the locality and
//! no-signalling classifiers. All arithmetic in this module is exact
//! rational; floats never enter.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::matcat::Obj;
use crate::operational::OutcomeDistribution;
use crate::semiring::{Scalar, SemiringInstance};
use crate::tuple::Tuple;

/// Which entry discipline a matrix or state obeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Entries in [0, 1].
    Stochastic,
    /// Arbitrary rational entries ("negative probabilities").
    Signed,
}

fn in_unit_interval(q: &BigRational) -> bool {
    q >= &BigRational::zero() && q <= &BigRational::one()
}

/// A matrix whose rows (indexed by the domain) each sum to 1.
#[derive(Debug, Clone)]
pub struct StochMor {
    dom: Obj,
    cod: Obj,
    rows: Vec<Vec<BigRational>>,
    variant: Variant,
}

impl StochMor {
    pub fn new(
        dom: Obj,
        cod: Obj,
        rows: Vec<Vec<BigRational>>,
        variant: Variant,
    ) -> Result<StochMor, Error> {
        if rows.len() != dom.dim() || rows.iter().any(|r| r.len() != cod.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "row grid must be {}x{}",
                dom.dim(),
                cod.dim()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let sum: BigRational = row.iter().cloned().sum();
            if !sum.is_one() {
                return Err(Error::ShapeMismatch(format!(
                    "row {} of stochastic matrix sums to {sum}, expected 1",
                    dom.elems()[i]
                )));
            }
            if variant == Variant::Stochastic && !row.iter().all(in_unit_interval) {
                return Err(Error::ShapeMismatch(format!(
                    "row {} has an entry outside [0, 1]",
                    dom.elems()[i]
                )));
            }
        }
        Ok(StochMor {
            dom,
            cod,
            rows,
            variant,
        })
    }

    /// Embed a deterministic function as 0/1 rows δ_{f(x)}.
    pub fn deterministic(dom: Obj, cod: Obj, map: &[usize]) -> Result<StochMor, Error> {
        if map.len() != dom.dim() || map.iter().any(|&y| y >= cod.dim()) {
            return Err(Error::ShapeMismatch("function table out of range".into()));
        }
        let rows = map
            .iter()
            .map(|&y| {
                (0..cod.dim())
                    .map(|j| {
                        if j == y {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        StochMor::new(dom, cod, rows, Variant::Stochastic)
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn entry(&self, x: usize, y: usize) -> &BigRational {
        &self.rows[x][y]
    }

    /// Diagrammatic composition: `f.then(g)` runs `f` first.
    pub fn then(&self, g: &StochMor) -> Result<StochMor, Error> {
        if self.cod != g.dom {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.dom.describe(),
                self.cod.describe(),
                g.dom.describe(),
                g.cod.describe()
            )));
        }
        let variant = if self.variant == Variant::Stochastic && g.variant == Variant::Stochastic {
            Variant::Stochastic
        } else {
            Variant::Signed
        };
        let rows = (0..self.dom.dim())
            .map(|x| {
                (0..g.cod.dim())
                    .map(|z| {
                        (0..self.cod.dim())
                            .map(|y| &self.rows[x][y] * &g.rows[y][z])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        StochMor::new(self.dom.clone(), g.cod.clone(), rows, variant)
    }
}

/// A (possibly signed) probability distribution on a finite base set.
#[derive(Debug, Clone)]
pub struct ClassicalState {
    base: Obj,
    weights: Vec<BigRational>,
    variant: Variant,
}

impl ClassicalState {
    pub fn new(base: Obj, weights: Vec<BigRational>, variant: Variant) -> Result<ClassicalState, Error> {
        if weights.len() != base.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for base of size {}",
                weights.len(),
                base.dim()
            )));
        }
        let sum: BigRational = weights.iter().cloned().sum();
        if !sum.is_one() {
            return Err(Error::InvalidState(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        if variant == Variant::Stochastic && !weights.iter().all(in_unit_interval) {
            return Err(Error::InvalidState("negative weight in a stochastic state".into()));
        }
        Ok(ClassicalState {
            base,
            weights,
            variant,
        })
    }

    /// δ_x.
    pub fn point_mass(base: Obj, x: usize) -> ClassicalState {
        let weights = (0..base.dim())
            .map(|i| {
                if i == x {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        ClassicalState {
            base,
            weights,
            variant: Variant::Stochastic,
        }
    }

    pub fn uniform(base: Obj) -> ClassicalState {
        let n = base.dim();
        let w = BigRational::new(BigInt::from(1), BigInt::from(n as i64));
        ClassicalState {
            base,
            weights: vec![w; n],
            variant: Variant::Stochastic,
        }
    }

    pub fn base(&self) -> &Obj {
        &self.base
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> &BigRational {
        &self.weights[x]
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
}

/// A random variable: a function from the base set to outcome labels.
#[derive(Debug, Clone)]
pub struct ClassicalMeasurement {
    base: Obj,
    labels: Vec<Tuple>,
}

impl ClassicalMeasurement {
    pub fn new(base: Obj, labels: Vec<Tuple>) -> Result<ClassicalMeasurement, Error> {
        if labels.len() != base.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for base of size {}",
                labels.len(),
                base.dim()
            )));
        }
        Ok(ClassicalMeasurement { base, labels })
    }

    pub fn base(&self) -> &Obj {
        &self.base
    }

    pub fn label(&self, x: usize) -> &Tuple {
        &self.labels[x]
    }

    /// Distinct outcome labels in first-occurrence order.
    pub fn outcomes(&self) -> Vec<Tuple> {
        let mut seen = Vec::new();
        for l in &self.labels {
            if !seen.contains(l) {
                seen.push(l.clone());
            }
        }
        seen
    }
}

/// ev(s, m)(o) = Σ_{m(x)=o} s(x): the pushforward distribution on outcomes.
pub fn classical_evaluate(
    s: &ClassicalState,
    m: &ClassicalMeasurement,
) -> Result<OutcomeDistribution, Error> {
    if s.base != m.base {
        return Err(Error::BaseMismatch(s.base.describe(), m.base.describe()));
    }
    let mut weights: BTreeMap<Tuple, BigRational> = BTreeMap::new();
    for (x, w) in s.weights.iter().enumerate() {
        *weights
            .entry(m.labels[x].clone())
            .or_insert_with(BigRational::zero) += w;
    }
    let inst = SemiringInstance::rational();
    Ok(OutcomeDistribution::new(
        inst,
        weights
            .into_iter()
            .map(|(o, w)| (o, Scalar::Rational(w)))
            .collect(),
    ))
}

/// f_*(s)(y) = Σ_{f(x)=y} s(x) for a deterministic f given by an index table.
pub fn classical_pushforward(
    f: &[usize],
    cod: Obj,
    s: &ClassicalState,
) -> Result<ClassicalState, Error> {
    if f.len() != s.base.dim() || f.iter().any(|&y| y >= cod.dim()) {
        return Err(Error::ShapeMismatch("function table out of range".into()));
    }
    let mut weights = vec![BigRational::zero(); cod.dim()];
    for (x, w) in s.weights.iter().enumerate() {
        weights[f[x]] += w;
    }
    ClassicalState::new(cod, weights, s.variant)
}

/// m ↦ m∘f: pull a random variable on the codomain back along f.
pub fn pullback_measurement(
    f: &[usize],
    dom: Obj,
    m: &ClassicalMeasurement,
) -> Result<ClassicalMeasurement, Error> {
    if f.len() != dom.dim() || f.iter().any(|&y| y >= m.base.dim()) {
        return Err(Error::ShapeMismatch("function table out of range".into()));
    }
    let labels = f.iter().map(|&y| m.labels[y].clone()).collect();
    ClassicalMeasurement::new(dom, labels)
}

/// The global-assignment encoding X = O^M for a multipartite scenario:
/// M is the disjoint union of the per-site setting lists and X is the set of
/// all functions M → O′.
///
/// The enumeration order is part of the contract. M is ordered round-robin
/// over sites by setting index (site 1 setting 1, site 2 setting 1, …, site 1
/// setting 2, …), and assignments are enumerated in mixed radix over the
/// outcome alphabet with the first member of M most significant.
#[derive(Debug, Clone)]
pub struct GlobalEncoding {
    site_settings: Vec<Vec<String>>,
    outcomes: Vec<String>,
    order: Vec<(usize, usize)>, // (site, setting index) per member of M
    object: Obj,
}

impl GlobalEncoding {
    pub fn new(site_settings: &[Vec<String>], outcomes: &[String]) -> Result<GlobalEncoding, Error> {
        if site_settings.is_empty() || site_settings.iter().any(|s| s.is_empty()) {
            return Err(Error::EmptyInput("site setting lists"));
        }
        if outcomes.is_empty() {
            return Err(Error::EmptyInput("outcome alphabet"));
        }
        let max_settings = site_settings.iter().map(|s| s.len()).max().unwrap();
        let mut order = Vec::new();
        for setting in 0..max_settings {
            for (site, settings) in site_settings.iter().enumerate() {
                if setting < settings.len() {
                    order.push((site, setting));
                }
            }
        }
        let k = outcomes.len();
        let total = k.checked_pow(order.len() as u32).ok_or_else(|| {
            Error::ShapeMismatch("assignment space too large".into())
        })?;
        let elems = (0..total)
            .map(|x| {
                let digits = Self::digits_of(x, k, order.len());
                Tuple(digits.iter().map(|&d| outcomes[d].clone()).collect())
            })
            .collect();
        Ok(GlobalEncoding {
            site_settings: site_settings.to_vec(),
            outcomes: outcomes.to_vec(),
            order,
            object: Obj::from_tuples(elems),
        })
    }

    fn digits_of(mut x: usize, radix: usize, len: usize) -> Vec<usize> {
        let mut digits = vec![0; len];
        for d in (0..len).rev() {
            digits[d] = x % radix;
            x /= radix;
        }
        digits
    }

    /// The object X = O^M of global assignments.
    pub fn object(&self) -> &Obj {
        &self.object
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn site_settings(&self) -> &[Vec<String>] {
        &self.site_settings
    }

    /// The ordered members of M as (site, setting index) pairs.
    pub fn measurement_order(&self) -> &[(usize, usize)] {
        &self.order
    }

    /// The outcome-index digits of assignment `x`, aligned with
    /// `measurement_order`.
    pub fn assignment(&self, x: usize) -> Vec<usize> {
        Self::digits_of(x, self.outcomes.len(), self.order.len())
    }

    /// m̂ for a global setting choice (one setting index per site):
    /// x ↦ (x(m₁), …, x(mₙ)), with outcome tuples in site order.
    pub fn m_hat(&self, choice: &[usize]) -> Result<ClassicalMeasurement, Error> {
        if choice.len() != self.site_settings.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} setting choices for {} sites",
                choice.len(),
                self.site_settings.len()
            )));
        }
        let positions = choice
            .iter()
            .enumerate()
            .map(|(site, &setting)| {
                if setting >= self.site_settings[site].len() {
                    return Err(Error::ShapeMismatch(format!(
                        "setting index {setting} out of range for site {site}"
                    )));
                }
                Ok(self
                    .order
                    .iter()
                    .position(|&(s, m)| (s, m) == (site, setting))
                    .expect("order covers all settings"))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let labels = (0..self.object.dim())
            .map(|x| {
                let digits = self.assignment(x);
                Tuple(
                    positions
                        .iter()
                        .map(|&p| self.outcomes[digits[p]].clone())
                        .collect(),
                )
            })
            .collect();
        ClassicalMeasurement::new(self.object.clone(), labels)
    }
}
