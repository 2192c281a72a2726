//! Rel(Ω)-specific constructions: Ω-subsets, sub-identities Δ_S, disjoint
//! covers, state domains, and purification.

use serde_json::{json, Value};

use crate::error::Error;
use crate::matcat::{Mor, Obj};
use crate::operational::{Measurement, State};
use crate::semiring::{Scalar, SemiringInstance};
use crate::tuple::Tuple;

/// A function X → Ω, stored in the element order of the base object.
#[derive(Debug, Clone)]
pub struct OmegaSubset {
    base: Obj,
    instance: SemiringInstance,
    values: Vec<Scalar>,
}

impl OmegaSubset {
    pub fn new(
        base: Obj,
        instance: SemiringInstance,
        values: Vec<Scalar>,
    ) -> Result<OmegaSubset, Error> {
        if !instance.is_lattice_like() {
            return Err(Error::NotLatticeInstance(instance.to_string()));
        }
        if values.len() != base.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for base of size {}",
                values.len(),
                base.dim()
            )));
        }
        Ok(OmegaSubset {
            base,
            instance,
            values,
        })
    }

    /// ⊤_X: constantly ⊤.
    pub fn top(base: Obj, instance: SemiringInstance) -> OmegaSubset {
        let one = instance.one();
        let values = vec![one; base.dim()];
        OmegaSubset {
            base,
            instance,
            values,
        }
    }

    /// ∅_X: constantly ⊥.
    pub fn empty(base: Obj, instance: SemiringInstance) -> OmegaSubset {
        let zero = instance.zero();
        let values = vec![zero; base.dim()];
        OmegaSubset {
            base,
            instance,
            values,
        }
    }

    pub fn base(&self) -> &Obj {
        &self.base
    }

    pub fn instance(&self) -> &SemiringInstance {
        &self.instance
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Scalar {
        &self.values[i]
    }

    /// Pointwise meet.
    pub fn meet(&self, other: &OmegaSubset) -> Result<OmegaSubset, Error> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.instance.mul(a, b))
            .collect();
        Ok(OmegaSubset {
            base: self.base.clone(),
            instance: self.instance.clone(),
            values,
        })
    }

    /// Pointwise join.
    pub fn join(&self, other: &OmegaSubset) -> Result<OmegaSubset, Error> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.instance.add(a, b))
            .collect();
        Ok(OmegaSubset {
            base: self.base.clone(),
            instance: self.instance.clone(),
            values,
        })
    }

    pub fn is_empty_subset(&self) -> bool {
        self.values.iter().all(|v| self.instance.is_zero(v))
    }

    pub fn is_top_subset(&self) -> bool {
        self.values.iter().all(|v| self.instance.is_one(v))
    }

    /// ⋁_x S(x): the unit-norm criterion for the column S : I → X.
    pub fn total_join(&self) -> Scalar {
        self.values
            .iter()
            .fold(self.instance.zero(), |acc, v| self.instance.add(&acc, v))
    }

    pub fn equals(&self, other: &OmegaSubset) -> bool {
        self.base == other.base
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| self.instance.eq(a, b))
    }

    fn check_compatible(&self, other: &OmegaSubset) -> Result<(), Error> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(
                self.base.describe(),
                other.base.describe(),
            ));
        }
        if self.instance != other.instance {
            return Err(Error::InstanceMismatch(
                self.instance.to_string(),
                other.instance.to_string(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut values = serde_json::Map::new();
        for (e, v) in self.base.elems().iter().zip(&self.values) {
            values.insert(e.to_string(), self.instance.scalar_to_json(v));
        }
        json!({ "base": self.base.label_strings(), "values": values })
    }

    pub fn from_json(instance: &SemiringInstance, v: &Value) -> Result<OmegaSubset, Error> {
        let base_labels = v
            .get("base")
            .and_then(|b| b.as_array())
            .ok_or_else(|| Error::Schema {
                path: "base".into(),
                message: "expected label array".into(),
            })?
            .iter()
            .map(|l| {
                l.as_str().map(str::to_string).ok_or_else(|| Error::Schema {
                    path: "base".into(),
                    message: "labels must be strings".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        // Labels like "(x0,y0)" are element tuples of a product base.
        let base = Obj::from_tuples(
            base_labels
                .iter()
                .map(|l| l.parse::<Tuple>().unwrap())
                .collect(),
        );
        let values_obj = v
            .get("values")
            .and_then(|w| w.as_object())
            .ok_or_else(|| Error::Schema {
                path: "values".into(),
                message: "expected object mapping element to lattice value".into(),
            })?;
        let values = base_labels
            .iter()
            .map(|l| {
                let raw = values_obj.get(l).ok_or_else(|| Error::Schema {
                    path: format!("values.{l}"),
                    message: "missing element".into(),
                })?;
                instance.scalar_from_json(raw)
            })
            .collect::<Result<Vec<_>, _>>()?;
        OmegaSubset::new(base, instance.clone(), values)
    }
}

/// An ordered family of Ω-subsets over one base set with outcome labels,
/// required to be pairwise disjoint and to join to ⊤_X.
#[derive(Debug, Clone)]
pub struct DisjointCover {
    outcomes: Vec<Tuple>,
    subsets: Vec<OmegaSubset>,
}

impl DisjointCover {
    pub fn new(outcomes: Vec<Tuple>, subsets: Vec<OmegaSubset>) -> Result<DisjointCover, Error> {
        if subsets.is_empty() {
            return Err(Error::EmptyInput("cover"));
        }
        if outcomes.len() != subsets.len() {
            return Err(Error::CoverViolation(format!(
                "{} outcomes for {} subsets",
                outcomes.len(),
                subsets.len()
            )));
        }
        let first = &subsets[0];
        let inst = first.instance().clone();
        for s in &subsets[1..] {
            first.check_compatible(s)?;
        }
        for i in 0..subsets.len() {
            for j in i + 1..subsets.len() {
                let meet = subsets[i].meet(&subsets[j])?;
                if let Some(x) = meet
                    .values()
                    .iter()
                    .position(|v| !inst.is_zero(v))
                {
                    return Err(Error::CoverViolation(format!(
                        "{} ∧ {} ≠ ∅ at element {} (value {})",
                        outcomes[i],
                        outcomes[j],
                        first.base().elems()[x],
                        inst.scalar_string(meet.value(x))
                    )));
                }
            }
        }
        for x in 0..first.base().dim() {
            let join = subsets
                .iter()
                .fold(inst.zero(), |acc, s| inst.add(&acc, s.value(x)));
            if !inst.is_one(&join) {
                return Err(Error::CoverViolation(format!(
                    "join at element {} is {} ≠ ⊤",
                    first.base().elems()[x],
                    inst.scalar_string(&join)
                )));
            }
        }
        Ok(DisjointCover { outcomes, subsets })
    }

    pub fn base(&self) -> &Obj {
        self.subsets[0].base()
    }

    pub fn outcomes(&self) -> &[Tuple] {
        &self.outcomes
    }

    pub fn subsets(&self) -> &[OmegaSubset] {
        &self.subsets
    }
}

/// Δ_S: the sub-identity with S on the diagonal.
pub fn delta(s: &OmegaSubset) -> Mor {
    let inst = s.instance().clone();
    let values = s.values().to_vec();
    Mor::from_fn(&inst, s.base().clone(), s.base().clone(), |r, c| {
        if r == c {
            values[r].clone()
        } else {
            inst.zero()
        }
    })
}

/// The projective measurement {Δ_{S_o}} of a disjoint cover.
pub fn measurement_from_cover(cover: &DisjointCover) -> Result<Measurement, Error> {
    let projectors = cover.subsets().iter().map(delta).collect();
    Measurement::new(cover.outcomes().to_vec(), projectors)
}

/// dom(s): the Ω-subset x ↦ [x s x] read off the diagonal.
pub fn dom(s: &State) -> Result<OmegaSubset, Error> {
    let inst = s.instance().clone();
    if !inst.is_lattice_like() {
        return Err(Error::NotLatticeInstance(inst.to_string()));
    }
    let values = (0..s.object().dim())
        .map(|i| s.matrix().get(i, i).clone())
        .collect();
    OmegaSubset::new(s.object().clone(), inst, values)
}

/// purify(s) = P_{dom(s)}: an equivalent pure state (equal diagonal, hence
/// the same outcome weights on every cover measurement).
pub fn purify(s: &State) -> Result<State, Error> {
    let d = dom(s)?;
    let inst = d.instance().clone();
    let values = d.values().to_vec();
    let psi = Mor::from_fn(&inst, Obj::unit(), d.base().clone(), |r, _| values[r].clone());
    State::from_pure(&psi)
}
