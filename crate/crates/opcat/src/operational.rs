//! The canonical operational representation over Mat(S): states, projective
//! measurements, dagger-iso transformations, and the evaluation rule
//! o ↦ Tr(s ∘ P_o).

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::Error;
use crate::matcat::{Mor, Obj};
use crate::semiring::{Scalar, SemiringInstance};
use crate::tuple::Tuple;

/// A positive trace-1 endomorphism, optionally with a purity witness
/// ψ : I → A such that the matrix is ψ∘ψ†.
#[derive(Debug, Clone)]
pub struct State {
    matrix: Mor,
    purity: Option<Mor>,
}

impl State {
    /// Validate an arbitrary endomorphism as a state: positivity (by the
    /// instance-dispatched criterion) and unit trace.
    pub fn new(matrix: Mor) -> Result<State, Error> {
        if !matrix.is_endo() {
            return Err(Error::InvalidState("matrix must be an endomorphism".into()));
        }
        if !matrix.is_positive() {
            return Err(Error::InvalidState("matrix is not positive".into()));
        }
        Self::check_trace(&matrix)?;
        Ok(State {
            matrix,
            purity: None,
        })
    }

    /// ψ∘ψ† for a unit-norm ψ : I → A; keeps ψ as the purity witness.
    pub fn from_pure(psi: &Mor) -> Result<State, Error> {
        if !psi.dom().is_unit() {
            return Err(Error::InvalidState("pure state must have domain I".into()));
        }
        let inst = psi.instance();
        let norm = psi.dagger().compose(psi)?;
        if !inst.is_one(norm.get(0, 0)) {
            return Err(Error::InvalidState(format!(
                "ψ†∘ψ = {}, expected 1",
                inst.scalar_string(norm.get(0, 0))
            )));
        }
        let matrix = psi.compose(&psi.dagger())?;
        Ok(State {
            matrix,
            purity: Some(psi.clone()),
        })
    }

    /// g†∘g for any g with unit trace: positive by construction, so this
    /// accepts mixed states the positivity criterion cannot certify (the
    /// lattice rule is only sufficient).
    pub fn from_witness(g: &Mor) -> Result<State, Error> {
        let matrix = g.dagger().compose(g)?;
        Self::check_trace(&matrix)?;
        Ok(State {
            matrix,
            purity: None,
        })
    }

    fn check_trace(matrix: &Mor) -> Result<(), Error> {
        let tr = matrix.trace()?;
        if !matrix.instance().is_one(&tr) {
            return Err(Error::InvalidState(format!(
                "trace = {}, expected 1",
                matrix.instance().scalar_string(&tr)
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &Mor {
        &self.matrix
    }

    pub fn object(&self) -> &Obj {
        self.matrix.dom()
    }

    pub fn instance(&self) -> &SemiringInstance {
        self.matrix.instance()
    }

    pub fn purity_witness(&self) -> Option<&Mor> {
        self.purity.as_ref()
    }
}

/// A finite family of pairwise-disjoint complete projectors labelled by
/// outcomes.
#[derive(Debug, Clone)]
pub struct Measurement {
    outcomes: Vec<Tuple>,
    projectors: Vec<Mor>,
}

/// Violations found by [`validate_measurement`]; empty means valid.
#[derive(Debug, Default)]
pub struct MeasurementReport {
    pub violations: Vec<String>,
}

impl MeasurementReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check idempotence, self-adjointness, pairwise disjointness, and the
/// instance-specific completeness criterion: Σ P_o = 1 for field instances,
/// diagonal disjoint cover for lattice-like instances. Joint monicity itself
/// is never tested; these criteria replace it.
pub fn validate_measurement(outcomes: &[Tuple], projectors: &[Mor]) -> MeasurementReport {
    let mut report = MeasurementReport::default();
    let mut fail = |msg: String| report.violations.push(msg);
    if outcomes.len() != projectors.len() {
        fail(format!(
            "{} outcomes but {} projectors",
            outcomes.len(),
            projectors.len()
        ));
        return report;
    }
    if projectors.is_empty() {
        fail("measurement must have at least one outcome".into());
        return report;
    }
    {
        let mut seen = std::collections::HashSet::new();
        for o in outcomes {
            if !seen.insert(o) {
                fail(format!("duplicate outcome label {o}"));
            }
        }
    }
    let object = projectors[0].dom().clone();
    let inst = projectors[0].instance().clone();
    for (o, p) in outcomes.iter().zip(projectors) {
        if p.dom() != &object || p.cod() != &object {
            fail(format!("projector {o} is not an endomorphism of {}", object.describe()));
            return report;
        }
        if p.instance() != &inst {
            fail(format!("projector {o} has a different semiring instance"));
            return report;
        }
        let sq = p.compose(p).expect("endomorphism");
        if !sq.equals(p) {
            fail(format!("projector {o} is not idempotent"));
        }
        if !p.dagger().equals(p) {
            fail(format!("projector {o} is not self-adjoint"));
        }
    }
    for i in 0..projectors.len() {
        for j in 0..projectors.len() {
            if i != j {
                let prod = projectors[i].compose(&projectors[j]).expect("endomorphism");
                let zero = Mor::zero(&inst, &object, &object);
                if !prod.equals(&zero) {
                    fail(format!(
                        "projectors {} and {} are not disjoint",
                        outcomes[i], outcomes[j]
                    ));
                }
            }
        }
    }
    if inst.is_field() {
        let mut sum = Mor::zero(&inst, &object, &object);
        for p in projectors {
            sum = sum.add(p).expect("shapes match");
        }
        if !sum.equals(&Mor::identity(&inst, &object)) {
            fail("incomplete: projector sum is not the identity".into());
        }
    } else if inst.is_lattice_like() {
        // Rel(Ω) measurements are families of sub-identities Δ_S with {S}
        // a disjoint cover.
        for (o, p) in outcomes.iter().zip(projectors) {
            for r in 0..object.dim() {
                for c in 0..object.dim() {
                    if r != c && !inst.is_zero(p.get(r, c)) {
                        fail(format!("projector {o} is not a sub-identity Δ_S"));
                    }
                }
            }
        }
        for x in 0..object.dim() {
            let mut join = inst.zero();
            for p in projectors {
                join = inst.add(&join, p.get(x, x));
            }
            if !inst.is_one(&join) {
                fail(format!(
                    "incomplete: join of S_o({}) = {} ≠ ⊤",
                    object.elems()[x],
                    inst.scalar_string(&join)
                ));
            }
        }
    } else {
        fail(format!(
            "no completeness rule for instance {}",
            inst.kind().name()
        ));
    }
    report
}

impl Measurement {
    pub fn new(outcomes: Vec<Tuple>, projectors: Vec<Mor>) -> Result<Measurement, Error> {
        let report = validate_measurement(&outcomes, &projectors);
        if !report.passed() {
            return Err(Error::InvalidMeasurement(report.violations.join("; ")));
        }
        Ok(Measurement {
            outcomes,
            projectors,
        })
    }

    /// The basis measurement: one rank-1 projector per element label.
    pub fn basis(instance: &SemiringInstance, obj: &Obj) -> Measurement {
        let projectors = (0..obj.dim())
            .map(|i| {
                let one = instance.one();
                let zero = instance.zero();
                Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
                    if r == i && c == i {
                        one.clone()
                    } else {
                        zero.clone()
                    }
                })
            })
            .collect();
        Measurement {
            outcomes: obj.elems().to_vec(),
            projectors,
        }
    }

    pub fn object(&self) -> &Obj {
        self.projectors[0].dom()
    }

    pub fn instance(&self) -> &SemiringInstance {
        self.projectors[0].instance()
    }

    pub fn outcomes(&self) -> &[Tuple] {
        &self.outcomes
    }

    pub fn projectors(&self) -> &[Mor] {
        &self.projectors
    }

    pub fn projector_for(&self, outcome: &Tuple) -> Option<&Mor> {
        self.outcomes
            .iter()
            .position(|o| o == outcome)
            .map(|i| &self.projectors[i])
    }
}

/// A finite-support map from outcome labels to scalar weights; outcomes off
/// the support carry weight 0.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    instance: SemiringInstance,
    weights: BTreeMap<Tuple, Scalar>,
}

impl OutcomeDistribution {
    pub fn new(instance: SemiringInstance, weights: BTreeMap<Tuple, Scalar>) -> OutcomeDistribution {
        OutcomeDistribution { instance, weights }
    }

    pub fn instance(&self) -> &SemiringInstance {
        &self.instance
    }

    pub fn weight(&self, outcome: &Tuple) -> Scalar {
        self.weights
            .get(outcome)
            .cloned()
            .unwrap_or_else(|| self.instance.zero())
    }

    pub fn support(&self) -> impl Iterator<Item = (&Tuple, &Scalar)> {
        self.weights.iter()
    }

    /// Scalar sum (lattice: join) over the support.
    pub fn total(&self) -> Scalar {
        self.weights
            .values()
            .fold(self.instance.zero(), |acc, w| self.instance.add(&acc, w))
    }

    /// Eq. 3: the total equals 1 (join = ⊤ for lattice-like instances).
    pub fn is_normalized(&self) -> bool {
        self.instance.is_one(&self.total())
    }

    pub fn equals(&self, other: &OutcomeDistribution) -> bool {
        let keys: std::collections::BTreeSet<&Tuple> =
            self.weights.keys().chain(other.weights.keys()).collect();
        keys.into_iter()
            .all(|k| self.instance.eq(&self.weight(k), &other.weight(k)))
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (o, w) in &self.weights {
            map.insert(o.to_string(), self.instance.scalar_to_json(w));
        }
        Value::Object(map)
    }
}

/// The evaluation rule: o ↦ Tr(s ∘ P_o) on the declared outcomes, zero
/// elsewhere.
pub fn evaluate(s: &State, m: &Measurement) -> Result<OutcomeDistribution, Error> {
    if s.object() != m.object() {
        return Err(Error::ObjectMismatch(
            s.object().describe(),
            m.object().describe(),
        ));
    }
    let inst = s.instance().clone();
    let mut weights = BTreeMap::new();
    for (o, p) in m.outcomes.iter().zip(&m.projectors) {
        let w = s.matrix().compose(p)?.trace()?;
        weights.insert(o.clone(), w);
    }
    Ok(OutcomeDistribution { instance: inst, weights })
}

/// An admissible transformation: a dagger-isomorphism.
#[derive(Debug, Clone)]
pub struct Transformation {
    matrix: Mor,
}

impl Transformation {
    pub fn new(matrix: Mor) -> Result<Transformation, Error> {
        if !matrix.is_dagger_iso() {
            return Err(Error::NotDaggerIso);
        }
        Ok(Transformation { matrix })
    }

    pub fn matrix(&self) -> &Mor {
        &self.matrix
    }

    pub fn compose(&self, other: &Transformation) -> Result<Transformation, Error> {
        Ok(Transformation {
            matrix: self.matrix.compose(&other.matrix)?,
        })
    }
}

/// f_* : s ↦ f∘s∘f†. Purity witnesses transport as ψ ↦ f∘ψ.
pub fn transform_state(f: &Transformation, s: &State) -> Result<State, Error> {
    if f.matrix.dom() != s.object() {
        return Err(Error::ObjectMismatch(
            f.matrix.dom().describe(),
            s.object().describe(),
        ));
    }
    let matrix = f.matrix.compose(s.matrix())?.compose(&f.matrix.dagger())?;
    let purity = match &s.purity {
        Some(psi) => Some(f.matrix.compose(psi)?),
        None => None,
    };
    Ok(State { matrix, purity })
}

/// f^* : P_o ↦ f†∘P_o∘f, pulling a measurement on cod(f) back to dom(f).
pub fn transform_measurement(f: &Transformation, m: &Measurement) -> Result<Measurement, Error> {
    if f.matrix.cod() != m.object() {
        return Err(Error::ObjectMismatch(
            f.matrix.cod().describe(),
            m.object().describe(),
        ));
    }
    let projectors = m
        .projectors
        .iter()
        .map(|p| f.matrix.dagger().compose(p)?.compose(&f.matrix))
        .collect::<Result<Vec<_>, _>>()?;
    Measurement::new(m.outcomes.clone(), projectors)
}

/// Inclusion of pure tensors on states: Kronecker product.
pub fn tensor_state(s: &State, t: &State) -> Result<State, Error> {
    let matrix = s.matrix().tensor(t.matrix())?;
    let purity = match (&s.purity, &t.purity) {
        (Some(a), Some(b)) => Some(a.tensor(b)?),
        _ => None,
    };
    Ok(State { matrix, purity })
}

/// Inclusion of pure tensors on measurements: pairwise Kronecker products
/// with tuple-concatenated outcome labels.
pub fn tensor_measurement(m: &Measurement, m2: &Measurement) -> Result<Measurement, Error> {
    let mut outcomes = Vec::new();
    let mut projectors = Vec::new();
    for (o, p) in m.outcomes.iter().zip(&m.projectors) {
        for (o2, p2) in m2.outcomes.iter().zip(&m2.projectors) {
            outcomes.push(o.concat(o2));
            projectors.push(p.tensor(p2)?);
        }
    }
    Measurement::new(outcomes, projectors)
}

/// Extensional equivalence of states: equal diagonals for lattice-like
/// instances (sub-identity measurements only see the diagonal), matrix
/// equality for field instances (rank-1 projectors separate Hermitian
/// matrices).
pub fn state_equivalence(s: &State, t: &State) -> Result<bool, Error> {
    if s.object() != t.object() {
        return Err(Error::ObjectMismatch(
            s.object().describe(),
            t.object().describe(),
        ));
    }
    if s.instance() != t.instance() {
        return Err(Error::InstanceMismatch(
            s.instance().to_string(),
            t.instance().to_string(),
        ));
    }
    let inst = s.instance();
    if inst.is_lattice_like() {
        Ok((0..s.object().dim())
            .all(|i| inst.eq(s.matrix().get(i, i), t.matrix().get(i, i))))
    } else {
        Ok(s.matrix().equals(t.matrix()))
    }
}

/// State / measurement literals: the matcat matrix format plus outcome
/// labels.
pub fn measurement_to_json(m: &Measurement) -> Value {
    json!({
        "outcomes": m.outcomes.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        "projectors": m.projectors.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
    })
}

pub fn measurement_from_json(instance: &SemiringInstance, obj: &Obj, v: &Value) -> Result<Measurement, Error> {
    let outcomes = v
        .get("outcomes")
        .and_then(|o| o.as_array())
        .ok_or_else(|| Error::Schema {
            path: "outcomes".into(),
            message: "expected outcome label array".into(),
        })?
        .iter()
        .map(|o| {
            o.as_str()
                .map(|s| s.parse::<Tuple>().unwrap())
                .ok_or_else(|| Error::Schema {
                    path: "outcomes".into(),
                    message: "labels must be strings".into(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let projectors = v
        .get("projectors")
        .and_then(|p| p.as_array())
        .ok_or_else(|| Error::Schema {
            path: "projectors".into(),
            message: "expected projector array".into(),
        })?
        .iter()
        .map(|p| {
            let mut m = Mor::from_json_with_instance(instance, p)?;
            // Projector literals may omit dom/cod; rebuild on the site object.
            if m.dom().dim() == obj.dim() && m.dom() != obj {
                let rows = (0..m.cod().dim())
                    .map(|r| (0..m.dom().dim()).map(|c| m.get(r, c).clone()).collect())
                    .collect();
                m = Mor::from_rows(instance, obj.clone(), obj.clone(), rows)?;
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Measurement::new(outcomes, projectors)
}
