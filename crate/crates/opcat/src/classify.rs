//! Locality and no-signalling classification: exact LP feasibility over
//! deterministic hidden variables, LHV verification, the Rel(Ω) hidden-
//! variable construction, Stoch and signed-Stoch realizations, and the
//! three-way verdict.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::Error;
use crate::lp::{self, FarkasCertificate, LpResult};
use crate::matcat::Obj;
use crate::operational::{Measurement, OutcomeDistribution, State};
use crate::rel::{measurement_from_cover, DisjointCover, OmegaSubset};
use crate::scenario::{
    empirical_from_operational, EmpiricalModel, Scenario, Site,
};
use crate::semiring::{Scalar, SemiringInstance};
use crate::stoch::{
    classical_evaluate, ClassicalState, GlobalEncoding, Variant,
};
use crate::tuple::Tuple;

/// A local hidden-variable model: a hidden set Λ with a fixed distribution d
/// and a response table q_λ per hidden value.
#[derive(Debug, Clone)]
pub struct LhvModel {
    instance: SemiringInstance,
    hidden: Vec<Tuple>,
    dist: Vec<Scalar>,
    responses: Vec<EmpiricalModel>,
}

impl LhvModel {
    pub fn new(
        instance: SemiringInstance,
        hidden: Vec<Tuple>,
        dist: Vec<Scalar>,
        responses: Vec<EmpiricalModel>,
    ) -> Result<LhvModel, Error> {
        if hidden.len() != dist.len() || hidden.len() != responses.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} hidden values, {} weights, {} response tables",
                hidden.len(),
                dist.len(),
                responses.len()
            )));
        }
        if hidden.is_empty() {
            return Err(Error::EmptyInput("hidden set"));
        }
        Ok(LhvModel {
            instance,
            hidden,
            dist,
            responses,
        })
    }

    pub fn instance(&self) -> &SemiringInstance {
        &self.instance
    }

    pub fn hidden(&self) -> &[Tuple] {
        &self.hidden
    }

    pub fn dist(&self) -> &[Scalar] {
        &self.dist
    }

    pub fn responses(&self) -> &[EmpiricalModel] {
        &self.responses
    }

    /// The table Σ_λ q_λ(o|m)·d(λ) (join of meets for lattices).
    pub fn mixture(&self, scenario: &Scenario) -> Result<EmpiricalModel, Error> {
        let inst = &self.instance;
        let mut table = BTreeMap::new();
        for m in scenario.setting_tuples() {
            let mut weights = BTreeMap::new();
            for o in scenario.outcome_tuples() {
                let mut acc = inst.zero();
                for (d, q) in self.dist.iter().zip(&self.responses) {
                    acc = inst.add(&acc, &inst.mul(&q.probability(&m, &o), d));
                }
                weights.insert(scenario.outcome_label(&o), acc);
            }
            table.insert(
                scenario.setting_label(&m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        EmpiricalModel::new(scenario.clone(), inst.clone(), table)
    }

    pub fn to_json(&self, scenario: &Scenario) -> Value {
        let mut dist = serde_json::Map::new();
        let mut responses = serde_json::Map::new();
        for ((l, d), q) in self.hidden.iter().zip(&self.dist).zip(&self.responses) {
            dist.insert(l.to_string(), self.instance.scalar_to_json(d));
            let mut table = serde_json::Map::new();
            for m in scenario.setting_tuples() {
                let mut row = serde_json::Map::new();
                for o in scenario.outcome_tuples() {
                    row.insert(
                        scenario.outcome_label(&o).to_string(),
                        self.instance.scalar_to_json(&q.probability(&m, &o)),
                    );
                }
                table.insert(scenario.setting_label(&m).to_string(), Value::Object(row));
            }
            responses.insert(l.to_string(), Value::Object(table));
        }
        json!({
            "hidden": self.hidden.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "dist": dist,
            "responses": responses,
        })
    }
}

/// The outcome of the exact locality decision.
#[derive(Debug, Clone)]
pub enum LocalDecision {
    Local(LhvModel),
    Nonlocal(FarkasCertificate),
}

/// A signed global-assignment state reproducing the model via the
/// assignment encoding.
#[derive(Debug, Clone)]
pub struct SignedRealization {
    pub state: ClassicalState,
}

#[derive(Debug, Clone)]
pub enum SignedDecision {
    Realizable(SignedRealization),
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Local,
    NoSignallingNonlocal,
    Signalling,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Local => "Local",
            Verdict::NoSignallingNonlocal => "NoSignallingNonlocal",
            Verdict::Signalling => "Signalling",
        }
    }
}

/// The verdict together with the evidence backing it.
#[derive(Debug, Clone)]
pub enum Classification {
    Local {
        lhv: LhvModel,
        state: ClassicalState,
    },
    NoSignallingNonlocal {
        farkas: FarkasCertificate,
        signed: SignedRealization,
    },
    Signalling {
        farkas: FarkasCertificate,
    },
}

impl Classification {
    pub fn verdict(&self) -> Verdict {
        match self {
            Classification::Local { .. } => Verdict::Local,
            Classification::NoSignallingNonlocal { .. } => Verdict::NoSignallingNonlocal,
            Classification::Signalling { .. } => Verdict::Signalling,
        }
    }
}

/// The assignment encoding for a scenario: per-site setting lists with the
/// union of outcome alphabets.
pub fn encoding_for(scenario: &Scenario) -> Result<GlobalEncoding, Error> {
    let site_settings: Vec<Vec<String>> = scenario
        .sites()
        .iter()
        .map(|s| s.settings.clone())
        .collect();
    let mut outcomes: Vec<String> = Vec::new();
    for s in scenario.sites() {
        for o in &s.outcomes {
            if !outcomes.contains(o) {
                outcomes.push(o.clone());
            }
        }
    }
    GlobalEncoding::new(&site_settings, &outcomes)
}

fn require_rational(e: &EmpiricalModel) -> Result<(), Error> {
    for m in e.scenario().setting_tuples() {
        for o in e.scenario().outcome_tuples() {
            if e.probability(&m, &o).as_rational().is_none() {
                return Err(Error::NonRationalTable(format!(
                    "weight at {} {} is not rational",
                    e.scenario().setting_label(&m),
                    e.scenario().outcome_label(&o)
                )));
            }
        }
    }
    Ok(())
}

/// The linear system shared by the Stoch and LHV formulations: one variable
/// per global assignment, one equation per table cell plus normalization.
fn lhv_system(
    e: &EmpiricalModel,
    encoding: &GlobalEncoding,
) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>), Error> {
    let scenario = e.scenario();
    let n = encoding.object().dim();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for m in scenario.setting_tuples() {
        let m_hat = encoding.m_hat(&m)?;
        for o in scenario.outcome_tuples() {
            let label = scenario.outcome_label(&o);
            let row = (0..n)
                .map(|x| {
                    if m_hat.label(x) == &label {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect();
            a.push(row);
            b.push(
                e.probability(&m, &o)
                    .as_rational()
                    .expect("rationality checked")
                    .clone(),
            );
        }
    }
    a.push(vec![BigRational::one(); n]);
    b.push(BigRational::one());
    Ok((a, b))
}

/// Build the LHV model induced by a nonnegative assignment distribution:
/// hidden values are the support assignments, responses are deterministic.
fn lhv_from_distribution(
    e: &EmpiricalModel,
    encoding: &GlobalEncoding,
    d: &[BigRational],
) -> Result<LhvModel, Error> {
    let scenario = e.scenario();
    let inst = SemiringInstance::rational();
    let mut hidden = Vec::new();
    let mut dist = Vec::new();
    let mut responses = Vec::new();
    for (x, w) in d.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        hidden.push(encoding.object().elems()[x].clone());
        dist.push(Scalar::Rational(w.clone()));
        let mut table = BTreeMap::new();
        for m in scenario.setting_tuples() {
            let m_hat = encoding.m_hat(&m)?;
            let mut weights = BTreeMap::new();
            weights.insert(m_hat.label(x).clone(), Scalar::Rational(BigRational::one()));
            table.insert(
                scenario.setting_label(&m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        responses.push(EmpiricalModel::new(scenario.clone(), inst.clone(), table)?);
    }
    LhvModel::new(inst, hidden, dist, responses)
}

/// Decide locality exactly: enumerate deterministic vertices (global
/// assignments) and solve the feasibility LP. Every verdict carries
/// checkable evidence: a concrete LHV model, or a Farkas certificate.
pub fn decide_local(e: &EmpiricalModel) -> Result<LocalDecision, Error> {
    require_rational(e)?;
    let encoding = encoding_for(e.scenario())?;
    let (a, b) = lhv_system(e, &encoding)?;
    match lp::solve_equality_feasibility(&a, &b)? {
        LpResult::Feasible(d) => Ok(LocalDecision::Local(lhv_from_distribution(e, &encoding, &d)?)),
        LpResult::Infeasible(cert) => {
            debug_assert!(lp::verify_farkas(&a, &b, &cert.y));
            Ok(LocalDecision::Nonlocal(cert))
        }
    }
}

/// ε-relaxed locality for tables that came from floating point: each table
/// constraint Σ_x d(x)·[m̂(x)=o] = p may miss by at most ε on either side.
pub fn decide_local_relaxed(
    e: &EmpiricalModel,
    epsilon: &BigRational,
) -> Result<LocalDecision, Error> {
    require_rational(e)?;
    let encoding = encoding_for(e.scenario())?;
    let (a, b) = lhv_system(e, &encoding)?;
    let (a, b) = relax_system(&a, &b, encoding.object().dim(), epsilon);
    match lp::solve_equality_feasibility(&a, &b)? {
        LpResult::Feasible(d) => {
            let d = d[..encoding.object().dim()].to_vec();
            Ok(LocalDecision::Local(lhv_from_distribution(e, &encoding, &d)?))
        }
        LpResult::Infeasible(cert) => Ok(LocalDecision::Nonlocal(cert)),
    }
}

/// Add bounded surplus/deficit variables u, v with u, v ∈ [0, ε] to every
/// table row: A·d + u − v = b, u + su = ε, v + sv = ε. The normalization row
/// (the last one) stays exact.
fn relax_system(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    n: usize,
    epsilon: &BigRational,
) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let cells = a.len() - 1;
    let width = n + 4 * cells;
    let mut out_a: Vec<Vec<BigRational>> = Vec::new();
    let mut out_b = Vec::new();
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let mut r = vec![BigRational::zero(); width];
        r[..n].clone_from_slice(row);
        if i < cells {
            r[n + 4 * i] = BigRational::one(); // u
            r[n + 4 * i + 1] = -BigRational::one(); // v
        }
        out_a.push(r);
        out_b.push(rhs.clone());
    }
    for i in 0..cells {
        for (var, slack) in [(n + 4 * i, n + 4 * i + 2), (n + 4 * i + 1, n + 4 * i + 3)] {
            let mut r = vec![BigRational::zero(); width];
            r[var] = BigRational::one();
            r[slack] = BigRational::one();
            out_a.push(r);
            out_b.push(epsilon.clone());
        }
    }
    (out_a, out_b)
}

/// Report the first violated LHV condition, or Ok when the model verifies:
/// distribution validity, per-λ response validity, the locality (product /
/// meet) condition, and the mixture equation.
pub fn verify_lhv(e: &EmpiricalModel, h: &LhvModel) -> Result<(), String> {
    let inst = h.instance();
    let scenario = e.scenario();
    let total = h
        .dist()
        .iter()
        .fold(inst.zero(), |acc, d| inst.add(&acc, d));
    if !inst.is_one(&total) {
        return Err(format!(
            "hidden distribution sums to {}, expected 1",
            inst.scalar_string(&total)
        ));
    }
    let settings = scenario.setting_tuples();
    let outcomes = scenario.outcome_tuples();
    for (l, q) in h.hidden().iter().zip(h.responses()) {
        for m in &settings {
            if !q.distribution(m).is_normalized() {
                return Err(format!(
                    "response of λ={l} at m={} is not a distribution",
                    scenario.setting_label(m)
                ));
            }
        }
        // Site marginals must depend only on the site's own setting...
        let mut site_marginals: Vec<BTreeMap<(usize, usize), Scalar>> = Vec::new();
        for (site, s) in scenario.sites().iter().enumerate() {
            let mut per_setting = BTreeMap::new();
            for m in &settings {
                for oi in 0..s.outcomes.len() {
                    let mut acc = inst.zero();
                    for o in &outcomes {
                        if o[site] == oi {
                            acc = inst.add(&acc, &q.probability(m, o));
                        }
                    }
                    match per_setting.get(&(m[site], oi)) {
                        None => {
                            per_setting.insert((m[site], oi), acc);
                        }
                        Some(prev) => {
                            if !inst.eq(prev, &acc) {
                                return Err(format!(
                                    "λ={l}: site {} marginal at m={} depends on remote settings",
                                    s.name,
                                    scenario.setting_label(m)
                                ));
                            }
                        }
                    }
                }
            }
            site_marginals.push(per_setting);
        }
        // ...and the joint response must factor through them.
        for m in &settings {
            for o in &outcomes {
                let mut prod = inst.one();
                for (site, marg) in site_marginals.iter().enumerate() {
                    let factor = marg.get(&(m[site], o[site])).expect("computed above");
                    prod = inst.mul(&prod, factor);
                }
                if !inst.eq(&prod, &q.probability(m, o)) {
                    return Err(format!(
                        "λ={l}: response at m={} o={} is not a product of site marginals",
                        scenario.setting_label(m),
                        scenario.outcome_label(o)
                    ));
                }
            }
        }
    }
    let mixed = h.mixture(scenario).map_err(|err| err.to_string())?;
    for m in &settings {
        for o in &outcomes {
            let got = mixed.probability(m, o);
            let want = e.probability(m, o);
            if !inst.eq(&got, &want) {
                return Err(format!(
                    "mixture at m={} o={} gives {}, table says {}",
                    scenario.setting_label(m),
                    scenario.outcome_label(o),
                    inst.scalar_string(&got),
                    inst.scalar_string(&want)
                ));
            }
        }
    }
    Ok(())
}

/// The Rel(Ω) hidden-variable construction: hidden values are the points of
/// the product base, d = S, and q_x(o|m) = ⋀ᵢ S^i_{oᵢ}(xᵢ). The resulting
/// model always verifies and reproduces the table of the state P_S under the
/// cover measurements.
pub fn rel_lhv_construct(
    s: &OmegaSubset,
    site_covers: &[Vec<DisjointCover>],
) -> Result<(Scenario, LhvModel), Error> {
    let inst = s.instance().clone();
    if !inst.is_one(&s.total_join()) {
        return Err(Error::InvalidState(
            "⋁_x S(x) ≠ ⊤: the global section is not a state".into(),
        ));
    }
    if site_covers.is_empty() {
        return Err(Error::EmptyInput("site covers"));
    }
    // The base of S must be the product of the per-site bases.
    let mut product: Option<Obj> = None;
    for covers in site_covers {
        let base = covers
            .first()
            .ok_or(Error::EmptyInput("site covers"))?
            .base()
            .clone();
        for c in covers {
            if c.base() != &base {
                return Err(Error::BaseMismatch(
                    c.base().describe(),
                    base.describe(),
                ));
            }
        }
        product = Some(match product {
            None => base,
            Some(p) => p.tensor(&base),
        });
    }
    let product = product.expect("nonempty sites");
    if &product != s.base() {
        return Err(Error::BaseMismatch(
            product.describe(),
            s.base().describe(),
        ));
    }
    let sites = site_covers
        .iter()
        .enumerate()
        .map(|(i, covers)| {
            let mut outcomes: Vec<String> = Vec::new();
            for c in covers {
                for o in c.outcomes() {
                    let label = o.to_string();
                    if !outcomes.contains(&label) {
                        outcomes.push(label);
                    }
                }
            }
            Site {
                name: format!("site{}", i + 1),
                settings: (0..covers.len()).map(|m| format!("m{m}")).collect(),
                outcomes,
            }
        })
        .collect::<Vec<_>>();
    let scenario = Scenario::new(sites)?;
    let dims: Vec<usize> = site_covers
        .iter()
        .map(|covers| covers[0].base().dim())
        .collect();
    // Point x of the product base ↦ per-site indices (row-major, matching
    // the tensor flattening).
    let strides: Vec<usize> = {
        let mut s = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * dims[i + 1];
        }
        s
    };
    let mut hidden = Vec::new();
    let mut dist = Vec::new();
    let mut responses = Vec::new();
    for x in 0..s.base().dim() {
        hidden.push(s.base().elems()[x].clone());
        dist.push(s.value(x).clone());
        let xi: Vec<usize> = (0..dims.len()).map(|i| (x / strides[i]) % dims[i]).collect();
        let mut table = BTreeMap::new();
        for m in scenario.setting_tuples() {
            let mut weights = BTreeMap::new();
            for o in scenario.outcome_tuples() {
                let mut acc = inst.one();
                for (site, covers) in site_covers.iter().enumerate() {
                    let cover = &covers[m[site]];
                    let label = &scenario.sites()[site].outcomes[o[site]];
                    let v = match cover
                        .outcomes()
                        .iter()
                        .position(|co| &co.to_string() == label)
                    {
                        Some(idx) => cover.subsets()[idx].value(xi[site]).clone(),
                        None => inst.zero(),
                    };
                    acc = inst.mul(&acc, &v);
                }
                weights.insert(scenario.outcome_label(&o), acc);
            }
            table.insert(
                scenario.setting_label(&m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        responses.push(EmpiricalModel::new(scenario.clone(), inst.clone(), table)?);
    }
    let lhv = LhvModel::new(inst, hidden, dist, responses)?;
    Ok((scenario, lhv))
}

/// The Rel empirical model of the state P_S under the cover measurements,
/// for comparison with the constructed LHV mixture.
pub fn rel_empirical_model(
    s: &OmegaSubset,
    site_covers: &[Vec<DisjointCover>],
    scenario: &Scenario,
) -> Result<EmpiricalModel, Error> {
    let inst = s.instance().clone();
    let values = s.values().to_vec();
    let psi = crate::matcat::Mor::from_fn(&inst, Obj::unit(), s.base().clone(), |r, _| {
        values[r].clone()
    });
    let state = State::from_pure(&psi)?;
    let site_measurements = site_covers
        .iter()
        .zip(scenario.sites())
        .map(|(covers, site)| {
            covers
                .iter()
                .map(|c| {
                    let m = measurement_from_cover(c)?;
                    pad_measurement(m, site)
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    empirical_from_operational(scenario, &state, &site_measurements)
}

/// Extend a cover measurement with zero projectors for site outcomes its
/// cover does not mention, so outcome labels line up across settings.
fn pad_measurement(m: Measurement, site: &Site) -> Result<Measurement, Error> {
    let inst = m.instance().clone();
    let obj = m.object().clone();
    let mut outcomes = Vec::new();
    let mut projectors = Vec::new();
    for label in &site.outcomes {
        let t: Tuple = label.as_str().into();
        match m.projector_for(&t) {
            Some(p) => {
                outcomes.push(t);
                projectors.push(p.clone());
            }
            None => {
                outcomes.push(t);
                projectors.push(crate::matcat::Mor::zero(&inst, &obj, &obj));
            }
        }
    }
    Measurement::new(outcomes, projectors)
}

/// Find a nonnegative global-assignment distribution reproducing the model.
/// Shares its LP with `decide_local`, so feasibility coincides exactly.
pub fn stoch_realize(e: &EmpiricalModel) -> Result<Option<ClassicalState>, Error> {
    require_rational(e)?;
    let encoding = encoding_for(e.scenario())?;
    let (a, b) = lhv_system(e, &encoding)?;
    match lp::solve_equality_feasibility(&a, &b)? {
        LpResult::Feasible(d) => Ok(Some(ClassicalState::new(
            encoding.object().clone(),
            d,
            Variant::Stochastic,
        )?)),
        LpResult::Infeasible(_) => Ok(None),
    }
}

/// Push a global-assignment state through m̂ for every setting choice.
pub fn stoch_generate(
    scenario: &Scenario,
    s: &ClassicalState,
) -> Result<EmpiricalModel, Error> {
    let encoding = encoding_for(scenario)?;
    if s.base() != encoding.object() {
        return Err(Error::BaseMismatch(
            s.base().describe(),
            encoding.object().describe(),
        ));
    }
    let inst = SemiringInstance::rational();
    let mut table = BTreeMap::new();
    for m in scenario.setting_tuples() {
        let m_hat = encoding.m_hat(&m)?;
        let d = classical_evaluate(s, &m_hat)?;
        table.insert(scenario.setting_label(&m), d);
    }
    EmpiricalModel::new(scenario.clone(), inst, table)
}

/// Solve the same linear system with nonnegativity dropped, by exact
/// elimination: feasible exactly for the no-signalling models.
pub fn signed_realize(e: &EmpiricalModel) -> Result<SignedDecision, Error> {
    require_rational(e)?;
    let encoding = encoding_for(e.scenario())?;
    let (a, b) = lhv_system(e, &encoding)?;
    match lp::solve_linear_system(&a, &b)? {
        Some(x) => Ok(SignedDecision::Realizable(SignedRealization {
            state: ClassicalState::new(encoding.object().clone(), x, Variant::Signed)?,
        })),
        None => Ok(SignedDecision::Infeasible),
    }
}

/// ε-relaxed signed realization: substitute d = d⁺ − d⁻ with d± ≥ 0 and
/// allow each table constraint to miss by at most ε, reusing the simplex.
pub fn signed_realize_relaxed(
    e: &EmpiricalModel,
    epsilon: &BigRational,
) -> Result<SignedDecision, Error> {
    require_rational(e)?;
    let encoding = encoding_for(e.scenario())?;
    let (a, b) = lhv_system(e, &encoding)?;
    let n = encoding.object().dim();
    let split: Vec<Vec<BigRational>> = a
        .iter()
        .map(|row| {
            let mut r = Vec::with_capacity(2 * n);
            r.extend(row.iter().cloned());
            r.extend(row.iter().map(|c| -c.clone()));
            r
        })
        .collect();
    let (a, b) = relax_system(&split, &b, 2 * n, epsilon);
    match lp::solve_equality_feasibility(&a, &b)? {
        LpResult::Feasible(x) => {
            let d: Vec<BigRational> = (0..n).map(|i| &x[i] - &x[n + i]).collect();
            Ok(SignedDecision::Realizable(SignedRealization {
                state: ClassicalState::new(encoding.object().clone(), d, Variant::Signed)?,
            }))
        }
        LpResult::Infeasible(_) => Ok(SignedDecision::Infeasible),
    }
}

/// Verdict for tables carrying floating-point noise: same decision chain as
/// `classify`, with every table constraint relaxed by ε. Witnesses reproduce
/// the table only up to ε, so they are not emitted as exact certificates.
pub fn classify_relaxed(e: &EmpiricalModel, epsilon: &BigRational) -> Result<Verdict, Error> {
    match decide_local_relaxed(e, epsilon)? {
        LocalDecision::Local(_) => Ok(Verdict::Local),
        LocalDecision::Nonlocal(_) => match signed_realize_relaxed(e, epsilon)? {
            SignedDecision::Realizable(_) => Ok(Verdict::NoSignallingNonlocal),
            SignedDecision::Infeasible => Ok(Verdict::Signalling),
        },
    }
}

fn scalar_to_f64(s: &Scalar) -> Option<f64> {
    match s {
        Scalar::Rational(q) => q.to_f64(),
        Scalar::Gaussian(re, im) => {
            if im.is_zero() {
                re.to_f64()
            } else {
                None
            }
        }
        Scalar::Complex(z) => {
            if z.im.abs() <= crate::semiring::EPSILON {
                Some(z.re)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Recompute the table from complex-double Hilbert-space data and compare
/// entrywise within ε.
pub fn verify_quantum_realization(
    e: &EmpiricalModel,
    state: &State,
    site_measurements: &[Vec<Measurement>],
    epsilon: f64,
) -> Result<bool, Error> {
    let computed = empirical_from_operational(e.scenario(), state, site_measurements)?;
    for m in e.scenario().setting_tuples() {
        for o in e.scenario().outcome_tuples() {
            let (Some(x), Some(y)) = (
                scalar_to_f64(&e.probability(&m, &o)),
                scalar_to_f64(&computed.probability(&m, &o)),
            ) else {
                return Ok(false);
            };
            if (x - y).abs() > epsilon {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The three-way verdict with evidence. Local iff the vertex LP is feasible;
/// otherwise NoSignallingNonlocal iff a signed realization exists; otherwise
/// Signalling.
pub fn classify(e: &EmpiricalModel) -> Result<Classification, Error> {
    match decide_local(e)? {
        LocalDecision::Local(lhv) => {
            let state = stoch_realize(e)?.expect("same LP as decide_local");
            Ok(Classification::Local { lhv, state })
        }
        LocalDecision::Nonlocal(farkas) => match signed_realize(e)? {
            SignedDecision::Realizable(signed) => {
                Ok(Classification::NoSignallingNonlocal { farkas, signed })
            }
            SignedDecision::Infeasible => Ok(Classification::Signalling { farkas }),
        },
    }
}

/// Serialize a verdict with its model and evidence for later re-validation.
pub fn certificate_to_json(e: &EmpiricalModel, c: &Classification) -> Value {
    let rational = SemiringInstance::rational();
    let mut v = json!({
        "verdict": c.verdict().name(),
        "model": crate::scenario::model_to_json(e),
    });
    let obj = v.as_object_mut().expect("object literal");
    match c {
        Classification::Local { lhv, .. } => {
            obj.insert("witness".into(), lhv.to_json(e.scenario()));
        }
        Classification::NoSignallingNonlocal { farkas, signed } => {
            obj.insert(
                "farkas".into(),
                json!(farkas
                    .y
                    .iter()
                    .map(|q| rational.scalar_to_json(&Scalar::Rational(q.clone())))
                    .collect::<Vec<_>>()),
            );
            obj.insert(
                "signed_witness".into(),
                json!(signed
                    .state
                    .weights()
                    .iter()
                    .map(|q| rational.scalar_to_json(&Scalar::Rational(q.clone())))
                    .collect::<Vec<_>>()),
            );
        }
        Classification::Signalling { farkas } => {
            obj.insert(
                "farkas".into(),
                json!(farkas
                    .y
                    .iter()
                    .map(|q| rational.scalar_to_json(&Scalar::Rational(q.clone())))
                    .collect::<Vec<_>>()),
            );
        }
    }
    v
}

/// Re-verify an emitted certificate: Local witnesses must pass `verify_lhv`;
/// Farkas vectors must refute the system by substitution; signed witnesses
/// must regenerate the table.
pub fn validate_certificate(v: &Value) -> Result<(), Error> {
    let model = v.get("model").ok_or_else(|| Error::Schema {
        path: "model".into(),
        message: "certificate is missing its model".into(),
    })?;
    let e = crate::scenario::model_from_json(model)?;
    let verdict = v
        .get("verdict")
        .and_then(|s| s.as_str())
        .ok_or_else(|| Error::Schema {
            path: "verdict".into(),
            message: "missing verdict".into(),
        })?;
    let rational = SemiringInstance::rational();
    let parse_vector = |key: &str| -> Result<Vec<BigRational>, Error> {
        v.get(key)
            .and_then(|f| f.as_array())
            .ok_or_else(|| Error::Schema {
                path: key.into(),
                message: "expected rational array".into(),
            })?
            .iter()
            .map(|q| {
                Ok(rational
                    .scalar_from_json(q)?
                    .as_rational()
                    .expect("rational instance")
                    .clone())
            })
            .collect()
    };
    match verdict {
        "Local" => {
            let witness = v.get("witness").ok_or_else(|| Error::Schema {
                path: "witness".into(),
                message: "Local verdict requires a witness".into(),
            })?;
            let lhv = lhv_from_json(&e, witness)?;
            verify_lhv(&e, &lhv).map_err(|msg| Error::Schema {
                path: "witness".into(),
                message: msg,
            })
        }
        "NoSignallingNonlocal" | "Signalling" => {
            let encoding = encoding_for(e.scenario())?;
            let (a, b) = lhv_system(&e, &encoding)?;
            let y = parse_vector("farkas")?;
            if !lp::verify_farkas(&a, &b, &y) {
                return Err(Error::Schema {
                    path: "farkas".into(),
                    message: "certificate does not refute the system".into(),
                });
            }
            if verdict == "NoSignallingNonlocal" {
                let w = parse_vector("signed_witness")?;
                let state =
                    ClassicalState::new(encoding.object().clone(), w, Variant::Signed)?;
                let generated = stoch_generate(e.scenario(), &state)?;
                if !generated.equals(&e) {
                    return Err(Error::Schema {
                        path: "signed_witness".into(),
                        message: "signed witness does not regenerate the table".into(),
                    });
                }
            }
            Ok(())
        }
        other => Err(Error::Schema {
            path: "verdict".into(),
            message: format!("unknown verdict {other:?}"),
        }),
    }
}

/// Parse an LHV witness back against a model's scenario.
pub fn lhv_from_json(e: &EmpiricalModel, v: &Value) -> Result<LhvModel, Error> {
    let inst = SemiringInstance::rational();
    let scenario = e.scenario();
    let hidden: Vec<Tuple> = v
        .get("hidden")
        .and_then(|h| h.as_array())
        .ok_or_else(|| Error::Schema {
            path: "hidden".into(),
            message: "expected hidden value array".into(),
        })?
        .iter()
        .map(|l| {
            l.as_str()
                .map(|s| s.parse::<Tuple>().unwrap())
                .ok_or_else(|| Error::Schema {
                    path: "hidden".into(),
                    message: "hidden labels must be strings".into(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dist_obj = v
        .get("dist")
        .and_then(|d| d.as_object())
        .ok_or_else(|| Error::Schema {
            path: "dist".into(),
            message: "expected distribution object".into(),
        })?;
    let resp_obj = v
        .get("responses")
        .and_then(|r| r.as_object())
        .ok_or_else(|| Error::Schema {
            path: "responses".into(),
            message: "expected responses object".into(),
        })?;
    let mut dist = Vec::new();
    let mut responses = Vec::new();
    for l in &hidden {
        let key = l.to_string();
        let raw = dist_obj.get(&key).ok_or_else(|| Error::Schema {
            path: format!("dist.{key}"),
            message: "missing weight".into(),
        })?;
        dist.push(inst.scalar_from_json(raw)?);
        let table_json = resp_obj.get(&key).ok_or_else(|| Error::Schema {
            path: format!("responses.{key}"),
            message: "missing response table".into(),
        })?;
        let mut table = BTreeMap::new();
        for m in scenario.setting_tuples() {
            let mkey = scenario.setting_label(&m);
            let row = table_json
                .get(mkey.to_string().as_str())
                .and_then(|r| r.as_object())
                .ok_or_else(|| Error::Schema {
                    path: format!("responses.{key}.{mkey}"),
                    message: "missing setting row".into(),
                })?;
            let mut weights = BTreeMap::new();
            for o in scenario.outcome_tuples() {
                let okey = scenario.outcome_label(&o);
                let raw = row.get(&okey.to_string()).ok_or_else(|| Error::Schema {
                    path: format!("responses.{key}.{mkey}.{okey}"),
                    message: "missing outcome weight".into(),
                })?;
                weights.insert(okey, inst.scalar_from_json(raw)?);
            }
            table.insert(mkey, OutcomeDistribution::new(inst.clone(), weights));
        }
        responses.push(EmpiricalModel::new(scenario.clone(), inst.clone(), table)?);
    }
    LhvModel::new(inst, hidden, dist, responses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::no_signalling_check;
    use num_bigint::BigInt;
    use rand::Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn two_site_scenario() -> Scenario {
        let mk = |name: &str| Site {
            name: name.into(),
            settings: vec!["m0".into(), "m1".into()],
            outcomes: vec!["0".into(), "1".into()],
        };
        Scenario::new(vec![mk("A"), mk("B")]).unwrap()
    }

    fn model_from_rows(scenario: &Scenario, rows: &[[BigRational; 4]]) -> EmpiricalModel {
        let inst = SemiringInstance::rational();
        let mut table = BTreeMap::new();
        for (m, row) in scenario.setting_tuples().iter().zip(rows) {
            let mut weights = BTreeMap::new();
            for (o, w) in scenario.outcome_tuples().iter().zip(row) {
                weights.insert(scenario.outcome_label(o), Scalar::Rational(w.clone()));
            }
            table.insert(
                scenario.setting_label(m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        EmpiricalModel::new(scenario.clone(), inst, table).unwrap()
    }

    #[allow(clippy::needless_range_loop)]
    fn product_model(scenario: &Scenario, pa: &[[BigRational; 2]], pb: &[[BigRational; 2]]) -> EmpiricalModel {
        let rows: Vec<[BigRational; 4]> = scenario
            .setting_tuples()
            .iter()
            .map(|m| {
                let mut row = Vec::new();
                for oa in 0..2 {
                    for ob in 0..2 {
                        row.push(&pa[m[0]][oa] * &pb[m[1]][ob]);
                    }
                }
                [row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()]
            })
            .collect();
        model_from_rows(scenario, &rows)
    }

    #[test]
    fn product_table_is_local_with_verified_witness() {
        let scenario = two_site_scenario();
        let pa = [[q(1, 3), q(2, 3)], [q(1, 2), q(1, 2)]];
        let pb = [[q(3, 4), q(1, 4)], [q(1, 5), q(4, 5)]];
        let e = product_model(&scenario, &pa, &pb);
        match decide_local(&e).unwrap() {
            LocalDecision::Local(lhv) => {
                verify_lhv(&e, &lhv).unwrap();
            }
            LocalDecision::Nonlocal(_) => panic!("product table must be local"),
        }
        assert_eq!(classify(&e).unwrap().verdict(), Verdict::Local);
    }

    #[test]
    fn deterministic_single_lambda_model_verifies() {
        let scenario = two_site_scenario();
        // Both sites always answer 0 regardless of setting.
        let rows: Vec<[BigRational; 4]> = (0..4)
            .map(|_| [q(1, 1), q(0, 1), q(0, 1), q(0, 1)])
            .collect();
        let e = model_from_rows(&scenario, &rows);
        let LocalDecision::Local(lhv) = decide_local(&e).unwrap() else {
            panic!("deterministic table must be local");
        };
        verify_lhv(&e, &lhv).unwrap();
        assert_eq!(lhv.hidden().len(), 1);
    }

    #[test]
    fn tampered_witness_is_rejected_with_location() {
        let scenario = two_site_scenario();
        let pa = [[q(1, 2), q(1, 2)], [q(1, 2), q(1, 2)]];
        let e = product_model(&scenario, &pa, &pa);
        let LocalDecision::Local(lhv) = decide_local(&e).unwrap() else {
            panic!("must be local");
        };
        // Tamper the distribution: shift weight between hidden values.
        let mut dist = lhv.dist().to_vec();
        if dist.len() >= 2 {
            let inst = SemiringInstance::rational();
            dist[0] = inst.add(&dist[0], &Scalar::rational(1, 8));
            let bumped = dist[1].clone();
            dist[1] = inst
                .sub(&bumped, &Scalar::rational(1, 8))
                .expect("field subtraction");
        }
        let tampered = LhvModel::new(
            lhv.instance().clone(),
            lhv.hidden().to_vec(),
            dist,
            lhv.responses().to_vec(),
        )
        .unwrap();
        let err = verify_lhv(&e, &tampered).unwrap_err();
        assert!(err.contains("mixture at"));
    }

    #[test]
    fn signalling_table_is_refuted_everywhere() {
        let scenario = two_site_scenario();
        // Site A's outcome copies site B's setting.
        let rows: Vec<[BigRational; 4]> = scenario
            .setting_tuples()
            .iter()
            .map(|m| {
                let mut row = [q(0, 1), q(0, 1), q(0, 1), q(0, 1)];
                // outcome (o_A, o_B) index = 2*o_A + o_B; set o_A = m_B.
                row[2 * m[1]] = q(1, 2);
                row[2 * m[1] + 1] = q(1, 2);
                row
            })
            .collect();
        let e = model_from_rows(&scenario, &rows);
        assert!(!no_signalling_check(&e));
        assert!(matches!(decide_local(&e).unwrap(), LocalDecision::Nonlocal(_)));
        assert!(matches!(signed_realize(&e).unwrap(), SignedDecision::Infeasible));
        assert_eq!(classify(&e).unwrap().verdict(), Verdict::Signalling);
    }

    #[test]
    fn stoch_realize_round_trips_through_generate() {
        let mut rng = crate::rng(71);
        let scenario = two_site_scenario();
        for _ in 0..10 {
            let mut pa = [[q(0, 1), q(0, 1)], [q(0, 1), q(0, 1)]];
            let mut pb = pa.clone();
            for table in [&mut pa, &mut pb] {
                for row in table.iter_mut() {
                    let n = rng.gen_range(0..5);
                    row[0] = q(n, 4);
                    row[1] = q(4 - n, 4);
                }
            }
            let e = product_model(&scenario, &pa, &pb);
            let state = stoch_realize(&e).unwrap().expect("product model is local");
            let regenerated = stoch_generate(&scenario, &state).unwrap();
            assert!(regenerated.equals(&e));
        }
    }

    #[test]
    fn uniform_global_distribution_generates_a_local_model() {
        let scenario = two_site_scenario();
        let encoding = encoding_for(&scenario).unwrap();
        let s = ClassicalState::uniform(encoding.object().clone());
        let e = stoch_generate(&scenario, &s).unwrap();
        assert_eq!(classify(&e).unwrap().verdict(), Verdict::Local);
    }

    #[test]
    fn signed_realize_matches_no_signalling_on_random_tables() {
        let mut rng = crate::rng(72);
        let scenario = two_site_scenario();
        let mut seen_feasible = false;
        let mut seen_infeasible = false;
        for i in 0..60 {
            // Alternate fully random rows (usually signalling) with product
            // tables (always no-signalling) so both branches are exercised.
            let e = if i % 2 == 0 {
                let rows: Vec<[BigRational; 4]> = (0..4)
                    .map(|_| {
                        let mut raw = [0i64; 4];
                        loop {
                            for r in raw.iter_mut() {
                                *r = rng.gen_range(0..4);
                            }
                            if raw.iter().sum::<i64>() > 0 {
                                break;
                            }
                        }
                        let total: i64 = raw.iter().sum();
                        [
                            q(raw[0], total),
                            q(raw[1], total),
                            q(raw[2], total),
                            q(raw[3], total),
                        ]
                    })
                    .collect();
                model_from_rows(&scenario, &rows)
            } else {
                let random_site = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let mut p = [[q(0, 1), q(0, 1)], [q(0, 1), q(0, 1)]];
                    for row in p.iter_mut() {
                        let n = rng.gen_range(0..5);
                        row[0] = q(n, 4);
                        row[1] = q(4 - n, 4);
                    }
                    p
                };
                let pa = random_site(&mut rng);
                let pb = random_site(&mut rng);
                product_model(&scenario, &pa, &pb)
            };
            let ns = no_signalling_check(&e);
            match signed_realize(&e).unwrap() {
                SignedDecision::Realizable(r) => {
                    assert!(ns, "signed realization of a signalling table");
                    seen_feasible = true;
                    let regenerated = stoch_generate(&scenario, &r.state).unwrap();
                    assert!(regenerated.equals(&e));
                }
                SignedDecision::Infeasible => {
                    assert!(!ns, "no-signalling table without signed realization");
                    seen_infeasible = true;
                }
            }
        }
        assert!(seen_feasible && seen_infeasible, "test corpus too one-sided");
    }

    #[test]
    fn rel_construction_reproduces_boolean_models() {
        let mut rng = crate::rng(73);
        let inst = SemiringInstance::boolean();
        let base = Obj::new(&["x0", "x1"]);
        for _ in 0..25 {
            let covers = |rng: &mut rand_chacha::ChaCha8Rng| {
                (0..2)
                    .map(|_| crate::testkit::random_crisp_cover(&inst, &base, rng))
                    .collect::<Vec<_>>()
            };
            let site_covers = vec![covers(&mut rng), covers(&mut rng)];
            let product = base.tensor(&base);
            let s = loop {
                let values: Vec<Scalar> =
                    (0..product.dim()).map(|_| inst.sample(&mut rng)).collect();
                let candidate = OmegaSubset::new(product.clone(), inst.clone(), values).unwrap();
                if inst.is_one(&candidate.total_join()) {
                    break candidate;
                }
            };
            let (scenario, lhv) = rel_lhv_construct(&s, &site_covers).unwrap();
            let e = rel_empirical_model(&s, &site_covers, &scenario).unwrap();
            verify_lhv(&e, &lhv).unwrap();
        }
    }

    #[test]
    fn rel_construction_reproduces_chain_models() {
        let mut rng = crate::rng(74);
        let inst = SemiringInstance::chain(&["bot", "a", "top"]);
        let base = Obj::new(&["x0", "x1"]);
        for _ in 0..15 {
            let site_covers: Vec<Vec<DisjointCover>> = (0..2)
                .map(|_| {
                    (0..2)
                        .map(|_| crate::testkit::random_crisp_cover(&inst, &base, &mut rng))
                        .collect()
                })
                .collect();
            let product = base.tensor(&base);
            let s = loop {
                let values: Vec<Scalar> =
                    (0..product.dim()).map(|_| inst.sample(&mut rng)).collect();
                let candidate = OmegaSubset::new(product.clone(), inst.clone(), values).unwrap();
                if inst.is_one(&candidate.total_join()) {
                    break candidate;
                }
            };
            let (scenario, lhv) = rel_lhv_construct(&s, &site_covers).unwrap();
            let e = rel_empirical_model(&s, &site_covers, &scenario).unwrap();
            verify_lhv(&e, &lhv).unwrap();
        }
    }

    #[test]
    fn point_mass_global_section_is_deterministic() {
        let inst = SemiringInstance::boolean();
        let base = Obj::new(&["x0", "x1"]);
        let product = base.tensor(&base);
        let mut values = vec![inst.zero(); product.dim()];
        values[2] = inst.one();
        let s = OmegaSubset::new(product, inst.clone(), values).unwrap();
        let mut rng = crate::rng(75);
        let site_covers: Vec<Vec<DisjointCover>> = (0..2)
            .map(|_| vec![crate::testkit::random_crisp_cover(&inst, &base, &mut rng)])
            .collect();
        let (scenario, lhv) = rel_lhv_construct(&s, &site_covers).unwrap();
        let e = rel_empirical_model(&s, &site_covers, &scenario).unwrap();
        verify_lhv(&e, &lhv).unwrap();
        // Exactly one hidden value carries weight ⊤.
        let live: Vec<_> = lhv
            .dist()
            .iter()
            .filter(|d| inst.is_one(d))
            .collect();
        assert_eq!(live.len(), 1);
    }

    #[test]
    fn mixtures_of_local_models_stay_local() {
        let mut rng = crate::rng(76);
        let scenario = two_site_scenario();
        for _ in 0..8 {
            let random_product = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut p = [[q(0, 1), q(0, 1)], [q(0, 1), q(0, 1)]];
                for row in p.iter_mut() {
                    let n = rng.gen_range(0..5);
                    row[0] = q(n, 4);
                    row[1] = q(4 - n, 4);
                }
                p
            };
            let e1 = product_model(&scenario, &random_product(&mut rng), &random_product(&mut rng));
            let e2 = product_model(&scenario, &random_product(&mut rng), &random_product(&mut rng));
            let w = q(rng.gen_range(0..5), 4);
            let rows: Vec<[BigRational; 4]> = scenario
                .setting_tuples()
                .iter()
                .map(|m| {
                    let mut row = Vec::new();
                    for o in scenario.outcome_tuples() {
                        let a = e1.probability(m, &o).as_rational().unwrap().clone();
                        let b = e2.probability(m, &o).as_rational().unwrap().clone();
                        row.push(&w * a + (BigRational::one() - &w) * b);
                    }
                    [row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()]
                })
                .collect();
            let mixed = model_from_rows(&scenario, &rows);
            assert_eq!(classify(&mixed).unwrap().verdict(), Verdict::Local);
        }
    }

    #[test]
    fn relaxed_signed_realization_tolerates_noise() {
        let scenario = two_site_scenario();
        // A no-signalling nonlocal table (perfect correlation except one
        // anticorrelated row) with a small perturbation.
        let mut rows = vec![
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(0, 1), q(1, 2), q(1, 2), q(0, 1)],
        ];
        rows[1][0] += q(1, 100000);
        let e = model_from_rows(&scenario, &rows);
        assert!(matches!(signed_realize(&e).unwrap(), SignedDecision::Infeasible));
        assert!(matches!(
            signed_realize_relaxed(&e, &q(1, 1000)).unwrap(),
            SignedDecision::Realizable(_)
        ));
        assert_eq!(
            classify_relaxed(&e, &q(1, 1000)).unwrap(),
            Verdict::NoSignallingNonlocal
        );
    }

    #[test]
    fn certificates_round_trip_through_validation() {
        let scenario = two_site_scenario();
        let pa = [[q(1, 3), q(2, 3)], [q(1, 2), q(1, 2)]];
        let e = product_model(&scenario, &pa, &pa);
        let c = classify(&e).unwrap();
        validate_certificate(&certificate_to_json(&e, &c)).unwrap();
    }

    #[test]
    fn relaxed_decision_tolerates_small_perturbations() {
        let scenario = two_site_scenario();
        let pa = [[q(1, 2), q(1, 2)], [q(1, 2), q(1, 2)]];
        let e = product_model(&scenario, &pa, &pa);
        // Perturb one cell by 1/1000 (breaking exact normalization).
        let mut rows: Vec<[BigRational; 4]> = scenario
            .setting_tuples()
            .iter()
            .map(|m| {
                let mut row = Vec::new();
                for o in scenario.outcome_tuples() {
                    row.push(e.probability(m, &o).as_rational().unwrap().clone());
                }
                [row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()]
            })
            .collect();
        rows[0][0] += q(1, 1000);
        let perturbed = model_from_rows(&scenario, &rows);
        assert!(matches!(
            decide_local(&perturbed).unwrap(),
            LocalDecision::Nonlocal(_)
        ));
        assert!(matches!(
            decide_local_relaxed(&perturbed, &q(1, 100)).unwrap(),
            LocalDecision::Local(_)
        ));
    }
}
