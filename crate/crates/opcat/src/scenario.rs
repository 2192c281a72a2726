//! Multipartite empirical models: assemble per-site measurements and a joint
//! state into a probability table p(o|m), compute marginals, check
//! no-signalling, and serialize tables.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::Error;
use crate::operational::{
    evaluate, tensor_measurement, Measurement, OutcomeDistribution, State,
};
use crate::semiring::{Scalar, SemiringInstance};
use crate::tuple::Tuple;

/// One agent: a name, its measurement-setting labels, and its outcome labels
/// (shared across that site's settings).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub name: String,
    pub settings: Vec<String>,
    pub outcomes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    sites: Vec<Site>,
}

impl Scenario {
    pub fn new(sites: Vec<Site>) -> Result<Scenario, Error> {
        if sites.is_empty() {
            return Err(Error::EmptyInput("sites"));
        }
        for s in &sites {
            if s.settings.is_empty() {
                return Err(Error::EmptyInput("site settings"));
            }
            if s.outcomes.is_empty() {
                return Err(Error::EmptyInput("site outcomes"));
            }
        }
        Ok(Scenario { sites })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// All global setting choices, site-major lexicographic.
    pub fn setting_tuples(&self) -> Vec<Vec<usize>> {
        cartesian(&self.sites.iter().map(|s| s.settings.len()).collect::<Vec<_>>())
    }

    /// All joint outcomes, site-major lexicographic.
    pub fn outcome_tuples(&self) -> Vec<Vec<usize>> {
        cartesian(&self.sites.iter().map(|s| s.outcomes.len()).collect::<Vec<_>>())
    }

    pub fn setting_label(&self, m: &[usize]) -> Tuple {
        Tuple(
            self.sites
                .iter()
                .zip(m)
                .map(|(s, &i)| s.settings[i].clone())
                .collect(),
        )
    }

    pub fn outcome_label(&self, o: &[usize]) -> Tuple {
        Tuple(
            self.sites
                .iter()
                .zip(o)
                .map(|(s, &i)| s.outcomes[i].clone())
                .collect(),
        )
    }
}

fn cartesian(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..d).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// A full table p(o|m): one outcome distribution per global setting choice.
#[derive(Debug, Clone)]
pub struct EmpiricalModel {
    scenario: Scenario,
    instance: SemiringInstance,
    table: BTreeMap<Tuple, OutcomeDistribution>,
}

impl EmpiricalModel {
    pub fn new(
        scenario: Scenario,
        instance: SemiringInstance,
        table: BTreeMap<Tuple, OutcomeDistribution>,
    ) -> Result<EmpiricalModel, Error> {
        for m in scenario.setting_tuples() {
            let key = scenario.setting_label(&m);
            if !table.contains_key(&key) {
                return Err(Error::Schema {
                    path: format!("table.{key}"),
                    message: "missing setting tuple".into(),
                });
            }
        }
        Ok(EmpiricalModel {
            scenario,
            instance,
            table,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn instance(&self) -> &SemiringInstance {
        &self.instance
    }

    pub fn distribution(&self, m: &[usize]) -> &OutcomeDistribution {
        &self.table[&self.scenario.setting_label(m)]
    }

    /// p(o|m) by index tuples.
    pub fn probability(&self, m: &[usize], o: &[usize]) -> Scalar {
        self.distribution(m).weight(&self.scenario.outcome_label(o))
    }

    pub fn equals(&self, other: &EmpiricalModel) -> bool {
        self.scenario == other.scenario
            && self
                .scenario
                .setting_tuples()
                .iter()
                .all(|m| self.distribution(m).equals(other.distribution(m)))
    }
}

/// Build the table from a joint state and per-site measurement families by
/// evaluating the pure-tensor measurement for every setting tuple.
pub fn empirical_from_operational(
    scenario: &Scenario,
    state: &State,
    site_measurements: &[Vec<Measurement>],
) -> Result<EmpiricalModel, Error> {
    if site_measurements.len() != scenario.sites.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} measurement families for {} sites",
            site_measurements.len(),
            scenario.sites.len()
        )));
    }
    for (site, family) in scenario.sites.iter().zip(site_measurements) {
        if family.len() != site.settings.len() {
            return Err(Error::ShapeMismatch(format!(
                "site {} has {} settings but {} measurements",
                site.name,
                site.settings.len(),
                family.len()
            )));
        }
    }
    let mut table = BTreeMap::new();
    for m in scenario.setting_tuples() {
        let mut joint: Option<Measurement> = None;
        for (site, &mi) in m.iter().enumerate() {
            let next = &site_measurements[site][mi];
            joint = Some(match joint {
                None => next.clone(),
                Some(j) => tensor_measurement(&j, next)?,
            });
        }
        let d = evaluate(state, &joint.expect("at least one site"))?;
        table.insert(scenario.setting_label(&m), d);
    }
    EmpiricalModel::new(scenario.clone(), state.instance().clone(), table)
}

/// The site-i marginal Σ_{o′: o′ᵢ=oᵢ} p(o′|m) for a fixed full setting tuple.
pub fn marginal(e: &EmpiricalModel, m: &[usize], site: usize, outcome: usize) -> Scalar {
    let inst = e.instance().clone();
    let mut acc = inst.zero();
    for o in e.scenario().outcome_tuples() {
        if o[site] == outcome {
            acc = inst.add(&acc, &e.probability(m, &o));
        }
    }
    acc
}

/// True iff every site's marginals depend only on that site's own setting.
pub fn no_signalling_check(e: &EmpiricalModel) -> bool {
    let inst = e.instance();
    let settings = e.scenario().setting_tuples();
    for site in 0..e.scenario().sites().len() {
        for (i, m1) in settings.iter().enumerate() {
            for m2 in settings.iter().skip(i + 1) {
                if m1[site] != m2[site] {
                    continue;
                }
                for outcome in 0..e.scenario().sites()[site].outcomes.len() {
                    let a = marginal(e, m1, site, outcome);
                    let b = marginal(e, m2, site, outcome);
                    if !inst.eq(&a, &b) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A rational table obtained from an arbitrary field-instance model.
/// `approximate` is set when some entry could not be snapped to a small
/// denominator and classification should use ε-relaxed constraints.
#[derive(Debug, Clone)]
pub struct RationalizedModel {
    pub model: EmpiricalModel,
    pub approximate: bool,
}

/// Convert a model to exact rationals: complex-double entries are snapped to
/// the nearest denominator-≤64 rational when within 1e-6, otherwise converted
/// exactly from their binary representation and flagged approximate.
pub fn rationalize(e: &EmpiricalModel) -> Result<RationalizedModel, Error> {
    let inst = e.instance();
    let rational = SemiringInstance::rational();
    let mut approximate = false;
    let mut table = BTreeMap::new();
    for m in e.scenario().setting_tuples() {
        let mut weights = BTreeMap::new();
        for o in e.scenario().outcome_tuples() {
            let p = e.probability(&m, &o);
            let q = match &p {
                Scalar::Rational(q) => q.clone(),
                Scalar::Gaussian(re, im) => {
                    if !im.numer().is_zero() {
                        return Err(Error::NonRationalTable(format!(
                            "imaginary weight at {} {}",
                            e.scenario().setting_label(&m),
                            e.scenario().outcome_label(&o)
                        )));
                    }
                    re.clone()
                }
                Scalar::Complex(z) => {
                    if z.im.abs() > crate::semiring::EPSILON {
                        return Err(Error::NonRationalTable(format!(
                            "imaginary weight at {} {}",
                            e.scenario().setting_label(&m),
                            e.scenario().outcome_label(&o)
                        )));
                    }
                    match snap_to_rational(z.re) {
                        Some(q) => q,
                        None => {
                            approximate = true;
                            BigRational::from_float(z.re).ok_or_else(|| {
                                Error::NonRationalTable(format!("non-finite weight {}", z.re))
                            })?
                        }
                    }
                }
                other => {
                    return Err(Error::NonRationalTable(format!(
                        "instance {} weight {}",
                        inst.kind().name(),
                        inst.scalar_string(other)
                    )))
                }
            };
            weights.insert(e.scenario().outcome_label(&o), Scalar::Rational(q));
        }
        table.insert(
            e.scenario().setting_label(&m),
            OutcomeDistribution::new(rational.clone(), weights),
        );
    }
    Ok(RationalizedModel {
        model: EmpiricalModel::new(e.scenario().clone(), rational, table)?,
        approximate,
    })
}

fn snap_to_rational(x: f64) -> Option<BigRational> {
    for den in 1..=64i64 {
        let num = (x * den as f64).round();
        if (num / den as f64 - x).abs() < 1e-6 {
            return Some(BigRational::new(
                BigInt::from(num as i64),
                BigInt::from(den),
            ));
        }
    }
    None
}

pub fn model_to_json(e: &EmpiricalModel) -> Value {
    let mut settings = serde_json::Map::new();
    let mut outcomes = serde_json::Map::new();
    for s in e.scenario().sites() {
        settings.insert(s.name.clone(), json!(s.settings));
        outcomes.insert(s.name.clone(), json!(s.outcomes));
    }
    let mut table = serde_json::Map::new();
    for m in e.scenario().setting_tuples() {
        let mut row = serde_json::Map::new();
        for o in e.scenario().outcome_tuples() {
            row.insert(
                e.scenario().outcome_label(&o).to_string(),
                e.instance().scalar_to_json(&e.probability(&m, &o)),
            );
        }
        table.insert(e.scenario().setting_label(&m).to_string(), Value::Object(row));
    }
    json!({
        "sites": e.scenario().sites().iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        "instance": e.instance().to_json(),
        "settings": settings,
        "outcomes": outcomes,
        "table": table,
    })
}

pub fn model_from_json(v: &Value) -> Result<EmpiricalModel, Error> {
    let site_names = v
        .get("sites")
        .and_then(|s| s.as_array())
        .ok_or_else(|| Error::Schema {
            path: "sites".into(),
            message: "expected array of site names".into(),
        })?
        .iter()
        .map(|s| {
            s.as_str().map(str::to_string).ok_or_else(|| Error::Schema {
                path: "sites".into(),
                message: "site names must be strings".into(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let instance = match v.get("instance") {
        None => SemiringInstance::rational(),
        Some(tag) => SemiringInstance::from_json(tag)?,
    };
    let get_labels = |section: &str, site: &str| -> Result<Vec<String>, Error> {
        v.get(section)
            .and_then(|s| s.get(site))
            .and_then(|s| s.as_array())
            .ok_or_else(|| Error::Schema {
                path: format!("{section}.{site}"),
                message: "expected label array".into(),
            })?
            .iter()
            .map(|l| {
                l.as_str().map(str::to_string).ok_or_else(|| Error::Schema {
                    path: format!("{section}.{site}"),
                    message: "labels must be strings".into(),
                })
            })
            .collect()
    };
    let sites = site_names
        .iter()
        .map(|name| {
            Ok(Site {
                name: name.clone(),
                settings: get_labels("settings", name)?,
                outcomes: get_labels("outcomes", name)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let scenario = Scenario::new(sites)?;
    let raw_table = v
        .get("table")
        .and_then(|t| t.as_object())
        .ok_or_else(|| Error::Schema {
            path: "table".into(),
            message: "expected table object".into(),
        })?;
    let mut table = BTreeMap::new();
    for m in scenario.setting_tuples() {
        let key = scenario.setting_label(&m);
        let row = raw_table
            .get(&key.to_string())
            .and_then(|r| r.as_object())
            .ok_or_else(|| Error::Schema {
                path: format!("table.{key}"),
                message: "missing setting tuple".into(),
            })?;
        let mut weights = BTreeMap::new();
        for o in scenario.outcome_tuples() {
            let okey = scenario.outcome_label(&o);
            let raw = row.get(&okey.to_string()).ok_or_else(|| Error::Schema {
                path: format!("table.{key}.{okey}"),
                message: "missing outcome".into(),
            })?;
            weights.insert(okey, instance.scalar_from_json(raw)?);
        }
        table.insert(key, OutcomeDistribution::new(instance.clone(), weights));
    }
    EmpiricalModel::new(scenario, instance, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcat::{Mor, Obj};
    use crate::testkit;

    fn two_site_scenario(settings: usize, outcomes: usize) -> Scenario {
        let mk = |name: &str| Site {
            name: name.into(),
            settings: (0..settings).map(|i| format!("m{i}")).collect(),
            outcomes: (0..outcomes).map(|i| i.to_string()).collect(),
        };
        Scenario::new(vec![mk("A"), mk("B")]).unwrap()
    }

    fn basis_state(inst: &SemiringInstance, obj: &Obj, i: usize) -> State {
        let one = inst.one();
        let zero = inst.zero();
        let psi = Mor::from_fn(inst, Obj::unit(), obj.clone(), |r, _| {
            if r == i {
                one.clone()
            } else {
                zero.clone()
            }
        });
        State::from_pure(&psi).unwrap()
    }

    #[test]
    fn product_basis_state_gives_deterministic_table() {
        let inst = SemiringInstance::rational();
        let site_obj = Obj::new(&["0", "1"]);
        let scenario = two_site_scenario(1, 2);
        let s = crate::operational::tensor_state(
            &basis_state(&inst, &site_obj, 0),
            &basis_state(&inst, &site_obj, 1),
        )
        .unwrap();
        let m = Measurement::basis(&inst, &site_obj);
        let e = empirical_from_operational(&scenario, &s, &[vec![m.clone()], vec![m]]).unwrap();
        assert_eq!(e.probability(&[0, 0], &[0, 1]), Scalar::int(1));
        assert_eq!(e.probability(&[0, 0], &[0, 0]), Scalar::int(0));
        assert!(no_signalling_check(&e));
    }

    #[test]
    fn product_states_never_signal() {
        let mut rng = crate::rng(61);
        let inst = SemiringInstance::rational();
        let site_obj = Obj::new(&["0", "1"]);
        let scenario = two_site_scenario(2, 2);
        for _ in 0..15 {
            let s = crate::operational::tensor_state(
                &testkit::random_state(&inst, &site_obj, &mut rng),
                &testkit::random_state(&inst, &site_obj, &mut rng),
            )
            .unwrap();
            let family = |rng: &mut _| {
                vec![
                    testkit::random_binary_measurement(&inst, &site_obj, rng),
                    testkit::random_binary_measurement(&inst, &site_obj, rng),
                ]
            };
            let e = empirical_from_operational(
                &scenario,
                &s,
                &[family(&mut rng), family(&mut rng)],
            )
            .unwrap();
            assert!(no_signalling_check(&e));
        }
    }

    #[test]
    fn hand_built_signalling_table_is_detected() {
        let scenario = two_site_scenario(2, 2);
        let inst = SemiringInstance::rational();
        let mut table = BTreeMap::new();
        for m in scenario.setting_tuples() {
            let mut weights = BTreeMap::new();
            for o in scenario.outcome_tuples() {
                // Site A outputs its partner's setting: p(o|m) = [o_A = m_B]
                // on outcome 0/1 of B uniformly.
                let w = if o[0] == m[1] {
                    Scalar::rational(1, 2)
                } else {
                    Scalar::int(0)
                };
                weights.insert(scenario.outcome_label(&o), w);
            }
            table.insert(
                scenario.setting_label(&m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        let e = EmpiricalModel::new(scenario, inst, table).unwrap();
        assert!(!no_signalling_check(&e));
    }

    #[test]
    fn marginals_sum_to_one() {
        let mut rng = crate::rng(62);
        let inst = SemiringInstance::rational();
        let site_obj = Obj::new(&["0", "1"]);
        let scenario = two_site_scenario(2, 2);
        let obj = site_obj.tensor(&site_obj);
        let s = testkit::random_state(&inst, &obj, &mut rng);
        let family = |rng: &mut _| {
            vec![
                testkit::random_binary_measurement(&inst, &site_obj, rng),
                testkit::random_binary_measurement(&inst, &site_obj, rng),
            ]
        };
        let e =
            empirical_from_operational(&scenario, &s, &[family(&mut rng), family(&mut rng)])
                .unwrap();
        for m in scenario.setting_tuples() {
            assert!(e.distribution(&m).is_normalized());
            for site in 0..2 {
                let total = (0..2).fold(inst.zero(), |acc, o| {
                    inst.add(&acc, &marginal(&e, &m, site, o))
                });
                assert!(inst.is_one(&total));
            }
        }
    }

    #[test]
    fn model_json_round_trips() {
        let mut rng = crate::rng(63);
        let inst = SemiringInstance::rational();
        let site_obj = Obj::new(&["0", "1"]);
        let scenario = two_site_scenario(2, 2);
        let obj = site_obj.tensor(&site_obj);
        let s = testkit::random_state(&inst, &obj, &mut rng);
        let family = |rng: &mut _| {
            vec![
                testkit::random_binary_measurement(&inst, &site_obj, rng),
                testkit::random_binary_measurement(&inst, &site_obj, rng),
            ]
        };
        let e =
            empirical_from_operational(&scenario, &s, &[family(&mut rng), family(&mut rng)])
                .unwrap();
        let back = model_from_json(&model_to_json(&e)).unwrap();
        assert!(back.equals(&e));
    }

    #[test]
    fn missing_setting_tuple_is_named() {
        let e_json = json!({
            "sites": ["A", "B"],
            "settings": {"A": ["m0"], "B": ["m0"]},
            "outcomes": {"A": ["0", "1"], "B": ["0", "1"]},
            "table": {},
        });
        let err = model_from_json(&e_json).unwrap_err();
        assert!(err.to_string().contains("table.(m0,m0)"));
    }

    #[test]
    fn rationalize_snaps_small_denominators() {
        let scenario = two_site_scenario(1, 2);
        let inst = SemiringInstance::complex_double();
        let mut table = BTreeMap::new();
        let values = [0.375, 0.125, 0.125, 0.375];
        for m in scenario.setting_tuples() {
            let mut weights = BTreeMap::new();
            for (o, v) in scenario.outcome_tuples().iter().zip(values) {
                weights.insert(scenario.outcome_label(o), Scalar::complex(v + 2e-10, 0.0));
            }
            table.insert(
                scenario.setting_label(&m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        let e = EmpiricalModel::new(scenario, inst, table).unwrap();
        let r = rationalize(&e).unwrap();
        assert!(!r.approximate);
        assert_eq!(r.model.probability(&[0, 0], &[0, 0]), Scalar::rational(3, 8));
    }

    #[test]
    fn rationalize_flags_awkward_floats() {
        let scenario = two_site_scenario(1, 1);
        let inst = SemiringInstance::complex_double();
        let mut table = BTreeMap::new();
        let mut weights = BTreeMap::new();
        weights.insert(scenario.outcome_label(&[0, 0]), Scalar::complex(1.0, 0.0));
        table.insert(
            scenario.setting_label(&[0, 0]),
            OutcomeDistribution::new(inst.clone(), weights),
        );
        let one_site = EmpiricalModel::new(scenario, inst.clone(), table).unwrap();
        assert!(!rationalize(&one_site).unwrap().approximate);

        let scenario = two_site_scenario(1, 2);
        let mut table = BTreeMap::new();
        let x = 1.0 / std::f64::consts::PI;
        for m in scenario.setting_tuples() {
            let mut weights = BTreeMap::new();
            let values = [x, 0.5 - x, 0.25, 0.25];
            for (o, v) in scenario.outcome_tuples().iter().zip(values) {
                weights.insert(scenario.outcome_label(o), Scalar::complex(v, 0.0));
            }
            table.insert(
                scenario.setting_label(&m),
                OutcomeDistribution::new(inst.clone(), weights),
            );
        }
        let e = EmpiricalModel::new(scenario, inst, table).unwrap();
        assert!(rationalize(&e).unwrap().approximate);
    }
}
