//! Built-in example models: the Bell table realized by qubit measurements on
//! a maximally entangled state, and the PR box with its signed
//! global-assignment witness. Shared by the CLI and the test suites.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::classify::encoding_for;
use crate::error::Error;
use crate::matcat::{Mor, Obj};
use crate::operational::{Measurement, OutcomeDistribution, State};
use crate::scenario::{EmpiricalModel, Scenario, Site};
use crate::semiring::{Scalar, SemiringInstance};
use crate::stoch::{ClassicalState, Variant};
use crate::tuple::Tuple;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Two sites, two settings each, binary outcomes.
pub fn bell_scenario() -> Scenario {
    Scenario::new(vec![
        Site {
            name: "A".into(),
            settings: vec!["a".into(), "a'".into()],
            outcomes: vec!["0".into(), "1".into()],
        },
        Site {
            name: "B".into(),
            settings: vec!["b".into(), "b'".into()],
            outcomes: vec!["0".into(), "1".into()],
        },
    ])
    .expect("static scenario")
}

/// The qubit projector pair P±(θ) = ½(I ± (cosθ·X + sinθ·Y)) as a
/// two-outcome measurement with outcomes "0" (+) and "1" (−).
fn xy_measurement(inst: &SemiringInstance, obj: &Obj, theta: f64) -> Measurement {
    let half = 0.5;
    let p = |sign: f64| {
        Mor::from_rows(
            inst,
            obj.clone(),
            obj.clone(),
            vec![
                vec![
                    Scalar::complex(half, 0.0),
                    Scalar::complex(sign * half * theta.cos(), -sign * half * theta.sin()),
                ],
                vec![
                    Scalar::complex(sign * half * theta.cos(), sign * half * theta.sin()),
                    Scalar::complex(half, 0.0),
                ],
            ],
        )
        .expect("2x2 shape")
    };
    Measurement::new(vec![Tuple::atom("0"), Tuple::atom("1")], vec![p(1.0), p(-1.0)])
        .expect("projector pair")
}

/// The maximally entangled two-qubit state and the XY-plane measurement
/// families at angles a = 0, a′ = π/3 and b = 0, b′ = π/3.
pub fn bell_hilb_data() -> (State, Vec<Vec<Measurement>>) {
    let inst = SemiringInstance::complex_double();
    let qubit = Obj::new(&["0", "1"]);
    let pair = qubit.tensor(&qubit);
    let h = 1.0 / 2.0_f64.sqrt();
    let psi = Mor::from_fn(&inst, Obj::unit(), pair, |r, _| {
        if r == 0 || r == 3 {
            Scalar::complex(h, 0.0)
        } else {
            Scalar::complex(0.0, 0.0)
        }
    });
    let state = State::from_pure(&psi).expect("unit vector");
    let angle = std::f64::consts::FRAC_PI_3;
    let site = |angles: [f64; 2]| {
        angles
            .iter()
            .map(|&t| xy_measurement(&inst, &qubit, t))
            .collect::<Vec<_>>()
    };
    (state, vec![site([0.0, angle]), site([0.0, angle])])
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
    EmpiricalModel::new(scenario.clone(), inst, table).expect("full table")
}

/// The exact Bell table: rows (a,b), (a,b′), (a′,b), (a′,b′) over outcomes
/// (0,0), (0,1), (1,0), (1,1).
pub fn bell_model() -> EmpiricalModel {
    let scenario = bell_scenario();
    model_from_rows(
        &scenario,
        &[
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(3, 8), q(1, 8), q(1, 8), q(3, 8)],
            [q(3, 8), q(1, 8), q(1, 8), q(3, 8)],
            [q(1, 8), q(3, 8), q(3, 8), q(1, 8)],
        ],
    )
}

/// The PR box: perfectly correlated except on the (a′,b′) row, which is
/// perfectly anticorrelated.
pub fn pr_box_model() -> EmpiricalModel {
    let scenario = bell_scenario();
    model_from_rows(
        &scenario,
        &[
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(1, 2), q(0, 1), q(0, 1), q(1, 2)],
            [q(0, 1), q(1, 2), q(1, 2), q(0, 1)],
        ],
    )
}

/// The signed 16-vector over global assignments that generates the PR box,
/// indexed by the documented enumeration (round-robin setting order
/// (a, b, a′, b′), first member most significant).
pub fn pr_witness_vector() -> Vec<BigRational> {
    [
        q(1, 2),
        q(0, 1),
        q(0, 1),
        q(0, 1),
        q(-1, 2),
        q(0, 1),
        q(1, 2),
        q(0, 1),
        q(-1, 2),
        q(1, 2),
        q(0, 1),
        q(0, 1),
        q(1, 2),
        q(0, 1),
        q(0, 1),
        q(0, 1),
    ]
    .to_vec()
}

/// The PR witness as a signed global-assignment state.
pub fn pr_signed_state() -> Result<ClassicalState, Error> {
    let encoding = encoding_for(&bell_scenario())?;
    ClassicalState::new(
        encoding.object().clone(),
        pr_witness_vector(),
        Variant::Signed,
    )
}
