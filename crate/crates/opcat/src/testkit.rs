//! Deterministic random generators for morphisms, states, measurements, and
//! dagger-isomorphisms over every shipped scalar instance. Shared by the unit
//! and integration test suites; not part of the stable API.

use rand::Rng;

use crate::matcat::{Mor, Obj};
use crate::operational::{Measurement, State, Transformation};
use crate::semiring::{Kind, Scalar, SemiringInstance};
use crate::tuple::Tuple;

/// Embed the rational n/d into any field instance.
pub fn embed_rational(instance: &SemiringInstance, num: i64, den: i64) -> Scalar {
    match instance.kind() {
        Kind::Rational => Scalar::rational(num, den),
        Kind::GaussianRational => Scalar::gaussian((num, den), (0, 1)),
        Kind::ComplexDouble => Scalar::complex(num as f64 / den as f64, 0.0),
        _ => panic!("embed_rational requires a field instance"),
    }
}

/// A morphism with entries sampled from the instance.
pub fn random_mor<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    dom: &Obj,
    cod: &Obj,
    rng: &mut R,
) -> Mor {
    Mor::from_fn(instance, dom.clone(), cod.clone(), |_, _| instance.sample(rng))
}

fn permutation_matrix<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> Mor {
    let n = obj.dim();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let one = instance.one();
    let zero = instance.zero();
    Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
        if perm[c] == r {
            one.clone()
        } else {
            zero.clone()
        }
    })
}

/// A rational Givens rotation on a random coordinate pair: cos = (a²−b²)/(a²+b²),
/// sin = 2ab/(a²+b²) are exact rationals, so the rotation is a dagger-iso in
/// every field instance.
fn givens_rotation<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> Mor {
    let n = obj.dim();
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let a: i64 = rng.gen_range(1..6);
    let b: i64 = rng.gen_range(1..6);
    let den = a * a + b * b;
    let cos = embed_rational(instance, a * a - b * b, den);
    let sin = embed_rational(instance, 2 * a * b, den);
    let neg_sin = embed_rational(instance, -2 * a * b, den);
    let one = instance.one();
    let zero = instance.zero();
    Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
        if (r, c) == (i, i) || (r, c) == (j, j) {
            cos.clone()
        } else if (r, c) == (i, j) {
            sin.clone()
        } else if (r, c) == (j, i) {
            neg_sin.clone()
        } else if r == c {
            one.clone()
        } else {
            zero.clone()
        }
    })
}

/// A random dagger-isomorphism: a permutation for lattice-like instances,
/// a permutation composed with rational rotations for field instances.
pub fn random_dagger_iso<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> Transformation {
    let mut m = permutation_matrix(instance, obj, rng);
    if instance.is_field() && obj.dim() >= 2 {
        for _ in 0..rng.gen_range(1..=2) {
            m = givens_rotation(instance, obj, rng).compose(&m).unwrap();
        }
    }
    Transformation::new(m).expect("constructed dagger-iso")
}

/// A unit-norm column ψ : I → A, obtained by rotating a basis column.
pub fn random_unit_vector<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> Mor {
    let i = rng.gen_range(0..obj.dim());
    let one = instance.one();
    let zero = instance.zero();
    let e = Mor::from_fn(instance, Obj::unit(), obj.clone(), |r, _| {
        if r == i {
            one.clone()
        } else {
            zero.clone()
        }
    });
    random_dagger_iso(instance, obj, rng)
        .matrix()
        .compose(&e)
        .unwrap()
}

/// Random weights summing to 1 with small denominators.
fn random_convex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(i64, i64)> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let mut raw = raw;
    if raw.iter().all(|&w| w == 0) {
        raw[0] = 1;
    }
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| (w, total)).collect()
}

/// A random state. Field instances: U D U† for a random dagger-iso U and
/// random convex diagonal D (exactly positive, trace 1). Lattice-like
/// instances: P_S for a random S with join ⊤, or its diagonal Δ_S.
pub fn random_state<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> State {
    if instance.is_field() {
        let u = random_dagger_iso(instance, obj, rng);
        let weights = random_convex_weights(obj.dim(), rng);
        let diag = Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
            if r == c {
                embed_rational(instance, weights[r].0, weights[r].1)
            } else {
                instance.zero()
            }
        });
        let m = u
            .matrix()
            .compose(&diag)
            .unwrap()
            .compose(&u.matrix().dagger())
            .unwrap();
        State::new(m).expect("conjugated convex diagonal is a state")
    } else {
        let s = random_cover_subset(instance, obj.dim(), rng);
        if rng.gen() {
            // P_S = the pure state on the column S.
            let psi = Mor::from_fn(instance, Obj::unit(), obj.clone(), |r, _| s[r].clone());
            State::from_pure(&psi).expect("S joins to top")
        } else {
            let d = Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
                if r == c {
                    s[r].clone()
                } else {
                    instance.zero()
                }
            });
            State::new(d).expect("Δ_S is a state when S joins to top")
        }
    }
}

/// A random Ω-subset on `n` elements whose join is ⊤.
fn random_cover_subset<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    n: usize,
    rng: &mut R,
) -> Vec<Scalar> {
    loop {
        let s: Vec<Scalar> = (0..n).map(|_| instance.sample(rng)).collect();
        let join = s
            .iter()
            .fold(instance.zero(), |acc, v| instance.add(&acc, v));
        if instance.is_one(&join) {
            return s;
        }
    }
}

/// A random measurement with a fixed outcome label list (projectors for
/// unused outcomes are zero, which is a valid disjoint summand). Field
/// instances are conjugated by a random dagger-iso.
pub fn random_labeled_measurement<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    labels: &[Tuple],
    rng: &mut R,
) -> Measurement {
    let n = obj.dim();
    let k = labels.len();
    let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut projectors: Vec<Mor> = (0..k)
        .map(|g| {
            let one = instance.one();
            let zero = instance.zero();
            Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
                if r == c && assignment[r] == g {
                    one.clone()
                } else {
                    zero.clone()
                }
            })
        })
        .collect();
    if instance.is_field() {
        let u = random_dagger_iso(instance, obj, rng);
        projectors = projectors
            .into_iter()
            .map(|p| {
                u.matrix()
                    .compose(&p)
                    .unwrap()
                    .compose(&u.matrix().dagger())
                    .unwrap()
            })
            .collect();
    }
    Measurement::new(labels.to_vec(), projectors).expect("constructed measurement is valid")
}

/// A random two-outcome measurement labelled "0"/"1".
pub fn random_binary_measurement<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> Measurement {
    random_labeled_measurement(instance, obj, &[Tuple::atom("0"), Tuple::atom("1")], rng)
}

/// A random crisp disjoint cover of a lattice-like base: each base element
/// is assigned to exactly one outcome, so subsets take only ⊥/⊤ values.
/// Outcomes are labelled "0", "1", … and unused outcomes keep empty subsets.
pub fn random_crisp_cover<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    base: &Obj,
    rng: &mut R,
) -> crate::rel::DisjointCover {
    let k = rng.gen_range(1..=base.dim().min(3));
    let assignment: Vec<usize> = (0..base.dim()).map(|_| rng.gen_range(0..k)).collect();
    let outcomes: Vec<Tuple> = (0..k).map(|g| Tuple::atom(g.to_string())).collect();
    let subsets = (0..k)
        .map(|g| {
            let values = assignment
                .iter()
                .map(|&a| if a == g { instance.one() } else { instance.zero() })
                .collect();
            crate::rel::OmegaSubset::new(base.clone(), instance.clone(), values)
                .expect("crisp subset")
        })
        .collect();
    crate::rel::DisjointCover::new(outcomes, subsets).expect("crisp partition is a cover")
}

/// A random projective measurement. Field instances: a random basis
/// partition conjugated by a random dagger-iso. Lattice-like instances: a
/// crisp partition of the base set into Δ_S sub-identities.
pub fn random_measurement<R: Rng + ?Sized>(
    instance: &SemiringInstance,
    obj: &Obj,
    rng: &mut R,
) -> Measurement {
    let n = obj.dim();
    let k = rng.gen_range(1..=n);
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    // Keep outcomes with nonempty fibres only, relabelled densely.
    let mut used: Vec<usize> = assignment.clone();
    used.sort_unstable();
    used.dedup();
    for a in &mut assignment {
        *a = used.iter().position(|u| u == a).unwrap();
    }
    let outcomes: Vec<Tuple> = (0..used.len())
        .map(|g| Tuple::atom(format!("o{g}")))
        .collect();
    let diag_projector = |g: usize| {
        let one = instance.one();
        let zero = instance.zero();
        Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
            if r == c && assignment[r] == g {
                one.clone()
            } else {
                zero.clone()
            }
        })
    };
    let mut projectors: Vec<Mor> = (0..used.len()).map(diag_projector).collect();
    if instance.is_field() {
        let u = random_dagger_iso(instance, obj, rng);
        projectors = projectors
            .into_iter()
            .map(|p| {
                u.matrix()
                    .compose(&p)
                    .unwrap()
                    .compose(&u.matrix().dagger())
                    .unwrap()
            })
            .collect();
    }
    Measurement::new(outcomes, projectors).expect("constructed measurement is valid")
}
