//! Scalar algebras: commutative semirings with involution and a zero element.
//!
//! Five instances are shipped: the Boolean semiring, finite distributive
//! lattices (locales) given by explicit meet/join tables, exact rationals,
//! Gaussian rationals, and complex doubles. Lattice instances use join as
//! addition and meet as multiplication, with identity involution.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::Error;

/// Global tolerance for complex-double comparisons (absolute, componentwise).
pub const EPSILON: f64 = 1e-9;

/// Tags the five shipped scalar algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Boolean,
    Lattice,
    Rational,
    GaussianRational,
    ComplexDouble,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Boolean => "boolean",
            Kind::Lattice => "lattice",
            Kind::Rational => "rational",
            Kind::GaussianRational => "gaussian-rational",
            Kind::ComplexDouble => "complex-double",
        }
    }
}

/// A finite bounded distributive lattice with explicit operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    elements: Vec<String>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl Lattice {
    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }
}

#[derive(Debug, PartialEq)]
enum Repr {
    Boolean,
    Rational,
    GaussianRational,
    ComplexDouble,
    Lattice(Lattice),
}

/// A scalar algebra instance. Cheap to clone; compared structurally.
#[derive(Debug, Clone)]
pub struct SemiringInstance(Arc<Repr>);

impl PartialEq for SemiringInstance {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

/// An element of one of the shipped algebras. Interpretation of the lattice
/// payload (an element index) requires the owning [`SemiringInstance`].
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Bool(bool),
    Lattice(usize),
    Rational(BigRational),
    Gaussian(BigRational, BigRational),
    Complex(Complex64),
}

impl Scalar {
    pub fn rational(num: i64, den: i64) -> Scalar {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Rational(BigRational::from(BigInt::from(n)))
    }

    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Scalar {
        Scalar::Gaussian(
            BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        )
    }

    pub fn complex(re: f64, im: f64) -> Scalar {
        Scalar::Complex(Complex64::new(re, im))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }
}

/// Parse `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let mk_err = || Error::BadRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.trim().parse().map_err(|_| mk_err())?;
    let d: BigInt = den.trim().parse().map_err(|_| mk_err())?;
    if d.is_zero() {
        return Err(mk_err());
    }
    Ok(BigRational::new(n, d))
}

/// Render a rational as `"p/q"` (or `"p"` for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl SemiringInstance {
    pub fn boolean() -> SemiringInstance {
        SemiringInstance(Arc::new(Repr::Boolean))
    }

    pub fn rational() -> SemiringInstance {
        SemiringInstance(Arc::new(Repr::Rational))
    }

    pub fn gaussian_rational() -> SemiringInstance {
        SemiringInstance(Arc::new(Repr::GaussianRational))
    }

    pub fn complex_double() -> SemiringInstance {
        SemiringInstance(Arc::new(Repr::ComplexDouble))
    }

    /// A total-order lattice ⊥ < … < ⊤ on the given labels (first = bottom).
    pub fn chain(labels: &[&str]) -> SemiringInstance {
        let n = labels.len();
        let meet: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| a.min(b)).collect()).collect();
        let join: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
        let elements: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        lattice_validate(&elements, &meet, &join).expect("chains are distributive lattices")
    }

    pub fn kind(&self) -> Kind {
        match &*self.0 {
            Repr::Boolean => Kind::Boolean,
            Repr::Rational => Kind::Rational,
            Repr::GaussianRational => Kind::GaussianRational,
            Repr::ComplexDouble => Kind::ComplexDouble,
            Repr::Lattice(_) => Kind::Lattice,
        }
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        match &*self.0 {
            Repr::Lattice(l) => Some(l),
            _ => None,
        }
    }

    /// Addition is join for lattice-like instances.
    pub fn is_lattice_like(&self) -> bool {
        matches!(self.kind(), Kind::Boolean | Kind::Lattice)
    }

    /// The three field-backed instances (rational, gaussian-rational, complex).
    pub fn is_field(&self) -> bool {
        !self.is_lattice_like()
    }

    pub fn zero(&self) -> Scalar {
        match &*self.0 {
            Repr::Boolean => Scalar::Bool(false),
            Repr::Rational => Scalar::Rational(BigRational::zero()),
            Repr::GaussianRational => Scalar::Gaussian(BigRational::zero(), BigRational::zero()),
            Repr::ComplexDouble => Scalar::Complex(Complex64::new(0.0, 0.0)),
            Repr::Lattice(l) => Scalar::Lattice(l.bottom),
        }
    }

    pub fn one(&self) -> Scalar {
        match &*self.0 {
            Repr::Boolean => Scalar::Bool(true),
            Repr::Rational => Scalar::Rational(BigRational::one()),
            Repr::GaussianRational => Scalar::Gaussian(BigRational::one(), BigRational::zero()),
            Repr::ComplexDouble => Scalar::Complex(Complex64::new(1.0, 0.0)),
            Repr::Lattice(l) => Scalar::Lattice(l.top),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.0, a, b) {
            (Repr::Boolean, Scalar::Bool(x), Scalar::Bool(y)) => Scalar::Bool(*x || *y),
            (Repr::Rational, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (Repr::GaussianRational, Scalar::Gaussian(xr, xi), Scalar::Gaussian(yr, yi)) => {
                Scalar::Gaussian(xr + yr, xi + yi)
            }
            (Repr::ComplexDouble, Scalar::Complex(x), Scalar::Complex(y)) => Scalar::Complex(x + y),
            (Repr::Lattice(l), Scalar::Lattice(x), Scalar::Lattice(y)) => {
                Scalar::Lattice(l.join(*x, *y))
            }
            _ => panic!("scalar payload does not match instance {}", self.kind().name()),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&*self.0, a, b) {
            (Repr::Boolean, Scalar::Bool(x), Scalar::Bool(y)) => Scalar::Bool(*x && *y),
            (Repr::Rational, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (Repr::GaussianRational, Scalar::Gaussian(xr, xi), Scalar::Gaussian(yr, yi)) => {
                Scalar::Gaussian(xr * yr - xi * yi, xr * yi + xi * yr)
            }
            (Repr::ComplexDouble, Scalar::Complex(x), Scalar::Complex(y)) => Scalar::Complex(x * y),
            (Repr::Lattice(l), Scalar::Lattice(x), Scalar::Lattice(y)) => {
                Scalar::Lattice(l.meet(*x, *y))
            }
            _ => panic!("scalar payload does not match instance {}", self.kind().name()),
        }
    }

    /// The involution: complex conjugation on the numeric instances, identity
    /// on Boolean and lattice instances.
    pub fn conj(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Gaussian(re, im) => Scalar::Gaussian(re.clone(), -im),
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
            other => other.clone(),
        }
    }

    /// Instance equality: exact everywhere except complex-double, which uses
    /// [`EPSILON`] componentwise.
    pub fn eq(&self, a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Complex(x), Scalar::Complex(y)) => {
                (x.re - y.re).abs() <= EPSILON && (x.im - y.im).abs() <= EPSILON
            }
            _ => a == b,
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        self.eq(a, &self.zero())
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        self.eq(a, &self.one())
    }

    /// Lattice order: a ≤ b iff a ∧ b = a. Only for lattice-like instances.
    pub fn leq(&self, a: &Scalar, b: &Scalar) -> bool {
        assert!(self.is_lattice_like());
        self.eq(&self.mul(a, b), a)
    }

    /// Subtraction, defined for the field-backed instances only.
    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Some(Scalar::Rational(x - y)),
            (Scalar::Gaussian(xr, xi), Scalar::Gaussian(yr, yi)) => {
                Some(Scalar::Gaussian(xr - yr, xi - yi))
            }
            (Scalar::Complex(x), Scalar::Complex(y)) => Some(Scalar::Complex(x - y)),
            _ => None,
        }
    }

    /// Division, defined for the field-backed instances only (b nonzero).
    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Some(Scalar::Rational(x / y)),
            (Scalar::Gaussian(xr, xi), Scalar::Gaussian(yr, yi)) => {
                let norm = yr * yr + yi * yi;
                Some(Scalar::Gaussian(
                    (xr * yr + xi * yi) / &norm,
                    (xi * yr - xr * yi) / &norm,
                ))
            }
            (Scalar::Complex(x), Scalar::Complex(y)) => Some(Scalar::Complex(x / y)),
            _ => None,
        }
    }

    /// For field instances: is the scalar a real number ≥ 0 (within ε for
    /// complex-double)?
    pub fn is_nonneg_real(&self, a: &Scalar) -> Option<bool> {
        match a {
            Scalar::Rational(x) => Some(!x.is_negative()),
            Scalar::Gaussian(re, im) => Some(im.is_zero() && !re.is_negative()),
            Scalar::Complex(z) => Some(z.im.abs() <= EPSILON && z.re >= -EPSILON),
            _ => None,
        }
    }

    /// A random element; finite instances sample uniformly, rationals sample
    /// small fractions, complex samples the unit square.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match &*self.0 {
            Repr::Boolean => Scalar::Bool(rng.gen()),
            Repr::Lattice(l) => Scalar::Lattice(rng.gen_range(0..l.len())),
            Repr::Rational => Scalar::rational(rng.gen_range(-8..=8), rng.gen_range(1..=8)),
            Repr::GaussianRational => Scalar::gaussian(
                (rng.gen_range(-8..=8), rng.gen_range(1..=8)),
                (rng.gen_range(-8..=8), rng.gen_range(1..=8)),
            ),
            Repr::ComplexDouble => {
                Scalar::complex(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }
        }
    }

    /// All elements of a finite instance; `None` for the infinite ones.
    pub fn all_elements(&self) -> Option<Vec<Scalar>> {
        match &*self.0 {
            Repr::Boolean => Some(vec![Scalar::Bool(false), Scalar::Bool(true)]),
            Repr::Lattice(l) => Some((0..l.len()).map(Scalar::Lattice).collect()),
            _ => None,
        }
    }

    pub fn scalar_string(&self, a: &Scalar) -> String {
        match a {
            Scalar::Bool(b) => if *b { "1" } else { "0" }.to_string(),
            Scalar::Lattice(i) => self
                .lattice()
                .map(|l| l.elements[*i].clone())
                .unwrap_or_else(|| format!("#{i}")),
            Scalar::Rational(r) => rational_string(r),
            Scalar::Gaussian(re, im) => {
                if im.is_zero() {
                    rational_string(re)
                } else {
                    format!("{}{}{}i", rational_string(re), if im.is_negative() { "" } else { "+" }, rational_string(im))
                }
            }
            Scalar::Complex(z) => {
                if z.im.abs() <= EPSILON {
                    format!("{}", z.re)
                } else {
                    format!("{}{:+}i", z.re, z.im)
                }
            }
        }
    }

    pub fn scalar_to_json(&self, a: &Scalar) -> Value {
        match a {
            Scalar::Bool(b) => json!(if *b { 1 } else { 0 }),
            Scalar::Lattice(i) => json!(self.lattice().unwrap().elements[*i]),
            Scalar::Rational(r) => json!(rational_string(r)),
            Scalar::Gaussian(re, im) => json!([rational_string(re), rational_string(im)]),
            Scalar::Complex(z) => json!([z.re, z.im]),
        }
    }

    pub fn scalar_from_json(&self, v: &Value) -> Result<Scalar, Error> {
        let bad = || Error::BadScalar {
            instance: self.kind().name().to_string(),
            value: v.to_string(),
        };
        match &*self.0 {
            Repr::Boolean => match v {
                Value::Bool(b) => Ok(Scalar::Bool(*b)),
                Value::Number(n) if n.as_u64() == Some(0) => Ok(Scalar::Bool(false)),
                Value::Number(n) if n.as_u64() == Some(1) => Ok(Scalar::Bool(true)),
                _ => Err(bad()),
            },
            Repr::Lattice(l) => {
                let label = v.as_str().ok_or_else(bad)?;
                l.index_of(label).map(Scalar::Lattice).ok_or_else(|| {
                    Error::UnknownLatticeElement(label.to_string())
                })
            }
            Repr::Rational => {
                let s = v.as_str().ok_or_else(bad)?;
                Ok(Scalar::Rational(parse_rational(s)?))
            }
            Repr::GaussianRational => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let re = parse_rational(arr[0].as_str().ok_or_else(bad)?)?;
                let im = parse_rational(arr[1].as_str().ok_or_else(bad)?)?;
                Ok(Scalar::Gaussian(re, im))
            }
            Repr::ComplexDouble => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let re = arr[0].as_f64().ok_or_else(bad)?;
                let im = arr[1].as_f64().ok_or_else(bad)?;
                Ok(Scalar::complex(re, im))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match &*self.0 {
            Repr::Lattice(l) => {
                let idx_row = |row: &Vec<usize>| -> Vec<String> {
                    row.iter().map(|&i| l.elements[i].clone()).collect()
                };
                json!({"lattice": {
                    "elements": l.elements,
                    "meet": l.meet.iter().map(idx_row).collect::<Vec<_>>(),
                    "join": l.join.iter().map(idx_row).collect::<Vec<_>>(),
                }})
            }
            _ => json!(self.kind().name()),
        }
    }

    pub fn from_json(v: &Value) -> Result<SemiringInstance, Error> {
        if let Some(s) = v.as_str() {
            return match s {
                "boolean" => Ok(SemiringInstance::boolean()),
                "rational" => Ok(SemiringInstance::rational()),
                "gaussian-rational" => Ok(SemiringInstance::gaussian_rational()),
                "complex-double" => Ok(SemiringInstance::complex_double()),
                _ => Err(Error::Schema {
                    path: "instance".into(),
                    message: format!("unknown instance kind {s:?}"),
                }),
            };
        }
        let def = v
            .get("lattice")
            .or(if v.get("elements").is_some() { Some(v) } else { None })
            .ok_or_else(|| Error::Schema {
                path: "instance".into(),
                message: "expected instance name or lattice definition".into(),
            })?;
        lattice_from_json(def)
    }
}

/// Parse the lattice definition file format
/// `{"elements": [...], "meet": [[...]], "join": [[...]]}` (table cells may be
/// element labels or indices) and validate the lattice axioms.
pub fn lattice_from_json(v: &Value) -> Result<SemiringInstance, Error> {
    let err = |path: &str, message: String| Error::Schema {
        path: path.to_string(),
        message,
    };
    let elements: Vec<String> = v
        .get("elements")
        .and_then(|e| e.as_array())
        .ok_or_else(|| err("elements", "expected array of labels".into()))?
        .iter()
        .map(|e| e.as_str().map(str::to_string))
        .collect::<Option<_>>()
        .ok_or_else(|| err("elements", "labels must be strings".into()))?;
    let parse_table = |name: &str| -> Result<Vec<Vec<usize>>, Error> {
        let rows = v
            .get(name)
            .and_then(|t| t.as_array())
            .ok_or_else(|| err(name, "expected table".into()))?;
        rows.iter()
            .enumerate()
            .map(|(r, row)| {
                let cells = row
                    .as_array()
                    .ok_or_else(|| err(&format!("{name}[{r}]"), "expected row".into()))?;
                cells
                    .iter()
                    .enumerate()
                    .map(|(c, cell)| {
                        let path = format!("{name}[{r}][{c}]");
                        if let Some(label) = cell.as_str() {
                            elements
                                .iter()
                                .position(|e| e == label)
                                .ok_or_else(|| err(&path, format!("unknown element {label:?}")))
                        } else if let Some(i) = cell.as_u64() {
                            Ok(i as usize)
                        } else {
                            Err(err(&path, "expected element label or index".into()))
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let meet = parse_table("meet")?;
    let join = parse_table("join")?;
    lattice_validate(&elements, &meet, &join)
}

/// Check that the given tables define a bounded distributive lattice and
/// return the corresponding semiring instance. Finite lattices are
/// automatically complete, so the result is a locale.
///
/// The first violated axiom is reported with a witness triple.
pub fn lattice_validate(
    elements: &[String],
    meet: &[Vec<usize>],
    join: &[Vec<usize>],
) -> Result<SemiringInstance, Error> {
    let n = elements.len();
    if n == 0 {
        return Err(Error::LatticeAxiom {
            axiom: "nonempty".into(),
            witness: String::new(),
        });
    }
    for (name, table) in [("meet", meet), ("join", join)] {
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Schema {
                path: name.to_string(),
                message: format!("table must be {n}x{n}"),
            });
        }
        for row in table {
            for &cell in row {
                if cell >= n {
                    return Err(Error::Schema {
                        path: name.to_string(),
                        message: format!("index {cell} out of range"),
                    });
                }
            }
        }
    }
    {
        let mut seen = std::collections::HashSet::new();
        for label in elements {
            if !seen.insert(label) {
                return Err(Error::Schema {
                    path: "elements".into(),
                    message: format!("duplicate label {label:?}"),
                });
            }
        }
    }

    let el = |i: usize| elements[i].as_str();
    let fail = |axiom: &str, witness: &[usize]| -> Result<SemiringInstance, Error> {
        Err(Error::LatticeAxiom {
            axiom: axiom.to_string(),
            witness: witness.iter().map(|&i| el(i)).collect::<Vec<_>>().join(", "),
        })
    };

    for a in 0..n {
        if meet[a][a] != a {
            return fail("meet idempotence", &[a]);
        }
        if join[a][a] != a {
            return fail("join idempotence", &[a]);
        }
        for b in 0..n {
            if meet[a][b] != meet[b][a] {
                return fail("meet commutativity", &[a, b]);
            }
            if join[a][b] != join[b][a] {
                return fail("join commutativity", &[a, b]);
            }
            if meet[a][join[a][b]] != a {
                return fail("absorption a∧(a∨b)=a", &[a, b]);
            }
            if join[a][meet[a][b]] != a {
                return fail("absorption a∨(a∧b)=a", &[a, b]);
            }
            for c in 0..n {
                if meet[meet[a][b]][c] != meet[a][meet[b][c]] {
                    return fail("meet associativity", &[a, b, c]);
                }
                if join[join[a][b]][c] != join[a][join[b][c]] {
                    return fail("join associativity", &[a, b, c]);
                }
                if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]] {
                    return fail("distributivity a∧(b∨c)=(a∧b)∨(a∧c)", &[a, b, c]);
                }
            }
        }
    }

    // Bounds: fold the tables over all elements. The lattice axioms above
    // guarantee these are the least/greatest elements.
    let bottom = (0..n).fold(0, |acc, i| meet[acc][i]);
    let top = (0..n).fold(0, |acc, i| join[acc][i]);

    Ok(SemiringInstance(Arc::new(Repr::Lattice(Lattice {
        elements: elements.to_vec(),
        meet: meet.to_vec(),
        join: join.to_vec(),
        bottom,
        top,
    }))))
}

/// Result of [`validate_semiring`]: empty `violations` means all axioms held
/// on the checked triples.
#[derive(Debug)]
pub struct SemiringReport {
    pub checked_triples: usize,
    pub violations: Vec<String>,
}

impl SemiringReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Property-check the commutative-semiring-with-involution axioms on element
/// triples: exhaustively for finite instances, by sampling otherwise.
pub fn validate_semiring(instance: &SemiringInstance, samples: usize) -> SemiringReport {
    assert!(samples >= 1);
    let mut rng = crate::rng(0x5e31);
    let triples: Vec<[Scalar; 3]> = match instance.all_elements() {
        Some(elems) => {
            let mut out = Vec::new();
            for a in &elems {
                for b in &elems {
                    for c in &elems {
                        out.push([a.clone(), b.clone(), c.clone()]);
                    }
                }
            }
            out
        }
        None => (0..samples)
            .map(|_| {
                [
                    instance.sample(&mut rng),
                    instance.sample(&mut rng),
                    instance.sample(&mut rng),
                ]
            })
            .collect(),
    };

    let mut violations = Vec::new();
    let s = instance;
    let zero = s.zero();
    let one = s.one();
    let mut check = |name: &str, lhs: Scalar, rhs: Scalar, wit: &[Scalar; 3]| {
        if !s.eq(&lhs, &rhs) {
            violations.push(format!(
                "{name} violated at ({}, {}, {})",
                s.scalar_string(&wit[0]),
                s.scalar_string(&wit[1]),
                s.scalar_string(&wit[2])
            ));
        }
    };
    for t in &triples {
        let [a, b, c] = t;
        check("add associativity", s.add(&s.add(a, b), c), s.add(a, &s.add(b, c)), t);
        check("add commutativity", s.add(a, b), s.add(b, a), t);
        check("mul associativity", s.mul(&s.mul(a, b), c), s.mul(a, &s.mul(b, c)), t);
        check("mul commutativity", s.mul(a, b), s.mul(b, a), t);
        check("distributivity", s.mul(a, &s.add(b, c)), s.add(&s.mul(a, b), &s.mul(a, c)), t);
        check("additive unit", s.add(a, &zero), a.clone(), t);
        check("multiplicative unit", s.mul(a, &one), a.clone(), t);
        check("zero annihilation", s.mul(a, &zero), zero.clone(), t);
        check("involution additive", s.conj(&s.add(a, b)), s.add(&s.conj(a), &s.conj(b)), t);
        check("involution multiplicative", s.conj(&s.mul(a, b)), s.mul(&s.conj(a), &s.conj(b)), t);
        check("involution involutive", s.conj(&s.conj(a)), a.clone(), t);
    }
    if !s.eq(&s.conj(&zero), &zero) {
        violations.push("involution does not fix 0".into());
    }
    if !s.eq(&s.conj(&one), &one) {
        violations.push("involution does not fix 1".into());
    }
    SemiringReport {
        checked_triples: triples.len(),
        violations,
    }
}

impl fmt::Display for SemiringInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Lattice(l) => write!(f, "lattice({})", l.elements.join(", ")),
            _ => f.write_str(self.kind().name()),
        }
    }
}
