//! The category Mat(S): finitely-indexed matrices over a semiring instance.
//!
//! Objects are finite label lists, morphisms are dense matrices, composition
//! is matrix multiplication evaluated in the semiring, the dagger is
//! conjugate transpose, and the tensor is the Kronecker product. The monoidal
//! structure is strict: object labels are flat tuples (see [`crate::tuple`])
//! so associators and unitors are identities, and the symmetry is an explicit
//! permutation matrix.

use serde_json::{json, Value};

use crate::error::Error;
use crate::semiring::{Scalar, SemiringInstance};
use crate::tuple::Tuple;

/// An object of Mat(S): an ordered finite list of distinct element labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obj {
    elems: Vec<Tuple>,
}

impl Obj {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Obj {
        let elems: Vec<Tuple> = labels.iter().map(|s| Tuple::atom(s.as_ref())).collect();
        Obj { elems }
    }

    pub fn from_tuples(elems: Vec<Tuple>) -> Obj {
        Obj { elems }
    }

    /// The tensor unit: the singleton set whose element is the empty tuple.
    pub fn unit() -> Obj {
        Obj {
            elems: vec![Tuple::empty()],
        }
    }

    pub fn is_unit(&self) -> bool {
        self.elems.len() == 1 && self.elems[0].is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[Tuple] {
        &self.elems
    }

    /// Lexicographic left-major flattening; strictly associative.
    pub fn tensor(&self, other: &Obj) -> Obj {
        let mut elems = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.elems {
            for b in &other.elems {
                elems.push(a.concat(b));
            }
        }
        Obj { elems }
    }

    pub fn label_strings(&self) -> Vec<String> {
        self.elems.iter().map(|t| t.to_string()).collect()
    }

    pub fn describe(&self) -> String {
        format!("[{}]", self.label_strings().join(", "))
    }
}

/// A morphism of Mat(S): a |cod| × |dom| matrix of scalars.
#[derive(Debug, Clone)]
pub struct Mor {
    instance: SemiringInstance,
    dom: Obj,
    cod: Obj,
    entries: Vec<Scalar>, // row-major, entries[cod_idx * dom.dim() + dom_idx]
}

impl Mor {
    pub fn from_fn(
        instance: &SemiringInstance,
        dom: Obj,
        cod: Obj,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Mor {
        let mut entries = Vec::with_capacity(dom.dim() * cod.dim());
        for r in 0..cod.dim() {
            for c in 0..dom.dim() {
                entries.push(f(r, c));
            }
        }
        Mor {
            instance: instance.clone(),
            dom,
            cod,
            entries,
        }
    }

    /// Build from rows of scalars (outer index = codomain).
    pub fn from_rows(
        instance: &SemiringInstance,
        dom: Obj,
        cod: Obj,
        rows: Vec<Vec<Scalar>>,
    ) -> Result<Mor, Error> {
        if rows.len() != cod.dim() || rows.iter().any(|r| r.len() != dom.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "entry grid must be {}x{}",
                cod.dim(),
                dom.dim()
            )));
        }
        Ok(Mor {
            instance: instance.clone(),
            dom,
            cod,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(instance: &SemiringInstance, obj: &Obj) -> Mor {
        let one = instance.one();
        let zero = instance.zero();
        Mor::from_fn(instance, obj.clone(), obj.clone(), |r, c| {
            if r == c {
                one.clone()
            } else {
                zero.clone()
            }
        })
    }

    /// The zero morphism 0_{A,B}.
    pub fn zero(instance: &SemiringInstance, dom: &Obj, cod: &Obj) -> Mor {
        let zero = instance.zero();
        Mor::from_fn(instance, dom.clone(), cod.clone(), |_, _| zero.clone())
    }

    /// A scalar as an endomorphism of the tensor unit.
    pub fn scalar(instance: &SemiringInstance, s: Scalar) -> Mor {
        let unit = Obj::unit();
        Mor {
            instance: instance.clone(),
            dom: unit.clone(),
            cod: unit,
            entries: vec![s],
        }
    }

    /// The symmetry σ_{A,B} : A⊗B → B⊗A as a permutation matrix.
    pub fn symmetry(instance: &SemiringInstance, a: &Obj, b: &Obj) -> Mor {
        let (na, nb) = (a.dim(), b.dim());
        let one = instance.one();
        let zero = instance.zero();
        Mor::from_fn(instance, a.tensor(b), b.tensor(a), |r, c| {
            let (rb, ra) = (r / na, r % na);
            let (ca, cb) = (c / nb, c % nb);
            if ra == ca && rb == cb {
                one.clone()
            } else {
                zero.clone()
            }
        })
    }

    pub fn instance(&self) -> &SemiringInstance {
        &self.instance
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub fn get(&self, cod_idx: usize, dom_idx: usize) -> &Scalar {
        &self.entries[cod_idx * self.dom.dim() + dom_idx]
    }

    pub fn is_endo(&self) -> bool {
        self.dom == self.cod
    }

    /// Entrywise instance equality (ε-tolerant for complex-double).
    pub fn equals(&self, other: &Mor) -> bool {
        self.instance == other.instance
            && self.dom == other.dom
            && self.cod == other.cod
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| self.instance.eq(a, b))
    }

    fn check_instance(&self, other: &Mor) -> Result<(), Error> {
        if self.instance != other.instance {
            return Err(Error::InstanceMismatch(
                self.instance.to_string(),
                other.instance.to_string(),
            ));
        }
        Ok(())
    }

    /// Matrix product g ∘ f (this = g).
    pub fn compose(&self, f: &Mor) -> Result<Mor, Error> {
        self.check_instance(f)?;
        if f.cod != self.dom {
            return Err(Error::ShapeMismatch(format!(
                "compose: inner objects differ, {} vs {}",
                f.cod.describe(),
                self.dom.describe()
            )));
        }
        let s = &self.instance;
        let mid = self.dom.dim();
        Ok(Mor::from_fn(s, f.dom.clone(), self.cod.clone(), |r, c| {
            let mut acc = s.zero();
            for k in 0..mid {
                acc = s.add(&acc, &s.mul(self.get(r, k), f.get(k, c)));
            }
            acc
        }))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mor {
        let s = self.instance.clone();
        Mor::from_fn(&s.clone(), self.cod.clone(), self.dom.clone(), |r, c| {
            s.conj(self.get(c, r))
        })
    }

    /// Kronecker product; indices flatten left-factor major.
    pub fn tensor(&self, g: &Mor) -> Result<Mor, Error> {
        self.check_instance(g)?;
        let s = &self.instance;
        let (gd, gc) = (g.dom.dim(), g.cod.dim());
        Ok(Mor::from_fn(
            s,
            self.dom.tensor(&g.dom),
            self.cod.tensor(&g.cod),
            |r, c| s.mul(self.get(r / gc, c / gd), g.get(r % gc, c % gd)),
        ))
    }

    /// Entrywise sum (join for lattice instances).
    pub fn add(&self, other: &Mor) -> Result<Mor, Error> {
        self.check_instance(other)?;
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::ShapeMismatch("add: shapes differ".into()));
        }
        let s = &self.instance;
        Ok(Mor::from_fn(s, self.dom.clone(), self.cod.clone(), |r, c| {
            s.add(self.get(r, c), other.get(r, c))
        }))
    }

    /// Every endomorphism of finite Mat(S) is trace class.
    pub fn is_trace_class(&self) -> bool {
        self.is_endo()
    }

    /// Sum (lattice: join) of the diagonal.
    pub fn trace(&self) -> Result<Scalar, Error> {
        if !self.is_endo() {
            return Err(Error::NotEndomorphism {
                dom: self.dom.describe(),
                cod: self.cod.describe(),
            });
        }
        let s = &self.instance;
        let mut acc = s.zero();
        for i in 0..self.dom.dim() {
            acc = s.add(&acc, self.get(i, i));
        }
        Ok(acc)
    }

    pub fn is_dagger_iso(&self) -> bool {
        let dg = self.dagger();
        let left = dg.compose(self).expect("shapes match by construction");
        let right = self.compose(&dg).expect("shapes match by construction");
        left.equals(&Mor::identity(&self.instance, &self.dom))
            && right.equals(&Mor::identity(&self.instance, &self.cod))
    }

    /// Positivity test, dispatched on the instance family.
    ///
    /// Field instances: Hermitian plus positive-semidefinite via pivoted
    /// LDL† with all pivots ≥ 0 (exact, or ε-tolerant for complex-double).
    ///
    /// Lattice-like instances: s = s†, diagonal domination
    /// s(x,y) ≤ s(x,x) ∧ s(y,y), and s = R†∘R for R := s itself or the
    /// column factorization through the diagonal. A sufficient criterion
    /// covering the states arising from sub-identities and pure relations.
    pub fn is_positive(&self) -> bool {
        if !self.is_endo() {
            return false;
        }
        if !self.equals(&self.dagger()) {
            return false;
        }
        if self.instance.is_field() {
            self.is_psd_field()
        } else {
            self.is_positive_lattice()
        }
    }

    fn is_psd_field(&self) -> bool {
        let s = &self.instance;
        let n = self.dom.dim();
        let mut m: Vec<Vec<Scalar>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let mut active: Vec<usize> = (0..n).collect();
        loop {
            // Diagonals of a Hermitian PSD matrix must be nonnegative reals.
            for &i in &active {
                match s.is_nonneg_real(&m[i][i]) {
                    Some(true) => {}
                    _ => return false,
                }
            }
            let pivot = active
                .iter()
                .copied()
                .find(|&i| !s.is_zero(&m[i][i]));
            let Some(p) = pivot else {
                // All remaining diagonals are zero: PSD requires the rest of
                // the block to vanish too.
                return active
                    .iter()
                    .all(|&i| active.iter().all(|&j| s.is_zero(&m[i][j])));
            };
            let d = m[p][p].clone();
            active.retain(|&i| i != p);
            for &i in &active {
                for &j in &active {
                    let correction = s
                        .div(&s.mul(&m[i][p], &m[p][j]), &d)
                        .expect("field instance");
                    m[i][j] = s
                        .sub(&m[i][j], &correction)
                        .expect("field instance");
                }
            }
            if active.is_empty() {
                return true;
            }
        }
    }

    fn is_positive_lattice(&self) -> bool {
        let s = &self.instance;
        let n = self.dom.dim();
        for x in 0..n {
            for y in 0..n {
                let bound = s.mul(self.get(x, x), self.get(y, y));
                if !s.leq(self.get(x, y), &bound) {
                    return false;
                }
            }
        }
        // R := s itself (s symmetric, so R†∘R = s∘s).
        if let Ok(sq) = self.compose(self) {
            if sq.equals(self) {
                return true;
            }
        }
        // Column factorization through the diagonal: s(x,y) = d(x) ∧ d(y).
        let outer = Mor::from_fn(s, self.dom.clone(), self.cod.clone(), |r, c| {
            s.mul(self.get(r, r), self.get(c, c))
        });
        outer.equals(self)
    }

    pub fn to_json(&self) -> Value {
        let s = &self.instance;
        let rows: Vec<Vec<Value>> = (0..self.cod.dim())
            .map(|r| {
                (0..self.dom.dim())
                    .map(|c| s.scalar_to_json(self.get(r, c)))
                    .collect()
            })
            .collect();
        json!({
            "instance": s.to_json(),
            "dom": self.dom.label_strings(),
            "cod": self.cod.label_strings(),
            "entries": rows,
        })
    }

    pub fn from_json(v: &Value) -> Result<Mor, Error> {
        let instance = SemiringInstance::from_json(v.get("instance").ok_or_else(|| Error::Schema {
            path: "instance".into(),
            message: "missing".into(),
        })?)?;
        Mor::from_json_with_instance(&instance, v)
    }

    /// Parse the matrix literal, with `dom`/`cod` optional when the caller
    /// supplies the instance and the entry grid fixes the shape.
    pub fn from_json_with_instance(instance: &SemiringInstance, v: &Value) -> Result<Mor, Error> {
        let parse_obj = |key: &str| -> Result<Option<Obj>, Error> {
            match v.get(key) {
                None => Ok(None),
                Some(arr) => {
                    let labels = arr.as_array().ok_or_else(|| Error::Schema {
                        path: key.into(),
                        message: "expected label array".into(),
                    })?;
                    let elems = labels
                        .iter()
                        .map(|l| {
                            l.as_str()
                                .map(|s| s.parse::<Tuple>().unwrap())
                                .ok_or_else(|| Error::Schema {
                                    path: key.into(),
                                    message: "labels must be strings".into(),
                                })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Some(Obj::from_tuples(elems)))
                }
            }
        };
        let rows_v = v
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| Error::Schema {
                path: "entries".into(),
                message: "expected entry grid".into(),
            })?;
        let mut rows = Vec::with_capacity(rows_v.len());
        for (r, row_v) in rows_v.iter().enumerate() {
            let cells = row_v.as_array().ok_or_else(|| Error::Schema {
                path: format!("entries[{r}]"),
                message: "expected row".into(),
            })?;
            let row = cells
                .iter()
                .map(|c| instance.scalar_from_json(c))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let default_obj = |n: usize| Obj::new(&(0..n).map(|i| i.to_string()).collect::<Vec<_>>());
        let dom = parse_obj("dom")?.unwrap_or_else(|| default_obj(ncols));
        let cod = parse_obj("cod")?.unwrap_or_else(|| default_obj(rows.len()));
        Mor::from_rows(instance, dom, cod, rows)
    }
}

/// The minimal-trace-ideal agreement check: for a : I→A and b : A→I,
/// returns (Tr(a∘b), b∘a as a scalar). The Appendix-level fact is that the
/// two coincide for morphisms factoring through the unit.
pub fn minimal_trace_check(a: &Mor, b: &Mor) -> Result<(Scalar, Scalar), Error> {
    if !a.dom().is_unit() || !b.cod().is_unit() || a.cod() != b.dom() {
        return Err(Error::ShapeMismatch(
            "expected a : I -> A and b : A -> I".into(),
        ));
    }
    let tr = a.compose(b)?.trace()?;
    let scalar = b.compose(a)?.get(0, 0).clone();
    Ok((tr, scalar))
}

/// A morphism of the doubling Dbl(C): a forward/backward pair.
#[derive(Debug, Clone)]
pub struct DblMor {
    pub fwd: Mor,
    pub bwd: Mor,
}

impl DblMor {
    pub fn new(fwd: Mor, bwd: Mor) -> Result<DblMor, Error> {
        if fwd.dom() != bwd.cod() || fwd.cod() != bwd.dom() {
            return Err(Error::ShapeMismatch(
                "doubling pair must have opposite shapes".into(),
            ));
        }
        Ok(DblMor { fwd, bwd })
    }

    /// η(f) = (f, f†), the unit of the cofree dagger structure.
    pub fn lift(f: &Mor) -> DblMor {
        DblMor {
            bwd: f.dagger(),
            fwd: f.clone(),
        }
    }

    pub fn compose(&self, other: &DblMor) -> Result<DblMor, Error> {
        DblMor::new(
            self.fwd.compose(&other.fwd)?,
            other.bwd.compose(&self.bwd)?,
        )
    }

    /// (f, g)† = (g, f).
    pub fn dagger(&self) -> DblMor {
        DblMor {
            fwd: self.bwd.clone(),
            bwd: self.fwd.clone(),
        }
    }

    pub fn tensor(&self, other: &DblMor) -> Result<DblMor, Error> {
        DblMor::new(self.fwd.tensor(&other.fwd)?, self.bwd.tensor(&other.bwd)?)
    }

    /// Tr(f, g) = (Tr f, Tr g).
    pub fn trace(&self) -> Result<(Scalar, Scalar), Error> {
        Ok((self.fwd.trace()?, self.bwd.trace()?))
    }

    pub fn equals(&self, other: &DblMor) -> bool {
        self.fwd.equals(&other.fwd) && self.bwd.equals(&other.bwd)
    }

    pub fn identity(instance: &SemiringInstance, obj: &Obj) -> DblMor {
        let id = Mor::identity(instance, obj);
        DblMor {
            fwd: id.clone(),
            bwd: id,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Scalar as Sc;

    fn rat() -> SemiringInstance {
        SemiringInstance::rational()
    }

    fn rat_mor(dom: usize, cod: usize, vals: &[&[i64]]) -> Mor {
        let dom = Obj::new(&(0..dom).map(|i| i.to_string()).collect::<Vec<_>>());
        let cod = Obj::new(&(0..cod).map(|i| i.to_string()).collect::<Vec<_>>());
        Mor::from_rows(
            &rat(),
            dom,
            cod,
            vals.iter().map(|r| r.iter().map(|&v| Sc::int(v)).collect()).collect(),
        )
        .unwrap()
    }

    fn random_mor(inst: &SemiringInstance, dom: &Obj, cod: &Obj, rng: &mut impl rand::Rng) -> Mor {
        Mor::from_fn(inst, dom.clone(), cod.clone(), |_, _| inst.sample(rng))
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = crate::rng(1);
        let a = Obj::new(&["x", "y", "z"]);
        let b = Obj::new(&["u", "v"]);
        let f = random_mor(&rat(), &a, &b, &mut rng);
        assert!(Mor::identity(&rat(), &b).compose(&f).unwrap().equals(&f));
        assert!(f.compose(&Mor::identity(&rat(), &a)).unwrap().equals(&f));
    }

    #[test]
    fn boolean_relational_composition() {
        let inst = SemiringInstance::boolean();
        let xs = Obj::new(&["x1", "x2"]);
        let ys = Obj::new(&["y1", "y2"]);
        let zs = Obj::new(&["z1", "z2"]);
        let t = Sc::Bool(true);
        let f = Sc::Bool(false);
        // R = {(x1,y1)} as a matrix Y×X, S = {(y1,z1)} as Z×Y.
        let r = Mor::from_rows(&inst, xs, ys.clone(), vec![vec![t.clone(), f.clone()], vec![f.clone(), f.clone()]]).unwrap();
        let s = Mor::from_rows(&inst, ys, zs, vec![vec![t.clone(), f.clone()], vec![f.clone(), f.clone()]]).unwrap();
        let sr = s.compose(&r).unwrap();
        assert_eq!(sr.get(0, 0), &t);
        assert_eq!(sr.get(0, 1), &f);
        assert_eq!(sr.get(1, 0), &f);
    }

    #[test]
    fn rational_two_by_two_product() {
        let f = rat_mor(2, 2, &[&[0, 1], &[1, 0]]);
        let g = rat_mor(2, 2, &[&[1, 2], &[3, 4]]);
        let expected = rat_mor(2, 2, &[&[2, 1], &[4, 3]]);
        assert!(g.compose(&f).unwrap().equals(&expected));
    }

    #[test]
    fn dagger_laws() {
        let inst = SemiringInstance::gaussian_rational();
        let one = Obj::new(&["*"]);
        let i_mor = Mor::from_rows(&inst, one.clone(), one, vec![vec![Sc::gaussian((0, 1), (1, 1))]]).unwrap();
        assert_eq!(i_mor.dagger().get(0, 0), &Sc::gaussian((0, 1), (-1, 1)));

        let mut rng = crate::rng(2);
        let a = Obj::new(&["x", "y"]);
        let b = Obj::new(&["u", "v", "w"]);
        let c = Obj::new(&["p"]);
        let f = random_mor(&inst, &a, &b, &mut rng);
        let g = random_mor(&inst, &b, &c, &mut rng);
        let lhs = g.compose(&f).unwrap().dagger();
        let rhs = f.dagger().compose(&g.dagger()).unwrap();
        assert!(lhs.equals(&rhs));
        assert!(f.dagger().dagger().equals(&f));
        let id = Mor::identity(&inst, &a);
        assert!(id.dagger().equals(&id));
    }

    #[test]
    fn kronecker_of_swaps_is_antidiagonal() {
        let x = rat_mor(2, 2, &[&[0, 1], &[1, 0]]);
        let xx = x.tensor(&x).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r + c == 3 { Sc::int(1) } else { Sc::int(0) };
                assert_eq!(xx.get(r, c), &expected);
            }
        }
    }

    #[test]
    fn tensor_unit_is_neutral() {
        let mut rng = crate::rng(3);
        let a = Obj::new(&["x", "y"]);
        let b = Obj::new(&["u"]);
        let f = random_mor(&rat(), &a, &b, &mut rng);
        let id_i = Mor::identity(&rat(), &Obj::unit());
        assert!(f.tensor(&id_i).unwrap().equals(&f));
        assert!(id_i.tensor(&f).unwrap().equals(&f));
    }

    #[test]
    fn bifunctoriality_on_random_quadruples() {
        let mut rng = crate::rng(4);
        for inst in [rat(), SemiringInstance::boolean(), SemiringInstance::chain(&["b", "m", "t"])] {
            let a = Obj::new(&["a1", "a2"]);
            let b = Obj::new(&["b1", "b2"]);
            let c = Obj::new(&["c1", "c2"]);
            for _ in 0..25 {
                let h = random_mor(&inst, &a, &b, &mut rng);
                let f = random_mor(&inst, &b, &c, &mut rng);
                let k = random_mor(&inst, &a, &b, &mut rng);
                let g = random_mor(&inst, &b, &c, &mut rng);
                let lhs = f.tensor(&g).unwrap().compose(&h.tensor(&k).unwrap()).unwrap();
                let rhs = f.compose(&h).unwrap().tensor(&g.compose(&k).unwrap()).unwrap();
                assert!(lhs.equals(&rhs));
            }
        }
    }

    #[test]
    fn zero_absorbs() {
        let mut rng = crate::rng(5);
        let a = Obj::new(&["x", "y"]);
        let b = Obj::new(&["u", "v"]);
        let f = random_mor(&rat(), &a, &b, &mut rng);
        let z = Mor::zero(&rat(), &b, &a);
        assert!(z.compose(&f).unwrap().equals(&Mor::zero(&rat(), &a, &a)));
        let zt = f.tensor(&Mor::zero(&rat(), &a, &b)).unwrap();
        assert!(zt.equals(&Mor::zero(&rat(), zt.dom(), zt.cod())));
        assert!(Mor::zero(&rat(), &a, &b).dagger().equals(&Mor::zero(&rat(), &b, &a)));
        assert_eq!(Mor::zero(&rat(), &a, &a).trace().unwrap(), Sc::int(0));
    }

    #[test]
    fn trace_of_identity_counts_dimension() {
        let obj = Obj::new(&["a", "b", "c", "d"]);
        assert_eq!(Mor::identity(&rat(), &obj).trace().unwrap(), Sc::int(4));
    }

    #[test]
    fn trace_cyclicity() {
        let mut rng = crate::rng(6);
        let a = Obj::new(&["x", "y", "z"]);
        let b = Obj::new(&["u", "v"]);
        for inst in [rat(), SemiringInstance::boolean()] {
            for _ in 0..50 {
                let f = random_mor(&inst, &a, &b, &mut rng);
                let g = random_mor(&inst, &b, &a, &mut rng);
                let t1 = g.compose(&f).unwrap().trace().unwrap();
                let t2 = f.compose(&g).unwrap().trace().unwrap();
                assert!(inst.eq(&t1, &t2));
            }
        }
    }

    #[test]
    fn boolean_trace_is_join_of_diagonal() {
        let inst = SemiringInstance::boolean();
        let obj = Obj::new(&["x", "y"]);
        // Δ_{x} on {x,y}: diagonal true only at x.
        let d = Mor::from_rows(
            &inst,
            obj.clone(),
            obj,
            vec![
                vec![Sc::Bool(true), Sc::Bool(false)],
                vec![Sc::Bool(false), Sc::Bool(false)],
            ],
        )
        .unwrap();
        assert_eq!(d.trace().unwrap(), Sc::Bool(true));
    }

    #[test]
    fn minimal_trace_agreement() {
        let inst = rat();
        let obj = Obj::new(&["x", "y", "z"]);
        let mut rng = crate::rng(7);
        // basis column and its dagger
        let e0 = Mor::from_fn(&inst, Obj::unit(), obj.clone(), |r, _| {
            if r == 0 { Sc::int(1) } else { Sc::int(0) }
        });
        let (t, s) = minimal_trace_check(&e0, &e0.dagger()).unwrap();
        assert_eq!(t, Sc::int(1));
        assert_eq!(s, Sc::int(1));
        for _ in 0..20 {
            let a = random_mor(&inst, &Obj::unit(), &obj, &mut rng);
            let b = random_mor(&inst, &obj, &Obj::unit(), &mut rng);
            let (t, s) = minimal_trace_check(&a, &b).unwrap();
            assert_eq!(t, s);
        }
        // Boolean: both routes give join of T(x) ∧ S(x).
        let binst = SemiringInstance::boolean();
        for _ in 0..20 {
            let a = random_mor(&binst, &Obj::unit(), &obj, &mut rng);
            let b = random_mor(&binst, &obj, &Obj::unit(), &mut rng);
            let (t, s) = minimal_trace_check(&a, &b).unwrap();
            assert_eq!(t, s);
            let mut expect = Sc::Bool(false);
            for i in 0..3 {
                expect = binst.add(&expect, &binst.mul(a.get(i, 0), b.get(0, i)));
            }
            assert_eq!(t, expect);
        }
    }

    #[test]
    fn dagger_iso_detection() {
        let perm = rat_mor(3, 3, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert!(perm.is_dagger_iso());
        let shear = rat_mor(2, 2, &[&[1, 1], &[0, 1]]);
        assert!(!shear.is_dagger_iso());

        let c = SemiringInstance::complex_double();
        let obj = Obj::new(&["0", "1"]);
        let h = 1.0 / 2.0_f64.sqrt();
        let hadamard = Mor::from_rows(
            &c,
            obj.clone(),
            obj,
            vec![
                vec![Sc::complex(h, 0.0), Sc::complex(h, 0.0)],
                vec![Sc::complex(h, 0.0), Sc::complex(-h, 0.0)],
            ],
        )
        .unwrap();
        assert!(hadamard.is_dagger_iso());
    }

    #[test]
    fn positivity_field_cases() {
        let mut rng = crate::rng(8);
        let a = Obj::new(&["x", "y", "z"]);
        let b = Obj::new(&["u", "v"]);
        for inst in [rat(), SemiringInstance::gaussian_rational(), SemiringInstance::complex_double()] {
            for _ in 0..20 {
                let g = random_mor(&inst, &a, &b, &mut rng);
                let pos = g.dagger().compose(&g).unwrap();
                assert!(pos.is_positive());
            }
        }
        let skew = rat_mor(2, 2, &[&[0, 1], &[-1, 0]]);
        assert!(!skew.is_positive());
        let indef = rat_mor(2, 2, &[&[1, 0], &[0, -1]]);
        assert!(!indef.is_positive());
    }

    #[test]
    fn symmetry_is_dagger_iso_and_involutive() {
        for inst in [rat(), SemiringInstance::boolean()] {
            let a = Obj::new(&["x", "y"]);
            let b = Obj::new(&["u", "v", "w"]);
            let s_ab = Mor::symmetry(&inst, &a, &b);
            let s_ba = Mor::symmetry(&inst, &b, &a);
            assert!(s_ab.is_dagger_iso());
            let round = s_ba.compose(&s_ab).unwrap();
            assert!(round.equals(&Mor::identity(&inst, &a.tensor(&b))));
        }
    }

    #[test]
    fn strict_associativity_of_object_tensor() {
        let a = Obj::new(&["x"]);
        let b = Obj::new(&["u", "v"]);
        let c = Obj::new(&["p", "q"]);
        assert_eq!(a.tensor(&b).tensor(&c), a.tensor(&b.tensor(&c)));
        assert_eq!(a.tensor(&Obj::unit()), a);
        assert_eq!(Obj::unit().tensor(&a), a);
    }

    #[test]
    fn doubling_laws() {
        let mut rng = crate::rng(9);
        let inst = rat();
        let a = Obj::new(&["x", "y"]);
        let b = Obj::new(&["u", "v"]);
        for _ in 0..20 {
            let f = random_mor(&inst, &a, &b, &mut rng);
            let g = random_mor(&inst, &b, &a, &mut rng);
            let m = DblMor::new(f.clone(), g).unwrap();
            assert!(m.dagger().dagger().equals(&m));
            let gf = random_mor(&inst, &b, &a, &mut rng);
            let lifted = DblMor::lift(&gf.compose(&f).unwrap());
            let composed = DblMor::lift(&gf).compose(&DblMor::lift(&f)).unwrap();
            assert!(lifted.equals(&composed));
        }
        let id2 = DblMor::identity(&inst, &a);
        assert_eq!(id2.trace().unwrap(), (Sc::int(2), Sc::int(2)));
    }

    #[test]
    fn matrix_json_round_trip() {
        let f = rat_mor(2, 2, &[&[1, 2], &[3, 4]]);
        let j = f.to_json();
        let back = Mor::from_json(&j).unwrap();
        assert!(back.equals(&f));
    }
}
