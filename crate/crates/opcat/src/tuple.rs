//! Flat tuples of atomic labels.
//!
//! Object elements, outcome labels, and setting combinations are all tuples
//! of strings. Tensoring concatenates tuples without nesting, so the
//! monoidal structure on labels is strictly associative with the empty tuple
//! as unit.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple(pub Vec<String>);

impl Tuple {
    pub fn atom(s: impl Into<String>) -> Tuple {
        Tuple(vec![s.into()])
    }

    pub fn empty() -> Tuple {
        Tuple(Vec::new())
    }

    pub fn concat(&self, other: &Tuple) -> Tuple {
        let mut atoms = self.0.clone();
        atoms.extend(other.0.iter().cloned());
        Tuple(atoms)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [single] => f.write_str(single),
            atoms => write!(f, "({})", atoms.join(",")),
        }
    }
}

impl FromStr for Tuple {
    type Err = std::convert::Infallible;

    /// Inverse of `Display` for atoms that contain no commas or parentheses:
    /// `"(a,b)"` parses to a pair, `"a"` to a single atom, `"()"` to the
    /// empty tuple.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            if inner.is_empty() {
                return Ok(Tuple::empty());
            }
            return Ok(Tuple(inner.split(',').map(str::to_string).collect()));
        }
        Ok(Tuple::atom(s))
    }
}

impl From<&str> for Tuple {
    fn from(s: &str) -> Tuple {
        s.parse().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_is_associative_and_unital() {
        let a = Tuple::atom("a");
        let bc = Tuple(vec!["b".into(), "c".into()]);
        assert_eq!(a.concat(&bc).concat(&a), a.concat(&bc.concat(&a)));
        assert_eq!(a.concat(&Tuple::empty()), a);
    }

    #[test]
    fn display_round_trips() {
        for t in [Tuple::atom("x"), Tuple(vec!["x".into(), "y".into()]), Tuple::empty()] {
            let shown = t.to_string();
            assert_eq!(shown.parse::<Tuple>().unwrap(), t);
        }
    }
}
