//! Canonical encodings of objects, points and morphisms.
//!
//! Equality is structural: two codes denote the same object exactly when
//! they are identical.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjCode {
    Triv,
    Ord(usize),
    Fin(usize),
    Cyc(usize),
    Trunc {
        inner: Box<ObjCode>,
        bound: usize,
    },
    /// A base object of the outer category with one inner object per base point.
    Wreath {
        base: Box<ObjCode>,
        fibers: Vec<ObjCode>,
    },
    /// A functor `Ord(entries.len()) -> param`, given by its objects and the
    /// arrows between consecutive positions.
    Semidir {
        entries: Vec<ObjCode>,
        arrows: Vec<MorCode>,
    },
}

/// An element of `|I| = Hom(1, I)`.
///
/// The derived order is the canonical enumeration order of `points`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Point {
    Star,
    Elem(usize),
    Pair(Box<Point>, Box<Point>),
}

impl Point {
    pub fn pair(a: Point, b: Point) -> Point {
        Point::Pair(Box::new(a), Box::new(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorCode {
    pub src: ObjCode,
    pub tgt: ObjCode,
    pub data: MorData,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MorData {
    Unique,
    /// Image of each element index, for `Ord`, `Fin` and `Cyc`.
    Table(Vec<usize>),
    /// `comps[k]` is the component at the k-th point of the source base.
    Wreath {
        base: Box<MorCode>,
        comps: Vec<MorCode>,
    },
    /// `comps[p]` maps entry `p` of the source to entry `base[p]` of the target.
    Semidir {
        base: Vec<usize>,
        comps: Vec<MorCode>,
    },
    Trunc(Box<MorCode>),
}

impl MorCode {
    pub fn table(&self) -> Option<&[usize]> {
        match &self.data {
            MorData::Table(t) => Some(t),
            _ => None,
        }
    }
}

impl ObjCode {
    pub fn wreath(base: ObjCode, fibers: Vec<ObjCode>) -> ObjCode {
        ObjCode::Wreath {
            base: Box::new(base),
            fibers,
        }
    }

    pub fn trunc(inner: ObjCode, bound: usize) -> ObjCode {
        ObjCode::Trunc {
            inner: Box::new(inner),
            bound,
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for ObjCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjCode::Triv => write!(f, "*"),
            ObjCode::Ord(n) => write!(f, "O{n}"),
            ObjCode::Fin(n) => write!(f, "F{n}"),
            ObjCode::Cyc(n) => write!(f, "C{n}"),
            ObjCode::Trunc { inner, bound } => write!(f, "trunc({inner},{bound})"),
            ObjCode::Wreath { base, fibers } => write!(f, "({base};[{}])", join(fibers)),
            ObjCode::Semidir { entries, arrows } => {
                write!(f, "sd[{}|{}]", join(entries), join(arrows))
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Star => write!(f, "*"),
            Point::Elem(k) => write!(f, "{k}"),
            Point::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl fmt::Display for MorData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorData::Unique => write!(f, "!"),
            MorData::Table(t) => write!(f, "[{}]", join(t)),
            MorData::Wreath { base, comps } => {
                let cs: Vec<String> = comps.iter().map(|c| c.data.to_string()).collect();
                write!(f, "({};[{}])", base.data, cs.join(","))
            }
            MorData::Semidir { base, comps } => {
                let cs: Vec<String> = comps.iter().map(|c| c.data.to_string()).collect();
                write!(f, "([{}];[{}])", join(base), cs.join(","))
            }
            MorData::Trunc(inner) => write!(f, "{}", inner.data),
        }
    }
}

impl fmt::Display for MorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{}", self.src, self.tgt, self.data)
    }
}
