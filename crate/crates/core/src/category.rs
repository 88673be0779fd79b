//! Operator-category instances behind one handle.

use std::fmt;

use crate::code::{MorCode, MorData, ObjCode, Point};
use crate::error::{exactly_one, OpcatError, Result};

/// An operator-category instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    Triv,
    /// Finite ordered sets and monotone maps.
    Ord,
    /// Finite sets and all maps.
    Fin,
    /// Finite cyclically ordered sets and cyclically monotone maps.
    Cyc,
    /// Full subcategory of objects with at most `bound` points.
    Trunc { inner: Box<Category>, bound: usize },
    /// `inner ≀ outer`.
    Wreath {
        inner: Box<Category>,
        outer: Box<Category>,
    },
    /// `param ⋊ O`.
    Semidir { param: Box<Category> },
}

/// A fiber `J_i` of a morphism together with its inclusion into `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub obj: ObjCode,
    pub incl: MorCode,
}

/// Equational constraints on an unknown morphism `h: J -> I`.
///
/// Each `post` pair `(p, e)` demands `p ∘ h = e`; each `pre` pair `(q, e)`
/// demands `h ∘ q = e`.
#[derive(Clone, Debug, Default)]
pub struct Constraints<'a> {
    pub post: Vec<(&'a MorCode, &'a MorCode)>,
    pub pre: Vec<(&'a MorCode, &'a MorCode)>,
}

impl<'a> Constraints<'a> {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn post(mut self, p: &'a MorCode, e: &'a MorCode) -> Self {
        self.post.push((p, e));
        self
    }

    pub fn pre(mut self, q: &'a MorCode, e: &'a MorCode) -> Self {
        self.pre.push((q, e));
        self
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum TableKind {
    Ord,
    Fin,
    Cyc,
}

impl TableKind {
    fn obj(self, n: usize) -> ObjCode {
        match self {
            TableKind::Ord => ObjCode::Ord(n),
            TableKind::Fin => ObjCode::Fin(n),
            TableKind::Cyc => ObjCode::Cyc(n),
        }
    }

    fn size(self, obj: &ObjCode) -> Option<usize> {
        match (self, obj) {
            (TableKind::Ord, ObjCode::Ord(n))
            | (TableKind::Fin, ObjCode::Fin(n))
            | (TableKind::Cyc, ObjCode::Cyc(n)) => Some(*n),
            _ => None,
        }
    }

    fn admits(self, table: &[usize]) -> bool {
        match self {
            TableKind::Fin => true,
            TableKind::Ord => table.windows(2).all(|w| w[0] <= w[1]),
            TableKind::Cyc => cyclically_monotone(table),
        }
    }
}

/// `[a,b,c]`: three distinct elements in rotation order.
pub fn cyclic_between(a: usize, b: usize, c: usize) -> bool {
    (a < b && b < c) || (b < c && c < a) || (c < a && a < b)
}

/// `[f r, f s, f t]` implies `[r, s, t]` for all triples.
pub fn cyclically_monotone(table: &[usize]) -> bool {
    let n = table.len();
    for r in 0..n {
        for s in 0..n {
            for t in 0..n {
                if cyclic_between(table[r], table[s], table[t]) && !cyclic_between(r, s, t) {
                    return false;
                }
            }
        }
    }
    true
}

pub(crate) fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::with_capacity(lists.len())];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for x in list {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn table_of(m: &MorCode) -> &[usize] {
    match &m.data {
        MorData::Table(t) => t,
        _ => panic!("expected a table morphism, got {m}"),
    }
}

fn wreath_parts(obj: &ObjCode) -> (&ObjCode, &[ObjCode]) {
    match obj {
        ObjCode::Wreath { base, fibers } => (base, fibers),
        _ => panic!("expected a wreath object, got {obj}"),
    }
}

fn wreath_data(m: &MorCode) -> (&MorCode, &[MorCode]) {
    match &m.data {
        MorData::Wreath { base, comps } => (base, comps),
        _ => panic!("expected a wreath morphism, got {m}"),
    }
}

fn semidir_parts(obj: &ObjCode) -> (&[ObjCode], &[MorCode]) {
    match obj {
        ObjCode::Semidir { entries, arrows } => (entries, arrows),
        _ => panic!("expected a semidirect object, got {obj}"),
    }
}

fn semidir_data(m: &MorCode) -> (&[usize], &[MorCode]) {
    match &m.data {
        MorData::Semidir { base, comps } => (base, comps),
        _ => panic!("expected a semidirect morphism, got {m}"),
    }
}

fn trunc_inner(obj: &ObjCode) -> &ObjCode {
    match obj {
        ObjCode::Trunc { inner, .. } => inner,
        _ => panic!("expected a truncated object, got {obj}"),
    }
}

fn trunc_mor(m: &MorCode) -> &MorCode {
    match &m.data {
        MorData::Trunc(inner) => inner,
        _ => panic!("expected a truncated morphism, got {m}"),
    }
}

/// Candidate image sets for a table morphism of the given sizes, or `None`
/// when some element has no admissible image.
fn table_candidates(
    n_src: usize,
    n_tgt: usize,
    post: &[(&[usize], &[usize])],
    pre: &[(&[usize], &[usize])],
) -> Option<Vec<Vec<usize>>> {
    let mut cand: Vec<Vec<usize>> = vec![(0..n_tgt).collect(); n_src];
    for (p, e) in post {
        for (x, c) in cand.iter_mut().enumerate() {
            c.retain(|&v| p[v] == e[x]);
        }
    }
    for (q, e) in pre {
        for (y, &x) in q.iter().enumerate() {
            cand[x].retain(|&v| v == e[y]);
        }
    }
    if cand.iter().any(|c| c.is_empty()) {
        None
    } else {
        Some(cand)
    }
}

fn enumerate_tables(kind: TableKind, cand: &[Vec<usize>]) -> Vec<Vec<usize>> {
    match kind {
        TableKind::Fin => product(cand),
        TableKind::Cyc => product(cand)
            .into_iter()
            .filter(|t| cyclically_monotone(t))
            .collect(),
        TableKind::Ord => {
            fn go(cand: &[Vec<usize>], lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == cand.len() {
                    out.push(cur.clone());
                    return;
                }
                for &v in &cand[cur.len()] {
                    if v >= lo {
                        cur.push(v);
                        go(cand, v, cur, out);
                        cur.pop();
                    }
                }
            }
            let mut out = Vec::new();
            go(cand, 0, &mut Vec::new(), &mut out);
            out
        }
    }
}

/// All sequences of objects from `pool` of length `len` whose point counts
/// sum to at most `budget`.
fn bounded_sequences(pool: &[(ObjCode, usize)], len: usize, budget: usize) -> Vec<Vec<ObjCode>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (obj, size) in pool {
        if *size <= budget {
            for mut rest in bounded_sequences(pool, len - 1, budget - size) {
                rest.insert(0, obj.clone());
                out.push(rest);
            }
        }
    }
    out
}

impl Category {
    pub fn wreath(inner: Category, outer: Category) -> Category {
        Category::Wreath {
            inner: Box::new(inner),
            outer: Box::new(outer),
        }
    }

    pub fn trunc(inner: Category, bound: usize) -> Category {
        Category::Trunc {
            inner: Box::new(inner),
            bound,
        }
    }

    pub fn semidir(param: Category) -> Category {
        Category::Semidir {
            param: Box::new(param),
        }
    }

    /// The n-fold wreath power `O ≀ ⋯ ≀ O`.
    pub fn ord_power(n: usize) -> Category {
        match n {
            0 => Category::Triv,
            1 => Category::Ord,
            _ => Category::wreath(Category::Ord, Category::ord_power(n - 1)),
        }
    }

    fn table_kind(&self) -> Option<TableKind> {
        match self {
            Category::Ord => Some(TableKind::Ord),
            Category::Fin => Some(TableKind::Fin),
            Category::Cyc => Some(TableKind::Cyc),
            _ => None,
        }
    }

    pub fn terminal(&self) -> ObjCode {
        match self {
            Category::Triv => ObjCode::Triv,
            Category::Ord => ObjCode::Ord(1),
            Category::Fin => ObjCode::Fin(1),
            Category::Cyc => ObjCode::Cyc(1),
            Category::Trunc { inner, bound } => ObjCode::trunc(inner.terminal(), *bound),
            Category::Wreath { inner, outer } => ObjCode::wreath(outer.terminal(), vec![inner.terminal()]),
            Category::Semidir { param } => ObjCode::Semidir {
                entries: vec![param.terminal()],
                arrows: vec![],
            },
        }
    }

    pub fn contains(&self, obj: &ObjCode) -> bool {
        self.check_object(obj).is_ok()
    }

    pub fn check_object(&self, obj: &ObjCode) -> Result<()> {
        let bad = || OpcatError::NotAnObject {
            obj: obj.to_string(),
            cat: self.to_string(),
        };
        match (self, obj) {
            (Category::Triv, ObjCode::Triv) => Ok(()),
            (Category::Ord, ObjCode::Ord(_))
            | (Category::Fin, ObjCode::Fin(_))
            | (Category::Cyc, ObjCode::Cyc(_)) => Ok(()),
            (Category::Trunc { inner, bound }, ObjCode::Trunc { inner: o, bound: b }) => {
                inner.check_object(o)?;
                if b != bound || inner.point_count(o) > *bound {
                    return Err(bad());
                }
                Ok(())
            }
            (Category::Wreath { inner, outer }, ObjCode::Wreath { base, fibers }) => {
                outer.check_object(base)?;
                if outer.point_count(base) != fibers.len() {
                    return Err(bad());
                }
                fibers.iter().try_for_each(|m| inner.check_object(m))
            }
            (Category::Semidir { param }, ObjCode::Semidir { entries, arrows }) => {
                entries.iter().try_for_each(|e| param.check_object(e))?;
                if arrows.len() + 1 != entries.len().max(1) {
                    return Err(bad());
                }
                for (k, a) in arrows.iter().enumerate() {
                    if a.src != entries[k] || a.tgt != entries[k + 1] {
                        return Err(bad());
                    }
                    param.check_morphism(a)?;
                }
                Ok(())
            }
            _ => Err(bad()),
        }
    }

    pub fn check_morphism(&self, m: &MorCode) -> Result<()> {
        self.check_object(&m.src)?;
        self.check_object(&m.tgt)?;
        let bad = |why: &str| OpcatError::InvalidMorphism(format!("{m}: {why}"));
        match (self, &m.data) {
            (Category::Triv, MorData::Unique) => Ok(()),
            (Category::Ord | Category::Fin | Category::Cyc, MorData::Table(t)) => {
                let kind = self.table_kind().unwrap();
                let n = kind.size(&m.src).unwrap();
                let k = kind.size(&m.tgt).unwrap();
                if t.len() != n || t.iter().any(|&v| v >= k) {
                    return Err(bad("table shape"));
                }
                if !kind.admits(t) {
                    return Err(bad("not monotone"));
                }
                Ok(())
            }
            (Category::Trunc { inner, .. }, MorData::Trunc(f)) => {
                if &f.src != trunc_inner(&m.src) || &f.tgt != trunc_inner(&m.tgt) {
                    return Err(bad("wrapped ends"));
                }
                inner.check_morphism(f)
            }
            (Category::Wreath { inner, outer }, MorData::Wreath { base, comps }) => {
                let (jb, jf) = wreath_parts(&m.src);
                let (ib, if_) = wreath_parts(&m.tgt);
                if &base.src != jb || &base.tgt != ib || comps.len() != jf.len() {
                    return Err(bad("base shape"));
                }
                outer.check_morphism(base)?;
                for (k, p) in outer.points(jb).iter().enumerate() {
                    let t = outer.point_index(ib, &outer.apply(base, p));
                    if comps[k].src != jf[k] || comps[k].tgt != if_[t] {
                        return Err(bad("component ends"));
                    }
                    inner.check_morphism(&comps[k])?;
                }
                Ok(())
            }
            (Category::Semidir { param }, MorData::Semidir { base, comps }) => {
                let (jn, ja) = semidir_parts(&m.src);
                let (im, ia) = semidir_parts(&m.tgt);
                if base.len() != jn.len() || comps.len() != jn.len() {
                    return Err(bad("base shape"));
                }
                if base.iter().any(|&v| v >= im.len()) || !TableKind::Ord.admits(base) {
                    return Err(bad("base not monotone"));
                }
                for (j, c) in comps.iter().enumerate() {
                    if c.src != jn[j] || c.tgt != im[base[j]] {
                        return Err(bad("component ends"));
                    }
                    param.check_morphism(c)?;
                }
                for j in 0..ja.len() {
                    let lhs = param.compose_raw(&comps[j + 1], &ja[j]);
                    let rhs = param.compose_raw(&self.semidir_arrow(im, ia, base[j], base[j + 1]), &comps[j]);
                    if lhs != rhs {
                        return Err(bad("not natural"));
                    }
                }
                Ok(())
            }
            _ => Err(bad("wrong encoding for this category")),
        }
    }

    /// The composite arrow `M(a) -> M(b)` of a semidirect object, `a <= b`.
    fn semidir_arrow(&self, entries: &[ObjCode], arrows: &[MorCode], a: usize, b: usize) -> MorCode {
        let Category::Semidir { param } = self else {
            unreachable!()
        };
        let mut acc = param.identity(&entries[a]);
        for arrow in &arrows[a..b] {
            acc = param.compose_raw(arrow, &acc);
        }
        acc
    }

    pub fn point_count(&self, obj: &ObjCode) -> usize {
        match (self, obj) {
            (Category::Triv, _) => 1,
            (Category::Ord | Category::Fin | Category::Cyc, _) => self.table_kind().unwrap().size(obj).unwrap(),
            (Category::Trunc { inner, .. }, _) => inner.point_count(trunc_inner(obj)),
            (Category::Wreath { inner, .. }, _) => wreath_parts(obj).1.iter().map(|m| inner.point_count(m)).sum(),
            (Category::Semidir { param }, _) => semidir_parts(obj).0.iter().map(|m| param.point_count(m)).sum(),
        }
    }

    /// `|I|` in canonical order.
    pub fn points(&self, obj: &ObjCode) -> Vec<Point> {
        match self {
            Category::Triv => vec![Point::Star],
            Category::Ord | Category::Fin | Category::Cyc => {
                (0..self.point_count(obj)).map(Point::Elem).collect()
            }
            Category::Trunc { inner, .. } => inner.points(trunc_inner(obj)),
            Category::Wreath { inner, outer } => {
                let (base, fibers) = wreath_parts(obj);
                let mut out = Vec::new();
                for (b, m) in outer.points(base).into_iter().zip(fibers) {
                    for q in inner.points(m) {
                        out.push(Point::pair(b.clone(), q));
                    }
                }
                out
            }
            Category::Semidir { param } => {
                let (entries, _) = semidir_parts(obj);
                let mut out = Vec::new();
                for (p, m) in entries.iter().enumerate() {
                    for q in param.points(m) {
                        out.push(Point::pair(Point::Elem(p), q));
                    }
                }
                out
            }
        }
    }

    pub fn point_index(&self, obj: &ObjCode, p: &Point) -> usize {
        match (self, p) {
            (Category::Triv, _) => 0,
            (Category::Ord | Category::Fin | Category::Cyc, Point::Elem(k)) => *k,
            (Category::Trunc { inner, .. }, _) => inner.point_index(trunc_inner(obj), p),
            (Category::Wreath { inner, outer }, Point::Pair(b, q)) => {
                let (base, fibers) = wreath_parts(obj);
                let bi = outer.point_index(base, b);
                let offset: usize = fibers[..bi].iter().map(|m| inner.point_count(m)).sum();
                offset + inner.point_index(&fibers[bi], q)
            }
            (Category::Semidir { param }, Point::Pair(b, q)) => {
                let (entries, _) = semidir_parts(obj);
                let Point::Elem(pos) = **b else {
                    panic!("bad semidirect point {p}")
                };
                let offset: usize = entries[..pos].iter().map(|m| param.point_count(m)).sum();
                offset + param.point_index(&entries[pos], q)
            }
            _ => panic!("point {p} does not belong to {obj}"),
        }
    }

    /// Image of a point under a morphism.
    pub fn apply(&self, f: &MorCode, p: &Point) -> Point {
        match (self, &f.data) {
            (Category::Triv, _) => Point::Star,
            (_, MorData::Table(t)) => match p {
                Point::Elem(k) => Point::Elem(t[*k]),
                _ => panic!("bad point {p} for {f}"),
            },
            (Category::Trunc { inner, .. }, MorData::Trunc(g)) => inner.apply(g, p),
            (Category::Wreath { inner, outer }, MorData::Wreath { base, comps }) => {
                let Point::Pair(b, q) = p else {
                    panic!("bad point {p} for {f}")
                };
                let bi = outer.point_index(&base.src, b);
                Point::pair(outer.apply(base, b), inner.apply(&comps[bi], q))
            }
            (Category::Semidir { param }, MorData::Semidir { base, comps }) => {
                let Point::Pair(b, q) = p else {
                    panic!("bad point {p} for {f}")
                };
                let Point::Elem(pos) = **b else {
                    panic!("bad point {p} for {f}")
                };
                Point::pair(Point::Elem(base[pos]), param.apply(&comps[pos], q))
            }
            _ => panic!("morphism {f} does not belong to {self}"),
        }
    }

    /// The point map `|J| -> |I|` of `f` on point indices.
    pub fn point_map(&self, f: &MorCode) -> Vec<usize> {
        self.points(&f.src)
            .iter()
            .map(|p| self.point_index(&f.tgt, &self.apply(f, p)))
            .collect()
    }

    /// The morphism `1 -> I` picking out `p`.
    pub fn point_mor(&self, obj: &ObjCode, p: &Point) -> MorCode {
        let data = match (self, p) {
            (Category::Triv, _) => MorData::Unique,
            (Category::Ord | Category::Fin | Category::Cyc, Point::Elem(k)) => MorData::Table(vec![*k]),
            (Category::Trunc { inner, .. }, _) => MorData::Trunc(Box::new(inner.point_mor(trunc_inner(obj), p))),
            (Category::Wreath { inner, outer }, Point::Pair(b, q)) => {
                let (base, fibers) = wreath_parts(obj);
                let bi = outer.point_index(base, b);
                MorData::Wreath {
                    base: Box::new(outer.point_mor(base, b)),
                    comps: vec![inner.point_mor(&fibers[bi], q)],
                }
            }
            (Category::Semidir { param }, Point::Pair(b, q)) => {
                let (entries, _) = semidir_parts(obj);
                let Point::Elem(pos) = **b else {
                    panic!("bad semidirect point {p}")
                };
                MorData::Semidir {
                    base: vec![pos],
                    comps: vec![param.point_mor(&entries[pos], q)],
                }
            }
            _ => panic!("point {p} does not belong to {obj}"),
        };
        MorCode {
            src: self.terminal(),
            tgt: obj.clone(),
            data,
        }
    }

    /// The point picked out by a morphism from the terminal object.
    pub fn mor_point(&self, m: &MorCode) -> Point {
        let star = self.points(&m.src);
        self.apply(m, &star[0])
    }

    pub fn identity(&self, obj: &ObjCode) -> MorCode {
        let data = match self {
            Category::Triv => MorData::Unique,
            Category::Ord | Category::Fin | Category::Cyc => {
                MorData::Table((0..self.point_count(obj)).collect())
            }
            Category::Trunc { inner, .. } => MorData::Trunc(Box::new(inner.identity(trunc_inner(obj)))),
            Category::Wreath { inner, outer } => {
                let (base, fibers) = wreath_parts(obj);
                MorData::Wreath {
                    base: Box::new(outer.identity(base)),
                    comps: fibers.iter().map(|m| inner.identity(m)).collect(),
                }
            }
            Category::Semidir { param } => {
                let (entries, _) = semidir_parts(obj);
                MorData::Semidir {
                    base: (0..entries.len()).collect(),
                    comps: entries.iter().map(|m| param.identity(m)).collect(),
                }
            }
        };
        MorCode {
            src: obj.clone(),
            tgt: obj.clone(),
            data,
        }
    }

    /// The unique morphism `I -> 1`.
    pub fn to_terminal(&self, obj: &ObjCode) -> MorCode {
        let data = match self {
            Category::Triv => MorData::Unique,
            Category::Ord | Category::Fin | Category::Cyc => MorData::Table(vec![0; self.point_count(obj)]),
            Category::Trunc { inner, .. } => MorData::Trunc(Box::new(inner.to_terminal(trunc_inner(obj)))),
            Category::Wreath { inner, outer } => {
                let (base, fibers) = wreath_parts(obj);
                MorData::Wreath {
                    base: Box::new(outer.to_terminal(base)),
                    comps: fibers.iter().map(|m| inner.to_terminal(m)).collect(),
                }
            }
            Category::Semidir { param } => {
                let (entries, _) = semidir_parts(obj);
                MorData::Semidir {
                    base: vec![0; entries.len()],
                    comps: entries.iter().map(|m| param.to_terminal(m)).collect(),
                }
            }
        };
        MorCode {
            src: obj.clone(),
            tgt: self.terminal(),
            data,
        }
    }

    /// The constant morphism `X -> I` at the point `p`.
    pub fn constant(&self, src: &ObjCode, tgt: &ObjCode, p: &Point) -> MorCode {
        self.compose_raw(&self.point_mor(tgt, p), &self.to_terminal(src))
    }

    pub fn compose(&self, g: &MorCode, f: &MorCode) -> Result<MorCode> {
        if f.tgt != g.src {
            return Err(OpcatError::Mismatch(format!("cannot compose {g} after {f}")));
        }
        Ok(self.compose_raw(g, f))
    }

    /// Composition without the end check; callers guarantee composability.
    pub(crate) fn compose_raw(&self, g: &MorCode, f: &MorCode) -> MorCode {
        debug_assert_eq!(f.tgt, g.src, "composing {g} after {f}");
        let data = match (self, &g.data, &f.data) {
            (Category::Triv, _, _) => MorData::Unique,
            (_, MorData::Table(gt), MorData::Table(ft)) => MorData::Table(ft.iter().map(|&x| gt[x]).collect()),
            (Category::Trunc { inner, .. }, MorData::Trunc(g1), MorData::Trunc(f1)) => {
                MorData::Trunc(Box::new(inner.compose_raw(g1, f1)))
            }
            (
                Category::Wreath { inner, outer },
                MorData::Wreath { base: gb, comps: gc },
                MorData::Wreath { base: fb, comps: fc },
            ) => {
                let mid = outer.point_map(fb);
                MorData::Wreath {
                    base: Box::new(outer.compose_raw(gb, fb)),
                    comps: fc
                        .iter()
                        .enumerate()
                        .map(|(k, c)| inner.compose_raw(&gc[mid[k]], c))
                        .collect(),
                }
            }
            (
                Category::Semidir { param },
                MorData::Semidir { base: gb, comps: gc },
                MorData::Semidir { base: fb, comps: fc },
            ) => MorData::Semidir {
                base: fb.iter().map(|&x| gb[x]).collect(),
                comps: fc
                    .iter()
                    .enumerate()
                    .map(|(j, c)| param.compose_raw(&gc[fb[j]], c))
                    .collect(),
            },
            _ => panic!("cannot compose {g} after {f} in {self}"),
        };
        MorCode {
            src: f.src.clone(),
            tgt: g.tgt.clone(),
            data,
        }
    }

    /// Complete, duplicate-free enumeration of `Hom(J, I)`.
    pub fn hom(&self, src: &ObjCode, tgt: &ObjCode) -> Vec<MorCode> {
        self.hom_where(src, tgt, &Constraints::none())
    }

    /// All `h: J -> I` satisfying the given constraints.
    ///
    /// Constraints are pushed down into the recursive structure, so this is
    /// much cheaper than filtering `hom`.
    pub fn hom_where(&self, src: &ObjCode, tgt: &ObjCode, cons: &Constraints<'_>) -> Vec<MorCode> {
        let wrap = |data| MorCode {
            src: src.clone(),
            tgt: tgt.clone(),
            data,
        };
        match self {
            Category::Triv => vec![wrap(MorData::Unique)],
            Category::Ord | Category::Fin | Category::Cyc => {
                let kind = self.table_kind().unwrap();
                let post: Vec<(&[usize], &[usize])> =
                    cons.post.iter().map(|(p, e)| (table_of(p), table_of(e))).collect();
                let pre: Vec<(&[usize], &[usize])> =
                    cons.pre.iter().map(|(q, e)| (table_of(q), table_of(e))).collect();
                let (n, k) = (kind.size(src).unwrap(), kind.size(tgt).unwrap());
                match table_candidates(n, k, &post, &pre) {
                    None => vec![],
                    Some(cand) => enumerate_tables(kind, &cand)
                        .into_iter()
                        .map(|t| wrap(MorData::Table(t)))
                        .collect(),
                }
            }
            Category::Trunc { inner, .. } => {
                let sub = Constraints {
                    post: cons.post.iter().map(|(p, e)| (trunc_mor(p), trunc_mor(e))).collect(),
                    pre: cons.pre.iter().map(|(q, e)| (trunc_mor(q), trunc_mor(e))).collect(),
                };
                inner
                    .hom_where(trunc_inner(src), trunc_inner(tgt), &sub)
                    .into_iter()
                    .map(|m| wrap(MorData::Trunc(Box::new(m))))
                    .collect()
            }
            Category::Wreath { inner, outer } => self.wreath_hom_where(inner, outer, src, tgt, cons),
            Category::Semidir { param } => self.semidir_hom_where(param, src, tgt, cons),
        }
    }

    fn wreath_hom_where(
        &self,
        inner: &Category,
        outer: &Category,
        src: &ObjCode,
        tgt: &ObjCode,
        cons: &Constraints<'_>,
    ) -> Vec<MorCode> {
        let (jb, jf) = wreath_parts(src);
        let (ib, if_) = wreath_parts(tgt);
        let base_cons = Constraints {
            post: cons.post.iter().map(|(p, e)| (wreath_data(p).0, wreath_data(e).0)).collect(),
            pre: cons.pre.iter().map(|(q, e)| (wreath_data(q).0, wreath_data(e).0)).collect(),
        };
        // For each pre-constraint, the source-base index hit by each point of its domain base.
        let pre_maps: Vec<Vec<usize>> = cons.pre.iter().map(|(q, _)| outer.point_map(wreath_data(q).0)).collect();
        let mut out = Vec::new();
        'eta: for eta in outer.hom_where(jb, ib, &base_cons) {
            let image = outer.point_map(&eta);
            let mut choices = Vec::with_capacity(jf.len());
            for (ji, &ti) in image.iter().enumerate() {
                let mut sub = Constraints::none();
                for (p, e) in &cons.post {
                    sub.post.push((&wreath_data(p).1[ti], &wreath_data(e).1[ji]));
                }
                for ((q, e), qmap) in cons.pre.iter().zip(&pre_maps) {
                    for (yi, &target) in qmap.iter().enumerate() {
                        if target == ji {
                            sub.pre.push((&wreath_data(q).1[yi], &wreath_data(e).1[yi]));
                        }
                    }
                }
                let list = inner.hom_where(&jf[ji], &if_[ti], &sub);
                if list.is_empty() {
                    continue 'eta;
                }
                choices.push(list);
            }
            for comps in product(&choices) {
                out.push(MorCode {
                    src: src.clone(),
                    tgt: tgt.clone(),
                    data: MorData::Wreath {
                        base: Box::new(eta.clone()),
                        comps,
                    },
                });
            }
        }
        out
    }

    fn semidir_hom_where(&self, param: &Category, src: &ObjCode, tgt: &ObjCode, cons: &Constraints<'_>) -> Vec<MorCode> {
        let (jn, ja) = semidir_parts(src);
        let (im, ia) = semidir_parts(tgt);
        let post: Vec<(&[usize], &[usize])> =
            cons.post.iter().map(|(p, e)| (semidir_data(p).0, semidir_data(e).0)).collect();
        let pre: Vec<(&[usize], &[usize])> =
            cons.pre.iter().map(|(q, e)| (semidir_data(q).0, semidir_data(e).0)).collect();
        let Some(cand) = table_candidates(jn.len(), im.len(), &post, &pre) else {
            return vec![];
        };
        let mut out = Vec::new();
        'base: for base in enumerate_tables(TableKind::Ord, &cand) {
            let mut choices = Vec::with_capacity(jn.len());
            for (j, &t) in base.iter().enumerate() {
                let mut sub = Constraints::none();
                for (p, e) in &cons.post {
                    sub.post.push((&semidir_data(p).1[t], &semidir_data(e).1[j]));
                }
                for (q, e) in &cons.pre {
                    let (qb, qc) = semidir_data(q);
                    for (y, &target) in qb.iter().enumerate() {
                        if target == j {
                            sub.pre.push((&qc[y], &semidir_data(e).1[y]));
                        }
                    }
                }
                let list = param.hom_where(&jn[j], &im[t], &sub);
                if list.is_empty() {
                    continue 'base;
                }
                choices.push(list);
            }
            let steps: Vec<MorCode> = (0..ja.len())
                .map(|j| self.semidir_arrow(im, ia, base[j], base[j + 1]))
                .collect();
            for comps in product(&choices) {
                let natural = (0..ja.len()).all(|j| {
                    param.compose_raw(&comps[j + 1], &ja[j]) == param.compose_raw(&steps[j], &comps[j])
                });
                if natural {
                    out.push(MorCode {
                        src: src.clone(),
                        tgt: tgt.clone(),
                        data: MorData::Semidir {
                            base: base.clone(),
                            comps,
                        },
                    });
                }
            }
        }
        out
    }

    /// The fiber of `f: J -> I` over the point `i`.
    pub fn fiber(&self, f: &MorCode, i: &Point) -> Fiber {
        match (self, &f.data) {
            (Category::Triv, _) => Fiber {
                obj: ObjCode::Triv,
                incl: self.identity(&f.src),
            },
            (_, MorData::Table(t)) => {
                let kind = self.table_kind().unwrap();
                let Point::Elem(target) = i else {
                    panic!("bad point {i}")
                };
                let pre: Vec<usize> = (0..t.len()).filter(|&x| t[x] == *target).collect();
                let obj = kind.obj(pre.len());
                Fiber {
                    incl: MorCode {
                        src: obj.clone(),
                        tgt: f.src.clone(),
                        data: MorData::Table(pre),
                    },
                    obj,
                }
            }
            (Category::Trunc { inner, bound }, MorData::Trunc(g)) => {
                let fb = inner.fiber(g, i);
                let obj = ObjCode::trunc(fb.obj, *bound);
                Fiber {
                    incl: MorCode {
                        src: obj.clone(),
                        tgt: f.src.clone(),
                        data: MorData::Trunc(Box::new(fb.incl)),
                    },
                    obj,
                }
            }
            (Category::Wreath { inner, outer }, MorData::Wreath { base, comps }) => {
                let Point::Pair(b, m) = i else {
                    panic!("bad point {i}")
                };
                let bf = outer.fiber(base, b);
                let src_base = &base.src;
                let mut fibers = Vec::new();
                let mut incls = Vec::new();
                for k in outer.points(&bf.obj) {
                    let j = outer.apply(&bf.incl, &k);
                    let ji = outer.point_index(src_base, &j);
                    let cf = inner.fiber(&comps[ji], m);
                    fibers.push(cf.obj);
                    incls.push(cf.incl);
                }
                let obj = ObjCode::wreath(bf.obj, fibers);
                Fiber {
                    incl: MorCode {
                        src: obj.clone(),
                        tgt: f.src.clone(),
                        data: MorData::Wreath {
                            base: Box::new(bf.incl),
                            comps: incls,
                        },
                    },
                    obj,
                }
            }
            (Category::Semidir { param }, MorData::Semidir { base, comps }) => {
                let Point::Pair(b, m) = i else {
                    panic!("bad point {i}")
                };
                let Point::Elem(target) = **b else {
                    panic!("bad point {i}")
                };
                let (jn, ja) = semidir_parts(&f.src);
                let positions: Vec<usize> = (0..jn.len()).filter(|&p| base[p] == target).collect();
                let cfs: Vec<Fiber> = positions.iter().map(|&p| param.fiber(&comps[p], m)).collect();
                let mut arrows = Vec::new();
                for w in 0..positions.len().saturating_sub(1) {
                    // Preimages of an order map are intervals, so consecutive positions are adjacent.
                    let p = positions[w];
                    let moved = param.compose_raw(&ja[p], &cfs[w].incl);
                    let arrow = param
                        .factor_through(&cfs[w + 1].incl, &moved)
                        .expect("fiber inclusions are monomorphisms")
                        .expect("naturality keeps fibers over the same point");
                    arrows.push(arrow);
                }
                let obj = ObjCode::Semidir {
                    entries: cfs.iter().map(|c| c.obj.clone()).collect(),
                    arrows,
                };
                Fiber {
                    incl: MorCode {
                        src: obj.clone(),
                        tgt: f.src.clone(),
                        data: MorData::Semidir {
                            base: positions,
                            comps: cfs.into_iter().map(|c| c.incl).collect(),
                        },
                    },
                    obj,
                }
            }
            _ => panic!("morphism {f} does not belong to {self}"),
        }
    }

    /// Objects with at most `bound` points.
    ///
    /// For wreath and semidirect instances the base is also limited to
    /// `bound` points, which keeps the list finite when fibers may be empty.
    pub fn objects(&self, bound: usize) -> Vec<ObjCode> {
        match self {
            Category::Triv => vec![ObjCode::Triv],
            Category::Ord | Category::Fin | Category::Cyc => {
                let kind = self.table_kind().unwrap();
                (0..=bound).map(|n| kind.obj(n)).collect()
            }
            Category::Trunc { inner, bound: b } => inner
                .objects(bound.min(*b))
                .into_iter()
                .filter(|o| inner.point_count(o) <= *b)
                .map(|o| ObjCode::trunc(o, *b))
                .collect(),
            Category::Wreath { inner, outer } => {
                let pool: Vec<(ObjCode, usize)> =
                    inner.objects(bound).into_iter().map(|o| (o.clone(), inner.point_count(&o))).collect();
                let mut out = Vec::new();
                for base in outer.objects(bound) {
                    let n = outer.point_count(&base);
                    for fibers in bounded_sequences(&pool, n, bound) {
                        out.push(ObjCode::wreath(base.clone(), fibers));
                    }
                }
                out
            }
            Category::Semidir { param } => {
                let pool: Vec<(ObjCode, usize)> =
                    param.objects(bound).into_iter().map(|o| (o.clone(), param.point_count(&o))).collect();
                let mut out = Vec::new();
                for n in 0..=bound {
                    for entries in bounded_sequences(&pool, n, bound) {
                        let arrow_choices: Vec<Vec<MorCode>> =
                            entries.windows(2).map(|w| param.hom(&w[0], &w[1])).collect();
                        for arrows in product(&arrow_choices) {
                            out.push(ObjCode::Semidir {
                                entries: entries.clone(),
                                arrows,
                            });
                        }
                    }
                }
                out
            }
        }
    }

    /// Wreath objects with base drawn from `outer.objects(base_bound)` and
    /// each fiber from `inner.objects(inner_bound)`.
    pub fn wreath_objects(&self, base_bound: usize, inner_bound: usize) -> Vec<ObjCode> {
        let Category::Wreath { inner, outer } = self else {
            return self.objects(base_bound);
        };
        let pool = inner.objects(inner_bound);
        let mut out = Vec::new();
        for base in outer.objects(base_bound) {
            let n = outer.point_count(&base);
            for fibers in product(&vec![pool.clone(); n]) {
                out.push(ObjCode::wreath(base.clone(), fibers));
            }
        }
        out
    }

    /// Whether some object has no points.
    pub fn has_empty_objects(&self) -> bool {
        match self {
            Category::Triv => false,
            Category::Ord | Category::Fin | Category::Cyc | Category::Semidir { .. } => true,
            Category::Trunc { inner, .. } => inner.has_empty_objects(),
            Category::Wreath { inner, outer } => outer.has_empty_objects() || inner.has_empty_objects(),
        }
    }

    /// The unique `h` with `incl ∘ h = g`, if any.
    ///
    /// Errors when several exist, which means `incl` is not a monomorphism.
    pub fn factor_through(&self, incl: &MorCode, g: &MorCode) -> Result<Option<MorCode>> {
        if incl.tgt != g.tgt {
            return Err(OpcatError::Mismatch(format!("cannot factor {g} through {incl}")));
        }
        let found = self.hom_where(&g.src, &incl.src, &Constraints::none().post(incl, g));
        match found.len() {
            0 => Ok(None),
            1 => Ok(found.into_iter().next()),
            n => Err(OpcatError::Uniqueness {
                context: format!("factoring {g} through {incl}"),
                found: n,
            }),
        }
    }

    pub fn inverse(&self, m: &MorCode) -> Option<MorCode> {
        let id_tgt = self.identity(&m.tgt);
        let id_src = self.identity(&m.src);
        self.hom_where(&m.tgt, &m.src, &Constraints::none().post(m, &id_tgt).pre(m, &id_src))
            .into_iter()
            .next()
    }

    pub fn is_iso(&self, m: &MorCode) -> bool {
        self.inverse(m).is_some()
    }

    /// All isomorphisms `J -> I`.
    pub fn isos(&self, src: &ObjCode, tgt: &ObjCode) -> Vec<MorCode> {
        if self.point_count(src) != self.point_count(tgt) {
            return vec![];
        }
        self.hom(src, tgt).into_iter().filter(|m| self.is_iso(m)).collect()
    }

    /// The unique isomorphism `J -> I`, erroring unless there is exactly one.
    pub fn unique_iso(&self, src: &ObjCode, tgt: &ObjCode) -> Result<MorCode> {
        exactly_one(self.isos(src, tgt), || format!("isomorphism {src} -> {tgt}"))
    }

    pub fn is_terminal(&self, obj: &ObjCode, probes: &[ObjCode]) -> bool {
        probes.iter().all(|x| self.hom(x, obj).len() == 1)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Triv => write!(f, "triv"),
            Category::Ord => write!(f, "O"),
            Category::Fin => write!(f, "F"),
            Category::Cyc => write!(f, "cyc"),
            Category::Trunc { inner, bound } => write!(f, "trunc:{inner}:{bound}"),
            Category::Wreath { inner, outer } => write!(f, "wreath:{inner}:{outer}"),
            Category::Semidir { param } => write!(f, "semidir:{param}"),
        }
    }
}

/// Parses the selector grammar
/// `triv | O | F | cyc | trunc:<sel>:<n> | wreath:<inner>:<outer> | semidir:<sel>`.
impl std::str::FromStr for Category {
    type Err = OpcatError;

    fn from_str(s: &str) -> Result<Category> {
        let tokens: Vec<&str> = s.trim().split(':').collect();
        let mut pos = 0;
        let c = parse_selector(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(OpcatError::Parse(format!("trailing input in selector {s:?}")));
        }
        Ok(c)
    }
}

fn parse_selector(tokens: &[&str], pos: &mut usize) -> Result<Category> {
    let Some(&head) = tokens.get(*pos) else {
        return Err(OpcatError::Parse("selector ended early".into()));
    };
    *pos += 1;
    match head {
        "triv" | "1" => Ok(Category::Triv),
        "O" | "o" => Ok(Category::Ord),
        "F" | "f" => Ok(Category::Fin),
        "cyc" | "C" => Ok(Category::Cyc),
        "trunc" => {
            let inner = parse_selector(tokens, pos)?;
            let n = tokens
                .get(*pos)
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| OpcatError::Parse("trunc needs a numeric bound".into()))?;
            *pos += 1;
            Ok(Category::trunc(inner, n))
        }
        "wreath" => {
            let inner = parse_selector(tokens, pos)?;
            let outer = parse_selector(tokens, pos)?;
            Ok(Category::wreath(inner, outer))
        }
        "semidir" => Ok(Category::semidir(parse_selector(tokens, pos)?)),
        other => Err(OpcatError::Parse(format!("unknown selector {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord_table(n: usize, k: usize) -> Vec<Vec<usize>> {
        // every total map n -> k, filtered to monotone ones
        product(&vec![(0..k).collect::<Vec<_>>(); n])
            .into_iter()
            .filter(|t| t.windows(2).all(|w| w[0] <= w[1]))
            .collect()
    }

    #[test]
    fn selectors_round_trip() {
        for s in ["triv", "O", "F", "cyc", "trunc:O:3", "wreath:O:wreath:O:O", "semidir:F", "wreath:trunc:F:2:O"] {
            let c: Category = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!("wreath:O:wreath:O:O".parse::<Category>().unwrap(), Category::ord_power(3));
        for bad in ["", "X", "trunc:O", "trunc:O:x", "wreath:O", "O:O"] {
            assert!(matches!(bad.parse::<Category>(), Err(OpcatError::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn small_hom_counts() {
        assert_eq!(Category::Ord.hom(&ObjCode::Ord(2), &ObjCode::Ord(2)).len(), 3);
        assert_eq!(Category::Fin.hom(&ObjCode::Fin(2), &ObjCode::Fin(2)).len(), 4);
        assert_eq!(Category::Triv.hom(&ObjCode::Triv, &ObjCode::Triv).len(), 1);
        for n in 0..5 {
            for k in 0..5 {
                assert_eq!(Category::Ord.hom(&ObjCode::Ord(n), &ObjCode::Ord(k)).len(), ord_table(n, k).len());
            }
        }
    }

    #[test]
    fn terminals() {
        assert_eq!(Category::Ord.terminal(), ObjCode::Ord(1));
        assert_eq!(
            Category::wreath(Category::Ord, Category::Fin).terminal(),
            ObjCode::wreath(ObjCode::Fin(1), vec![ObjCode::Ord(1)])
        );
        assert_eq!(Category::Triv.terminal(), ObjCode::Triv);
    }

    #[test]
    fn wreath_points_sum_over_base() {
        let ff = Category::wreath(Category::Fin, Category::Fin);
        let obj = ObjCode::wreath(ObjCode::Fin(2), vec![ObjCode::Fin(1), ObjCode::Fin(3)]);
        assert_eq!(ff.points(&obj).len(), 4);
        assert!(Category::Fin.points(&ObjCode::Fin(0)).is_empty());
        for (k, p) in ff.points(&obj).iter().enumerate() {
            assert_eq!(ff.point_index(&obj, p), k);
        }
    }

    #[test]
    fn table_composition() {
        let f = MorCode {
            src: ObjCode::Fin(2),
            tgt: ObjCode::Fin(2),
            data: MorData::Table(vec![1, 1]),
        };
        let g = MorCode {
            data: MorData::Table(vec![0, 1]),
            ..f.clone()
        };
        assert_eq!(Category::Fin.compose(&g, &f).unwrap().data, MorData::Table(vec![1, 1]));
        let bad = MorCode {
            src: ObjCode::Fin(3),
            tgt: ObjCode::Fin(3),
            data: MorData::Table(vec![0, 1, 2]),
        };
        assert!(Category::Fin.compose(&bad, &f).is_err());
    }

    #[test]
    fn fin_fiber() {
        let f = MorCode {
            src: ObjCode::Fin(3),
            tgt: ObjCode::Fin(2),
            data: MorData::Table(vec![0, 0, 1]),
        };
        let fb = Category::Fin.fiber(&f, &Point::Elem(0));
        assert_eq!(fb.obj, ObjCode::Fin(2));
        assert_eq!(fb.incl.data, MorData::Table(vec![0, 1]));
    }

    #[test]
    fn cyclic_homs_rotations() {
        // endomorphisms of a cyclic 3-set: 3 rotations, plus the degenerate maps
        let isos = Category::Cyc.isos(&ObjCode::Cyc(3), &ObjCode::Cyc(3));
        assert_eq!(isos.len(), 3);
        assert!(!cyclically_monotone(&[0, 2, 1]));
        assert!(cyclically_monotone(&[1, 2, 0]));
    }

    #[test]
    fn hom_where_agrees_with_filter() {
        let oo = Category::wreath(Category::Ord, Category::Ord);
        let objs = oo.objects(2);
        for j in &objs {
            for i in &objs {
                let all = oo.hom(j, i);
                for p in &all {
                    let e = p.clone();
                    let id = oo.identity(i);
                    let found = oo.hom_where(j, i, &Constraints::none().post(&id, &e));
                    assert_eq!(found, vec![p.clone()]);
                }
            }
        }
    }

    #[test]
    fn semidir_objects_and_fibers_are_valid() {
        let c = Category::semidir(Category::Fin);
        let objs = c.objects(2);
        assert!(objs.len() > 3);
        for j in &objs {
            c.check_object(j).unwrap();
            for i in &objs {
                for f in c.hom(j, i) {
                    c.check_morphism(&f).unwrap();
                    for p in c.points(i) {
                        let fb = c.fiber(&f, &p);
                        c.check_morphism(&fb.incl).unwrap();
                    }
                }
            }
        }
    }
}
