//! Admissible functors and operator morphisms.

use std::fmt;

use rayon::prelude::*;
use serde_json::json;

use crate::category::Category;
use crate::code::{MorCode, MorData, ObjCode, Point};
use crate::error::{OpcatError, Result};
use crate::report::{cx, LawReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmFunctor {
    Identity(Category),
    /// `u: C -> F`, `I ↦ |I|`.
    UnderlyingPoints(Category),
    /// `Triv -> C` picking out the terminal object.
    TerminalEmbedding(Category),
    /// The unique functor `C -> Triv`.
    ToTriv(Category),
    /// `Trunc(C, n) -> C`.
    TruncationInclusion(Category, usize),
    /// `inner ≀ outer -> outer`.
    WreathProjection { inner: Category, outer: Category },
    /// `inner -> inner ≀ outer`, `M ↦ (1, [M])`.
    InnerSection { inner: Category, outer: Category },
    /// `outer -> inner ≀ outer`, `I ↦ (I, [1, …, 1])`.
    OuterSection { inner: Category, outer: Category },
    /// `Composite(f, g)` is `f ∘ g`.
    Composite(Box<AdmFunctor>, Box<AdmFunctor>),
}

pub fn underlying_points_functor(c: Category) -> AdmFunctor {
    AdmFunctor::UnderlyingPoints(c)
}

pub fn terminal_embedding(c: Category) -> AdmFunctor {
    AdmFunctor::TerminalEmbedding(c)
}

pub fn truncation_inclusion(c: Category, n: usize) -> AdmFunctor {
    AdmFunctor::TruncationInclusion(c, n)
}

pub fn wreath_projection(inner: Category, outer: Category) -> AdmFunctor {
    AdmFunctor::WreathProjection { inner, outer }
}

pub fn wreath_inner_section(inner: Category, outer: Category) -> AdmFunctor {
    AdmFunctor::InnerSection { inner, outer }
}

pub fn wreath_outer_section(inner: Category, outer: Category) -> AdmFunctor {
    AdmFunctor::OuterSection { inner, outer }
}

impl AdmFunctor {
    /// `f ∘ g`.
    pub fn then(g: AdmFunctor, f: AdmFunctor) -> Result<AdmFunctor> {
        if g.target() != f.source() {
            return Err(OpcatError::Mismatch(format!("cannot compose {f} after {g}")));
        }
        Ok(AdmFunctor::Composite(Box::new(f), Box::new(g)))
    }

    pub fn source(&self) -> Category {
        match self {
            AdmFunctor::Identity(c) | AdmFunctor::UnderlyingPoints(c) | AdmFunctor::ToTriv(c) => c.clone(),
            AdmFunctor::TerminalEmbedding(_) => Category::Triv,
            AdmFunctor::TruncationInclusion(c, n) => Category::trunc(c.clone(), *n),
            AdmFunctor::WreathProjection { inner, outer } => Category::wreath(inner.clone(), outer.clone()),
            AdmFunctor::InnerSection { inner, .. } => inner.clone(),
            AdmFunctor::OuterSection { outer, .. } => outer.clone(),
            AdmFunctor::Composite(_, g) => g.source(),
        }
    }

    pub fn target(&self) -> Category {
        match self {
            AdmFunctor::Identity(c) | AdmFunctor::TerminalEmbedding(c) | AdmFunctor::TruncationInclusion(c, _) => {
                c.clone()
            }
            AdmFunctor::UnderlyingPoints(_) => Category::Fin,
            AdmFunctor::ToTriv(_) => Category::Triv,
            AdmFunctor::WreathProjection { outer, .. } => outer.clone(),
            AdmFunctor::InnerSection { inner, outer } | AdmFunctor::OuterSection { inner, outer } => {
                Category::wreath(inner.clone(), outer.clone())
            }
            AdmFunctor::Composite(f, _) => f.target(),
        }
    }

    /// Whether the functor is known to be admissible. Every constructor here is.
    pub fn claimed_admissible(&self) -> bool {
        true
    }

    /// Whether the functor is claimed to be an operator morphism; `None`
    /// where no claim is made.
    pub fn claimed_operator_morphism(&self) -> Option<bool> {
        match self {
            AdmFunctor::Identity(_)
            | AdmFunctor::UnderlyingPoints(_)
            | AdmFunctor::TerminalEmbedding(_)
            | AdmFunctor::TruncationInclusion(..)
            | AdmFunctor::InnerSection { .. }
            | AdmFunctor::OuterSection { .. } => Some(true),
            AdmFunctor::ToTriv(c) => Some(*c == Category::Triv),
            AdmFunctor::WreathProjection { inner, .. } => Some(!inner.has_empty_objects()),
            AdmFunctor::Composite(f, g) => match (f.claimed_operator_morphism(), g.claimed_operator_morphism()) {
                (Some(true), Some(op)) => Some(op),
                _ => None,
            },
        }
    }

    pub fn apply_obj(&self, obj: &ObjCode) -> ObjCode {
        match self {
            AdmFunctor::Identity(_) => obj.clone(),
            AdmFunctor::UnderlyingPoints(c) => ObjCode::Fin(c.point_count(obj)),
            AdmFunctor::TerminalEmbedding(c) => c.terminal(),
            AdmFunctor::ToTriv(_) => ObjCode::Triv,
            AdmFunctor::TruncationInclusion(..) => match obj {
                ObjCode::Trunc { inner, .. } => (**inner).clone(),
                _ => panic!("{obj} is not truncated"),
            },
            AdmFunctor::WreathProjection { .. } => match obj {
                ObjCode::Wreath { base, .. } => (**base).clone(),
                _ => panic!("{obj} is not a wreath object"),
            },
            AdmFunctor::InnerSection { outer, .. } => ObjCode::wreath(outer.terminal(), vec![obj.clone()]),
            AdmFunctor::OuterSection { inner, outer } => {
                ObjCode::wreath(obj.clone(), vec![inner.terminal(); outer.point_count(obj)])
            }
            AdmFunctor::Composite(f, g) => f.apply_obj(&g.apply_obj(obj)),
        }
    }

    pub fn apply_mor(&self, m: &MorCode) -> MorCode {
        let src = self.apply_obj(&m.src);
        let tgt = self.apply_obj(&m.tgt);
        let data = match self {
            AdmFunctor::Identity(_) => return m.clone(),
            AdmFunctor::UnderlyingPoints(c) => MorData::Table(c.point_map(m)),
            AdmFunctor::TerminalEmbedding(c) => return c.identity(&c.terminal()),
            AdmFunctor::ToTriv(_) => MorData::Unique,
            AdmFunctor::TruncationInclusion(..) => match &m.data {
                MorData::Trunc(inner) => return (**inner).clone(),
                _ => panic!("{m} is not truncated"),
            },
            AdmFunctor::WreathProjection { .. } => match &m.data {
                MorData::Wreath { base, .. } => return (**base).clone(),
                _ => panic!("{m} is not a wreath morphism"),
            },
            AdmFunctor::InnerSection { outer, .. } => MorData::Wreath {
                base: Box::new(outer.identity(&outer.terminal())),
                comps: vec![m.clone()],
            },
            AdmFunctor::OuterSection { inner, outer } => MorData::Wreath {
                base: Box::new(m.clone()),
                comps: vec![inner.identity(&inner.terminal()); outer.point_count(&m.src)],
            },
            AdmFunctor::Composite(f, g) => return f.apply_mor(&g.apply_mor(m)),
        };
        MorCode { src, tgt, data }
    }

    /// The image of a point of `I` as a point of `F(I)`.
    pub fn apply_point(&self, obj: &ObjCode, p: &Point) -> Result<Point> {
        let (src, tgt) = (self.source(), self.target());
        let theta = tgt.unique_iso(&tgt.terminal(), &self.apply_obj(&src.terminal()))?;
        let image = self.apply_mor(&src.point_mor(obj, p));
        Ok(tgt.mor_point(&tgt.compose(&image, &theta)?))
    }
}

impl fmt::Display for AdmFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmFunctor::Identity(c) => write!(f, "id[{c}]"),
            AdmFunctor::UnderlyingPoints(c) => write!(f, "u[{c}]"),
            AdmFunctor::TerminalEmbedding(c) => write!(f, "terminal[{c}]"),
            AdmFunctor::ToTriv(c) => write!(f, "collapse[{c}]"),
            AdmFunctor::TruncationInclusion(c, n) => write!(f, "incl[trunc:{c}:{n}]"),
            AdmFunctor::WreathProjection { inner, outer } => write!(f, "proj[wreath:{inner}:{outer}]"),
            AdmFunctor::InnerSection { inner, outer } => write!(f, "inner[wreath:{inner}:{outer}]"),
            AdmFunctor::OuterSection { inner, outer } => write!(f, "outer[wreath:{inner}:{outer}]"),
            AdmFunctor::Composite(a, b) => write!(f, "{a}.{b}"),
        }
    }
}

/// Outcome of checking a functor against the admissibility conditions.
#[derive(Clone, Debug)]
pub struct FunctorReport {
    /// Terminal object and fibers preserved.
    pub admissible: bool,
    /// Admissible and surjective on points of every object checked.
    pub operator_morphism: bool,
    /// Point maps injective and surjective on every object checked.
    pub point_bijective: bool,
    pub laws: LawReport,
}

pub fn check_admissible(f: &AdmFunctor, bound: usize) -> FunctorReport {
    let src = f.source();
    let tgt = f.target();
    let mut laws = LawReport::new("admissible", f, bound);
    let objects = src.objects(bound);

    let f_one = f.apply_obj(&src.terminal());
    let mut probes = tgt.objects(bound);
    probes.extend(objects.iter().map(|o| f.apply_obj(o)));
    let terminal_ok = tgt.is_terminal(&f_one, &probes);
    laws.check("terminal", &f_one, terminal_ok, || json!({ "image_of_terminal": cx(&f_one) }));

    // Point maps |I| -> |FI|.
    let mut surjective = true;
    let mut bijective = true;
    if terminal_ok {
        for obj in &objects {
            let image: Vec<Point> = src
                .points(obj)
                .iter()
                .map(|p| f.apply_point(obj, p).expect("terminal preserved"))
                .collect();
            let fobj = f.apply_obj(obj);
            let n_tgt = tgt.point_count(&fobj);
            let mut hit = vec![0usize; n_tgt];
            for q in &image {
                hit[tgt.point_index(&fobj, q)] += 1;
            }
            let onto = hit.iter().all(|&h| h >= 1);
            let inj = hit.iter().all(|&h| h <= 1);
            surjective &= onto;
            bijective &= onto && inj;
            laws.check("points-surjective", obj, onto, || json!({ "object": cx(obj), "hits": hit }));
        }
    }

    // Fibers: F(J_i) -> F(J) must be a fiber inclusion of F(f) over F(i).
    let pairs: Vec<(&ObjCode, &ObjCode)> = objects.iter().flat_map(|j| objects.iter().map(move |i| (j, i))).collect();
    let fiber_failures: Vec<serde_json::Value> = pairs
        .par_iter()
        .flat_map_iter(|(j, i)| {
            let mut bad = Vec::new();
            if !terminal_ok {
                return bad;
            }
            for m in src.hom(j, i) {
                let fm = f.apply_mor(&m);
                for p in src.points(i) {
                    let fb = src.fiber(&m, &p);
                    let q = f.apply_point(i, &p).expect("terminal preserved");
                    let tf = tgt.fiber(&fm, &q);
                    let theta = tgt.factor_through(&tf.incl, &f.apply_mor(&fb.incl));
                    let ok = matches!(&theta, Ok(Some(t)) if tgt.is_iso(t));
                    if !ok {
                        bad.push(json!({ "morphism": cx(&m), "point": cx(&p) }));
                    }
                }
            }
            bad
        })
        .collect();
    let fibers_ok = terminal_ok && fiber_failures.is_empty();
    if fiber_failures.is_empty() {
        laws.pass("fibers", format!("{} object pairs", pairs.len()));
    }
    for ce in fiber_failures {
        laws.fail("fibers", "pair", ce);
    }

    let admissible = terminal_ok && fibers_ok;
    FunctorReport {
        admissible,
        operator_morphism: admissible && surjective,
        point_bijective: terminal_ok && bijective,
        laws,
    }
}

/// As `check_admissible`, additionally recording that every surjective point
/// map of an operator morphism is a bijection.
pub fn check_operator_morphism(f: &AdmFunctor, bound: usize) -> FunctorReport {
    let mut report = check_admissible(f, bound);
    report.laws.suite = "operator-morphism".into();
    if report.operator_morphism {
        let ok = report.point_bijective;
        report.laws.check("points-bijective", f, ok, || json!("surjective point map that is not injective"));
    }
    if let Some(claim) = f.claimed_operator_morphism() {
        let ok = claim == report.operator_morphism;
        report.laws.check("claim", f, ok, || json!({ "claimed": claim, "found": report.operator_morphism }));
    }
    report
}

/// For `h = f ∘ g` with `f` an operator morphism, `g` is an operator
/// morphism iff `h` is.
pub fn two_out_of_three(f: &AdmFunctor, g: &AdmFunctor, bound: usize) -> Result<LawReport> {
    let h = AdmFunctor::then(g.clone(), f.clone())?;
    let mut report = LawReport::new("two-out-of-three", &h, bound);
    let rf = check_operator_morphism(f, bound);
    report.check("outer-is-operator-morphism", f, rf.operator_morphism, || json!(null));
    let rg = check_operator_morphism(g, bound);
    let rh = check_operator_morphism(&h, bound);
    report.check("inner-iff-composite", &h, rg.operator_morphism == rh.operator_morphism, || {
        json!({ "inner": rg.operator_morphism, "composite": rh.operator_morphism })
    });
    Ok(report)
}

/// Checks that the fiber of the wreath projection over each base object `I`
/// is the `|I|`-fold product of the inner category, on hom counts and
/// componentwise composition.
pub fn wreath_coronal_check(inner: &Category, outer: &Category, base_bound: usize, inner_bound: usize) -> LawReport {
    let wr = Category::wreath(inner.clone(), outer.clone());
    let mut report = LawReport::new("coronal", &wr, base_bound);
    let inner_objs = inner.objects(inner_bound);
    for base in outer.objects(base_bound) {
        let n = outer.point_count(&base);
        let over: Vec<ObjCode> = crate::category::product(&vec![inner_objs.clone(); n])
            .into_iter()
            .map(|fs| ObjCode::wreath(base.clone(), fs))
            .collect();
        let id = outer.identity(&base);
        let vertical = |x: &ObjCode, y: &ObjCode| -> Vec<MorCode> {
            wr.hom(x, y)
                .into_iter()
                .filter(|m| matches!(&m.data, MorData::Wreath { base, .. } if **base == id))
                .collect()
        };
        let mut ok = true;
        for x in &over {
            for y in &over {
                let (ObjCode::Wreath { fibers: xf, .. }, ObjCode::Wreath { fibers: yf, .. }) = (x, y) else {
                    unreachable!()
                };
                let expected: usize = xf.iter().zip(yf).map(|(a, b)| inner.hom(a, b).len()).product();
                if vertical(x, y).len() != expected {
                    ok = false;
                }
            }
        }
        // composition of vertical morphisms is componentwise
        for x in &over {
            for y in &over {
                for z in &over {
                    for g in vertical(y, z) {
                        for h in vertical(x, y) {
                            let gh = wr.compose_raw(&g, &h);
                            let (MorData::Wreath { comps: gc, .. }, MorData::Wreath { comps: hc, .. }, MorData::Wreath { comps: c, .. }) =
                                (&g.data, &h.data, &gh.data)
                            else {
                                unreachable!()
                            };
                            let expect: Vec<MorCode> = gc.iter().zip(hc).map(|(a, b)| inner.compose_raw(a, b)).collect();
                            if *c != expect {
                                ok = false;
                            }
                        }
                    }
                }
            }
        }
        report.check("fiber-is-product", &base, ok, || cx(&base));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functor_examples() {
        let u = underlying_points_functor(Category::Ord);
        assert_eq!(u.apply_obj(&ObjCode::Ord(3)), ObjCode::Fin(3));
        let t = terminal_embedding(Category::Fin);
        assert_eq!(t.apply_obj(&ObjCode::Triv), ObjCode::Fin(1));
        let s = wreath_inner_section(Category::Ord, Category::Ord);
        assert_eq!(
            s.apply_obj(&ObjCode::Ord(2)),
            ObjCode::wreath(ObjCode::Ord(1), vec![ObjCode::Ord(2)])
        );
    }

    #[test]
    fn u_is_operator_morphism() {
        let r = check_operator_morphism(&underlying_points_functor(Category::Ord), 3);
        assert!(r.laws.passed(), "{}", r.laws);
        assert!(r.operator_morphism && r.point_bijective);
    }

    #[test]
    fn collapse_is_admissible_only() {
        let r = check_operator_morphism(&AdmFunctor::ToTriv(Category::Fin), 3);
        assert!(r.admissible);
        assert!(!r.operator_morphism);
        assert!(r.laws.checks.iter().any(|c| c.law == "claim" && c.pass));
    }

    #[test]
    fn functoriality_of_zoo() {
        let zoo = [
            underlying_points_functor(Category::Ord),
            wreath_projection(Category::Ord, Category::Ord),
            wreath_inner_section(Category::Ord, Category::Fin),
            wreath_outer_section(Category::Ord, Category::Fin),
            truncation_inclusion(Category::Fin, 2),
        ];
        for f in &zoo {
            let c = f.source();
            let d = f.target();
            let objs = c.objects(2);
            for x in &objs {
                assert_eq!(f.apply_mor(&c.identity(x)), d.identity(&f.apply_obj(x)));
                for y in &objs {
                    for z in &objs {
                        for g in c.hom(y, z) {
                            for h in c.hom(x, y) {
                                let lhs = f.apply_mor(&c.compose_raw(&g, &h));
                                let rhs = d.compose_raw(&f.apply_mor(&g), &f.apply_mor(&h));
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_out_of_three_small() {
        let u = underlying_points_functor(Category::Ord);
        for g in [
            terminal_embedding(Category::Ord),
            truncation_inclusion(Category::Ord, 2),
            wreath_projection(Category::Ord, Category::Ord),
        ] {
            let r = two_out_of_three(&u, &g, 2).unwrap();
            assert!(r.passed(), "{r}");
        }
        let r = two_out_of_three(&terminal_embedding(Category::Fin), &AdmFunctor::ToTriv(Category::Ord), 2).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn coronal() {
        let r = wreath_coronal_check(&Category::Ord, &Category::Ord, 2, 2);
        assert!(r.passed(), "{r}");
    }
}
