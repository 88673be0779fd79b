//! Point classifiers and the canonical monad `(T, ι, μ)` of a perfect
//! operator category.
//!
//! Only `T` on objects and morphisms and the structure maps `e_I` are given
//! by per-instance formulas. Classifying maps, the unit, the multiplication
//! and the colax structure maps are all found by constrained search with a
//! hard uniqueness check.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::category::{Category, Constraints, Fiber};
use crate::code::{MorCode, MorData, ObjCode, Point};
use crate::error::{exactly_one, OpcatError, Result};
use crate::functor::AdmFunctor;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointedObj {
    pub obj: ObjCode,
    pub basepoint: Point,
}

#[derive(Default, Debug)]
struct Memo(RwLock<HashMap<ObjCode, MorCode>>);

impl Memo {
    fn get_or(&self, key: &ObjCode, compute: impl FnOnce() -> Result<MorCode>) -> Result<MorCode> {
        if let Some(m) = self.0.read().unwrap().get(key) {
            return Ok(m.clone());
        }
        let m = compute()?;
        self.0.write().unwrap().insert(key.clone(), m.clone());
        Ok(m)
    }
}

#[derive(Debug)]
struct Inner {
    cat: Category,
    /// `(inner, outer)` handles for wreath instances.
    parts: Option<(Perfect, Perfect)>,
    units: Memo,
    mults: Memo,
    chi_t: OnceLock<MorCode>,
}

/// A perfect operator category. Cheap to clone; memo tables are shared.
#[derive(Clone, Debug)]
pub struct Perfect(Arc<Inner>);

impl Perfect {
    pub fn new(cat: Category) -> Result<Perfect> {
        let parts = match &cat {
            Category::Triv | Category::Ord | Category::Fin => None,
            Category::Wreath { inner, outer } => Some((
                Perfect::new((**inner).clone()).map_err(|_| OpcatError::NotPerfect(cat.to_string()))?,
                Perfect::new((**outer).clone()).map_err(|_| OpcatError::NotPerfect(cat.to_string()))?,
            )),
            _ => return Err(OpcatError::NotPerfect(cat.to_string())),
        };
        Ok(Perfect(Arc::new(Inner {
            cat,
            parts,
            units: Memo::default(),
            mults: Memo::default(),
            chi_t: OnceLock::new(),
        })))
    }

    pub fn category(&self) -> &Category {
        &self.0.cat
    }

    fn parts(&self) -> (&Perfect, &Perfect) {
        let (i, o) = self.0.parts.as_ref().expect("wreath instance");
        (i, o)
    }

    /// `(T, t)`.
    pub fn point_classifier(&self) -> PointedObj {
        match self.category() {
            Category::Triv => PointedObj {
                obj: ObjCode::Triv,
                basepoint: Point::Star,
            },
            Category::Ord => PointedObj {
                obj: ObjCode::Ord(3),
                basepoint: Point::Elem(1),
            },
            Category::Fin => PointedObj {
                obj: ObjCode::Fin(2),
                basepoint: Point::Elem(1),
            },
            Category::Wreath { .. } => {
                let (pi, po) = self.parts();
                let base = po.point_classifier();
                let fiber = pi.point_classifier();
                let fibers = po
                    .category()
                    .points(&base.obj)
                    .iter()
                    .map(|p| {
                        if *p == base.basepoint {
                            fiber.obj.clone()
                        } else {
                            pi.category().terminal()
                        }
                    })
                    .collect();
                PointedObj {
                    obj: ObjCode::wreath(base.obj, fibers),
                    basepoint: Point::pair(base.basepoint, fiber.basepoint),
                }
            }
            _ => unreachable!("checked in Perfect::new"),
        }
    }

    pub fn classifier_obj(&self) -> ObjCode {
        self.point_classifier().obj
    }

    pub fn special_point(&self) -> Point {
        self.point_classifier().basepoint
    }

    /// True iff the fiber of `m` over `v` is the terminal object, included as
    /// the point `w`.
    ///
    /// Having a single point is not enough in wreath products: `(O3;[O0,O1,O0])`
    /// has one point but is not terminal.
    pub fn is_conservative(&self, m: &MorCode, w: &Point, v: &Point) -> bool {
        let c = self.category();
        if c.apply(m, w) != *v {
            return false;
        }
        let fb = c.fiber(m, v);
        let pts = c.points(&fb.obj);
        pts.len() == 1 && c.apply(&fb.incl, &pts[0]) == *w && c.is_iso(&c.to_terminal(&fb.obj))
    }

    /// `χ_i: I -> T`, the unique conservative morphism `(I, i) -> (T, t)`.
    pub fn classify(&self, obj: &ObjCode, i: &Point) -> Result<MorCode> {
        let c = self.category();
        let pc = self.point_classifier();
        let pi = c.point_mor(obj, i);
        let pt = c.point_mor(&pc.obj, &pc.basepoint);
        let found: Vec<MorCode> = c
            .hom_where(obj, &pc.obj, &Constraints::none().pre(&pi, &pt))
            .into_iter()
            .filter(|m| self.is_conservative(m, i, &pc.basepoint))
            .collect();
        exactly_one(found, || format!("classifying map of {i} in {obj}"))
    }

    /// `TI`.
    pub fn apply_t(&self, obj: &ObjCode) -> ObjCode {
        match (self.category(), obj) {
            (Category::Triv, _) => ObjCode::Triv,
            (Category::Ord, ObjCode::Ord(n)) => ObjCode::Ord(n + 2),
            (Category::Fin, ObjCode::Fin(n)) => ObjCode::Fin(n + 1),
            (Category::Wreath { .. }, ObjCode::Wreath { base, fibers }) => {
                let (pi, po) = self.parts();
                let old = po.old_points(base);
                let fibers = old
                    .iter()
                    .map(|o| match o {
                        Some(i) => pi.apply_t(&fibers[*i]),
                        None => pi.category().terminal(),
                    })
                    .collect();
                ObjCode::wreath(po.apply_t(base), fibers)
            }
            _ => panic!("{obj} is not an object of {}", self.category()),
        }
    }

    /// For each point of `TI`, the index of the point of `I` it comes from
    /// through `ι_I`, or `None` for an added point.
    pub fn old_points(&self, obj: &ObjCode) -> Vec<Option<usize>> {
        let c = self.category();
        let t_obj = self.apply_t(obj);
        let sf = self.special_fiber(&self.structure_map(obj));
        let kappa = self.counit(obj).expect("special fiber of e_I is I");
        let mut out = vec![None; c.point_count(&t_obj)];
        for k in c.points(&sf.obj) {
            let j = c.point_index(&t_obj, &c.apply(&sf.incl, &k));
            out[j] = Some(c.point_index(obj, &c.apply(&kappa, &k)));
        }
        out
    }

    /// `e_I: TI -> T`.
    pub fn structure_map(&self, obj: &ObjCode) -> MorCode {
        let t_obj = self.apply_t(obj);
        let data = match (self.category(), obj) {
            (Category::Triv, _) => MorData::Unique,
            (Category::Ord, ObjCode::Ord(n)) => {
                let mut t = vec![0];
                t.extend(std::iter::repeat(1).take(*n));
                t.push(2);
                MorData::Table(t)
            }
            (Category::Fin, ObjCode::Fin(n)) => {
                let mut t = vec![1; *n];
                t.push(0);
                MorData::Table(t)
            }
            (Category::Wreath { .. }, ObjCode::Wreath { base, fibers }) => {
                let (pi, po) = self.parts();
                let comps = po
                    .old_points(base)
                    .iter()
                    .map(|o| match o {
                        Some(i) => pi.structure_map(&fibers[*i]),
                        None => pi.category().identity(&pi.category().terminal()),
                    })
                    .collect();
                MorData::Wreath {
                    base: Box::new(po.structure_map(base)),
                    comps,
                }
            }
            _ => panic!("{obj} is not an object of {}", self.category()),
        };
        MorCode {
            src: t_obj,
            tgt: self.classifier_obj(),
            data,
        }
    }

    /// `Tf: TJ -> TI`.
    pub fn apply_t_mor(&self, f: &MorCode) -> MorCode {
        let src = self.apply_t(&f.src);
        let tgt = self.apply_t(&f.tgt);
        let data = match (self.category(), &f.data) {
            (Category::Triv, _) => MorData::Unique,
            (Category::Ord, MorData::Table(t)) => {
                let m = self.category().point_count(&f.tgt);
                let mut out = vec![0];
                out.extend(t.iter().map(|x| x + 1));
                out.push(m + 1);
                MorData::Table(out)
            }
            (Category::Fin, MorData::Table(t)) => {
                let m = self.category().point_count(&f.tgt);
                let mut out = t.clone();
                out.push(m);
                MorData::Table(out)
            }
            (Category::Wreath { .. }, MorData::Wreath { base, comps }) => {
                let (pi, po) = self.parts();
                let comps = po
                    .old_points(&base.src)
                    .iter()
                    .map(|o| match o {
                        Some(j) => pi.apply_t_mor(&comps[*j]),
                        None => pi.category().identity(&pi.category().terminal()),
                    })
                    .collect();
                MorData::Wreath {
                    base: Box::new(po.apply_t_mor(base)),
                    comps,
                }
            }
            _ => panic!("{f} is not a morphism of {}", self.category()),
        };
        MorCode { src, tgt, data }
    }

    /// The fiber of `f: X -> T` over the special point.
    pub fn special_fiber(&self, f: &MorCode) -> Fiber {
        self.category().fiber(f, &self.special_point())
    }

    /// `κ_I: (TI)_t -> I`. The canonical encoding makes the special fiber of
    /// `e_I` literally `I`, so this is an identity; anything else is an error.
    pub fn counit(&self, obj: &ObjCode) -> Result<MorCode> {
        let sf = self.special_fiber(&self.structure_map(obj));
        if sf.obj == *obj {
            Ok(self.category().identity(obj))
        } else {
            Err(OpcatError::Uniqueness {
                context: format!("special fiber of e_{obj} is {}", sf.obj),
                found: 0,
            })
        }
    }

    /// The unique `h: X -> TI` with `e_I ∘ h = f` whose restriction to the
    /// special fiber `X_t` is `g: X_t -> I`.
    pub fn lift_over_t(&self, f: &MorCode, g: &MorCode) -> Result<MorCode> {
        let c = self.category();
        let xt = self.special_fiber(f);
        if g.src != xt.obj {
            return Err(OpcatError::Mismatch(format!("{g} does not start at the special fiber {}", xt.obj)));
        }
        let obj = &g.tgt;
        let t_obj = self.apply_t(obj);
        let e = self.structure_map(obj);
        let tf = self.special_fiber(&e);
        let kappa = self.counit(obj)?;
        let kappa_inv = c
            .inverse(&kappa)
            .ok_or_else(|| OpcatError::InvalidMorphism("counit is not invertible".into()))?;
        let on_fiber = c.compose(&tf.incl, &c.compose(&kappa_inv, g)?)?;
        let found = c.hom_where(&f.src, &t_obj, &Constraints::none().post(&e, f).pre(&xt.incl, &on_fiber));
        exactly_one(found, || format!("lift of {f} over T{obj}"))
    }

    /// `ι_I: I -> TI`.
    pub fn unit(&self, obj: &ObjCode) -> Result<MorCode> {
        self.0.units.get_or(obj, || {
            let c = self.category();
            let pc = self.point_classifier();
            let f = c.constant(obj, &pc.obj, &pc.basepoint);
            let xt = self.special_fiber(&f);
            let g = c
                .inverse(&xt.incl)
                .ok_or_else(|| OpcatError::InvalidMorphism("fiber of a constant map".into()))?;
            self.lift_over_t(&f, &g)
        })
    }

    /// `χ_t: TT -> T`, classifying `ι_T(t)`.
    pub fn chi_t(&self) -> Result<MorCode> {
        if let Some(m) = self.0.chi_t.get() {
            return Ok(m.clone());
        }
        let pc = self.point_classifier();
        let iota = self.unit(&pc.obj)?;
        let p = self.category().apply(&iota, &pc.basepoint);
        let m = self.classify(&self.apply_t(&pc.obj), &p)?;
        Ok(self.0.chi_t.get_or_init(|| m).clone())
    }

    /// `ρ_φ: J_t -> (TJ)_t`, the comparison between the special fiber of `φ`
    /// and that of `χ_t ∘ Tφ`, induced by `ι_J`.
    pub fn rho(&self, phi: &MorCode) -> Result<MorCode> {
        let c = self.category();
        let f = c.compose(&self.chi_t()?, &self.apply_t_mor(phi))?;
        let xt = self.special_fiber(&f);
        let jt = self.special_fiber(phi);
        let target = c.compose(&self.unit(&phi.src)?, &jt.incl)?;
        c.factor_through(&xt.incl, &target)?
            .ok_or_else(|| OpcatError::Uniqueness {
                context: format!("ρ for {phi}"),
                found: 0,
            })
    }

    /// `σ_φ: TJ -> T(J_t)` for `φ: J -> T`.
    pub fn sigma(&self, phi: &MorCode) -> Result<MorCode> {
        let c = self.category();
        let f = c.compose(&self.chi_t()?, &self.apply_t_mor(phi))?;
        let rho = self.rho(phi)?;
        let back = c
            .inverse(&rho)
            .ok_or_else(|| OpcatError::InvalidMorphism(format!("ρ for {phi} is not invertible")))?;
        self.lift_over_t(&f, &back)
    }

    /// `μ_I: T²I -> TI`.
    pub fn mult(&self, obj: &ObjCode) -> Result<MorCode> {
        self.0.mults.get_or(obj, || {
            let c = self.category();
            let e = self.structure_map(obj);
            let f = c.compose(&self.chi_t()?, &self.apply_t_mor(&e))?;
            let rho = self.rho(&e)?;
            let back = c
                .inverse(&rho)
                .ok_or_else(|| OpcatError::InvalidMorphism(format!("ρ for e_{obj} is not invertible")))?;
            let g = c.compose(&self.counit(obj)?, &back)?;
            self.lift_over_t(&f, &g)
        })
    }
}

/// An admissible functor between perfect operator categories.
#[derive(Clone, Debug)]
pub struct PerfectFunctor {
    pub functor: AdmFunctor,
    pub source: Perfect,
    pub target: Perfect,
}

impl PerfectFunctor {
    pub fn new(functor: AdmFunctor) -> Result<PerfectFunctor> {
        Ok(PerfectFunctor {
            source: Perfect::new(functor.source())?,
            target: Perfect::new(functor.target())?,
            functor,
        })
    }

    /// `α_{F,I}: F(T_Ψ I) -> T_Φ(F I)`.
    pub fn alpha(&self, obj: &ObjCode) -> Result<MorCode> {
        let (f, ps, pt) = (&self.functor, &self.source, &self.target);
        let phi = pt.category();
        let t_psi = ps.point_classifier();
        let f_obj = f.apply_obj(obj);
        let src = f.apply_obj(&ps.apply_t(obj));
        let tgt = pt.apply_t(&f_obj);
        let e_f = pt.structure_map(&f_obj);
        let chi = pt.classify(&f.apply_obj(&t_psi.obj), &f.apply_point(&t_psi.obj, &t_psi.basepoint)?)?;
        let over = phi.compose(&chi, &f.apply_mor(&ps.structure_map(obj)))?;
        let f_iota = f.apply_mor(&ps.unit(obj)?);
        let iota_f = pt.unit(&f_obj)?;
        let found = phi.hom_where(&src, &tgt, &Constraints::none().post(&e_f, &over).pre(&f_iota, &iota_f));
        exactly_one(found, || format!("α_{{{f}}} at {obj}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::underlying_points_functor;

    fn table(m: &MorCode) -> Vec<usize> {
        m.table().unwrap().to_vec()
    }

    #[test]
    fn classifiers() {
        let o = Perfect::new(Category::Ord).unwrap();
        assert_eq!(o.point_classifier().obj, ObjCode::Ord(3));
        assert_eq!(table(&o.classify(&ObjCode::Ord(3), &Point::Elem(1)).unwrap()), vec![0, 1, 2]);
        let f = Perfect::new(Category::Fin).unwrap();
        assert_eq!(table(&f.classify(&ObjCode::Fin(3), &Point::Elem(2)).unwrap()), vec![0, 0, 1]);
        let t = f.classifier_obj();
        assert_eq!(f.classify(&t, &Point::Elem(1)).unwrap(), Category::Fin.identity(&t));
    }

    #[test]
    fn ord_classifier_formula() {
        let o = Perfect::new(Category::Ord).unwrap();
        for n in 1..6 {
            for j in 0..n {
                let expect: Vec<usize> = (0..n).map(|k| if k < j { 0 } else if k == j { 1 } else { 2 }).collect();
                assert_eq!(table(&o.classify(&ObjCode::Ord(n), &Point::Elem(j)).unwrap()), expect);
            }
        }
    }

    #[test]
    fn non_conservative_constant() {
        let f = Perfect::new(Category::Fin).unwrap();
        let m = MorCode {
            src: ObjCode::Fin(2),
            tgt: ObjCode::Fin(2),
            data: MorData::Table(vec![1, 1]),
        };
        assert!(!f.is_conservative(&m, &Point::Elem(0), &Point::Elem(1)));
    }

    #[test]
    fn t_sizes_and_units() {
        let o = Perfect::new(Category::Ord).unwrap();
        assert_eq!(o.apply_t(&ObjCode::Ord(2)), ObjCode::Ord(4));
        assert_eq!(table(&o.unit(&ObjCode::Ord(2)).unwrap()), vec![1, 2]);
        let f = Perfect::new(Category::Fin).unwrap();
        assert_eq!(f.apply_t(&ObjCode::Fin(2)), ObjCode::Fin(3));
        assert_eq!(table(&f.unit(&ObjCode::Fin(2)).unwrap()), vec![0, 1]);
        let t = Perfect::new(Category::Triv).unwrap();
        assert_eq!(t.unit(&ObjCode::Triv).unwrap(), Category::Triv.identity(&ObjCode::Triv));
    }

    #[test]
    fn multiplication_examples() {
        let f = Perfect::new(Category::Fin).unwrap();
        // T²(Fin 1) = {x, b1, b2}; both added basepoints collapse
        assert_eq!(table(&f.mult(&ObjCode::Fin(1)).unwrap()), vec![0, 1, 1]);
        let o = Perfect::new(Category::Ord).unwrap();
        assert_eq!(table(&o.mult(&ObjCode::Ord(0)).unwrap()), vec![0, 0, 1, 1]);
    }

    #[test]
    fn lift_of_structure_map_is_identity() {
        let o = Perfect::new(Category::Ord).unwrap();
        let obj = ObjCode::Ord(2);
        let e = o.structure_map(&obj);
        let h = o.lift_over_t(&e, &Category::Ord.identity(&obj)).unwrap();
        assert_eq!(h, Category::Ord.identity(&o.apply_t(&obj)));
    }

    #[test]
    fn lift_to_new_basepoint() {
        let f = Perfect::new(Category::Fin).unwrap();
        let to_zero = MorCode {
            src: ObjCode::Fin(1),
            tgt: ObjCode::Fin(2),
            data: MorData::Table(vec![0]),
        };
        let g = MorCode {
            src: ObjCode::Fin(0),
            tgt: ObjCode::Fin(2),
            data: MorData::Table(vec![]),
        };
        assert_eq!(table(&f.lift_over_t(&to_zero, &g).unwrap()), vec![2]);
    }

    #[test]
    fn alpha_for_points_functor() {
        let pf = PerfectFunctor::new(underlying_points_functor(Category::Ord)).unwrap();
        // T(O1) = {⊥, x, ⊤} -> {x, +}
        assert_eq!(table(&pf.alpha(&ObjCode::Ord(1)).unwrap()), vec![1, 0, 1]);
        let id = PerfectFunctor::new(AdmFunctor::Identity(Category::Fin)).unwrap();
        let a = id.alpha(&ObjCode::Fin(2)).unwrap();
        assert_eq!(a, Category::Fin.identity(&ObjCode::Fin(3)));
    }

    #[test]
    fn wreath_classifier() {
        let oo = Perfect::new(Category::wreath(Category::Ord, Category::Ord)).unwrap();
        let pc = oo.point_classifier();
        assert_eq!(
            pc.obj,
            ObjCode::wreath(ObjCode::Ord(3), vec![ObjCode::Ord(1), ObjCode::Ord(3), ObjCode::Ord(1)])
        );
        assert!(Perfect::new(Category::trunc(Category::Ord, 3)).is_err());
        assert!(Perfect::new(Category::Cyc).is_err());
    }
}
