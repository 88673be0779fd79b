//! Interval inclusions: witnessed composites of fiber inclusions.

use serde::{Deserialize, Serialize};

use crate::category::{Category, Constraints, Fiber};
use crate::code::{MorCode, MorData, ObjCode, Point};
use crate::error::{OpcatError, Result};

/// One stage of a witness: the stage object is the fiber of `map` over `point`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberStep {
    pub map: MorCode,
    pub point: Point,
}

/// Exhibits `m: K -> J` as `J_r ↪ ⋯ ↪ J_1 ↪ J` precomposed with `iso: K -> J_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalWitness {
    pub steps: Vec<FiberStep>,
    pub iso: MorCode,
}

/// A pullback `K ×_J L` with its two projections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pullback {
    pub obj: ObjCode,
    pub to_left: MorCode,
    pub to_right: MorCode,
}

impl Category {
    /// Runs the chain of a witness starting at `target`, returning the last
    /// stage and its composite inclusion.
    pub fn witness_chain(&self, target: &ObjCode, w: &IntervalWitness) -> Result<Fiber> {
        let mut cur = Fiber {
            obj: target.clone(),
            incl: self.identity(target),
        };
        for (s, step) in w.steps.iter().enumerate() {
            if step.map.src != cur.obj {
                return Err(OpcatError::InvalidWitness(format!(
                    "step {s} starts at {} instead of {}",
                    step.map.src, cur.obj
                )));
            }
            self.check_morphism(&step.map)
                .map_err(|e| OpcatError::InvalidWitness(format!("step {s}: {e}")))?;
            if !self.points(&step.map.tgt).contains(&step.point) {
                return Err(OpcatError::InvalidWitness(format!("step {s}: point not in target")));
            }
            let fb = self.fiber(&step.map, &step.point);
            cur = Fiber {
                incl: self.compose_raw(&cur.incl, &fb.incl),
                obj: fb.obj,
            };
        }
        Ok(cur)
    }

    pub fn validate_witness(&self, m: &MorCode, w: &IntervalWitness) -> Result<()> {
        let chain = self.witness_chain(&m.tgt, w)?;
        if w.iso.src != m.src || w.iso.tgt != chain.obj {
            return Err(OpcatError::InvalidWitness("iso has the wrong ends".into()));
        }
        if !self.is_iso(&w.iso) {
            return Err(OpcatError::InvalidWitness("comparison is not an isomorphism".into()));
        }
        if self.compose_raw(&chain.incl, &w.iso) != *m {
            return Err(OpcatError::InvalidWitness(format!("chain does not reproduce {m}")));
        }
        Ok(())
    }

    /// A witness if `m` is an interval inclusion, `None` if it is not.
    ///
    /// Cyclic and semidirect instances have no recognition procedure and
    /// return `RecognitionUnsupported`; use `validate_witness` there.
    pub fn is_interval_inclusion(&self, m: &MorCode) -> Result<Option<IntervalWitness>> {
        let w = match self.recognize(m)? {
            Some(w) => w,
            None => return Ok(None),
        };
        self.validate_witness(m, &w)?;
        Ok(Some(w))
    }

    fn recognize(&self, m: &MorCode) -> Result<Option<IntervalWitness>> {
        match (self, &m.data) {
            (Category::Triv, _) => Ok(Some(IntervalWitness {
                steps: vec![],
                iso: m.clone(),
            })),
            (Category::Ord, MorData::Table(t)) => {
                if !t.windows(2).all(|w| w[1] == w[0] + 1) {
                    return Ok(None);
                }
                let n = self.point_count(&m.tgt);
                let indicator: Vec<usize> = match (t.first(), t.last()) {
                    (Some(&lo), Some(&hi)) => (0..n)
                        .map(|x| if x < lo { 0 } else if x <= hi { 1 } else { 2 })
                        .collect(),
                    _ => vec![0; n],
                };
                self.single_step(m, ObjCode::Ord(3), indicator)
            }
            (Category::Fin, MorData::Table(t)) => {
                let mut seen = vec![false; self.point_count(&m.tgt)];
                for &v in t {
                    if seen[v] {
                        return Ok(None);
                    }
                    seen[v] = true;
                }
                let indicator = seen.iter().map(|&b| b as usize).collect();
                self.single_step(m, ObjCode::Fin(2), indicator)
            }
            (Category::Cyc | Category::Semidir { .. }, _) => {
                Err(OpcatError::RecognitionUnsupported(self.to_string()))
            }
            (Category::Trunc { .. }, _) => Ok(self.search_witness(m)),
            (Category::Wreath { inner, outer }, MorData::Wreath { base, comps }) => {
                self.wreath_witness(inner, outer, m, base, comps)
            }
            _ => Err(OpcatError::InvalidMorphism(m.to_string())),
        }
    }

    fn single_step(&self, m: &MorCode, classifier: ObjCode, indicator: Vec<usize>) -> Result<Option<IntervalWitness>> {
        let step = FiberStep {
            map: MorCode {
                src: m.tgt.clone(),
                tgt: classifier,
                data: MorData::Table(indicator),
            },
            point: Point::Elem(1),
        };
        let fb = self.fiber(&step.map, &step.point);
        let iso = self
            .factor_through(&fb.incl, m)?
            .ok_or_else(|| OpcatError::InvalidWitness(format!("{m} misses its own image")))?;
        Ok(Some(IntervalWitness { steps: vec![step], iso }))
    }

    /// Depth-first search for a chain of proper fiber inclusions.
    fn search_witness(&self, m: &MorCode) -> Option<IntervalWitness> {
        if self.is_iso(m) {
            return Some(IntervalWitness {
                steps: vec![],
                iso: m.clone(),
            });
        }
        let Category::Trunc { bound, .. } = self else {
            return None;
        };
        let (n_src, n_tgt) = (self.point_count(&m.src), self.point_count(&m.tgt));
        for obj in self.objects(*bound) {
            for f in self.hom(&m.tgt, &obj) {
                for p in self.points(&obj) {
                    let fb = self.fiber(&f, &p);
                    let k = self.point_count(&fb.obj);
                    if k >= n_tgt || k < n_src {
                        continue;
                    }
                    let Ok(Some(h)) = self.factor_through(&fb.incl, m) else {
                        continue;
                    };
                    if let Some(mut rest) = self.search_witness(&h) {
                        rest.steps.insert(0, FiberStep { map: f.clone(), point: p.clone() });
                        return Some(rest);
                    }
                }
            }
        }
        None
    }

    fn wreath_witness(
        &self,
        inner: &Category,
        outer: &Category,
        m: &MorCode,
        base: &MorCode,
        comps: &[MorCode],
    ) -> Result<Option<IntervalWitness>> {
        let Some(base_w) = outer.is_interval_inclusion(base)? else {
            return Ok(None);
        };
        let mut comp_ws = Vec::with_capacity(comps.len());
        for c in comps {
            match inner.is_interval_inclusion(c)? {
                Some(w) => comp_ws.push(w),
                None => return Ok(None),
            }
        }
        let inner_star = inner.points(&inner.terminal()).remove(0);
        let outer_star = outer.points(&outer.terminal()).remove(0);
        let mut steps = Vec::new();
        let mut cur = m.tgt.clone();
        let mut advance = |cur: &mut ObjCode, step: FiberStep| {
            *cur = self.fiber(&step.map, &step.point).obj;
            steps.push(step);
        };

        // Shrink the base, carrying every fiber along unchanged.
        for bs in &base_w.steps {
            let ObjCode::Wreath { fibers, .. } = &cur else { unreachable!() };
            let n = outer.point_count(&bs.map.tgt);
            let step = FiberStep {
                map: MorCode {
                    src: cur.clone(),
                    tgt: ObjCode::wreath(bs.map.tgt.clone(), vec![inner.terminal(); n]),
                    data: MorData::Wreath {
                        base: Box::new(bs.map.clone()),
                        comps: fibers.iter().map(|q| inner.to_terminal(q)).collect(),
                    },
                },
                point: Point::pair(bs.point.clone(), inner_star.clone()),
            };
            advance(&mut cur, step);
        }

        // Then shrink one fiber at a time over a constant base map.
        let positions = outer.point_map(&base_w.iso);
        for (k, w) in comp_ws.iter().enumerate() {
            let pos = positions[k];
            for cs in &w.steps {
                let ObjCode::Wreath { base: cur_base, fibers } = &cur else { unreachable!() };
                let comps = fibers
                    .iter()
                    .enumerate()
                    .map(|(q, obj)| {
                        if q == pos {
                            cs.map.clone()
                        } else {
                            inner.constant(obj, &cs.map.tgt, &cs.point)
                        }
                    })
                    .collect();
                let step = FiberStep {
                    map: MorCode {
                        src: cur.clone(),
                        tgt: ObjCode::wreath(outer.terminal(), vec![cs.map.tgt.clone()]),
                        data: MorData::Wreath {
                            base: Box::new(outer.to_terminal(cur_base)),
                            comps,
                        },
                    },
                    point: Point::pair(outer_star.clone(), cs.point.clone()),
                };
                advance(&mut cur, step);
            }
        }

        let chain = self.witness_chain(&m.tgt, &IntervalWitness { steps: steps.clone(), iso: m.clone() })?;
        let iso = self
            .factor_through(&chain.incl, m)?
            .ok_or_else(|| OpcatError::InvalidWitness(format!("{m} does not factor through its chain")))?;
        Ok(Some(IntervalWitness { steps, iso }))
    }

    /// Pulls a witnessed interval inclusion `K ↪ J` back along `f: L -> J`.
    pub fn interval_pullback(&self, f: &MorCode, m: &MorCode, w: &IntervalWitness) -> Result<Pullback> {
        if f.tgt != m.tgt {
            return Err(OpcatError::Mismatch(format!("{f} and {m} have different targets")));
        }
        let mut obj = f.src.clone();
        let mut to_left = self.identity(&f.src);
        let mut to_stage = f.clone();
        for step in &w.steps {
            let lf = self.fiber(&self.compose(&step.map, &to_stage)?, &step.point);
            let sf = self.fiber(&step.map, &step.point);
            let moved = self.compose_raw(&to_stage, &lf.incl);
            to_stage = self
                .factor_through(&sf.incl, &moved)?
                .ok_or_else(|| OpcatError::InvalidWitness("stage does not factor".into()))?;
            to_left = self.compose_raw(&to_left, &lf.incl);
            obj = lf.obj;
        }
        let back = self
            .inverse(&w.iso)
            .ok_or_else(|| OpcatError::InvalidWitness("comparison is not invertible".into()))?;
        Ok(Pullback {
            obj,
            to_left,
            to_right: self.compose(&back, &to_stage)?,
        })
    }

    /// Checks by cone enumeration over `probes` that the square
    /// `f ∘ a = g ∘ b` with `a: P -> L`, `b: P -> K` is a pullback.
    pub fn is_pullback(&self, a: &MorCode, b: &MorCode, f: &MorCode, g: &MorCode, probes: &[ObjCode]) -> bool {
        if self.compose_raw(f, a) != self.compose_raw(g, b) {
            return false;
        }
        for x in probes {
            for u in self.hom(x, &f.src) {
                let fu = self.compose_raw(f, &u);
                // cones: v with g ∘ v = f ∘ u
                for v in self.hom_where(x, &g.src, &Constraints::none().post(g, &fu)) {
                    let h = self.hom_where(x, &a.src, &Constraints::none().post(a, &u).post(b, &v));
                    if h.len() != 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Cone-enumeration check that `fiber(f, i)` is a pullback of the point `i`.
    pub fn is_fiber_pullback(&self, f: &MorCode, i: &Point, fb: &Fiber, probes: &[ObjCode]) -> bool {
        let pt = self.point_mor(&f.tgt, i);
        let bang = self.to_terminal(&fb.obj);
        self.is_pullback(&fb.incl, &bang, f, &pt, probes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tab(src: ObjCode, tgt: ObjCode, t: &[usize]) -> MorCode {
        MorCode {
            src,
            tgt,
            data: MorData::Table(t.to_vec()),
        }
    }

    #[test]
    fn fin_injection_is_interval() {
        let m = tab(ObjCode::Fin(2), ObjCode::Fin(3), &[0, 2]);
        assert!(Category::Fin.is_interval_inclusion(&m).unwrap().is_some());
    }

    #[test]
    fn ord_gap_is_not_interval() {
        let m = tab(ObjCode::Ord(2), ObjCode::Ord(3), &[0, 2]);
        assert!(Category::Ord.is_interval_inclusion(&m).unwrap().is_none());
        let m = tab(ObjCode::Ord(2), ObjCode::Ord(3), &[1, 2]);
        assert!(Category::Ord.is_interval_inclusion(&m).unwrap().is_some());
    }

    #[test]
    fn identity_has_witness() {
        let oo = Category::wreath(Category::Ord, Category::Ord);
        for obj in oo.objects(2) {
            let w = oo.is_interval_inclusion(&oo.identity(&obj)).unwrap().unwrap();
            oo.validate_witness(&oo.identity(&obj), &w).unwrap();
        }
        let w = Category::Fin.is_interval_inclusion(&Category::Fin.identity(&ObjCode::Fin(2))).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn cyclic_recognition_is_witness_only() {
        let m = Category::Cyc.identity(&ObjCode::Cyc(2));
        assert!(matches!(
            Category::Cyc.is_interval_inclusion(&m),
            Err(OpcatError::RecognitionUnsupported(_))
        ));
        // the fiber of the identity over 0 is a valid witness for the inclusion of that point
        let f = Category::Cyc.identity(&ObjCode::Cyc(2));
        let w = IntervalWitness {
            steps: vec![FiberStep { map: f, point: Point::Elem(0) }],
            iso: Category::Cyc.identity(&ObjCode::Cyc(1)),
        };
        let incl = tab(ObjCode::Cyc(1), ObjCode::Cyc(2), &[0]);
        Category::Cyc.validate_witness(&incl, &w).unwrap();
        let wrong = tab(ObjCode::Cyc(1), ObjCode::Cyc(2), &[1]);
        assert!(Category::Cyc.validate_witness(&wrong, &w).is_err());
    }

    #[test]
    fn fin_pullback_example() {
        let f = tab(ObjCode::Fin(3), ObjCode::Fin(2), &[0, 0, 1]);
        let m = tab(ObjCode::Fin(1), ObjCode::Fin(2), &[0]);
        let w = Category::Fin.is_interval_inclusion(&m).unwrap().unwrap();
        let pb = Category::Fin.interval_pullback(&f, &m, &w).unwrap();
        assert_eq!(pb.obj, ObjCode::Fin(2));
        let probes = Category::Fin.objects(3);
        assert!(Category::Fin.is_pullback(&pb.to_left, &pb.to_right, &f, &m, &probes));
    }

    #[test]
    fn trunc_search_matches_ord() {
        let t = Category::trunc(Category::Ord, 3);
        let objs = t.objects(3);
        for j in &objs {
            for i in &objs {
                for m in t.hom(j, i) {
                    let MorData::Trunc(inner) = &m.data else { unreachable!() };
                    let expect = Category::Ord.is_interval_inclusion(inner).unwrap().is_some();
                    assert_eq!(t.is_interval_inclusion(&m).unwrap().is_some(), expect, "{m}");
                }
            }
        }
    }
}
