//! The Leinster category `Λ(Φ)`: the Kleisli category of the canonical monad.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::category::{Category, Fiber};
use crate::code::{MorCode, MorData, ObjCode, Point};
use crate::error::{OpcatError, Result};
use crate::perfect::{Perfect, PerfectFunctor};
use crate::report::{cx, LawReport};

/// A morphism `J -> I` of `Λ(Φ)`, stored as its carrier `J -> TI` in `Φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KleisliMor {
    pub src: ObjCode,
    pub tgt: ObjCode,
    pub carrier: MorCode,
}

impl fmt::Display for KleisliMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=>{}:{}", self.src, self.tgt, self.carrier.data)
    }
}

/// An inert-then-active factorization `J -> K -> I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub middle: ObjCode,
    pub inert: KleisliMor,
    pub active: KleisliMor,
    /// Identifies `middle` with `J ×_{TI} I`; the identity in the canonical encoding.
    pub comparison: MorCode,
}

/// Two inert morphisms out of `J` whose pullbacks partition `|J|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCospan {
    pub left: KleisliMor,
    pub right: KleisliMor,
}

#[derive(Clone, Debug)]
pub struct Leinster {
    perfect: Perfect,
}

impl Leinster {
    pub fn new(cat: Category) -> Result<Leinster> {
        Ok(Leinster {
            perfect: Perfect::new(cat)?,
        })
    }

    pub fn of(perfect: Perfect) -> Leinster {
        Leinster { perfect }
    }

    pub fn perfect(&self) -> &Perfect {
        &self.perfect
    }

    pub fn category(&self) -> &Category {
        self.perfect.category()
    }

    pub fn khom(&self, src: &ObjCode, tgt: &ObjCode) -> Vec<KleisliMor> {
        let t = self.perfect.apply_t(tgt);
        self.category()
            .hom(src, &t)
            .into_iter()
            .map(|carrier| KleisliMor {
                src: src.clone(),
                tgt: tgt.clone(),
                carrier,
            })
            .collect()
    }

    pub fn wrap(&self, tgt: &ObjCode, carrier: MorCode) -> Result<KleisliMor> {
        if carrier.tgt != self.perfect.apply_t(tgt) {
            return Err(OpcatError::Mismatch(format!("{carrier} does not land in T{tgt}")));
        }
        Ok(KleisliMor {
            src: carrier.src.clone(),
            tgt: tgt.clone(),
            carrier,
        })
    }

    pub fn kid(&self, obj: &ObjCode) -> Result<KleisliMor> {
        self.wrap(obj, self.perfect.unit(obj)?)
    }

    /// `φ ∘ ψ`, with carrier `μ_I ∘ Tφ ∘ ψ`.
    pub fn kcompose(&self, phi: &KleisliMor, psi: &KleisliMor) -> Result<KleisliMor> {
        if psi.tgt != phi.src {
            return Err(OpcatError::Mismatch(format!("cannot compose {phi} after {psi}")));
        }
        let c = self.category();
        let p = &self.perfect;
        let carrier = c.compose(&c.compose(&p.mult(&phi.tgt)?, &p.apply_t_mor(&phi.carrier))?, &psi.carrier)?;
        Ok(KleisliMor {
            src: psi.src.clone(),
            tgt: phi.tgt.clone(),
            carrier,
        })
    }

    /// `K = J ×_{TI} I` with its inclusion into `J`, and the map `K -> I`.
    pub fn pullback_part(&self, phi: &KleisliMor) -> Result<(Fiber, MorCode)> {
        let c = self.category();
        let p = &self.perfect;
        let e = p.structure_map(&phi.tgt);
        let k = p.special_fiber(&c.compose(&e, &phi.carrier)?);
        let ti = p.special_fiber(&e);
        let into_t = c
            .factor_through(&ti.incl, &c.compose(&phi.carrier, &k.incl)?)?
            .expect("the special fiber maps into the special fiber");
        let to_i = c.compose(&p.counit(&phi.tgt)?, &into_t)?;
        Ok((k, to_i))
    }

    pub fn is_inert(&self, phi: &KleisliMor) -> bool {
        let (_, to_i) = self.pullback_part(phi).expect("pullback part of a valid morphism");
        self.category().is_iso(&to_i)
    }

    pub fn is_active(&self, phi: &KleisliMor) -> bool {
        let (k, _) = self.pullback_part(phi).expect("pullback part of a valid morphism");
        self.category().is_iso(&k.incl)
    }

    pub fn is_iso(&self, phi: &KleisliMor) -> bool {
        self.is_inert(phi) && self.is_active(phi)
    }

    pub fn factorize(&self, phi: &KleisliMor) -> Result<Factorization> {
        let c = self.category();
        let p = &self.perfect;
        let (k, to_i) = self.pullback_part(phi)?;
        let over = c.compose(&p.structure_map(&phi.tgt), &phi.carrier)?;
        let inert = self.wrap(&k.obj, p.lift_over_t(&over, &c.identity(&k.obj))?)?;
        let active = self.wrap(&phi.tgt, c.compose(&p.unit(&phi.tgt)?, &to_i)?)?;
        Ok(Factorization {
            comparison: c.identity(&k.obj),
            middle: k.obj,
            inert,
            active,
        })
    }

    /// `χ_i` as a morphism `I -> {i}` of `Λ(Φ)`.
    pub fn classifying_mor(&self, obj: &ObjCode, i: &Point) -> Result<KleisliMor> {
        let c = self.category();
        let p = &self.perfect;
        let one = c.terminal();
        let e_inv = c
            .inverse(&p.structure_map(&one))
            .ok_or_else(|| OpcatError::NotPerfect(c.to_string()))?;
        self.wrap(&one, c.compose(&e_inv, &p.classify(obj, i)?)?)
    }

    /// The points of `J` that lie in `J ×_{TI} I`, as indices.
    pub fn pullback_points(&self, phi: &KleisliMor) -> Result<Vec<usize>> {
        let (k, _) = self.pullback_part(phi)?;
        let mut pts = self.category().point_map(&k.incl);
        pts.sort();
        Ok(pts)
    }

    /// All inert cospans `I <- J -> I'` with targets among `targets` whose
    /// pullbacks partition the points of `J`.
    pub fn pattern_cospans(&self, j: &ObjCode, targets: &[ObjCode]) -> Result<Vec<PatternCospan>> {
        let n = self.category().point_count(j);
        let mut inerts = Vec::new();
        for i in targets {
            for phi in self.khom(j, i) {
                if self.is_inert(&phi) {
                    let pts = self.pullback_points(&phi)?;
                    inerts.push((phi, pts));
                }
            }
        }
        let mut out = Vec::new();
        for (a, pa) in &inerts {
            for (b, pb) in &inerts {
                let mut all: Vec<usize> = pa.iter().chain(pb).copied().collect();
                all.sort();
                if all == (0..n).collect::<Vec<_>>() {
                    out.push(PatternCospan {
                        left: a.clone(),
                        right: b.clone(),
                    });
                }
            }
        }
        Ok(out)
    }
}

impl PerfectFunctor {
    /// `Λ(F)`: carrier `α_{F,I} ∘ F(carrier)`.
    pub fn lmap(&self, phi: &KleisliMor) -> Result<KleisliMor> {
        let c = self.target.category();
        let f = &self.functor;
        let carrier = c.compose(&self.alpha(&phi.tgt)?, &f.apply_mor(&phi.carrier))?;
        Ok(KleisliMor {
            src: f.apply_obj(&phi.src),
            tgt: f.apply_obj(&phi.tgt),
            carrier,
        })
    }
}

/// `W(κ, φ): K'≀J -> K≀I` in `Λ(Ψ≀Φ)` for `κ: K' -> K` in `Λ(Ψ)` and
/// `φ: J -> I` in `Λ(Φ)`.
pub fn kleisli_w(wr: &Leinster, kappa: &KleisliMor, phi: &KleisliMor) -> Result<KleisliMor> {
    let Category::Wreath { inner, outer } = wr.category() else {
        return Err(OpcatError::Mismatch(format!("{} is not a wreath product", wr.category())));
    };
    let p = wr.perfect();
    let (pi, po) = (Perfect::new((**inner).clone())?, Perfect::new((**outer).clone())?);
    let src = w_obj(outer, &kappa.src, &phi.src);
    let tgt = w_obj(outer, &kappa.tgt, &phi.tgt);
    let t_i = po.apply_t(&phi.tgt);
    let t_k = pi.apply_t(&kappa.tgt);
    let n_t = outer.point_count(&t_i);
    // κ ≀ φ : K'≀J -> TK≀TI
    let product = MorCode {
        src: src.clone(),
        tgt: ObjCode::wreath(t_i.clone(), vec![t_k.clone(); n_t]),
        data: MorData::Wreath {
            base: Box::new(phi.carrier.clone()),
            comps: vec![kappa.carrier.clone(); outer.point_count(&phi.src)],
        },
    };
    // ω : TK≀TI -> T(K≀I), identity on old points and collapsing new ones
    let t_tgt = p.apply_t(&tgt);
    let comps = po
        .old_points(&phi.tgt)
        .iter()
        .map(|o| match o {
            Some(_) => inner.identity(&t_k),
            None => inner.to_terminal(&t_k),
        })
        .collect();
    let omega = MorCode {
        src: product.tgt.clone(),
        tgt: t_tgt,
        data: MorData::Wreath {
            base: Box::new(outer.identity(&t_i)),
            comps,
        },
    };
    wr.wrap(&tgt, wr.category().compose(&omega, &product)?)
}

/// `K ≀ I = (I, [K, …, K])`.
pub fn w_obj(outer: &Category, k: &ObjCode, i: &ObjCode) -> ObjCode {
    ObjCode::wreath(i.clone(), vec![k.clone(); outer.point_count(i)])
}

/// Every inert-active factorization through an object of `middles`, grouped
/// by the composite carrier.
struct FactorIndex {
    by_composite: HashMap<MorCode, Vec<(KleisliMor, KleisliMor)>>,
}

/// Checks that every morphism between objects of `objects` has an
/// inert-active factorization, that the constructed one composes back, and
/// that every other factorization through an object of `objects` is linked
/// to it by exactly one comparison isomorphism.
pub fn factorization_suite(l: &Leinster, objects: &[ObjCode], bound: usize) -> LawReport {
    let c = l.category();
    let mut report = LawReport::new("factorization", c, bound);
    let classify = |xs: &[ObjCode], ys: &[ObjCode], keep: &(dyn Fn(&KleisliMor) -> bool + Sync)| {
        let table: Vec<((usize, usize), Vec<KleisliMor>)> = (0..xs.len())
            .into_par_iter()
            .flat_map_iter(|a| (0..ys.len()).map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), l.khom(&xs[a], &ys[b]).into_iter().filter(|m| keep(m)).collect()))
            .collect();
        table.into_iter().collect::<HashMap<_, _>>()
    };
    let inerts = classify(objects, objects, &|m| l.is_inert(m));
    let actives = classify(objects, objects, &|m| l.is_active(m));
    let isos = classify(objects, objects, &|m| l.is_iso(m));
    let index_of: HashMap<&ObjCode, usize> = objects.iter().enumerate().map(|(k, o)| (o, k)).collect();

    let pairs: Vec<(usize, usize)> = (0..objects.len())
        .flat_map(|a| (0..objects.len()).map(move |b| (a, b)))
        .collect();
    let results: Vec<Vec<crate::report::LawCheck>> = pairs
        .par_iter()
        .map(|&(ja, ia)| {
            let mut rep = LawReport::new("", "", 0);
            let mut index = FactorIndex {
                by_composite: HashMap::new(),
            };
            for ka in 0..objects.len() {
                for psi in &inerts[&(ja, ka)] {
                    for alpha in &actives[&(ka, ia)] {
                        let comp = l.kcompose(alpha, psi).expect("composable");
                        index
                            .by_composite
                            .entry(comp.carrier)
                            .or_default()
                            .push((psi.clone(), alpha.clone()));
                    }
                }
            }
            for phi in l.khom(&objects[ja], &objects[ia]) {
                let fact = match l.factorize(&phi) {
                    Ok(f) => f,
                    Err(e) => {
                        rep.fail("exists", &phi, json!({ "error": e.to_string() }));
                        continue;
                    }
                };
                let composes = l.kcompose(&fact.active, &fact.inert).ok() == Some(phi.clone());
                let kinds = l.is_inert(&fact.inert) && l.is_active(&fact.active);
                rep.check("exists", &phi, composes && kinds, || cx(&fact));
                let Some(&km) = index_of.get(&fact.middle) else {
                    rep.fail("unique", &phi, json!({ "middle outside bound": cx(&fact.middle) }));
                    continue;
                };
                let others = index.by_composite.get(&phi.carrier).cloned().unwrap_or_default();
                let mut ok = !others.is_empty();
                for (psi, alpha) in &others {
                    let Some(&kb) = index_of.get(&psi.tgt) else { unreachable!() };
                    let linking = isos[&(km, kb)]
                        .iter()
                        .filter(|theta| {
                            l.kcompose(theta, &fact.inert).ok().as_ref() == Some(psi)
                                && l.kcompose(alpha, theta).ok().as_ref() == Some(&fact.active)
                        })
                        .count();
                    if linking != 1 {
                        ok = false;
                    }
                }
                rep.check("unique", &phi, ok, || json!({ "factorizations": others.len() }));
            }
            rep.checks
        })
        .collect();
    report.checks.extend(results.into_iter().flatten());
    report
}

/// The factorization of one morphism, compared against every inert-active
/// factorization through an object of `middles`.
pub fn check_factorization(l: &Leinster, phi: &KleisliMor, middles: &[ObjCode]) -> Result<(Factorization, LawReport)> {
    let mut report = LawReport::new("factorization", l.category(), middles.len());
    let fact = l.factorize(phi)?;
    let composes = l.kcompose(&fact.active, &fact.inert)? == *phi;
    report.check("exists", phi, composes && l.is_inert(&fact.inert) && l.is_active(&fact.active), || cx(&fact));
    let mut found = 0;
    for k in middles {
        for psi in l.khom(&phi.src, k).into_iter().filter(|m| l.is_inert(m)) {
            for alpha in l.khom(k, &phi.tgt).into_iter().filter(|m| l.is_active(m)) {
                if l.kcompose(&alpha, &psi)? != *phi {
                    continue;
                }
                found += 1;
                let linking = l
                    .khom(&fact.middle, k)
                    .into_iter()
                    .filter(|theta| l.is_iso(theta))
                    .filter(|theta| {
                        l.kcompose(theta, &fact.inert).ok().as_ref() == Some(&psi)
                            && l.kcompose(&alpha, theta).ok().as_ref() == Some(&fact.active)
                    })
                    .count();
                report.check("unique", phi, linking == 1, || json!({ "inert": cx(&psi), "active": cx(&alpha), "comparisons": linking }));
            }
        }
    }
    report.check("enumerated", phi, found > 0, || json!({ "factorizations": found }));
    Ok((fact, report))
}

/// Leinster-category laws: unit and associativity of `kcompose`, closure
/// properties of inert and active morphisms, and inertness of `χ_i`.
pub fn leinster_law_suite(l: &Leinster, bound: usize) -> LawReport {
    let c = l.category();
    let mut report = LawReport::new("leinster", c, bound);
    let objects = c.objects(bound);
    let homs: HashMap<(usize, usize), Vec<KleisliMor>> = (0..objects.len())
        .flat_map(|a| (0..objects.len()).map(move |b| (a, b)))
        .map(|(a, b)| ((a, b), l.khom(&objects[a], &objects[b])))
        .collect();
    for (a, obj) in objects.iter().enumerate() {
        for i in c.points(obj) {
            let ok = l.classifying_mor(obj, &i).map(|m| l.is_inert(&m)).unwrap_or(false);
            report.check("classifying-inert", obj, ok, || cx(&i));
        }
        for b in 0..objects.len() {
            for phi in &homs[&(a, b)] {
                let left = l.kcompose(&l.kid(&objects[b]).unwrap(), phi).ok();
                let right = l.kcompose(phi, &l.kid(obj).unwrap()).ok();
                let ok = left.as_ref() == Some(phi) && right.as_ref() == Some(phi);
                report.check("unit", obj, ok, || cx(phi));
            }
        }
    }
    let n = objects.len();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |d| (a, b, d))))
        .collect();
    let checks: Vec<Vec<crate::report::LawCheck>> = triples
        .par_iter()
        .map(|&(a, b, d)| {
            let mut rep = LawReport::new("", "", 0);
            for psi in &homs[&(a, b)] {
                let (ip, ap) = (l.is_inert(psi), l.is_active(psi));
                for phi in &homs[&(b, d)] {
                    let comp = l.kcompose(phi, psi).unwrap();
                    let (ic, ac) = (l.is_inert(&comp), l.is_active(&comp));
                    let (iq, aq) = (l.is_inert(phi), l.is_active(phi));
                    if ip {
                        rep.check("inert-closure", &objects[a], ic == iq, || json!([cx(phi), cx(psi)]));
                    }
                    if ap && aq {
                        rep.check("active-closure", &objects[a], ac, || json!([cx(phi), cx(psi)]));
                    }
                }
            }
            rep.checks
        })
        .collect();
    report.checks.extend(checks.into_iter().flatten());
    let small: Vec<usize> = (0..objects.len()).filter(|&k| c.point_count(&objects[k]) <= 2).collect();
    let mut assoc_ok = true;
    for &a in &small {
        for &b in &small {
            for &d in &small {
                for &e in &small {
                    for h in &homs[&(d, e)] {
                        for g in &homs[&(b, d)] {
                            let hg = l.kcompose(h, g).unwrap();
                            for f in &homs[&(a, b)] {
                                let lhs = l.kcompose(&hg, f).unwrap();
                                let rhs = l.kcompose(h, &l.kcompose(g, f).unwrap()).unwrap();
                                if lhs != rhs {
                                    assoc_ok = false;
                                    report.fail("associativity", &objects[a], json!([cx(h), cx(g), cx(f)]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if assoc_ok {
        report.pass("associativity", "objects with at most 2 points");
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kmor(src: ObjCode, tgt: ObjCode, t_tgt: ObjCode, table: &[usize]) -> KleisliMor {
        KleisliMor {
            src: src.clone(),
            tgt,
            carrier: MorCode {
                src,
                tgt: t_tgt,
                data: MorData::Table(table.to_vec()),
            },
        }
    }

    #[test]
    fn hom_counts() {
        let f = Leinster::new(Category::Fin).unwrap();
        assert_eq!(f.khom(&ObjCode::Fin(2), &ObjCode::Fin(2)).len(), 9);
        let o = Leinster::new(Category::Ord).unwrap();
        assert_eq!(o.khom(&ObjCode::Ord(2), &ObjCode::Ord(1)).len(), 6);
        assert_eq!(o.khom(&ObjCode::Ord(1), &ObjCode::Ord(0)).len(), 2);
    }

    #[test]
    fn factorization_example() {
        let f = Leinster::new(Category::Fin).unwrap();
        let phi = kmor(ObjCode::Fin(3), ObjCode::Fin(2), ObjCode::Fin(3), &[0, 0, 2]);
        let fact = f.factorize(&phi).unwrap();
        assert_eq!(fact.middle, ObjCode::Fin(2));
        assert_eq!(fact.inert.carrier.table().unwrap(), &[0, 1, 2]);
        assert_eq!(fact.active.carrier.table().unwrap(), &[0, 0]);
        assert_eq!(f.kcompose(&fact.active, &fact.inert).unwrap(), phi);
        let (_, r) = check_factorization(&f, &phi, &Category::Fin.objects(3)).unwrap();
        assert!(r.passed(), "{r}");
        // Fin(2) has two automorphisms, hence two factorizations through it
        assert_eq!(r.count("unique"), 2);
    }

    #[test]
    fn inert_and_active_special_cases() {
        let o = Leinster::new(Category::Ord).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                for phi in o.khom(&ObjCode::Ord(j), &ObjCode::Ord(i)) {
                    let fact = o.factorize(&phi).unwrap();
                    if o.is_inert(&phi) {
                        assert!(o.is_iso(&fact.active));
                    }
                    if o.is_active(&phi) {
                        assert!(o.is_iso(&fact.inert));
                    }
                }
            }
        }
    }

    #[test]
    fn w_on_objects() {
        assert_eq!(
            Category::wreath(Category::Ord, Category::Ord).point_count(&w_obj(&Category::Ord, &ObjCode::Ord(2), &ObjCode::Ord(3))),
            6
        );
    }

    #[test]
    fn w_is_functorial() {
        let (lo, lf) = (Leinster::new(Category::Ord).unwrap(), Leinster::new(Category::Fin).unwrap());
        let wr = Leinster::new(Category::wreath(Category::Ord, Category::Fin)).unwrap();
        let os: Vec<ObjCode> = (0..3).map(ObjCode::Ord).collect();
        let fs: Vec<ObjCode> = (0..3).map(ObjCode::Fin).collect();
        for k in &os {
            for i in &fs {
                let w = kleisli_w(&wr, &lo.kid(k).unwrap(), &lf.kid(i).unwrap()).unwrap();
                assert_eq!(w, wr.kid(&w_obj(&Category::Fin, k, i)).unwrap());
            }
        }
        let (k0, k1, k2) = (ObjCode::Ord(1), ObjCode::Ord(2), ObjCode::Ord(1));
        let (i0, i1, i2) = (ObjCode::Fin(2), ObjCode::Fin(1), ObjCode::Fin(2));
        for a in lo.khom(&k0, &k1) {
            for b in lo.khom(&k1, &k2) {
                for f in lf.khom(&i0, &i1) {
                    for g in lf.khom(&i1, &i2) {
                        let lhs = kleisli_w(&wr, &lo.kcompose(&b, &a).unwrap(), &lf.kcompose(&g, &f).unwrap()).unwrap();
                        let rhs = wr
                            .kcompose(&kleisli_w(&wr, &b, &g).unwrap(), &kleisli_w(&wr, &a, &f).unwrap())
                            .unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn pattern_examples() {
        let f = Leinster::new(Category::Fin).unwrap();
        let singles = [ObjCode::Fin(1)];
        assert_eq!(f.pattern_cospans(&ObjCode::Fin(2), &singles).unwrap().len(), 2);
        let targets = Category::Fin.objects(2);
        assert_eq!(f.pattern_cospans(&ObjCode::Fin(1), &targets).unwrap().len(), 2);
        let cs = f.pattern_cospans(&ObjCode::Fin(0), &targets).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].left.tgt, ObjCode::Fin(0));
    }

    #[test]
    fn suites_small() {
        for c in [Category::Ord, Category::Fin] {
            let l = Leinster::new(c.clone()).unwrap();
            let r = leinster_law_suite(&l, 2);
            assert!(r.passed(), "{r}");
            let r = factorization_suite(&l, &c.objects(2), 2);
            assert!(r.passed(), "{r}");
        }
    }
}
