//! Comparisons of Leinster categories with pointed finite sets, with the
//! simplex category, and with wreath fibrations.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde_json::json;

use crate::category::{product, Category};
use crate::code::{MorCode, ObjCode};
use crate::error::Result;
use crate::functor::{wreath_projection, AdmFunctor};
use crate::leinster::{KleisliMor, Leinster};
use crate::perfect::PerfectFunctor;
use crate::report::{cx, LawReport};

/// Number of monotone maps `[0,n) -> [0,m)`, counted by brute force over all functions.
pub fn monotone_count_oracle(n: usize, m: usize) -> usize {
    product(&vec![(0..m).collect::<Vec<_>>(); n])
        .into_iter()
        .filter(|f| f.windows(2).all(|w| w[0] <= w[1]))
        .count()
}

/// `|khom(J, I)|` against `(|I|+1)^|J|` in `Λ(F)` and against the brute-force
/// count of monotone maps `|J| -> |I|+2` in `Λ(O)`.
pub fn hom_count_suite(bound: usize) -> Result<LawReport> {
    let mut report = LawReport::new("hom-counts", "F,O", bound);
    let (lf, lo) = (Leinster::new(Category::Fin)?, Leinster::new(Category::Ord)?);
    for j in 0..=bound {
        for i in 0..=bound {
            let got = lf.khom(&ObjCode::Fin(j), &ObjCode::Fin(i)).len();
            let want = (i + 1).pow(j as u32);
            report.check("gamma-count", format!("F{j}->F{i}"), got == want, || json!({ "got": got, "want": want }));
            let got = lo.khom(&ObjCode::Ord(j), &ObjCode::Ord(i)).len();
            let want = monotone_count_oracle(j, i + 2);
            report.check("delta-count", format!("O{j}->O{i}"), got == want, || json!({ "got": got, "want": want }));
        }
    }
    Ok(report)
}

/// `φ` as a pointed map `J₊ -> I₊`, listed on the points of `J`; `|I|` is the basepoint.
pub fn as_pointed_map(l: &Leinster, phi: &KleisliMor) -> Vec<usize> {
    let old = l.perfect().old_points(&phi.tgt);
    let base = l.category().point_count(&phi.tgt);
    l.category()
        .point_map(&phi.carrier)
        .into_iter()
        .map(|t| old[t].unwrap_or(base))
        .collect()
}

fn pointed_compose(g: &[usize], g_base: usize, f: &[usize], f_base: usize) -> Vec<usize> {
    f.iter().map(|&x| if x == f_base { g_base } else { g[x] }).collect()
}

/// `Λ(F) -> Γ^op`, `I ↦ I₊`.
pub fn gamma_compare(bound: usize) -> Result<LawReport> {
    let l = Leinster::new(Category::Fin)?;
    let mut report = LawReport::new("gamma-compare", "F", bound);
    let objs: Vec<ObjCode> = (0..=bound).map(ObjCode::Fin).collect();
    let mut pointed: HashMap<(usize, usize), Vec<(KleisliMor, Vec<usize>)>> = HashMap::new();
    for (j, jo) in objs.iter().enumerate() {
        for (i, io) in objs.iter().enumerate() {
            let homs: Vec<(KleisliMor, Vec<usize>)> = l
                .khom(jo, io)
                .into_par_iter()
                .map(|m| {
                    let p = as_pointed_map(&l, &m);
                    (m, p)
                })
                .collect();
            let distinct: HashSet<&Vec<usize>> = homs.iter().map(|(_, p)| p).collect();
            let ok = distinct.len() == homs.len() && homs.len() == (i + 1).pow(j as u32);
            report.check("hom-bijective", format!("F{j}->F{i}"), ok, || json!({ "images": distinct.len(), "homs": homs.len() }));
            for (m, p) in &homs {
                let singletons = (0..i).all(|x| p.iter().filter(|&&y| y == x).count() == 1);
                report.check("inert-characterization", m, l.is_inert(m) == singletons, || cx(p));
                let active = p.iter().all(|&y| y != i);
                report.check("active-characterization", m, l.is_active(m) == active, || cx(p));
            }
            pointed.insert((j, i), homs);
        }
        let id = l.kid(jo)?;
        report.check("identity", jo, as_pointed_map(&l, &id) == (0..j).collect::<Vec<_>>(), || cx(&id));
    }
    let small = bound.min(3);
    for a in 0..=small {
        for b in 0..=small {
            for d in 0..=small {
                let mut ok = true;
                for (psi, pp) in &pointed[&(a, b)] {
                    for (phi, pf) in &pointed[&(b, d)] {
                        let comp = l.kcompose(phi, psi)?;
                        if as_pointed_map(&l, &comp) != pointed_compose(pf, d, pp, b) {
                            ok = false;
                            report.fail("functoriality", &comp, json!([cx(phi), cx(psi)]));
                        }
                    }
                }
                if ok {
                    report.pass("functoriality", format!("F{a}->F{b}->F{d}"));
                }
            }
        }
    }
    Ok(report)
}

struct DeltaSide {
    /// `Mor(I, ∅)` in its total order.
    sorted: Vec<KleisliMor>,
    position: HashMap<MorCode, usize>,
}

/// `Λ(O) -> Δ^op`, `I ↦ Mor_{Λ(O)}(I, ∅)` ordered through `c_I`.
pub fn delta_compare(bound: usize) -> Result<LawReport> {
    let l = Leinster::new(Category::Ord)?;
    let c = l.category();
    let mut report = LawReport::new("delta-compare", "O", bound);
    let (empty, one) = (ObjCode::Ord(0), ObjCode::Ord(1));
    let ends = l.khom(&one, &empty);
    let (bot, top) = (&ends[0], &ends[1]);
    let mut sides: Vec<DeltaSide> = Vec::new();
    for n in 0..=bound + 1 {
        let obj = ObjCode::Ord(n);
        let d = l.khom(&obj, &empty);
        report.check("delta-count", &obj, d.len() == n + 1, || json!({ "got": d.len() }));
        // c_I : Mor(I, *) -> D × D
        let mut star: HashMap<(MorCode, MorCode), KleisliMor> = HashMap::new();
        let mut injective = true;
        for phi in l.khom(&obj, &one) {
            let key = (l.kcompose(bot, &phi)?.carrier, l.kcompose(top, &phi)?.carrier);
            if star.insert(key, phi).is_some() {
                injective = false;
            }
        }
        report.check("c-injective", &obj, injective, || json!(null));
        let leq = |a: &KleisliMor, b: &KleisliMor| star.contains_key(&(a.carrier.clone(), b.carrier.clone()));
        let mut order_ok = true;
        for a in &d {
            order_ok &= leq(a, a);
            for b in &d {
                order_ok &= leq(a, b) || leq(b, a);
                if a != b && leq(a, b) && leq(b, a) {
                    order_ok = false;
                }
                for e in &d {
                    if leq(a, b) && leq(b, e) {
                        order_ok &= leq(a, e);
                    }
                }
            }
        }
        report.check("total-order", &obj, order_ok, || json!(null));
        let mut sorted = d.clone();
        sorted.sort_by_key(|a| d.iter().filter(|b| leq(b, a)).count());
        let position: HashMap<MorCode, usize> =
            sorted.iter().enumerate().map(|(k, m)| (m.carrier.clone(), k)).collect();
        // ψ succeeds φ iff φ⋆ψ is some χ_i
        let chis: HashSet<MorCode> = c
            .points(&obj)
            .iter()
            .map(|i| l.classifying_mor(&obj, i).map(|m| m.carrier))
            .collect::<Result<_>>()?;
        for (a, b) in star.keys() {
            let succ = position[b] == position[a] + 1;
            let is_chi = chis.contains(&star[&(a.clone(), b.clone())].carrier);
            report.check("successor", &obj, succ == is_chi, || json!([cx(a), cx(b)]));
        }
        sides.push(DeltaSide { sorted, position });
    }
    let dmap = |phi: &KleisliMor, j: usize, i: usize| -> Result<Vec<usize>> {
        sides[i]
            .sorted
            .iter()
            .map(|psi| Ok(sides[j].position[&l.kcompose(psi, phi)?.carrier]))
            .collect()
    };
    let mut tables: HashMap<(usize, usize), Vec<(KleisliMor, Vec<usize>)>> = HashMap::new();
    for j in 0..=bound {
        for i in 0..=bound {
            let homs = l.khom(&ObjCode::Ord(j), &ObjCode::Ord(i));
            let mut images = HashSet::new();
            let mut entries = Vec::new();
            for phi in homs {
                let t = dmap(&phi, j, i)?;
                let monotone = t.windows(2).all(|w| w[0] <= w[1]);
                report.check("monotone", &phi, monotone, || cx(&t));
                let shift = (0..=i).all(|x| t[x] == t[0] + x);
                report.check("inert-characterization", &phi, l.is_inert(&phi) == shift, || cx(&t));
                let ends = t[0] == 0 && t[i] == j;
                report.check("active-characterization", &phi, l.is_active(&phi) == ends, || cx(&t));
                images.insert(t.clone());
                entries.push((phi, t));
            }
            let want = monotone_count_oracle(i + 1, j + 1);
            let ok = images.len() == entries.len() && entries.len() == want;
            report.check("hom-bijective", format!("O{j}->O{i}"), ok, || json!({ "images": images.len(), "want": want }));
            tables.insert((j, i), entries);
        }
        let id = l.kid(&ObjCode::Ord(j))?;
        report.check("identity", &id.src, dmap(&id, j, j)? == (0..=j).collect::<Vec<_>>(), || cx(&id));
    }
    let small = bound.min(3);
    for a in 0..=small {
        for b in 0..=small {
            for e in 0..=small {
                let mut ok = true;
                for (psi, tp) in &tables[&(a, b)] {
                    for (phi, tf) in &tables[&(b, e)] {
                        let t = dmap(&l.kcompose(phi, psi)?, a, e)?;
                        let want: Vec<usize> = tf.iter().map(|&x| tp[x]).collect();
                        if t != want {
                            ok = false;
                            report.fail("functoriality", format!("O{a}->O{b}->O{e}"), json!([cx(phi), cx(psi)]));
                        }
                    }
                }
                if ok {
                    report.pass("functoriality", format!("O{a}->O{b}->O{e}"));
                }
            }
        }
    }
    // n ↦ n^∨ = Mor_Δ(n, 1) without the two constant maps
    for n in 1..=bound + 1 {
        let dual = c
            .hom(&ObjCode::Ord(n), &ObjCode::Ord(2))
            .into_iter()
            .filter(|m| m.table().is_some_and(|t| t.first() != t.last()))
            .count();
        let back = l.khom(&ObjCode::Ord(dual), &empty).len();
        report.check("essentially-surjective", format!("[{n}]"), back == n, || json!({ "dual": dual, "back": back }));
    }
    Ok(report)
}

/// `Λ(F)` on all morphisms with source and target in `objects`: identities,
/// inert morphisms and composition are preserved.
pub fn lmap_suite(pf: &PerfectFunctor, objects: &[ObjCode], compose_bound: usize) -> LawReport {
    let src = Leinster::of(pf.source.clone());
    let tgt = Leinster::of(pf.target.clone());
    let c = pf.source.category();
    let mut report = LawReport::new(format!("lmap {}", pf.functor), c, objects.len());
    for obj in objects {
        let ok = src
            .kid(obj)
            .and_then(|id| pf.lmap(&id))
            .ok()
            .zip(tgt.kid(&pf.functor.apply_obj(obj)).ok())
            .is_some_and(|(a, b)| a == b);
        report.check("identity", obj, ok, || json!(null));
    }
    let homs: HashMap<(usize, usize), Vec<(KleisliMor, KleisliMor)>> = (0..objects.len())
        .flat_map(|a| (0..objects.len()).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| {
            let pairs = src
                .khom(&objects[a], &objects[b])
                .into_iter()
                .map(|m| {
                    let fm = pf.lmap(&m).expect("lmap of a valid morphism");
                    (m, fm)
                })
                .collect();
            ((a, b), pairs)
        })
        .collect();
    let mut keys: Vec<_> = homs.keys().copied().collect();
    keys.sort();
    for key in &keys {
        for (m, fm) in &homs[key] {
            if src.is_inert(m) {
                report.check("inert-preserved", m, tgt.is_inert(fm), || cx(fm));
            }
        }
    }
    let small: Vec<usize> = (0..objects.len())
        .filter(|&k| c.point_count(&objects[k]) <= compose_bound)
        .collect();
    for &a in &small {
        for &b in &small {
            for &d in &small {
                let mut ok = true;
                for (psi, fpsi) in &homs[&(a, b)] {
                    for (phi, fphi) in &homs[&(b, d)] {
                        let lhs = src.kcompose(phi, psi).and_then(|m| pf.lmap(&m));
                        let rhs = tgt.kcompose(fphi, fpsi);
                        if lhs.ok() != rhs.ok() {
                            ok = false;
                            report.fail("composition", &objects[a], json!([cx(phi), cx(psi)]));
                        }
                    }
                }
                if ok {
                    report.pass("composition", format!("{}->{}->{}", objects[a], objects[b], objects[d]));
                }
            }
        }
    }
    report
}

/// Cartesian lifts and fiber hom-counts for `Λ(Ψ≀Φ) -> Λ(Φ)`.
///
/// Every morphism `f: I' -> I` between outer objects within `bound` and every
/// `Y` over `I` within `bound` needs a cartesian `φ: X -> Y` over `f`.  Lift
/// candidates `X` range over all objects over `I'` whose fibers are within
/// `bound`; cartesianness is tested against every test object `Z` within `bound`.
pub fn fibration_check(inner: &Category, outer: &Category, bound: usize) -> Result<LawReport> {
    let wc = Category::wreath(inner.clone(), outer.clone());
    let mut report = LawReport::new("fibration", &wc, bound);
    let pf = PerfectFunctor::new(wreath_projection(inner.clone(), outer.clone()))?;
    let (q, b) = (Leinster::of(pf.source.clone()), Leinster::of(pf.target.clone()));
    let li = Leinster::new(inner.clone())?;
    let proj = |m: &KleisliMor| pf.lmap(m).expect("projection of a valid morphism");
    let base_of = |obj: &ObjCode| AdmFunctor::apply_obj(&pf.functor, obj);

    let test_objects = wc.objects(bound);
    let outer_objects = outer.objects(bound);
    let inner_objects = inner.objects(bound);
    let over = |i: &ObjCode| -> Vec<ObjCode> {
        product(&vec![inner_objects.clone(); outer.point_count(i)])
            .into_iter()
            .map(|fibers| ObjCode::wreath(i.clone(), fibers))
            .collect()
    };

    // fiber hom-counts: morphisms over kid_I against Π_i khom_Ψ(N_i, M_i)
    for i in &outer_objects {
        let id = b.kid(i)?;
        let fiber = over(i);
        for x in &fiber {
            for y in &fiber {
                let got = q.khom(x, y).iter().filter(|m| proj(m) == id).count();
                let want: usize = match (x, y) {
                    (ObjCode::Wreath { fibers: n, .. }, ObjCode::Wreath { fibers: m, .. }) => {
                        n.iter().zip(m).map(|(a, c)| li.khom(a, c).len()).product()
                    }
                    _ => unreachable!(),
                };
                report.check("fiber-hom-count", format!("{x}->{y}"), got == want, || json!({ "got": got, "want": want }));
            }
        }
    }

    let tasks: Vec<(KleisliMor, ObjCode)> = outer_objects
        .iter()
        .flat_map(|i2| outer_objects.iter().map(move |i| (i2, i)))
        .flat_map(|(i2, i)| {
            let ys: Vec<ObjCode> = test_objects.iter().filter(|y| base_of(y) == *i).cloned().collect();
            b.khom(i2, i)
                .into_iter()
                .flat_map(move |f| ys.clone().into_iter().map(move |y| (f.clone(), y)))
        })
        .collect();
    let results: Vec<(KleisliMor, ObjCode, Option<KleisliMor>)> = tasks
        .into_par_iter()
        .map(|(f, y)| {
            let found = over(&f.src).into_iter().find_map(|x| {
                q.khom(&x, &y)
                    .into_iter()
                    .filter(|phi| proj(phi) == f)
                    .find(|phi| is_cartesian(&q, &b, &proj, phi, &test_objects))
            });
            (f, y, found)
        })
        .collect();
    for (f, y, found) in results {
        report.check("cartesian-lift", format!("{f} at {y}"), found.is_some(), || json!({ "morphism": cx(&f), "over": cx(&y) }));
    }
    Ok(report)
}

/// `φ: X -> Y` is cartesian against the test objects: for every `ψ: Z -> Y`
/// and `g: pZ -> pX` with `p(φ)∘g = p(ψ)` there is exactly one `χ: Z -> X`
/// over `g` with `φ∘χ = ψ`.
fn is_cartesian(
    q: &Leinster,
    b: &Leinster,
    proj: &(dyn Fn(&KleisliMor) -> KleisliMor + Sync),
    phi: &KleisliMor,
    tests: &[ObjCode],
) -> bool {
    let f = proj(phi);
    tests.iter().all(|z| {
        let mut lifts: HashMap<(MorCode, MorCode), usize> = HashMap::new();
        for chi in q.khom(z, &phi.src) {
            let key = (proj(&chi).carrier, q.kcompose(phi, &chi).expect("composable").carrier);
            *lifts.entry(key).or_default() += 1;
        }
        let z_base = proj(&q.kid(z).expect("unit")).src;
        let gs = b.khom(&z_base, &f.src);
        q.khom(z, &phi.tgt).iter().all(|psi| {
            let p_psi = proj(psi);
            gs.iter()
                .filter(|g| b.kcompose(&f, g).ok().as_ref() == Some(&p_psi))
                .all(|g| lifts.get(&(g.carrier.clone(), psi.carrier.clone())) == Some(&1))
        })
    })
}
