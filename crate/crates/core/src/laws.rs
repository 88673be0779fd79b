//! Exhaustive law suites for operator categories, the canonical monad and
//! the colax structure of admissible functors.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::category::Category;
use crate::code::{MorCode, ObjCode};
use crate::error::Result;
use crate::interval::{FiberStep, IntervalWitness};
use crate::perfect::{Perfect, PerfectFunctor};
use crate::report::{cx, LawCheck, LawReport};

/// Collects per-object checks computed in parallel, preserving object order.
fn per_object<F>(report: &mut LawReport, objects: &[ObjCode], check: F)
where
    F: Fn(&ObjCode) -> Vec<LawCheck> + Sync + Send,
{
    let results: Vec<Vec<LawCheck>> = objects.par_iter().map(check).collect();
    report.checks.extend(results.into_iter().flatten());
}

fn record(out: &mut Vec<LawCheck>, law: &str, obj: &ObjCode, outcome: Result<Option<Value>>) {
    let (pass, counterexample) = match outcome {
        Ok(None) => (true, None),
        Ok(Some(v)) => (false, Some(v)),
        Err(e) => (false, Some(json!({ "error": e.to_string() }))),
    };
    out.push(LawCheck {
        law: law.into(),
        object: obj.to_string(),
        pass,
        counterexample,
    });
}

fn same(lhs: MorCode, rhs: MorCode) -> Option<Value> {
    if lhs == rhs {
        None
    } else {
        Some(json!({ "lhs": cx(&lhs), "rhs": cx(&rhs) }))
    }
}

/// Unit laws, associativity, the `ι ∘ ι` / `μ` pullback and the counit
/// isomorphism for every object with at most `bound` points.
pub fn monad_law_suite(p: &Perfect, bound: usize) -> LawReport {
    monad_law_suite_on(p, &p.category().objects(bound), bound)
}

pub fn monad_law_suite_on(p: &Perfect, objects: &[ObjCode], bound: usize) -> LawReport {
    let c = p.category();
    let mut report = LawReport::new("monad", c, bound);
    per_object(&mut report, objects, |obj| {
        let mut out = Vec::new();
        record(&mut out, "counit-iso", obj, (|| {
            let sf = p.special_fiber(&p.structure_map(obj));
            let kappa = p.counit(obj)?;
            let iota = p.unit(obj)?;
            // ι_I is the special-fiber inclusion up to κ
            Ok(if !c.is_iso(&kappa) {
                Some(json!({ "counit": cx(&kappa) }))
            } else {
                same(c.compose(&sf.incl, &c.inverse(&kappa).unwrap())?, iota)
            })
        })());
        record(&mut out, "unit-left", obj, (|| {
            let t = p.apply_t(obj);
            Ok(same(c.compose(&p.mult(obj)?, &p.unit(&t)?)?, c.identity(&t)))
        })());
        record(&mut out, "unit-right", obj, (|| {
            let t = p.apply_t(obj);
            Ok(same(c.compose(&p.mult(obj)?, &p.apply_t_mor(&p.unit(obj)?))?, c.identity(&t)))
        })());
        record(&mut out, "associativity", obj, (|| {
            let t = p.apply_t(obj);
            let mu = p.mult(obj)?;
            Ok(same(c.compose(&mu, &p.apply_t_mor(&mu))?, c.compose(&mu, &p.mult(&t)?)?))
        })());
        record(&mut out, "unit-mult-pullback", obj, (|| {
            // The pullback of ι_I along μ_I is the fiber of e_I ∘ μ_I over t;
            // it must be I itself, included by ι_TI ∘ ι_I.
            let t = p.apply_t(obj);
            let fb = p.special_fiber(&c.compose(&p.structure_map(obj), &p.mult(obj)?)?);
            let top = c.compose(&p.unit(&t)?, &p.unit(obj)?)?;
            Ok(match c.factor_through(&fb.incl, &top)? {
                Some(theta) if c.is_iso(&theta) => None,
                other => Some(json!({ "fiber": cx(&fb.obj), "comparison": cx(&other) })),
            })
        })());
        out
    });
    report
}

/// Naturality of `ι` and `μ` and functoriality of `T` over all morphisms
/// between objects with at most `bound` points.
pub fn naturality_suite(p: &Perfect, bound: usize) -> LawReport {
    let c = p.category();
    let mut report = LawReport::new("naturality", c, bound);
    let objects = c.objects(bound);
    per_object(&mut report, &objects, |j| {
        let mut out = Vec::new();
        record(&mut out, "T-identity", j, Ok(same(p.apply_t_mor(&c.identity(j)), c.identity(&p.apply_t(j)))));
        for i in &objects {
            for f in c.hom(j, i) {
                record(&mut out, "unit-natural", j, (|| {
                    Ok(same(c.compose(&p.apply_t_mor(&f), &p.unit(j)?)?, c.compose(&p.unit(i)?, &f)?))
                })());
                record(&mut out, "mult-natural", j, (|| {
                    let tf = p.apply_t_mor(&f);
                    Ok(same(c.compose(&tf, &p.mult(j)?)?, c.compose(&p.mult(i)?, &p.apply_t_mor(&tf))?))
                })());
                for k in &objects {
                    for g in c.hom(i, k) {
                        let lhs = p.apply_t_mor(&c.compose_raw(&g, &f));
                        let rhs = c.compose_raw(&p.apply_t_mor(&g), &p.apply_t_mor(&f));
                        record(&mut out, "T-composition", j, Ok(same(lhs, rhs)));
                    }
                }
            }
        }
        out
    });
    report
}

/// Point-classifier uniqueness, `e_*` invertibility, `ρ` invertibility, the
/// `σ` square and `μ = T(κ) ∘ σ_e`.
pub fn classifier_suite(p: &Perfect, bound: usize) -> LawReport {
    let c = p.category();
    let mut report = LawReport::new("point-classifier", c, bound);
    let one = c.terminal();
    let e_one = p.structure_map(&one);
    report.check("e-terminal-iso", &one, c.is_iso(&e_one), || cx(&e_one));
    let t_obj = p.classifier_obj();
    let objects = c.objects(bound);
    per_object(&mut report, &objects, |obj| {
        let mut out = Vec::new();
        for i in c.points(obj) {
            record(&mut out, "classifier-unique", obj, p.classify(obj, &i).map(|_| None));
        }
        for phi in c.hom(obj, &t_obj) {
            record(&mut out, "rho-iso", obj, (|| {
                let rho = p.rho(&phi)?;
                Ok((!c.is_iso(&rho)).then(|| json!({ "phi": cx(&phi), "rho": cx(&rho) })))
            })());
            record(&mut out, "sigma-square", obj, (|| {
                let sigma = p.sigma(&phi)?;
                let jt = p.special_fiber(&phi);
                let f = c.compose(&p.chi_t()?, &p.apply_t_mor(&phi))?;
                let lhs = c.compose(&p.structure_map(&jt.obj), &sigma)?;
                if lhs != f {
                    return Ok(same(lhs, f));
                }
                // σ restricts to an isomorphism of special fibers
                let xt = p.special_fiber(&f);
                let yt = p.special_fiber(&p.structure_map(&jt.obj));
                let restricted = c.factor_through(&yt.incl, &c.compose(&sigma, &xt.incl)?)?;
                Ok(match restricted {
                    Some(r) if c.is_iso(&r) => None,
                    other => Some(json!({ "phi": cx(&phi), "restriction": cx(&other) })),
                })
            })());
        }
        record(&mut out, "mult-via-sigma", obj, (|| {
            let e = p.structure_map(obj);
            let via = c.compose(&p.apply_t_mor(&p.counit(obj)?), &p.sigma(&e)?)?;
            Ok(same(p.mult(obj)?, via))
        })());
        out
    });
    report
}

/// Both colax diagrams at every object, naturality of `α`, and the square
/// comparing `σ` of `Ψ` and of `Φ` through `α`.
pub fn colax_law_suite(pf: &PerfectFunctor, bound: usize) -> LawReport {
    let (f, ps, pt) = (&pf.functor, &pf.source, &pf.target);
    let (psi, phi) = (ps.category(), pt.category());
    let mut report = LawReport::new("colax", f, bound);
    let objects = psi.objects(bound);
    let t_psi = ps.point_classifier();
    per_object(&mut report, &objects, |obj| {
        let mut out = Vec::new();
        let fi = f.apply_obj(obj);
        record(&mut out, "colax-unit", obj, (|| {
            Ok(same(phi.compose(&pf.alpha(obj)?, &f.apply_mor(&ps.unit(obj)?))?, pt.unit(&fi)?))
        })());
        record(&mut out, "colax-mult", obj, (|| {
            let t = ps.apply_t(obj);
            let lhs = phi.compose(&pf.alpha(obj)?, &f.apply_mor(&ps.mult(obj)?))?;
            let rhs = phi.compose(
                &phi.compose(&pt.mult(&fi)?, &pt.apply_t_mor(&pf.alpha(obj)?))?,
                &pf.alpha(&t)?,
            )?;
            Ok(same(lhs, rhs))
        })());
        for i in &objects {
            for m in psi.hom(obj, i) {
                record(&mut out, "alpha-natural", obj, (|| {
                    let lhs = phi.compose(&pt.apply_t_mor(&f.apply_mor(&m)), &pf.alpha(obj)?)?;
                    let rhs = phi.compose(&pf.alpha(i)?, &f.apply_mor(&ps.apply_t_mor(&m)))?;
                    Ok(same(lhs, rhs))
                })());
            }
        }
        for psi_map in psi.hom(obj, &t_psi.obj) {
            record(&mut out, "sigma-alpha-square", obj, (|| {
                let jt = ps.special_fiber(&psi_map);
                let chi = pt.classify(&f.apply_obj(&t_psi.obj), &f.apply_point(&t_psi.obj, &t_psi.basepoint)?)?;
                let over = phi.compose(&chi, &f.apply_mor(&psi_map))?;
                let fj_t = pt.special_fiber(&over);
                let theta = phi.factor_through(&fj_t.incl, &f.apply_mor(&jt.incl))?;
                let Some(theta) = theta.filter(|t| phi.is_iso(t)) else {
                    return Ok(Some(json!({ "psi": cx(&psi_map), "error": "fiber not preserved" })));
                };
                let lhs = phi.compose(&pt.sigma(&over)?, &pf.alpha(obj)?)?;
                let rhs = phi.compose(
                    &phi.compose(&pt.apply_t_mor(&theta), &pf.alpha(&jt.obj)?)?,
                    &f.apply_mor(&ps.sigma(&psi_map)?),
                )?;
                Ok(same(lhs, rhs))
            })());
        }
        out
    });
    report
}

/// Interval inclusions between objects of `objects`, with witnesses.
///
/// Where recognition is unsupported, the one-step fiber inclusions of all
/// morphisms are used instead, each with its evident witness.
pub fn witnessed_inclusions(c: &Category, objects: &[ObjCode]) -> Vec<(MorCode, IntervalWitness)> {
    let mut out = Vec::new();
    for j in objects {
        for i in objects {
            for m in c.hom(j, i) {
                match c.is_interval_inclusion(&m) {
                    Ok(Some(w)) => out.push((m.clone(), w)),
                    Ok(None) => {}
                    Err(_) => {
                        for p in c.points(i) {
                            let fb = c.fiber(&m, &p);
                            let w = IntervalWitness {
                                steps: vec![FiberStep {
                                    map: m.clone(),
                                    point: p,
                                }],
                                iso: c.identity(&fb.obj),
                            };
                            if !out.iter().any(|(x, _)| *x == fb.incl) {
                                out.push((fb.incl, w));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The operator-category axioms and the interval-inclusion closure
/// properties, by enumeration. Probes for universal properties range over
/// objects with at most `probe_bound` points.
pub fn operator_axiom_suite(c: &Category, bound: usize, probe_bound: usize) -> LawReport {
    let mut report = LawReport::new("operator-category", c, bound);
    let objects = c.objects(bound);
    let probes = c.objects(probe_bound);
    let one = c.terminal();
    report.check("terminal", &one, c.is_terminal(&one, &objects), || cx(&one));

    per_object(&mut report, &objects, |j| {
        let mut out = Vec::new();
        let pts = c.points(j);
        let homs = c.hom(&one, j);
        let by_points: Vec<MorCode> = pts.iter().map(|p| c.point_mor(j, p)).collect();
        let mut sorted = homs.clone();
        sorted.sort();
        let mut expect = by_points.clone();
        expect.sort();
        record(&mut out, "points-are-homs", j, Ok((sorted != expect).then(|| cx(&homs))));
        for i in &objects {
            for f in c.hom(j, i) {
                let id_ok = c.compose_raw(&f, &c.identity(j)) == f && c.compose_raw(&c.identity(i), &f) == f;
                record(&mut out, "identity", j, Ok((!id_ok).then(|| cx(&f))));
                for p in c.points(i) {
                    let fb = c.fiber(&f, &p);
                    let ok = c.is_fiber_pullback(&f, &p, &fb, &probes);
                    record(&mut out, "fiber-pullback", j, Ok((!ok).then(|| json!({ "f": cx(&f), "point": cx(&p) }))));
                }
            }
        }
        out
    });

    let small = c.objects(probe_bound);
    for x in &small {
        for y in &small {
            for z in &small {
                for w in &small {
                    for h in c.hom(z, w) {
                        for g in c.hom(y, z) {
                            let hg = c.compose_raw(&h, &g);
                            for f in c.hom(x, y) {
                                let ok = c.compose_raw(&hg, &f) == c.compose_raw(&h, &c.compose_raw(&g, &f));
                                if !ok {
                                    report.fail("associativity", x, json!([cx(&h), cx(&g), cx(&f)]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report.pass("associativity", format!("objects up to {probe_bound} points"));

    let inclusions = witnessed_inclusions(c, &objects);
    let supported = !matches!(c, Category::Cyc | Category::Semidir { .. })
        && !matches!(c, Category::Wreath { inner, outer } if [&**inner, &**outer].iter().any(|x| matches!(x, Category::Cyc | Category::Semidir { .. })));
    let checks: Vec<Vec<LawCheck>> = inclusions
        .par_iter()
        .map(|(m, w)| {
            let mut out = Vec::new();
            let src = &m.src;
            record(&mut out, "witness-valid", src, c.validate_witness(m, w).map(|_| None));
            // monomorphism
            let mut mono = true;
            for x in &probes {
                let maps = c.hom(x, src);
                for a in &maps {
                    for b in &maps {
                        if a != b && c.compose_raw(m, a) == c.compose_raw(m, b) {
                            mono = false;
                        }
                    }
                }
            }
            record(&mut out, "interval-mono", src, Ok((!mono).then(|| cx(m))));
            // fibers over points of the target have at most one point
            let dich = c.points(&m.tgt).iter().all(|p| c.point_count(&c.fiber(m, p).obj) <= 1);
            record(&mut out, "dichotomy", src, Ok((!dich).then(|| cx(m))));
            if supported {
                for l in &probes {
                    for psi in c.hom(l, src) {
                        let lhs = c.is_interval_inclusion(&c.compose_raw(m, &psi)).map(|w| w.is_some());
                        let rhs = c.is_interval_inclusion(&psi).map(|w| w.is_some());
                        let ok = matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b);
                        record(&mut out, "left-cancellation", src, Ok((!ok).then(|| json!({ "m": cx(m), "psi": cx(&psi) }))));
                    }
                }
            }
            for l in &probes {
                for f in c.hom(l, &m.tgt) {
                    let outcome = c.interval_pullback(&f, m, w).map(|pb| {
                        let incl_ok = !supported
                            || matches!(c.is_interval_inclusion(&pb.to_left), Ok(Some(_)));
                        let square = c.is_pullback(&pb.to_left, &pb.to_right, &f, m, &probes);
                        (!(incl_ok && square)).then(|| json!({ "m": cx(m), "f": cx(&f) }))
                    });
                    record(&mut out, "interval-pullback", src, outcome);
                }
            }
            out
        })
        .collect();
    report.checks.extend(checks.into_iter().flatten());
    report
}
