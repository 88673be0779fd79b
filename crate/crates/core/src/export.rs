//! Bounded JSON (`opcat/1`) and DOT exports.  Output order depends only on
//! the enumeration order, so reruns are byte-identical.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::category::Category;
use crate::code::{MorCode, ObjCode};
use crate::error::Result;
use crate::leinster::Leinster;
use crate::sequences::{LabeledPoset, MarkedPoset, PhiSeq};

pub const SCHEMA: &str = "opcat/1";

/// Composition tables with more composable pairs than this are omitted.
pub const MAX_COMPOSABLE_PAIRS: usize = 200_000;

struct Graph {
    objects: Vec<ObjCode>,
    /// `(src, tgt, code, inert/active flags)`
    morphisms: Vec<(usize, usize, MorCode, Option<(bool, bool)>)>,
    identities: Vec<usize>,
    composition: Option<Vec<[usize; 3]>>,
}

fn category_graph(c: &Category, bound: usize) -> Result<Graph> {
    let objects = c.objects(bound);
    let mut morphisms = Vec::new();
    let mut ids = HashMap::new();
    for (a, x) in objects.iter().enumerate() {
        for (b, y) in objects.iter().enumerate() {
            for m in c.hom(x, y) {
                ids.insert(m.clone(), morphisms.len());
                morphisms.push((a, b, m, None));
            }
        }
    }
    let identities = objects.iter().map(|o| ids[&c.identity(o)]).collect();
    let composition = composition_table(&objects, &morphisms, |g, f| Ok(ids[&c.compose(g, f)?]))?;
    Ok(Graph {
        objects,
        morphisms,
        identities,
        composition,
    })
}

fn leinster_graph(l: &Leinster, bound: usize) -> Result<Graph> {
    let objects = l.category().objects(bound);
    let mut morphisms = Vec::new();
    let mut ids = HashMap::new();
    let mut kms = Vec::new();
    for (a, x) in objects.iter().enumerate() {
        for (b, y) in objects.iter().enumerate() {
            for m in l.khom(x, y) {
                ids.insert(m.carrier.clone(), morphisms.len());
                morphisms.push((a, b, m.carrier.clone(), Some((l.is_inert(&m), l.is_active(&m)))));
                kms.push(m);
            }
        }
    }
    let identities = objects
        .iter()
        .map(|o| Ok(ids[&l.kid(o)?.carrier]))
        .collect::<Result<Vec<_>>>()?;
    let by_carrier: HashMap<&MorCode, usize> = kms.iter().enumerate().map(|(k, m)| (&m.carrier, k)).collect();
    let composition = composition_table(&objects, &morphisms, |g, f| {
        let comp = l.kcompose(&kms[by_carrier[g]], &kms[by_carrier[f]])?;
        Ok(ids[&comp.carrier])
    })?;
    Ok(Graph {
        objects,
        morphisms,
        identities,
        composition,
    })
}

fn composition_table(
    objects: &[ObjCode],
    morphisms: &[(usize, usize, MorCode, Option<(bool, bool)>)],
    compose: impl Fn(&MorCode, &MorCode) -> Result<usize>,
) -> Result<Option<Vec<[usize; 3]>>> {
    let mut out_of = vec![Vec::new(); objects.len()];
    for (k, m) in morphisms.iter().enumerate() {
        out_of[m.0].push(k);
    }
    let pairs: usize = morphisms.iter().map(|m| out_of[m.1].len()).sum();
    if pairs > MAX_COMPOSABLE_PAIRS {
        return Ok(None);
    }
    let mut table = Vec::with_capacity(pairs);
    for (f, fm) in morphisms.iter().enumerate() {
        for &g in &out_of[fm.1] {
            table.push([g, f, compose(&morphisms[g].2, &fm.2)?]);
        }
    }
    Ok(Some(table))
}

fn graph_json(kind: &str, c: &Category, bound: usize, g: &Graph) -> Value {
    let objects: Vec<Value> = g
        .objects
        .iter()
        .enumerate()
        .map(|(k, o)| json!({ "id": k, "label": o.to_string(), "code": o }))
        .collect();
    let morphisms: Vec<Value> = g
        .morphisms
        .iter()
        .enumerate()
        .map(|(k, (s, t, m, flags))| {
            let mut v = json!({ "id": k, "src": s, "tgt": t, "label": m.data.to_string(), "code": m });
            if let Some((inert, active)) = flags {
                v["inert"] = json!(inert);
                v["active"] = json!(active);
            }
            v
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "kind": kind,
        "category": c.to_string(),
        "bound": bound,
        "objects": objects,
        "morphisms": morphisms,
        "identities": g.identities,
        "composition": g.composition,
    })
}

fn graph_dot(name: &str, g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for (k, o) in g.objects.iter().enumerate() {
        writeln!(out, "  n{k} [label=\"{}\"];", escape(&o.to_string())).unwrap();
    }
    for (k, (s, t, m, flags)) in g.morphisms.iter().enumerate() {
        if g.identities.contains(&k) {
            continue;
        }
        let style = match flags {
            Some((true, true)) => " color=purple",
            Some((true, false)) => " color=blue",
            Some((false, true)) => " color=red",
            _ => "",
        };
        writeln!(out, "  n{s} -> n{t} [label=\"{}\"{style}];", escape(&m.data.to_string())).unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn category_json(c: &Category, bound: usize) -> Result<Value> {
    Ok(graph_json("category", c, bound, &category_graph(c, bound)?))
}

pub fn category_dot(c: &Category, bound: usize) -> Result<String> {
    Ok(graph_dot(&c.to_string(), &category_graph(c, bound)?))
}

/// `Λ(Φ)` with per-morphism `inert`/`active` flags; morphisms are listed by carrier.
pub fn leinster_json(l: &Leinster, bound: usize) -> Result<Value> {
    Ok(graph_json("leinster", l.category(), bound, &leinster_graph(l, bound)?))
}

/// Inert edges blue, active red, isomorphisms purple.
pub fn leinster_dot(l: &Leinster, bound: usize) -> Result<String> {
    Ok(graph_dot(&format!("L({})", l.category()), &leinster_graph(l, bound)?))
}

pub fn seq_json(s: &PhiSeq) -> Value {
    json!({
        "objects": s.objects.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        "arrows": s.arrows.iter().map(|a| a.data.to_string()).collect::<Vec<_>>(),
        "code": s,
    })
}

pub fn poset_json(p: &MarkedPoset, labels: Option<&LabeledPoset>) -> Value {
    let mut v = json!({
        "elements": p.elements,
        "leq": p.leq,
        "marked": p.marked,
    });
    if let Some(lp) = labels {
        v["labels"] = json!({
            "objects": lp.objects.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "edges": lp.edges.iter().map(|e| e.carrier.data.to_string()).collect::<Vec<_>>(),
        });
    }
    v
}

/// Hasse diagram; marked edges bold.
pub fn poset_dot(name: &str, p: &MarkedPoset, labels: Option<&LabeledPoset>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    for (k, e) in p.elements.iter().enumerate() {
        let tuple = e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let label = match labels {
            Some(lp) => format!("({tuple}) {}", lp.objects[k]),
            None => format!("({tuple})"),
        };
        writeln!(out, "  e{k} [label=\"{}\"];", escape(&label)).unwrap();
    }
    for (r, &(a, b)) in p.leq.iter().enumerate() {
        if a == b {
            continue;
        }
        let covered = p
            .leq
            .iter()
            .any(|&(x, y)| x == a && y != a && y != b && p.leq.contains(&(y, b)));
        if covered {
            continue;
        }
        let style = if p.marked.contains(&(a, b)) { " style=bold" } else { " style=dashed" };
        let label = labels.map(|lp| format!(" label=\"{}\"", escape(&lp.edges[r].carrier.data.to_string()))).unwrap_or_default();
        writeln!(out, "  e{a} -> e{b} [{}{label}];", style.trim_start()).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_export_shape() {
        let v = category_json(&Category::Ord, 2).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["objects"].as_array().unwrap().len(), 3);
        // monotone maps between sets of size <= 2
        let homs: usize = (0..=2usize).flat_map(|a| (0..=2usize).map(move |b| crate::compare::monotone_count_oracle(a, b))).sum();
        assert_eq!(v["morphisms"].as_array().unwrap().len(), homs);
        let comp = v["composition"].as_array().unwrap();
        assert!(!comp.is_empty());
    }

    #[test]
    fn exports_are_deterministic() {
        let l = Leinster::new(Category::Fin).unwrap();
        let a = to_pretty(&leinster_json(&l, 2).unwrap());
        let b = to_pretty(&leinster_json(&Leinster::new(Category::Fin).unwrap(), 2).unwrap());
        assert_eq!(a, b);
        let d = leinster_dot(&l, 1).unwrap();
        assert!(d.contains("color=blue"));
        let w = Category::wreath(Category::Ord, Category::Ord);
        assert_eq!(category_dot(&w, 2).unwrap(), category_dot(&w, 2).unwrap());
    }
}
