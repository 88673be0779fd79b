//! `Φ`-sequences, their morphisms, and the posets that relate them to `Λ(Φ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{product, Category};
use crate::code::{MorCode, MorData, ObjCode};
use crate::error::{exactly_one, OpcatError, Result};
use crate::interval::{IntervalWitness, Pullback};
use crate::leinster::{KleisliMor, Leinster};
use crate::category::Constraints;

/// A composable chain `I_0 -> I_1 -> … -> I_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhiSeq {
    pub objects: Vec<ObjCode>,
    pub arrows: Vec<MorCode>,
}

impl PhiSeq {
    /// The length `m`.
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn last(&self) -> &ObjCode {
        self.objects.last().expect("a sequence has at least one object")
    }

    /// The composite `I_k -> I_l` for `k <= l`.
    pub fn composite(&self, c: &Category, k: usize, l: usize) -> MorCode {
        let mut out = c.identity(&self.objects[k]);
        for a in &self.arrows[k..l] {
            out = c.compose_raw(a, &out);
        }
        out
    }
}

pub fn make_seq(c: &Category, objects: Vec<ObjCode>, arrows: Vec<MorCode>) -> Result<PhiSeq> {
    if objects.len() != arrows.len() + 1 {
        return Err(OpcatError::InvalidSequence(format!(
            "{} objects need {} arrows, got {}",
            objects.len(),
            objects.len().saturating_sub(1),
            arrows.len()
        )));
    }
    for o in &objects {
        c.check_object(o)?;
    }
    for (k, a) in arrows.iter().enumerate() {
        c.check_morphism(a)?;
        if a.src != objects[k] || a.tgt != objects[k + 1] {
            return Err(OpcatError::InvalidSequence(format!("arrow {k} is {a}, not {} -> {}", objects[k], objects[k + 1])));
        }
    }
    Ok(PhiSeq { objects, arrows })
}

/// The comparison `θ: J_k -> I_{η(k)} ×_{I_{η(l)}} J_l` that certifies one square as a pullback.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackCert {
    pub k: usize,
    pub l: usize,
    pub pullback: Pullback,
    pub theta: MorCode,
}

/// A morphism `(η, φ): (n, J) -> (m, I)` of `Φ`-sequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqMor {
    pub src: PhiSeq,
    pub tgt: PhiSeq,
    pub eta: Vec<usize>,
    pub components: Vec<MorCode>,
    pub witnesses: Vec<IntervalWitness>,
    pub certificates: Vec<PullbackCert>,
}

/// Checks every component is an interval inclusion and every square
/// `J_k -> J_l`, `I_{η(k)} -> I_{η(l)}` is a pullback; returns the first
/// violated condition as an error.
pub fn validate_seq_mor(c: &Category, src: &PhiSeq, tgt: &PhiSeq, eta: &[usize], components: &[MorCode]) -> Result<SeqMor> {
    let n = src.len();
    if eta.len() != n + 1 || components.len() != n + 1 {
        return Err(OpcatError::InvalidSequence("η and components must have one entry per source object".into()));
    }
    if eta.iter().any(|&e| e > tgt.len()) || eta.windows(2).any(|w| w[0] > w[1]) {
        return Err(OpcatError::InvalidSequence(format!("η = {eta:?} is not a monotone map into [0,{}]", tgt.len())));
    }
    let mut witnesses = Vec::new();
    for (k, phi) in components.iter().enumerate() {
        if phi.src != src.objects[k] || phi.tgt != tgt.objects[eta[k]] {
            return Err(OpcatError::InvalidSequence(format!("component {k} is {phi}")));
        }
        c.check_morphism(phi)?;
        let w = c
            .is_interval_inclusion(phi)?
            .ok_or_else(|| OpcatError::InvalidSequence(format!("component {k} ({phi}) is not an interval inclusion")))?;
        witnesses.push(w);
    }
    let mut certificates = Vec::new();
    for l in 0..=n {
        for k in 0..=l {
            let a = src.composite(c, k, l);
            let b = tgt.composite(c, eta[k], eta[l]);
            let pullback = c.interval_pullback(&b, &components[l], &witnesses[l])?;
            let cons = Constraints::none()
                .post(&pullback.to_left, &components[k])
                .post(&pullback.to_right, &a);
            let theta = exactly_one(c.hom_where(&src.objects[k], &pullback.obj, &cons), || {
                format!("square {k} <= {l} does not factor uniquely through the pullback")
            })
            .map_err(|e| OpcatError::InvalidSequence(e.to_string()))?;
            if !c.is_iso(&theta) {
                return Err(OpcatError::InvalidSequence(format!("square {k} <= {l} is not a pullback")));
            }
            certificates.push(PullbackCert { k, l, pullback, theta });
        }
    }
    Ok(SeqMor {
        src: src.clone(),
        tgt: tgt.clone(),
        eta: eta.to_vec(),
        components: components.to_vec(),
        witnesses,
        certificates,
    })
}

/// Re-derives every certificate of `f` from scratch.
pub fn recheck(c: &Category, f: &SeqMor) -> Result<()> {
    let again = validate_seq_mor(c, &f.src, &f.tgt, &f.eta, &f.components)?;
    if again.certificates.len() != f.certificates.len() {
        return Err(OpcatError::InvalidSequence("certificate count changed".into()));
    }
    for cert in &f.certificates {
        c.validate_witness(&f.components[cert.l], &f.witnesses[cert.l])?;
        let ok = c.compose(&cert.pullback.to_left, &cert.theta)? == f.components[cert.k]
            && c.compose(&cert.pullback.to_right, &cert.theta)? == f.src.composite(c, cert.k, cert.l)
            && c.is_iso(&cert.theta);
        if !ok {
            return Err(OpcatError::InvalidSequence(format!("certificate {} <= {} does not hold", cert.k, cert.l)));
        }
    }
    Ok(())
}

pub fn seq_identity(c: &Category, s: &PhiSeq) -> Result<SeqMor> {
    let comps: Vec<MorCode> = s.objects.iter().map(|o| c.identity(o)).collect();
    validate_seq_mor(c, s, s, &(0..=s.len()).collect::<Vec<_>>(), &comps)
}

/// All morphisms `src -> tgt`.
pub fn seq_hom(c: &Category, src: &PhiSeq, tgt: &PhiSeq) -> Result<Vec<SeqMor>> {
    let etas: Vec<Vec<usize>> = product(&vec![(0..=tgt.len()).collect::<Vec<_>>(); src.len() + 1])
        .into_iter()
        .filter(|e| e.windows(2).all(|w| w[0] <= w[1]))
        .collect();
    let mut out = Vec::new();
    for eta in etas {
        let mut choices = Vec::new();
        for (k, &e) in eta.iter().enumerate() {
            let mut incl = Vec::new();
            for m in c.hom(&src.objects[k], &tgt.objects[e]) {
                if c.is_interval_inclusion(&m)?.is_some() {
                    incl.push(m);
                }
            }
            choices.push(incl);
        }
        for comps in product(&choices) {
            match validate_seq_mor(c, src, tgt, &eta, &comps) {
                Ok(f) => out.push(f),
                Err(OpcatError::InvalidSequence(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// `g ∘ f`.
pub fn seq_compose(c: &Category, g: &SeqMor, f: &SeqMor) -> Result<SeqMor> {
    if f.tgt != g.src {
        return Err(OpcatError::Mismatch("sequence morphisms are not composable".into()));
    }
    let eta: Vec<usize> = f.eta.iter().map(|&e| g.eta[e]).collect();
    let comps = f
        .components
        .iter()
        .zip(&f.eta)
        .map(|(phi, &e)| c.compose(&g.components[e], phi))
        .collect::<Result<Vec<_>>>()?;
    validate_seq_mor(c, &f.src, &g.tgt, &eta, &comps)
}

/// The sequence of fibers `I_{0,i} -> … -> I_{m,i}` over a point `i` of `I_m`.
pub fn segal_restrict(c: &Category, s: &PhiSeq, i: &crate::code::Point) -> Result<PhiSeq> {
    Ok(segal_parts(c, s, i)?.0)
}

/// The restriction together with its inclusion into `s`.
pub fn segal_inclusion(c: &Category, s: &PhiSeq, i: &crate::code::Point) -> Result<SeqMor> {
    let (r, incls) = segal_parts(c, s, i)?;
    validate_seq_mor(c, &r, s, &(0..=s.len()).collect::<Vec<_>>(), &incls)
}

fn segal_parts(c: &Category, s: &PhiSeq, i: &crate::code::Point) -> Result<(PhiSeq, Vec<MorCode>)> {
    let m = s.len();
    if !c.points(s.last()).contains(i) {
        return Err(OpcatError::Mismatch(format!("{i:?} is not a point of {}", s.last())));
    }
    let fibers: Vec<_> = (0..=m).map(|k| c.fiber(&s.composite(c, k, m), i)).collect();
    let mut arrows = Vec::new();
    for k in 0..m {
        let moved = c.compose(&s.arrows[k], &fibers[k].incl)?;
        let a = c
            .factor_through(&fibers[k + 1].incl, &moved)?
            .ok_or_else(|| OpcatError::InvalidSequence("fiber does not map into the next fiber".into()))?;
        arrows.push(a);
    }
    let objects = fibers.iter().map(|f| f.obj.clone()).collect();
    let incls = fibers.into_iter().map(|f| f.incl).collect();
    Ok((make_seq(c, objects, arrows)?, incls))
}

/// `[J_0≀I_0 -> … -> J_m≀I_m]` in `Ψ≀Φ`.
pub fn seq_w(wr: &Category, jseq: &PhiSeq, iseq: &PhiSeq) -> Result<PhiSeq> {
    let Category::Wreath { outer, .. } = wr else {
        return Err(OpcatError::Mismatch(format!("{wr} is not a wreath product")));
    };
    if jseq.len() != iseq.len() {
        return Err(OpcatError::Mismatch("seq_W needs sequences of equal length".into()));
    }
    let objects: Vec<ObjCode> = jseq
        .objects
        .iter()
        .zip(&iseq.objects)
        .map(|(j, i)| crate::leinster::w_obj(outer, j, i))
        .collect();
    let arrows = (0..jseq.len())
        .map(|k| w_mor(outer, &objects[k], &objects[k + 1], &jseq.arrows[k], &iseq.arrows[k]))
        .collect();
    make_seq(wr, objects, arrows)
}

fn w_mor(outer: &Category, src: &ObjCode, tgt: &ObjCode, inner: &MorCode, base: &MorCode) -> MorCode {
    MorCode {
        src: src.clone(),
        tgt: tgt.clone(),
        data: MorData::Wreath {
            base: Box::new(base.clone()),
            comps: vec![inner.clone(); outer.point_count(&base.src)],
        },
    }
}

/// `W(f, g)` for morphisms with the same `η`.
pub fn seq_w_mor(wr: &Category, f: &SeqMor, g: &SeqMor) -> Result<SeqMor> {
    let Category::Wreath { outer, .. } = wr else {
        return Err(OpcatError::Mismatch(format!("{wr} is not a wreath product")));
    };
    if f.eta != g.eta {
        return Err(OpcatError::Mismatch("seq_W on morphisms needs equal index maps".into()));
    }
    let src = seq_w(wr, &f.src, &g.src)?;
    let tgt = seq_w(wr, &f.tgt, &g.tgt)?;
    let comps: Vec<MorCode> = (0..=src.len())
        .map(|k| {
            let t = &tgt.objects[f.eta[k]];
            w_mor(outer, &src.objects[k], t, &f.components[k], &g.components[k])
        })
        .collect();
    validate_seq_mor(wr, &src, &tgt, &f.eta, &comps)
}

/// A finite poset with a set of marked relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoset {
    pub elements: Vec<Vec<usize>>,
    /// All pairs `(a, b)` with `a <= b`, reflexive ones included.
    pub leq: Vec<(usize, usize)>,
    /// Marked non-identity relations.
    pub marked: Vec<(usize, usize)>,
}

impl MarkedPoset {
    fn build(elements: Vec<Vec<usize>>, leq: impl Fn(&[usize], &[usize]) -> bool, marked: impl Fn(&[usize], &[usize]) -> bool) -> MarkedPoset {
        let mut rel = Vec::new();
        let mut mk = Vec::new();
        for (a, x) in elements.iter().enumerate() {
            for (b, y) in elements.iter().enumerate() {
                if leq(x, y) {
                    rel.push((a, b));
                    if a != b && marked(x, y) {
                        mk.push((a, b));
                    }
                }
            }
        }
        MarkedPoset {
            elements,
            leq: rel,
            marked: mk,
        }
    }

    pub fn index(&self, e: &[usize]) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }

    pub fn is_leq(&self, a: usize, b: usize) -> bool {
        self.leq.contains(&(a, b))
    }
}

/// `Õ(m)`: pairs `(i, j)` with `0 <= i <= j <= m`, `(i', j') <= (i, j)` iff
/// `i <= i' <= j' <= j`.  Relations fixing the first coordinate are marked.
pub fn twisted_arrows(m: usize) -> MarkedPoset {
    let elements = (0..=m).flat_map(|i| (i..=m).map(move |j| vec![i, j])).collect();
    MarkedPoset::build(
        elements,
        |a, b| b[0] <= a[0] && a[0] <= a[1] && a[1] <= b[1],
        |a, b| a[0] == b[0],
    )
}

/// `F_σ` on `Õ(m)`: a `Φ`-sequence per element and a sequence morphism
/// `F_σ(b) -> F_σ(a)` per relation `a <= b`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FSigma {
    pub poset: MarkedPoset,
    pub labels: Vec<PhiSeq>,
    pub transitions: Vec<SeqMor>,
}

/// `σ` is a chain `I_0 -> … -> I_m` in `Λ(Φ)`.
pub fn f_sigma(l: &Leinster, sigma: &[KleisliMor]) -> Result<FSigma> {
    let c = l.category();
    let p = l.perfect();
    for w in sigma.windows(2) {
        if w[0].tgt != w[1].src {
            return Err(OpcatError::Mismatch("σ is not a composable chain".into()));
        }
    }
    let m = sigma.len();
    let objs: Vec<ObjCode> = match sigma.first() {
        Some(first) => std::iter::once(first.src.clone()).chain(sigma.iter().map(|s| s.tgt.clone())).collect(),
        None => return Err(OpcatError::Mismatch("f_sigma needs the chain's objects; use f_sigma_at for m = 0".into())),
    };
    f_sigma_chain(l, c, p, &objs, sigma, m)
}

/// `F_σ` for the length-0 chain at `obj`.
pub fn f_sigma_at(l: &Leinster, obj: &ObjCode) -> Result<FSigma> {
    f_sigma_chain(l, l.category(), l.perfect(), std::slice::from_ref(obj), &[], 0)
}

fn f_sigma_chain(
    l: &Leinster,
    c: &Category,
    p: &crate::perfect::Perfect,
    objs: &[ObjCode],
    sigma: &[KleisliMor],
    m: usize,
) -> Result<FSigma> {
    // composites[k][j] : I_k -> I_j in Λ(Φ)
    let mut composites: Vec<Vec<Option<KleisliMor>>> = vec![vec![None; m + 1]; m + 1];
    for k in 0..=m {
        let mut cur = l.kid(&objs[k])?;
        composites[k][k] = Some(cur.clone());
        for j in k + 1..=m {
            cur = l.kcompose(&sigma[j - 1], &cur)?;
            composites[k][j] = Some(cur.clone());
        }
    }
    // parts[j][k] = I_k ×_{TI_j} I_j as a fiber of I_k
    let mut parts = Vec::new();
    for j in 0..=m {
        let e = p.structure_map(&objs[j]);
        let row: Vec<_> = (0..=j)
            .map(|k| Ok(p.special_fiber(&c.compose(&e, &composites[k][j].as_ref().unwrap().carrier)?)))
            .collect::<Result<_>>()?;
        parts.push(row);
    }
    let label = |i: usize, j: usize| -> Result<PhiSeq> {
        let mut arrows = Vec::new();
        for k in 0..i {
            let step = &sigma[k];
            let ti = p.special_fiber(&p.structure_map(&step.tgt));
            let moved = c.compose(&step.carrier, &parts[j][k].incl)?;
            let old = c
                .factor_through(&ti.incl, &moved)?
                .ok_or_else(|| OpcatError::InvalidSequence("pullback leaves the old points".into()))?;
            let into_next = c.compose(&p.counit(&step.tgt)?, &old)?;
            let a = c
                .factor_through(&parts[j][k + 1].incl, &into_next)?
                .ok_or_else(|| OpcatError::InvalidSequence("pullback does not map into the next pullback".into()))?;
            arrows.push(a);
        }
        make_seq(c, (0..=i).map(|k| parts[j][k].obj.clone()).collect(), arrows)
    };
    let poset = twisted_arrows(m);
    let labels: Vec<PhiSeq> = poset.elements.iter().map(|e| label(e[0], e[1])).collect::<Result<_>>()?;
    let mut transitions = Vec::new();
    for &(a, b) in &poset.leq {
        let (ea, eb) = (&poset.elements[a], &poset.elements[b]);
        // F(i, j) -> F(i', j') with i <= i' <= j' <= j
        let (i, j, jp) = (eb[0], eb[1], ea[1]);
        let comps = (0..=i)
            .map(|k| {
                c.factor_through(&parts[jp][k].incl, &parts[j][k].incl)?
                    .ok_or_else(|| OpcatError::InvalidSequence("pullbacks are not nested".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        transitions.push(validate_seq_mor(c, &labels[b], &labels[a], &(0..=i).collect::<Vec<_>>(), &comps)?);
    }
    Ok(FSigma {
        poset,
        labels,
        transitions,
    })
}

/// `A(m, I)` with its labeling in `Λ(Φ)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabeledPoset {
    pub poset: MarkedPoset,
    /// `I_{r,i} = I_r ×_{I_s} {i}` per element.
    pub objects: Vec<ObjCode>,
    /// One Λ-morphism per entry of `poset.leq`.
    pub edges: Vec<KleisliMor>,
}

pub fn a_poset(l: &Leinster, s: &PhiSeq) -> Result<LabeledPoset> {
    let c = l.category();
    let p = l.perfect();
    let m = s.len();
    let mut elements = Vec::new();
    for r in 0..=m {
        for t in r..=m {
            for i in 0..c.point_count(&s.objects[t]) {
                elements.push(vec![r, t, i]);
            }
        }
    }
    let pmaps: Vec<Vec<Vec<usize>>> = (0..=m)
        .map(|a| (0..=m).map(|b| if a <= b { c.point_map(&s.composite(c, a, b)) } else { vec![] }).collect())
        .collect();
    let poset = MarkedPoset::build(
        elements,
        |x, y| x[0] <= y[0] && y[0] <= y[1] && y[1] <= x[1] && pmaps[y[1]][x[1]][y[2]] == x[2],
        |x, y| x[0] == y[0],
    );
    let fiber_of = |e: &[usize]| {
        let pt = c.points(&s.objects[e[1]])[e[2]].clone();
        c.fiber(&s.composite(c, e[0], e[1]), &pt)
    };
    let fibers: Vec<_> = poset.elements.iter().map(|e| fiber_of(e)).collect();
    let edges = poset
        .leq
        .par_iter()
        .map(|&(a, b)| {
            let (x, y) = (&poset.elements[a], &poset.elements[b]);
            let (u, v) = (&fibers[a], &fibers[b]);
            let h = c.compose(&s.composite(c, x[0], y[0]), &u.incl)?;
            let target_pt = c.points(&s.objects[y[1]])[y[2]].clone();
            let chi = p.classify(&s.objects[y[1]], &target_pt)?;
            let f = c.compose(&chi, &c.compose(&s.composite(c, y[0], y[1]), &h)?)?;
            let sf = p.special_fiber(&f);
            let g = c
                .factor_through(&v.incl, &c.compose(&h, &sf.incl)?)?
                .ok_or_else(|| OpcatError::InvalidSequence("label does not land in the target fiber".into()))?;
            l.wrap(&v.obj, p.lift_over_t(&f, &g)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledPoset {
        objects: fibers.into_iter().map(|f| f.obj).collect(),
        poset,
        edges,
    })
}

/// Every `Φ`-sequence of length `m` whose objects lie in `objects`.
pub fn all_sequences(c: &Category, objects: &[ObjCode], m: usize) -> Vec<PhiSeq> {
    let mut out: Vec<PhiSeq> = objects
        .iter()
        .map(|o| PhiSeq {
            objects: vec![o.clone()],
            arrows: vec![],
        })
        .collect();
    for _ in 0..m {
        let mut next = Vec::new();
        for s in &out {
            for o in objects {
                for a in c.hom(s.last(), o) {
                    let mut t = s.clone();
                    t.objects.push(o.clone());
                    t.arrows.push(a);
                    next.push(t);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Point;

    fn fin(a: usize, b: usize, t: &[usize]) -> MorCode {
        MorCode {
            src: ObjCode::Fin(a),
            tgt: ObjCode::Fin(b),
            data: MorData::Table(t.to_vec()),
        }
    }

    fn single(o: ObjCode) -> PhiSeq {
        PhiSeq {
            objects: vec![o],
            arrows: vec![],
        }
    }

    #[test]
    fn length_zero_homs_are_interval_inclusions() {
        let s = single(ObjCode::Fin(2));
        assert_eq!(seq_hom(&Category::Fin, &s, &s).unwrap().len(), 2);
        let o = single(ObjCode::Ord(2));
        assert_eq!(seq_hom(&Category::Ord, &single(ObjCode::Ord(1)), &o).unwrap().len(), 2);
    }

    #[test]
    fn validation_examples() {
        let c = Category::Fin;
        let s = make_seq(&c, vec![ObjCode::Fin(2), ObjCode::Fin(1)], vec![fin(2, 1, &[0, 0])]).unwrap();
        let id = seq_identity(&c, &s).unwrap();
        recheck(&c, &id).unwrap();
        let err = validate_seq_mor(&c, &single(ObjCode::Fin(2)), &single(ObjCode::Fin(1)), &[0], &[fin(2, 1, &[0, 0])]);
        assert!(matches!(err, Err(OpcatError::InvalidSequence(_))));
        // degeneracy [I] -> [I -> I] onto either end
        let t = make_seq(&c, vec![ObjCode::Fin(2), ObjCode::Fin(2)], vec![c.identity(&ObjCode::Fin(2))]).unwrap();
        let u = make_seq(&c, vec![ObjCode::Fin(2), ObjCode::Fin(2)], vec![c.identity(&ObjCode::Fin(2))]).unwrap();
        let ids = vec![c.identity(&ObjCode::Fin(2)); 2];
        assert!(validate_seq_mor(&c, &t, &single(ObjCode::Fin(2)), &[0, 0], &ids).is_ok());
        assert!(validate_seq_mor(&c, &t, &u, &[0, 1], &ids).is_ok());
    }

    #[test]
    fn squares_must_be_pullbacks() {
        // [F1 -> F1] into [F2 -> F1] by the first point is not a pullback square
        let c = Category::Fin;
        let src = make_seq(&c, vec![ObjCode::Fin(1), ObjCode::Fin(1)], vec![fin(1, 1, &[0])]).unwrap();
        let tgt = make_seq(&c, vec![ObjCode::Fin(2), ObjCode::Fin(1)], vec![fin(2, 1, &[0, 0])]).unwrap();
        let comps = vec![fin(1, 2, &[0]), fin(1, 1, &[0])];
        assert!(validate_seq_mor(&c, &src, &tgt, &[0, 1], &comps).is_err());
        // the restriction over the unique point is the whole sequence
        let r = segal_inclusion(&c, &tgt, &Point::Elem(0)).unwrap();
        assert_eq!(c.point_count(&r.src.objects[0]), 2);
    }

    #[test]
    fn segal_restriction_examples() {
        let c = Category::Fin;
        let s = make_seq(&c, vec![ObjCode::Fin(3), ObjCode::Fin(2)], vec![fin(3, 2, &[0, 0, 1])]).unwrap();
        let r = segal_restrict(&c, &s, &Point::Elem(0)).unwrap();
        assert_eq!(r.objects, vec![ObjCode::Fin(2), ObjCode::Fin(1)]);
        let k = ObjCode::Fin(2);
        let constant = make_seq(&c, vec![k.clone(), k.clone()], vec![c.identity(&k)]).unwrap();
        for i in c.points(&k) {
            let r = segal_restrict(&c, &constant, &i).unwrap();
            assert!(r.objects.iter().all(|o| c.is_iso(&c.to_terminal(o))));
        }
    }

    #[test]
    fn segal_restrictions_partition() {
        for c in [Category::Ord, Category::Fin] {
            for s in all_sequences(&c, &c.objects(2), 2) {
                let mut counts = vec![0; s.objects.len()];
                for i in c.points(s.last()) {
                    let r = segal_inclusion(&c, &s, &i).unwrap();
                    assert!(c.is_iso(&c.to_terminal(r.src.last())));
                    for (k, o) in r.src.objects.iter().enumerate() {
                        counts[k] += c.point_count(o);
                    }
                }
                let want: Vec<usize> = s.objects.iter().map(|o| c.point_count(o)).collect();
                assert_eq!(counts, want);
            }
        }
    }

    #[test]
    fn seq_compose_laws() {
        let c = Category::Ord;
        let seqs = all_sequences(&c, &c.objects(2), 1);
        let homs: Vec<_> = seqs
            .iter()
            .flat_map(|a| seqs.iter().map(move |b| (a, b)))
            .filter_map(|(a, b)| Some((a, b, seq_hom(&c, a, b).ok()?)))
            .collect();
        for (a, b, fs) in &homs {
            for f in fs {
                let ia = seq_identity(&c, a).unwrap();
                let ib = seq_identity(&c, b).unwrap();
                assert_eq!(&seq_compose(&c, f, &ia).unwrap(), f);
                assert_eq!(&seq_compose(&c, &ib, f).unwrap(), f);
            }
        }
    }

    #[test]
    fn seq_w_examples() {
        let wr = Category::wreath(Category::Ord, Category::Ord);
        let s = seq_w(&wr, &single(ObjCode::Ord(2)), &single(ObjCode::Ord(3))).unwrap();
        assert_eq!(wr.point_count(&s.objects[0]), 6);
        let jc = Category::Ord;
        let a = make_seq(&jc, vec![ObjCode::Ord(1), ObjCode::Ord(2)], vec![MorCode {
            src: ObjCode::Ord(1),
            tgt: ObjCode::Ord(2),
            data: MorData::Table(vec![1]),
        }])
        .unwrap();
        let ia = seq_identity(&jc, &a).unwrap();
        let w = seq_w_mor(&wr, &ia, &ia).unwrap();
        assert_eq!(w, seq_identity(&wr, &seq_w(&wr, &a, &a).unwrap()).unwrap());
    }

    #[test]
    fn seq_w_is_functorial() {
        let o = Category::Ord;
        let wr = Category::wreath(o.clone(), o.clone());
        let seqs = all_sequences(&o, &o.objects(1), 1);
        let mut homs = Vec::new();
        for a in &seqs {
            for b in &seqs {
                for f in seq_hom(&o, a, b).unwrap() {
                    homs.push(f);
                }
            }
        }
        for f in &homs {
            for g in homs.iter().filter(|g| g.eta == f.eta) {
                let w = seq_w_mor(&wr, f, g).unwrap();
                for f2 in homs.iter().filter(|h| h.src == f.tgt) {
                    for g2 in homs.iter().filter(|h| h.src == g.tgt && h.eta == f2.eta) {
                        let lhs = seq_w_mor(&wr, &seq_compose(&o, f2, f).unwrap(), &seq_compose(&o, g2, g).unwrap()).unwrap();
                        let rhs = seq_compose(&wr, &seq_w_mor(&wr, f2, g2).unwrap(), &w).unwrap();
                        assert_eq!(lhs.components, rhs.components);
                    }
                }
            }
        }
    }

    #[test]
    fn twisted_arrow_shapes() {
        assert_eq!(twisted_arrows(2).elements.len(), 6);
        assert_eq!(twisted_arrows(0).elements.len(), 1);
        let t = twisted_arrows(3);
        let top = t.index(&[0, 3]).unwrap();
        assert!((0..t.elements.len()).all(|a| t.is_leq(a, top)));
    }

    #[test]
    fn a_poset_examples() {
        let l = Leinster::new(Category::Fin).unwrap();
        let c = l.category().clone();
        let s = make_seq(&c, vec![ObjCode::Fin(2), ObjCode::Fin(1)], vec![fin(2, 1, &[0, 0])]).unwrap();
        let a = a_poset(&l, &s).unwrap();
        assert_eq!(a.poset.elements.len(), 4);
        assert_eq!(a.poset.elements.iter().filter(|e| e[0] == 0 && e[1] == 0).count(), 2);
        let z = a_poset(&l, &single(ObjCode::Fin(3))).unwrap();
        assert_eq!(z.poset.elements.len(), 3);
        assert!(z.poset.marked.is_empty());
    }

    #[test]
    fn a_poset_labels_are_inert_and_functorial() {
        for cat in [Category::Fin, Category::Ord] {
            let l = Leinster::new(cat.clone()).unwrap();
            for s in all_sequences(&cat, &cat.objects(2), 2) {
                let a = a_poset(&l, &s).unwrap();
                let edge = |x: usize, y: usize| &a.edges[a.poset.leq.iter().position(|&r| r == (x, y)).unwrap()];
                for &(x, y) in &a.poset.marked {
                    assert!(l.is_inert(edge(x, y)));
                }
                for &(x, y) in &a.poset.leq {
                    if x == y {
                        assert_eq!(edge(x, x), &l.kid(&a.objects[x]).unwrap());
                    }
                    for &(y2, z) in &a.poset.leq {
                        if y2 == y {
                            assert_eq!(&l.kcompose(edge(y, z), edge(x, y)).unwrap(), edge(x, z));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f_sigma_examples() {
        let l = Leinster::new(Category::Fin).unwrap();
        let phi = KleisliMor {
            src: ObjCode::Fin(3),
            tgt: ObjCode::Fin(2),
            carrier: fin(3, 3, &[0, 2, 1]),
        };
        assert!(l.is_inert(&phi));
        let fs = f_sigma(&l, std::slice::from_ref(&phi)).unwrap();
        let top = fs.poset.index(&[0, 1]).unwrap();
        assert_eq!(fs.labels[top].objects.len(), 1);
        assert_eq!(l.category().point_count(&fs.labels[top].objects[0]), 2);
        for (k, e) in fs.poset.elements.iter().enumerate() {
            if e[0] == e[1] {
                assert_eq!(fs.labels[k].last(), &[ObjCode::Fin(3), ObjCode::Fin(2)][e[0]]);
            }
        }
        let z = f_sigma_at(&l, &ObjCode::Fin(2)).unwrap();
        assert_eq!(z.labels, vec![single(ObjCode::Fin(2))]);
    }
}

/// Closed-form counts for `Õ(m)` and `A(m, I)` and inertness of marked labels,
/// over every sequence of length `<= max_len` with objects within `bound`.
pub fn poset_suite(l: &Leinster, max_len: usize, bound: usize) -> crate::report::LawReport {
    use serde_json::json;
    let c = l.category();
    let mut report = crate::report::LawReport::new("posets", c, bound);
    for m in 0..=max_len {
        let t = twisted_arrows(m);
        let want = (m + 1) * (m + 2) / 2;
        report.check("twisted-count", format!("m={m}"), t.elements.len() == want, || json!({ "got": t.elements.len() }));
        let seqs = all_sequences(c, &c.objects(bound), m);
        let checks: Vec<Vec<crate::report::LawCheck>> = seqs
            .par_iter()
            .map(|s| {
                let mut rep = crate::report::LawReport::new("", "", 0);
                let name = seq_name(s);
                match a_poset(l, s) {
                    Ok(a) => {
                        let want: usize = (0..=m).map(|t| (t + 1) * c.point_count(&s.objects[t])).sum();
                        rep.check("a-count", &name, a.poset.elements.len() == want, || json!({ "got": a.poset.elements.len(), "want": want }));
                        let bad: Vec<_> = a
                            .poset
                            .marked
                            .iter()
                            .filter(|&&e| !l.is_inert(&a.edges[a.poset.leq.iter().position(|&r| r == e).unwrap()]))
                            .collect();
                        rep.check("marked-inert", &name, bad.is_empty(), || json!({ "edges": bad }));
                    }
                    Err(e) => rep.fail("a-count", &name, json!({ "error": e.to_string() })),
                }
                rep.checks
            })
            .collect();
        report.checks.extend(checks.into_iter().flatten());
    }
    report
}

fn seq_name(s: &PhiSeq) -> String {
    let mut out = s.objects[0].to_string();
    for a in &s.arrows {
        out.push_str(&format!(" -{}-> {}", a.data, a.tgt));
    }
    out
}
