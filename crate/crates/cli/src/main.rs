use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use opcat::compare::{delta_compare, fibration_check, gamma_compare, hom_count_suite};
use opcat::export;
use opcat::functor::{
    terminal_embedding, truncation_inclusion, underlying_points_functor, wreath_inner_section, wreath_outer_section,
    wreath_projection,
};
use opcat::laws::{classifier_suite, colax_law_suite, monad_law_suite, naturality_suite, operator_axiom_suite};
use opcat::leinster::{check_factorization, factorization_suite, leinster_law_suite, KleisliMor, Leinster};
use opcat::sequences::{a_poset, all_sequences, make_seq, twisted_arrows, PhiSeq};
use opcat::{AdmFunctor, Category, LawReport, MorCode, MorData, ObjCode, OpcatError, Perfect, PerfectFunctor};

const EXIT_LAW_FAILURE: u8 = 1;
const EXIT_NOT_PERFECT: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "opcat", version, about = "Operator categories, their canonical monads and Leinster categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Category selector: triv | O | F | cyc | trunc:<sel>:<n> | wreath:<inner>:<outer> | semidir:<sel>
    #[arg(long)]
    cat: Option<String>,
    /// Object-size bound
    #[arg(long, env = "OPCAT_BOUND", default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled associativity spot checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Axioms,
    Monad,
    Naturality,
    Classifier,
    Colax,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FunctorKind {
    /// I ↦ |I| into F
    U,
    /// triv into the category
    Terminal,
    /// trunc:<sel>:<n> into <sel>
    TruncInclusion,
    /// wreath:A:B onto B
    Projection,
    /// A into wreath:A:B
    InnerSection,
    /// B into wreath:A:B
    OuterSection,
    Identity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Gamma,
    Delta,
    ThetaFibration,
    HomCounts,
}

#[derive(Subcommand)]
enum Command {
    /// Run law suites
    Laws {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Functor for the colax suite
        #[arg(long, value_enum, default_value = "u")]
        functor: FunctorKind,
    },
    /// Leinster-category laws, factorization uniqueness and a sampled associativity check
    Leinster {
        #[command(flatten)]
        common: Common,
        /// Number of sampled composable triples
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Factor a Kleisli morphism of Λ(O) or Λ(F) given by its carrier table
    Factor {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        src: usize,
        #[arg(long)]
        tgt: usize,
        /// Carrier table J -> TI, comma separated
        #[arg(long)]
        map: String,
    },
    /// Comparison checks
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        target: Target,
    },
    /// Export Φ-sequences with their A(m, I) posets and the twisted arrow poset
    Sequences {
        #[command(flatten)]
        common: Common,
        /// Sequence length m
        #[arg(long, default_value_t = 1)]
        len: usize,
        /// One sequence by object sizes (O or F), e.g. 3,2
        #[arg(long, requires = "maps")]
        objects: Option<String>,
        /// Its arrows as tables separated by ';', e.g. 0,0,1
        #[arg(long)]
        maps: Option<String>,
    },
    /// Export a bounded category (or its Leinster category) as JSON or DOT
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        leinster: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    NotPerfect(String),
    Laws(usize),
    Internal(String),
}

impl From<OpcatError> for Failure {
    fn from(e: OpcatError) -> Self {
        match e {
            OpcatError::Parse(_) | OpcatError::InvalidMorphism(_) | OpcatError::NotAnObject { .. } | OpcatError::Mismatch(_) => {
                Failure::Usage(e.to_string())
            }
            OpcatError::NotPerfect(_) => Failure::NotPerfect(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::NotPerfect(_) => EXIT_NOT_PERFECT,
            Failure::Laws(_) => EXIT_LAW_FAILURE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn reason(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::NotPerfect(m) => ("not-perfect", m.clone()),
            Failure::Laws(n) => ("law-failure", format!("{n} checks failed")),
            Failure::Internal(m) => ("internal", m.clone()),
        };
        json!({ "exit": self.code(), "reason": kind, "message": message })
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            if code != 0 {
                eprintln!("{}", json!({ "exit": code, "reason": "usage", "message": e.kind().to_string() }));
            }
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.reason());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Laws { common, suite, functor } => cmd_laws(&common, suite, functor),
        Command::Leinster { common, samples } => cmd_leinster(&common, samples),
        Command::Factor { common, src, tgt, map } => cmd_factor(&common, src, tgt, &map),
        Command::Compare { common, target } => cmd_compare(&common, target),
        Command::Sequences { common, len, objects, maps } => cmd_sequences(&common, len, objects.as_deref(), maps.as_deref()),
        Command::Export { common, leinster } => cmd_export(&common, leinster),
    }
}

fn category(common: &Common, default: &str) -> Result<Category, Failure> {
    Ok(common.cat.as_deref().unwrap_or(default).parse::<Category>()?)
}

fn emit(common: &Common, text: &str) -> Outcome {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Internal(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_reports(common: &Common, reports: &[LawReport]) -> Outcome {
    let text = match common.format.unwrap_or(Format::Text) {
        Format::Text => reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n") + "\n",
        Format::Json => {
            let values: Vec<serde_json::Value> = reports.iter().map(|r| serde_json::to_value(r).expect("reports serialize")).collect();
            export::to_pretty(&json!({ "schema": export::SCHEMA, "kind": "reports", "reports": values }))
        }
        Format::Dot => return Err(Failure::Usage("law reports are available as text or json".into())),
    };
    emit(common, &text)?;
    let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
    if failed > 0 {
        Err(Failure::Laws(failed))
    } else {
        Ok(())
    }
}

fn functor_for(kind: FunctorKind, c: &Category) -> Result<AdmFunctor, Failure> {
    let wreath_parts = || match c {
        Category::Wreath { inner, outer } => Ok(((**inner).clone(), (**outer).clone())),
        _ => Err(Failure::Usage(format!("this functor needs a wreath selector, got {c}"))),
    };
    Ok(match kind {
        FunctorKind::U => underlying_points_functor(c.clone()),
        FunctorKind::Terminal => terminal_embedding(c.clone()),
        FunctorKind::TruncInclusion => match c {
            Category::Trunc { inner, bound } => truncation_inclusion((**inner).clone(), *bound),
            _ => return Err(Failure::Usage(format!("trunc-inclusion needs a trunc selector, got {c}"))),
        },
        FunctorKind::Projection => {
            let (i, o) = wreath_parts()?;
            wreath_projection(i, o)
        }
        FunctorKind::InnerSection => {
            let (i, o) = wreath_parts()?;
            wreath_inner_section(i, o)
        }
        FunctorKind::OuterSection => {
            let (i, o) = wreath_parts()?;
            wreath_outer_section(i, o)
        }
        FunctorKind::Identity => AdmFunctor::Identity(c.clone()),
    })
}

fn cmd_laws(common: &Common, suite: Suite, functor: FunctorKind) -> Outcome {
    let c = category(common, "O")?;
    let bound = common.bound as usize;
    let mut reports = Vec::new();
    if matches!(suite, Suite::All | Suite::Axioms) {
        reports.push(operator_axiom_suite(&c, bound, bound.min(2)));
    }
    let monad_suites = [Suite::Monad, Suite::Naturality, Suite::Classifier];
    let perfect = Perfect::new(c.clone());
    match (&perfect, suite) {
        (Err(e), s) if monad_suites.contains(&s) => return Err(Failure::NotPerfect(e.to_string())),
        (Ok(p), Suite::All) => {
            reports.push(monad_law_suite(p, bound));
            reports.push(naturality_suite(p, bound.min(3)));
            reports.push(classifier_suite(p, bound.min(3)));
        }
        (Ok(p), Suite::Monad) => reports.push(monad_law_suite(p, bound)),
        (Ok(p), Suite::Naturality) => reports.push(naturality_suite(p, bound)),
        (Ok(p), Suite::Classifier) => reports.push(classifier_suite(p, bound)),
        _ => {}
    }
    if suite == Suite::Colax {
        let pf = PerfectFunctor::new(functor_for(functor, &c)?)?;
        reports.push(colax_law_suite(&pf, bound));
    }
    emit_reports(common, &reports)
}

fn sampled_associativity(l: &Leinster, bound: usize, seed: u64, samples: usize) -> LawReport {
    let objects = l.category().objects(bound);
    let mut report = LawReport::new(format!("sampled associativity (seed {seed})"), l.category(), bound);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut homs: HashMap<(usize, usize), Vec<KleisliMor>> = HashMap::new();
    let mut hom = |a: usize, b: usize| homs.entry((a, b)).or_insert_with(|| l.khom(&objects[a], &objects[b])).clone();
    for _ in 0..samples {
        let ix: Vec<usize> = (0..4).map(|_| rng.gen_range(0..objects.len())).collect();
        let (fs, gs, hs) = (hom(ix[0], ix[1]), hom(ix[1], ix[2]), hom(ix[2], ix[3]));
        if fs.is_empty() || gs.is_empty() || hs.is_empty() {
            continue;
        }
        let f = &fs[rng.gen_range(0..fs.len())];
        let g = &gs[rng.gen_range(0..gs.len())];
        let h = &hs[rng.gen_range(0..hs.len())];
        let lhs = l.kcompose(h, g).and_then(|hg| l.kcompose(&hg, f));
        let rhs = l.kcompose(g, f).and_then(|gf| l.kcompose(h, &gf));
        let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
        report.check("associativity", &objects[ix[0]], ok, || json!({ "h": h.to_string(), "g": g.to_string(), "f": f.to_string() }));
    }
    report
}

fn cmd_leinster(common: &Common, samples: usize) -> Outcome {
    let c = category(common, "O")?;
    let bound = common.bound as usize;
    let l = Leinster::new(c.clone())?;
    let small = bound.min(3);
    let reports = vec![
        leinster_law_suite(&l, small),
        factorization_suite(&l, &c.objects(small), small),
        sampled_associativity(&l, bound, common.seed, samples),
    ];
    emit_reports(common, &reports)
}

fn table_objects(c: &Category, n: usize) -> Result<ObjCode, Failure> {
    match c {
        Category::Ord => Ok(ObjCode::Ord(n)),
        Category::Fin => Ok(ObjCode::Fin(n)),
        _ => Err(Failure::Usage(format!("objects by size need --cat O or F, got {c}"))),
    }
}

fn parse_table(s: &str) -> Result<Vec<usize>, Failure> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad table entry {t:?}"))))
        .collect()
}

fn cmd_factor(common: &Common, src: usize, tgt: usize, map: &str) -> Outcome {
    let c = category(common, "F")?;
    let l = Leinster::new(c.clone())?;
    let (j, i) = (table_objects(&c, src)?, table_objects(&c, tgt)?);
    let carrier = MorCode {
        src: j.clone(),
        tgt: l.perfect().apply_t(&i),
        data: MorData::Table(parse_table(map)?),
    };
    c.check_morphism(&carrier)?;
    let phi = l.wrap(&i, carrier)?;
    let middles = c.objects(src.max(tgt));
    let (fact, report) = check_factorization(&l, &phi, &middles)?;
    if !report.passed() {
        let dump = export::to_pretty(&serde_json::to_value(&report).expect("reports serialize"));
        eprint!("{dump}");
        return Err(Failure::Internal(format!("factorization of {phi} is not unique up to unique isomorphism")));
    }
    let text = match common.format.unwrap_or(Format::Text) {
        Format::Json => export::to_pretty(&json!({
            "schema": export::SCHEMA,
            "kind": "factorization",
            "morphism": phi,
            "factorization": fact,
            "middle_points": c.point_count(&fact.middle),
            "alternatives_checked": report.count("unique"),
        })),
        Format::Text => format!(
            "morphism    {phi}\nK           {} ({} points)\ninert       {}\nactive      {}\ncomparison  {}\nunique      {} factorizations through objects with at most {} points, each linked by one isomorphism\n",
            fact.middle,
            c.point_count(&fact.middle),
            fact.inert,
            fact.active,
            fact.comparison.data,
            report.count("unique"),
            src.max(tgt),
        ),
        Format::Dot => return Err(Failure::Usage("factor prints text or json".into())),
    };
    emit(common, &text)
}

fn cmd_compare(common: &Common, target: Target) -> Outcome {
    let bound = common.bound as usize;
    let report = match target {
        Target::Gamma => gamma_compare(bound)?,
        Target::Delta => delta_compare(bound)?,
        Target::HomCounts => hom_count_suite(bound)?,
        Target::ThetaFibration => match category(common, "wreath:O:O")? {
            Category::Wreath { inner, outer } => fibration_check(&inner, &outer, bound)?,
            other => return Err(Failure::Usage(format!("theta-fibration needs a wreath selector, got {other}"))),
        },
    };
    emit_reports(common, &[report])
}

fn cmd_sequences(common: &Common, len: usize, objects: Option<&str>, maps: Option<&str>) -> Outcome {
    let c = category(common, "F")?;
    let bound = common.bound as usize;
    let seqs: Vec<PhiSeq> = match (objects, maps) {
        (Some(objs), Some(maps)) => {
            let sizes = parse_table(objs)?;
            let objs: Vec<ObjCode> = sizes.iter().map(|&n| table_objects(&c, n)).collect::<Result<_, _>>()?;
            let tables: Vec<&str> = if maps.trim().is_empty() { vec![] } else { maps.split(';').collect() };
            if tables.len() + 1 != objs.len() {
                return Err(Failure::Usage(format!("{} objects need {} tables", objs.len(), objs.len().saturating_sub(1))));
            }
            let arrows = tables
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    Ok(MorCode {
                        src: objs[k].clone(),
                        tgt: objs[k + 1].clone(),
                        data: MorData::Table(parse_table(t)?),
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            vec![make_seq(&c, objs, arrows)?]
        }
        _ => all_sequences(&c, &c.objects(bound), len),
    };
    let m = seqs.first().map_or(len, |s| s.len());
    let leinster = Leinster::new(c.clone()).ok();
    let mut entries = Vec::new();
    for s in &seqs {
        let a = match &leinster {
            Some(l) => Some(a_poset(l, s)?),
            None => None,
        };
        entries.push((s, a));
    }
    let twisted = twisted_arrows(m);
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let seq_values: Vec<serde_json::Value> = entries
                .iter()
                .map(|(s, a)| {
                    let mut v = json!({ "sequence": export::seq_json(s) });
                    if let Some(a) = a {
                        v["a_poset"] = export::poset_json(&a.poset, Some(a));
                    }
                    v
                })
                .collect();
            export::to_pretty(&json!({
                "schema": export::SCHEMA,
                "kind": "sequences",
                "category": c.to_string(),
                "bound": bound,
                "length": m,
                "twisted_arrows": export::poset_json(&twisted, None),
                "sequences": seq_values,
            }))
        }
        Format::Dot => {
            let mut out = export::poset_dot(&format!("twisted({m})"), &twisted, None);
            for (k, (_, a)) in entries.iter().enumerate() {
                if let Some(a) = a {
                    out.push_str(&export::poset_dot(&format!("A{k}"), &a.poset, Some(a)));
                }
            }
            out
        }
        Format::Text => {
            let mut out = format!("{} sequences of length {m} in {c}; twisted arrow poset has {} elements\n", seqs.len(), twisted.elements.len());
            for (s, a) in &entries {
                let arrows: Vec<String> = s.arrows.iter().map(|a| a.data.to_string()).collect();
                let objs: Vec<String> = s.objects.iter().map(|o| o.to_string()).collect();
                out.push_str(&format!("[{}] {}", objs.join(" -> "), arrows.join(" ; ")));
                if let Some(a) = a {
                    out.push_str(&format!("  A: {} elements, {} marked", a.poset.elements.len(), a.poset.marked.len()));
                }
                out.push('\n');
            }
            out
        }
    };
    emit(common, &text)
}

fn cmd_export(common: &Common, leinster: bool) -> Outcome {
    let c = category(common, "O")?;
    let bound = common.bound as usize;
    let format = common.format.unwrap_or(Format::Json);
    let text = if leinster {
        let l = Leinster::new(c)?;
        match format {
            Format::Json => export::to_pretty(&export::leinster_json(&l, bound)?),
            Format::Dot => export::leinster_dot(&l, bound)?,
            Format::Text => return Err(Failure::Usage("export writes json or dot".into())),
        }
    } else {
        match format {
            Format::Json => export::to_pretty(&export::category_json(&c, bound)?),
            Format::Dot => export::category_dot(&c, bound)?,
            Format::Text => return Err(Failure::Usage("export writes json or dot".into())),
        }
    };
    emit(common, &text)
}
