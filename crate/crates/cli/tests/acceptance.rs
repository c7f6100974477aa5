//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! when any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use graphviz_rust::dot_structures::{Attribute, EdgeTy, Graph, Id, Stmt, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmkit::bundled::{self, Loaded, BUNDLED};
use tmkit::engine::{run, EngineConfig};
use tmkit::event::coverage_check;
use tmkit::expr::{Assignment, Expr, Rule};
use tmkit::info::{empirical_info, entropy, self_information, Distribution};
use tmkit::model::{
    element_census, whole_model, Model, Stage, StageId, StageKind, SwcmRole, VarRole,
};
use tmkit::render::{render, RenderOptions, Target};
use tmkit::validate::Subject;
use tmkit::{parse, serialize, validate_static, RuleId};

/// Time budget of the criteria that carry one.
const FAST: Duration = Duration::from_secs(1);
/// Tolerance of the information identities.
const INFO_TOL: f64 = 1e-12;
/// Random models checked by criterion 2.
const RANDOM_MODELS: usize = 1000;
/// Seed of the random model generator.
const GENERATOR_SEED: u64 = 0x7A11_5EED;
/// Seeded coin runs checked by criterion 6; each run is one toss.
const COIN_RUNS: u64 = 10_000;
const CONFORMANCE_RUNS: u64 = 1_000;
const E3_FREQUENCY: (f64, f64) = (0.48, 0.52);
const COIN_ENTROPY: (f64, f64) = (0.99, 1.0);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn loaded(name: &str) -> Loaded {
    bundled::load(name)
        .unwrap_or_else(|| panic!("no bundled model {name}"))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn timed(f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure!(
        took < FAST,
        "took {:.3} s, budget {:.3} s",
        took.as_secs_f64(),
        FAST.as_secs_f64()
    );
    Ok(format!("{detail}; {:.3} s", took.as_secs_f64()))
}

fn structural_validity() -> Outcome {
    timed(|| {
        for b in BUNDLED {
            let doc = b.document().map_err(|d| format!("{}: {d:?}", b.name))?;
            let report = validate_static(&doc.model);
            ensure!(report.is_empty(), "{}: {report}", b.name);
            let again = parse(&tmkit::dsl::SourceText::inline(serialize(&doc)))
                .map_err(|d| format!("{} reparse: {d:?}", b.name))?;
            ensure!(doc.structurally_eq(&again), "{} round trip differs", b.name);
        }
        Ok(format!("{} models", BUNDLED.len()))
    })
}

const KINDS: [StageKind; 5] = [
    StageKind::Create,
    StageKind::Process,
    StageKind::Receive,
    StageKind::Release,
    StageKind::Transfer,
];

/// Intra-machine flows allowed by the five-action closure.
fn intra_ok(from: StageKind, to: StageKind) -> bool {
    use StageKind::*;
    matches!(
        (from, to),
        (Create, Release)
            | (Create, Process)
            | (Process, Release)
            | (Receive, Process)
            | (Receive, Release)
            | (Release, Transfer)
            | (Transfer, Receive)
    )
}

fn flow_ok(m: &Model, from: StageId, to: StageId) -> bool {
    let (a, b) = (m.stage(from).unwrap(), m.stage(to).unwrap());
    if a.owner == b.owner {
        intra_ok(a.kind, b.kind)
    } else {
        a.kind == StageKind::Transfer && b.kind == StageKind::Transfer
    }
}

/// A random model. With `legal` every arc passes the oracle; otherwise arcs
/// are drawn freely and the validator has to sort them out.
fn random_model(rng: &mut ChaCha8Rng, legal: bool) -> Model {
    let mut m = Model::new("random");
    let thimacs = rng.gen_range(1..7);
    for i in 0..thimacs {
        let parent = (i > 0 && rng.gen_bool(0.3)).then(|| m.thimacs[rng.gen_range(0..i)].id);
        let t = m.add_thimac(format!("T{i}"), parent);
        for kind in KINDS {
            if rng.gen_bool(0.6) {
                m.add_stage(t, kind).unwrap();
            }
        }
    }
    m.add_variable("v0", VarRole::State, 1.0);
    let stages: Vec<StageId> = m.stages.iter().map(|s| s.id).collect();
    if stages.is_empty() {
        return m;
    }
    let mut seen = BTreeSet::new();
    for _ in 0..rng.gen_range(0..24) {
        let from = stages[rng.gen_range(0..stages.len())];
        let to = stages[rng.gen_range(0..stages.len())];
        if rng.gen_bool(0.75) {
            if legal && (!flow_ok(&m, from, to) || !seen.insert((from, to))) {
                continue;
            }
            m.add_flow(from, to);
        } else {
            if legal && (m.stage(to).unwrap().kind != StageKind::Create || !seen.insert((from, to)))
            {
                continue;
            }
            m.add_trigger(from, to);
        }
    }
    m
}

fn flagged(m: &Model, rule: RuleId, subject: &Subject) -> bool {
    validate_static(m)
        .violations
        .iter()
        .any(|v| v.rule == rule && &v.subject == subject)
}

fn mutations(base: &Model, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let stages: Vec<StageId> = base.stages.iter().map(|s| s.id).collect();
    if stages.is_empty() {
        return Ok(0);
    }
    let pick = |rng: &mut ChaCha8Rng| stages[rng.gen_range(0..stages.len())];
    let mut checked = 0;

    for a in &stages {
        for b in &stages {
            if flow_ok(base, *a, *b) || base.flow_between(*a, *b).is_some() {
                continue;
            }
            let mut m = base.clone();
            let f = m.add_flow(*a, *b);
            let cross = m.stage(*a).unwrap().owner != m.stage(*b).unwrap().owner;
            let rule = if cross {
                RuleId::CrossMachineFlow
            } else {
                RuleId::IntraMachineFlow
            };
            ensure!(
                flagged(&m, rule, &Subject::Flow(f)),
                "{} not reported for {a} -> {b}",
                rule.code()
            );
            checked += 1;
        }
    }
    if let Some(to) = base.stages.iter().find(|s| s.kind != StageKind::Create) {
        let mut m = base.clone();
        let t = m.add_trigger(pick(rng), to.id);
        ensure!(
            flagged(&m, RuleId::TriggerTarget, &Subject::Trigger(t)),
            "trigger target not reported"
        );
        checked += 1;
    }
    {
        let mut m = base.clone();
        let original = m.stage(pick(rng)).unwrap().clone();
        let id = StageId(m.stages.len() as u32);
        m.stages.push(Stage {
            id,
            ..original.clone()
        });
        m.thimac_mut(original.owner).unwrap().stages.push(id);
        ensure!(
            flagged(&m, RuleId::DuplicateStageKind, &Subject::Stage(id)),
            "duplicate stage not reported"
        );
        checked += 1;
    }
    {
        let mut m = base.clone();
        let f = m.add_flow(pick(rng), StageId(u32::MAX));
        ensure!(
            flagged(&m, RuleId::DanglingReference, &Subject::Flow(f)),
            "dangling flow not reported"
        );
        checked += 1;
    }
    if let Some(existing) = base.flows.first().cloned() {
        let mut m = base.clone();
        let f = m.add_flow(existing.from, existing.to);
        ensure!(
            flagged(&m, RuleId::DuplicateArc, &Subject::Flow(f)),
            "repeated flow not reported"
        );
        checked += 1;
    }
    if let Some(host) = base
        .stages
        .iter()
        .find(|s| !matches!(s.kind, StageKind::Create | StageKind::Process))
    {
        let mut m = base.clone();
        m.stage_mut(host.id).unwrap().rule = Some(Rule::Update(vec![Assignment {
            target: "v0".into(),
            value: Expr::Num(1.0),
        }]));
        ensure!(
            flagged(&m, RuleId::RuleOnIllegalStage, &Subject::Stage(host.id)),
            "rule on {:?} not reported",
            host.kind
        );
        checked += 1;
    }
    if base.thimacs.len() >= 2 {
        let mut m = base.clone();
        let ids: Vec<_> = m.thimacs.iter().map(|t| t.id).take(2).collect();
        for id in &ids {
            m.thimac_mut(*id).unwrap().swcm_role = Some(SwcmRole::Receiver);
        }
        ensure!(
            flagged(&m, RuleId::DuplicateSwcmRole, &Subject::Thimac(ids[1])),
            "shared role not reported"
        );
        checked += 1;
    }
    Ok(checked)
}

fn closure_and_flow_legality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(GENERATOR_SEED);
    let (mut accepted, mut rejected, mut mutants) = (0, 0, 0);
    for i in 0..RANDOM_MODELS {
        let m = random_model(&mut rng, false);
        let report = validate_static(&m);
        for f in &m.flows {
            let cross = m.stage(f.from).unwrap().owner != m.stage(f.to).unwrap().owner;
            let rule = if cross {
                RuleId::CrossMachineFlow
            } else {
                RuleId::IntraMachineFlow
            };
            let reported = report
                .violations
                .iter()
                .any(|v| v.rule == rule && v.subject == Subject::Flow(f.id));
            ensure!(
                reported != flow_ok(&m, f.from, f.to),
                "model {i}: verdict on {} disagrees with the oracle",
                m.element_name(tmkit::model::ElementId::Flow(f.id))
            );
        }
        if report.is_empty() {
            accepted += 1;
            for f in &m.flows {
                ensure!(
                    flow_ok(&m, f.from, f.to),
                    "model {i}: accepted with an illegal flow"
                );
            }
        } else {
            rejected += 1;
        }

        let legal = random_model(&mut rng, true);
        let report = validate_static(&legal);
        ensure!(report.is_empty(), "legal model {i} rejected: {report}");
        accepted += 1;
        mutants += mutations(&legal, &mut rng).map_err(|e| format!("model {i}: {e}"))?;
    }
    ensure!(
        accepted > 0 && rejected > 0,
        "generator covered only one side"
    );
    Ok(format!(
        "{} models ({accepted} accepted, {rejected} rejected), {mutants} mutants rejected with the matching rule",
        2 * RANDOM_MODELS
    ))
}

fn event_decomposition() -> Outcome {
    for (name, n) in [("tile", 10), ("coin", 14)] {
        let l = loaded(name);
        let ids: Vec<&str> = l.catalog.iter().map(|e| e.id.as_str()).collect();
        let want: Vec<String> = (1..=n).map(|i| format!("E{i}")).collect();
        ensure!(ids == want, "{name} catalog is {ids:?}");
        for e in l.catalog.iter() {
            ensure!(!e.description.is_empty(), "{name} {} has no label", e.id);
        }
        let coverage = coverage_check(&l.catalog, &l.document.model);
        ensure!(
            coverage.uncovered.is_empty(),
            "{name} leaves {} elements uncovered",
            coverage.uncovered.len()
        );
        let whole = whole_model(&l.document.model);
        for e in l.catalog.iter() {
            ensure!(
                e.region.is_subset(&whole),
                "{name} {} reaches outside the model",
                e.id
            );
            ensure!(!e.region.is_empty(), "{name} {} is empty", e.id);
        }
    }
    Ok("tile E1-E10, coin E1-E14, full coverage".into())
}

fn behavioral_enumeration() -> Outcome {
    let tile = loaded("tile");
    let g = tile.graph.as_ref().unwrap();
    let runs = g.enumerate_runs(0).map_err(|e| e.to_string())?;
    let ends: BTreeSet<&str> = runs
        .iter()
        .filter_map(|r| r.last())
        .map(String::as_str)
        .collect();
    ensure!(runs.len() == 2, "tile: {} runs", runs.len());
    ensure!(
        ends == BTreeSet::from(["E9", "E10"]),
        "tile runs end in {ends:?}"
    );

    let coin = loaded("coin");
    let runs = coin
        .graph
        .as_ref()
        .unwrap()
        .enumerate_runs(0)
        .map_err(|e| e.to_string())?;
    ensure!(runs.len() == 2, "coin: {} runs", runs.len());

    let pp = loaded("predator_prey");
    let g = pp.graph.as_ref().unwrap();
    let runs = g.enumerate_runs(3).map_err(|e| e.to_string())?;
    let mut deepest = 0;
    for r in &runs {
        let passes = r.iter().filter(|e| *e == "E1").count();
        ensure!(
            passes >= 1 && passes - 1 <= 3,
            "run {r:?} repeats the cycle {} times",
            passes.saturating_sub(1)
        );
        deepest = deepest.max(passes - 1);
        let verdict = g.conforms(r).map_err(|e| e.to_string())?;
        ensure!(verdict.is_conformant(), "run {r:?}: {verdict}");
    }
    ensure!(deepest == 3, "no run reaches 3 repeats");
    Ok(format!("tile 2, coin 2, predator-prey {} runs", runs.len()))
}

/// Direct iteration of the recurrences, right-hand sides left to right.
fn recurrences(mut h: f64, mut l: f64, [br, a, c, df]: [f64; 4], steps: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = (h + br * h - a * l * h, l + c * l * h - df * l);
        (h, l) = next;
        out.push(next);
    }
    out
}

fn engine_trajectory(l: &Loaded, steps: usize) -> Result<Vec<(f64, f64)>, String> {
    let stage = l.document.model.stage_by_name("Hares.process").unwrap().id;
    let config = EngineConfig {
        max_ticks: 6 * steps as u64 + 1,
        ..Default::default()
    };
    let trace = run(
        &l.document.model,
        &l.catalog,
        l.graph.as_ref().unwrap(),
        config,
    )
    .map_err(|e| e.to_string())?;
    Ok(trace
        .snapshots_at(stage)
        .into_iter()
        .map(|vars| {
            let get = |n: &str| vars.iter().find(|(k, _)| k == n).unwrap().1;
            (get("H"), get("L"))
        })
        .collect())
}

fn engine_oracle_equivalence() -> Outcome {
    const STEPS: usize = 100;
    let params: [(f64, f64, [f64; 4]); 10] = [
        (20.0, 10.0, [0.6, 0.014, 0.006, 0.7]),
        (20.0, 10.0, [0.1, 0.01, 0.002, 0.1]),
        (40.0, 5.0, [0.5, 0.01, 0.004, 0.6]),
        (30.0, 9.0, [0.05, 0.002, 0.001, 0.08]),
        (10.0, 2.0, [0.3, 0.02, 0.01, 0.4]),
        (100.0, 50.0, [0.1, 0.001, 0.0005, 0.05]),
        (5.0, 1.0, [0.9, 0.05, 0.02, 0.9]),
        (60.0, 20.0, [0.25, 0.005, 0.003, 0.2]),
        (80.0, 12.5, [0.45, 0.0125, 0.0075, 0.55]),
        (33.3, 7.7, [0.2, 0.003, 0.002, 0.15]),
    ];
    let base = loaded("predator_prey");
    timed(|| {
        for (i, (h, lx, p)) in params.iter().enumerate() {
            let mut l = base.clone();
            for (name, v) in [
                ("H", *h),
                ("L", *lx),
                ("br", p[0]),
                ("a", p[1]),
                ("c", p[2]),
                ("df", p[3]),
            ] {
                l.document
                    .model
                    .variables
                    .iter_mut()
                    .find(|x| x.name == name)
                    .unwrap()
                    .value = v;
            }
            let got = engine_trajectory(&l, STEPS)?;
            let want = recurrences(*h, *lx, *p, STEPS);
            ensure!(got.len() == STEPS, "set {i}: {} steps", got.len());
            for (k, (g, w)) in got.iter().zip(&want).enumerate() {
                ensure!(
                    g.0.to_bits() == w.0.to_bits() && g.1.to_bits() == w.1.to_bits(),
                    "set {i} step {}: engine {g:?}, oracle {w:?}",
                    k + 1
                );
            }
        }
        let mut l = base.clone();
        for name in ["H", "L"] {
            l.document
                .model
                .variables
                .iter_mut()
                .find(|x| x.name == name)
                .unwrap()
                .value = 0.0;
        }
        for (k, s) in engine_trajectory(&l, STEPS)?.into_iter().enumerate() {
            ensure!(s == (0.0, 0.0), "extinction left at step {}: {s:?}", k + 1);
        }
        Ok(format!(
            "{} parameter sets x {STEPS} steps bit-exact, extinction fixed",
            params.len()
        ))
    })
}

fn stochastic_conformance() -> Outcome {
    let l = loaded("coin");
    let g = l.graph.as_ref().unwrap();
    let mut all = Vec::new();
    for seed in 0..COIN_RUNS {
        let config = EngineConfig {
            seed,
            ..Default::default()
        };
        let trace = run(&l.document.model, &l.catalog, g, config)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let events = trace.events();
        let tosses = events.iter().filter(|e| *e == "E3" || *e == "E4").count();
        ensure!(tosses == 1, "seed {seed}: {tosses} outcomes in {events:?}");
        if seed < CONFORMANCE_RUNS {
            let verdict = g.conforms(&events).map_err(|e| e.to_string())?;
            ensure!(verdict.is_conformant(), "seed {seed}: {verdict}");
        }
        all.extend(events);
    }
    let report = empirical_info(&all, &["E3", "E4"]).map_err(|e| e.to_string())?;
    let freq = report.outcomes[0].probability;
    let h = report.empirical_entropy.unwrap();
    ensure!(
        (E3_FREQUENCY.0..=E3_FREQUENCY.1).contains(&freq),
        "E3 frequency {freq} outside {E3_FREQUENCY:?}"
    );
    ensure!(
        (COIN_ENTROPY.0..=COIN_ENTROPY.1).contains(&h),
        "entropy {h} outside {COIN_ENTROPY:?}"
    );
    Ok(format!(
        "{CONFORMANCE_RUNS} runs conformant, {COIN_RUNS} tosses: E3 {freq:.4}, H {h:.6} bits"
    ))
}

fn information_identities() -> Outcome {
    ensure!(
        self_information(0.5) == Ok(1.0),
        "I(0.5) = {:?}",
        self_information(0.5)
    );
    let fair = Distribution::new([("heads", 0.5), ("tails", 0.5)]).map_err(|e| e.to_string())?;
    ensure!(entropy(&fair) == 1.0, "H(fair) = {}", entropy(&fair));
    let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
    let info = |p: f64| self_information(p).unwrap();
    for &p in &grid {
        for &q in &grid {
            let joint = info(p * q);
            ensure!(
                (joint - info(p) - info(q)).abs() <= INFO_TOL,
                "additivity fails at {p}, {q}"
            );
            if p < q {
                ensure!(info(p) > info(q), "monotonicity fails at {p} < {q}");
            }
            if p < 1.0 && q < 1.0 {
                let a = Distribution::new([("a", p), ("b", 1.0 - p)]).unwrap();
                let b = Distribution::new([("c", q), ("d", 1.0 - q)]).unwrap();
                let ab = Distribution::new([
                    ("ac", p * q),
                    ("ad", p * (1.0 - q)),
                    ("bc", (1.0 - p) * q),
                    ("bd", (1.0 - p) * (1.0 - q)),
                ])
                .unwrap();
                let gap = entropy(&ab) - entropy(&a) - entropy(&b);
                ensure!(
                    gap.abs() <= INFO_TOL,
                    "joint entropy off by {gap} at {p}, {q}"
                );
            }
        }
    }
    Ok(format!(
        "{} grid pairs within {INFO_TOL:e}",
        grid.len() * grid.len()
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for b in BUNDLED {
        let manifest = dir.path().join(format!("{}.toml", b.name));
        let body = |out: &str| {
            format!("model = \"bundled:{}\"\noutput = \"{out}\"\n\n[config]\nseed = 7\nmax_ticks = 300\n", b.name)
        };
        let mut outputs = Vec::new();
        for tag in ["a", "b"] {
            fs::write(&manifest, body(&format!("{}-{tag}", b.name))).map_err(|e| e.to_string())?;
            let o = Command::new(env!("CARGO_BIN_EXE_tmkit"))
                .args(["simulate", "--manifest", manifest.to_str().unwrap()])
                .env_remove("TMKIT_SEED")
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(
                o.status.code() == Some(0),
                "{}: exit {:?}: {}",
                b.name,
                o.status.code(),
                String::from_utf8_lossy(&o.stderr)
            );
            outputs.push(dir.path().join(format!("{}-{tag}", b.name)));
        }
        for file in [
            "trace.tsv",
            "trace.jsonl",
            "events.txt",
            "verdict.txt",
            "info.json",
        ] {
            let read = |d: &std::path::Path| {
                fs::read(d.join(file)).map_err(|e| format!("{}/{file}: {e}", b.name))
            };
            let (x, y) = (read(&outputs[0])?, read(&outputs[1])?);
            ensure!(!x.is_empty(), "{}/{file} is empty", b.name);
            ensure!(x == y, "{}/{file} differs between invocations", b.name);
            files += 1;
        }
    }
    Ok(format!("{files} file pairs identical"))
}

#[derive(Default)]
struct DotStats {
    nodes: BTreeSet<String>,
    dashed: usize,
}

fn dot_id(i: &Id) -> String {
    match i {
        Id::Html(s) | Id::Escaped(s) | Id::Plain(s) | Id::Anonymous(s) => {
            s.trim_matches('"').to_string()
        }
    }
}

fn walk(stmts: &[Stmt], s: &mut DotStats) {
    for stmt in stmts {
        match stmt {
            Stmt::Node(n) => {
                s.nodes.insert(dot_id(&n.id.0));
            }
            Stmt::Subgraph(g) => walk(&g.stmts, s),
            Stmt::Edge(e) => {
                let ends = match &e.ty {
                    EdgeTy::Pair(a, b) => vec![a, b],
                    EdgeTy::Chain(v) => v.iter().collect(),
                };
                for v in ends {
                    if let Vertex::N(n) = v {
                        s.nodes.insert(dot_id(&n.0));
                    }
                }
                if e.attributes
                    .iter()
                    .any(|Attribute(k, v)| dot_id(k) == "style" && dot_id(v) == "dashed")
                {
                    s.dashed += 1;
                }
            }
            _ => {}
        }
    }
}

fn dot_stats(dot: &str) -> Result<DotStats, String> {
    let graph = graphviz_rust::parse(dot)?;
    let stmts = match &graph {
        Graph::Graph { stmts, .. } | Graph::DiGraph { stmts, .. } => stmts,
    };
    let mut s = DotStats::default();
    walk(stmts, &mut s);
    Ok(s)
}

fn rendering() -> Outcome {
    let mut diagrams = 0;
    for b in BUNDLED {
        let l = loaded(b.name);
        let census = element_census(&l.document.model);
        for target in [Target::Static, Target::Events, Target::Behavior] {
            let dot = render(
                &l.document.model,
                Some(&l.catalog),
                l.graph.as_ref(),
                &RenderOptions::new(target),
            )
            .map_err(|e| format!("{} {target:?}: {e}", b.name))?;
            let s = dot_stats(&dot).map_err(|e| format!("{} {target:?} malformed: {e}", b.name))?;
            let (nodes, dashed) = match target {
                Target::Behavior => (l.graph.as_ref().unwrap().node_ids().len(), 0),
                _ => (census.stages, census.triggers),
            };
            ensure!(
                s.nodes.len() == nodes,
                "{} {target:?}: {} nodes, want {nodes}",
                b.name,
                s.nodes.len()
            );
            ensure!(
                s.dashed == dashed,
                "{} {target:?}: {} dashed edges, want {dashed}",
                b.name,
                s.dashed
            );
            diagrams += 1;
        }
    }
    Ok(format!("{diagrams} diagrams parsed"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("structural validity", structural_validity),
        (
            "five-action closure and flow legality",
            closure_and_flow_legality,
        ),
        ("event decomposition", event_decomposition),
        ("behavioral enumeration", behavioral_enumeration),
        ("engine-oracle equivalence", engine_oracle_equivalence),
        ("stochastic conformance", stochastic_conformance),
        ("information identities", information_identities),
        ("determinism", determinism),
        ("rendering", rendering),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
