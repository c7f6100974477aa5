use proptest::prelude::*;
use tmkit::behavior::{build_behavior, BehaviorSpec, Verdict};
use tmkit::bundled;
use tmkit::event::{Event, EventCatalog};
use tmkit::model::{whole_model, Model, StageKind};

#[derive(Debug, Clone)]
enum Sp {
    Leaf,
    Seq(Vec<Sp>),
    Par(Vec<Sp>),
}

fn arb_sp() -> impl Strategy<Value = Sp> {
    Just(Sp::Leaf).prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Sp::Seq),
            prop::collection::vec(inner, 2..4).prop_map(Sp::Par),
        ]
    })
}

/// Runs of a series-parallel chronology: sequences multiply, exclusive
/// alternatives add.
fn oracle_count(sp: &Sp) -> usize {
    match sp {
        Sp::Leaf => 1,
        Sp::Seq(parts) => parts.iter().map(oracle_count).product(),
        Sp::Par(arms) => arms.iter().map(oracle_count).sum(),
    }
}

struct Builder {
    next: usize,
    spec: BehaviorSpec,
}

impl Builder {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("E{}", self.next)
    }

    /// Returns (entry, exit) events of the fragment.
    fn add(&mut self, sp: &Sp) -> (String, String) {
        match sp {
            Sp::Leaf => {
                let e = self.fresh();
                (e.clone(), e)
            }
            Sp::Seq(parts) => {
                let ends: Vec<_> = parts.iter().map(|p| self.add(p)).collect();
                for w in ends.windows(2) {
                    self.spec.successions.push((w[0].1.clone(), w[1].0.clone()));
                }
                (ends[0].0.clone(), ends.last().unwrap().1.clone())
            }
            Sp::Par(arms) => {
                let split = self.fresh();
                let ends: Vec<_> = arms.iter().map(|a| self.add(a)).collect();
                let join = self.fresh();
                for (entry, exit) in &ends {
                    self.spec.successions.push((split.clone(), entry.clone()));
                    self.spec.successions.push((exit.clone(), join.clone()));
                }
                self.spec
                    .exclusive_groups
                    .push(ends.iter().map(|(entry, _)| vec![entry.clone()]).collect());
                (split, join)
            }
        }
    }
}

fn catalog(n: usize) -> EventCatalog {
    let mut m = Model::new("m");
    let t = m.add_thimac("T", None);
    m.add_stage(t, StageKind::Create).unwrap();
    let region = whole_model(&m);
    let mut c = EventCatalog::new();
    for i in 1..=n {
        c.push(Event {
            id: format!("E{i}"),
            description: String::new(),
            region: region.clone(),
            data_emitting: false,
        })
        .unwrap();
    }
    c
}

proptest! {
    #[test]
    fn run_count_matches_series_parallel_oracle(sp in arb_sp()) {
        let mut b = Builder { next: 0, spec: BehaviorSpec::default() };
        b.add(&sp);
        let cat = catalog(b.next);
        let g = build_behavior(&cat, &b.spec).unwrap();
        let runs = g.enumerate_runs(0).unwrap();
        prop_assert_eq!(runs.len(), oracle_count(&sp));
        for run in &runs {
            prop_assert!(g.conforms(run).unwrap().is_conformant());
            for k in 0..run.len() {
                prop_assert!(g.conforms(&run[..k]).unwrap().is_conformant());
            }
            // Repeating the final event is never a run.
            let mut bad = run.clone();
            bad.push(run.last().unwrap().clone());
            let is_violation = matches!(g.conforms(&bad).unwrap(), Verdict::Violation { index, .. } if index == run.len());
            prop_assert!(is_violation);
        }
    }

    #[test]
    fn containment_does_not_change_runs(sp in arb_sp(), mask in any::<u64>()) {
        let mut b = Builder { next: 0, spec: BehaviorSpec::default() };
        b.add(&sp);
        let n = b.next;
        let before = build_behavior(&catalog(n), &b.spec).unwrap().enumerate_runs(0).unwrap();
        let inner: Vec<String> = (1..=n).filter(|i| mask >> (i % 64) & 1 == 1).map(|i| format!("E{i}")).collect();
        b.spec.containments.push((format!("E{}", n + 1), inner));
        let after = build_behavior(&catalog(n + 1), &b.spec).unwrap().enumerate_runs(0).unwrap();
        prop_assert_eq!(before, after);
    }
}

fn loaded(name: &str) -> bundled::Loaded {
    bundled::load(name).unwrap().unwrap()
}

#[test]
fn tile_has_two_outcomes() {
    let l = loaded("tile");
    let runs = l.graph.unwrap().enumerate_runs(0).unwrap();
    assert_eq!(runs.len(), 2);
    let last: Vec<&str> = runs.iter().map(|r| r.last().unwrap().as_str()).collect();
    assert_eq!(last, vec!["E9", "E10"]);
    for r in &runs {
        assert!(!(r.contains(&"E9".to_string()) && r.contains(&"E10".to_string())));
    }
}

#[test]
fn tile_rejects_both_outcomes() {
    let g = loaded("tile").graph.unwrap();
    let seq = ["E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E10"];
    match g.conforms(&seq).unwrap() {
        Verdict::Violation { index, event, .. } => {
            assert_eq!(index, 9);
            assert_eq!(event, "E10");
        }
        v => panic!("{v}"),
    }
}

#[test]
fn coin_has_two_runs_one_per_face() {
    let g = loaded("coin").graph.unwrap();
    let runs = g.enumerate_runs(0).unwrap();
    assert_eq!(runs.len(), 2);
    for r in &runs {
        let heads = r.contains(&"E3".to_string());
        let tails = r.contains(&"E4".to_string());
        assert!(heads ^ tails);
        assert_eq!(r.contains(&"E7".to_string()), heads);
        assert_eq!(r.contains(&"E9".to_string()), tails);
    }
    let mixed = ["E1", "E2", "E3", "E5", "E6", "E9"];
    assert!(!g.conforms(&mixed).unwrap().is_conformant());
}

#[test]
fn predator_prey_recurrence() {
    let l = loaded("predator_prey");
    let g = l.graph.as_ref().unwrap();
    let runs = g.enumerate_runs(3).unwrap();
    assert_eq!(runs.len(), 4);
    let pass = ["E1", "E2", "E3", "E4"];
    for (k, r) in runs.iter().enumerate() {
        assert_eq!(r.len(), 4 * (k + 1));
        assert!(r.chunks(4).all(|c| c == pass));
        assert!(g.conforms(r).unwrap().is_conformant());
    }
    // Recurring the container is the same as recurring its first event.
    let mut spec = l.document.behavior.clone().unwrap();
    spec.recurrences = vec!["E1".into()];
    let direct = build_behavior(&l.catalog, &spec).unwrap();
    assert_eq!(direct.enumerate_runs(3).unwrap(), runs);
    let long: Vec<&str> = pass.repeat(1000);
    assert!(g.conforms(&long).unwrap().is_conformant());
}
