#![allow(dead_code)]

use proptest::prelude::*;
use tmkit::expr::{Assignment, BinOp, Expr, Rule};
use tmkit::model::{Model, StageId, StageKind, SwcmRole, VarRole};

pub const KINDS: [StageKind; 5] = [
    StageKind::Create,
    StageKind::Process,
    StageKind::Receive,
    StageKind::Release,
    StageKind::Transfer,
];

/// Intra-machine flows permitted by the five-action closure, written out
/// independently of the library's table.
pub fn oracle_intra_ok(from: StageKind, to: StageKind) -> bool {
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

/// Whether a flow between two stages is legal per the oracle.
pub fn oracle_flow_ok(m: &Model, from: StageId, to: StageId) -> bool {
    let (a, b) = (m.stage(from).unwrap(), m.stage(to).unwrap());
    if a.owner != b.owner {
        a.kind == StageKind::Transfer && b.kind == StageKind::Transfer
    } else {
        oracle_intra_ok(a.kind, b.kind)
    }
}

#[derive(Debug, Clone)]
pub struct Blueprint {
    pub thimacs: Vec<(u8, u8, u8)>,
    pub arcs: Vec<(u16, u16, bool)>,
    pub vars: u8,
    pub exprs: Vec<Expr>,
}

pub fn arb_expr(vars: usize) -> impl Strategy<Value = Expr> {
    let names: Vec<String> = (0..vars.max(1)).map(|i| format!("v{i}")).collect();
    let leaf = prop_oneof![
        (0u32..1000, 0u32..4).prop_map(|(n, d)| Expr::Num(n as f64 / 10f64.powi(d as i32))),
        proptest::sample::select(names).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner, 0u8..4).prop_map(|(l, r, op)| {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][op as usize];
                Expr::bin(op, l, r)
            }),
        ]
    })
}

pub fn arb_blueprint() -> impl Strategy<Value = Blueprint> {
    (
        prop::collection::vec((any::<u8>(), 1u8..32, any::<u8>()), 1..7),
        prop::collection::vec((any::<u16>(), any::<u16>(), any::<bool>()), 0..24),
        1u8..4,
    )
        .prop_flat_map(|(thimacs, arcs, vars)| {
            prop::collection::vec(arb_expr(vars as usize), 0..3).prop_map(move |exprs| Blueprint {
                thimacs: thimacs.clone(),
                arcs: arcs.clone(),
                vars,
                exprs,
            })
        })
}

/// Builds a model from a blueprint. With `legal` only arcs the oracle
/// accepts are kept, so the result should validate.
pub fn build(bp: &Blueprint, legal: bool) -> Model {
    let mut m = Model::new("generated");
    let roles = [
        SwcmRole::Source,
        SwcmRole::Transmitter,
        SwcmRole::Channel,
        SwcmRole::Receiver,
        SwcmRole::Destination,
    ];
    for (i, (parent, mask, role)) in bp.thimacs.iter().enumerate() {
        let parent = (i > 0 && parent % 3 == 0).then(|| m.thimacs[*parent as usize % i].id);
        let t = m.add_thimac(format!("T{i}"), parent);
        if role % 4 == 0 && i < roles.len() {
            m.thimac_mut(t).unwrap().swcm_role = Some(roles[i]);
        }
        for (k, kind) in KINDS.iter().enumerate() {
            if mask & (1 << k) != 0 {
                m.add_stage(t, *kind).unwrap();
            }
        }
    }
    for v in 0..bp.vars {
        m.add_variable(format!("v{v}"), VarRole::State, v as f64 + 0.5);
    }
    let stages: Vec<StageId> = m.stages.iter().map(|s| s.id).collect();
    if stages.is_empty() {
        return m;
    }
    let mut ends = std::collections::BTreeSet::new();
    for (a, b, is_flow) in &bp.arcs {
        let from = stages[*a as usize % stages.len()];
        let to = stages[*b as usize % stages.len()];
        if *is_flow {
            if legal && (!oracle_flow_ok(&m, from, to) || !ends.insert((from, to))) {
                continue;
            }
            m.add_flow(from, to);
        } else {
            let target_is_create = m.stage(to).unwrap().kind == StageKind::Create;
            if legal && (!target_is_create || !ends.insert((from, to))) {
                continue;
            }
            m.add_trigger(from, to);
        }
    }
    let hosts: Vec<StageId> = m
        .stages
        .iter()
        .filter(|s| matches!(s.kind, StageKind::Create | StageKind::Process))
        .map(|s| s.id)
        .collect();
    for (i, e) in bp.exprs.iter().enumerate() {
        if let Some(host) = hosts.get(i) {
            m.stage_mut(*host).unwrap().rule = Some(Rule::Update(vec![Assignment {
                target: "v0".into(),
                value: e.clone(),
            }]));
        }
    }
    m
}
