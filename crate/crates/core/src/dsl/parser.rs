use std::collections::BTreeMap;

use super::lexer::{lex, Tok};
use super::{Diagnostic, Document, Pos};
use crate::behavior::BehaviorSpec;
use crate::event::EventDecl;
use crate::expr::{Assignment, BinOp, Expr, Outcome, Rule};
use crate::model::{
    Aspect, ElementId, ElementRef, Model, StageId, StageKind, SwcmRole, ThimacId, VarRole, Variable,
};

#[derive(Debug, Clone)]
struct Name {
    text: String,
    pos: Pos,
}

#[derive(Debug, Clone)]
struct Path {
    thimac: Name,
    kind: StageKind,
}

struct RawThimac {
    name: Name,
    parent: Option<Name>,
    aspect: Aspect,
    role: Option<SwcmRole>,
}

struct RawStage {
    thimac: String,
    kind: StageKind,
    label: Option<String>,
    pos: Pos,
}

struct RawVar {
    name: Name,
    role: VarRole,
    value: f64,
    unit: Option<String>,
}

struct RawArc {
    from: Path,
    to: Path,
}

enum RawRuleBody {
    Update(Vec<Assignment>),
    Choose(Vec<(String, Expr, Path)>),
}

struct RawRule {
    target: Path,
    body: RawRuleBody,
}

enum RawElem {
    Thimac(Name),
    Stage(Path),
    Arc(Path, Path),
}

struct RawEvent {
    id: Name,
    description: String,
    emitting: bool,
    elements: Vec<RawElem>,
}

#[derive(Default)]
struct RawBehavior {
    successions: Vec<(Name, Name)>,
    groups: Vec<Vec<Vec<Name>>>,
    recurrences: Vec<Name>,
    containments: Vec<(Name, Vec<Name>)>,
}

#[derive(Default)]
struct RawDoc {
    name: String,
    thimacs: Vec<RawThimac>,
    stages: Vec<RawStage>,
    variables: Vec<RawVar>,
    flows: Vec<RawArc>,
    triggers: Vec<RawArc>,
    rules: Vec<RawRule>,
    events: Vec<RawEvent>,
    behavior: Option<(Pos, RawBehavior)>,
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(Diagnostic::error(
            self.pos(),
            format!(
                "syntax error: expected {wanted}, found {}",
                self.peek().describe()
            ),
        ))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.unexpected(wanted)
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Semi) {
            self.bump();
        }
    }

    fn end_statement(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline | Tok::Semi => {
                self.bump();
                Ok(())
            }
            Tok::RBrace | Tok::Eof => Ok(()),
            _ => self.unexpected("end of statement"),
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let pos = self.bump().1;
                Ok(Name { text, pos })
            }
            _ => self.unexpected(wanted),
        }
    }

    /// A name is an identifier or a quoted string.
    fn name(&mut self, wanted: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) | Tok::Str(text) => {
                let pos = self.bump().1;
                Ok(Name { text, pos })
            }
            _ => self.unexpected(wanted),
        }
    }

    fn string(&mut self, wanted: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn stage_kind(&mut self) -> PResult<StageKind> {
        let name = self.ident("stage kind")?;
        StageKind::from_keyword(&name.text).ok_or_else(|| {
            Diagnostic::error(
                name.pos,
                format!(
                    "unknown stage kind: `{}` (expected create, process, receive, release or transfer)",
                    name.text
                ),
            )
        })
    }

    fn path(&mut self) -> PResult<Path> {
        let thimac = self.name("thimac name")?;
        self.expect(Tok::Dot, "`.` followed by a stage kind")?;
        let kind = self.stage_kind()?;
        Ok(Path { thimac, kind })
    }

    fn number(&mut self) -> PResult<f64> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Num(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            _ => self.unexpected("number"),
        }
    }

    fn document(&mut self) -> PResult<RawDoc> {
        self.skip_separators();
        if !self.is_keyword("model") {
            return self.unexpected("`model`");
        }
        self.bump();
        let mut doc = RawDoc {
            name: self.name("model name")?.text,
            ..Default::default()
        };
        self.expect(Tok::LBrace, "`{`")?;
        loop {
            self.skip_separators();
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Ident(word) => match word.as_str() {
                    "var" | "const" | "input" => self.variable(&mut doc)?,
                    "thimac" => self.thimac(&mut doc, None)?,
                    "flow" | "trigger" => self.arc(&mut doc, word == "flow")?,
                    "rule" => self.rule(&mut doc)?,
                    "event" => self.event(&mut doc)?,
                    "behavior" => self.behavior(&mut doc)?,
                    _ => return self.unexpected("a declaration"),
                },
                _ => return self.unexpected("a declaration or `}`"),
            }
        }
        self.skip_separators();
        if *self.peek() != Tok::Eof {
            return self.unexpected("end of input");
        }
        Ok(doc)
    }

    fn variable(&mut self, doc: &mut RawDoc) -> PResult<()> {
        let role = match self.bump().0 {
            Tok::Ident(w) if w == "const" => VarRole::Constant,
            Tok::Ident(w) if w == "input" => VarRole::Input,
            _ => VarRole::State,
        };
        let name = self.ident("variable name")?;
        self.expect(Tok::Eq, "`=`")?;
        let value = self.number()?;
        let unit = if self.is_keyword("unit") {
            self.bump();
            Some(self.string("unit string")?)
        } else {
            None
        };
        doc.variables.push(RawVar {
            name,
            role,
            value,
            unit,
        });
        self.end_statement()
    }

    fn thimac(&mut self, doc: &mut RawDoc, enclosing: Option<&Name>) -> PResult<()> {
        self.bump();
        let name = self.name("thimac name")?;
        let mut parent = enclosing.cloned();
        if self.is_keyword("in") {
            let at = self.pos();
            self.bump();
            if enclosing.is_some() {
                return Err(Diagnostic::error(
                    at,
                    "syntax error: a nested thimac takes its parent from the enclosing block",
                ));
            }
            parent = Some(self.name("parent thimac name")?);
        }
        let index = doc.thimacs.len();
        doc.thimacs.push(RawThimac {
            name: name.clone(),
            parent,
            aspect: Aspect::default(),
            role: None,
        });
        if *self.peek() != Tok::LBrace {
            return self.end_statement();
        }
        self.bump();
        loop {
            self.skip_separators();
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Ident(word) if word == "thimac" => self.thimac(doc, Some(&name))?,
                Tok::Ident(word) if word == "aspect" => {
                    self.bump();
                    let value = self.ident("aspect")?;
                    doc.thimacs[index].aspect =
                        Aspect::from_keyword(&value.text).ok_or_else(|| {
                            Diagnostic::error(
                                value.pos,
                                format!(
                                    "syntax error: unknown aspect `{}` (expected thing, machine or dual)",
                                    value.text
                                ),
                            )
                        })?;
                    self.end_statement()?;
                }
                Tok::Ident(word) if word == "role" => {
                    self.bump();
                    let value = self.ident("role")?;
                    doc.thimacs[index].role =
                        Some(SwcmRole::from_keyword(&value.text).ok_or_else(|| {
                            Diagnostic::error(
                                value.pos,
                                format!("syntax error: unknown role `{}`", value.text),
                            )
                        })?);
                    self.end_statement()?;
                }
                Tok::Ident(_) => {
                    let pos = self.pos();
                    let kind = self.stage_kind()?;
                    let label = match self.peek().clone() {
                        Tok::Str(s) => {
                            self.bump();
                            Some(s)
                        }
                        _ => None,
                    };
                    doc.stages.push(RawStage {
                        thimac: name.text.clone(),
                        kind,
                        label,
                        pos,
                    });
                    self.end_statement()?;
                }
                _ => return self.unexpected("a stage, `aspect`, `role`, `thimac` or `}`"),
            }
        }
        self.end_statement()
    }

    fn arc(&mut self, doc: &mut RawDoc, is_flow: bool) -> PResult<()> {
        self.bump();
        let from = self.path()?;
        self.expect(Tok::Arrow, "`->`")?;
        let to = self.path()?;
        let arc = RawArc { from, to };
        if is_flow {
            doc.flows.push(arc);
        } else {
            doc.triggers.push(arc);
        }
        self.end_statement()
    }

    fn rule(&mut self, doc: &mut RawDoc) -> PResult<()> {
        self.bump();
        let target = self.path()?;
        let choose = if self.is_keyword("choose") {
            self.bump();
            true
        } else {
            false
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut assignments = Vec::new();
        let mut outcomes = Vec::new();
        loop {
            self.skip_separators();
            if *self.peek() == Tok::RBrace {
                self.bump();
                break;
            }
            if choose {
                let label = self.name("outcome label")?;
                self.expect(Tok::Colon, "`:`")?;
                let probability = self.expr()?;
                self.expect(Tok::Arrow, "`->`")?;
                let to = self.path()?;
                outcomes.push((label.text, probability, to));
            } else {
                let target = self.ident("variable name")?;
                self.expect(Tok::Eq, "`=`")?;
                let value = self.expr()?;
                assignments.push(Assignment {
                    target: target.text,
                    value,
                });
            }
            self.end_statement()?;
        }
        let body = if choose {
            RawRuleBody::Choose(outcomes)
        } else {
            RawRuleBody::Update(assignments)
        };
        doc.rules.push(RawRule { target, body });
        self.end_statement()
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.unexpected("expression"),
        }
    }

    fn event(&mut self, doc: &mut RawDoc) -> PResult<()> {
        self.bump();
        let id = self.name("event id")?;
        let description = self.string("event description string")?;
        let emitting = if self.is_keyword("emitting") {
            self.bump();
            true
        } else {
            false
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        loop {
            self.skip_newlines();
            if *self.peek() == Tok::RBrace {
                self.bump();
                break;
            }
            let name = self.name("element")?;
            let elem = if *self.peek() == Tok::Dot {
                self.bump();
                let from = Path {
                    thimac: name,
                    kind: self.stage_kind()?,
                };
                if *self.peek() == Tok::Arrow {
                    self.bump();
                    RawElem::Arc(from, self.path()?)
                } else {
                    RawElem::Stage(from)
                }
            } else {
                RawElem::Thimac(name)
            };
            elements.push(elem);
            self.skip_newlines();
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => return self.unexpected("`,` or `}`"),
            }
        }
        doc.events.push(RawEvent {
            id,
            description,
            emitting,
            elements,
        });
        self.end_statement()
    }

    fn name_list(&mut self, close: Tok, wanted: &str) -> PResult<Vec<Name>> {
        let mut names = Vec::new();
        loop {
            self.skip_newlines();
            if *self.peek() == close {
                self.bump();
                return Ok(names);
            }
            names.push(self.name("event id")?);
            self.skip_newlines();
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {}
                _ => return self.unexpected(wanted),
            }
        }
    }

    fn behavior(&mut self, doc: &mut RawDoc) -> PResult<()> {
        let at = self.bump().1;
        if doc.behavior.is_some() {
            return Err(Diagnostic::error(
                at,
                "duplicate id: behavior section declared twice",
            ));
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut b = RawBehavior::default();
        loop {
            self.skip_separators();
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Ident(w) if w == "branch" => {
                    self.bump();
                    self.expect(Tok::LBrace, "`{`")?;
                    let mut arms = Vec::new();
                    loop {
                        self.skip_newlines();
                        if *self.peek() == Tok::RBrace {
                            self.bump();
                            break;
                        }
                        if *self.peek() == Tok::LBracket {
                            self.bump();
                            arms.push(self.name_list(Tok::RBracket, "`,` or `]`")?);
                        } else {
                            arms.push(vec![self.name("event id")?]);
                        }
                        self.skip_newlines();
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                            }
                            Tok::RBrace => {}
                            _ => return self.unexpected("`,` or `}`"),
                        }
                    }
                    b.groups.push(arms);
                }
                Tok::Ident(w) if w == "recur" => {
                    self.bump();
                    b.recurrences.push(self.name("event id")?);
                }
                Tok::Ident(w) if w == "contain" => {
                    self.bump();
                    let container = self.name("event id")?;
                    self.expect(Tok::LBrace, "`{`")?;
                    let inner = self.name_list(Tok::RBrace, "`,` or `}`")?;
                    b.containments.push((container, inner));
                }
                Tok::Ident(_) | Tok::Str(_) => {
                    let mut prev = self.name("event id")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    loop {
                        let next = self.name("event id")?;
                        b.successions.push((prev, next.clone()));
                        prev = next;
                        if *self.peek() != Tok::Arrow {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return self.unexpected("a behavior statement"),
            }
            self.end_statement()?;
        }
        doc.behavior = Some((at, b));
        self.end_statement()
    }
}

/// Parses `text`; in lenient mode unresolved arc endpoints and parents
/// become dangling ids plus warnings.
pub(crate) fn parse(
    text: &str,
    lenient: bool,
) -> Result<(Document, Vec<Diagnostic>), Vec<Diagnostic>> {
    let toks = lex(text).map_err(|d| vec![d])?;
    let raw = Parser { toks, i: 0 }.document().map_err(|d| vec![d])?;
    Resolver::new(lenient).resolve(raw)
}

struct Resolver {
    lenient: bool,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
    model: Model,
    thimac_ids: BTreeMap<String, ThimacId>,
    stage_ids: BTreeMap<(String, StageKind), StageId>,
    next_dangling_stage: u32,
}

impl Resolver {
    fn new(lenient: bool) -> Self {
        Resolver {
            lenient,
            errors: Vec::new(),
            warnings: Vec::new(),
            model: Model::default(),
            thimac_ids: BTreeMap::new(),
            stage_ids: BTreeMap::new(),
            next_dangling_stage: 0,
        }
    }

    fn dangling(&mut self, pos: Pos, what: String) {
        let message = format!("dangling reference: {what}");
        if self.lenient {
            self.warnings.push(Diagnostic::warning(pos, message));
        } else {
            self.errors.push(Diagnostic::error(pos, message));
        }
    }

    fn stage(&self, path: &Path) -> Option<StageId> {
        self.stage_ids
            .get(&(path.thimac.text.clone(), path.kind))
            .copied()
    }

    fn describe(path: &Path) -> String {
        format!("{}.{}", path.thimac.text, path.kind)
    }

    /// Resolves an arc endpoint, minting a dangling id in lenient mode.
    fn endpoint(&mut self, path: &Path) -> Option<StageId> {
        if let Some(id) = self.stage(path) {
            return Some(id);
        }
        self.dangling(
            path.thimac.pos,
            format!("no stage `{}`", Self::describe(path)),
        );
        let id = StageId(self.model.stages.len() as u32 + self.next_dangling_stage);
        self.next_dangling_stage += 1;
        Some(id)
    }

    fn resolve(mut self, raw: RawDoc) -> Result<(Document, Vec<Diagnostic>), Vec<Diagnostic>> {
        self.model.name = raw.name;

        for (i, t) in raw.thimacs.iter().enumerate() {
            if self.thimac_ids.contains_key(&t.name.text) {
                self.errors.push(Diagnostic::error(
                    t.name.pos,
                    format!("duplicate id: thimac `{}` declared twice", t.name.text),
                ));
                continue;
            }
            self.thimac_ids
                .insert(t.name.text.clone(), ThimacId(i as u32));
        }
        let thimac_count = raw.thimacs.len() as u32;
        let mut dangling_parents = 0;
        for (i, t) in raw.thimacs.iter().enumerate() {
            let parent = match &t.parent {
                None => None,
                Some(p) => match self.thimac_ids.get(&p.text) {
                    Some(id) => Some(*id),
                    None => {
                        self.dangling(p.pos, format!("no thimac `{}`", p.text));
                        dangling_parents += 1;
                        Some(ThimacId(thimac_count + dangling_parents - 1))
                    }
                },
            };
            self.model.thimacs.push(crate::model::Thimac {
                id: ThimacId(i as u32),
                name: t.name.text.clone(),
                aspect: t.aspect,
                parent,
                swcm_role: t.role,
                stages: Vec::new(),
            });
        }

        for s in &raw.stages {
            let key = (s.thimac.clone(), s.kind);
            if self.stage_ids.contains_key(&key) {
                self.errors.push(Diagnostic::error(
                    s.pos,
                    format!(
                        "duplicate id: stage `{}.{}` declared twice",
                        s.thimac, s.kind
                    ),
                ));
                continue;
            }
            let Some(owner) = self.thimac_ids.get(&s.thimac).copied() else {
                // Only reachable for a duplicate thimac name, already reported.
                continue;
            };
            let id = StageId(self.model.stages.len() as u32);
            self.stage_ids.insert(key, id);
            self.model.stages.push(crate::model::Stage {
                id,
                kind: s.kind,
                owner,
                label: s.label.clone(),
                rule: None,
            });
            self.model
                .thimacs
                .iter_mut()
                .find(|t| t.id == owner)
                .unwrap()
                .stages
                .push(id);
        }

        for v in raw.variables {
            if self.model.variable(&v.name.text).is_some() {
                self.errors.push(Diagnostic::error(
                    v.name.pos,
                    format!("duplicate id: variable `{}` declared twice", v.name.text),
                ));
                continue;
            }
            self.model.variables.push(Variable {
                name: v.name.text,
                role: v.role,
                value: v.value,
                unit: v.unit,
            });
        }

        for arc in &raw.flows {
            if let (Some(from), Some(to)) = (self.endpoint(&arc.from), self.endpoint(&arc.to)) {
                self.model.add_flow(from, to);
            }
        }
        for arc in &raw.triggers {
            if let (Some(from), Some(to)) = (self.endpoint(&arc.from), self.endpoint(&arc.to)) {
                self.model.add_trigger(from, to);
            }
        }

        for rule in raw.rules {
            self.attach_rule(rule);
        }

        let mut events: Vec<EventDecl> = Vec::new();
        for e in raw.events {
            if events.iter().any(|x| x.id == e.id.text) {
                self.errors.push(Diagnostic::error(
                    e.id.pos,
                    format!("duplicate id: event `{}` declared twice", e.id.text),
                ));
                continue;
            }
            let elements = e
                .elements
                .iter()
                .filter_map(|el| self.element(el))
                .collect();
            events.push(EventDecl {
                id: e.id.text,
                description: e.description,
                data_emitting: e.emitting,
                elements,
            });
        }

        let behavior = raw.behavior.map(|(_, b)| self.behavior(b, &events));

        if self.errors.is_empty() {
            Ok((
                Document {
                    model: self.model,
                    events,
                    behavior,
                },
                self.warnings,
            ))
        } else {
            let mut errors = self.errors;
            errors.sort_by_key(|d| (d.line, d.column));
            Err(errors)
        }
    }

    fn attach_rule(&mut self, rule: RawRule) {
        let Some(stage) = self.stage(&rule.target) else {
            self.errors.push(Diagnostic::error(
                rule.target.thimac.pos,
                format!(
                    "dangling reference: no stage `{}`",
                    Self::describe(&rule.target)
                ),
            ));
            return;
        };
        let body = match rule.body {
            RawRuleBody::Update(a) => Rule::Update(a),
            RawRuleBody::Choose(outcomes) => {
                let mut resolved = Vec::new();
                for (label, probability, to) in outcomes {
                    let trigger = self
                        .stage(&to)
                        .and_then(|to| self.model.trigger_between(stage, to))
                        .map(|t| t.id);
                    match trigger {
                        Some(trigger) => resolved.push(Outcome {
                            label,
                            probability,
                            trigger,
                        }),
                        None => self.errors.push(Diagnostic::error(
                            to.thimac.pos,
                            format!(
                                "dangling reference: no trigger from `{}` to `{}`",
                                Self::describe(&rule.target),
                                Self::describe(&to)
                            ),
                        )),
                    }
                }
                Rule::Choose(resolved)
            }
        };
        let slot = &mut self.model.stages[stage.0 as usize].rule;
        if slot.is_some() {
            self.errors.push(Diagnostic::error(
                rule.target.thimac.pos,
                format!(
                    "duplicate id: rule for `{}` declared twice",
                    Self::describe(&rule.target)
                ),
            ));
        } else {
            *slot = Some(body);
        }
    }

    fn element(&mut self, el: &RawElem) -> Option<ElementRef> {
        match el {
            RawElem::Thimac(name) => match self.thimac_ids.get(&name.text) {
                Some(id) => Some(ElementRef::Thimac(*id)),
                None => {
                    self.errors.push(Diagnostic::error(
                        name.pos,
                        format!("dangling reference: no thimac `{}`", name.text),
                    ));
                    None
                }
            },
            RawElem::Stage(path) => match self.stage(path) {
                Some(id) => Some(id.into()),
                None => {
                    self.errors.push(Diagnostic::error(
                        path.thimac.pos,
                        format!("dangling reference: no stage `{}`", Self::describe(path)),
                    ));
                    None
                }
            },
            RawElem::Arc(from, to) => {
                let arc = match (self.stage(from), self.stage(to)) {
                    (Some(a), Some(b)) => self
                        .model
                        .flow_between(a, b)
                        .map(|f| ElementId::Flow(f.id))
                        .or_else(|| {
                            self.model
                                .trigger_between(a, b)
                                .map(|t| ElementId::Trigger(t.id))
                        }),
                    _ => None,
                };
                if arc.is_none() {
                    self.errors.push(Diagnostic::error(
                        from.thimac.pos,
                        format!(
                            "dangling reference: no flow or trigger `{} -> {}`",
                            Self::describe(from),
                            Self::describe(to)
                        ),
                    ));
                }
                arc.map(ElementRef::Element)
            }
        }
    }

    fn behavior(&mut self, b: RawBehavior, events: &[EventDecl]) -> BehaviorSpec {
        let check = |name: &Name, errors: &mut Vec<Diagnostic>| {
            if !events.iter().any(|e| e.id == name.text) {
                errors.push(Diagnostic::error(
                    name.pos,
                    format!("dangling reference: no event `{}`", name.text),
                ));
            }
            name.text.clone()
        };
        let errors = &mut self.errors;
        BehaviorSpec {
            successions: b
                .successions
                .iter()
                .map(|(a, z)| (check(a, errors), check(z, errors)))
                .collect(),
            exclusive_groups: b
                .groups
                .iter()
                .map(|arms| {
                    arms.iter()
                        .map(|arm| arm.iter().map(|n| check(n, errors)).collect())
                        .collect()
                })
                .collect(),
            recurrences: b.recurrences.iter().map(|n| check(n, errors)).collect(),
            containments: b
                .containments
                .iter()
                .map(|(c, inner)| {
                    (
                        check(c, errors),
                        inner.iter().map(|n| check(n, errors)).collect(),
                    )
                })
                .collect(),
        }
    }
}
