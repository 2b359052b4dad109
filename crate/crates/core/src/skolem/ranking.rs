//! Linear ranking functions with per-location offsets:
//! `δ(v) = a·data + c[loc]`, where locations outside the template (or every
//! state, without a location variable) share the base offset. `rank(v, v')`
//! is read as
//! `δ(v) ≥ 0 ∧ δ(v) − δ(v') ≥ 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::finite::infer_bounds;
use crate::ir::{
    Assertion, CmpOp, ConstraintSystem, Head, HornClause, LinExpr, Literal, PredApp, Role, StepLit,
    TransitionSystem, Update, Var,
};

use super::{location_var, small_first, SkolemError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingTemplate {
    pub location: Option<String>,
    pub data_vars: Vec<String>,
    /// Location values that get their own offset; any other value uses 0.
    pub locations: Vec<i64>,
    pub coeff_range: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingCandidate {
    /// One coefficient per data variable.
    pub data: Vec<i64>,
    pub offsets: BTreeMap<i64, i64>,
    /// Offset of every location without its own entry.
    pub base: i64,
}

impl RankingTemplate {
    pub fn new(ts: &TransitionSystem, coeff_range: (i64, i64)) -> Self {
        let location = location_var(ts);
        let data_vars = ts.vars().iter().filter(|v| Some(*v) != location.as_ref()).cloned().collect();
        let mut locations = BTreeSet::new();
        if let Some(l) = &location {
            let var = Var::state(l.as_str());
            let idx = ts.var_index(l).unwrap();
            locations.extend(ts.init().pinned_value(&var));
            for c in ts.commands() {
                locations.extend(c.guard.pinned_value(&var));
                if let Update::Expr(e) = &c.updates[idx] {
                    locations.extend(e.as_constant());
                }
            }
        }
        RankingTemplate { location, data_vars, locations: locations.into_iter().collect(), coeff_range }
    }

    fn data_expr(&self, cand: &RankingCandidate, primed: bool) -> LinExpr {
        let mut e = LinExpr::constant(0);
        for (v, &a) in self.data_vars.iter().zip(&cand.data) {
            let var = if primed { Var::primed(v.as_str()) } else { Var::state(v.as_str()) };
            e.add_term(a, var);
        }
        e
    }

    /// `(condition, δ)` pieces covering every state; a known location gives
    /// a single unconditional piece.
    fn pieces(&self, cand: &RankingCandidate, primed: bool, known: Option<i64>) -> Vec<(Assertion, LinExpr)> {
        let data = self.data_expr(cand, primed);
        let offset = |k: i64| cand.offsets.get(&k).copied().unwrap_or(0);
        let base = data.add(&LinExpr::constant(cand.base));
        let Some(loc) = &self.location else {
            return vec![(Assertion::tt(), base)];
        };
        if let Some(k) = known {
            let off = if self.locations.contains(&k) { offset(k) } else { cand.base };
            return vec![(Assertion::tt(), data.add(&LinExpr::constant(off)))];
        }
        let var = if primed { Var::primed(loc.as_str()) } else { Var::state(loc.as_str()) };
        let at = |k: i64| Assertion::cmp(CmpOp::Eq, LinExpr::var(var.clone()), LinExpr::constant(k));
        let mut out: Vec<(Assertion, LinExpr)> =
            self.locations.iter().map(|&k| (at(k), data.add(&LinExpr::constant(offset(k))))).collect();
        let elsewhere = Assertion::and_all(self.locations.iter().map(|&k| at(k).negate()));
        out.push((elsewhere, base));
        out
    }

    /// `δ(v) ≥ 0 ∧ δ(v) − δ(v') ≥ 1`, specialized to the known locations.
    pub fn decrease(&self, cand: &RankingCandidate, cur: Option<i64>, next: Option<i64>) -> Assertion {
        let mut parts = Vec::new();
        for (cc, ec) in self.pieces(cand, false, cur) {
            for (cn, en) in self.pieces(cand, true, next) {
                let holds = Assertion::and_all([
                    Assertion::cmp(CmpOp::Ge, ec.clone(), LinExpr::constant(0)),
                    Assertion::cmp(CmpOp::Ge, ec.sub(&en), LinExpr::constant(1)),
                ]);
                parts.push(Assertion::or_all([cc.negate(), cn.negate(), holds]));
            }
        }
        Assertion::and_all(parts)
    }

    /// `delta := a1*x1 + ... + c[loc=v] + ...`
    pub fn describe(&self, name: &str, cand: &RankingCandidate) -> String {
        let data = self.data_expr(cand, false);
        let mut out = format!("delta{} := ", name.trim_start_matches("rank"));
        let mut first = true;
        if !data.is_constant() {
            write!(out, "{data}").unwrap();
            first = false;
        }
        let mut terms: Vec<(i64, String)> = Vec::new();
        if let Some(loc) = &self.location {
            terms.extend(cand.offsets.iter().map(|(&k, &c)| (c, format!("[{loc}={k}]"))));
            terms.push((cand.base, format!("[{loc}=other]")));
        } else {
            terms.push((cand.base, String::new()));
        }
        for (c, tag) in terms {
            if c == 0 {
                continue;
            }
            let sep = match (first, c < 0) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            write!(out, "{sep}{}{tag}", c.abs()).unwrap();
            first = false;
        }
        if first {
            out.push('0');
        }
        out
    }
}

fn mentions_rank(c: &HornClause, ranks: &BTreeSet<&str>) -> bool {
    c.literals().any(|l| l.pred().is_some_and(|p| ranks.contains(p.name.as_str())))
}

/// Replace `next` in bodies of clauses that mention a rank symbol by one
/// clause per command (`guard ∧ step`), so each clause knows its transition.
pub fn split_rank_clauses(cs: &ConstraintSystem) -> Result<ConstraintSystem, SkolemError> {
    let ranks: BTreeSet<&str> =
        cs.decls().iter().filter(|d| d.role == Role::Rank).map(|d| d.name.as_str()).collect();
    let mut clauses = Vec::new();
    for c in cs.clauses() {
        if !mentions_rank(c, &ranks) || !c.body.contains(&Literal::Next) {
            clauses.push(c.clone());
            continue;
        }
        for cmd in cs.system().commands() {
            let mut body: Vec<Literal> = c.body.iter().filter(|l| **l != Literal::Next).cloned().collect();
            if !cmd.guard.is_true() {
                body.push(Literal::Constraint(cmd.guard.clone()));
            }
            body.push(Literal::Step(StepLit { site: cmd.site, havoc_fill: BTreeMap::new() }));
            clauses.push(HornClause::new(body, c.head.clone()));
        }
    }
    Ok(cs.with_parts(cs.decls().to_vec(), clauses, cs.wf_marks().to_vec())?)
}

/// What a clause body tells about the transition it constrains.
struct EdgeInfo {
    cur: Option<i64>,
    next: Option<i64>,
    /// Constant shift per data variable (`x' = x + d`), if known.
    shifts: Vec<Option<i64>>,
    region: Vec<Assertion>,
}

fn edge_info(ts: &TransitionSystem, tpl: &RankingTemplate, body: &[Literal]) -> EdgeInfo {
    let region: Vec<Assertion> = body
        .iter()
        .filter_map(|l| match l {
            Literal::Constraint(a) if !a.mentions_primed() => Some(a.clone()),
            _ => None,
        })
        .collect();
    let cur = tpl.location.as_ref().and_then(|l| {
        let var = Var::state(l.as_str());
        region.iter().find_map(|a| a.pinned_value(&var))
    });
    let step = body.iter().find_map(|l| match l {
        Literal::Step(s) => Some(s),
        _ => None,
    });
    let update_of = |name: &str| -> Option<LinExpr> {
        let st = step?;
        let cmd = ts.command(st.site)?;
        match &cmd.updates[ts.var_index(name)?] {
            Update::Expr(e) => Some(e.clone()),
            Update::Havoc => st.havoc_fill.get(name).cloned(),
        }
    };
    let next = tpl.location.as_ref().and_then(|l| {
        let e = update_of(l)?;
        if let Some(k) = e.as_constant() {
            return Some(k);
        }
        let d = e.sub(&LinExpr::var(Var::state(l.as_str())));
        Some(cur? + d.as_constant()?)
    });
    let shifts = tpl
        .data_vars
        .iter()
        .map(|x| {
            let e = update_of(x)?;
            e.sub(&LinExpr::var(Var::state(x.as_str()))).as_constant()
        })
        .collect();
    EdgeInfo { cur, next, shifts, region }
}

/// Sample points of the region inside a box around the system's constants.
fn region_points(
    ts: &TransitionSystem,
    tpl: &RankingTemplate,
    info: &EdgeInfo,
    bounds: &[(i64, i64)],
) -> Option<Vec<Vec<i64>>> {
    const MAX_POINTS: usize = 20_000;
    let vars = ts.vars();
    let mut ranges: Vec<Vec<i64>> = Vec::new();
    let mut total = 1usize;
    for (name, &(lo, hi)) in vars.iter().zip(bounds) {
        let r: Vec<i64> = match (&tpl.location, info.cur) {
            (Some(l), Some(k)) if l == name => vec![k],
            _ => (lo..=hi).collect(),
        };
        total = total.saturating_mul(r.len());
        ranges.push(r);
    }
    if total > MAX_POINTS {
        return None;
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; ranges.len()];
    'outer: loop {
        let point: Vec<i64> = idx.iter().zip(&ranges).map(|(&i, r)| r[i]).collect();
        let env = |v: &Var| vars.iter().position(|n| *n == v.name).map(|i| point[i]);
        if info.region.iter().all(|a| a.eval(&env) == Some(true)) {
            out.push(point);
        }
        for i in (0..idx.len()).rev() {
            idx[i] += 1;
            if idx[i] < ranges[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    Some(out)
}

/// Offsets from relaxation, and whether every edge constraint could be met.
struct Offsets {
    offsets: BTreeMap<i64, i64>,
    base: i64,
    /// Edge constraints given up, plus edges skipped for an unknown shift;
    /// zero when every edge is accounted for.
    dropped: usize,
}

/// Least offsets making every relevant edge decrease. When the data
/// coefficients force a non-decreasing cycle, the constraints between the
/// keys that still move are dropped and relaxation restarts; the result is
/// then marked inexact and left for the certifier, which may exclude those
/// edges through the invariant. Key `None` stands for the base offset.
fn solve_offsets(
    tpl: &RankingTemplate,
    data: &[i64],
    edges: &[(EdgeInfo, Option<Vec<Vec<i64>>>)],
    ts: &TransitionSystem,
) -> Offsets {
    let key = |k: Option<i64>| k.filter(|k| tpl.locations.contains(k));
    let mut floor: BTreeMap<Option<i64>, i64> = tpl.locations.iter().map(|&k| (Some(k), 0)).collect();
    floor.insert(None, 0);
    let data_idx: Vec<usize> = tpl.data_vars.iter().map(|x| ts.var_index(x).expect("declared")).collect();
    // An edge starts at a known key when its location is pinned, or always
    // when there is no location variable.
    let source = |info: &EdgeInfo| -> Option<Option<i64>> {
        match (&tpl.location, info.cur) {
            (None, _) => Some(None),
            (Some(_), Some(k)) => Some(key(Some(k))),
            (Some(_), None) => None,
        }
    };
    // δ(v) ≥ 0 on sampled states
    for (info, points) in edges {
        let (Some(k), Some(points)) = (source(info), points) else { continue };
        for p in points {
            let val: i64 = data.iter().zip(&data_idx).map(|(a, &i)| a * p[i]).sum();
            let entry = floor.entry(k).or_insert(0);
            *entry = (*entry).max(-val);
        }
    }
    let mut constraints: Vec<(Option<i64>, Option<i64>, i64)> = Vec::new();
    let mut skipped = 0;
    for (info, points) in edges {
        if matches!(points, Some(p) if p.is_empty()) {
            continue;
        }
        let Some(k) = source(info) else { continue };
        // δ(v) − δ(v') = c[k] − c[k'] − a·d ≥ 1; edges with an unknown shift
        // on a ranked variable are left to the certifier.
        let Some(ad) = data
            .iter()
            .zip(&info.shifts)
            .map(|(&a, d)| if a == 0 { Some(0) } else { d.map(|d| a * d) })
            .sum::<Option<i64>>()
        else {
            skipped += 1;
            continue;
        };
        let w = 1 + ad;
        match (&tpl.location, info.next) {
            (None, _) => constraints.push((k, None, w)),
            (Some(_), Some(k2)) => constraints.push((k, key(Some(k2)), w)),
            (Some(_), None) => constraints.extend(floor.keys().map(|&k2| (k, k2, w))),
        }
    }
    let total = constraints.len();
    loop {
        let mut c = floor.clone();
        let rounds = c.len() + 1;
        let mut moving = BTreeSet::new();
        for round in 0..=rounds {
            moving.clear();
            for &(k, k2, w) in &constraints {
                let need = c.get(&k2).copied().unwrap_or(0) + w;
                let entry = c.entry(k).or_insert(0);
                if *entry < need {
                    *entry = need;
                    moving.insert(k);
                }
            }
            if moving.is_empty() || round == rounds {
                break;
            }
        }
        if moving.is_empty() {
            let base = c.remove(&None).unwrap_or(0);
            return Offsets {
                offsets: c.into_iter().map(|(k, v)| (k.expect("located"), v)).collect(),
                base,
                dropped: skipped + total - constraints.len(),
            };
        }
        let before = constraints.len();
        constraints.retain(|(k, k2, _)| !(moving.contains(k) && moving.contains(k2)));
        if constraints.len() == before {
            // only a positive self-reference on a settled key can be left
            constraints.retain(|(k, _, _)| !moving.contains(k));
        }
    }
}

/// Ranking candidates for one rank symbol: data coefficients in
/// magnitude order, each paired with offsets derived from the transitions
/// of the clauses the symbol appears in. Vectors whose offsets meet every
/// edge constraint come first; the others follow with relaxed offsets,
/// fewest dropped constraints first.
pub fn ranking_candidates<'a>(
    cs: &'a ConstraintSystem,
    tpl: &'a RankingTemplate,
    rank: &'a str,
) -> impl Iterator<Item = RankingCandidate> + 'a {
    ranking_domain(cs, tpl, rank, true)
}

/// Every data coefficient vector of the template domain, each exactly
/// once. With `exact_first`, vectors are ordered by the number of edge
/// constraints their offsets had to give up; otherwise the order is plain
/// magnitude order.
pub fn ranking_domain<'a>(
    cs: &'a ConstraintSystem,
    tpl: &'a RankingTemplate,
    rank: &'a str,
    exact_first: bool,
) -> impl Iterator<Item = RankingCandidate> + 'a {
    let ts = cs.system();
    let mut bounds = infer_bounds(ts, &BTreeMap::new());
    for b in &mut bounds {
        b.0 = b.0.min(0) - 3;
        b.1 = b.1.max(0) + 3;
    }
    let edges: Vec<(EdgeInfo, Option<Vec<Vec<i64>>>)> = cs
        .clauses()
        .iter()
        .filter(|c| c.head.items().iter().any(|l| l.pred().is_some_and(|p| p.name == rank)))
        .map(|c| {
            let info = edge_info(ts, tpl, &c.body);
            let pts = region_points(ts, tpl, &info, &bounds);
            (info, pts)
        })
        .collect();
    let values = small_first(tpl.coeff_range);
    let n = tpl.data_vars.len();
    let radix = values.len();
    let total = radix.checked_pow(n as u32).unwrap_or(usize::MAX);
    let decode = move |mut code: usize| {
        let mut data = vec![0; n];
        for slot in data.iter_mut().rev() {
            *slot = values[code % radix];
            code /= radix;
        }
        data
    };
    let make = move |code: usize| {
        let data = decode(code);
        let o = solve_offsets(tpl, &data, &edges, ts);
        (o.dropped, RankingCandidate { data, offsets: o.offsets, base: o.base })
    };
    let mut all: Vec<(usize, RankingCandidate)> = Vec::new();
    let mut lazy = None;
    // sorting needs the whole domain; past the limit, magnitude order
    const SORT_LIMIT: usize = 20_000;
    if exact_first && total <= SORT_LIMIT {
        all = (0..total).map(&make).collect();
        all.sort_by_key(|(d, _)| *d);
    } else {
        lazy = Some((0..total).map(make));
    }
    all.into_iter().map(|(_, c)| c).chain(lazy.into_iter().flatten().map(|(_, c)| c))
}

/// Substitute each rank literal by its ranking condition and drop the
/// discharged symbols and wf marks.
pub fn apply_ranking(
    cs: &ConstraintSystem,
    tpl: &RankingTemplate,
    cands: &BTreeMap<String, RankingCandidate>,
) -> Result<ConstraintSystem, SkolemError> {
    if cands.is_empty() {
        return Ok(cs.clone());
    }
    for (name, cand) in cands {
        if cand.data.len() != tpl.data_vars.len() {
            return Err(SkolemError::OutOfDomain(format!("ranking for {name}")));
        }
    }
    let names: BTreeSet<&str> = cands.keys().map(String::as_str).collect();
    let split = split_rank_clauses(cs)?;
    let ts = cs.system();
    let mut clauses = Vec::new();
    for c in split.clauses() {
        if !mentions_rank(c, &names) {
            clauses.push(c.clone());
            continue;
        }
        let info = edge_info(ts, tpl, &c.body);
        let subst = |l: &Literal| -> Literal {
            match l {
                Literal::Pred(PredApp { name, .. }) if names.contains(name.as_str()) => {
                    Literal::Constraint(tpl.decrease(&cands[name], info.cur, info.next))
                }
                other => other.clone(),
            }
        };
        let head = match &c.head {
            Head::Conj(items) => Head::Conj(items.iter().map(subst).collect()),
            Head::Exists(items) => Head::Exists(items.iter().map(subst).collect()),
        };
        clauses.push(HornClause::new(c.body.iter().map(subst).collect(), head));
    }
    let decls = cs.decls().iter().filter(|d| !names.contains(d.name.as_str())).cloned().collect();
    let wf = cs.wf_marks().iter().filter(|w| !names.contains(w.as_str())).cloned().collect();
    Ok(cs.with_parts(decls, clauses, wf)?)
}
