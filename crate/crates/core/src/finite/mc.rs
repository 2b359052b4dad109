//! Explicit-state CTL labeling.
//!
//! States without successors satisfy `AX`, `AG` successor obligations and
//! `AU` vacuously, and fail `EX`, `EG` and `EU` obligations.

use crate::ir::CtlFormula;

use super::FiniteInstance;

pub type StateSet = Vec<bool>;

fn predecessors(inst: &FiniteInstance) -> Vec<Vec<u32>> {
    let mut pred = vec![Vec::new(); inst.num_states()];
    for s in 0..inst.num_states() {
        for &t in inst.successors(s) {
            pred[t as usize].push(s as u32);
        }
    }
    pred
}

pub fn ex(inst: &FiniteInstance, z: &[bool]) -> StateSet {
    (0..inst.num_states()).map(|s| inst.successors(s).iter().any(|&t| z[t as usize])).collect()
}

pub fn ax(inst: &FiniteInstance, z: &[bool]) -> StateSet {
    (0..inst.num_states()).map(|s| inst.successors(s).iter().all(|&t| z[t as usize])).collect()
}

/// Greatest fixpoint of `Z = q ∩ EX Z`.
pub fn eg(inst: &FiniteInstance, q: &[bool]) -> StateSet {
    let pred = predecessors(inst);
    let mut z = q.to_vec();
    let mut live: Vec<usize> = (0..inst.num_states())
        .map(|s| inst.successors(s).iter().filter(|&&t| q[t as usize]).count())
        .collect();
    let mut work: Vec<usize> = (0..inst.num_states()).filter(|&s| z[s] && live[s] == 0).collect();
    while let Some(s) = work.pop() {
        if !z[s] {
            continue;
        }
        z[s] = false;
        for &p in &pred[s] {
            let p = p as usize;
            live[p] -= 1;
            if z[p] && live[p] == 0 {
                work.push(p);
            }
        }
    }
    z
}

/// Greatest fixpoint of `Z = q ∩ AX Z`.
pub fn ag(inst: &FiniteInstance, q: &[bool]) -> StateSet {
    let pred = predecessors(inst);
    let mut z = q.to_vec();
    let mut work: Vec<usize> = (0..inst.num_states()).filter(|&s| !q[s]).collect();
    while let Some(s) = work.pop() {
        for &p in &pred[s] {
            let p = p as usize;
            if z[p] {
                z[p] = false;
                work.push(p);
            }
        }
    }
    z
}

/// Least fixpoint of `Z = r ∪ (q ∩ EX Z)`, with the BFS layer at which each
/// state entered (`None` outside the fixpoint).
pub fn eu_layers(inst: &FiniteInstance, q: &[bool], r: &[bool]) -> Vec<Option<u32>> {
    let pred = predecessors(inst);
    let mut dist: Vec<Option<u32>> = vec![None; inst.num_states()];
    let mut frontier: Vec<usize> = (0..inst.num_states()).filter(|&s| r[s]).collect();
    for &s in &frontier {
        dist[s] = Some(0);
    }
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &s in &frontier {
            for &p in &pred[s] {
                let p = p as usize;
                if dist[p].is_none() && q[p] {
                    dist[p] = Some(d);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Least fixpoint of `Z = r ∪ (q ∩ AX Z)` where stuck states count as
/// satisfying `AX Z`, with the stage at which each state entered.
pub fn au_layers(inst: &FiniteInstance, q: &[bool], r: &[bool]) -> Vec<Option<u32>> {
    let n = inst.num_states();
    let pred = predecessors(inst);
    let mut stage: Vec<Option<u32>> = vec![None; n];
    let mut pending: Vec<usize> = (0..n).map(|s| inst.successors(s).len()).collect();
    let mut frontier: Vec<usize> = (0..n).filter(|&s| r[s] || pending[s] == 0).collect();
    for &s in &frontier {
        stage[s] = Some(0);
    }
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &s in &frontier {
            for &p in &pred[s] {
                let p = p as usize;
                if stage[p].is_some() {
                    continue;
                }
                pending[p] -= 1;
                if pending[p] == 0 && q[p] {
                    stage[p] = Some(d);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    stage
}

/// The states satisfying `f`.
pub fn mc_ctl(inst: &FiniteInstance, f: &CtlFormula) -> StateSet {
    use CtlFormula::*;
    let n = inst.num_states();
    match f {
        Atom(a) => inst.states_where(a),
        And(l, r) => zip(&mc_ctl(inst, l), &mc_ctl(inst, r), |a, b| a && b),
        Or(l, r) => zip(&mc_ctl(inst, l), &mc_ctl(inst, r), |a, b| a || b),
        Implies(c, g) => zip(&inst.states_where(c), &mc_ctl(inst, g), |a, b| !a || b),
        AX(g) => ax(inst, &mc_ctl(inst, g)),
        EX(g) => ex(inst, &mc_ctl(inst, g)),
        AG(g) => ag(inst, &mc_ctl(inst, g)),
        EG(g) => eg(inst, &mc_ctl(inst, g)),
        AF(g) => present(&au_layers(inst, &vec![true; n], &mc_ctl(inst, g))),
        EF(g) => present(&eu_layers(inst, &vec![true; n], &mc_ctl(inst, g))),
        AU(l, r) => present(&au_layers(inst, &mc_ctl(inst, l), &mc_ctl(inst, r))),
        EU(l, r) => present(&eu_layers(inst, &mc_ctl(inst, l), &mc_ctl(inst, r))),
    }
}

/// Every initial state satisfies `f`.
pub fn holds(inst: &FiniteInstance, f: &CtlFormula) -> bool {
    let sat = mc_ctl(inst, f);
    inst.initial_states().all(|s| sat[s])
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> StateSet {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

fn present(layers: &[Option<u32>]) -> StateSet {
    layers.iter().map(Option::is_some).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::frontend::{parse_ctl, parse_system};

    /// s0 -> s1, s1 -> s1, s0 -> s2, s2 -> s2; p holds only at s2.
    fn lasso() -> FiniteInstance {
        let ts = parse_system(
            "(system (vars (s Int)) (init (= s 0)) (trans
               (rule (= s 0) ((s 1))) (rule (= s 0) ((s 2)))
               (rule (= s 1) ((s 1))) (rule (= s 2) ((s 2)))))",
        )
        .unwrap();
        FiniteInstance::new(Arc::new(ts), vec![(0, 2)], true, 10).unwrap()
    }

    #[test]
    fn ef_versus_af() {
        let inst = lasso();
        let ef = mc_ctl(&inst, &parse_ctl("EF(s = 2)").unwrap());
        let af = mc_ctl(&inst, &parse_ctl("AF(s = 2)").unwrap());
        assert_eq!(ef, vec![true, false, true]);
        assert_eq!(af, vec![false, false, true]);
    }

    #[test]
    fn stuck_states() {
        let ts = parse_system("(system (vars (s Int)) (init true) (trans (rule (= s 0) ((s 1)))))").unwrap();
        let inst = FiniteInstance::new(Arc::new(ts), vec![(0, 1)], true, 10).unwrap();
        assert_eq!(mc_ctl(&inst, &parse_ctl("AX(false)").unwrap()), vec![false, true]);
        assert_eq!(mc_ctl(&inst, &parse_ctl("EX(true)").unwrap()), vec![true, false]);
        assert_eq!(mc_ctl(&inst, &parse_ctl("AF(false)").unwrap()), vec![true, true]);
        assert_eq!(mc_ctl(&inst, &parse_ctl("EG(true)").unwrap()), vec![false, false]);
    }

    #[test]
    fn true_holds_everywhere() {
        let inst = lasso();
        assert!(mc_ctl(&inst, &CtlFormula::tt()).iter().all(|&b| b));
        assert!(holds(&inst, &CtlFormula::tt()));
    }
}
