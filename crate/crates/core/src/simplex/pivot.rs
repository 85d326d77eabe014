//! Entering-arc selection. Every rule scans original arcs only; artificial arcs
//! never re-enter the basis once they leave it.

use super::tree::SpanningTree;
use crate::solver::PivotRule;

/// Default block size: `floor(sqrt(m))`, at least 1.
pub fn default_block(m: usize) -> usize {
    ((m as f64).sqrt() as usize).max(1)
}

/// Default candidate list length: `floor(sqrt(m) / 4)`, at least 1.
pub fn default_list(m: usize) -> usize {
    (((m as f64).sqrt() / 4.0) as usize).max(1)
}

/// Default minor iteration limit: `floor(list / 10)`, at least 1.
pub fn default_minor(list: usize) -> usize {
    (list / 10).max(1)
}

/// Default head length: `floor(block / 100)`, at least 1.
pub fn default_head(block: usize) -> usize {
    (block / 100).max(1)
}

#[derive(Debug)]
pub(crate) enum Pricer {
    Best,
    First { next: usize },
    Block { block: usize, next: usize },
    Candidate { list: usize, minor_limit: usize, minor_count: usize, next: usize, candidates: Vec<usize> },
    Altering { block: usize, head: usize, next: usize, candidates: Vec<usize>, listed: Vec<bool>, violation: Vec<i64> },
}

impl Pricer {
    pub(crate) fn new(rule: PivotRule, m: usize) -> Self {
        match rule {
            PivotRule::BestEligible => Pricer::Best,
            PivotRule::FirstEligible => Pricer::First { next: 0 },
            PivotRule::BlockSearch { block } => Pricer::Block { block: block.unwrap_or_else(|| default_block(m)).max(1), next: 0 },
            PivotRule::CandidateList { list, minor } => {
                let list = list.unwrap_or_else(|| default_list(m)).max(1);
                let minor_limit = minor.unwrap_or_else(|| default_minor(list)).max(1);
                Pricer::Candidate { list, minor_limit, minor_count: 0, next: 0, candidates: Vec::with_capacity(list) }
            }
            PivotRule::AlteringList { block, head } => {
                let block = block.unwrap_or_else(|| default_block(m)).max(1);
                let head = head.unwrap_or_else(|| default_head(block)).max(1);
                Pricer::Altering {
                    block,
                    head,
                    next: 0,
                    candidates: Vec::with_capacity(block + head),
                    listed: vec![false; m],
                    violation: vec![0; m],
                }
            }
        }
    }

    /// Next entering arc, or `None` when no original arc is eligible.
    pub(crate) fn select(&mut self, tree: &SpanningTree) -> Option<usize> {
        let m = tree.arc_count();
        if m == 0 {
            return None;
        }
        match self {
            Pricer::Best => {
                let mut best = 0;
                let mut arc = None;
                for e in 0..m {
                    let v = tree.violation(e);
                    if v > best {
                        best = v;
                        arc = Some(e);
                    }
                }
                arc
            }
            Pricer::First { next } => {
                for e in (*next..m).chain(0..*next) {
                    if tree.violation(e) > 0 {
                        *next = e + 1;
                        return Some(e);
                    }
                }
                None
            }
            Pricer::Block { block, next } => {
                let mut best = 0;
                let mut arc = None;
                let mut cnt = *block;
                for e in (*next..m).chain(0..*next) {
                    let v = tree.violation(e);
                    if v > best {
                        best = v;
                        arc = Some(e);
                    }
                    cnt -= 1;
                    if cnt == 0 {
                        if arc.is_some() {
                            *next = e;
                            return arc;
                        }
                        cnt = *block;
                    }
                }
                // Full wrap: resume the next search where this one started.
                arc
            }
            Pricer::Candidate { list, minor_limit, minor_count, next, candidates } => {
                if !candidates.is_empty() && *minor_count < *minor_limit {
                    *minor_count += 1;
                    candidates.retain(|&e| tree.violation(e) > 0);
                    let best = candidates.iter().copied().max_by(|&a, &b| {
                        tree.violation(a).cmp(&tree.violation(b)).then(b.cmp(&a))
                    });
                    if best.is_some() {
                        return best;
                    }
                }
                candidates.clear();
                let mut best = 0;
                let mut arc = None;
                for e in (*next..m).chain(0..*next) {
                    let v = tree.violation(e);
                    if v > 0 {
                        candidates.push(e);
                        if v > best {
                            best = v;
                            arc = Some(e);
                        }
                        if candidates.len() == *list {
                            *next = e;
                            break;
                        }
                    }
                }
                *minor_count = 1;
                arc
            }
            Pricer::Altering { block, head, next, candidates, listed, violation } => {
                candidates.retain(|&e| {
                    let v = tree.violation(e);
                    violation[e] = v;
                    listed[e] = v > 0;
                    v > 0
                });
                let mut cnt = *block;
                let mut limit = *head;
                let mut stop = None;
                for e in (*next..m).chain(0..*next) {
                    if !listed[e] {
                        let v = tree.violation(e);
                        if v > 0 {
                            violation[e] = v;
                            listed[e] = true;
                            candidates.push(e);
                        }
                    }
                    cnt -= 1;
                    if cnt == 0 {
                        if candidates.len() > limit {
                            stop = Some(e);
                            break;
                        }
                        limit = 0;
                        cnt = *block;
                    }
                }
                if candidates.is_empty() {
                    return None;
                }
                if let Some(e) = stop {
                    *next = e;
                }
                // Largest violation first, ties by lower index; keep the head.
                candidates.sort_unstable_by(|&a, &b| violation[b].cmp(&violation[a]).then(a.cmp(&b)));
                for &e in candidates.iter().skip(*head + 1) {
                    listed[e] = false;
                }
                candidates.truncate(*head + 1);
                let arc = candidates.swap_remove(0);
                listed[arc] = false;
                Some(arc)
            }
        }
    }
}
