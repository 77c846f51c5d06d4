//! The boundary walk: visits every boundary granule once and decides whether
//! it joins the lower approximation.
//!
//! Visit order is breadth-first from the lower approximation, each layer in
//! ascending granule id. Boundary granules that never touch the growing lower
//! set are visited afterwards, lowest id first, each starting a new
//! breadth-first search, so the walk always ends with an empty boundary.

use std::collections::BTreeSet;

use super::{reward, Action, AgentConfig, FireModel, QTable, StateKey};
use crate::granulation::{GranulatedFrame, Granule};
use crate::rough_core::{GranuleSet, RoughApproximation};

/// Depth-one Q-values for both actions given explicit successors.
///
/// `q_a = R(g) + gamma * R(succ_a)` when the successor exists, else `R(g)`.
pub fn q_pair(
    g: &Granule,
    successors: (Option<&Granule>, Option<&Granule>),
    model: &FireModel,
    cfg: &AgentConfig,
) -> Result<(f64, f64), super::AgentError> {
    let r = reward(model, g)?;
    let tail = |s: Option<&Granule>| -> Result<f64, super::AgentError> {
        Ok(match s {
            Some(s) => r + cfg.gamma * reward(model, s)?,
            None => r,
        })
    };
    Ok((tail(successors.0)?, tail(successors.1)?))
}

/// One boundary decision made during [`refine`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub granule: usize,
    pub key: StateKey,
    pub action: Action,
    /// The action came from the Q-table rather than a fresh evaluation.
    pub known_state: bool,
    /// `(q_include, q_exclude, reward)` for freshly evaluated states.
    pub values: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RefineOutcome {
    /// Final fire granules: the refined lower approximation.
    pub fire: GranuleSet,
    /// Boundary granules rejected by the agent.
    pub excluded: GranuleSet,
    pub decisions: Vec<Decision>,
    /// Set when the lower approximation was empty, so no reward is defined.
    pub no_fire_model: bool,
    pub reward_evaluations: usize,
    pub known_state_hits: usize,
}

/// Hypothetical changes explored during lookahead.
#[derive(Default)]
struct Hypothesis {
    visited: Vec<usize>,
    lower: Vec<usize>,
}

/// Mutable state of a boundary walk over one granulated frame.
pub struct BoundaryWalk<'a> {
    gf: &'a GranulatedFrame,
    cfg: AgentConfig,
    in_boundary: Vec<bool>,
    visited: Vec<bool>,
    /// Unvisited boundary granules touching the current lower approximation.
    lower_frontier: BTreeSet<usize>,
    model: FireModel,
    reward_evaluations: usize,
}

impl<'a> BoundaryWalk<'a> {
    /// Returns `None` when the lower approximation is empty.
    pub fn new(gf: &'a GranulatedFrame, ra: &RoughApproximation, cfg: &AgentConfig) -> Option<Self> {
        if ra.lower.is_empty() {
            return None;
        }
        let mut in_boundary = vec![false; gf.len()];
        for &b in &ra.boundary {
            in_boundary[b] = true;
        }
        let lower_frontier = ra
            .lower
            .iter()
            .flat_map(|&l| gf.neighbors(l))
            .copied()
            .filter(|&n| in_boundary[n])
            .collect();
        Some(Self {
            gf,
            cfg: *cfg,
            in_boundary,
            visited: vec![false; gf.len()],
            lower_frontier,
            model: FireModel::from_granules(ra.lower.iter().map(|&id| &gf.granules[id])),
            reward_evaluations: 0,
        })
    }

    pub fn model(&self) -> &FireModel {
        &self.model
    }

    pub fn reward_evaluations(&self) -> usize {
        self.reward_evaluations
    }

    fn open(&self, id: usize, hyp: &Hypothesis) -> bool {
        self.in_boundary[id] && !self.visited[id] && !hyp.visited.contains(&id)
    }

    fn eval_reward(&mut self, id: usize) -> f64 {
        self.reward_evaluations += 1;
        reward(&self.model, &self.gf.granules[id]).expect("walk model is defined")
    }

    fn succ_include(&self, id: usize, hyp: &Hypothesis) -> Option<usize> {
        self.gf.neighbors(id).iter().copied().find(|&n| n != id && self.open(n, hyp))
    }

    fn succ_exclude(&self, hyp: &Hypothesis) -> Option<usize> {
        let from_frontier = self.lower_frontier.iter().copied().find(|&n| !hyp.visited.contains(&n));
        let from_hypothetical = hyp
            .lower
            .iter()
            .filter_map(|&l| self.gf.neighbors(l).iter().copied().find(|&n| self.open(n, hyp)))
            .min();
        match (from_frontier, from_hypothetical) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Successors of `id` under (include, exclude), seen from the current state.
    pub fn successors(&self, id: usize) -> (Option<usize>, Option<usize>) {
        let hyp = Hypothesis {
            visited: vec![id],
            lower: Vec::new(),
        };
        let inc = {
            let h = Hypothesis {
                visited: vec![id],
                lower: vec![id],
            };
            self.succ_include(id, &h)
        };
        (inc, self.succ_exclude(&hyp))
    }

    fn q_action(&mut self, id: usize, r: f64, include: bool, depth: u32, hyp: &mut Hypothesis) -> f64 {
        hyp.visited.push(id);
        if include {
            hyp.lower.push(id);
        }
        let next = if include {
            self.succ_include(id, hyp)
        } else {
            self.succ_exclude(hyp)
        };
        let q = match next {
            Some(n) => r + self.cfg.gamma * self.state_value(n, depth - 1, hyp),
            None => r,
        };
        if include {
            hyp.lower.pop();
        }
        hyp.visited.pop();
        q
    }

    fn state_value(&mut self, id: usize, depth: u32, hyp: &mut Hypothesis) -> f64 {
        let r = self.eval_reward(id);
        if depth == 0 {
            return r;
        }
        let inc = self.q_action(id, r, true, depth, hyp);
        let exc = self.q_action(id, r, false, depth, hyp);
        inc.max(exc)
    }

    /// `(q_include, q_exclude, R)` for granule `id` with the configured
    /// lookahead depth; the fire model is held fixed during lookahead.
    pub fn q_values(&mut self, id: usize) -> (f64, f64, f64) {
        let r = self.eval_reward(id);
        let depth = self.cfg.lookahead_depth.max(1);
        let mut hyp = Hypothesis::default();
        let inc = self.q_action(id, r, true, depth, &mut hyp);
        let exc = self.q_action(id, r, false, depth, &mut hyp);
        (inc, exc, r)
    }

    /// Commits a decision, returning the newly reachable boundary granules.
    fn commit(&mut self, id: usize, include: bool) -> Vec<usize> {
        self.visited[id] = true;
        self.lower_frontier.remove(&id);
        if !include {
            return Vec::new();
        }
        self.model.add_granule(&self.gf.granules[id]);
        let fresh: Vec<usize> = self
            .gf
            .neighbors(id)
            .iter()
            .copied()
            .filter(|&n| self.in_boundary[n] && !self.visited[n])
            .collect();
        self.lower_frontier.extend(fresh.iter().copied());
        fresh
    }
}

fn decide(walk: &mut BoundaryWalk<'_>, qt: &mut QTable, id: usize, out: &mut RefineOutcome) -> bool {
    let key = qt.key_for(&walk.gf.granules[id].mean_feature);
    let (action, known, values) = match qt.recall(&key) {
        Some(a) => {
            out.known_state_hits += 1;
            (a, true, None)
        }
        None => {
            let (qi, qe, r) = walk.q_values(id);
            let include = qi > qe || (qi == qe && r > 0.0);
            let a = if include { Action::Include } else { Action::Exclude };
            qt.record(key, qi, qe, a);
            (a, false, Some((qi, qe, r)))
        }
    };
    out.decisions.push(Decision {
        granule: id,
        key,
        action,
        known_state: known,
        values,
    });
    action == Action::Include
}

/// Runs the boundary walk and returns the refined fire granules.
///
/// With an empty lower approximation nothing is decided, `qt` is untouched
/// and `no_fire_model` is set. Otherwise `ra.lower ⊆ fire ⊆ ra.upper`.
pub fn refine(gf: &GranulatedFrame, ra: &RoughApproximation, cfg: &AgentConfig, qt: &mut QTable) -> RefineOutcome {
    let mut out = RefineOutcome::default();
    let Some(mut walk) = BoundaryWalk::new(gf, ra, cfg) else {
        out.no_fire_model = true;
        return out;
    };
    out.fire = ra.lower.clone();

    let mut enqueued = vec![false; gf.len()];
    let mut layer: Vec<usize> = walk.lower_frontier.iter().copied().collect();
    for &id in &layer {
        enqueued[id] = true;
    }
    let mut leftovers = ra.boundary.iter().copied();

    loop {
        while !layer.is_empty() {
            let mut next = BTreeSet::new();
            for id in layer {
                let include = decide(&mut walk, qt, id, &mut out);
                for n in walk.commit(id, include) {
                    if !enqueued[n] {
                        enqueued[n] = true;
                        next.insert(n);
                    }
                }
                if include {
                    out.fire.insert(id);
                } else {
                    out.excluded.insert(id);
                }
            }
            layer = next.into_iter().collect();
        }
        match leftovers.find(|&b| !enqueued[b]) {
            Some(b) => {
                enqueued[b] = true;
                layer = vec![b];
            }
            None => break,
        }
    }

    out.reward_evaluations = walk.reward_evaluations;
    out
}
