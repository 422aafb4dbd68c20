use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{compute, join, LandmarkSet};
use crate::dynamics::{Stepper, TriString};
use crate::error::Result;

/// How a tracked maximum `M_k` moved during one evolution step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// `M_k >= L + 2` and it moved one to the left.
    Bulk,
    /// `M_k = L + 1`, `M_{k-1} > L + 2` (or `k = 0`), and it moved one to
    /// the right, possibly out of the window as the projection sorts.
    Edge,
    /// `M_k = L + 1`, `M_{k-1} = L + 2`, and level `k` disappeared.
    Annihilated,
    /// None of the above matched.
    Unexplained,
}

impl Phase {
    fn label(self) -> &'static str {
        match self {
            Phase::Bulk => "bulk",
            Phase::Edge => "edge",
            Phase::Annihilated => "annihilated",
            Phase::Unexplained => "unexplained",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    /// Level `k`, counted down from the current maximum.
    pub level: usize,
    pub from: usize,
    pub to: Option<usize>,
    pub phase: Phase,
}

/// Landmarks before step `step` and how each maximum moved in that step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStep {
    pub step: usize,
    pub l: usize,
    pub r: usize,
    pub u: Option<usize>,
    pub maxima: Vec<usize>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub steps: Vec<PhaseStep>,
}

impl PhaseTrace {
    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.steps.iter().flat_map(|s| s.transitions.iter())
    }

    pub fn is_complete(&self) -> bool {
        self.transitions().all(|t| t.phase != Phase::Unexplained)
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.transitions().filter(|t| t.phase == phase).count()
    }

    /// One `step` record per evolution step followed by one `transition`
    /// record per tracked maximum, as space separated `key=value` pairs.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let u = s.u.map_or_else(|| "none".into(), |u| u.to_string());
            let maxima = if s.maxima.is_empty() {
                "none".into()
            } else {
                join(&s.maxima)
            };
            let _ = writeln!(
                out,
                "step={} L={} R={} U={} M_list={}",
                s.step, s.l, s.r, u, maxima
            );
            for t in &s.transitions {
                let to = t.to.map_or_else(|| "none".into(), |v| v.to_string());
                let _ = writeln!(
                    out,
                    "transition step={} level={} from={} to={} phase={}",
                    s.step,
                    t.level,
                    t.from,
                    to,
                    t.phase.label()
                );
            }
        }
        out
    }
}

fn classify(before: &LandmarkSet, after: &LandmarkSet, level: usize) -> Transition {
    let from = before.m_list[level];
    let to = after.m_list.get(level).copied();
    let l = before.l;
    let phase = if from >= l + 2 {
        if to == Some(from - 1) {
            Phase::Bulk
        } else {
            Phase::Unexplained
        }
    } else if level == 0 || before.m_list[level - 1] > l + 2 {
        let left_window = after.window().is_none_or(|(_, hi)| from + 1 > hi);
        if to == Some(from + 1) || (to.is_none() && left_window) {
            Phase::Edge
        } else {
            Phase::Unexplained
        }
    } else if to.is_none() {
        Phase::Annihilated
    } else {
        Phase::Unexplained
    };
    Transition {
        level,
        from,
        to,
        phase,
    }
}

/// Evolves `t` to its fixed point, recomputing the landmarks after every
/// step and classifying the motion of every `M_k`.
pub fn track_phases(t: &TriString) -> Result<PhaseTrace> {
    let mut u = t.second_class_position()?;
    let mut stepper = Stepper::new(t.symbols());
    let mut before = compute(stepper.cells(), u);
    let mut trace = PhaseTrace::default();
    let mut step = 0;
    while stepper.step() > 0 {
        if u.is_some() {
            u = stepper.cells().iter().position(|&s| s == 1).map(|i| i + 1);
        }
        let after = compute(stepper.cells(), u);
        let transitions = (0..before.m_list.len())
            .map(|level| classify(&before, &after, level))
            .collect();
        trace.steps.push(PhaseStep {
            step,
            l: before.l,
            r: before.r,
            u: before.u,
            maxima: before.m_list.clone(),
            transitions,
        });
        before = after;
        step += 1;
    }
    Ok(trace)
}
