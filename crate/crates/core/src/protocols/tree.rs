//! Exact outcome trees of the `R_β` protocol.

use serde::Serialize;

use super::cycle::{
    preparation_branches, prepared_pair, zz_pulse, Controller, CorrectionMode, CycleBranch, CycleKit, PrepOutcome, Stage, Step,
};
use super::{require_single_qubit, Applied, ProtocolError, ProtocolSetup};
use crate::exchange::r_gate;
use crate::observables::{measure_branches, BranchNode};
use crate::qstate::StateVector;

/// Deepest tree allowed; the leaf count grows as `4ⁿ` in the worst case.
pub const MAX_TREE_CYCLES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeSpec {
    pub setup: ProtocolSetup,
    /// Cycle budget, as in the driver.
    pub cycles: usize,
    pub correction: CorrectionMode,
    /// Fix the preparation readout instead of branching on it.
    pub prep: Option<PrepOutcome>,
}

impl TreeSpec {
    pub fn new(setup: ProtocolSetup, cycles: usize) -> Self {
        Self { setup, cycles, correction: CorrectionMode::Repeat, prep: None }
    }
}

/// Classification attached to every leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafSummary {
    pub applied: Applied,
    pub output_qubit: usize,
    pub cycles: usize,
    pub measurements: usize,
    pub branches: Vec<CycleBranch>,
    pub zz_corrected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTree {
    pub spec: TreeSpec,
    pub psi: StateVector,
    pub root: BranchNode<LeafSummary>,
}

#[derive(Debug, Clone)]
struct Walk {
    ctl: Controller,
    cycles: usize,
    measurements: usize,
    branches: Vec<CycleBranch>,
}

struct Builder<'a> {
    spec: &'a TreeSpec,
    kit: CycleKit,
}

impl Builder<'_> {
    fn grow(&self, node: &mut BranchNode<LeafSummary>, walk: Walk, stage: Stage) -> Result<(), ProtocolError> {
        let obs = self.kit.observable(stage, walk.ctl.data);
        for b in measure_branches(&node.state, obs)? {
            let mut child = BranchNode {
                probability: node.probability * b.record.probability,
                record: Some(b.record),
                preparation: false,
                state: b.state,
                children: Vec::new(),
                tag: None,
            };
            let mut w = walk.clone();
            w.measurements += 1;
            match stage.next(b.outcome_index) {
                Step::Continue(s) => self.grow(&mut child, w, s)?,
                Step::Finish(branch) => {
                    w.ctl = w.ctl.finish(branch);
                    w.cycles += 1;
                    w.branches.push(branch);
                    self.close_cycle(&mut child, w)?;
                }
            }
            node.children.push(child);
        }
        Ok(())
    }

    fn close_cycle(&self, node: &mut BranchNode<LeafSummary>, w: Walk) -> Result<(), ProtocolError> {
        let erred = w.ctl.applied() == Applied::RDagger;
        match self.spec.correction {
            CorrectionMode::Repeat if erred && w.cycles < self.spec.cycles => self.grow(node, w, Stage::AliceTotal),
            CorrectionMode::Zz if erred => {
                let pulse = zz_pulse(w.ctl.data)?;
                node.state = node.state.apply(&pulse.unitary(), &pulse.targets())?;
                node.tag = Some(summary(&w, Applied::from_power(w.ctl.power + 2), true));
                Ok(())
            }
            _ => {
                node.tag = Some(summary(&w, w.ctl.applied(), false));
                Ok(())
            }
        }
    }
}

fn summary(w: &Walk, applied: Applied, zz_corrected: bool) -> LeafSummary {
    LeafSummary {
        applied,
        output_qubit: w.ctl.data,
        cycles: w.cycles,
        measurements: w.measurements,
        branches: w.branches.clone(),
        zz_corrected,
    }
}

/// Enumerates every measurement history of the driver with its probability.
pub fn enumerate_protocol_tree(psi: &StateVector, spec: &TreeSpec) -> Result<ProtocolTree, ProtocolError> {
    require_single_qubit(psi)?;
    if spec.cycles == 0 || spec.cycles > MAX_TREE_CYCLES {
        return Err(ProtocolError::TreeTooDeep(spec.cycles));
    }
    if spec.correction == CorrectionMode::Zz {
        super::DriverPolicy::new(spec.cycles, spec.correction)?.check(&spec.setup)?;
    }
    let builder = Builder { spec, kit: CycleKit::new(spec.setup.axis)? };
    let walk = |outcome| Walk { ctl: Controller::fresh(outcome), cycles: 0, measurements: 0, branches: Vec::new() };

    let root = match spec.prep {
        Some(outcome) => {
            let mut root = BranchNode::root(psi.tensor(&prepared_pair(&spec.setup, outcome)?)?);
            builder.grow(&mut root, walk(outcome), Stage::AliceTotal)?;
            root
        }
        None => {
            let mut root = BranchNode::root(psi.tensor(&crate::exchange::cool_to_singlet(&spec.setup.couplings)?)?);
            for (pair, p) in preparation_branches(&spec.setup)? {
                let mut child = BranchNode {
                    probability: p,
                    record: Some(pair.record),
                    preparation: true,
                    state: psi.tensor(&pair.state)?,
                    children: Vec::new(),
                    tag: None,
                };
                builder.grow(&mut child, walk(pair.outcome), Stage::AliceTotal)?;
                root.children.push(child);
            }
            root
        }
    };
    Ok(ProtocolTree { spec: *spec, psi: psi.clone(), root })
}

/// Aggregates read off a finished tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeStats {
    pub leaf_count: usize,
    pub leaf_mass: f64,
    pub success_mass: f64,
    pub expected_cycles: f64,
    pub expected_measurements: f64,
    /// Expected cycle measurements divided by expected cycles.
    pub measurements_per_cycle: f64,
    /// Mass of the first cycle's branches (i) to (iv).
    pub first_cycle_branch_mass: [f64; 4],
    /// Probability that the run stops after exactly `k + 1` cycles.
    pub cycle_distribution: Vec<f64>,
    pub max_conservation_error: f64,
}

impl ProtocolTree {
    pub fn leaves(&self) -> Vec<(&BranchNode<LeafSummary>, &LeafSummary)> {
        self.root.leaves().into_iter().map(|n| (n, n.tag.as_ref().expect("every leaf is tagged"))).collect()
    }

    pub fn stats(&self) -> TreeStats {
        let leaves = self.leaves();
        let mut first = [0.0; 4];
        let mut dist = vec![0.0; self.spec.cycles];
        let (mut success, mut cycles, mut meas, mut mass) = (0.0, 0.0, 0.0, 0.0);
        for (node, tag) in &leaves {
            let p = node.probability;
            mass += p;
            if tag.applied.is_success() {
                success += p;
            }
            cycles += p * tag.cycles as f64;
            meas += p * tag.measurements as f64;
            first[tag.branches[0].index()] += p;
            dist[tag.cycles - 1] += p;
        }
        TreeStats {
            leaf_count: leaves.len(),
            leaf_mass: mass,
            success_mass: success,
            expected_cycles: cycles,
            expected_measurements: meas,
            measurements_per_cycle: meas / cycles,
            first_cycle_branch_mass: first,
            cycle_distribution: dist,
            max_conservation_error: self.root.max_conservation_error(),
        }
    }

    /// Smallest fidelity of any leaf output with `R^{±1}|ψ⟩` as labelled.
    pub fn min_leaf_fidelity(&self) -> Result<f64, ProtocolError> {
        let axis = self.spec.setup.axis;
        let mut min = f64::INFINITY;
        for (node, tag) in self.leaves() {
            let target = self.psi.apply(&r_gate(axis, tag.applied == Applied::RDagger), &[0])?;
            min = min.min(node.state.qubit_fidelity(tag.output_qubit, &target)?);
        }
        Ok(min)
    }

    /// Whether every leaf's measurement count equals the cycle records on its path.
    pub fn path_counts_consistent(&self) -> bool {
        self.root.leaf_paths().iter().all(|(leaf, path)| {
            let recorded = path.iter().filter(|n| n.record.is_some() && !n.preparation).count();
            let tag = leaf.tag.as_ref().expect("every leaf is tagged");
            recorded == tag.measurements && tag.branches.iter().map(|b| b.measurements()).sum::<usize>() == tag.measurements
        })
    }
}
