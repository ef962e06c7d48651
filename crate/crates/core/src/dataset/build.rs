use log::warn;
use rayon::prelude::*;

use super::{Dataset, DatasetError, LabeledGraph, Split};
use crate::generator::{generate_slot, GenConfig, Slot};
use crate::oracles::{label_graph_with_budget, SolverError};

/// Attempts per slot before generation gives up.
pub const MAX_ATTEMPTS: u32 = 32;

/// A slot whose first draws exceeded the solver budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regeneration {
    pub slot: Slot,
    /// Attempt number whose graph was finally kept.
    pub kept_attempt: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub regenerated: Vec<Regeneration>,
}

/// Generates and labels every slot of `cfg`.
///
/// A graph whose coloring search exceeds `node_budget` is replaced by a fresh
/// draw from the slot's next substream; replacements are logged and listed in
/// the report. With `label = false` the records are written unlabeled.
pub fn build_dataset(
    cfg: &GenConfig,
    split: Split,
    node_budget: u64,
    label: bool,
) -> Result<(Dataset, BuildReport), DatasetError> {
    cfg.validate()?;
    if cfg.max_order > 255 {
        return Err(DatasetError::UnsupportedOrder(cfg.max_order));
    }
    let slots: Vec<Slot> = cfg.slots().collect();
    let results: Vec<(LabeledGraph, u32)> = slots
        .par_iter()
        .map(|&slot| {
            for attempt in 0..MAX_ATTEMPTS {
                let graph = generate_slot(cfg, slot, attempt)?;
                if !label {
                    return Ok((LabeledGraph::unlabeled(graph, slot.n), attempt));
                }
                match label_graph_with_budget(&graph, node_budget) {
                    Ok(labels) => return Ok((LabeledGraph::new(graph, labels, slot.n), attempt)),
                    Err(SolverError::BudgetExceeded { .. }) => {
                        warn!(
                            "slot n={} index={} attempt {attempt}: coloring budget exceeded, regenerating",
                            slot.n, slot.index
                        );
                    }
                }
            }
            Err(DatasetError::BudgetExhausted {
                n: slot.n,
                index: slot.index,
                attempts: MAX_ATTEMPTS,
            })
        })
        .collect::<Result<_, DatasetError>>()?;

    let mut report = BuildReport::default();
    let mut records = Vec::with_capacity(results.len());
    for (slot, (record, attempt)) in slots.into_iter().zip(results) {
        if attempt > 0 {
            report.regenerated.push(Regeneration {
                slot,
                kept_attempt: attempt,
            });
        }
        records.push(record);
    }
    let ds = Dataset::new(split, cfg.max_order, cfg.seed, records)?;
    Ok((ds, report))
}

/// Recomputes the labels of every record in place. Existing graphs cannot be
/// regenerated, so a budget overrun is an error naming the record.
pub fn label_dataset(ds: &mut Dataset, node_budget: u64) -> Result<(), DatasetError> {
    let labels = ds
        .records
        .par_iter()
        .enumerate()
        .map(|(index, r)| label_graph_with_budget(&r.graph, node_budget).map_err(|_| DatasetError::LabelBudget { index }))
        .collect::<Result<Vec<_>, _>>()?;
    for (r, l) in ds.records.iter_mut().zip(labels) {
        r.chromatic = l.chromatic;
        r.clique = l.clique;
    }
    Ok(())
}
