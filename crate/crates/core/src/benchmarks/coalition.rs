use alloc::vec::Vec;

use crate::distances::DistanceSet;
use crate::distributions::{aggregate_euclidean, Draws, EmpiricalSample};
use crate::tasks::{loss_gap_with, TargetLoss, TaskSpec};
use crate::{Error, Result};

/// Largest owner count a [`CoalitionTable`] accepts.
pub const MAX_TABLE_OWNERS: usize = 16;

/// Distances and loss gaps of one nonempty coalition.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionEntry {
    pub distances: DistanceSet,
    /// `L(X_P) − L(X_T)` per task, in the table's task order.
    pub loss_gaps: Vec<f64>,
}

impl CoalitionEntry {
    /// Aggregates the owners in `mask` and measures the result.
    pub fn compute(
        owners: &[Draws],
        mask: u32,
        target: &EmpiricalSample,
        tasks: &[(TaskSpec, TargetLoss)],
        bins: usize,
    ) -> Result<Self> {
        let members: Vec<&Draws> = members(mask, owners.len()).map(|i| &owners[i]).collect();
        if members.is_empty() {
            return Err(Error::Empty("coalition"));
        }
        let sample = aggregate_euclidean(&members)?;
        let distances = DistanceSet::compute(&sample, target, bins)?;
        let loss_gaps = tasks
            .iter()
            .map(|(task, tl)| loss_gap_with(&sample, target, task, tl, distances.wd).gap)
            .collect();
        Ok(CoalitionEntry { distances, loss_gaps })
    }
}

/// Owner indices set in `mask`.
pub fn members(mask: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&i| mask >> i & 1 == 1)
}

/// Every nonempty coalition of `n` owners, indexed by bitmask.
///
/// Reserve prices and virtual costs are not stored; solvers take them as
/// per-owner vectors so one table serves many price draws.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionTable {
    n: usize,
    tasks: Vec<TaskSpec>,
    // entries[mask - 1]
    entries: Vec<CoalitionEntry>,
}

impl CoalitionTable {
    /// Sequential construction; see [`CoalitionTable::from_entries`] to
    /// assemble entries computed elsewhere.
    pub fn build(owners: &[Draws], target: &EmpiricalSample, tasks: &[TaskSpec], bins: usize) -> Result<Self> {
        check_n(owners.len())?;
        let with_loss: Vec<(TaskSpec, TargetLoss)> = tasks.iter().map(|t| (*t, TargetLoss::new(target, t))).collect();
        let entries = (1..1u32 << owners.len())
            .map(|mask| CoalitionEntry::compute(owners, mask, target, &with_loss, bins))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(owners.len(), tasks.to_vec(), entries)
    }

    /// `entries[mask − 1]` must describe coalition `mask`.
    pub fn from_entries(n: usize, tasks: Vec<TaskSpec>, entries: Vec<CoalitionEntry>) -> Result<Self> {
        check_n(n)?;
        if entries.len() != (1 << n) - 1 {
            return Err(Error::SizeMismatch {
                expected: (1 << n) - 1,
                found: entries.len(),
            });
        }
        if entries.iter().any(|e| e.loss_gaps.len() != tasks.len()) {
            return Err(Error::SizeMismatch {
                expected: tasks.len(),
                found: entries
                    .iter()
                    .map(|e| e.loss_gaps.len())
                    .find(|&l| l != tasks.len())
                    .unwrap_or(0),
            });
        }
        Ok(CoalitionTable { n, tasks, entries })
    }

    pub fn n_owners(&self) -> usize {
        self.n
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    /// Index of `task` in the table, if it was measured.
    pub fn task_index(&self, task: &TaskSpec) -> Option<usize> {
        self.tasks.iter().position(|t| t == task)
    }

    /// Entry for a nonempty `mask`.
    pub fn entry(&self, mask: u32) -> &CoalitionEntry {
        assert!(mask != 0 && (mask as usize) <= self.entries.len(), "mask out of range");
        &self.entries[mask as usize - 1]
    }

    /// Nonempty masks in increasing order.
    pub fn masks(&self) -> impl Iterator<Item = u32> {
        1..=self.entries.len() as u32
    }

    pub fn full_mask(&self) -> u32 {
        self.entries.len() as u32
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty("owners"));
    }
    if n > MAX_TABLE_OWNERS {
        return Err(Error::TooManyOwners {
            what: "coalition table",
            max: MAX_TABLE_OWNERS,
            got: n,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::wasserstein1;
    use crate::distributions::DistributionSpec;
    use crate::rng::{stream, StreamId};
    use crate::tasks::TaskKind;

    #[test]
    fn table_matches_direct_aggregation() {
        let mut rng = stream(3, StreamId::new(0, 0, 0));
        let owners: Vec<Draws> = (0..3)
            .map(|i| {
                DistributionSpec::gaussian(i as f64, 1.0)
                    .unwrap()
                    .draw(500, &mut rng)
                    .unwrap()
            })
            .collect();
        let refs: Vec<&Draws> = owners.iter().collect();
        let target = aggregate_euclidean(&refs).unwrap();
        let task = TaskSpec::new(TaskKind::MedianMae).unwrap();
        let table = CoalitionTable::build(&owners, &target, &[task], 16).unwrap();
        assert_eq!(table.masks().count(), 7);
        assert_eq!(table.entry(table.full_mask()).distances.wd, 0.0);
        let pair = aggregate_euclidean(&[&owners[0], &owners[2]]).unwrap();
        assert_eq!(table.entry(0b101).distances.wd, wasserstein1(&pair, &target));
        assert!(table.entry(0b001).loss_gaps[0] <= table.entry(0b001).distances.wd + 1e-12);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            CoalitionTable::from_entries(17, Vec::new(), Vec::new()),
            Err(Error::TooManyOwners { .. })
        ));
        assert!(CoalitionTable::from_entries(2, Vec::new(), Vec::new()).is_err());
    }
}
