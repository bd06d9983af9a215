//! Time-indexed simulation records.

use serde::Serialize;

/// A state that can be written as one row of a table.
pub trait Tabular {
    fn columns(&self) -> Vec<String>;
    fn row(&self) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record<S> {
    pub step: usize,
    pub state: S,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub game: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
}

/// Sequence of states, the initial state included as step 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTrajectory<S> {
    pub records: Vec<Record<S>>,
    pub metadata: TrajectoryMeta,
}

impl<S> GameTrajectory<S> {
    pub fn new(initial: S, metadata: TrajectoryMeta) -> Self {
        Self {
            records: vec![Record {
                step: 0,
                state: initial,
            }],
            metadata,
        }
    }

    pub fn push(&mut self, state: S) {
        let step = self.records.len();
        self.records.push(Record { step, state });
    }

    /// Number of transitions recorded (records − 1).
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn last(&self) -> &S {
        &self.records.last().expect("trajectory holds the initial state").state
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        self.records.iter().map(|r| &r.state)
    }
}

impl<S: Tabular> GameTrajectory<S> {
    /// Header including the leading `step` column.
    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["step".to_string()];
        cols.extend(self.records[0].state.columns());
        cols
    }
}
