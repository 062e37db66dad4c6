use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Work limit shared by the exponential oracles: a step counter plus an
/// optional wall-clock deadline.
#[derive(Debug, Clone)]
pub struct Budget {
    max_steps: u64,
    steps: u64,
    deadline: Option<Instant>,
    next_clock_check: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self::steps(50_000_000)
    }
}

impl Budget {
    pub fn steps(max_steps: u64) -> Self {
        Budget {
            max_steps,
            steps: 0,
            deadline: None,
            next_clock_check: 0,
        }
    }

    pub fn unlimited() -> Self {
        Self::steps(u64::MAX)
    }

    pub fn with_deadline(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn used(&self) -> u64 {
        self.steps
    }

    /// Charges `n` steps; fails once either limit is exhausted.
    pub fn charge(&mut self, n: u64, what: &str) -> Result<()> {
        self.steps = self.steps.saturating_add(n);
        if self.steps > self.max_steps {
            return Err(Error::BudgetExceeded(format!(
                "{what}: more than {} steps",
                self.max_steps
            )));
        }
        if let Some(deadline) = self.deadline {
            // the clock is read at most once per 1024 steps
            if self.steps >= self.next_clock_check {
                self.next_clock_check = self.steps + 1024;
                if Instant::now() > deadline {
                    return Err(Error::BudgetExceeded(format!("{what}: deadline passed")));
                }
            }
        }
        Ok(())
    }
}
