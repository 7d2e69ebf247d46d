use std::sync::{Condvar, Mutex};

use serde::{Deserialize, Serialize};

/// One task's completion signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub task: usize,
    pub ok: bool,
}

/// Count-down latch: the coordinator blocks in [`CompletionLatch::wait`]
/// until every launched task has called [`CompletionLatch::count_down`],
/// failed tasks included.
#[derive(Debug)]
pub struct CompletionLatch {
    initial: usize,
    state: Mutex<Vec<Completion>>,
    released: Condvar,
}

impl CompletionLatch {
    pub fn new(count: usize) -> Self {
        Self {
            initial: count,
            state: Mutex::new(Vec::with_capacity(count)),
            released: Condvar::new(),
        }
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn remaining(&self) -> usize {
        self.initial - self.state.lock().expect("latch poisoned").len()
    }

    /// Records a completion. Returns `false` if the latch was already open.
    pub fn count_down(&self, task: usize, ok: bool) -> bool {
        let mut done = self.state.lock().expect("latch poisoned");
        if done.len() >= self.initial {
            return false;
        }
        done.push(Completion { task, ok });
        if done.len() == self.initial {
            self.released.notify_all();
        }
        true
    }

    /// Blocks until the count reaches zero; returns completions in arrival
    /// order.
    pub fn wait(&self) -> Vec<Completion> {
        let mut done = self.state.lock().expect("latch poisoned");
        while done.len() < self.initial {
            done = self.released.wait(done).expect("latch poisoned");
        }
        done.clone()
    }
}
