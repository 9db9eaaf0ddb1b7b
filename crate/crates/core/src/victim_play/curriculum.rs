use std::collections::VecDeque;

/// Win rate the adversary must exceed to move on to the next victim.
pub const ADVANCE_THRESHOLD: f64 = 0.5;

/// One rung of the victim ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct CurriculumStage {
    pub victim_id: String,
    pub threshold: f64,
    /// Number of most recent games the win rate is measured over.
    pub window: usize,
}

impl CurriculumStage {
    pub fn new(victim_id: impl Into<String>, window: usize) -> CurriculumStage {
        CurriculumStage { victim_id: victim_id.into(), threshold: ADVANCE_THRESHOLD, window }
    }
}

/// Next stage index given the recent win rate: one step forward when it
/// exceeds the threshold, clamped at the final stage, never backwards.
pub fn curriculum_step(win_rate: f64, current: usize, stages: usize) -> usize {
    if win_rate > ADVANCE_THRESHOLD && current + 1 < stages {
        current + 1
    } else {
        current
    }
}

/// Rolling window of adversary results (1 win, 0.5 draw, 0 loss).
#[derive(Clone, Debug, Default)]
pub struct WinWindow {
    pub size: usize,
    results: VecDeque<f64>,
}

impl WinWindow {
    pub fn new(size: usize) -> WinWindow {
        WinWindow { size, results: VecDeque::with_capacity(size) }
    }

    pub fn push(&mut self, points: f64) {
        if self.results.len() == self.size {
            self.results.pop_front();
        }
        self.results.push_back(points);
    }

    pub fn clear(&mut self) {
        self.results.clear();
    }

    pub fn is_full(&self) -> bool {
        self.results.len() >= self.size
    }

    pub fn games(&self) -> usize {
        self.results.len()
    }

    pub fn points(&self) -> f64 {
        self.results.iter().sum()
    }

    pub fn win_rate(&self) -> f64 {
        if self.results.is_empty() {
            0.0
        } else {
            self.points() / self.results.len() as f64
        }
    }
}
