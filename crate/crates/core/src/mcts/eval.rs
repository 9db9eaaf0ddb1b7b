use std::sync::Arc;

use thiserror::Error;

use crate::go::{GameState, Symmetry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("evaluation failed: {0}")]
    Failed(String),
}

/// Evaluator output for one position.
///
/// `value` is in [-1, 1] from the perspective of the side to move. `policy`
/// has one entry per move index (points row-major, then pass) and is zero on
/// illegal moves.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub policy: Vec<f64>,
    pub ownership: Option<Vec<f64>>,
    pub opponent_move: Option<Vec<f64>>,
}

impl EvalResult {
    pub fn uniform(legal: &[bool], value: f64) -> EvalResult {
        let count = legal.iter().filter(|&&l| l).count().max(1);
        let policy = legal.iter().map(|&l| if l { 1.0 / count as f64 } else { 0.0 }).collect();
        EvalResult { value, policy, ownership: None, opponent_move: None }
    }
}

/// A position evaluator (policy + value). Implementations must be callable
/// concurrently from several searches.
pub trait Evaluator: Send + Sync {
    /// Evaluate `state`; `legal` is the legal-move mask of `state`.
    fn evaluate(&self, state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError>;

    /// Evaluate the `sym` image of `state` and map the outputs back onto the
    /// original coordinates.
    fn evaluate_symmetric(
        &self,
        state: &GameState,
        legal: &[bool],
        sym: Symmetry,
    ) -> Result<EvalResult, EvalError> {
        if sym == Symmetry::IDENTITY {
            return self.evaluate(state, legal);
        }
        let n = state.size();
        let image = state.transformed(sym);
        let image_legal = sym.apply_move_vector(legal, n);
        let r = self.evaluate(&image, &image_legal)?;
        let back = sym.inverse();
        Ok(EvalResult {
            value: r.value,
            policy: back.apply_move_vector(&r.policy, n),
            ownership: r.ownership.map(|o| back.apply_move_vector(&o, n)),
            opponent_move: r.opponent_move.map(|o| back.apply_move_vector(&o, n)),
        })
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Arc<E> {
    fn evaluate(&self, state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError> {
        (**self).evaluate(state, legal)
    }

    fn evaluate_symmetric(
        &self,
        state: &GameState,
        legal: &[bool],
        sym: Symmetry,
    ) -> Result<EvalResult, EvalError> {
        (**self).evaluate_symmetric(state, legal, sym)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn evaluate(&self, state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError> {
        (**self).evaluate(state, legal)
    }

    fn evaluate_symmetric(
        &self,
        state: &GameState,
        legal: &[bool],
        sym: Symmetry,
    ) -> Result<EvalResult, EvalError> {
        (**self).evaluate_symmetric(state, legal, sym)
    }
}

/// Average value and policy over the 8 board symmetries, then renormalize the
/// policy over legal moves.
pub fn evaluate_symmetry_averaged<E: Evaluator + ?Sized>(
    eval: &E,
    state: &GameState,
    legal: &[bool],
) -> Result<EvalResult, EvalError> {
    let mut acc: Option<EvalResult> = None;
    for sym in Symmetry::all() {
        let r = eval.evaluate_symmetric(state, legal, sym)?;
        match acc.as_mut() {
            None => acc = Some(r),
            Some(a) => {
                a.value += r.value;
                a.policy.iter_mut().zip(&r.policy).for_each(|(x, y)| *x += y);
                if let (Some(x), Some(y)) = (a.ownership.as_mut(), r.ownership.as_ref()) {
                    x.iter_mut().zip(y).for_each(|(x, y)| *x += y);
                }
                if let (Some(x), Some(y)) = (a.opponent_move.as_mut(), r.opponent_move.as_ref()) {
                    x.iter_mut().zip(y).for_each(|(x, y)| *x += y);
                }
            }
        }
    }
    let mut r = acc.expect("eight symmetries");
    r.value /= 8.0;
    for (p, &l) in r.policy.iter_mut().zip(legal) {
        if !l {
            *p = 0.0;
        }
    }
    normalize_over_legal(&mut r.policy, legal);
    if let Some(o) = r.ownership.as_mut() {
        o.iter_mut().for_each(|x| *x /= 8.0);
    }
    if let Some(o) = r.opponent_move.as_mut() {
        o.iter_mut().for_each(|x| *x /= 8.0);
    }
    Ok(r)
}

/// Zero illegal entries and rescale to sum 1; uniform over legal moves when
/// no legal mass remains. Returns false in the uniform-fallback case.
pub fn normalize_over_legal(policy: &mut [f64], legal: &[bool]) -> bool {
    let mut total = 0.0;
    for (p, &l) in policy.iter_mut().zip(legal) {
        if !l || !p.is_finite() || *p < 0.0 {
            *p = 0.0;
        }
        total += *p;
    }
    if total > 0.0 {
        policy.iter_mut().for_each(|p| *p /= total);
        true
    } else {
        let count = legal.iter().filter(|&&l| l).count().max(1);
        for (p, &l) in policy.iter_mut().zip(legal) {
            *p = if l { 1.0 / count as f64 } else { 0.0 };
        }
        false
    }
}

/// Uniform policy and a constant value.
#[derive(Clone, Debug, Default)]
pub struct UniformEvaluator {
    pub value: f64,
}

impl Evaluator for UniformEvaluator {
    fn evaluate(&self, _state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError> {
        Ok(EvalResult::uniform(legal, self.value))
    }
}

/// Evaluator backed by a closure; handy for scripted victims and tests.
pub struct FnEvaluator<F>(pub F);

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(&GameState, &[bool]) -> Result<EvalResult, EvalError> + Send + Sync,
{
    fn evaluate(&self, state: &GameState, legal: &[bool]) -> Result<EvalResult, EvalError> {
        (self.0)(state, legal)
    }
}
