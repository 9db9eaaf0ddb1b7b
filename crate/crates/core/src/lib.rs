//! Adversarial-policy laboratory for Go.
pub mod amcts;
pub mod arena;
pub mod baselines;
pub mod benson;
pub mod go;
pub mod mcts;
pub mod nnet;
pub mod victim_play;
