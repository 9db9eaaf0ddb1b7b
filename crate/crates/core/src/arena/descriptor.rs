use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use super::agents::{Agent, AgentError, AdversaryAgent, ConfidentPass, Hardened, NetAgent, PassAgent, RandomAgent};
use super::fixtures::ConnectorAgent;
use super::matches::AgentFactory;
use crate::amcts::{AMctsConfig, AMctsMode, VictimHandle};
use crate::baselines::{BaselineAgent, BaselineKind};
use crate::mcts::{Evaluator, SearchConfig};
use crate::nnet::{self, Network};

/// What kind of player a descriptor names.
#[derive(Clone, Debug, PartialEq)]
pub enum AgentKind {
    Random,
    Pass,
    Baseline(BaselineKind),
    Connector,
    /// Network player: raw policy, or MCTS with `visits` playouts.
    Net { path: PathBuf, visits: Option<usize>, tau: f64, confident_pass: Option<f64> },
    /// A-MCTS adversary modelling the victim checkpoint `victim`.
    Adversary {
        path: PathBuf,
        victim: PathBuf,
        mode: AMctsMode,
        visits: usize,
        victim_visits: usize,
        victim_confident_pass: Option<f64>,
        tau: f64,
    },
}

/// A resolvable agent specification, written as
/// `kind[:path][,key=value...][,hardened]`, e.g. `edge`, `spiral,hardened`,
/// `net:victim.bin,visits=64`, `adversary:adv.bin,victim=victim.bin,mode=s`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentDescriptor {
    pub kind: AgentKind,
    pub hardened: bool,
}

fn bad(s: &str, why: impl fmt::Display) -> AgentError {
    AgentError::Other(format!("bad agent descriptor {s:?}: {why}"))
}

fn num<T: FromStr>(s: &str, key: &str, v: &str) -> Result<T, AgentError> {
    v.parse().map_err(|_| bad(s, format!("bad value for {key}")))
}

fn threshold(s: &str, key: &str, v: &str) -> Result<Option<f64>, AgentError> {
    if v == "off" || v == "none" {
        Ok(None)
    } else {
        num(s, key, v).map(Some)
    }
}

impl FromStr for AgentDescriptor {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(',').map(str::trim);
        let head = parts.next().unwrap_or("");
        let (name, arg) = match head.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (head, None),
        };
        let mut hardened = false;
        let mut opts: Vec<(&str, &str)> = Vec::new();
        for p in parts {
            if p == "hardened" {
                hardened = true;
            } else {
                opts.push(p.split_once('=').ok_or_else(|| bad(s, format!("expected key=value, got {p:?}")))?);
            }
        }
        let simple = |kind: AgentKind| -> Result<AgentKind, AgentError> {
            if arg.is_some() || !opts.is_empty() {
                return Err(bad(s, "this kind takes no arguments"));
            }
            Ok(kind)
        };
        let kind = match name {
            "random" => simple(AgentKind::Random)?,
            "pass" => simple(AgentKind::Pass)?,
            "edge" => simple(AgentKind::Baseline(BaselineKind::Edge))?,
            "spiral" => simple(AgentKind::Baseline(BaselineKind::Spiral))?,
            "mirror" => simple(AgentKind::Baseline(BaselineKind::Mirror))?,
            "connector" => simple(AgentKind::Connector)?,
            "net" => {
                let path = PathBuf::from(arg.ok_or_else(|| bad(s, "net needs a checkpoint path"))?);
                let (mut visits, mut tau, mut confident_pass) = (None, 0.0, None);
                for (k, v) in opts {
                    match k {
                        "visits" => visits = Some(num(s, k, v)?),
                        "tau" => tau = num(s, k, v)?,
                        "confident" => confident_pass = threshold(s, k, v)?,
                        _ => return Err(bad(s, format!("unknown option {k}"))),
                    }
                }
                AgentKind::Net { path, visits, tau, confident_pass }
            }
            "adversary" => {
                let path = PathBuf::from(arg.ok_or_else(|| bad(s, "adversary needs a checkpoint path"))?);
                let mut victim = None;
                let (mut mode, mut visits, mut victim_visits, mut tau) = (AMctsMode::Sample, 64, 8, 0.0);
                let mut victim_confident_pass = Some(super::agents::CONFIDENT_PASS_WIN_PROBABILITY);
                for (k, v) in opts {
                    match k {
                        "victim" => victim = Some(PathBuf::from(v)),
                        "mode" => mode = v.parse().map_err(|e: String| bad(s, e))?,
                        "visits" => visits = num(s, k, v)?,
                        "victim-visits" => victim_visits = num(s, k, v)?,
                        "victim-confident" => victim_confident_pass = threshold(s, k, v)?,
                        "tau" => tau = num(s, k, v)?,
                        _ => return Err(bad(s, format!("unknown option {k}"))),
                    }
                }
                let victim = victim.ok_or_else(|| bad(s, "adversary needs victim=<path>"))?;
                AgentKind::Adversary { path, victim, mode, visits, victim_visits, victim_confident_pass, tau }
            }
            _ => return Err(bad(s, format!("unknown agent kind {name:?}"))),
        };
        Ok(AgentDescriptor { kind, hardened })
    }
}

impl fmt::Display for AgentDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AgentKind::Random => write!(f, "random")?,
            AgentKind::Pass => write!(f, "pass")?,
            AgentKind::Baseline(BaselineKind::Edge) => write!(f, "edge")?,
            AgentKind::Baseline(BaselineKind::Spiral) => write!(f, "spiral")?,
            AgentKind::Baseline(BaselineKind::Mirror) => write!(f, "mirror")?,
            AgentKind::Connector => write!(f, "connector")?,
            AgentKind::Net { path, visits, tau, confident_pass } => {
                write!(f, "net:{}", path.display())?;
                if let Some(v) = visits {
                    write!(f, ",visits={v}")?;
                }
                if *tau != 0.0 {
                    write!(f, ",tau={tau}")?;
                }
                if let Some(t) = confident_pass {
                    write!(f, ",confident={t}")?;
                }
            }
            AgentKind::Adversary { path, victim, mode, visits, victim_visits, victim_confident_pass, tau } => {
                write!(f, "adversary:{},victim={},mode={mode},visits={visits}", path.display(), victim.display())?;
                write!(f, ",victim-visits={victim_visits}")?;
                match victim_confident_pass {
                    Some(t) => write!(f, ",victim-confident={t}")?,
                    None => write!(f, ",victim-confident=off")?,
                }
                if *tau != 0.0 {
                    write!(f, ",tau={tau}")?;
                }
            }
        }
        if self.hardened {
            write!(f, ",hardened")?;
        }
        Ok(())
    }
}

impl AgentDescriptor {
    /// Load any checkpoints once; the result builds fresh agents per game.
    pub fn resolve(&self) -> Result<ResolvedAgent, AgentError> {
        let load = |p: &PathBuf| -> Result<Arc<Network>, AgentError> { Ok(Arc::new(nnet::load(p)?)) };
        let (net, victim) = match &self.kind {
            AgentKind::Net { path, .. } => (Some(load(path)?), None),
            AgentKind::Adversary { path, victim, .. } => (Some(load(path)?), Some(load(victim)?)),
            _ => (None, None),
        };
        Ok(ResolvedAgent { descriptor: self.clone(), net, victim })
    }
}

/// A descriptor with its checkpoints loaded.
#[derive(Clone)]
pub struct ResolvedAgent {
    pub descriptor: AgentDescriptor,
    net: Option<Arc<Network>>,
    victim: Option<Arc<Network>>,
}

impl ResolvedAgent {
    pub fn network(&self) -> Option<&Arc<Network>> {
        self.net.as_ref()
    }

    pub fn agent(&self) -> Box<dyn Agent> {
        let label = |p: &PathBuf| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let base: Box<dyn Agent> = match &self.descriptor.kind {
            AgentKind::Random => Box::new(RandomAgent),
            AgentKind::Pass => Box::new(PassAgent),
            AgentKind::Baseline(k) => Box::new(BaselineAgent::new(*k)),
            AgentKind::Connector => Box::new(ConnectorAgent),
            AgentKind::Net { path, visits, tau, confident_pass } => {
                let net = self.net.clone().expect("resolved");
                // Search sees the pass behaviour through the evaluator; a
                // policy-only player applies it to its own root value.
                let evaluator: Arc<dyn Evaluator> = match (visits, confident_pass) {
                    (Some(_), Some(t)) => Arc::new(ConfidentPass { inner: net, threshold: *t }),
                    _ => net,
                };
                return Box::new(NetAgent {
                    label: label(path),
                    evaluator,
                    search: visits.map(|v| SearchConfig::default().with_playouts(v)),
                    tau: *tau,
                    confident_pass: if visits.is_none() { *confident_pass } else { None },
                    hardened: self.descriptor.hardened,
                });
            }
            AgentKind::Adversary { path, mode, visits, victim_visits, victim_confident_pass, tau, .. } => {
                let victim = self.victim.clone().expect("resolved");
                let victim_eval: Arc<dyn Evaluator> = match victim_confident_pass {
                    Some(t) => Arc::new(ConfidentPass { inner: victim, threshold: *t }),
                    None => victim,
                };
                Box::new(AdversaryAgent {
                    label: label(path),
                    evaluator: self.net.clone().expect("resolved"),
                    victim: VictimHandle::new(victim_eval),
                    config: AMctsConfig {
                        mode: *mode,
                        search: SearchConfig::default().with_playouts(*visits).with_tau(*tau),
                        victim_visits: *victim_visits,
                    },
                })
            }
        };
        if self.descriptor.hardened {
            Box::new(Hardened { inner: base })
        } else {
            base
        }
    }
}

impl AgentFactory for ResolvedAgent {
    fn build(&self) -> Result<Box<dyn Agent>, AgentError> {
        Ok(self.agent())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for s in [
            "random",
            "pass,hardened",
            "edge",
            "spiral",
            "mirror,hardened",
            "connector",
            "net:v.bin",
            "net:v.bin,visits=64,tau=1,confident=0.995,hardened",
            "adversary:a.bin,victim=v.bin,mode=S,visits=64,victim-visits=8,victim-confident=0.995",
            "adversary:a.bin,victim=v.bin,mode=R,visits=16,victim-visits=4,victim-confident=off,hardened",
        ] {
            let d: AgentDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            assert_eq!(d.to_string().parse::<AgentDescriptor>().unwrap(), d);
        }
    }

    #[test]
    fn bad_descriptors_are_rejected() {
        for s in ["", "bogus", "edge:x", "net", "net:v.bin,visits=x", "adversary:a.bin", "random,speed=3"] {
            assert!(s.parse::<AgentDescriptor>().is_err(), "{s}");
        }
    }
}
