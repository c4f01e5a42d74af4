//! Strategy configuration grammar and the unified sampler dispatcher.
//!
//! Every strategy is expressible as a short spec string such as
//! `ns(e0=0.8,el=0.4,eg=0.0)` or `lsi(rg=0.25,mode=ve)`, which is what config
//! files and CSV rows carry. Parsing and rendering round-trip exactly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{CmabError, Result};
use crate::flat::{FlatPolicy, FlatSampler};
use crate::lsi::{LsiConfig, LsiGeneration, LsiSideInfo};
use crate::mlps::MlpsSampler;
use crate::naive::{GlobalPolicy, NaiveSampler, NsPhase, NsSchedule};
use crate::problem::{random_legal_arm, CmabProblem, MacroArm};
use crate::select::{most_sampled, ucb1_index};
use crate::stats::BanditView;

pub use crate::flat::FlatPolicy as Policy;

/// Parsed strategy configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    /// One-phase naive sampling with ε-greedy components.
    Ns { e0: f64, el: f64, eg: f64 },
    /// Two-phase naive sampling; the switch happens after `r * budget`
    /// iterations. Each phase is (e0, el, eg).
    Ns2 {
        r: f64,
        p1: (f64, f64, f64),
        p2: (f64, f64, f64),
    },
    /// Naive sampling with UCB1 over the global bandit.
    NsUcb { e0: f64, el: f64, c: f64 },
    /// Flat ε-greedy over the enumerated macro-arms.
    EGreedy { e: f64 },
    /// Flat UCB1 over the enumerated macro-arms.
    Ucb1 { c: f64 },
    /// UCB1 with first-play urgency. In flat form `f` is the urgency value
    /// itself; in tree search it mixes with the node evaluation as
    /// `fpu = f * eval + (1 - f)`.
    Ucb1Fpu { c: f64, f: f64 },
    /// Greedy MLPS with `restarts` random variable orders.
    Mlps { c: f64, restarts: u32 },
    /// Linear side information; budget-ahead, so it runs via `lsi_run`.
    Lsi {
        rg: f64,
        side: LsiSideInfo,
        generation: LsiGeneration,
        k: Option<usize>,
    },
    /// Uniform-random selection; recommends the last sampled arm.
    Random,
}

impl StrategySpec {
    pub fn is_lsi(&self) -> bool {
        matches!(self, StrategySpec::Lsi { .. })
    }

    pub fn lsi_config(&self) -> Option<LsiConfig> {
        match *self {
            StrategySpec::Lsi {
                rg,
                side,
                generation,
                k,
            } => Some(LsiConfig {
                generation_ratio: rg,
                side_info: side,
                generation,
                candidates: k,
            }),
            _ => None,
        }
    }

    fn naive_schedule(&self, budget: u64) -> Option<NsSchedule> {
        match *self {
            StrategySpec::Ns { e0, el, eg } => {
                Some(NsSchedule::single(NsPhase::greedy(e0, el, eg)))
            }
            StrategySpec::Ns2 { r, p1, p2 } => {
                let k = (r * budget as f64).round() as u64;
                Some(NsSchedule::two_phase(
                    k,
                    NsPhase::greedy(p1.0, p1.1, p1.2),
                    NsPhase::greedy(p2.0, p2.1, p2.2),
                ))
            }
            StrategySpec::NsUcb { e0, el, c } => Some(NsSchedule::single(NsPhase {
                explore: e0,
                local_epsilon: el,
                global: GlobalPolicy::Ucb1(c),
            })),
            _ => None,
        }
    }

    /// Iterative sampler for regret experiments. Flat specs enumerate the
    /// legal macro-arms and fail above `cap`; LSI is budget-ahead and must
    /// run through `lsi_run` instead.
    pub fn build_iterative<P: CmabProblem + ?Sized>(
        &self,
        problem: &P,
        budget: u64,
        cap: u64,
    ) -> Result<Strategy> {
        if let Some(schedule) = self.naive_schedule(budget) {
            return Ok(Strategy::Naive(NaiveSampler::for_problem(
                problem, schedule,
            )));
        }
        match *self {
            StrategySpec::EGreedy { e } => Ok(Strategy::Flat(FlatSampler::new(
                problem,
                FlatPolicy::EpsilonGreedy(e),
                cap,
            )?)),
            StrategySpec::Ucb1 { c } => Ok(Strategy::Flat(FlatSampler::new(
                problem,
                FlatPolicy::Ucb1 { c },
                cap,
            )?)),
            StrategySpec::Ucb1Fpu { c, f } => Ok(Strategy::Flat(FlatSampler::new(
                problem,
                FlatPolicy::Ucb1Fpu { c, fpu: f },
                cap,
            )?)),
            StrategySpec::Mlps { c, restarts } => {
                Ok(Strategy::Mlps(MlpsSampler::for_problem(problem, c, restarts)))
            }
            StrategySpec::Random => Ok(Strategy::Random(RandomSampler::default())),
            StrategySpec::Lsi { .. } => Err(CmabError::UnsupportedStrategy {
                strategy: self.to_string(),
                reason: "needs the whole budget up front; run it via lsi_run",
            }),
            _ => unreachable!("naive specs handled above"),
        }
    }

    /// Sampler for a search-tree node. `node_eval` is the static evaluation
    /// of the node's state, used by the dynamic first-play-urgency constant.
    pub fn build_search<P: CmabProblem + ?Sized>(
        &self,
        problem: &P,
        node_eval: f64,
        nominal_budget: u64,
    ) -> Result<Strategy> {
        if let Some(schedule) = self.naive_schedule(nominal_budget) {
            return Ok(Strategy::Naive(NaiveSampler::for_problem(
                problem, schedule,
            )));
        }
        match *self {
            // A flat ε-greedy over an un-enumerable action space reduces to
            // naive sampling with uniform local policy and greedy global.
            StrategySpec::EGreedy { e } => Ok(Strategy::Naive(NaiveSampler::for_problem(
                problem,
                NsSchedule::single(NsPhase::greedy(e, 1.0, 0.0)),
            ))),
            StrategySpec::Ucb1Fpu { c, f } => Ok(Strategy::GlobalFpu(FpuSampler::new(
                c,
                f * node_eval + (1.0 - f),
            ))),
            StrategySpec::Random => Ok(Strategy::Random(RandomSampler::default())),
            StrategySpec::Ucb1 { .. } => Err(CmabError::UnsupportedStrategy {
                strategy: self.to_string(),
                reason: "plain UCB1 needs the enumerated arm space; use ucb1fpu in search",
            }),
            StrategySpec::Lsi { .. } => Err(CmabError::UnsupportedStrategy {
                strategy: self.to_string(),
                reason: "usable only at the search root with a known budget",
            }),
            StrategySpec::Mlps { c, restarts } => {
                Ok(Strategy::Mlps(MlpsSampler::for_problem(problem, c, restarts)))
            }
            _ => unreachable!("naive specs handled above"),
        }
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Ns { e0, el, eg } => write!(
                f,
                "ns(e0={},el={},eg={})",
                fmt_f(*e0),
                fmt_f(*el),
                fmt_f(*eg)
            ),
            StrategySpec::Ns2 { r, p1, p2 } => write!(
                f,
                "ns2(r={},p1=({},{},{}),p2=({},{},{}))",
                fmt_f(*r),
                fmt_f(p1.0),
                fmt_f(p1.1),
                fmt_f(p1.2),
                fmt_f(p2.0),
                fmt_f(p2.1),
                fmt_f(p2.2)
            ),
            StrategySpec::NsUcb { e0, el, c } => write!(
                f,
                "nsucb(e0={},el={},c={})",
                fmt_f(*e0),
                fmt_f(*el),
                fmt_f(*c)
            ),
            StrategySpec::EGreedy { e } => write!(f, "egreedy(e={})", fmt_f(*e)),
            StrategySpec::Ucb1 { c } => write!(f, "ucb1(c={})", fmt_f(*c)),
            StrategySpec::Ucb1Fpu { c, f: fpu } => {
                write!(f, "ucb1fpu(c={},f={})", fmt_f(*c), fmt_f(*fpu))
            }
            StrategySpec::Mlps { c, restarts } => {
                write!(f, "mlps(c={},restarts={restarts})", fmt_f(*c))
            }
            StrategySpec::Lsi {
                rg,
                side,
                generation,
                k,
            } => {
                let mode = match (side, generation) {
                    (LsiSideInfo::NoopFill, LsiGeneration::Entropy) => "ve",
                    (LsiSideInfo::NoopFill, LsiGeneration::Union) => "vu",
                    (LsiSideInfo::RandomFill, LsiGeneration::Entropy) => "fe",
                    (LsiSideInfo::RandomFill, LsiGeneration::Union) => "fu",
                };
                write!(f, "lsi(rg={},mode={mode}", fmt_f(*rg))?;
                if let Some(k) = k {
                    write!(f, ",k={k}")?;
                }
                write!(f, ")")
            }
            StrategySpec::Random => write!(f, "random"),
        }
    }
}

/// Splits `p1=(0.8,0.4,0.0),p2=...` into top-level `key=value` pairs.
fn split_args(body: &str) -> Result<Vec<(&str, &str)>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| CmabError::BadSpec {
                    token: body.to_string(),
                    reason: "unbalanced parentheses".into(),
                })?
            }
            ',' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(CmabError::BadSpec {
            token: body.to_string(),
            reason: "unbalanced parentheses".into(),
        });
    }
    if start < body.len() {
        out.push(&body[start..]);
    }
    out.into_iter()
        .map(|pair| {
            pair.split_once('=').ok_or_else(|| CmabError::BadSpec {
                token: pair.to_string(),
                reason: "expected key=value".into(),
            })
        })
        .collect()
}

struct Args<'a> {
    name: &'a str,
    map: HashMap<&'a str, &'a str>,
}

impl<'a> Args<'a> {
    fn float(&self, key: &str) -> Result<f64> {
        let raw = self.map.get(key).ok_or_else(|| CmabError::BadSpec {
            token: format!("{}:{key}", self.name),
            reason: "missing parameter".into(),
        })?;
        f64::from_str(raw).map_err(|_| CmabError::BadSpec {
            token: (*raw).to_string(),
            reason: format!("not a number for `{key}`"),
        })
    }

    fn triple(&self, key: &str) -> Result<(f64, f64, f64)> {
        let raw = self.map.get(key).ok_or_else(|| CmabError::BadSpec {
            token: format!("{}:{key}", self.name),
            reason: "missing parameter".into(),
        })?;
        let inner = raw
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| CmabError::BadSpec {
                token: (*raw).to_string(),
                reason: format!("expected (a,b,c) for `{key}`"),
            })?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(CmabError::BadSpec {
                token: (*raw).to_string(),
                reason: format!("expected three numbers for `{key}`"),
            });
        }
        let mut vals = [0.0; 3];
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = f64::from_str(part.trim()).map_err(|_| CmabError::BadSpec {
                token: (*part).to_string(),
                reason: "not a number".into(),
            })?;
        }
        Ok((vals[0], vals[1], vals[2]))
    }
}

impl FromStr for StrategySpec {
    type Err = CmabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "random" {
            return Ok(StrategySpec::Random);
        }
        let (name, rest) = s.split_once('(').ok_or_else(|| CmabError::BadSpec {
            token: s.to_string(),
            reason: "expected name(args)".into(),
        })?;
        let body = rest.strip_suffix(')').ok_or_else(|| CmabError::BadSpec {
            token: s.to_string(),
            reason: "missing closing parenthesis".into(),
        })?;
        let pairs = split_args(body)?;
        let args = Args {
            name,
            map: pairs.iter().map(|&(k, v)| (k.trim(), v.trim())).collect(),
        };
        match name {
            "ns" => Ok(StrategySpec::Ns {
                e0: args.float("e0")?,
                el: args.float("el")?,
                eg: args.float("eg")?,
            }),
            "ns2" => Ok(StrategySpec::Ns2 {
                r: args.float("r")?,
                p1: args.triple("p1")?,
                p2: args.triple("p2")?,
            }),
            "nsucb" => Ok(StrategySpec::NsUcb {
                e0: args.float("e0")?,
                el: args.float("el")?,
                c: args.float("c")?,
            }),
            "egreedy" => Ok(StrategySpec::EGreedy {
                e: args.float("e")?,
            }),
            "ucb1" => Ok(StrategySpec::Ucb1 {
                c: args.float("c")?,
            }),
            "ucb1fpu" => Ok(StrategySpec::Ucb1Fpu {
                c: args.float("c")?,
                f: args.float("f")?,
            }),
            "mlps" => Ok(StrategySpec::Mlps {
                c: args.float("c")?,
                restarts: args.float("restarts")? as u32,
            }),
            "lsi" => {
                let mode = args.map.get("mode").copied().unwrap_or("ve");
                let (side, generation) = match mode {
                    "ve" => (LsiSideInfo::NoopFill, LsiGeneration::Entropy),
                    "vu" => (LsiSideInfo::NoopFill, LsiGeneration::Union),
                    "fe" => (LsiSideInfo::RandomFill, LsiGeneration::Entropy),
                    "fu" => (LsiSideInfo::RandomFill, LsiGeneration::Union),
                    other => {
                        return Err(CmabError::BadSpec {
                            token: other.to_string(),
                            reason: "mode must be one of ve, vu, fe, fu".into(),
                        })
                    }
                };
                let k = match args.map.get("k") {
                    Some(raw) => Some(usize::from_str(raw).map_err(|_| CmabError::BadSpec {
                        token: (*raw).to_string(),
                        reason: "not an integer for `k`".into(),
                    })?),
                    None => None,
                };
                Ok(StrategySpec::Lsi {
                    rg: args.float("rg")?,
                    side,
                    generation,
                    k,
                })
            }
            other => Err(CmabError::BadSpec {
                token: other.to_string(),
                reason: "unknown strategy".into(),
            }),
        }
    }
}

/// Uniform-random selection over legal macro-arms.
#[derive(Debug, Clone, Default)]
pub struct RandomSampler {
    last: Option<MacroArm>,
    pulls: u64,
}

impl RandomSampler {
    pub fn select<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        random_legal_arm(problem, rng)
    }

    pub fn update(&mut self, arm: &MacroArm) {
        self.last = Some(arm.clone());
        self.pulls += 1;
    }
}

/// Global bandit with a virtual "try something new" arm scored by a fixed
/// first-play-urgency value; the scalable form of UCB1-FPU when the macro-arm
/// space cannot be enumerated.
#[derive(Debug, Clone)]
pub struct FpuSampler {
    arms: Vec<MacroArm>,
    index: HashMap<MacroArm, usize>,
    view: BanditView,
    c: f64,
    fpu: f64,
}

impl FpuSampler {
    pub fn new(c: f64, fpu: f64) -> Self {
        Self {
            arms: Vec::new(),
            index: HashMap::new(),
            view: BanditView::default(),
            c,
            fpu,
        }
    }

    pub fn select<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in self.view.arms.iter().enumerate() {
            let score = ucb1_index(s.count, s.mean, self.view.total_pulls, self.c, None);
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        match best {
            Some((idx, score)) if score > self.fpu => Ok(self.arms[idx].clone()),
            Some((idx, score)) if score == self.fpu && rng.gen::<bool>() => {
                Ok(self.arms[idx].clone())
            }
            _ => random_legal_arm(problem, rng),
        }
    }

    pub fn update(&mut self, arm: &MacroArm, reward: f64) -> Result<()> {
        let idx = match self.index.get(arm) {
            Some(&idx) => idx,
            None => {
                let idx = self.arms.len();
                self.arms.push(arm.clone());
                self.index.insert(arm.clone(), idx);
                self.view.arms.push(Default::default());
                idx
            }
        };
        self.view.arms[idx].update(reward)?;
        self.view.total_pulls += 1;
        Ok(())
    }

    pub fn best<R: Rng>(&self, rng: &mut R) -> Result<MacroArm> {
        match most_sampled(&self.view, rng) {
            Some(idx) => Ok(self.arms[idx].clone()),
            None => Err(CmabError::NotInitialized),
        }
    }

    pub fn explored_arms(&self) -> usize {
        self.arms.len()
    }
}

/// Any iterative sampler behind one interface: select an arm, feed a reward
/// back, and read the current recommendation.
#[derive(Debug, Clone)]
pub enum Strategy {
    Naive(NaiveSampler),
    Flat(FlatSampler),
    Mlps(MlpsSampler),
    GlobalFpu(FpuSampler),
    Random(RandomSampler),
}

impl Strategy {
    pub fn select<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        match self {
            Strategy::Naive(s) => s.select(problem, rng),
            Strategy::Flat(s) => s.select(rng),
            Strategy::Mlps(s) => s.select(problem, rng),
            Strategy::GlobalFpu(s) => s.select(problem, rng),
            Strategy::Random(s) => s.select(problem, rng),
        }
    }

    pub fn update(&mut self, arm: &MacroArm, reward: f64) -> Result<()> {
        match self {
            Strategy::Naive(s) => s.update(arm, reward),
            Strategy::Flat(s) => s.update(arm, reward),
            Strategy::Mlps(s) => s.update(arm, reward),
            Strategy::GlobalFpu(s) => s.update(arm, reward),
            Strategy::Random(s) => {
                s.update(arm);
                Ok(())
            }
        }
    }

    /// One select-sample-update iteration against the problem's oracle.
    pub fn iterate<P: CmabProblem + ?Sized, R: Rng>(
        &mut self,
        problem: &P,
        rng: &mut R,
    ) -> Result<(MacroArm, f64)> {
        let arm = self.select(problem, rng)?;
        let reward = problem.sample(&arm, rng);
        self.update(&arm, reward)?;
        Ok((arm, reward))
    }

    pub fn recommend<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        match self {
            Strategy::Naive(s) => s.best(rng),
            Strategy::Flat(s) => s.best(rng),
            Strategy::Mlps(s) => s.recommend(problem, rng),
            Strategy::GlobalFpu(s) => s.best(rng),
            Strategy::Random(s) => s.last.clone().ok_or(CmabError::NotInitialized),
        }
    }

    /// Distinct macro-arms this strategy has sampled so far.
    pub fn explored_arms(&self) -> usize {
        match self {
            Strategy::Naive(s) => s.explored_arms(),
            Strategy::Flat(s) => s.explored_arms(),
            Strategy::Mlps(s) => s.explored_arms(),
            Strategy::GlobalFpu(s) => s.explored_arms(),
            Strategy::Random(_) => 0,
        }
    }
}
