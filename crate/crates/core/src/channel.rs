//! Finite-state channels with additive white Gaussian noise.
//!
//! A channel is a list of input-labeled state transitions, each carrying the
//! noiseless output symbol emitted on that transition. Channels whose next
//! state is a deterministic function of `(state, input)` are intersymbol
//! interference channels; only for those does an integral joint-LP output
//! certify an ML codeword.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Bit to channel symbol: 0 maps to -1 and 1 maps to +1.
pub fn antipodal(bit: u8) -> f64 {
    if bit == 0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub input: u8,
    pub to: usize,
    pub output: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Known(usize),
    Prior(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    name: String,
    num_states: usize,
    transitions: Vec<Transition>,
    initial: InitialState,
}

impl ChannelModel {
    pub fn new(
        name: impl Into<String>,
        num_states: usize,
        transitions: Vec<Transition>,
        initial: InitialState,
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("channel needs at least one state".into()));
        }
        if transitions.is_empty() {
            return Err(Error::InvalidArgument("channel has no transitions".into()));
        }
        for t in &transitions {
            if t.from >= num_states || t.to >= num_states {
                return Err(Error::InvalidArgument(format!(
                    "transition {} -> {} references a state outside 0..{num_states}",
                    t.from, t.to
                )));
            }
            if t.input > 1 {
                return Err(Error::InvalidArgument(format!("input bit {} is not binary", t.input)));
            }
            if !t.output.is_finite() {
                return Err(Error::InvalidArgument("transition output must be finite".into()));
            }
        }
        match &initial {
            InitialState::Known(s) if *s >= num_states => {
                return Err(Error::InvalidArgument(format!("start state {s} out of range")));
            }
            InitialState::Prior(p) => {
                if p.len() != num_states {
                    return Err(Error::LengthMismatch { expected: num_states, found: p.len() });
                }
                if p.iter().any(|&v| !(v >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(
                        "initial state prior must be nonnegative and sum to 1".into(),
                    ));
                }
            }
            _ => {}
        }
        let mut transitions = transitions;
        transitions.sort_by(|a, b| {
            (a.from, a.input, a.to)
                .cmp(&(b.from, b.input, b.to))
                .then(a.output.total_cmp(&b.output))
        });
        Ok(ChannelModel { name: name.into(), num_states, transitions, initial })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    /// Prior probability of starting in `state`.
    pub fn initial_prob(&self, state: usize) -> f64 {
        match &self.initial {
            InitialState::Known(s) => {
                if *s == state {
                    1.0
                } else {
                    0.0
                }
            }
            InitialState::Prior(p) => p[state],
        }
    }

    /// True when every `(state, input)` pair has exactly one transition.
    pub fn is_fsisic(&self) -> bool {
        let mut groups: BTreeMap<(usize, u8), usize> = BTreeMap::new();
        for t in &self.transitions {
            *groups.entry((t.from, t.input)).or_default() += 1;
        }
        groups.len() == 2 * self.num_states && groups.values().all(|&c| c == 1)
    }

    /// Number of transitions leaving `state` on `input`.
    pub fn branching(&self, state: usize, input: u8) -> usize {
        self.transitions.iter().filter(|t| t.from == state && t.input == input).count()
    }

    /// Deterministic next state and output, if the channel is an ISI channel.
    pub fn step(&self, state: usize, input: u8) -> Option<(usize, f64)> {
        let mut it = self.transitions.iter().filter(|t| t.from == state && t.input == input);
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some((first.to, first.output))
    }

    fn start_state(&self) -> Result<usize> {
        match &self.initial {
            InitialState::Known(s) => Ok(*s),
            InitialState::Prior(p) => {
                p.iter().position(|&v| v == 1.0).ok_or_else(|| {
                    Error::InvalidArgument("noiseless output needs a known start state".into())
                })
            }
        }
    }

    /// Noiseless output path for `bits`, starting from the known start state.
    pub fn clean_output(&self, bits: &[u8]) -> Result<Vec<f64>> {
        let mut state = self.start_state()?;
        let mut out = Vec::with_capacity(bits.len());
        for &b in bits {
            let (next, a) = self.step(state, b).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "channel is not deterministic at state {state} input {b}"
                ))
            })?;
            out.push(a);
            state = next;
        }
        Ok(out)
    }

    /// Average output power under i.i.d. uniform inputs at stationarity.
    pub fn output_power(&self) -> f64 {
        let s = self.num_states;
        // lazy chain (I + P) / 2 avoids oscillation on periodic chains
        let mut step = vec![vec![0.0; s]; s];
        let mut power_from = vec![0.0; s];
        for state in 0..s {
            for input in 0..2u8 {
                let outs: Vec<&Transition> = self
                    .transitions
                    .iter()
                    .filter(|t| t.from == state && t.input == input)
                    .collect();
                if outs.is_empty() {
                    continue;
                }
                let w = 0.5 / outs.len() as f64;
                for t in outs {
                    step[state][t.to] += w;
                    power_from[state] += w * t.output * t.output;
                }
            }
        }
        for state in 0..s {
            let mass: f64 = step[state].iter().sum();
            if mass > 0.0 {
                step[state].iter_mut().for_each(|v| *v /= mass);
                power_from[state] /= mass;
            } else {
                step[state][state] = 1.0;
            }
        }
        let mut pi = vec![1.0 / s as f64; s];
        for _ in 0..10_000 {
            let mut next: Vec<f64> = pi.iter().map(|p| 0.5 * p).collect();
            for i in 0..s {
                for j in 0..s {
                    next[j] += 0.5 * pi[i] * step[i][j];
                }
            }
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= total);
            let delta: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            pi = next;
            if delta < 1e-15 {
                break;
            }
        }
        pi.iter().zip(&power_from).map(|(p, w)| p * w).sum()
    }

    /// Serializes the channel in the text format read by [`ChannelModel::parse`].
    pub fn to_spec_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name {}", self.name);
        let _ = writeln!(out, "states {}", self.num_states);
        match &self.initial {
            InitialState::Known(s) => {
                let _ = writeln!(out, "start {s}");
            }
            InitialState::Prior(p) => {
                let vals: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "start {}", vals.join(" "));
            }
        }
        for t in &self.transitions {
            let _ = writeln!(out, "transition {} {} {} {}", t.from, t.input, t.to, t.output);
        }
        out
    }

    /// Parses a channel description.
    ///
    /// ```text
    /// # comment
    /// name mychannel
    /// states 2
    /// start 0            # or `start uniform`, or one probability per state
    /// transition 0 1 1 2.0   # from input to output
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = String::from("custom");
        let mut states: Option<usize> = None;
        let mut start: Option<Vec<String>> = None;
        let mut transitions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let key = tok.next().unwrap_or_default();
            let rest: Vec<&str> = tok.collect();
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            match key {
                "name" => name = rest.join(" "),
                "states" => {
                    let v = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err("expected a state count".into()))?;
                    states = Some(v);
                }
                "start" => start = Some(rest.iter().map(|s| s.to_string()).collect()),
                "transition" => {
                    if rest.len() != 4 {
                        return Err(parse_err("transition needs `from input to output`".into()));
                    }
                    let from = rest[0].parse().map_err(|_| parse_err("bad source state".into()))?;
                    let input = rest[1].parse().map_err(|_| parse_err("bad input bit".into()))?;
                    let to = rest[2].parse().map_err(|_| parse_err("bad sink state".into()))?;
                    let output = rest[3].parse().map_err(|_| parse_err("bad output".into()))?;
                    transitions.push(Transition { from, input, to, output });
                }
                other => return Err(parse_err(format!("unknown key `{other}`"))),
            }
        }
        let num_states = states.ok_or(Error::Parse { line: 0, msg: "missing `states`".into() })?;
        let initial = match start.as_deref() {
            None => InitialState::Known(0),
            Some([u]) if u == "uniform" => {
                InitialState::Prior(vec![1.0 / num_states as f64; num_states])
            }
            Some([s]) => InitialState::Known(
                s.parse().map_err(|_| Error::Parse { line: 0, msg: "bad start state".into() })?,
            ),
            Some(probs) => InitialState::Prior(
                probs
                    .iter()
                    .map(|p| p.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse { line: 0, msg: "bad start prior".into() })?,
            ),
        };
        ChannelModel::new(name, num_states, transitions, initial)
    }

    /// Resolves a built-in name (`dic`, `pdic`, optionally suffixed with
    /// `-uniform`) or reads a channel file.
    pub fn from_name_or_path(spec: &str) -> Result<Self> {
        let (base, uniform) = match spec.strip_suffix("-uniform") {
            Some(b) => (b, true),
            None => (spec, false),
        };
        let start = if uniform { StartState::Uniform } else { StartState::Known(0) };
        match base {
            "dic" => Ok(make_dicode(false, start)),
            "pdic" => Ok(make_dicode(true, start)),
            _ => {
                let text = std::fs::read_to_string(Path::new(spec))?;
                ChannelModel::parse(&text)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartState {
    Known(usize),
    Uniform,
}

/// Dicode channel `1 - D` on antipodal symbols, with or without differential
/// precoding.
///
/// The state is the previous channel symbol bit. With precoding the channel
/// bit is `x_i XOR x_{i-1}` of the precoder, so a 0 input leaves the state and
/// emits 0.
pub fn make_dicode(precoded: bool, start: StartState) -> ChannelModel {
    let mut transitions = Vec::with_capacity(4);
    for state in 0..2u8 {
        for input in 0..2u8 {
            let symbol_bit = if precoded { input ^ state } else { input };
            transitions.push(Transition {
                from: state as usize,
                input,
                to: symbol_bit as usize,
                output: antipodal(symbol_bit) - antipodal(state),
            });
        }
    }
    let initial = match start {
        StartState::Known(s) => InitialState::Known(s.min(1)),
        StartState::Uniform => InitialState::Prior(vec![0.5, 0.5]),
    };
    let name = if precoded { "pdic" } else { "dic" };
    ChannelModel::new(name, 2, transitions, initial).expect("dicode channel is well formed")
}

/// Noise standard deviation for an SNR defined as output power over sigma^2.
pub fn snr_db_to_sigma(snr_db: f64, channel: &ChannelModel) -> f64 {
    (channel.output_power() / 10f64.powf(snr_db / 10.0)).sqrt()
}

pub fn sigma_to_snr_db(sigma: f64, channel: &ChannelModel) -> f64 {
    10.0 * (channel.output_power() / (sigma * sigma)).log10()
}

/// Sends `bits` through the channel and adds seeded Gaussian noise.
///
/// Returns `(received, clean)`.
pub fn transmit_awgn(
    channel: &ChannelModel,
    bits: &[u8],
    sigma: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let clean = channel.clean_output(bits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = add_noise(&clean, sigma, &mut rng)?;
    Ok((y, clean))
}

pub fn add_noise<R: rand::Rng>(clean: &[f64], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be finite and nonnegative, got {sigma}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(clean.iter().map(|c| c + normal.sample(rng)).collect())
}
