//! `key = value` experiment configuration.
//!
//! ```text
//! # channel: builtin `pdic`, `dic` (optionally `-uniform`) or a channel file
//! channel = pdic
//! # either an alist file ...
//! code.alist = codes/n60.alist
//! # ... or a generated (dv, dc)-regular code
//! code.n = 60
//! code.dv = 3
//! code.dc = 5
//! code.seed = 1
//! codewords.count = 3
//! codewords.weight = 30        # default: n / 2
//! codewords.seed = 7
//! snr_db = 4.0, 4.5, 5.0
//! harvest.snr_db = 4.0         # points feeding the spectrum (default: all)
//! stop.min_word_errors = 100
//! stop.max_words = 100000
//! decoder = lp                 # lp | jimpd | both
//! seed = 1
//! out_dir = results
//! jimpd.outer_iters = 50
//! jimpd.inner_bp_iters = 3
//! jimpd.stop_on_valid = true
//! lp.viterbi_shortcut = true
//! lp.adaptive = true           # cut generation; same optimum as the full LP
//! log_all_trials = false
//! batch_size = 256
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jimpd::IterSchedule;

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    Alist(PathBuf),
    Regular { n: usize, dv: usize, dc: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderSelection {
    Lp,
    Jimpd,
    Both,
}

impl DecoderSelection {
    pub fn runs_lp(self) -> bool {
        matches!(self, DecoderSelection::Lp | DecoderSelection::Both)
    }

    pub fn runs_jimpd(self) -> bool {
        matches!(self, DecoderSelection::Jimpd | DecoderSelection::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            DecoderSelection::Lp => "lp",
            DecoderSelection::Jimpd => "jimpd",
            DecoderSelection::Both => "both",
        }
    }
}

impl FromStr for DecoderSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(DecoderSelection::Lp),
            "jimpd" => Ok(DecoderSelection::Jimpd),
            "both" => Ok(DecoderSelection::Both),
            other => Err(Error::Config(format!("unknown decoder `{other}` (lp, jimpd, both)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub channel: String,
    pub code: CodeSource,
    pub num_codewords: usize,
    pub codeword_weight: Option<usize>,
    pub codeword_seed: u64,
    pub snr_db: Vec<f64>,
    pub harvest_snr_db: Vec<f64>,
    pub min_word_errors: u64,
    pub max_words: u64,
    pub decoder: DecoderSelection,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub schedule: IterSchedule,
    pub viterbi_shortcut: bool,
    pub adaptive_lp: bool,
    pub log_all_trials: bool,
    pub batch_size: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            channel: "pdic".into(),
            code: CodeSource::Regular { n: 60, dv: 3, dc: 5, seed: 1 },
            num_codewords: 3,
            codeword_weight: None,
            codeword_seed: 1,
            snr_db: vec![4.0],
            harvest_snr_db: Vec::new(),
            min_word_errors: 100,
            max_words: 100_000,
            decoder: DecoderSelection::Lp,
            seed: 1,
            out_dir: PathBuf::from("results"),
            schedule: IterSchedule::default(),
            viterbi_shortcut: true,
            adaptive_lp: true,
            log_all_trials: false,
            batch_size: 256,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for `{key}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut alist = None;
        let (mut n, mut dv, mut dc, mut code_seed) = (None, None, None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", idx + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "channel" => cfg.channel = value.to_string(),
                "code.alist" => alist = Some(PathBuf::from(value)),
                "code.n" => n = Some(parse(key, value)?),
                "code.dv" => dv = Some(parse(key, value)?),
                "code.dc" => dc = Some(parse(key, value)?),
                "code.seed" => code_seed = Some(parse(key, value)?),
                "codewords.count" => cfg.num_codewords = parse(key, value)?,
                "codewords.weight" => cfg.codeword_weight = Some(parse(key, value)?),
                "codewords.seed" => cfg.codeword_seed = parse(key, value)?,
                "snr_db" => cfg.snr_db = parse_list(key, value)?,
                "harvest.snr_db" => cfg.harvest_snr_db = parse_list(key, value)?,
                "stop.min_word_errors" => cfg.min_word_errors = parse(key, value)?,
                "stop.max_words" => cfg.max_words = parse(key, value)?,
                "decoder" => cfg.decoder = value.parse()?,
                "seed" => cfg.seed = parse(key, value)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "jimpd.outer_iters" => cfg.schedule.outer_iters = parse(key, value)?,
                "jimpd.inner_bp_iters" => cfg.schedule.inner_bp_iters = parse(key, value)?,
                "jimpd.stop_on_valid" => cfg.schedule.stop_on_valid = parse(key, value)?,
                "lp.viterbi_shortcut" => cfg.viterbi_shortcut = parse(key, value)?,
                "lp.adaptive" => cfg.adaptive_lp = parse(key, value)?,
                "log_all_trials" => cfg.log_all_trials = parse(key, value)?,
                "batch_size" => cfg.batch_size = parse(key, value)?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        if let Some(path) = alist {
            cfg.code = CodeSource::Alist(path);
        } else if n.is_some() || dv.is_some() || dc.is_some() || code_seed.is_some() {
            let CodeSource::Regular { n: n0, dv: dv0, dc: dc0, seed: s0 } = cfg.code else {
                unreachable!("default code is generated")
            };
            cfg.code = CodeSource::Regular {
                n: n.unwrap_or(n0),
                dv: dv.unwrap_or(dv0),
                dc: dc.unwrap_or(dc0),
                seed: code_seed.unwrap_or(s0),
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        ExperimentConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_word_errors < 1 {
            return Err(Error::Config("stop.min_word_errors must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("snr_db list is empty".into()));
        }
        if self.max_words == 0 || self.batch_size == 0 || self.num_codewords == 0 {
            return Err(Error::Config("max_words, batch_size and codewords.count must be positive".into()));
        }
        if let Some(bad) = self.harvest_snr_db.iter().find(|h| !self.snr_db.contains(h)) {
            return Err(Error::Config(format!("harvest point {bad} dB is not in snr_db")));
        }
        self.schedule.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn harvests_at(&self, snr_db: f64) -> bool {
        self.harvest_snr_db.is_empty() || self.harvest_snr_db.contains(&snr_db)
    }

    /// Fully resolved configuration, written next to the results.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "channel = {}", self.channel);
        match &self.code {
            CodeSource::Alist(p) => {
                let _ = writeln!(out, "code.alist = {}", p.display());
            }
            CodeSource::Regular { n, dv, dc, seed } => {
                let _ = writeln!(out, "code.n = {n}\ncode.dv = {dv}\ncode.dc = {dc}\ncode.seed = {seed}");
            }
        }
        let _ = writeln!(out, "codewords.count = {}", self.num_codewords);
        if let Some(w) = self.codeword_weight {
            let _ = writeln!(out, "codewords.weight = {w}");
        }
        let _ = writeln!(out, "codewords.seed = {}", self.codeword_seed);
        let _ = writeln!(out, "snr_db = {}", fmt_list(&self.snr_db));
        if !self.harvest_snr_db.is_empty() {
            let _ = writeln!(out, "harvest.snr_db = {}", fmt_list(&self.harvest_snr_db));
        }
        let _ = writeln!(out, "stop.min_word_errors = {}", self.min_word_errors);
        let _ = writeln!(out, "stop.max_words = {}", self.max_words);
        let _ = writeln!(out, "decoder = {}", self.decoder.name());
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(out, "jimpd.outer_iters = {}", self.schedule.outer_iters);
        let _ = writeln!(out, "jimpd.inner_bp_iters = {}", self.schedule.inner_bp_iters);
        let _ = writeln!(out, "jimpd.stop_on_valid = {}", self.schedule.stop_on_valid);
        let _ = writeln!(out, "lp.viterbi_shortcut = {}", self.viterbi_shortcut);
        let _ = writeln!(out, "lp.adaptive = {}", self.adaptive_lp);
        let _ = writeln!(out, "log_all_trials = {}", self.log_all_trials);
        let _ = writeln!(out, "batch_size = {}", self.batch_size);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full() {
        let text = "channel = dic\ncode.n = 30\ncode.seed = 4 # comment\nsnr_db = 3, 3.5,4\n\
                    harvest.snr_db = 3\ndecoder = both\nstop.min_word_errors = 10\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.channel, "dic");
        assert_eq!(cfg.code, CodeSource::Regular { n: 30, dv: 3, dc: 5, seed: 4 });
        assert_eq!(cfg.snr_db, vec![3.0, 3.5, 4.0]);
        assert_eq!(cfg.decoder, DecoderSelection::Both);
        assert!(cfg.harvests_at(3.0) && !cfg.harvests_at(3.5));
        assert_eq!(ExperimentConfig::parse(&cfg.to_kv_string()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::parse("stop.min_word_errors = 0").is_err());
        assert!(ExperimentConfig::parse("snr_db = ").is_err());
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("decoder = viterbi").is_err());
        assert!(ExperimentConfig::parse("snr_db = 1\nharvest.snr_db = 2").is_err());
        assert!(ExperimentConfig::parse("jimpd.outer_iters = 0").is_err());
        assert!(ExperimentConfig::parse("no equals sign").is_err());
    }
}
