//! Seeded Monte-Carlo experiments, pseudo-codeword enumeration and WER
//! prediction.
//!
//! Every trial draws its noise from its own generator, seeded by hashing
//! `(master seed, codeword, SNR point, trial index)`. Trials are decoded in
//! fixed-size batches on a worker pool and then scanned in trial order, and
//! the stop rule cuts at an exact trial index. The outputs therefore depend
//! on the seeds only, never on the number of workers.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{add_noise, snr_db_to_sigma, ChannelModel};
use crate::code::{
    gen_regular_code, null_space_basis, random_codeword_fixed_weight, read_alist, ParityCheckCode,
    DEFAULT_CODEWORD_TRIALS,
};
use crate::config::{CodeSource, ExperimentConfig};
use crate::error::{Error, Result};
use crate::jimpd::{jimpd_decode, IterSchedule};
use crate::lp::{DecodeOutcome, JointDecoder, OutcomeKind};
use crate::pcw::{d_gen, sigma_p_sq, write_spectra_csv, DistanceSpectrum};
use crate::trellis::{viterbi, BranchCosts, Trellis};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "JDLP_WORKERS";

/// Largest code dimension for which all codewords are enumerated.
pub const MAX_ENUMERATION_DIMENSION: usize = 20;

/// Worker count from [`WORKERS_ENV`], defaulting to the available cores.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial; distinct coordinates give independent streams.
pub fn trial_seed(master: u64, codeword: u64, snr_index: u64, trial: u64) -> u64 {
    [codeword, snr_index, trial]
        .iter()
        .fold(splitmix64(master), |acc, &x| splitmix64(acc ^ splitmix64(x)))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Loads or generates the code named by the configuration.
pub fn load_code(source: &CodeSource) -> Result<ParityCheckCode> {
    match source {
        CodeSource::Alist(path) => read_alist(&fs::read_to_string(path)?),
        CodeSource::Regular { n, dv, dc, seed } => gen_regular_code(*n, *dv, *dc, *seed),
    }
}

/// `count` distinct seeded codewords of the given weight.
pub fn select_codewords(code: &ParityCheckCode, count: usize, weight: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
    let mut words: Vec<Vec<u8>> = Vec::with_capacity(count);
    let mut stream = 0u64;
    while words.len() < count {
        if stream >= 8 * count as u64 + 64 {
            return Err(Error::NoCodeword { weight, trials: stream });
        }
        let w = random_codeword_fixed_weight(code, weight, trial_seed(seed, stream, 0, 0), DEFAULT_CODEWORD_TRIALS)?;
        stream += 1;
        if !words.contains(&w) {
            words.push(w);
        }
    }
    Ok(words)
}

/// Every codeword of a small code, in lexicographic order.
pub fn all_codewords(code: &ParityCheckCode) -> Result<Vec<Vec<u8>>> {
    let n = code.len();
    let basis = null_space_basis(code, &(0..n).collect::<Vec<_>>());
    if basis.len() > MAX_ENUMERATION_DIMENSION {
        return Err(Error::InvalidArgument(format!(
            "code dimension {} exceeds the enumeration limit {MAX_ENUMERATION_DIMENSION}",
            basis.len()
        )));
    }
    let mut words: Vec<Vec<u8>> = (0u64..1 << basis.len())
        .map(|mask| {
            let mut w = vec![0u8; n];
            for (_, b) in basis.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1) {
                w.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
            }
            w
        })
        .collect();
    words.sort();
    words.dedup();
    Ok(words)
}

/// Exhaustive ML decision over all codewords: the codeword whose trellis
/// path has the smallest cost (ties toward the first in lexicographic order).
pub fn brute_force_ml(trellis: &Trellis, codewords: &[Vec<u8>], costs: &BranchCosts) -> Result<(Vec<u8>, f64)> {
    let mut best: Option<(Vec<u8>, f64)> = None;
    for w in codewords {
        let path = trellis
            .path_of_bits(w)
            .ok_or_else(|| Error::InvalidArgument("codeword has no trellis path".into()))?;
        let c = costs.path_cost(&path);
        if best.as_ref().map_or(true, |(_, b)| c < *b) {
            best = Some((w.clone(), c));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no codewords".into()))
}

/// Everything a simulation needs, built once from a configuration.
pub struct Setup {
    pub channel: ChannelModel,
    pub decoder: JointDecoder,
    pub codewords: Vec<Vec<u8>>,
    pub clean: Vec<Vec<f64>>,
}

impl Setup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let channel = ChannelModel::from_name_or_path(&cfg.channel)?;
        let code = load_code(&cfg.code)?;
        let weight = cfg.codeword_weight.unwrap_or(code.len() / 2);
        let codewords = select_codewords(&code, cfg.num_codewords, weight, cfg.codeword_seed)?;
        let mut setup = Setup::new(channel, code, codewords, cfg.viterbi_shortcut)?;
        setup.decoder = setup.decoder.with_adaptive(cfg.adaptive_lp);
        Ok(setup)
    }

    pub fn new(channel: ChannelModel, code: ParityCheckCode, codewords: Vec<Vec<u8>>, shortcut: bool) -> Result<Self> {
        let trellis = Trellis::build(&channel, code.len())?;
        for w in &codewords {
            if !code.is_codeword(w)? {
                return Err(Error::InvalidArgument("transmitted word is not a codeword".into()));
            }
        }
        let clean = codewords.iter().map(|w| channel.clean_output(w)).collect::<Result<_>>()?;
        let decoder = JointDecoder::new(trellis, code)?.with_viterbi_shortcut(shortcut);
        Ok(Setup { channel, decoder, codewords, clean })
    }

    pub fn trellis(&self) -> &Trellis {
        self.decoder.trellis()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TrialClass {
    Correct,
    /// The LP returned a different codeword: an ML decision error.
    MlCodewordError,
    /// The LP returned a fractional vertex.
    PcwFailure,
    /// JIMPD returned a wrong or invalid word.
    JimpdError,
}

impl TrialClass {
    pub fn name(self) -> &'static str {
        match self {
            TrialClass::Correct => "correct",
            TrialClass::MlCodewordError => "ml_codeword_error",
            TrialClass::PcwFailure => "pcw_failure",
            TrialClass::JimpdError => "jimpd_error",
        }
    }

    pub fn is_error(self) -> bool {
        self != TrialClass::Correct
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub codeword_id: usize,
    pub trial: u64,
    pub seed: u64,
    pub decoder: &'static str,
    pub class: TrialClass,
    pub objective: Option<f64>,
    pub d_gen: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WerRow {
    pub snr_db: f64,
    pub sigma: f64,
    /// `None` for the row pooling all codewords.
    pub codeword_id: Option<usize>,
    pub decoder: &'static str,
    pub trials: u64,
    pub word_errors: u64,
    pub ml_codeword_errors: u64,
    pub pcw_failures: u64,
}

impl WerRow {
    pub fn wer(&self) -> f64 {
        self.word_errors as f64 / self.trials as f64
    }

    /// 95% Wilson score interval.
    pub fn confidence_interval(&self) -> (f64, f64) {
        wilson_interval(self.word_errors, self.trials, 1.959_963_984_540_054)
    }
}

pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub wer: Vec<WerRow>,
    pub spectra: Vec<DistanceSpectrum>,
    pub trials: Vec<TrialRecord>,
}

struct TrialOutput {
    lp: Option<(TrialClass, DecodeOutcome, Option<f64>)>,
    jimpd: Option<TrialClass>,
}

fn lp_class(outcome: &DecodeOutcome, sent: &[u8]) -> TrialClass {
    match outcome.codeword() {
        Some(w) if w == sent => TrialClass::Correct,
        Some(_) => TrialClass::MlCodewordError,
        None => TrialClass::PcwFailure,
    }
}

fn error_distance(setup: &Setup, outcome: &DecodeOutcome, clean: &[f64]) -> Result<Option<f64>> {
    let sp2 = match outcome.kind {
        OutcomeKind::Codeword => 0.0,
        OutcomeKind::Pseudocodeword => sigma_p_sq(setup.trellis(), &outcome.flow, &outcome.signal)?,
    };
    match d_gen(clean, &outcome.signal, sp2) {
        Ok(d) => Ok(Some(d)),
        Err(Error::DegenerateDistance) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_trial(setup: &Setup, cfg: &ExperimentConfig, cw: usize, sigma: f64, seed: u64) -> Result<TrialOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = add_noise(&setup.clean[cw], sigma, &mut rng)?;
    let sent = &setup.codewords[cw];
    let lp = if cfg.decoder.runs_lp() {
        let outcome = setup.decoder.decode(&y, sigma)?;
        let class = lp_class(&outcome, sent);
        let dist = if class.is_error() { error_distance(setup, &outcome, &setup.clean[cw])? } else { None };
        Some((class, outcome, dist))
    } else {
        None
    };
    let jimpd = if cfg.decoder.runs_jimpd() {
        let out = jimpd_decode(setup.trellis(), setup.decoder.code(), &y, sigma, &cfg.schedule)?;
        Some(if out.valid && out.bits == *sent { TrialClass::Correct } else { TrialClass::JimpdError })
    } else {
        None
    };
    Ok(TrialOutput { lp, jimpd })
}

#[derive(Default, Clone, Copy)]
struct Tally {
    trials: u64,
    errors: u64,
    ml: u64,
    pcw: u64,
}

impl Tally {
    fn add(&mut self, class: TrialClass) {
        self.trials += 1;
        self.errors += class.is_error() as u64;
        self.ml += (class == TrialClass::MlCodewordError) as u64;
        self.pcw += (class == TrialClass::PcwFailure) as u64;
    }

    fn row(&self, snr_db: f64, sigma: f64, codeword_id: Option<usize>, decoder: &'static str) -> WerRow {
        WerRow {
            snr_db,
            sigma,
            codeword_id,
            decoder,
            trials: self.trials,
            word_errors: self.errors,
            ml_codeword_errors: self.ml,
            pcw_failures: self.pcw,
        }
    }
}

/// Runs the configured experiment on `workers` threads.
pub fn run_simulation(cfg: &ExperimentConfig, setup: &Setup, workers: usize) -> Result<SimulationResult> {
    cfg.validate()?;
    let pool = pool(workers)?;
    let mut spectra: Vec<DistanceSpectrum> = (0..setup.codewords.len())
        .map(|i| DistanceSpectrum::new(i, setup.codewords[i].clone(), setup.clean[i].clone()))
        .collect();
    let mut wer = Vec::new();
    let mut trials = Vec::new();
    for (snr_idx, &snr_db) in cfg.snr_db.iter().enumerate() {
        let sigma = snr_db_to_sigma(snr_db, &setup.channel);
        let harvest = cfg.harvests_at(snr_db);
        let (mut lp_total, mut jimpd_total) = (Tally::default(), Tally::default());
        for cw in 0..setup.codewords.len() {
            let (mut lp, mut jd) = (Tally::default(), Tally::default());
            let done = |lp: &Tally, jd: &Tally| {
                (!cfg.decoder.runs_lp() || lp.errors >= cfg.min_word_errors)
                    && (!cfg.decoder.runs_jimpd() || jd.errors >= cfg.min_word_errors)
            };
            let mut next = 0u64;
            'batches: while next < cfg.max_words && !done(&lp, &jd) {
                let end = (next + cfg.batch_size as u64).min(cfg.max_words);
                let outputs: Vec<(u64, u64, TrialOutput)> = pool.install(|| {
                    (next..end)
                        .into_par_iter()
                        .map(|t| {
                            let seed = trial_seed(cfg.seed, cw as u64, snr_idx as u64, t);
                            run_trial(setup, cfg, cw, sigma, seed).map(|o| (t, seed, o))
                        })
                        .collect::<Result<_>>()
                })?;
                for (t, seed, out) in outputs {
                    if let Some((class, outcome, dist)) = &out.lp {
                        lp.add(*class);
                        if harvest && class.is_error() {
                            spectra[cw].accumulate(setup.trellis(), outcome)?;
                        }
                        if cfg.log_all_trials || class.is_error() {
                            trials.push(TrialRecord {
                                snr_db,
                                codeword_id: cw,
                                trial: t,
                                seed,
                                decoder: "lp",
                                class: *class,
                                objective: Some(outcome.objective),
                                d_gen: *dist,
                            });
                        }
                    }
                    if let Some(class) = out.jimpd {
                        jd.add(class);
                        if cfg.log_all_trials || class.is_error() {
                            trials.push(TrialRecord {
                                snr_db,
                                codeword_id: cw,
                                trial: t,
                                seed,
                                decoder: "jimpd",
                                class,
                                objective: None,
                                d_gen: None,
                            });
                        }
                    }
                    next = t + 1;
                    if done(&lp, &jd) {
                        break 'batches;
                    }
                }
            }
            if harvest && cfg.decoder.runs_lp() {
                spectra[cw].provenance.push((snr_db, lp.trials));
            }
            for (tally, total, on, name) in [
                (&lp, &mut lp_total, cfg.decoder.runs_lp(), "lp"),
                (&jd, &mut jimpd_total, cfg.decoder.runs_jimpd(), "jimpd"),
            ] {
                if on {
                    wer.push(tally.row(snr_db, sigma, Some(cw), name));
                    total.trials += tally.trials;
                    total.errors += tally.errors;
                    total.ml += tally.ml;
                    total.pcw += tally.pcw;
                }
            }
            log::info!(
                "snr {snr_db} dB codeword {cw}: lp {}/{} jimpd {}/{}",
                lp.errors,
                lp.trials,
                jd.errors,
                jd.trials
            );
        }
        if cfg.decoder.runs_lp() {
            wer.push(lp_total.row(snr_db, sigma, None, "lp"));
        }
        if cfg.decoder.runs_jimpd() {
            wer.push(jimpd_total.row(snr_db, sigma, None, "jimpd"));
        }
    }
    Ok(SimulationResult { wer, spectra, trials })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const WER_HEADER: [&str; 11] = [
    "snr_db",
    "sigma",
    "codeword_id",
    "decoder",
    "trials",
    "word_errors",
    "wer",
    "ci_low",
    "ci_high",
    "ml_codeword_errors",
    "pcw_failures",
];

pub fn write_wer_csv<W: Write>(rows: &[WerRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WER_HEADER)?;
    for r in rows {
        let (lo, hi) = r.confidence_interval();
        w.write_record([
            r.snr_db.to_string(),
            r.sigma.to_string(),
            r.codeword_id.map(|c| c.to_string()).unwrap_or_else(|| "all".into()),
            r.decoder.to_string(),
            r.trials.to_string(),
            r.word_errors.to_string(),
            r.wer().to_string(),
            lo.to_string(),
            hi.to_string(),
            r.ml_codeword_errors.to_string(),
            r.pcw_failures.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials_csv<W: Write>(rows: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["snr_db", "codeword_id", "trial", "seed", "decoder", "outcome", "objective", "d_gen"])?;
    for r in rows {
        w.write_record([
            r.snr_db.to_string(),
            r.codeword_id.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.decoder.to_string(),
            r.class.name().to_string(),
            fmt_opt(r.objective),
            fmt_opt(r.d_gen),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `config.txt`, `wer.csv`, `trials.csv` and (for LP runs)
/// `spectrum.csv` into `dir`.
pub fn write_outputs(cfg: &ExperimentConfig, result: &SimulationResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), cfg.to_kv_string())?;
    write_wer_csv(&result.wer, fs::File::create(dir.join("wer.csv"))?)?;
    write_trials_csv(&result.trials, fs::File::create(dir.join("trials.csv"))?)?;
    if cfg.decoder.runs_lp() {
        write_spectra_csv(&result.spectra, fs::File::create(dir.join("spectrum.csv"))?)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub snr_db: f64,
    pub sigma: f64,
    /// Mean over codewords of the per-codeword truncated union bound.
    pub wer_bound: f64,
    pub per_codeword: Vec<f64>,
}

/// Truncated union-bound WER estimate at each SNR point, averaged over the
/// codewords' spectra.
pub fn predict_wer(spectra: &[DistanceSpectrum], channel: &ChannelModel, snr_db: &[f64]) -> Result<Vec<BoundRow>> {
    if spectra.is_empty() {
        return Err(Error::EmptySpectrum("no spectra given".into()));
    }
    snr_db
        .iter()
        .map(|&snr| {
            let sigma = snr_db_to_sigma(snr, channel);
            let per_codeword = spectra
                .iter()
                .map(|s| s.union_bound(sigma).map(|b| b.value))
                .collect::<Result<Vec<_>>>()?;
            let wer_bound = per_codeword.iter().sum::<f64>() / per_codeword.len() as f64;
            Ok(BoundRow { snr_db: snr, sigma, wer_bound, per_codeword })
        })
        .collect()
}

pub fn write_bound_csv<W: Write>(rows: &[BoundRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["snr_db", "wer_bound"])?;
    for r in rows {
        w.write_record([r.snr_db.to_string(), r.wer_bound.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Distinct joint-decoding pseudo-codewords (bit projections) found by
/// decoding `trials` noisy receptions of every codeword of a small code.
pub fn enumerate_pcw(
    channel: &ChannelModel,
    code: &ParityCheckCode,
    snr_db: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<Vec<f64>>> {
    let codewords = all_codewords(code)?;
    let setup = Setup::new(channel.clone(), code.clone(), codewords, false)?;
    let sigma = snr_db_to_sigma(snr_db, channel);
    let pool = pool(workers)?;
    let found: Vec<Option<(Vec<i64>, Vec<f64>)>> = pool.install(|| {
        (0..setup.codewords.len() as u64)
            .flat_map(|cw| (0..trials).map(move |t| (cw, t)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(cw, t)| {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, cw, 0, t));
                let y = add_noise(&setup.clean[cw as usize], sigma, &mut rng)?;
                let out = setup.decoder.decode(&y, sigma)?;
                Ok(match out.kind {
                    OutcomeKind::Pseudocodeword => {
                        let key = out.bits.iter().map(|b| (b * 1e6).round() as i64).collect();
                        Some((key, out.bits))
                    }
                    OutcomeKind::Codeword => None,
                })
            })
            .collect::<Result<_>>()
    })?;
    let set: BTreeMap<Vec<i64>, Vec<f64>> = found.into_iter().flatten().collect();
    Ok(set.into_values().collect())
}

/// Decodes one reception with the LP decoder and JIMPD side by side.
pub fn compare_decoders(
    setup: &Setup,
    y: &[f64],
    sigma: f64,
    schedule: &IterSchedule,
) -> Result<(DecodeOutcome, Vec<u8>)> {
    let lp = setup.decoder.decode(y, sigma)?;
    let jd = jimpd_decode(setup.trellis(), setup.decoder.code(), y, sigma, schedule)?;
    Ok((lp, jd.bits))
}

/// Viterbi (trellis-only ML sequence) decision and its cost.
pub fn viterbi_decision(trellis: &Trellis, costs: &BranchCosts) -> Result<(Vec<u8>, f64)> {
    let (path, cost) = viterbi(trellis, costs)?;
    Ok((path.iter().map(|&e| trellis.edges()[e].input).collect(), cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_dicode, StartState};

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = trial_seed(1, 0, 0, 0);
        assert_eq!(a, trial_seed(1, 0, 0, 0));
        let mut all: Vec<u64> = (0..4)
            .flat_map(|c| (0..4).flat_map(move |s| (0..64).map(move |t| trial_seed(1, c, s, t))))
            .collect();
        let len = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), len);
        assert_ne!(trial_seed(1, 0, 1, 0), trial_seed(1, 1, 0, 0));
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(10, 100, 1.96);
        assert!(lo < 0.1 && hi > 0.1 && lo > 0.04 && hi < 0.18);
        assert_eq!(wilson_interval(0, 100, 1.96).0, 0.0);
    }

    #[test]
    fn spc_enumeration() {
        let code = ParityCheckCode::single_parity_check(3).unwrap();
        assert_eq!(all_codewords(&code).unwrap().len(), 4);
        let ch = make_dicode(true, StartState::Known(0));
        let pcws = enumerate_pcw(&ch, &code, 0.0, 200, 3, 2).unwrap();
        let expected = [
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
            [0.5, 0.5, 0.0],
            [0.5, 0.5, 1.0],
            [1.0, 0.5, 0.5],
        ];
        assert_eq!(pcws.len(), expected.len(), "{pcws:?}");
        for e in expected {
            assert!(pcws.iter().any(|p| p.iter().zip(e).all(|(a, b)| (a - b).abs() < 1e-6)), "{e:?} missing");
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut cfg = ExperimentConfig::parse(
            "code.n = 20\nsnr_db = 2, 4\nstop.min_word_errors = 5\nstop.max_words = 300\n\
             decoder = both\nbatch_size = 16\ncodewords.count = 2\n",
        )
        .unwrap();
        cfg.codeword_weight = Some(10);
        let setup = Setup::from_config(&cfg).unwrap();
        let a = run_simulation(&cfg, &setup, 1).unwrap();
        let b = run_simulation(&cfg, &setup, 4).unwrap();
        assert_eq!(a, b);
    }
}
