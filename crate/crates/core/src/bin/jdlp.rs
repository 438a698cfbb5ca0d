//! Command-line front end.
//!
//! Failures exit with a nonzero code naming their category on stderr:
//! `2` usage, `3` input, `4` io, `5` solver, `6` analysis.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jdlp::channel::{sigma_to_snr_db, snr_db_to_sigma};
use jdlp::code::{gen_regular_code, read_alist, write_alist, ParityCheckCode};
use jdlp::config::ExperimentConfig;
use jdlp::jimpd::{jimpd_decode, IterSchedule};
use jdlp::pcw::read_spectra_csv;
use jdlp::sim::{enumerate_pcw, predict_wer, run_simulation, workers_from_env, write_bound_csv, write_outputs, Setup};
use jdlp::{ChannelModel, CostMode, Error, JointDecoder, Result, Trellis};

#[derive(Parser)]
#[command(name = "jdlp", version, about = "Joint LP decoding over finite-state ISI channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Lp,
    Jimpd,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Squared,
    Loglik,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a (dv, dc)-regular code without 4-cycles and write it as alist.
    GenCode {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dv: usize,
        #[arg(long, default_value_t = 5)]
        dc: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one received vector (whitespace-separated reals).
    Decode {
        /// `dic`, `pdic` (optionally `-uniform`) or a channel file.
        #[arg(long, default_value = "pdic")]
        channel: String,
        /// Parity-check matrix in alist format.
        #[arg(long, conflicts_with = "spc")]
        code: Option<PathBuf>,
        /// Use the single parity-check code of this length instead.
        #[arg(long)]
        spc: Option<usize>,
        /// File holding the received vector (stdin when omitted).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "sigma")]
        snr_db: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, value_enum, default_value_t = DecoderArg::Lp)]
        decoder: DecoderArg,
        #[arg(long, value_enum, default_value_t = CostArg::Squared)]
        cost: CostArg,
        /// Write the joint LP in CPLEX LP format.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Run a Monte-Carlo experiment described by a key=value config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List the joint-decoding pseudo-codewords of a small code.
    EnumeratePcw {
        #[arg(long, default_value = "pdic")]
        channel: String,
        #[arg(long, conflicts_with = "spc")]
        code: Option<PathBuf>,
        #[arg(long)]
        spc: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        snr_db: f64,
        /// Noisy receptions decoded per codeword.
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the truncated union bound from a spectrum CSV.
    Predict {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, default_value = "pdic")]
        channel: String,
        /// Comma-separated SNR points in dB.
        #[arg(long, value_delimiter = ',', required = true)]
        snr_db: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_code(code: &Option<PathBuf>, spc: Option<usize>) -> Result<ParityCheckCode> {
    match (code, spc) {
        (Some(path), _) => read_alist(&fs::read_to_string(path)?),
        (None, Some(n)) => ParityCheckCode::single_parity_check(n),
        (None, None) => Err(Error::InvalidArgument("give --code or --spc".into())),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenCode { n, dv, dc, seed, out } => {
            let code = gen_regular_code(n, dv, dc, seed)?;
            output(&out)?.write_all(write_alist(&code).as_bytes())?;
        }
        Command::Decode { channel, code, spc, input, snr_db, sigma, decoder, cost, dump_lp } => {
            let channel = ChannelModel::from_name_or_path(&channel)?;
            let code = load_code(&code, spc)?;
            let text = match input {
                Some(p) => fs::read_to_string(p)?,
                None => io::read_to_string(io::stdin())?,
            };
            let y = text
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line: 0, msg: format!("bad real `{t}`") }))
                .collect::<Result<Vec<_>>>()?;
            let sigma = match (snr_db, sigma) {
                (Some(s), _) => snr_db_to_sigma(s, &channel),
                (None, Some(s)) => s,
                (None, None) => return Err(Error::InvalidArgument("give --snr-db or --sigma".into())),
            };
            let trellis = Trellis::build(&channel, code.len())?;
            let mode = match cost {
                CostArg::Squared => CostMode::Squared,
                CostArg::Loglik => CostMode::LogLikelihood,
            };
            let dec = JointDecoder::new(trellis, code)?.with_mode(mode);
            let mut out = io::stdout().lock();
            if let Some(path) = dump_lp {
                fs::write(path, dec.problem(&dec.costs(&y, sigma)?)?.to_lp_format())?;
            }
            writeln!(out, "sigma {sigma}\nsnr_db {}", sigma_to_snr_db(sigma, &channel))?;
            match decoder {
                DecoderArg::Lp => {
                    let o = dec.decode(&y, sigma)?;
                    let kind = match o.kind {
                        jdlp::OutcomeKind::Codeword => "codeword",
                        jdlp::OutcomeKind::Pseudocodeword => "pseudocodeword",
                    };
                    writeln!(out, "outcome {kind}\nml_certificate {}", o.ml_certificate)?;
                    writeln!(out, "objective {}\nbits {}\nsignal {}", o.objective, fmt_vec(&o.bits), fmt_vec(&o.signal))?;
                }
                DecoderArg::Jimpd => {
                    let o = jimpd_decode(dec.trellis(), dec.code(), &y, sigma, &IterSchedule::default())?;
                    let bits: Vec<String> = o.bits.iter().map(|b| b.to_string()).collect();
                    writeln!(out, "outcome {}\nouter_iterations {}", if o.valid { "codeword" } else { "invalid" }, o.outer_iterations)?;
                    writeln!(out, "bits {}", bits.join(" "))?;
                }
            }
        }
        Command::Simulate { config, out_dir } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(d) = out_dir {
                cfg.out_dir = d;
            }
            let workers = workers_from_env()?;
            let setup = Setup::from_config(&cfg)?;
            let result = run_simulation(&cfg, &setup, workers)?;
            write_outputs(&cfg, &result, &cfg.out_dir)?;
            for r in result.wer.iter().filter(|r| r.codeword_id.is_none()) {
                println!("{} dB {}: {}/{} word errors (WER {:.3e})", r.snr_db, r.decoder, r.word_errors, r.trials, r.wer());
            }
        }
        Command::EnumeratePcw { channel, code, spc, snr_db, trials, seed, out } => {
            let channel = ChannelModel::from_name_or_path(&channel)?;
            let code = load_code(&code, spc)?;
            let pcws = enumerate_pcw(&channel, &code, snr_db, trials, seed, workers_from_env()?)?;
            let mut w = output(&out)?;
            for p in pcws {
                writeln!(w, "{}", fmt_vec(&p))?;
            }
        }
        Command::Predict { spectrum, channel, snr_db, out } => {
            let channel = ChannelModel::from_name_or_path(&channel)?;
            let spectra = read_spectra_csv(fs::File::open(spectrum)?)?;
            let rows = predict_wer(&spectra, &channel, &snr_db)?;
            eprintln!("note: union bound over a harvested spectrum is a truncated estimate, not a guaranteed bound");
            write_bound_csv(&rows, output(&out)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = e.category();
            eprintln!("error[{}]: {e}", cat.name());
            ExitCode::from(cat.exit_code() as u8)
        }
    }
}
