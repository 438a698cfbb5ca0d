//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Criteria 6 and 7 share one Monte-Carlo run on an n = 60 code and take on
//! the order of an hour on one core. `JDLP_ACCEPTANCE_QUICK=1` shrinks every
//! run for smoke testing; results at that scale are labelled and are not
//! evidence for the criteria.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use jdlp::channel::{add_noise, make_dicode, snr_db_to_sigma, InitialState, StartState, Transition};
use jdlp::code::{gen_regular_code, ParityCheckCode};
use jdlp::config::ExperimentConfig;
use jdlp::lp::{assemble_trellis_lp, solve_vertex};
use jdlp::pcw::{d_gen, pairwise_decide, pairwise_error_prob, sigma_p_sq, PairwiseDecision};
use jdlp::sim::{all_codewords, brute_force_ml, predict_wer, run_simulation, workers_from_env, Setup, SimulationResult};
use jdlp::trellis::{branch_costs, viterbi, CostMode};
use jdlp::{ChannelModel, EdgeFlow, JointDecoder, OutcomeKind, Trellis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy)]
struct Scale {
    quick: bool,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn pdic() -> ChannelModel {
    make_dicode(true, StartState::Known(0))
}

/// Memory-2 ISI channel with taps `h` on antipodal inputs; state holds the
/// last two inputs.
fn isi2(h: [f64; 3]) -> ChannelModel {
    let m = |b: usize| if b == 1 { 1.0 } else { -1.0 };
    let mut transitions = Vec::new();
    for s in 0..4usize {
        let (x1, x2) = (s & 1, s >> 1);
        for input in 0..2u8 {
            let x = input as usize;
            transitions.push(Transition {
                from: s,
                input,
                to: x | (x1 << 1),
                output: h[0] * m(x) + h[1] * m(x1) + h[2] * m(x2),
            });
        }
    }
    ChannelModel::new("isi2", 4, transitions, InitialState::Known(0)).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng) -> ChannelModel {
    match rng.gen_range(0..5) {
        0 => pdic(),
        1 => make_dicode(false, StartState::Known(0)),
        2 => make_dicode(true, StartState::Uniform),
        3 => make_dicode(false, StartState::Uniform),
        _ => isi2([1.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]),
    }
}


/// Random trellis path; the start state is drawn among states with nonzero
/// prior, so uniform-start channels are covered too.
fn random_path(rng: &mut ChaCha8Rng, trellis: &Trellis) -> Vec<usize> {
    let starts: Vec<usize> = trellis.edges_at(0).map(|e| trellis.edges()[e].from).collect();
    let mut state = *starts.choose(rng).unwrap();
    (0..trellis.len())
        .map(|t| {
            let e = *trellis.outgoing(t, state).choose(rng).unwrap();
            state = trellis.edges()[e].to;
            e
        })
        .collect()
}

fn path_signal(trellis: &Trellis, path: &[usize]) -> Vec<f64> {
    path.iter().map(|&e| trellis.edges()[e].output).collect()
}

// ---------------------------------------------------------------------------

fn criterion1(_: Scale) -> Verdict {
    let out = Command::new(env!("CARGO_BIN_EXE_jdlp"))
        .args(["enumerate-pcw", "--channel", "pdic", "--spc", "3", "--snr-db", "0", "--trials", "2000"])
        .output()
        .expect("jdlp binary runs");
    if !out.status.success() {
        return verdict(false, format!("enumerate-pcw failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let found: Vec<Vec<f64>> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    let expected = [[1.0, 0.5, 0.5], [0.5, 0.5, 1.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
    let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6);
    let all_expected = found.iter().all(|f| expected.iter().any(|e| close(f, e)));
    let all_found = expected.iter().all(|e| found.iter().any(|f| close(f, e)));
    verdict(
        all_expected && all_found && found.len() == 5,
        format!("{} distinct JD-SPCWs found: {:?}", found.len(), found),
    )
}

/// Random fragment of a (3,5)-regular code: about 3n/5 checks of degree
/// min(5, n), drawn at random (4-cycles allowed).
fn random_fragment(rng: &mut ChaCha8Rng) -> ParityCheckCode {
    loop {
        let n = rng.gen_range(6..=12);
        let m = ((3 * n) as f64 / 5.0).round() as usize;
        let vars: Vec<usize> = (0..n).collect();
        let checks: Vec<Vec<usize>> = (0..m)
            .map(|_| vars.choose_multiple(rng, 5.min(n)).copied().collect())
            .collect();
        if let Ok(code) = ParityCheckCode::new(n, checks) {
            return code;
        }
    }
}

fn criterion2(scale: Scale) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let ch = pdic();
    let target = scale.pick(10_000u64, 1_000);
    let per_code = 50;
    let (mut trials, mut tcw, mut agree, mut ties, mut no_cert, mut pcw) = (0u64, 0u64, 0u64, 0u64, 0u64, 0u64);
    let mut mismatches = Vec::new();
    let mut code_idx = 0;
    while trials < target {
        let code = random_fragment(&mut rng);
        let words = all_codewords(&code).unwrap();
        let trellis = Trellis::build(&ch, code.len()).unwrap();
        let dec = JointDecoder::new(trellis.clone(), code.clone())
            .unwrap()
            .with_viterbi_shortcut(false)
            .with_adaptive(code_idx % 2 == 0);
        code_idx += 1;
        for _ in 0..per_code {
            let sent = words.choose(&mut rng).unwrap();
            let sigma = snr_db_to_sigma(rng.gen_range(-2.0..8.0), &ch);
            let y = add_noise(&ch.clean_output(sent).unwrap(), sigma, &mut rng).unwrap();
            let costs = dec.costs(&y, sigma).unwrap();
            let out = dec.decode_costs(&costs).unwrap();
            trials += 1;
            if out.kind != OutcomeKind::Codeword {
                pcw += 1;
                continue;
            }
            tcw += 1;
            no_cert += (!out.ml_certificate) as u64;
            let mut path_costs: Vec<f64> = words
                .iter()
                .map(|w| costs.path_cost(&trellis.path_of_bits(w).unwrap()))
                .collect();
            path_costs.sort_by(f64::total_cmp);
            if path_costs.len() > 1 && path_costs[1] - path_costs[0] <= 1e-9 * path_costs[0].abs().max(1.0) {
                ties += 1;
                continue;
            }
            let (ml, _) = brute_force_ml(&trellis, &words, &costs).unwrap();
            if out.codeword().unwrap() == ml {
                agree += 1;
            } else if mismatches.len() < 3 {
                mismatches.push(format!("n={} y={y:?}", code.len()));
            }
        }
    }
    let compared = tcw - ties;
    verdict(
        agree == compared && no_cert == 0 && compared > 0,
        format!(
            "{trials} trials on {code_idx} codes: {tcw} codeword outputs, {pcw} pseudo-codewords, \
             {ties} oracle ties excluded, {agree}/{compared} equal the exhaustive ML codeword, \
             {no_cert} without certificate{}",
            if mismatches.is_empty() { String::new() } else { format!("; e.g. {}", mismatches.join("; ")) }
        ),
    )
}

fn criterion3(_: Scale) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..100 {
        let ch = random_channel(&mut rng);
        let n = rng.gen_range(5..=40);
        let trellis = Trellis::build(&ch, n).unwrap();
        let sent = random_path(&mut rng, &trellis);
        let sigma = rng.gen_range(0.3..1.5);
        let y = add_noise(&path_signal(&trellis, &sent), sigma, &mut rng).unwrap();
        let mode = if k % 2 == 0 { CostMode::Squared } else { CostMode::LogLikelihood };
        let costs = branch_costs(&trellis, &y, sigma, mode).unwrap();
        let (path, vcost) = viterbi(&trellis, &costs).unwrap();
        let (flow, lcost) = solve_vertex(&assemble_trellis_lp(&trellis, &costs).unwrap()).unwrap();
        let rel = (lcost - vcost).abs() / vcost.abs().max(1.0);
        worst = worst.max(rel);
        let same_path = flow.is_integral() && trellis.path_flow(&path).iter().zip(&flow.values).all(|(a, b)| (a - b).abs() < 1e-6);
        if !same_path || rel > 1e-7 {
            failures.push(format!("instance {k} ({} n={n}): integral={} rel={rel:.2e}", ch.name(), flow.is_integral()));
        }
    }
    verdict(
        failures.is_empty(),
        format!("100 instances, worst relative cost gap {worst:.2e}; {} mismatches {:?}", failures.len(), failures),
    )
}

fn criterion4(scale: Scale) -> Verdict {
    let draws = scale.pick(100_000u64, 10_000);
    // harvest pseudo-codewords: three from an n = 60 code, two from SPC(3,2)
    let mut pairs: Vec<(String, ChannelModel, JointDecoder, Vec<f64>, EdgeFlow, EdgeFlow, f64)> = Vec::new();
    let cases: [(ParityCheckCode, Vec<u8>, f64, usize); 2] = [
        {
            let code = gen_regular_code(60, 3, 5, 1).unwrap();
            let c = jdlp::sim::select_codewords(&code, 1, 30, 1).unwrap().remove(0);
            (code, c, 4.0, 3)
        },
        (ParityCheckCode::single_parity_check(3).unwrap(), vec![0, 1, 1], 0.0, 2),
    ];
    let ch = pdic();
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for (code, c, snr, want) in cases {
        let trellis = Trellis::build(&ch, code.len()).unwrap();
        let dec = JointDecoder::new(trellis.clone(), code.clone()).unwrap();
        let clean = ch.clean_output(&c).unwrap();
        let cflow = EdgeFlow::constructed(trellis.path_flow(&trellis.path_of_bits(&c).unwrap()));
        let sigma = snr_db_to_sigma(snr, &ch);
        let mut seen = BTreeSet::new();
        let mut got = 0;
        for _ in 0..20_000 {
            let y = add_noise(&clean, sigma, &mut rng).unwrap();
            let out = dec.decode(&y, sigma).unwrap();
            if out.kind != OutcomeKind::Pseudocodeword || !seen.insert(out.flow.canonical_key()) {
                continue;
            }
            let sp2 = sigma_p_sq(&trellis, &out.flow, &out.signal).unwrap();
            let Ok(d) = d_gen(&clean, &out.signal, sp2) else { continue };
            let label = format!("n={} pcw#{got} d_gen={d:.4}", code.len());
            pairs.push((label, ch.clone(), dec.clone(), clean.clone(), out.flow, cflow.clone(), d));
            got += 1;
            if got == want {
                break;
            }
        }
    }
    let mut lines = Vec::new();
    let mut pass = pairs.len() >= 3;
    for (label, _ch, dec, clean, pflow, cflow, d) in &pairs {
        for z in [2.0, 1.0] {
            // sigma chosen so that Q(d_gen / 2 sigma) = Q(z)
            let sigma = d / (2.0 * z);
            let mut wins = 0u64;
            for _ in 0..draws {
                let y = add_noise(clean, sigma, &mut rng).unwrap();
                let costs = dec.costs(&y, sigma).unwrap();
                wins += (pairwise_decide(&costs, pflow, cflow) == PairwiseDecision::PcwWins) as u64;
            }
            let q = pairwise_error_prob(*d, sigma);
            let emp = wins as f64 / draws as f64;
            let sd = (q * (1.0 - q) / draws as f64).sqrt();
            let zscore = (emp - q) / sd;
            pass &= zscore.abs() <= 3.0;
            lines.push(format!("{label} sigma={sigma:.3}: emp={emp:.5} Q={q:.5} z={zscore:+.2}"));
        }
    }
    verdict(pass, format!("{} pairs x 2 sigma x {draws} draws: {}", pairs.len(), lines.join("; ")))
}

fn criterion5(_: Scale) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let (mut min_sp2, mut integral, mut worst_integral, mut worst_dgen) = (f64::INFINITY, 0, 0.0f64, 0.0f64);
    let mut violations = 0;
    for _ in 0..10_000 {
        let ch = random_channel(&mut rng);
        let n = rng.gen_range(3..=30);
        let trellis = Trellis::build(&ch, n).unwrap();
        let k = rng.gen_range(1..=5);
        let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut g = vec![0.0; trellis.num_edges()];
        for w in &weights {
            let path = random_path(&mut rng, &trellis);
            trellis.path_flow(&path).iter().enumerate().for_each(|(e, v)| g[e] += v * w / total);
        }
        let p = trellis.project_signal(&g).unwrap();
        let raw: f64 = trellis.edges().iter().zip(&g).map(|(e, v)| v * e.output * e.output).sum::<f64>()
            - p.iter().map(|x| x * x).sum::<f64>();
        min_sp2 = min_sp2.min(raw);
        let flow = EdgeFlow::constructed(g);
        let sp2 = match sigma_p_sq(&trellis, &flow, &p) {
            Ok(v) => v,
            Err(_) => {
                violations += 1;
                continue;
            }
        };
        if raw < -1e-9 || sp2 < 0.0 {
            violations += 1;
        }
        if flow.is_integral() {
            integral += 1;
            worst_integral = worst_integral.max(sp2.abs());
            let c = path_signal(&trellis, &random_path(&mut rng, &trellis));
            let dist = c.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dist > 1e-6 {
                let dg = d_gen(&c, &p, sp2).unwrap();
                worst_dgen = worst_dgen.max((dg - dist).abs() / dist);
            }
        }
    }
    verdict(
        violations == 0 && integral > 0 && worst_integral <= 1e-9 && worst_dgen <= 1e-9,
        format!(
            "10000 flows: min raw sigma_p^2 {min_sp2:.3e}, {violations} violations; {integral} integral flows \
             with max |sigma_p^2| {worst_integral:.1e} and max relative |d_gen - ||d||| {worst_dgen:.1e}"
        ),
    )
}

struct Study {
    harvest: SimulationResult,
    grid: SimulationResult,
    predicted: Vec<(f64, f64)>,
    harvest_note: String,
}

fn n60_study(scale: Scale) -> Result<Study, String> {
    let workers = workers_from_env().map_err(|e| e.to_string())?;
    let base = "channel = pdic\ncode.n = 60\ncode.dv = 3\ncode.dc = 5\ncode.seed = 1\n\
                codewords.count = 3\ncodewords.weight = 30\ncodewords.seed = 1\nseed = 6006\n";
    let harvest_cfg = ExperimentConfig::parse(&format!(
        "{base}snr_db = 4.25\nstop.min_word_errors = {}\nstop.max_words = 20000\ndecoder = lp\n",
        scale.pick(300, 40)
    ))
    .map_err(|e| e.to_string())?;
    let grid_cfg = ExperimentConfig::parse(&format!(
        "{base}snr_db = 5, 5.5, 6, 6.5, 7\nstop.min_word_errors = {}\nstop.max_words = {}\ndecoder = both\n",
        scale.pick(50, 10),
        scale.pick(100_000, 3_000)
    ))
    .map_err(|e| e.to_string())?;
    let setup = Setup::from_config(&harvest_cfg).map_err(|e| e.to_string())?;
    let harvest = run_simulation(&harvest_cfg, &setup, workers).map_err(|e| e.to_string())?;
    let pooled = harvest.wer.iter().find(|r| r.codeword_id.is_none()).unwrap();
    let distinct: usize = harvest.spectra.iter().map(|s| s.len()).sum();
    let repeats: u64 = harvest.spectra.iter().flat_map(|s| s.records()).map(|r| r.count - 1).sum();
    let harvest_note = format!(
        "harvest at 4.25 dB: WER {:.3e} ({}/{}), {distinct} distinct errors, {repeats} repeats",
        pooled.wer(),
        pooled.word_errors,
        pooled.trials
    );
    let grid = run_simulation(&grid_cfg, &setup, workers).map_err(|e| e.to_string())?;
    let predicted = predict_wer(&harvest.spectra, &setup.channel, &grid_cfg.snr_db)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| (r.snr_db, r.wer_bound))
        .collect();
    Ok(Study { harvest, grid, predicted, harvest_note })
}

fn pooled_wer(result: &SimulationResult, snr: f64, decoder: &str) -> (f64, u64, u64) {
    let r = result
        .wer
        .iter()
        .find(|r| r.codeword_id.is_none() && r.snr_db == snr && r.decoder == decoder)
        .unwrap();
    (r.wer(), r.word_errors, r.trials)
}

fn criterion6(study: &Result<Study, String>) -> Verdict {
    let study = match study {
        Ok(s) => s,
        Err(e) => return verdict(false, format!("study failed: {e}")),
    };
    let _ = &study.harvest;
    let mut in_range = 0;
    let mut pass = true;
    let mut lines = vec![study.harvest_note.clone()];
    for &(snr, bound) in &study.predicted {
        let (wer, errors, trials) = pooled_wer(&study.grid, snr, "lp");
        let ratio = bound / wer;
        let counted = (1e-4..=1e-2).contains(&wer) && errors > 0;
        if counted {
            in_range += 1;
            pass &= (1.0 / 3.0..=3.0).contains(&ratio);
        }
        lines.push(format!(
            "{snr} dB: simulated {wer:.3e} ({errors}/{trials}), predicted {bound:.3e}, ratio {ratio:.2e}{}",
            if counted { "" } else { " (outside [1e-4, 1e-2])" }
        ));
    }
    verdict(pass && in_range > 0, format!("{in_range} points in range; {}", lines.join("; ")))
}

fn criterion7(study: &Result<Study, String>) -> Verdict {
    let study = match study {
        Ok(s) => s,
        Err(e) => return verdict(false, format!("study failed: {e}")),
    };
    let mut in_range = 0;
    let mut pass = true;
    let mut lines = Vec::new();
    for &(snr, _) in &study.predicted {
        let (lp, le, lt) = pooled_wer(&study.grid, snr, "lp");
        let (jd, je, jt) = pooled_wer(&study.grid, snr, "jimpd");
        let counted = (1e-3..=1e-2).contains(&lp);
        if counted {
            in_range += 1;
            pass &= lp <= jd;
        }
        lines.push(format!(
            "{snr} dB: LP {lp:.3e} ({le}/{lt}) vs JIMPD {jd:.3e} ({je}/{jt}){}",
            if counted { "" } else { " (LP WER outside [1e-3, 1e-2])" }
        ));
    }
    verdict(pass && in_range >= 2, format!("{in_range} points in range; {}", lines.join("; ")))
}

fn criterion8(scale: Scale) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        format!(
            "code.n = 40\ncodewords.count = 2\nsnr_db = 3, 4.5\nharvest.snr_db = 3\nstop.min_word_errors = {}\n\
             stop.max_words = {}\ndecoder = both\nbatch_size = 64\nseed = 8008\nlog_all_trials = true\n",
            scale.pick(40, 10),
            scale.pick(3000, 500)
        ),
    )
    .unwrap();
    let mut runs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("w{workers}"));
        let o = Command::new(env!("CARGO_BIN_EXE_jdlp"))
            .args(["simulate", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()])
            .env("JDLP_WORKERS", workers)
            .output()
            .unwrap();
        if !o.status.success() {
            return verdict(false, format!("simulate failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        runs.push(out);
    }
    let mut details = Vec::new();
    let mut pass = true;
    for f in ["wer.csv", "spectrum.csv", "trials.csv", "config.txt"] {
        // config.txt echoes the output directory, which differs by design
        let read = |dir: &std::path::Path| -> Vec<u8> {
            let text = std::fs::read_to_string(dir.join(f)).unwrap();
            text.lines().filter(|l| !l.starts_with("out_dir")).collect::<Vec<_>>().join("\n").into_bytes()
        };
        let (a, b) = (read(&runs[0]), read(&runs[1]));
        pass &= a == b;
        details.push(format!("{f} {} bytes {}", a.len(), if a == b { "identical" } else { "DIFFER" }));
    }
    verdict(pass, format!("1 vs 4 workers (config.txt compared without its out_dir line): {}", details.join(", ")))
}

fn run(k: usize, name: &str, f: impl FnOnce() -> Verdict, failures: &mut usize) {
    let start = Instant::now();
    let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| verdict(false, "panicked"));
    if !v.pass {
        *failures += 1;
    }
    println!(
        "CRITERION {k} [{name}]: {} ({:.1} s) -- {}",
        if v.pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        v.detail
    );
}

fn main() {
    let scale = Scale { quick: std::env::var("JDLP_ACCEPTANCE_QUICK").is_ok_and(|v| v != "0") };
    if scale.quick {
        println!("acceptance at QUICK scale: smoke test only, not evidence for the criteria");
    }
    let mut failures = 0;
    run(1, "SPC(3,2)/pDIC pseudo-codeword set", || criterion1(scale), &mut failures);
    run(2, "ML certificate oracle equivalence", || criterion2(scale), &mut failures);
    run(3, "trellis LP = Viterbi", || criterion3(scale), &mut failures);
    run(4, "pairwise probability law", || criterion4(scale), &mut failures);
    run(5, "sigma_p^2 nonnegativity and reduction", || criterion5(scale), &mut failures);
    let start = Instant::now();
    let study = catch_unwind(AssertUnwindSafe(|| n60_study(scale))).unwrap_or_else(|_| Err("panicked".into()));
    println!("(n = 60 study for criteria 6 and 7 took {:.1} s)", start.elapsed().as_secs_f64());
    run(6, "truncated-bound self-consistency", || criterion6(&study), &mut failures);
    run(7, "LP vs JIMPD direction", || criterion7(&study), &mut failures);
    run(8, "reproducibility across worker counts", || criterion8(scale), &mut failures);
    println!("{} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
