//! Generalized distances, pairwise error probabilities and truncated union
//! bounds over harvested pseudo-codewords.
//!
//! For a transmitted signal-space codeword `c` and a decoder output flow
//! `g` with signal projection `p`, the distance that governs the pairwise
//! error probability is
//!
//! ```text
//! d_gen^2 = (|c - p|^2 + sigma_p^2)^2 / |c - p|^2
//! sigma_p^2 = sum_e g(e) a(e)^2 - sum_i p_i^2
//! ```
//!
//! and `Pr(c -> p) = Q(d_gen / 2 sigma)`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{check_len, Error, Result};
use crate::lp::{DecodeOutcome, EdgeFlow, OutcomeKind};
use crate::trellis::{BranchCosts, Trellis};

/// Grid used to bucket distances for multiplicity counting.
pub const DISTANCE_QUANTUM: f64 = 1e-6;

pub fn sigma_p_sq(trellis: &Trellis, g: &EdgeFlow, p: &[f64]) -> Result<f64> {
    let projected = trellis.project_signal(&g.values)?;
    check_len(projected.len(), p.len())?;
    if projected.iter().zip(p).any(|(a, b)| (a - b).abs() > 1e-6) {
        return Err(Error::InvalidArgument("p is not the signal projection of g".into()));
    }
    let energy: f64 = trellis
        .edges()
        .iter()
        .zip(&g.values)
        .map(|(e, &v)| v * e.output * e.output)
        .sum();
    let value = energy - p.iter().map(|v| v * v).sum::<f64>();
    if value < -1e-9 {
        return Err(Error::InvalidArgument(format!(
            "negative sigma_p^2 = {value}; g is not a unit flow"
        )));
    }
    Ok(value.max(0.0))
}

pub fn d_gen(c_signal: &[f64], p: &[f64], sigma_p_sq: f64) -> Result<f64> {
    check_len(c_signal.len(), p.len())?;
    let d2: f64 = c_signal.iter().zip(p).map(|(c, p)| (c - p) * (c - p)).sum();
    if d2 <= 1e-12 {
        return Err(Error::DegenerateDistance);
    }
    Ok((d2 + sigma_p_sq) / d2.sqrt())
}

/// Standard normal tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn pairwise_error_prob(d_gen: f64, sigma: f64) -> f64 {
    q_function(d_gen / (2.0 * sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairwiseDecision {
    PcwWins,
    CwWins,
}

/// Which of the two flows the decoder prefers under `costs`; ties go to the
/// pseudo-codeword.
pub fn pairwise_decide(costs: &BranchCosts, g_pcw: &EdgeFlow, g_cw: &EdgeFlow) -> PairwiseDecision {
    if costs.flow_cost(&g_pcw.values) <= costs.flow_cost(&g_cw.values) {
        PairwiseDecision::PcwWins
    } else {
        PairwiseDecision::CwWins
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcwRecord {
    pub kind: OutcomeKind,
    /// Bit projection.
    pub spcw: Vec<f64>,
    /// Signal projection.
    pub sspcw: Vec<f64>,
    pub sigma_p_sq: f64,
    pub d_gen: f64,
    /// Number of distinct codewords or pseudo-codewords this record stands for.
    pub multiplicity: u64,
    /// Number of times it was observed.
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accumulated {
    New,
    Repeat,
    /// Not a decoding error; nothing recorded.
    Correct,
    /// Signal projection coincides with the codeword; logged, not recorded.
    Degenerate,
}

/// Distinct decoding errors observed for one transmitted codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpectrum {
    pub codeword_id: usize,
    pub codeword: Vec<u8>,
    pub clean: Vec<f64>,
    records: BTreeMap<Vec<i64>, PcwRecord>,
    pub degenerate_events: u64,
    pub observations: u64,
    /// `(snr_db, trials)` of the runs that fed the spectrum.
    pub provenance: Vec<(f64, u64)>,
    /// Harvested from simulation, so any bound over it is an estimate.
    pub harvested: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionBound {
    pub value: f64,
    pub truncated: bool,
}

impl DistanceSpectrum {
    pub fn new(codeword_id: usize, codeword: Vec<u8>, clean: Vec<f64>) -> Self {
        DistanceSpectrum {
            codeword_id,
            codeword,
            clean,
            records: BTreeMap::new(),
            degenerate_events: 0,
            observations: 0,
            provenance: Vec::new(),
            harvested: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> impl Iterator<Item = &PcwRecord> {
        self.records.values()
    }

    pub fn insert_record(&mut self, key: Vec<i64>, record: PcwRecord) {
        self.records.insert(key, record);
    }

    /// Records a decoding error. Flows are deduplicated on a 1e-6 grid;
    /// wrong codewords enter with `sigma_p^2 = 0`.
    pub fn accumulate(&mut self, trellis: &Trellis, outcome: &DecodeOutcome) -> Result<Accumulated> {
        if let Some(word) = outcome.codeword() {
            if word == self.codeword {
                return Ok(Accumulated::Correct);
            }
        }
        self.observations += 1;
        let key = outcome.flow.canonical_key();
        if let Some(rec) = self.records.get_mut(&key) {
            rec.count += 1;
            return Ok(Accumulated::Repeat);
        }
        let sp2 = match outcome.kind {
            OutcomeKind::Codeword => 0.0,
            OutcomeKind::Pseudocodeword => sigma_p_sq(trellis, &outcome.flow, &outcome.signal)?,
        };
        let dist = match d_gen(&self.clean, &outcome.signal, sp2) {
            Ok(d) => d,
            Err(Error::DegenerateDistance) => {
                log::warn!(
                    "codeword {}: pseudo-codeword with zero signal distance (sigma_p^2 = {sp2}) excluded",
                    self.codeword_id
                );
                self.degenerate_events += 1;
                return Ok(Accumulated::Degenerate);
            }
            Err(e) => return Err(e),
        };
        self.records.insert(
            key,
            PcwRecord {
                kind: outcome.kind,
                spcw: outcome.bits.clone(),
                sspcw: outcome.signal.clone(),
                sigma_p_sq: sp2,
                d_gen: dist,
                multiplicity: 1,
                count: 1,
            },
        );
        Ok(Accumulated::New)
    }

    /// Combines an independently accumulated spectrum of the same codeword.
    /// The result does not depend on merge order.
    pub fn merge(&mut self, other: &DistanceSpectrum) -> Result<()> {
        if other.codeword_id != self.codeword_id || other.codeword != self.codeword {
            return Err(Error::InvalidArgument("spectra of different codewords".into()));
        }
        for (key, rec) in &other.records {
            match self.records.get_mut(key) {
                Some(mine) => mine.count += rec.count,
                None => {
                    self.records.insert(key.clone(), rec.clone());
                }
            }
        }
        self.degenerate_events += other.degenerate_events;
        self.observations += other.observations;
        self.provenance.extend_from_slice(&other.provenance);
        self.provenance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.harvested |= other.harvested;
        Ok(())
    }

    /// Multiplicity per quantized distance, in increasing distance order.
    pub fn entries(&self) -> Vec<(f64, u64)> {
        let mut buckets: BTreeMap<i64, u64> = BTreeMap::new();
        for rec in self.records.values() {
            *buckets.entry((rec.d_gen / DISTANCE_QUANTUM).round() as i64).or_default() += rec.multiplicity;
        }
        buckets.into_iter().map(|(q, k)| (q as f64 * DISTANCE_QUANTUM, k)).collect()
    }

    pub fn min_distance(&self) -> Option<f64> {
        self.entries().first().map(|&(d, _)| d)
    }

    pub fn union_bound(&self, sigma: f64) -> Result<UnionBound> {
        if self.records.is_empty() {
            return Err(Error::EmptySpectrum(format!(
                "codeword {} has no recorded errors; harvest at a lower SNR first",
                self.codeword_id
            )));
        }
        let value = self
            .entries()
            .iter()
            .map(|&(d, k)| k as f64 * pairwise_error_prob(d, sigma))
            .sum();
        Ok(UnionBound { value, truncated: self.harvested })
    }
}

pub const SPECTRUM_HEADER: [&str; 5] = ["codeword_id", "d_gen", "multiplicity", "sigma_p_sq", "spcw_serialized"];

fn format_vector(v: &[f64]) -> String {
    v.iter()
        .map(|x| {
            let q = (x / 1e-6).round() * 1e-6;
            let s = format!("{q:.6}");
            let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
            if s == "-0" {
                "0".to_string()
            } else {
                s
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes spectra as CSV, one row per distinct codeword or pseudo-codeword,
/// ordered by codeword id then distance.
pub fn write_spectra_csv<W: Write>(spectra: &[DistanceSpectrum], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPECTRUM_HEADER)?;
    let mut ordered: Vec<&DistanceSpectrum> = spectra.iter().collect();
    ordered.sort_by_key(|s| s.codeword_id);
    for spec in ordered {
        let mut rows: Vec<(&Vec<i64>, &PcwRecord)> = spec.records.iter().collect();
        rows.sort_by(|a, b| a.1.d_gen.total_cmp(&b.1.d_gen).then(a.0.cmp(b.0)));
        for (_, rec) in rows {
            w.write_record([
                spec.codeword_id.to_string(),
                format!("{:.9}", rec.d_gen),
                rec.multiplicity.to_string(),
                format!("{:.9}", rec.sigma_p_sq),
                format_vector(&rec.spcw),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads spectra written by [`write_spectra_csv`]. Records are keyed by
/// their bit projection and distance since flows are not stored.
pub fn read_spectra_csv<R: Read>(input: R) -> Result<Vec<DistanceSpectrum>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut by_id: BTreeMap<usize, DistanceSpectrum> = BTreeMap::new();
    for (idx, row) in rdr.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let field = |i: usize| row.get(i).ok_or(Error::Parse { line, msg: format!("missing column {i}") });
        let bad = |what: &str| Error::Parse { line, msg: format!("bad {what}") };
        let id: usize = field(0)?.trim().parse().map_err(|_| bad("codeword_id"))?;
        let dist: f64 = field(1)?.trim().parse().map_err(|_| bad("d_gen"))?;
        let mult: u64 = field(2)?.trim().parse().map_err(|_| bad("multiplicity"))?;
        let sp2: f64 = field(3)?.trim().parse().map_err(|_| bad("sigma_p_sq"))?;
        let spcw: Vec<f64> = field(4)?
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("spcw_serialized"))?;
        if !(dist > 0.0) || mult == 0 {
            return Err(bad("distance or multiplicity"));
        }
        let spec = by_id
            .entry(id)
            .or_insert_with(|| DistanceSpectrum::new(id, Vec::new(), Vec::new()));
        let mut key: Vec<i64> = spcw.iter().map(|v| (v * 1e6).round() as i64).collect();
        key.push((dist / DISTANCE_QUANTUM).round() as i64);
        key.push(idx as i64);
        let kind = if spcw.iter().all(|&v| v == 0.0 || v == 1.0) {
            OutcomeKind::Codeword
        } else {
            OutcomeKind::Pseudocodeword
        };
        spec.records.insert(
            key,
            PcwRecord {
                kind,
                spcw,
                sspcw: Vec::new(),
                sigma_p_sq: sp2,
                d_gen: dist,
                multiplicity: mult,
                count: 1,
            },
        );
    }
    Ok(by_id.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_dicode, StartState};
    use crate::trellis::{branch_costs, CostMode};
    use proptest::prelude::*;

    fn pdic3() -> Trellis {
        Trellis::build(&make_dicode(true, StartState::Known(0)), 3).unwrap()
    }

    #[test]
    fn integral_flow_has_no_spread() {
        let tr = pdic3();
        let g = EdgeFlow::constructed(tr.path_flow(&tr.path_of_bits(&[1, 0, 1]).unwrap()));
        let p = tr.project_signal(&g.values).unwrap();
        assert_eq!(sigma_p_sq(&tr, &g, &p).unwrap(), 0.0);
    }

    #[test]
    fn half_mix_spread() {
        // outputs 0 and 2 mixed at the first step, zero elsewhere
        let tr = pdic3();
        let a = tr.path_of_bits(&[0, 0, 0]).unwrap();
        let mut g = vec![0.0; tr.num_edges()];
        g[a[0]] = 0.5;
        let up = tr.outgoing(0, 0).iter().copied().find(|&e| tr.edges()[e].input == 1).unwrap();
        g[up] = 0.5;
        // keep the rest of the flow on the zero path from both states
        g[a[1]] += 0.5;
        g[a[2]] += 0.5;
        let hold = tr.outgoing(1, 1).iter().copied().find(|&e| tr.edges()[e].input == 0).unwrap();
        g[hold] = 0.5;
        let hold2 = tr.outgoing(2, 1).iter().copied().find(|&e| tr.edges()[e].input == 0).unwrap();
        g[hold2] = 0.5;
        let g = EdgeFlow::constructed(g);
        let p = tr.project_signal(&g.values).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        assert_eq!(sigma_p_sq(&tr, &g, &p).unwrap(), 1.0);
        assert!(sigma_p_sq(&tr, &g, &[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn distance_arithmetic() {
        let d = d_gen(&[0.0, 0.0], &[1.0, 1.0], 0.0).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let d = d_gen(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert!((d * d - 4.5).abs() < 1e-12);
        assert!((d - 3.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(d_gen(&[1.0], &[1.0], 0.5), Err(Error::DegenerateDistance)));
    }

    #[test]
    fn q_values() {
        assert_eq!(pairwise_error_prob(0.0, 1.0), 0.5);
        assert!((pairwise_error_prob(2.0, 1.0) - 0.158_655_253_931_457).abs() < 1e-12);
        assert!(pairwise_error_prob(1.0, 1e-3) < 1e-100);
    }

    #[test]
    fn decide_noiseless_and_swap() {
        let tr = pdic3();
        let cw = EdgeFlow::constructed(tr.path_flow(&tr.path_of_bits(&[1, 1, 0]).unwrap()));
        let other = EdgeFlow::constructed(tr.path_flow(&tr.path_of_bits(&[0, 1, 1]).unwrap()));
        let clean = tr.project_signal(&cw.values).unwrap();
        let costs = branch_costs(&tr, &clean, 1.0, CostMode::Squared).unwrap();
        assert_eq!(pairwise_decide(&costs, &other, &cw), PairwiseDecision::CwWins);
        let y = [0.4, -0.9, 1.3];
        let costs = branch_costs(&tr, &y, 1.0, CostMode::Squared).unwrap();
        let a = pairwise_decide(&costs, &other, &cw);
        let b = pairwise_decide(&costs, &cw, &other);
        assert_ne!(a, b);
        // ties go to the pseudo-codeword
        assert_eq!(pairwise_decide(&costs, &cw, &cw), PairwiseDecision::PcwWins);
    }

    fn outcome_for(tr: &Trellis, g: Vec<f64>) -> DecodeOutcome {
        let flow = EdgeFlow::constructed(g);
        let kind = if flow.is_integral() { OutcomeKind::Codeword } else { OutcomeKind::Pseudocodeword };
        DecodeOutcome {
            kind,
            bits: tr.project_bits(&flow.values).unwrap(),
            signal: tr.project_signal(&flow.values).unwrap(),
            flow,
            objective: 0.0,
            ml_certificate: false,
        }
    }

    fn half_flow(tr: &Trellis, a: &[u8], b: &[u8]) -> Vec<f64> {
        let mut g = vec![0.0; tr.num_edges()];
        for &e in tr.path_of_bits(a).unwrap().iter().chain(&tr.path_of_bits(b).unwrap()) {
            g[e] += 0.5;
        }
        g
    }

    #[test]
    fn accumulate_dedups() {
        let tr = pdic3();
        let mut spec = DistanceSpectrum::new(0, vec![0, 0, 0], vec![0.0; 3]);
        let out = outcome_for(&tr, half_flow(&tr, &[0, 0, 0], &[1, 1, 0]));
        assert_eq!(spec.accumulate(&tr, &out).unwrap(), Accumulated::New);
        assert_eq!(spec.accumulate(&tr, &out).unwrap(), Accumulated::Repeat);
        assert_eq!(spec.len(), 1);
        assert_eq!(spec.records().next().unwrap().count, 2);
        assert_eq!(spec.entries()[0].1, 1);
        let correct = outcome_for(&tr, tr.path_flow(&tr.path_of_bits(&[0, 0, 0]).unwrap()));
        assert_eq!(spec.accumulate(&tr, &correct).unwrap(), Accumulated::Correct);
        let wrong = outcome_for(&tr, tr.path_flow(&tr.path_of_bits(&[0, 1, 1]).unwrap()));
        assert_eq!(spec.accumulate(&tr, &wrong).unwrap(), Accumulated::New);
        let rec = spec.records().find(|r| r.kind == OutcomeKind::Codeword).unwrap();
        assert_eq!(rec.sigma_p_sq, 0.0);
        assert!((rec.d_gen - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn merge_is_order_independent() {
        let tr = pdic3();
        let flows = [
            half_flow(&tr, &[0, 0, 0], &[1, 1, 0]),
            half_flow(&tr, &[0, 0, 0], &[0, 1, 1]),
            half_flow(&tr, &[0, 0, 0], &[1, 0, 1]),
        ];
        let mk = |idx: &[usize]| {
            let mut s = DistanceSpectrum::new(0, vec![0, 0, 0], vec![0.0; 3]);
            for &i in idx {
                s.accumulate(&tr, &outcome_for(&tr, flows[i].clone())).unwrap();
            }
            s
        };
        let (a, b, c) = (mk(&[0, 1]), mk(&[1, 2]), mk(&[2, 2, 0]));
        let mut ab_c = a.clone();
        ab_c.merge(&b).unwrap();
        ab_c.merge(&c).unwrap();
        let mut c_ba = c.clone();
        c_ba.merge(&b).unwrap();
        c_ba.merge(&a).unwrap();
        assert_eq!(ab_c.entries(), c_ba.entries());
        assert_eq!(ab_c.observations, c_ba.observations);
        let counts = |s: &DistanceSpectrum| s.records().map(|r| r.count).collect::<Vec<_>>();
        assert_eq!(counts(&ab_c), counts(&c_ba));
        let other = DistanceSpectrum::new(1, vec![0, 1, 1], vec![0.0; 3]);
        assert!(ab_c.merge(&other).is_err());
    }

    #[test]
    fn union_bound_single_entry() {
        let tr = pdic3();
        let mut spec = DistanceSpectrum::new(0, vec![0, 0, 0], vec![0.0; 3]);
        assert!(matches!(spec.union_bound(1.0), Err(Error::EmptySpectrum(_))));
        let wrong = outcome_for(&tr, tr.path_flow(&tr.path_of_bits(&[0, 1, 1]).unwrap()));
        spec.accumulate(&tr, &wrong).unwrap();
        let d = spec.records().next().unwrap().d_gen;
        let ub = spec.union_bound(0.7).unwrap();
        assert!((ub.value / pairwise_error_prob(d, 0.7) - 1.0).abs() < 1e-5);
        assert!(ub.truncated);
        let mut last = f64::INFINITY;
        for k in 1..20 {
            let v = spec.union_bound(1.5 / k as f64).unwrap().value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let tr = pdic3();
        let mut spec = DistanceSpectrum::new(2, vec![0, 0, 0], vec![0.0; 3]);
        spec.accumulate(&tr, &outcome_for(&tr, half_flow(&tr, &[0, 0, 0], &[1, 1, 0]))).unwrap();
        spec.accumulate(&tr, &outcome_for(&tr, tr.path_flow(&tr.path_of_bits(&[0, 1, 1]).unwrap()))).unwrap();
        let mut buf = Vec::new();
        write_spectra_csv(std::slice::from_ref(&spec), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("codeword_id,d_gen,multiplicity,sigma_p_sq,spcw_serialized\n"));
        assert!(text.contains("0.5 0.5 0"));
        let back = read_spectra_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 1);
        let a = spec.union_bound(0.8).unwrap().value;
        let b = back[0].union_bound(0.8).unwrap().value;
        assert!((a - b).abs() / a < 1e-8);
    }

    proptest! {
        #[test]
        fn generalized_distance_dominates_euclidean(
            d in proptest::collection::vec(-3.0f64..3.0, 1..8),
            sp2 in 0.0f64..5.0,
        ) {
            let zero = vec![0.0; d.len()];
            let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-5);
            let g = d_gen(&zero, &d, sp2).unwrap();
            prop_assert!(g >= norm - 1e-12);
            let lhs = g * g * norm * norm;
            let rhs = (norm * norm + sp2).powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-6 * rhs.max(1.0));
        }
    }
}
