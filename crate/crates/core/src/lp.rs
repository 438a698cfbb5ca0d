//! Trellis-only and joint LPs over edge flows.
//!
//! Variables are the trellis edges. The trellis polytope is written as a
//! unit-mass row at the first time step plus flow conservation at every
//! internal state. Parity-check rows are composed with the bit projection
//! and written directly in edge variables, so no auxiliary bit variables
//! are introduced. The bit box `0 <= f_i <= 1` is implied by unit flow per
//! time step and is not emitted.
//!
//! The joint decoder solves by adaptive cut generation by default: it starts
//! from the trellis rows alone and adds only parity rows violated by the
//! current optimum, re-solving warm after each round. At termination the
//! point satisfies every row of the full LP and is optimal for a relaxation
//! of it, so it is an optimal vertex of the full LP.

use std::fmt::Write as _;

use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};

use crate::code::{odd_subsets, LinearConstraint, ParityCheckCode, Sense, DEFAULT_DEGREE_CAP};
use crate::error::{check_len, Error, Result};
use crate::trellis::{branch_costs, viterbi, BranchCosts, CostMode, Trellis};

/// Edge values within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub equalities: Vec<LinearConstraint>,
    pub inequalities: Vec<LinearConstraint>,
}

impl LpProblem {
    /// Largest violation of any row or of the `[0, 1]` variable box.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .equalities
            .iter()
            .chain(&self.inequalities)
            .map(|r| r.violation(x))
            .fold(0.0, f64::max);
        let bounds = x.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// CPLEX LP text, for cross-checking with external solvers.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("\\ joint decoding LP over trellis edge flows\nMinimize\n obj:");
        for (i, c) in self.objective.iter().enumerate() {
            if *c != 0.0 {
                let _ = write!(out, " {} {} g{i}", sign(*c), c.abs());
            }
        }
        out.push_str("\nSubject To\n");
        for (k, row) in self.equalities.iter().enumerate() {
            write_row(&mut out, &format!("flow{k}"), row);
        }
        for (k, row) in self.inequalities.iter().enumerate() {
            write_row(&mut out, &format!("lcp{k}"), row);
        }
        out.push_str("Bounds\n");
        for i in 0..self.num_vars {
            let _ = writeln!(out, " 0 <= g{i} <= 1");
        }
        out.push_str("End\n");
        out
    }
}

fn sign(v: f64) -> char {
    if v < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn write_row(out: &mut String, name: &str, row: &LinearConstraint) {
    let _ = write!(out, " {name}:");
    for &(i, a) in &row.coefficients {
        let _ = write!(out, " {} {} g{i}", sign(a), a.abs());
    }
    let op = match row.sense {
        Sense::Le => "<=",
        Sense::Eq => "=",
    };
    let _ = writeln!(out, " {op} {}", row.bound);
}

/// Unit mass at the first time step and flow conservation at each state
/// joining consecutive time steps.
pub fn trellis_rows(trellis: &Trellis) -> Vec<LinearConstraint> {
    let mut rows = vec![LinearConstraint {
        coefficients: trellis.edges_at(0).map(|e| (e, 1.0)).collect(),
        sense: Sense::Eq,
        bound: 1.0,
    }];
    for t in 0..trellis.len() - 1 {
        for j in trellis.interface_states(t) {
            let mut coefficients: Vec<(usize, f64)> =
                trellis.incoming(t, j).iter().map(|&e| (e, 1.0)).collect();
            coefficients.extend(trellis.outgoing(t + 1, j).iter().map(|&e| (e, -1.0)));
            rows.push(LinearConstraint { coefficients, sense: Sense::Eq, bound: 0.0 });
        }
    }
    rows
}

/// Local codeword polytope rows composed with the bit projection.
pub fn code_rows(trellis: &Trellis, code: &ParityCheckCode, degree_cap: usize) -> Result<Vec<LinearConstraint>> {
    check_len(trellis.len(), code.len())?;
    let ones: Vec<Vec<usize>> = (0..trellis.len())
        .map(|t| trellis.edges_at(t).filter(|&e| trellis.edges()[e].input == 1).collect())
        .collect();
    let mut rows = Vec::new();
    for check in code.checks() {
        for (odd, even) in odd_subsets(check, degree_cap)? {
            let mut coefficients = Vec::new();
            for &i in &odd {
                coefficients.extend(ones[i].iter().map(|&e| (e, 1.0)));
            }
            for &i in &even {
                coefficients.extend(ones[i].iter().map(|&e| (e, -1.0)));
            }
            coefficients.sort_by_key(|&(e, _)| e);
            rows.push(LinearConstraint { coefficients, sense: Sense::Le, bound: odd.len() as f64 - 1.0 });
        }
    }
    Ok(rows)
}

pub fn assemble_trellis_lp(trellis: &Trellis, costs: &BranchCosts) -> Result<LpProblem> {
    check_len(trellis.num_edges(), costs.costs.len())?;
    Ok(LpProblem {
        num_vars: trellis.num_edges(),
        objective: costs.costs.clone(),
        equalities: trellis_rows(trellis),
        inequalities: Vec::new(),
    })
}

pub fn assemble_joint_lp(trellis: &Trellis, costs: &BranchCosts, code: &ParityCheckCode) -> Result<LpProblem> {
    let mut lp = assemble_trellis_lp(trellis, costs)?;
    lp.inequalities = code_rows(trellis, code, DEFAULT_DEGREE_CAP)?;
    Ok(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Basic solution returned by the simplex solver or an integral path.
    Vertex,
    /// Built by hand, for example as a mix of paths.
    Constructed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFlow {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl EdgeFlow {
    pub fn constructed(values: Vec<f64>) -> Self {
        EdgeFlow { values, provenance: Provenance::Constructed }
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|&v| v <= INTEGRALITY_TOL || v >= 1.0 - INTEGRALITY_TOL)
    }

    /// Values rounded to a 1e-6 grid, used as a deduplication key.
    pub fn canonical_key(&self) -> Vec<i64> {
        self.values.iter().map(|&v| (v * 1e6).round() as i64).collect()
    }
}

/// Solves `problem` to an optimal basic feasible solution.
///
/// Variables are boxed to `[0, 1]`. The simplex solver returns a basis, so
/// the point is a vertex of the constraint polytope.
pub fn solve_vertex(problem: &LpProblem) -> Result<(EdgeFlow, f64)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = problem.objective.iter().map(|&c| lp.add_var(c, (0.0, 1.0))).collect();
    for row in problem.equalities.iter().chain(&problem.inequalities) {
        let terms: Vec<_> = row.coefficients.iter().map(|&(i, a)| (vars[i], a)).collect();
        let op = match row.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
        };
        lp.add_constraint(terms.as_slice(), op, row.bound);
    }
    let solution = into_solution(lp.solve().map_err(solver_error)?)?;
    let values: Vec<f64> = vars.iter().map(|&v| solution.var_value_raw(v).clamp(0.0, 1.0)).collect();
    let objective = problem.objective_value(&values);
    Ok((EdgeFlow { values, provenance: Provenance::Vertex }, objective))
}

/// A row counts as violated when it exceeds its bound by more than this.
pub const CUT_TOL: f64 = 1e-9;

/// Most violated odd-set inequality of one check at the bit point `f`, as
/// `(odd, even)` index sets. At most one such inequality of a check can be
/// violated at any point.
pub fn separate_check(check: &[usize], f: &[f64]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut odd: Vec<bool> = check.iter().map(|&i| f[i] > 0.5).collect();
    if odd.iter().filter(|&&b| b).count() % 2 == 0 {
        let k = (0..check.len())
            .min_by(|&a, &b| (f[check[a]] - 0.5).abs().total_cmp(&(f[check[b]] - 0.5).abs()))?;
        odd[k] = !odd[k];
    }
    let lhs: f64 = check.iter().zip(&odd).map(|(&i, &o)| if o { f[i] } else { -f[i] }).sum();
    let size = odd.iter().filter(|&&b| b).count();
    if lhs > size as f64 - 1.0 + CUT_TOL {
        let pick = |want: bool| check.iter().zip(&odd).filter(|(_, &o)| o == want).map(|(&i, _)| i).collect();
        Some((pick(true), pick(false)))
    } else {
        None
    }
}

fn solver_error(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::Infeasible,
        other => Error::Solver(other.to_string()),
    }
}

fn into_solution(outcome: microlp::SolveOutcome) -> Result<Solution> {
    outcome.into_solution().map_err(|e| Error::Solver(format!("{e:?}")))
}

/// Solves the joint LP by adaptive cut generation (see the module docs).
fn solve_adaptive(
    trellis: &Trellis,
    code: &ParityCheckCode,
    equalities: &[LinearConstraint],
    ones: &[Vec<usize>],
    costs: &BranchCosts,
) -> Result<(EdgeFlow, f64)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = costs.costs.iter().map(|&c| lp.add_var(c, (0.0, 1.0))).collect();
    for row in equalities {
        let terms: Vec<_> = row.coefficients.iter().map(|&(i, a)| (vars[i], a)).collect();
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, row.bound);
    }
    let mut solution = into_solution(lp.solve().map_err(solver_error)?)?;
    let values = |s: &Solution| -> Vec<f64> { vars.iter().map(|&v| s.var_value_raw(v).clamp(0.0, 1.0)).collect() };
    loop {
        let g = values(&solution);
        let f = trellis.project_bits(&g)?;
        let cuts: Vec<_> = code.checks().iter().filter_map(|c| separate_check(c, &f)).collect();
        if cuts.is_empty() {
            let objective = costs.flow_cost(&g);
            return Ok((EdgeFlow { values: g, provenance: Provenance::Vertex }, objective));
        }
        for (odd, even) in cuts {
            let mut terms = Vec::new();
            for &i in &odd {
                terms.extend(ones[i].iter().map(|&e| (vars[e], 1.0)));
            }
            for &i in &even {
                terms.extend(ones[i].iter().map(|&e| (vars[e], -1.0)));
            }
            let outcome = solution
                .add_constraint(terms.as_slice(), ComparisonOp::Le, odd.len() as f64 - 1.0)
                .map_err(solver_error)?;
            solution = into_solution(outcome)?;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeKind {
    /// Integral output: a trellis-wise codeword.
    Codeword,
    /// Fractional vertex: a joint-decoding pseudo-codeword (decoder failure).
    Pseudocodeword,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub kind: OutcomeKind,
    pub flow: EdgeFlow,
    /// Bit projection of the flow.
    pub bits: Vec<f64>,
    /// Signal-space projection of the flow.
    pub signal: Vec<f64>,
    pub objective: f64,
    pub ml_certificate: bool,
}

impl DecodeOutcome {
    /// Hard bits when the outcome is a codeword.
    pub fn codeword(&self) -> Option<Vec<u8>> {
        match self.kind {
            OutcomeKind::Codeword => Some(self.bits.iter().map(|&f| (f > 0.5) as u8).collect()),
            OutcomeKind::Pseudocodeword => None,
        }
    }
}

pub fn project_q(trellis: &Trellis, g: &EdgeFlow) -> Result<Vec<f64>> {
    trellis.project_bits(&g.values)
}

pub fn project_sspcw(trellis: &Trellis, g: &EdgeFlow) -> Result<Vec<f64>> {
    trellis.project_signal(&g.values)
}

/// Joint LP decoder with the constraint rows of one (trellis, code) pair
/// prepared once.
#[derive(Debug, Clone)]
pub struct JointDecoder {
    trellis: Trellis,
    code: ParityCheckCode,
    equalities: Vec<LinearConstraint>,
    code_rows: Vec<LinearConstraint>,
    ones: Vec<Vec<usize>>,
    mode: CostMode,
    viterbi_shortcut: bool,
    adaptive: bool,
}

impl JointDecoder {
    pub fn new(trellis: Trellis, code: ParityCheckCode) -> Result<Self> {
        let code_rows = code_rows(&trellis, &code, DEFAULT_DEGREE_CAP)?;
        let equalities = trellis_rows(&trellis);
        let ones = (0..trellis.len())
            .map(|t| trellis.edges_at(t).filter(|&e| trellis.edges()[e].input == 1).collect())
            .collect();
        Ok(JointDecoder {
            trellis,
            code,
            equalities,
            code_rows,
            ones,
            mode: CostMode::Squared,
            viterbi_shortcut: true,
            adaptive: true,
        })
    }

    pub fn with_mode(mut self, mode: CostMode) -> Self {
        self.mode = mode;
        self
    }

    /// When on (the default), a Viterbi path whose bits form a codeword is
    /// returned without calling the LP solver. That path attains the
    /// trellis-only optimum, a lower bound on the joint optimum, so it is
    /// an optimal vertex of the joint LP.
    pub fn with_viterbi_shortcut(mut self, on: bool) -> Self {
        self.viterbi_shortcut = on;
        self
    }

    /// When on (the default), solves by adaptive cut generation; when off,
    /// hands the full LP to the solver at once. Both reach the same optimum.
    pub fn with_adaptive(mut self, on: bool) -> Self {
        self.adaptive = on;
        self
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    pub fn code(&self) -> &ParityCheckCode {
        &self.code
    }

    pub fn problem(&self, costs: &BranchCosts) -> Result<LpProblem> {
        check_len(self.trellis.num_edges(), costs.costs.len())?;
        Ok(LpProblem {
            num_vars: self.trellis.num_edges(),
            objective: costs.costs.clone(),
            equalities: self.equalities.clone(),
            inequalities: self.code_rows.clone(),
        })
    }

    pub fn costs(&self, y: &[f64], sigma: f64) -> Result<BranchCosts> {
        branch_costs(&self.trellis, y, sigma, self.mode)
    }

    pub fn decode(&self, y: &[f64], sigma: f64) -> Result<DecodeOutcome> {
        let costs = self.costs(y, sigma)?;
        self.decode_costs(&costs)
    }

    pub fn decode_costs(&self, costs: &BranchCosts) -> Result<DecodeOutcome> {
        if self.viterbi_shortcut {
            let (path, cost) = viterbi(&self.trellis, costs)?;
            let bits: Vec<u8> = path.iter().map(|&e| self.trellis.edges()[e].input).collect();
            if self.code.is_codeword(&bits)? {
                let flow = EdgeFlow { values: self.trellis.path_flow(&path), provenance: Provenance::Vertex };
                return self.classify(flow, cost);
            }
        }
        let (flow, objective) = if self.adaptive {
            check_len(self.trellis.num_edges(), costs.costs.len())?;
            solve_adaptive(&self.trellis, &self.code, &self.equalities, &self.ones, costs)?
        } else {
            solve_vertex(&self.problem(costs)?)?
        };
        self.classify(flow, objective)
    }

    fn classify(&self, flow: EdgeFlow, objective: f64) -> Result<DecodeOutcome> {
        let bits = self.trellis.project_bits(&flow.values)?;
        let signal = self.trellis.project_signal(&flow.values)?;
        let kind = if flow.is_integral() { OutcomeKind::Codeword } else { OutcomeKind::Pseudocodeword };
        if kind == OutcomeKind::Codeword {
            let hard: Vec<u8> = bits.iter().map(|&f| (f > 0.5) as u8).collect();
            if !self.code.is_codeword(&hard)? {
                return Err(Error::Solver("integral LP output is not a codeword".into()));
            }
        }
        Ok(DecodeOutcome {
            kind,
            ml_certificate: kind == OutcomeKind::Codeword && self.trellis.is_fsisic(),
            flow,
            bits,
            signal,
            objective,
        })
    }
}

/// One-shot joint decode with squared-distance branch costs.
pub fn joint_decode(trellis: &Trellis, code: &ParityCheckCode, y: &[f64], sigma: f64) -> Result<DecodeOutcome> {
    JointDecoder::new(trellis.clone(), code.clone())?.decode(y, sigma)
}
