//! Dense two-phase primal simplex.
//!
//! Programs are stated as
//!
//! ```text
//! minimize    c . v
//! subject to  A_eq v  = b_eq
//!             A_ub v <= b_ub
//!             lo <= v <= hi
//! ```
//!
//! and converted internally to `min c'u, A'u = b', u >= 0` with one slack per
//! inequality (finite upper bounds become inequality rows). Pricing is
//! Dantzig's rule until `3 * (rows + cols)` iterations have elapsed in a
//! phase, then Bland's rule; every tie is broken by lowest index. Once a
//! basis is optimal, primal and dual values are recomputed from the original
//! data by solving with the basis matrix, which removes accumulated tableau
//! drift.
//!
//! Duals use the sensitivity convention: `eq_duals[i] = d(obj)/d(b_eq[i])`,
//! `ub_duals[i] = d(obj)/d(b_ub[i]) <= 0`, and
//! `reduced_costs = c - A_eq^T eq_duals - A_ub^T ub_duals` (the bound duals).

use serde::Serialize;

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_VARS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
struct SparseRow {
    terms: Vec<(usize, f64)>,
    rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq: Vec<SparseRow>,
    ub: Vec<SparseRow>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// `vars` variables with zero cost and bounds `[0, +inf)`.
    pub fn new(vars: usize) -> Self {
        Self {
            objective: vec![0.0; vars],
            eq: Vec::new(),
            ub: Vec::new(),
            lower: vec![0.0; vars],
            upper: vec![f64::INFINITY; vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_eq(&self) -> usize {
        self.eq.len()
    }

    pub fn num_ub(&self) -> usize {
        self.ub.len()
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.objective[var] = cost;
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    /// `sum terms = rhs`; returns the equality row index.
    pub fn add_eq(&mut self, terms: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.eq.push(SparseRow { terms, rhs });
        self.eq.len() - 1
    }

    /// `sum terms <= rhs`; returns the inequality row index.
    pub fn add_le(&mut self, terms: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.ub.push(SparseRow { terms, rhs });
        self.ub.len() - 1
    }

    /// `sum terms >= rhs`, stored negated as an inequality row.
    pub fn add_ge(&mut self, terms: Vec<(usize, f64)>, rhs: f64) -> usize {
        let terms = terms.into_iter().map(|(j, a)| (j, -a)).collect();
        self.add_le(terms, -rhs)
    }

    /// Copy with inequality rows reordered by `order` (a permutation).
    pub fn with_ub_rows_permuted(&self, order: &[usize]) -> Self {
        let mut lp = self.clone();
        lp.ub = order.iter().map(|&i| self.ub[i].clone()).collect();
        lp
    }

    /// Copy with equality rows reordered by `order` (a permutation).
    pub fn with_eq_rows_permuted(&self, order: &[usize]) -> Self {
        let mut lp = self.clone();
        lp.eq = order.iter().map(|&i| self.eq[i].clone()).collect();
        lp
    }

    fn validate(&self, max_vars: usize) -> Result<()> {
        let n = self.num_vars();
        if n > max_vars {
            return Err(Error::Capacity {
                what: "LP variable count",
                required: n as u128,
                cap: max_vars as u128,
            });
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Shape("bound vectors do not match variable count".into()));
        }
        if let Some(c) = self.objective.iter().find(|c| !c.is_finite()) {
            return Err(Error::Shape(format!("objective coefficient {c} is not finite")));
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::Shape(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        for row in self.eq.iter().chain(&self.ub) {
            if !row.rhs.is_finite() {
                return Err(Error::Shape(format!("right-hand side {} is not finite", row.rhs)));
            }
            for &(j, a) in &row.terms {
                if j >= n {
                    return Err(Error::Shape(format!("term references variable {j} of {n}")));
                }
                if !a.is_finite() {
                    return Err(Error::Shape(format!("coefficient {a} is not finite")));
                }
            }
        }
        Ok(())
    }

    fn row_activity(row: &SparseRow, v: &[f64]) -> f64 {
        row.terms.iter().map(|&(j, a)| a * v[j]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// Largest violation of any primal constraint or bound.
    pub primal: f64,
    /// Largest dual sign or stationarity violation.
    pub dual: f64,
    /// Largest complementary-slackness product.
    pub complementarity: f64,
    /// `|c.v - dual objective|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub eq_duals: Vec<f64>,
    pub ub_duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    pub residuals: Residuals,
}

impl LpSolution {
    fn non_optimal(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            eq_duals: Vec::new(),
            ub_duals: Vec::new(),
            reduced_costs: Vec::new(),
            iterations,
            residuals: Residuals::default(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// A-posteriori optimality check against the original program.
    pub fn verify(&self, lp: &LinearProgram) -> Residuals {
        let v = &self.x;
        let mut res = Residuals::default();
        let mut dual_obj = 0.0;

        for (row, &y) in lp.eq.iter().zip(&self.eq_duals) {
            let act = LinearProgram::row_activity(row, v);
            res.primal = res.primal.max((act - row.rhs).abs());
            dual_obj += row.rhs * y;
        }
        for (row, &y) in lp.ub.iter().zip(&self.ub_duals) {
            let slack = row.rhs - LinearProgram::row_activity(row, v);
            res.primal = res.primal.max(-slack);
            res.dual = res.dual.max(y);
            res.complementarity = res.complementarity.max((y * slack).abs());
            dual_obj += row.rhs * y;
        }

        // Reduced costs recomputed from the original data.
        let mut r = lp.objective.clone();
        for (row, &y) in lp.eq.iter().zip(&self.eq_duals).chain(lp.ub.iter().zip(&self.ub_duals)) {
            for &(j, a) in &row.terms {
                r[j] -= a * y;
            }
        }
        for (j, &rj) in r.iter().enumerate() {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            res.primal = res.primal.max(lo - v[j]).max(v[j] - hi);
            if rj > 0.0 {
                if lo.is_finite() {
                    dual_obj += rj * lo;
                    res.complementarity = res.complementarity.max((rj * (v[j] - lo)).abs());
                } else {
                    res.dual = res.dual.max(rj);
                }
            } else if rj < 0.0 {
                if hi.is_finite() {
                    dual_obj += rj * hi;
                    res.complementarity = res.complementarity.max((rj * (hi - v[j])).abs());
                } else {
                    res.dual = res.dual.max(-rj);
                }
            }
        }
        let primal_obj: f64 = lp.objective.iter().zip(v).map(|(c, x)| c * x).sum();
        res.gap = (primal_obj - dual_obj).abs();
        res
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Iteration cap per phase; `None` picks `100 * (rows + cols) + 10_000`.
    pub max_iterations: Option<usize>,
    pub max_vars: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            max_vars: DEFAULT_MAX_VARS,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(lp, SolverOptions::default())
}

pub fn solve_with(lp: &LinearProgram, opts: SolverOptions) -> Result<LpSolution> {
    lp.validate(opts.max_vars)?;
    let std = StandardForm::build(lp);
    let mut tableau = Tableau::new(&std);
    let cap = opts
        .max_iterations
        .unwrap_or(100 * (tableau.rows + tableau.cols) + 10_000);

    // Phase 1.
    let mut iterations = 0;
    if tableau.has_artificials() {
        tableau.load_phase1_costs();
        match tableau.run(cap) {
            PhaseOutcome::Optimal(it) => iterations += it,
            PhaseOutcome::Unbounded(it) => {
                // Phase 1 is bounded below by zero; treat as numerical failure.
                return Err(Error::Solver(format!("phase 1 reported unbounded after {it} pivots")));
            }
            PhaseOutcome::IterationLimit(it) => {
                return Ok(LpSolution::non_optimal(LpStatus::IterationLimit, iterations + it));
            }
        }
        let scale = std.rhs.iter().fold(1.0f64, |m, b| m.max(b.abs()));
        if tableau.current_objective() > FEAS_TOL * scale {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, iterations));
        }
        tableau.drive_out_artificials();
    }

    // Phase 2.
    tableau.load_phase2_costs(&std.cost);
    match tableau.run(cap) {
        PhaseOutcome::Optimal(it) => iterations += it,
        PhaseOutcome::Unbounded(it) => {
            return Ok(LpSolution::non_optimal(LpStatus::Unbounded, iterations + it));
        }
        PhaseOutcome::IterationLimit(it) => {
            return Ok(LpSolution::non_optimal(LpStatus::IterationLimit, iterations + it));
        }
    }

    let (u, w) = tableau.refined_solution(&std);
    let mut sol = std.recover(lp, &u, &w);
    sol.iterations = iterations;
    sol.residuals = sol.verify(lp);
    Ok(sol)
}

/// How an original variable maps onto nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `v = lo + u`
    Shift { col: usize, lo: f64 },
    /// `v = hi - u`
    Mirror { col: usize, hi: f64 },
    /// `v = u_plus - u_minus`
    Free { plus: usize, minus: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowOrigin {
    Eq(usize),
    Ub(usize),
    Bound,
}

struct StandardForm {
    /// Structural plus slack columns (artificials are added by the tableau).
    cols: usize,
    /// Dense rows over `cols`, already sign-normalized so `rhs >= 0`.
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// `+1` or `-1`: how each row was normalized.
    sign: Vec<f64>,
    origin: Vec<RowOrigin>,
    /// Column of each row's slack, if it has one (coefficient `sign[i]`).
    slack: Vec<Option<usize>>,
    cost: Vec<f64>,
    vars: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut structural = 0;
        for j in 0..lp.num_vars() {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            let map = if lo.is_finite() {
                VarMap::Shift { col: structural, lo }
            } else if hi.is_finite() {
                VarMap::Mirror { col: structural, hi }
            } else {
                structural += 1;
                VarMap::Free {
                    plus: structural - 1,
                    minus: structural,
                }
            };
            structural += 1;
            vars.push(map);
        }
        // Finite upper bounds on shifted variables become `v_j <= hi` rows.
        let bound_rows: Vec<SparseRow> = (0..lp.num_vars())
            .filter(|&j| matches!(vars[j], VarMap::Shift { .. }) && lp.upper[j].is_finite())
            .map(|j| SparseRow {
                terms: vec![(j, 1.0)],
                rhs: lp.upper[j],
            })
            .collect();
        let slacks = lp.ub.len() + bound_rows.len();
        let cols = structural + slacks;

        let mut a = Vec::new();
        let mut rhs = Vec::new();
        let mut origin = Vec::new();
        let mut slack = Vec::new();
        let mut emit = |row: &SparseRow, o: RowOrigin, slack_col: Option<usize>| {
            let mut dense = vec![0.0; cols];
            let mut b = row.rhs;
            for &(j, coef) in &row.terms {
                match vars[j] {
                    VarMap::Shift { col, lo } => {
                        dense[col] += coef;
                        b -= coef * lo;
                    }
                    VarMap::Mirror { col, hi } => {
                        dense[col] -= coef;
                        b -= coef * hi;
                    }
                    VarMap::Free { plus, minus } => {
                        dense[plus] += coef;
                        dense[minus] -= coef;
                    }
                }
            }
            if let Some(s) = slack_col {
                dense[s] = 1.0;
            }
            a.push(dense);
            rhs.push(b);
            origin.push(o);
            slack.push(slack_col);
        };
        for (i, row) in lp.eq.iter().enumerate() {
            emit(row, RowOrigin::Eq(i), None);
        }
        for (i, row) in lp.ub.iter().enumerate() {
            emit(row, RowOrigin::Ub(i), Some(structural + i));
        }
        for (b, row) in bound_rows.iter().enumerate() {
            emit(row, RowOrigin::Bound, Some(structural + lp.ub.len() + b));
        }

        let mut sign = vec![1.0; a.len()];
        for i in 0..a.len() {
            if rhs[i] < 0.0 {
                sign[i] = -1.0;
                rhs[i] = -rhs[i];
                a[i].iter_mut().for_each(|v| *v = -*v);
            }
        }

        let mut cost = vec![0.0; cols];
        for (j, map) in vars.iter().enumerate() {
            let c = lp.objective[j];
            match *map {
                VarMap::Shift { col, .. } => cost[col] += c,
                VarMap::Mirror { col, .. } => cost[col] -= c,
                VarMap::Free { plus, minus } => {
                    cost[plus] += c;
                    cost[minus] -= c;
                }
            }
        }

        Self {
            cols,
            a,
            rhs,
            sign,
            origin,
            slack,
            cost,
            vars,
        }
    }

    /// Map standard-form primal `u` and row duals `w` back to the original program.
    fn recover(&self, lp: &LinearProgram, u: &[f64], w: &[f64]) -> LpSolution {
        let x: Vec<f64> = self
            .vars
            .iter()
            .enumerate()
            .map(|(j, map)| {
                let v = match *map {
                    VarMap::Shift { col, lo } => lo + u[col],
                    VarMap::Mirror { col, hi } => hi - u[col],
                    VarMap::Free { plus, minus } => u[plus] - u[minus],
                };
                v.clamp(lp.lower[j], lp.upper[j])
            })
            .collect();
        let mut eq_duals = vec![0.0; lp.eq.len()];
        let mut ub_duals = vec![0.0; lp.ub.len()];
        for (i, origin) in self.origin.iter().enumerate() {
            let y = self.sign[i] * w[i];
            match *origin {
                RowOrigin::Eq(r) => eq_duals[r] = y,
                RowOrigin::Ub(r) => ub_duals[r] = y,
                RowOrigin::Bound => {}
            }
        }
        let mut reduced_costs = lp.objective.clone();
        for (row, &y) in lp.eq.iter().zip(&eq_duals).chain(lp.ub.iter().zip(&ub_duals)) {
            for &(j, a) in &row.terms {
                reduced_costs[j] -= a * y;
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            eq_duals,
            ub_duals,
            reduced_costs,
            iterations: 0,
            residuals: Residuals::default(),
        }
    }
}

enum PhaseOutcome {
    Optimal(usize),
    Unbounded(usize),
    IterationLimit(usize),
}

struct Tableau {
    rows: usize,
    /// Standard-form columns plus artificials.
    cols: usize,
    first_artificial: usize,
    /// Row-major `rows x (cols + 1)`; last entry of each row is the rhs.
    data: Vec<f64>,
    /// Reduced costs; last entry is minus the current objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Column that formed the identity in each row at start.
    initial_basic: Vec<usize>,
}

impl Tableau {
    fn new(std: &StandardForm) -> Self {
        let rows = std.a.len();
        let needs_art: Vec<bool> = (0..rows)
            .map(|i| !(std.slack[i].is_some() && std.sign[i] > 0.0))
            .collect();
        let n_art = needs_art.iter().filter(|b| **b).count();
        let cols = std.cols + n_art;
        let width = cols + 1;
        let mut data = vec![0.0; rows * width];
        let mut basis = Vec::with_capacity(rows);
        let mut next_art = std.cols;
        for i in 0..rows {
            let row = &mut data[i * width..(i + 1) * width];
            row[..std.cols].copy_from_slice(&std.a[i]);
            row[cols] = std.rhs[i];
            if needs_art[i] {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(std.slack[i].expect("slack row"));
            }
        }
        Self {
            rows,
            cols,
            first_artificial: std.cols,
            data,
            cost: vec![0.0; width],
            initial_basic: basis.clone(),
            basis,
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn has_artificials(&self) -> bool {
        self.cols > self.first_artificial
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.first_artificial
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn current_objective(&self) -> f64 {
        -self.cost[self.cols]
    }

    fn load_phase1_costs(&mut self) {
        let w = self.width();
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for j in self.first_artificial..self.cols {
            self.cost[j] = 1.0;
        }
        for i in 0..self.rows {
            if self.is_artificial(self.basis[i]) {
                for j in 0..w {
                    self.cost[j] -= self.data[i * w + j];
                }
            }
        }
    }

    fn load_phase2_costs(&mut self, cost: &[f64]) {
        let w = self.width();
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        self.cost[..cost.len()].copy_from_slice(cost);
        for i in 0..self.rows {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.cost[j] -= cb * self.data[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width();
        let piv = self.data[r * w + e];
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        prow.iter_mut().for_each(|v| *v /= piv);
        prow[e] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[e];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[e] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(&mut self.cost);
        self.basis[r] = e;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.first_artificial {
            let d = self.cost[j];
            if d < -OPT_TOL {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((j, d));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn leaving(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, e);
            if a > PIVOT_TOL {
                let ratio = self.at(i, self.cols).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if (tie && self.basis[i] < self.basis[bi]) || (!tie && ratio < br) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        best.map(|(i, _)| i)
    }

    fn run(&mut self, cap: usize) -> PhaseOutcome {
        let bland_after = 3 * (self.rows + self.cols);
        let mut it = 0;
        loop {
            let Some(e) = self.entering(it >= bland_after) else {
                return PhaseOutcome::Optimal(it);
            };
            let Some(r) = self.leaving(e) else {
                return PhaseOutcome::Unbounded(it);
            };
            if it >= cap {
                return PhaseOutcome::IterationLimit(it);
            }
            self.pivot(r, e);
            it += 1;
        }
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.first_artificial {
                let a = self.at(r, j).abs();
                if a > PIVOT_TOL && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(r, j);
            }
            // Otherwise the row is redundant and its artificial stays basic at zero.
        }
    }

    /// Basic solution and row duals, recomputed from the original data when the
    /// basis matrix is well conditioned, otherwise read off the tableau.
    fn refined_solution(&self, std: &StandardForm) -> (Vec<f64>, Vec<f64>) {
        let m = self.rows;
        let column = |j: usize, i: usize| -> f64 {
            if j < std.cols {
                std.a[i][j]
            } else {
                // Artificial columns are unit vectors on their starting row.
                if self.initial_basic[i] == j {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let cost_of = |j: usize| std.cost.get(j).copied().unwrap_or(0.0);

        let mut b_mat = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                b_mat[i * m + k] = column(j, i);
            }
        }
        let mut bt = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                bt[k * m + i] = b_mat[i * m + k];
            }
        }
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost_of(j)).collect();

        let mut u = vec![0.0; self.cols];
        let refined = solve_dense(b_mat, std.rhs.clone(), m).zip(solve_dense(bt, cb, m));
        let w = match refined {
            Some((xb, w)) => {
                for (k, &j) in self.basis.iter().enumerate() {
                    u[j] = xb[k];
                }
                w
            }
            None => {
                for (i, &j) in self.basis.iter().enumerate() {
                    u[j] = self.at(i, self.cols);
                }
                // Reduced cost of each row's starting identity column is `c_j - w_i`.
                self.initial_basic
                    .iter()
                    .map(|&j| cost_of(j) - self.cost[j])
                    .collect()
            }
        };
        for v in u.iter_mut() {
            if *v < 0.0 && *v > -FEAS_TOL {
                *v = 0.0;
            }
        }
        u.truncate(std.cols);
        (u, w)
    }
}

/// Gaussian elimination with partial pivoting on a row-major `n x n` matrix.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let (piv_row, piv_val) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if piv_val < 1e-13 {
            return None;
        }
        if piv_row != col {
            for k in 0..n {
                a.swap(col * n + k, piv_row * n + k);
            }
            b.swap(col, piv_row);
        }
        let p = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_certified(lp: &LinearProgram, sol: &LpSolution) {
        assert!(sol.is_optimal());
        let r = sol.verify(lp);
        assert!(r.primal <= 1e-9, "{r:?}");
        assert!(r.dual <= 1e-7, "{r:?}");
        assert!(r.complementarity <= 1e-7, "{r:?}");
        assert!(r.gap <= 1e-7, "{r:?}");
    }

    #[test]
    fn lower_bound_only() {
        // minimize v s.t. v >= 1
        let mut lp = LinearProgram::new(1);
        lp.set_cost(0, 1.0);
        lp.add_ge(vec![(0, 1.0)], 1.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert_certified(&lp, &sol);
        assert!((sol.ub_duals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_constraint() {
        // minimize -v s.t. v <= 3, v >= 0
        let mut lp = LinearProgram::new(1);
        lp.set_cost(0, -1.0);
        lp.add_le(vec![(0, 1.0)], 3.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.x, vec![3.0]);
        assert_eq!(sol.objective, -3.0);
        assert_certified(&lp, &sol);
    }

    #[test]
    fn uniform_placement_program() {
        // K = 2, N = 2, M = 1: min sum C(2,s)(2-s)/(s+1) z_s
        let costs = [2.0, 1.0, 0.0];
        let binom = [1.0, 2.0, 1.0];
        let mut lp = LinearProgram::new(3);
        for s in 0..3 {
            lp.set_cost(s, costs[s]);
        }
        lp.add_eq((0..3).map(|s| (s, binom[s])).collect(), 1.0);
        lp.add_le((0..3).map(|s| (s, binom[s] * s as f64)).collect(), 1.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective - 0.5).abs() < 1e-12);
        assert!((sol.x[1] - 0.5).abs() < 1e-12 && sol.x[0].abs() < 1e-12 && sol.x[2].abs() < 1e-12);
        assert_certified(&lp, &sol);
    }

    #[test]
    fn finite_upper_bounds_and_free_variables() {
        // minimize -a - 2b + c s.t. a + b <= 4, c - b >= -1, a in [0,1], b in [-inf, 2.5], c free
        let mut lp = LinearProgram::new(3);
        lp.set_cost(0, -1.0);
        lp.set_cost(1, -2.0);
        lp.set_cost(2, 1.0);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, f64::NEG_INFINITY, 2.5);
        lp.set_bounds(2, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_le(vec![(0, 1.0), (1, 1.0)], 4.0);
        lp.add_ge(vec![(2, 1.0), (1, -1.0)], -1.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 2.5).abs() < 1e-12);
        assert!((sol.x[2] - 1.5).abs() < 1e-12);
        assert!((sol.objective - (-1.0 - 5.0 + 1.5)).abs() < 1e-12);
        assert_certified(&lp, &sol);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_le(vec![(0, 1.0)], 1.0);
        lp.add_ge(vec![(0, 1.0)], 2.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, -1.0);
        lp.add_le(vec![(0, 1.0), (1, -1.0)], 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.set_cost(0, 1.0);
        lp.set_cost(1, 2.0);
        lp.add_eq(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.add_eq(vec![(0, 2.0), (1, 2.0)], 2.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!(sol.verify(&lp).primal <= 1e-9);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let mut lp = LinearProgram::new(3);
        for j in 0..3 {
            lp.set_cost(j, -1.0);
            lp.add_le(vec![(j, 1.0)], 1.0);
        }
        let opts = SolverOptions {
            max_iterations: Some(1),
            ..Default::default()
        };
        assert_eq!(solve_with(&lp, opts).unwrap().status, LpStatus::IterationLimit);
    }

    #[test]
    fn shape_errors() {
        let mut lp = LinearProgram::new(1);
        lp.add_le(vec![(3, 1.0)], 1.0);
        assert!(matches!(solve(&lp), Err(Error::Shape(_))));

        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(matches!(solve(&lp), Err(Error::Shape(_))));

        let lp = LinearProgram::new(5);
        let opts = SolverOptions {
            max_vars: 4,
            ..Default::default()
        };
        assert!(matches!(solve_with(&lp, opts), Err(Error::Capacity { .. })));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance under Dantzig pricing.
        let mut lp = LinearProgram::new(4);
        for (j, c) in [-0.75, 150.0, -0.02, 6.0].into_iter().enumerate() {
            lp.set_cost(j, c);
        }
        lp.add_le(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], 0.0);
        lp.add_le(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], 0.0);
        lp.add_le(vec![(2, 1.0)], 1.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective + 0.05).abs() < 1e-12);
        assert_certified(&lp, &sol);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn row_permutation_invariance(
                costs in prop::collection::vec(-5.0f64..5.0, 4),
                rows in prop::collection::vec((prop::collection::vec(0.0f64..3.0, 4), 1.0f64..10.0), 1..6),
                seed in any::<u64>(),
            ) {
                // Bounded feasible region: box [0, 5] plus random packing rows.
                let mut lp = LinearProgram::new(4);
                for (j, c) in costs.iter().enumerate() {
                    lp.set_cost(j, *c);
                    lp.set_bounds(j, 0.0, 5.0);
                }
                for (coef, rhs) in &rows {
                    lp.add_le(coef.iter().copied().enumerate().collect(), *rhs);
                }
                let base = solve(&lp).unwrap();
                prop_assert!(base.is_optimal());
                let r = base.verify(&lp);
                prop_assert!(r.primal <= 1e-9 && r.dual <= 1e-7 && r.gap <= 1e-7);

                let mut order: Vec<usize> = (0..rows.len()).collect();
                let mut state = seed;
                for i in (1..order.len()).rev() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    order.swap(i, (state >> 33) as usize % (i + 1));
                }
                let permuted = solve(&lp.with_ub_rows_permuted(&order)).unwrap();
                prop_assert!((base.objective - permuted.objective).abs() <= 1e-9);
            }
        }
    }
}
