//! Dense bounded-variable dual simplex with incremental rows.
//!
//! Solves `min c·x` subject to `lo_r ≤ a_r·x ≤ hi_r` and finite boxes
//! `l_j ≤ x_j ≤ u_j`. Each row owns a logical variable `s_r = a_r·x` with
//! bounds `[lo_r, hi_r]`. Because every structural variable is boxed, the
//! all-logical basis is dual feasible once each structural sits at the bound
//! matching the sign of its cost, so no phase one is needed. Rows can be
//! added between solves without losing dual feasibility, which is what row
//! generation relies on.
//!
//! The tableau `T = B⁻¹[A | −I]` is stored densely; basic variables satisfy
//! `x_B = −T_N x_N`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};
use crate::signal::compensated_sum;

const PIVOT_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 50;
/// Pivots between recomputations of primal values and reduced costs.
const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone)]
pub struct DualSimplex {
    n: usize,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    rows: Vec<Vec<f64>>,
    tab: Vec<Vec<f64>>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
    bland_switches: usize,
}

impl DualSimplex {
    /// A problem with `n = cost.len()` boxed structural variables and no rows.
    pub fn new(cost: Vec<f64>, col_lo: Vec<f64>, col_hi: Vec<f64>) -> Result<Self> {
        let n = cost.len();
        if col_lo.len() != n || col_hi.len() != n {
            return Err(TlabError::validation("cost and bound vectors differ in length"));
        }
        for j in 0..n {
            if !(col_lo[j].is_finite() && col_hi[j].is_finite() && cost[j].is_finite()) {
                return Err(TlabError::validation(format!("column {j} needs finite data")));
            }
            if col_lo[j] > col_hi[j] {
                return Err(TlabError::validation(format!("column {j} has empty box")));
            }
        }
        let state: Vec<VarState> = cost
            .iter()
            .map(|&c| if c >= 0.0 { VarState::AtLower } else { VarState::AtUpper })
            .collect();
        let x = (0..n)
            .map(|j| if state[j] == VarState::AtLower { col_lo[j] } else { col_hi[j] })
            .collect();
        Ok(Self {
            n,
            d: cost.clone(),
            cost,
            lo: col_lo,
            hi: col_hi,
            rows: Vec::new(),
            tab: Vec::new(),
            basis: Vec::new(),
            state,
            x,
            iterations: 0,
            bland_switches: 0,
        })
    }

    pub fn num_cols(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Times the pricing fell back to Bland's rule.
    pub fn bland_switches(&self) -> usize {
        self.bland_switches
    }

    /// Adds `lo ≤ a·x ≤ hi`; one side may be infinite. Returns the row index.
    pub fn add_row(&mut self, a: Vec<f64>, lo: f64, hi: f64) -> Result<usize> {
        if a.len() != self.n {
            return Err(TlabError::validation("row length does not match column count"));
        }
        if a.iter().any(|v| !v.is_finite()) || lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(TlabError::validation("row data must be finite with lo ≤ hi"));
        }
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            return Err(TlabError::validation("row needs at least one finite bound"));
        }
        let r = self.rows.len();
        let width = self.n + r + 1;
        for row in self.tab.iter_mut() {
            row.push(0.0);
        }
        let mut new_row = vec![0.0; width];
        for j in 0..self.n {
            new_row[j] = -a[j];
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n && a[b] != 0.0 {
                let coef = a[b];
                let ti = &self.tab[i];
                for (nr, t) in new_row.iter_mut().zip(ti) {
                    *nr += coef * t;
                }
            }
        }
        for &b in &self.basis {
            new_row[b] = 0.0;
        }
        new_row[self.n + r] = 1.0;
        let activity = compensated_sum((0..self.n).map(|j| a[j] * self.x[j]));
        self.tab.push(new_row);
        self.rows.push(a);
        self.lo.push(lo);
        self.hi.push(hi);
        self.cost.push(0.0);
        self.d.push(0.0);
        self.x.push(activity);
        self.state.push(VarState::Basic(r));
        self.basis.push(self.n + r);
        Ok(r)
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let scale = 1.0 + self.x[v].abs();
        if self.x[v] < self.lo[v] - PRIMAL_TOL * scale {
            self.lo[v] - self.x[v]
        } else if self.x[v] > self.hi[v] + PRIMAL_TOL * scale {
            self.x[v] - self.hi[v]
        } else {
            0.0
        }
    }

    fn refresh(&mut self) {
        let width = self.n + self.rows.len();
        let nonbasic: Vec<usize> = (0..width)
            .filter(|&j| !matches!(self.state[j], VarState::Basic(_)))
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let t = &self.tab[i];
            self.x[b] = -compensated_sum(nonbasic.iter().map(|&j| t[j] * self.x[j]));
        }
        for j in 0..width {
            if matches!(self.state[j], VarState::Basic(_)) {
                self.d[j] = 0.0;
            } else {
                let s = compensated_sum(
                    self.basis
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| self.cost[b] * self.tab[i][j]),
                );
                self.d[j] = self.cost[j] - s;
            }
        }
    }

    /// Runs dual simplex pivots until primal feasibility or `max_iter`.
    pub fn solve(&mut self, max_iter: usize) -> LpStatus {
        let mut degenerate_run = 0usize;
        let mut since_refresh = 0usize;
        let mut refreshed_at_end = false;
        loop {
            let bland = degenerate_run >= DEGENERATE_SWITCH;
            let leave = self.choose_leaving(bland);
            let Some(r) = leave else {
                if refreshed_at_end {
                    return LpStatus::Optimal;
                }
                self.refresh();
                refreshed_at_end = true;
                since_refresh = 0;
                continue;
            };
            refreshed_at_end = false;
            if self.iterations >= max_iter {
                return LpStatus::IterationLimit;
            }
            match self.pivot(r, bland) {
                None => return LpStatus::Infeasible,
                Some(degenerate) => {
                    if degenerate {
                        degenerate_run += 1;
                        if degenerate_run == DEGENERATE_SWITCH {
                            self.bland_switches += 1;
                        }
                    } else {
                        degenerate_run = 0;
                    }
                }
            }
            self.iterations += 1;
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                self.refresh();
                since_refresh = 0;
            }
        }
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &b) in self.basis.iter().enumerate() {
            let inf = self.infeasibility(b);
            if inf <= 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bv)) => {
                    if bland {
                        b < self.basis[bi]
                    } else {
                        inf > bv
                    }
                }
            };
            if better {
                best = Some((i, inf));
            }
        }
        best.map(|(i, _)| i)
    }

    /// One dual simplex iteration on row `r`. Returns whether the step was
    /// dual degenerate, or `None` when the row proves infeasibility.
    fn pivot(&mut self, r: usize, bland: bool) -> Option<bool> {
        let leaving = self.basis[r];
        let below = self.x[leaving] < self.lo[leaving];
        let target = if below { self.lo[leaving] } else { self.hi[leaving] };
        let slope0 = (self.x[leaving] - target).abs();
        let width = self.n + self.rows.len();
        let trow = &self.tab[r];

        // (ratio, |t|, index)
        let mut cands: Vec<(f64, f64, usize)> = Vec::new();
        for j in 0..width {
            let at_lower = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower => true,
                VarState::AtUpper => false,
            };
            if self.lo[j] == self.hi[j] {
                continue;
            }
            let t = trow[j];
            if t.abs() <= PIVOT_TOL {
                continue;
            }
            // moving x_j off its bound must push x_leaving toward the target
            let ok = if below {
                (at_lower && t < 0.0) || (!at_lower && t > 0.0)
            } else {
                (at_lower && t > 0.0) || (!at_lower && t < 0.0)
            };
            if ok {
                let ratio = (self.d[j] / t).abs();
                let ratio = if at_lower == (self.d[j] >= 0.0) { ratio } else { 0.0 };
                cands.push((ratio, t.abs(), j));
            }
        }
        if cands.is_empty() {
            return None;
        }

        let mut flips: Vec<usize> = Vec::new();
        let q = if bland {
            let min_ratio = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
            cands
                .iter()
                .filter(|c| c.0 <= min_ratio + 1e-12)
                .map(|c| c.2)
                .min()
                .unwrap()
        } else {
            cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
            let mut slope = slope0;
            let mut chosen = None;
            for &(_, abs_t, j) in &cands {
                let range = self.hi[j] - self.lo[j];
                let next = slope - abs_t * range;
                if !range.is_finite() || next <= 0.0 {
                    chosen = Some(j);
                    break;
                }
                slope = next;
                flips.push(j);
            }
            // every breakpoint passed with slope left: the row cannot be met
            let chosen = chosen?;
            // prefer a larger pivot among near-ties at the chosen ratio
            let cr = cands.iter().find(|c| c.2 == chosen).unwrap().0;
            let tie = cr + 1e-12 * (1.0 + cr);
            let mut best = chosen;
            let mut best_t = trow[chosen].abs();
            for &(ratio, abs_t, j) in &cands {
                if ratio > tie {
                    break;
                }
                if abs_t > best_t * 10.0 && !flips.contains(&j) {
                    best = j;
                    best_t = abs_t;
                }
            }
            best
        };

        let mut degenerate = true;
        let q_ratio = (self.d[q] / self.tab[r][q]).abs();
        if q_ratio > 1e-12 {
            degenerate = false;
        }

        for &j in &flips {
            let (from, to, new_state) = match self.state[j] {
                VarState::AtLower => (self.lo[j], self.hi[j], VarState::AtUpper),
                _ => (self.hi[j], self.lo[j], VarState::AtLower),
            };
            let delta = to - from;
            self.x[j] = to;
            self.state[j] = new_state;
            for (i, &b) in self.basis.iter().enumerate() {
                let t = self.tab[i][j];
                if t != 0.0 {
                    self.x[b] -= t * delta;
                }
            }
        }

        let alpha = self.tab[r][q];
        let delta_q = (self.x[leaving] - target) / alpha;
        for (i, &b) in self.basis.iter().enumerate() {
            let t = self.tab[i][q];
            if t != 0.0 {
                self.x[b] -= t * delta_q;
            }
        }
        self.x[q] += delta_q;
        self.x[leaving] = target;

        let rho = self.d[q] / alpha;
        {
            let trow = &self.tab[r];
            for j in 0..width {
                let t = trow[j];
                if t != 0.0 {
                    self.d[j] -= rho * t;
                }
            }
        }
        self.d[q] = 0.0;

        let inv = 1.0 / alpha;
        for v in self.tab[r].iter_mut() {
            *v *= inv;
        }
        self.tab[r][q] = 1.0;
        let pivot_row = std::mem::take(&mut self.tab[r]);
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        }
        self.tab[r] = pivot_row;

        self.state[leaving] = if below { VarState::AtLower } else { VarState::AtUpper };
        self.state[q] = VarState::Basic(r);
        self.basis[r] = q;
        Some(degenerate)
    }

    /// Structural variable values.
    pub fn primal(&self) -> Vec<f64> {
        self.x[..self.n].to_vec()
    }

    pub fn objective(&self) -> f64 {
        compensated_sum((0..self.n).map(|j| self.cost[j] * self.x[j]))
    }

    /// Row multipliers `π` with reduced costs `c − Aᵀπ`.
    pub fn row_duals(&self) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.d[self.n + r]).collect()
    }

    /// Lower bound on the optimum valid for any multipliers `π`:
    /// `min_{box} (c − Aᵀπ)·x + Σ_r min_{s ∈ [lo_r, hi_r]} π_r s`.
    /// Multipliers pointing at an infinite side are treated as zero.
    pub fn lagrangian_bound(&self, pi: &[f64]) -> f64 {
        let mut reduced: Vec<f64> = self.cost[..self.n].to_vec();
        let mut acc = crate::signal::CompensatedSum::new();
        for (r, row) in self.rows.iter().enumerate() {
            let mut p = pi.get(r).copied().unwrap_or(0.0);
            let bound = if p > 0.0 { self.lo[self.n + r] } else { self.hi[self.n + r] };
            if !bound.is_finite() {
                p = 0.0;
            }
            if p == 0.0 {
                continue;
            }
            acc.add(p * bound);
            for (c, a) in reduced.iter_mut().zip(row) {
                *c -= p * a;
            }
        }
        for j in 0..self.n {
            let c = reduced[j];
            acc.add(if c >= 0.0 { c * self.lo[j] } else { c * self.hi[j] });
        }
        acc.value()
    }

    /// `a_r·x` for every row at the current structural values.
    pub fn row_activity(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| compensated_sum(row.iter().zip(&self.x[..self.n]).map(|(a, x)| a * x)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp_by_hand() {
        // max x + y s.t. x + 2y ≤ 4, 3x + y ≤ 6, 0 ≤ x, y ≤ 10 → (8/5, 6/5)
        let mut lp = DualSimplex::new(vec![-1.0, -1.0], vec![0.0; 2], vec![10.0; 2]).unwrap();
        lp.add_row(vec![1.0, 2.0], f64::NEG_INFINITY, 4.0).unwrap();
        lp.add_row(vec![3.0, 1.0], f64::NEG_INFINITY, 6.0).unwrap();
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        let x = lp.primal();
        assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
        assert!((lp.objective() + 2.8).abs() < 1e-12);
        let bound = lp.lagrangian_bound(&lp.row_duals());
        assert!((bound + 2.8).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_and_incremental_add() {
        // min x0 + 2x1 + 3x2 with x0+x1+x2 = 1, then add x0 ≤ 0.25
        let mut lp = DualSimplex::new(vec![1.0, 2.0, 3.0], vec![0.0; 3], vec![1.0; 3]).unwrap();
        lp.add_row(vec![1.0, 1.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert!((lp.objective() - 1.0).abs() < 1e-12);
        lp.add_row(vec![1.0, 0.0, 0.0], f64::NEG_INFINITY, 0.25).unwrap();
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert!((lp.objective() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = DualSimplex::new(vec![0.0, 0.0], vec![0.0; 2], vec![1.0; 2]).unwrap();
        lp.add_row(vec![1.0, 1.0], 3.0, f64::INFINITY).unwrap();
        assert_eq!(lp.solve(100), LpStatus::Infeasible);
    }

    #[test]
    fn rejects_free_rows() {
        let mut lp = DualSimplex::new(vec![0.0], vec![0.0], vec![1.0]).unwrap();
        assert!(lp.add_row(vec![1.0], f64::NEG_INFINITY, f64::INFINITY).is_err());
    }
}
