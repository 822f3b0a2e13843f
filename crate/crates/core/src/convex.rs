//! Finite-dimensional convex tools: nearest points of polytopes with
//! separating hyperplanes, bilinear saddle points over two polytopes, and an
//! LP upper bound for the dual of the Fourier sup-norm.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};
use crate::lp::{DualSimplex, LpStatus};
use crate::signal::{fourier_grid_of, CompensatedSum, DiscreteSignal, FrequencyGrid};

/// Default absolute tolerance, scaled by the size of the inputs.
pub const DEFAULT_TOL: f64 = 1e-8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = CompensatedSum::new();
    for (x, y) in a.iter().zip(b) {
        s.add(x * y);
    }
    s.value()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Convex hull of finitely many points of `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointHull {
    dimension: usize,
    generators: Vec<Vec<f64>>,
}

impl PointHull {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(TlabError::validation("hull needs at least one generator"));
        };
        let dimension = first.len();
        if dimension == 0 {
            return Err(TlabError::validation("generators must have positive dimension"));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dimension {
                return Err(TlabError::validation(format!(
                    "generator {i} has dimension {} instead of {dimension}",
                    g.len()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(TlabError::validation(format!("generator {i} is not finite")));
            }
        }
        Ok(Self {
            dimension,
            generators,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// `Σ λ_i v_i`.
    pub fn combine(&self, weights: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dimension];
        for (w, v) in weights.iter().zip(&self.generators) {
            if *w != 0.0 {
                for (yk, vk) in y.iter_mut().zip(v) {
                    *yk += w * vk;
                }
            }
        }
        y
    }

    fn scale(&self) -> f64 {
        self.generators
            .iter()
            .flat_map(|g| g.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Hyperplane `{y : y·φ = x·φ}` with the hull on the non-positive side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneWitness {
    pub normal: Vec<f64>,
    pub anchor_value: f64,
    pub projection: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub point: Vec<f64>,
    /// Convex weights on the generators reproducing `point`.
    pub weights: Vec<f64>,
    pub distance: f64,
    /// Frank–Wolfe gap `max_i (x − y₀)·(v_i − y₀)` at the returned point.
    pub gap: f64,
    pub inside: bool,
    /// `max_i (x − y₀)·(v_i − y₀)`, non-positive up to round-off at the
    /// exact nearest point.
    pub obtuse_max: f64,
    pub witness: Option<HyperplaneWitness>,
    pub iterations: usize,
    pub converged: bool,
}

/// Nearest point of `hull` to `x`.
///
/// Frank–Wolfe with away steps and exact line search runs until the duality
/// gap drops below `tol·(1 + ‖x‖²)`. The active set is then polished by
/// affine least-squares steps (minimum-norm-point cycles), which finish
/// small problems exactly.
pub fn project_onto_hull(x: &[f64], hull: &PointHull, tol: f64) -> Result<Projection> {
    if x.len() != hull.dimension {
        return Err(TlabError::validation("point and hull dimensions differ"));
    }
    if !(tol > 0.0) {
        return Err(TlabError::validation("tolerance must be positive"));
    }
    let v = &hull.generators;
    let k = v.len();
    let stop = tol * (1.0 + dot(x, x));
    let max_iter = 20_000;

    let start = (0..k)
        .min_by(|&a, &b| {
            let da = sub(&v[a], x);
            let db = sub(&v[b], x);
            dot(&da, &da).total_cmp(&dot(&db, &db))
        })
        .unwrap();
    let mut lam = vec![0.0; k];
    lam[start] = 1.0;
    let mut y = v[start].clone();
    let mut iterations = 0;

    let gradient = |y: &[f64]| -> Vec<f64> {
        let r = sub(y, x);
        v.iter().map(|vi| dot(vi, &r)).collect()
    };

    loop {
        let g = gradient(&y);
        let gy = dot(&y, &sub(&y, x));
        let s = (0..k).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        let fw_gap = gy - g[s];
        if fw_gap <= stop || iterations >= max_iter {
            break;
        }
        let a = (0..k)
            .filter(|&i| lam[i] > 0.0)
            .max_by(|&i, &j| g[i].total_cmp(&g[j]))
            .unwrap();
        let away_gap = g[a] - gy;
        let (dir, gmax, toward, fw) = if fw_gap >= away_gap {
            (sub(&v[s], &y), 1.0, s, true)
        } else {
            let la = lam[a];
            (sub(&y, &v[a]), if la < 1.0 { la / (1.0 - la) } else { f64::INFINITY }, a, false)
        };
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let gamma = (-dot(&sub(&y, x), &dir) / dd).clamp(0.0, gmax.min(1e300));
        if fw {
            for l in lam.iter_mut() {
                *l *= 1.0 - gamma;
            }
            lam[toward] += gamma;
        } else {
            for l in lam.iter_mut() {
                *l *= 1.0 + gamma;
            }
            lam[toward] -= gamma;
            if lam[toward] < 1e-15 {
                lam[toward] = 0.0;
            }
        }
        y = hull.combine(&lam);
        iterations += 1;
    }

    polish(x, hull, &mut lam);
    let y = hull.combine(&lam);
    let r = sub(x, &y);
    let distance = dot(&r, &r).sqrt();
    let obtuse_max = v
        .iter()
        .map(|vi| dot(&r, &sub(vi, &y)))
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = obtuse_max.max(0.0);
    let scale = 1.0 + dot(x, x).sqrt() + hull.scale();
    let inside = distance <= tol * scale;
    let witness = (!inside).then(|| HyperplaneWitness {
        anchor_value: dot(x, &r),
        normal: r.clone(),
        projection: y.clone(),
        distance,
    });
    Ok(Projection {
        point: y,
        weights: lam,
        distance,
        gap,
        inside,
        obtuse_max,
        witness,
        iterations,
        converged: gap <= stop,
    })
}

/// Minimum-norm-point cycles on `{v_i − x}` started from `lam`.
fn polish(x: &[f64], hull: &PointHull, lam: &mut [f64]) {
    let v = &hull.generators;
    let k = v.len();
    let p: Vec<Vec<f64>> = v.iter().map(|vi| sub(vi, x)).collect();
    for _major in 0..200 {
        for _minor in 0..200 {
            let active: Vec<usize> = (0..k).filter(|&i| lam[i] > 0.0).collect();
            let Some(mu) = affine_minimizer(&p, &active) else {
                return;
            };
            if mu.iter().all(|&m| m >= 0.0) {
                for (&i, &m) in active.iter().zip(&mu) {
                    lam[i] = m;
                }
                break;
            }
            let mut theta = 1.0f64;
            for (&i, &m) in active.iter().zip(&mu) {
                if m < 0.0 {
                    theta = theta.min(lam[i] / (lam[i] - m));
                }
            }
            for (&i, &m) in active.iter().zip(&mu) {
                lam[i] += theta * (m - lam[i]);
                if lam[i] <= 1e-15 {
                    lam[i] = 0.0;
                }
            }
        }
        let total: f64 = lam.iter().sum();
        for l in lam.iter_mut() {
            *l /= total;
        }
        let y = hull.combine(lam);
        let r = sub(&y, x);
        let ry = dot(&r, &sub(&y, x));
        let (s, gs) = (0..k)
            .map(|i| (i, dot(&r, &p[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if lam[s] > 0.0 || ry - gs <= 1e-14 * (1.0 + ry.abs()) {
            return;
        }
        // bring the improving vertex in with a zero weight then re-minimize
        lam[s] = 1e-300;
    }
}

/// Minimizer of `‖Σ μ_i p_i‖²` subject to `Σ μ_i = 1` over `active`.
fn affine_minimizer(p: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let m = active.len();
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate() {
            kkt[(a, b)] = dot(&p[i], &p[j]);
        }
        kkt[(a, m)] = 1.0;
        kkt[(m, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = kkt.lu().solve(&rhs)?;
    let mu: Vec<f64> = (0..m).map(|a| sol[a]).collect();
    mu.iter().all(|v| v.is_finite()).then_some(mu)
}

/// Saddle point of `(a, b) ↦ a·b` over `hull(A) × hull(B)`: `a` maximizes,
/// `b` minimizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleResult {
    pub a_star: Vec<f64>,
    pub b_star: Vec<f64>,
    /// Mixed strategy over the generators of `A`.
    pub a_weights: Vec<f64>,
    pub b_weights: Vec<f64>,
    pub value: f64,
    /// `max_i a_i·b* − min_j a*·b_j`.
    pub gap: f64,
    pub lower: f64,
    pub upper: f64,
    /// Whether `gap ≤ tol·(1 + max|G_ij|)`.
    pub within_tol: bool,
}

/// Solves the matrix game `G_ij = a_i·b_j` by one LP per player.
pub fn minimax_solve(a: &PointHull, b: &PointHull, tol: f64) -> Result<SaddleResult> {
    if a.dimension != b.dimension {
        return Err(TlabError::validation("hulls live in different dimensions"));
    }
    let (m, n) = (a.generators.len(), b.generators.len());
    let g: Vec<Vec<f64>> = a
        .generators
        .iter()
        .map(|ai| b.generators.iter().map(|bj| dot(ai, bj)).collect())
        .collect();
    let gmin = g.iter().flatten().fold(f64::INFINITY, |x, &y| x.min(y));
    let gmax = g.iter().flatten().fold(f64::NEG_INFINITY, |x, &y| x.max(y));

    // row player: max v s.t. Σ_i p_i G_ij ≥ v
    let mut cost = vec![0.0; m + 1];
    cost[m] = -1.0;
    let mut hi = vec![1.0; m + 1];
    hi[m] = gmax;
    let mut lo = vec![0.0; m + 1];
    lo[m] = gmin;
    let mut lp = DualSimplex::new(cost, lo, hi)?;
    for j in 0..n {
        let mut row: Vec<f64> = (0..m).map(|i| g[i][j]).collect();
        row.push(-1.0);
        lp.add_row(row, 0.0, f64::INFINITY)?;
    }
    let mut simplex_row = vec![1.0; m];
    simplex_row.push(0.0);
    lp.add_row(simplex_row, 1.0, 1.0)?;
    solve_or_fail(&mut lp)?;
    let p = normalize(&lp.primal()[..m]);

    // column player: min w s.t. Σ_j G_ij q_j ≤ w
    let mut cost = vec![0.0; n + 1];
    cost[n] = 1.0;
    let mut hi = vec![1.0; n + 1];
    hi[n] = gmax;
    let mut lo = vec![0.0; n + 1];
    lo[n] = gmin;
    let mut lp = DualSimplex::new(cost, lo, hi)?;
    for row_g in &g {
        let mut row = row_g.clone();
        row.push(-1.0);
        lp.add_row(row, f64::NEG_INFINITY, 0.0)?;
    }
    let mut simplex_row = vec![1.0; n];
    simplex_row.push(0.0);
    lp.add_row(simplex_row, 1.0, 1.0)?;
    solve_or_fail(&mut lp)?;
    let q = normalize(&lp.primal()[..n]);

    let a_star = a.combine(&p);
    let b_star = b.combine(&q);
    let upper = a
        .generators
        .iter()
        .map(|ai| dot(ai, &b_star))
        .fold(f64::NEG_INFINITY, f64::max);
    let lower = b
        .generators
        .iter()
        .map(|bj| dot(&a_star, bj))
        .fold(f64::INFINITY, f64::min);
    let gap = (upper - lower).max(0.0);
    let scale = 1.0 + gmax.abs().max(gmin.abs());
    Ok(SaddleResult {
        a_star,
        b_star,
        a_weights: p,
        b_weights: q,
        value: 0.5 * (upper + lower),
        gap,
        lower,
        upper,
        within_tol: gap <= tol * scale,
    })
}

fn solve_or_fail(lp: &mut DualSimplex) -> Result<()> {
    match lp.solve(100_000) {
        LpStatus::Optimal => Ok(()),
        other => Err(TlabError::Internal(format!("game LP ended with {other:?}"))),
    }
}

fn normalize(w: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    clipped.iter().map(|v| v / s).collect()
}

/// Bounds on the dual norm `‖φ‖* = sup{|⟨f, φ⟩| : ‖f̂‖_∞ ≤ 1}` for `φ` on
/// `[N]` (entry `i` of `phi` is `φ(i + 1)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualNormReport {
    /// Certified upper bound from the Lagrangian of the relaxed LP.
    pub upper: f64,
    /// Best value of `Re⟨f, φ⟩` over explicit test functions with
    /// `‖f̂‖_∞ ≤ 1`.
    pub lower: f64,
    /// Optimum of the generated LP.
    pub lp_value: f64,
    pub status: LpStatus,
    pub rows: usize,
    pub grid_m: usize,
    pub directions: usize,
}

/// Upper bound on `‖φ‖*` by maximizing `Re⟨f, φ⟩` under the constraints
/// `Re[f̂(α_j) ū_d] ≤ 1` on a grid with `M ≥ N` points.
///
/// With `M ≥ N` those constraints give `Σ|f(n)|² ≤ sec²(π/D) < 4`, so the box
/// `|Re f|, |Im f| ≤ 2` cuts nothing off and the LP is a relaxation of the
/// unit ball.
pub fn dual_norm_upper(phi: &[Complex64], grid: &FrequencyGrid, directions: usize) -> Result<DualNormReport> {
    let n = phi.len();
    let m = grid.m();
    if n == 0 {
        return Err(TlabError::validation("φ needs N ≥ 1"));
    }
    if m < n {
        return Err(TlabError::validation(format!("dual norm needs grid M ≥ N, got M = {m} < N = {n}")));
    }
    if directions < 3 {
        return Err(TlabError::validation("need at least 3 linearization directions"));
    }
    if phi.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(DualNormReport {
            upper: 0.0,
            lower: 0.0,
            lp_value: 0.0,
            status: LpStatus::Optimal,
            rows: 0,
            grid_m: m,
            directions,
        });
    }
    // variables: Re f(1..N), Im f(1..N)
    let mut cost: Vec<f64> = phi.iter().map(|z| -z.re).collect();
    cost.extend(phi.iter().map(|z| -z.im));
    let mut lp = DualSimplex::new(cost, vec![-2.0; 2 * n], vec![2.0; 2 * n])?;
    let cos_tab: Vec<f64> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64).cos()).collect();
    let sin_tab: Vec<f64> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64).sin()).collect();
    let dir: Vec<(f64, f64)> = (0..directions)
        .map(|d| {
            let th = 2.0 * PI * d as f64 / directions as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let mut present = HashSet::new();
    let add = |lp: &mut DualSimplex, present: &mut HashSet<(usize, usize)>, j: usize, d: usize| -> Result<()> {
        if !present.insert((j, d)) {
            return Ok(());
        }
        let (c, s) = dir[d];
        let mut row = vec![0.0; 2 * n];
        for x in 1..=n {
            let k = (j * x) % m;
            // Re[(a + ib) e(jx/M) ū] = a cos(ω − θ) − b sin(ω − θ)
            let cw = cos_tab[k] * c + sin_tab[k] * s;
            let sw = sin_tab[k] * c - cos_tab[k] * s;
            row[x - 1] = cw;
            row[n + x - 1] = -sw;
        }
        lp.add_row(row, f64::NEG_INFINITY, 1.0)?;
        Ok(())
    };
    for d in 0..directions {
        add(&mut lp, &mut present, 0, d)?;
    }
    let nearest = |z: Complex64| -> usize {
        let a = z.arg().rem_euclid(2.0 * PI);
        ((a / (2.0 * PI / directions as f64)).round() as usize) % directions
    };
    let mut status;
    let mut best_lower = phi.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    loop {
        status = lp.solve(200_000);
        let x = lp.primal();
        let f: Vec<Complex64> = (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect();
        let fv = fourier_grid_of(f.iter().enumerate().map(|(i, z)| (i as i64 + 1, *z)), m);
        if status != LpStatus::Optimal {
            break;
        }
        let mut viol: Vec<(f64, usize, usize)> = (0..m)
            .filter_map(|j| {
                let d = nearest(fv[j]);
                let v = fv[j].re * dir[d].0 + fv[j].im * dir[d].1 - 1.0;
                (v > 1e-9 && !present.contains(&(j, d))).then_some((v, j, d))
            })
            .collect();
        if viol.is_empty() {
            break;
        }
        viol.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, j, d) in viol.iter().take(64) {
            add(&mut lp, &mut present, j, d)?;
        }
    }
    let x = lp.primal();
    let f: Vec<Complex64> = (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect();
    let lp_value = -lp.objective();
    let upper = -lp.lagrangian_bound(&lp.row_duals());

    // test functions: the LP solution and φ itself, each scaled to norm ≤ 1
    for cand in [&f, &phi.to_vec()] {
        let sup = complex_sup_upper(cand, m.max(4096).max(8 * n));
        if sup > 0.0 {
            let inner: f64 = cand.iter().zip(phi).map(|(a, b)| (a * b.conj()).re).sum();
            best_lower = best_lower.max(inner / sup);
        }
    }
    Ok(DualNormReport {
        upper,
        lower: best_lower,
        lp_value,
        status,
        rows: lp.num_rows(),
        grid_m: m,
        directions,
    })
}

/// Certified upper bound for `‖f̂‖_∞` of a complex `f` on `[N]`, via the
/// real and imaginary parts separately.
fn complex_sup_upper(f: &[Complex64], m: usize) -> f64 {
    let grid = FrequencyGrid::new(m).expect("positive grid");
    let re = DiscreteSignal::new(1, f.iter().map(|z| z.re).collect()).expect("finite");
    let im = DiscreteSignal::new(1, f.iter().map(|z| z.im).collect()).expect("finite");
    let a = crate::signal::fourier_sup(&re, &grid).certified_upper;
    let b = crate::signal::fourier_sup(&im, &grid).certified_upper;
    let l1: f64 = f.iter().map(|z| z.norm()).sum();
    (a + b).min(l1)
}

/// Reads one point per CSV row. A first row that does not parse as numbers
/// is taken as a header.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(p) => points.push(p),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(TlabError::Parse(format!("row {}: {e}", i + 1))),
        }
    }
    if points.is_empty() {
        return Err(TlabError::validation("no points in input"));
    }
    Ok(points)
}

pub fn load_points(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    read_points_csv(std::fs::File::open(path)?)
}

/// `(ψ₊, 1_{ψ ≥ 0})`.
pub fn positive_part_split(psi: &DiscreteSignal) -> (DiscreteSignal, DiscreteSignal) {
    (psi.map(|v| v.max(0.0)), psi.map(|v| if v >= 0.0 { 1.0 } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_projection() {
        let hull = PointHull::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let p = project_onto_hull(&[2.0, 0.0], &hull, DEFAULT_TOL).unwrap();
        assert!((p.point[0] - 1.0).abs() < 1e-12 && p.point[1].abs() < 1e-12);
        let w = p.witness.unwrap();
        assert!((w.normal[0] - 1.0).abs() < 1e-12 && w.normal[1].abs() < 1e-12);
    }

    #[test]
    fn centroid_is_inside() {
        let hull = PointHull::new(vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let p = project_onto_hull(&[1.0, 1.0], &hull, DEFAULT_TOL).unwrap();
        assert!(p.inside);
        assert!(p.witness.is_none());
    }

    #[test]
    fn projection_to_hypotenuse() {
        let hull = PointHull::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let p = project_onto_hull(&[1.0, 1.0], &hull, DEFAULT_TOL).unwrap();
        assert!((p.point[0] - 0.5).abs() < 1e-12 && (p.point[1] - 0.5).abs() < 1e-12);
        assert!((p.distance - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singleton_game() {
        let a = PointHull::new(vec![vec![1.0, 2.0]]).unwrap();
        let b = PointHull::new(vec![vec![3.0, -1.0]]).unwrap();
        let s = minimax_solve(&a, &b, DEFAULT_TOL).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.a_star, vec![1.0, 2.0]);
    }

    #[test]
    fn identity_game() {
        let e = PointHull::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = minimax_solve(&e, &e, DEFAULT_TOL).unwrap();
        assert!((s.value - 0.5).abs() < 1e-9);
        assert!((s.a_weights[0] - 0.5).abs() < 1e-9);
        assert!((s.b_weights[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dual_norm_of_unit_mass() {
        let mut phi = vec![Complex64::new(0.0, 0.0); 8];
        phi[3] = Complex64::new(1.0, 0.0);
        let r = dual_norm_upper(&phi, &FrequencyGrid::new(16).unwrap(), 16).unwrap();
        let sec = 1.0 / (PI / 16.0).cos();
        assert!(r.upper >= 1.0 - 1e-9 && r.upper <= sec + 1e-9, "{}", r.upper);
        assert!((r.lower - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dual_norm_of_character() {
        let n = 12;
        let alpha: f64 = 0.3;
        let phi: Vec<Complex64> = (1..=n).map(|x| crate::signal::unit_phase(alpha * x as f64)).collect();
        let r = dual_norm_upper(&phi, &FrequencyGrid::new(64).unwrap(), 16).unwrap();
        // f = e_α / N has ‖f̂‖_∞ = 1 and ⟨f, φ⟩ = 1
        assert!(r.lower >= 1.0 - 1e-6, "{}", r.lower);
        assert!(r.upper >= r.lower - 1e-9);
        assert!(r.upper <= 1.5, "{}", r.upper);
    }

    #[test]
    fn dual_norm_of_zero() {
        let r = dual_norm_upper(&[Complex64::new(0.0, 0.0); 5], &FrequencyGrid::new(8).unwrap(), 16).unwrap();
        assert_eq!(r.upper, 0.0);
    }

    #[test]
    fn dual_norm_needs_fine_grid() {
        assert!(dual_norm_upper(&[Complex64::new(1.0, 0.0); 10], &FrequencyGrid::new(8).unwrap(), 16).is_err());
    }

    #[test]
    fn points_with_header() {
        let pts = read_points_csv("x,y\n1,2\n3.5,-1\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![vec![1.0, 2.0], vec![3.5, -1.0]]);
        assert!(read_points_csv("1,2\nfoo,3\n".as_bytes()).is_err());
    }

    #[test]
    fn positive_part_example() {
        let psi = DiscreteSignal::new(1, vec![1.0, -2.0, 3.0]).unwrap();
        let (plus, ind) = positive_part_split(&psi);
        assert_eq!(plus.values(), &[1.0, 0.0, 3.0]);
        assert_eq!(ind.values(), &[1.0, 0.0, 1.0]);
        assert_eq!(psi.mul(&ind), plus);
    }
}
