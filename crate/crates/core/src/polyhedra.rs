//! Exact polyhedral computation over the rationals: linear programming,
//! Fourier–Motzkin projection, redundancy removal, vertex enumeration in
//! three dimensions, and equality of feasible sets.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{serde_rational, serde_rational_vec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vertex enumeration needs a 3-dimensional polyhedron, got dimension {0}")]
    NotThreeDimensional(usize),
}

/// One inequality `coeffs · x >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    #[serde(with = "serde_rational_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

impl Inequality {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Inequality { coeffs, rhs }
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        dot(&self.coeffs, x) >= self.rhs
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Scales the row so the coefficients are coprime integers. Zero rows are
    /// left as they are.
    pub fn normalized(&self) -> Inequality {
        if self.is_trivial() {
            return self.clone();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let scale = Rational::new(lcm, gcd);
        Inequality {
            coeffs: self.coeffs.iter().map(|c| c * &scale).collect(),
            rhs: &self.rhs * &scale,
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "{mag}*x{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " >= {}", self.rhs)
    }
}

/// The set `{x : A x >= b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolyhedron {
    pub dim: usize,
    pub rows: Vec<Inequality>,
}

impl HPolyhedron {
    pub fn new(dim: usize) -> Self {
        HPolyhedron {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(dim: usize, rows: Vec<Inequality>) -> Result<Self, PolyError> {
        for (i, r) in rows.iter().enumerate() {
            if r.coeffs.len() != dim {
                return Err(PolyError::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {dim}",
                    r.coeffs.len()
                )));
            }
        }
        Ok(HPolyhedron { dim, rows })
    }

    /// `{x >= 0}` in the given dimension.
    pub fn orthant(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| Inequality::new(unit(dim, i), Rational::zero()))
            .collect();
        HPolyhedron { dim, rows }
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coeffs.len(), self.dim, "row length must equal dimension");
        self.rows.push(Inequality::new(coeffs, rhs));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of the first violated row, if any.
    pub fn first_violation(&self, x: &[Rational]) -> Result<Option<usize>, PolyError> {
        if x.len() != self.dim {
            return Err(PolyError::DimensionMismatch(format!(
                "point of length {} in dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.rows.iter().position(|r| !r.holds_at(x)))
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        matches!(self.first_violation(x), Ok(None))
    }

    /// The canonical empty set `{0 >= 1}`.
    pub fn empty_set(dim: usize) -> Self {
        HPolyhedron {
            dim,
            rows: vec![Inequality::new(
                vec![Rational::zero(); dim],
                Rational::one(),
            )],
        }
    }

    pub fn is_feasible(&self) -> bool {
        let zero = vec![Rational::zero(); self.dim];
        lp_solve(self, &zero, Sense::Minimize)
            .map(|r| r.status != LpStatus::Infeasible)
            .unwrap_or(false)
    }

    /// Whether every coordinate direction is a recession direction, which is
    /// the case when all coefficients are nonnegative.
    pub fn upward_closed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.coeffs.iter().all(|c| !c.is_negative()))
    }
}

impl fmt::Display for HPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of [`lp_solve`]. For `Unbounded` the witness is a feasible point;
/// for `Infeasible` it is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    pub optimum: Option<Rational>,
    pub witness: Vec<Rational>,
}

enum DualOutcome {
    Optimal(Vec<Rational>),
    /// The dual has no feasible point.
    Infeasible,
    /// The dual objective is unbounded, so the primal has no feasible point.
    Unbounded,
}

/// Dense simplex tableau over the constraint system `G y = h`, `y >= 0`,
/// with one artificial column per equation kept for the final multipliers.
struct Tableau {
    rows: usize,
    real_cols: usize,
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.real_cols + self.rows
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.rhs_col() + 1;
        let p = self.t[row][col].clone();
        if !p.is_one() {
            let inv = p.recip();
            for c in 0..width {
                if !self.t[row][c].is_zero() {
                    self.t[row][c] = &self.t[row][c] * &inv;
                }
            }
        }
        let pivot_row = self.t[row].clone();
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.t[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..width {
                if !pivot_row[c].is_zero() {
                    let delta = &factor * &pivot_row[c];
                    self.t[r][c] -= delta;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · y` by Bland's rule, entering only columns below
    /// `enter_limit`. Returns false if the objective is unbounded.
    fn maximize(&mut self, cost: &[Rational], enter_limit: usize) -> bool {
        let rhs = self.rhs_col();
        loop {
            let mut entering = None;
            for j in 0..enter_limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for i in 0..self.rows {
                    let a = &self.t[i][j];
                    if !a.is_zero() {
                        let cb = &cost[self.basis[i]];
                        if !cb.is_zero() {
                            d -= cb * a;
                        }
                    }
                }
                if d.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows {
                let a = &self.t[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

/// Solves `max b·y` s.t. `A^T y = c`, `y >= 0` and reads the primal
/// minimizer of `c·x` over `A x >= b` from the final multipliers.
fn solve_via_dual(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> DualOutcome {
    let m = a.len();
    let n = c.len();
    let mut signs = vec![Rational::one(); n];
    let mut t = vec![vec![Rational::zero(); m + n + 1]; n];
    for j in 0..n {
        let flip = c[j].is_negative();
        if flip {
            signs[j] = -Rational::one();
        }
        for (i, row) in a.iter().enumerate() {
            let v = &row[j];
            if !v.is_zero() {
                t[j][i] = if flip { -v.clone() } else { v.clone() };
            }
        }
        t[j][m + j] = Rational::one();
        t[j][m + n] = c[j].abs();
    }
    let mut tab = Tableau {
        rows: n,
        real_cols: m,
        t,
        basis: (m..m + n).collect(),
    };

    let mut phase1 = vec![Rational::zero(); m + n];
    for c in phase1.iter_mut().skip(m) {
        *c = -Rational::one();
    }
    tab.maximize(&phase1, m);
    let rhs = tab.rhs_col();
    let infeasibility = (0..n)
        .filter(|&i| tab.basis[i] >= m)
        .fold(Rational::zero(), |acc, i| acc + &tab.t[i][rhs]);
    if infeasibility.is_positive() {
        return DualOutcome::Infeasible;
    }
    for i in 0..n {
        if tab.basis[i] >= m {
            if let Some(j) = (0..m).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    let mut phase2 = vec![Rational::zero(); m + n];
    phase2[..m].clone_from_slice(b);
    if !tab.maximize(&phase2, m) {
        return DualOutcome::Unbounded;
    }
    let x = (0..n)
        .map(|j| {
            let pi = (0..n).fold(Rational::zero(), |acc, i| {
                let cb = &phase2[tab.basis[i]];
                if cb.is_zero() {
                    acc
                } else {
                    acc + cb * &tab.t[i][m + j]
                }
            });
            pi * &signs[j]
        })
        .collect();
    DualOutcome::Optimal(x)
}

/// Exact optimum of `objective · x` over the polyhedron.
pub fn lp_solve(
    poly: &HPolyhedron,
    objective: &[Rational],
    sense: Sense,
) -> Result<LpResult, PolyError> {
    if objective.len() != poly.dim {
        return Err(PolyError::DimensionMismatch(format!(
            "objective of length {} in dimension {}",
            objective.len(),
            poly.dim
        )));
    }
    let c: Vec<Rational> = match sense {
        Sense::Minimize => objective.to_vec(),
        Sense::Maximize => objective.iter().map(|v| -v.clone()).collect(),
    };
    let a: Vec<Vec<Rational>> = poly.rows.iter().map(|r| r.coeffs.clone()).collect();
    let b: Vec<Rational> = poly.rows.iter().map(|r| r.rhs.clone()).collect();

    let infeasible = LpResult {
        status: LpStatus::Infeasible,
        optimum: None,
        witness: Vec::new(),
    };
    let result = match solve_via_dual(&a, &b, &c) {
        DualOutcome::Optimal(x) => {
            let value = dot(objective, &x);
            LpResult {
                status: LpStatus::Optimal,
                optimum: Some(value),
                witness: x,
            }
        }
        DualOutcome::Unbounded => infeasible,
        DualOutcome::Infeasible => {
            let zero = vec![Rational::zero(); poly.dim];
            match solve_via_dual(&a, &b, &zero) {
                DualOutcome::Optimal(x) => LpResult {
                    status: LpStatus::Unbounded,
                    optimum: None,
                    witness: x,
                },
                _ => infeasible,
            }
        }
    };
    debug_assert!(result.status == LpStatus::Infeasible || poly.contains(&result.witness));
    Ok(result)
}

/// Drops every row implied by the others. Rows are first normalized and
/// duplicates merged; an infeasible system becomes [`HPolyhedron::empty_set`].
pub fn remove_redundant(poly: &HPolyhedron) -> HPolyhedron {
    let mut rows: Vec<Inequality> = Vec::with_capacity(poly.rows.len());
    for r in &poly.rows {
        let r = r.normalized();
        if r.is_trivial() {
            if r.rhs.is_positive() {
                return HPolyhedron::empty_set(poly.dim);
            }
            continue;
        }
        if let Some(existing) = rows.iter_mut().find(|e| e.coeffs == r.coeffs) {
            if r.rhs > existing.rhs {
                existing.rhs = r.rhs;
            }
        } else {
            rows.push(r);
        }
    }
    let all = HPolyhedron {
        dim: poly.dim,
        rows: rows.clone(),
    };
    if !all.is_feasible() {
        return HPolyhedron::empty_set(poly.dim);
    }

    let mut kept: Vec<Inequality> = Vec::new();
    for i in 0..rows.len() {
        let others: Vec<Inequality> = kept
            .iter()
            .cloned()
            .chain(rows[i + 1..].iter().cloned())
            .collect();
        let rest = HPolyhedron {
            dim: poly.dim,
            rows: others,
        };
        let res = lp_solve(&rest, &rows[i].coeffs, Sense::Minimize).expect("dimensions agree");
        let implied = res.status == LpStatus::Optimal
            && res.optimum.as_ref().is_some_and(|v| *v >= rows[i].rhs);
        if !implied {
            kept.push(rows[i].clone());
        }
    }
    HPolyhedron {
        dim: poly.dim,
        rows: kept,
    }
}

/// Eliminates one coordinate, returning a system in one fewer dimension.
fn eliminate_one(poly: &HPolyhedron, var: usize) -> HPolyhedron {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    let drop_col = |coeffs: &[Rational]| -> Vec<Rational> {
        coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != var)
            .map(|(_, c)| c.clone())
            .collect()
    };
    for r in &poly.rows {
        let c = &r.coeffs[var];
        if c.is_positive() {
            pos.push(r);
        } else if c.is_negative() {
            neg.push(r);
        } else {
            out.push(Inequality::new(drop_col(&r.coeffs), r.rhs.clone()));
        }
    }
    for p in &pos {
        for q in &neg {
            let wp = -q.coeffs[var].clone();
            let wq = p.coeffs[var].clone();
            let coeffs: Vec<Rational> = p
                .coeffs
                .iter()
                .zip(&q.coeffs)
                .map(|(a, b)| a * &wp + b * &wq)
                .collect();
            let rhs = &p.rhs * &wp + &q.rhs * &wq;
            out.push(Inequality::new(drop_col(&coeffs), rhs));
        }
    }
    HPolyhedron {
        dim: poly.dim - 1,
        rows: out,
    }
}

/// Projects onto the coordinates not listed in `drop`, eliminating in
/// ascending index order with redundancy removal after each step.
pub fn fm_eliminate(poly: &HPolyhedron, drop: &[usize]) -> Result<HPolyhedron, PolyError> {
    if let Some(&bad) = drop.iter().find(|&&i| i >= poly.dim) {
        return Err(PolyError::DimensionMismatch(format!(
            "cannot drop coordinate {bad} of a {}-dimensional system",
            poly.dim
        )));
    }
    let mut order: Vec<usize> = drop.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut current = remove_redundant(poly);
    for (eliminated, &var) in order.iter().enumerate() {
        current = eliminate_one(&current, var - eliminated);
        current = remove_redundant(&current);
    }
    Ok(current)
}

fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

fn solve3(rows: [&Inequality; 3]) -> Option<Vec<Rational>> {
    let m: [[Rational; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| rows[i].coeffs[j].clone()));
    let det = det3(&m);
    if det.is_zero() {
        return None;
    }
    let mut x = Vec::with_capacity(3);
    for col in 0..3 {
        let mut mc = m.clone();
        for (i, row) in mc.iter_mut().enumerate() {
            row[col] = rows[i].rhs.clone();
        }
        x.push(det3(&mc) / &det);
    }
    Some(x)
}

/// All vertices of a 3-dimensional polyhedron, sorted lexicographically.
pub fn vertices_3d(poly: &HPolyhedron) -> Result<Vec<Vec<Rational>>, PolyError> {
    if poly.dim != 3 {
        return Err(PolyError::NotThreeDimensional(poly.dim));
    }
    let rows = &poly.rows;
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                if let Some(x) = solve3([&rows[i], &rows[j], &rows[k]]) {
                    if poly.contains(&x) && !out.contains(&x) {
                        out.push(x);
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Result of comparing two polyhedra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    /// `point` lies in the first polyhedron but not the second when
    /// `in_first` is true, and the other way round otherwise.
    Differ {
        point: Vec<Rational>,
        in_first: bool,
    },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

/// A point of `inside` violating `row`, if one exists.
fn escape_point(inside: &HPolyhedron, row: &Inequality) -> Option<Vec<Rational>> {
    let res = lp_solve(inside, &row.coeffs, Sense::Minimize).expect("dimensions agree");
    match res.status {
        LpStatus::Infeasible => None,
        LpStatus::Optimal => {
            if res.optimum.as_ref().is_some_and(|v| *v < row.rhs) {
                Some(res.witness)
            } else {
                None
            }
        }
        LpStatus::Unbounded => {
            let mut probe = inside.clone();
            probe.push(
                row.coeffs.iter().map(|c| -c.clone()).collect(),
                -(&row.rhs - Rational::one()),
            );
            let r = lp_solve(&probe, &vec![Rational::zero(); inside.dim], Sense::Minimize)
                .expect("dimensions agree");
            (r.status != LpStatus::Infeasible).then_some(r.witness)
        }
    }
}

/// Decides whether two polyhedra have the same feasible set.
pub fn poly_equal(p: &HPolyhedron, q: &HPolyhedron) -> Result<Comparison, PolyError> {
    if p.dim != q.dim {
        return Err(PolyError::DimensionMismatch(format!(
            "dimensions {} and {}",
            p.dim, q.dim
        )));
    }
    for row in &q.rows {
        if let Some(point) = escape_point(p, row) {
            return Ok(Comparison::Differ {
                point,
                in_first: true,
            });
        }
    }
    for row in &p.rows {
        if let Some(point) = escape_point(q, row) {
            return Ok(Comparison::Differ {
                point,
                in_first: false,
            });
        }
    }
    Ok(Comparison::Equal)
}
