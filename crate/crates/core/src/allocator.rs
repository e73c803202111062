//! The protocol catalog and allocation of protocol usage to demands.
//!
//! An allocation `λ` assigns each of the twenty protocols an amortized usage
//! amount. It is sound for demands `n` and budget `Δ` when the spent cost
//! `Dλ` stays within `Δ` and every demand row of `Eλ` reaches `n`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::gadgets::{BoxKind, GadgetKind};
use crate::polyhedra::{
    fm_eliminate, lp_solve, vertices_3d, HPolyhedron, LpStatus, PolyError, Sense,
};
use crate::rational::{
    int, rat, serde_rational, serde_rational_option, serde_rational_vec, Rational,
};
use crate::regions::region_standard;
use crate::standard_form::NVector;

pub const PROTOCOLS: usize = 20;

/// Twice the amortized cost of each protocol, per transmitter.
const DOUBLED_COST: [[i64; PROTOCOLS]; 3] = [
    [2, 0, 0, 1, 1, 0, 2, 1, 1, 1, 1, 1, 0, 1, 0, 1, 2, 2, 2, 2],
    [0, 2, 0, 1, 0, 1, 1, 2, 1, 1, 0, 1, 1, 0, 1, 1, 2, 2, 2, 2],
    [0, 0, 2, 0, 1, 1, 1, 1, 2, 0, 1, 0, 1, 1, 1, 1, 2, 2, 2, 2],
];

/// Protocols serving each demand row `(n123, n12, n13, n23, no, n1, n2, n3)`.
const SERVING: [&[u8]; 8] = [
    &[16, 17, 18, 19, 20],
    &[4],
    &[5],
    &[6],
    &[7, 8, 9, 17],
    &[1, 10, 11, 18, 19],
    &[2, 12, 13, 18, 20],
    &[3, 14, 15, 19, 20],
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocError {
    #[error("no allocation meets the demands within the budget")]
    Infeasible,
    #[error("budget violates region row {row}")]
    NotInRegion { row: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("bad budget: {0}")]
    BadBudget(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One column of the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolInfo {
    pub id: u8,
    /// Amortized qudits per transmitter for one demanded dimension.
    pub cost: [Rational; 3],
    /// Demand rows served, in `NVector` order.
    pub serves: [bool; 8],
    /// Dimensions per indivisible unit.
    pub unit: usize,
    pub box_kind: BoxKind,
}

pub fn protocol_info(id: u8) -> ProtocolInfo {
    assert!((1..=20).contains(&id), "protocol ids run from 1 to 20");
    let j = (id - 1) as usize;
    ProtocolInfo {
        id,
        cost: std::array::from_fn(|k| rat(DOUBLED_COST[k][j], 2)),
        serves: std::array::from_fn(|r| SERVING[r].contains(&id)),
        unit: GadgetKind::protocol(id).unit_dims(),
        box_kind: match id {
            1..=3 => BoxKind::Tqc,
            4..=16 => BoxKind::Box1,
            _ => BoxKind::Box2,
        },
    }
}

pub fn catalog() -> Vec<ProtocolInfo> {
    (1..=20).map(protocol_info).collect()
}

/// The 3×20 cost matrix.
pub fn cost_matrix() -> Vec<Vec<Rational>> {
    (0..3)
        .map(|k| DOUBLED_COST[k].iter().map(|&v| rat(v, 2)).collect())
        .collect()
}

/// The 8×20 demand matrix.
pub fn demand_matrix() -> Vec<Vec<u8>> {
    (0..8)
        .map(|r| (1..=20).map(|p| SERVING[r].contains(&p) as u8).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    #[serde(with = "serde_rational_vec")]
    pub lambda: Vec<Rational>,
}

impl Default for Allocation {
    fn default() -> Self {
        Allocation {
            lambda: vec![Rational::zero(); PROTOCOLS],
        }
    }
}

impl Allocation {
    pub fn amount(&self, protocol: u8) -> &Rational {
        &self.lambda[(protocol - 1) as usize]
    }

    pub fn add(&mut self, protocol: u8, amount: &Rational) {
        self.lambda[(protocol - 1) as usize] += amount;
    }

    /// `Dλ`.
    pub fn cost(&self) -> [Rational; 3] {
        std::array::from_fn(|k| {
            self.lambda
                .iter()
                .zip(DOUBLED_COST[k])
                .fold(Rational::zero(), |acc, (l, c)| acc + l * rat(c, 2))
        })
    }

    /// `Eλ`.
    pub fn served(&self) -> [Rational; 8] {
        std::array::from_fn(|r| {
            SERVING[r]
                .iter()
                .fold(Rational::zero(), |acc, &p| acc + self.amount(p))
        })
    }

    /// Nonzero entries as `(protocol, amount)`.
    pub fn support(&self) -> Vec<(u8, Rational)> {
        self.lambda
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j as u8 + 1, v.clone()))
            .collect()
    }

    pub fn is_sound(&self, n: &NVector, budget: &[Rational]) -> bool {
        self.lambda.iter().all(|v| !v.is_negative())
            && self.cost().iter().zip(budget).all(|(c, b)| c <= b)
            && self
                .served()
                .iter()
                .zip(n.as_array())
                .all(|(s, d)| *s >= int(d as i64))
    }
}

fn check_budget(budget: &[Rational]) -> Result<(), AllocError> {
    if budget.len() != 3 {
        return Err(AllocError::BadBudget(format!(
            "expected 3 entries, got {}",
            budget.len()
        )));
    }
    if budget.iter().any(Signed::is_negative) {
        return Err(AllocError::BadBudget("entries must be non-negative".into()));
    }
    Ok(())
}

fn unit_row(dim: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[j] = int(1);
    v
}

/// Exact LP allocation minimizing total usage; ties resolve by the
/// simplex's smallest-index rule.
pub fn allocate_lp(n: &NVector, budget: &[Rational]) -> Result<Allocation, AllocError> {
    check_budget(budget)?;
    let mut poly = HPolyhedron::new(PROTOCOLS);
    for (k, b) in budget.iter().enumerate() {
        poly.push(
            DOUBLED_COST[k].iter().map(|&c| rat(-c, 2)).collect(),
            -b.clone(),
        );
    }
    for (r, d) in n.as_array().into_iter().enumerate() {
        poly.push(
            (1..=20)
                .map(|p| int(SERVING[r].contains(&p) as i64))
                .collect(),
            int(d as i64),
        );
    }
    for j in 0..PROTOCOLS {
        poly.push(unit_row(PROTOCOLS, j), Rational::zero());
    }
    let res = lp_solve(&poly, &vec![int(1); PROTOCOLS], Sense::Minimize)?;
    match res.status {
        LpStatus::Optimal => Ok(Allocation {
            lambda: res.witness,
        }),
        _ => Err(AllocError::Infeasible),
    }
}

/// Why a protocol amount was imported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    Step1,
    Step2,
    CoupledSurplus,
    /// A corner recipe such as `corner-5a`.
    Corner(String),
    PrivateFill,
    /// The exact LP replaced a failed recipe.
    Fallback,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::Step1 => f.write_str("step-1"),
            Reason::Step2 => f.write_str("step-2"),
            Reason::CoupledSurplus => f.write_str("coupled-surplus"),
            Reason::Corner(s) => f.write_str(s),
            Reason::PrivateFill => f.write_str("private-fill"),
            Reason::Fallback => f.write_str("fallback"),
        }
    }
}

impl Serialize for Reason {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub protocol: u8,
    #[serde(with = "serde_rational")]
    pub amount: Rational,
    pub reason: Reason,
}

/// Intermediate scalars of the constructive path.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Splits {
    pub n_tilde: usize,
    pub no_rest: usize,
    pub n123_rest: usize,
    #[serde(with = "serde_rational_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub b: Vec<Rational>,
    #[serde(with = "serde_rational_option")]
    pub gamma: Option<Rational>,
}

/// A budget corner and its weight in the convex decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corner {
    pub recipe: String,
    #[serde(with = "serde_rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AllocationTrace {
    pub steps: Vec<TraceStep>,
    pub splits: Splits,
    pub corners: Vec<Corner>,
    pub fell_back: bool,
}

impl AllocationTrace {
    pub fn replay(&self) -> Allocation {
        let mut a = Allocation::default();
        for s in &self.steps {
            a.add(s.protocol, &s.amount);
        }
        a
    }
}

#[derive(Default)]
struct Recorder {
    alloc: Allocation,
    steps: Vec<TraceStep>,
}

impl Recorder {
    fn import(&mut self, protocol: u8, amount: Rational, reason: Reason) {
        if amount.is_zero() {
            return;
        }
        self.alloc.add(protocol, &amount);
        self.steps.push(TraceStep {
            protocol,
            amount,
            reason,
        });
    }
}

fn half(v: &Rational) -> Rational {
    v / int(2)
}

/// Superdense protocol carrying `owner`'s private symbols with `helper`'s
/// entanglement.
fn superdense(owner: usize, helper: usize) -> u8 {
    match (owner, helper) {
        (0, 1) => 10,
        (0, 2) => 11,
        (1, 0) => 12,
        (1, 2) => 13,
        (2, 0) => 14,
        (2, 1) => 15,
        _ => unreachable!("owner and helper must differ"),
    }
}

/// Three-party protocol serving the private demands of `i` and `j`.
fn paired_private(i: usize, j: usize) -> u8 {
    match (i.min(j), i.max(j)) {
        (0, 1) => 18,
        (0, 2) => 19,
        (1, 2) => 20,
        _ => unreachable!("distinct transmitters"),
    }
}

/// Rewrites a protocol stated for canonical transmitter order; canonical
/// transmitter `c` is actual transmitter `perm[c]`.
fn permute_protocol(p: u8, perm: [usize; 3]) -> u8 {
    match p {
        1..=3 => 1 + perm[(p - 1) as usize] as u8,
        10..=15 => {
            let (o, h) = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)][(p - 10) as usize];
            superdense(perm[o], perm[h])
        }
        18..=20 => {
            let (i, j) = [(0, 1), (0, 2), (1, 2)][(p - 18) as usize];
            paired_private(perm[i], perm[j])
        }
        _ => p,
    }
}

fn im_steps(demands: &[Rational], budget: &[Rational]) -> Result<Vec<(u8, Rational)>, AllocError> {
    if demands.len() != 3 || budget.len() != 3 {
        return Err(AllocError::BadBudget(
            "expected three demands and budgets".into(),
        ));
    }
    let slack: Vec<Rational> = (0..3).map(|i| &budget[i] - half(&demands[i])).collect();
    if let Some(i) = slack.iter().position(Signed::is_negative) {
        return Err(AllocError::HypothesisViolated(format!(
            "budget {} is below half the demand {}",
            budget[i], demands[i]
        )));
    }
    let total_demand: Rational = demands.iter().sum();
    let total_budget: Rational = budget.iter().sum();
    if total_budget < total_demand {
        return Err(AllocError::HypothesisViolated(format!(
            "total budget {total_budget} is below total demand {total_demand}"
        )));
    }
    if total_demand.is_zero() {
        return Ok(Vec::new());
    }
    // slack lies in the simplex scaled by its total; its barycentric
    // coordinates weight the three corners where one transmitter pays for
    // everything beyond half its own demand
    let total_slack: Rational = slack.iter().sum();
    let mut out: Vec<(u8, Rational)> = Vec::new();
    for big in 0..3 {
        let w = &slack[big] / &total_slack;
        if w.is_zero() {
            continue;
        }
        out.push((1 + big as u8, &w * &demands[big]));
        for owner in (0..3).filter(|&o| o != big) {
            out.push((superdense(owner, big), &w * &demands[owner]));
        }
    }
    Ok(out)
}

/// Private demands served by TQC and superdense coding alone, from a budget
/// with `budget_i >= demand_i / 2` and total at least the total demand.
pub fn allocate_im(demands: &[Rational], budget: &[Rational]) -> Result<Allocation, AllocError> {
    let mut a = Allocation::default();
    for (p, v) in im_steps(demands, budget)? {
        a.add(p, &v);
    }
    Ok(a)
}

/// A corner family of the reduced budget region after the first two steps,
/// stated for one transmitter order.
struct CornerFamily {
    point: fn(&Rational, &[Rational; 3], &Rational) -> [Rational; 3],
    recipes: &'static [(
        &'static str,
        fn(&Rational, &[Rational; 3]) -> Vec<(u8, Rational)>,
    )],
}

fn common_two(np: &Rational, n: &[Rational; 3]) -> [Rational; 2] {
    [half(&(np + &n[0])), half(&(np + &n[1]))]
}

fn total(n: &[Rational; 3]) -> Rational {
    n.iter().sum()
}

const CORNERS: &[CornerFamily] = &[
    CornerFamily {
        point: |np, n, _| {
            let [a, b] = common_two(np, n);
            [a, b, half(&(np + &n[2]))]
        },
        recipes: &[("corner-1", |np, _| vec![(16, np.clone())])],
    },
    CornerFamily {
        point: |np, n, g| {
            let [a, b] = common_two(np, n);
            [a, b, half(&n[2]) + g]
        },
        recipes: &[
            ("corner-2a", |np, n| {
                vec![(18, n[0].clone()), (16, np - &n[0])]
            }),
            ("corner-2b", |_, _| vec![]),
            ("corner-2c", |np, _| vec![(18, np.clone())]),
        ],
    },
    CornerFamily {
        point: |np, n, _| {
            let [a, b] = common_two(np, n);
            [a, b, half(np) + half(&n[1]) + &n[2]]
        },
        recipes: &[("corner-3", |np, n| {
            vec![(18, n[0].clone()), (16, np - &n[0])]
        })],
    },
    CornerFamily {
        point: |np, n, _| {
            let [a, b] = common_two(np, n);
            [a, b, half(np) + (&n[0] + &n[1]) / int(4) + half(&n[2])]
        },
        recipes: &[("corner-4", |np, n| {
            vec![(18, n[0].clone()), (16, np - &n[0])]
        })],
    },
    CornerFamily {
        point: |np, n, g| {
            let s = total(n);
            [
                half(&(np + &n[0])),
                half(&s) + np - g,
                g * int(2) - half(&n[0]) - half(np),
            ]
        },
        recipes: &[
            ("corner-5a", |np, n| {
                vec![
                    (18, n[1].clone()),
                    (19, n[2].clone()),
                    (16, np - &n[1] - &n[2]),
                ]
            }),
            ("corner-5b", |np, n| {
                vec![(18, n[1].clone()), (16, np - &n[1])]
            }),
            ("corner-5c", |np, n| {
                vec![(19, n[0].clone()), (16, np - &n[0]), (3, &n[2] - &n[0])]
            }),
            ("corner-5d", |np, n| {
                vec![(18, n[1].clone()), (19, np - &n[1])]
            }),
        ],
    },
    CornerFamily {
        point: |np, n, g| {
            let s = total(n);
            let side = half(&s) + np - g;
            [side.clone(), side, g * int(3) - half(&s) - np]
        },
        recipes: &[
            ("corner-6a", |np, n| {
                vec![(18, n[1].clone()), (19, n[2].clone()), (16, np - &n[0])]
            }),
            ("corner-6b", |np, n| {
                vec![(18, n[0].clone()), (20, n[2].clone()), (16, np - &n[1])]
            }),
            ("corner-6c", |np, n| {
                vec![
                    (19, n[0].clone()),
                    (20, n[1].clone()),
                    (16, np - &n[0] - &n[1]),
                    (3, &n[2] - &n[0] - &n[1]),
                ]
            }),
            ("corner-6d", |np, n| {
                vec![
                    (18, &n[0] + &n[1] - np),
                    (19, np - &n[1]),
                    (20, np - &n[0]),
                    (3, total(n) - np * int(2)),
                ]
            }),
        ],
    },
    CornerFamily {
        point: |np, n, _| {
            let v = half(np) + total(n) / int(4);
            [v.clone(), v.clone(), v]
        },
        recipes: &[("corner-7", |np, n| {
            vec![
                (18, half(&(&n[0] + &n[1] - &n[2]))),
                (19, half(&(&n[0] + &n[2] - &n[1]))),
                (20, half(&(&n[1] + &n[2] - &n[0]))),
                (16, np - half(&total(n))),
            ]
        })],
    },
];

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Completes a recipe at a canonical corner: checks it fits, then covers the
/// leftover private demands with [`im_steps`].
fn finish_recipe(
    imports: &[(u8, Rational)],
    point: &[Rational; 3],
    np: &Rational,
    n: &[Rational; 3],
) -> Option<Vec<(u8, Rational, bool)>> {
    if imports.iter().any(|(_, v)| v.is_negative()) {
        return None;
    }
    let mut a = Allocation::default();
    for (p, v) in imports {
        a.add(*p, v);
    }
    let cost = a.cost();
    let left: Vec<Rational> = (0..3).map(|k| &point[k] - &cost[k]).collect();
    if left.iter().any(Signed::is_negative) {
        return None;
    }
    let served = a.served();
    if &served[0] < np {
        return None;
    }
    let rest: Vec<Rational> = (0..3)
        .map(|i| {
            let d = &n[i] - &served[5 + i];
            if d.is_negative() {
                Rational::zero()
            } else {
                d
            }
        })
        .collect();
    let im = im_steps(&rest, &left).ok()?;
    let mut out: Vec<(u8, Rational, bool)> = imports
        .iter()
        .map(|(p, v)| (*p, v.clone(), false))
        .collect();
    out.extend(im.into_iter().map(|(p, v)| (p, v, true)));
    Some(out)
}

/// Allocation at one vertex of the reduced region, via the matching corner
/// family under some transmitter order.
fn corner_allocation(
    vertex: &[Rational],
    np: &Rational,
    n: &[Rational; 3],
    gamma: &Rational,
) -> Option<(String, Vec<(u8, Rational, Reason)>)> {
    for perm in PERMUTATIONS {
        let nc: [Rational; 3] = std::array::from_fn(|c| n[perm[c]].clone());
        let vc: [Rational; 3] = std::array::from_fn(|c| vertex[perm[c]].clone());
        for fam in CORNERS {
            if (fam.point)(np, &nc, gamma) != vc {
                continue;
            }
            for (name, recipe) in fam.recipes {
                let Some(steps) = finish_recipe(&recipe(np, &nc), &vc, np, &nc) else {
                    continue;
                };
                let steps = steps
                    .into_iter()
                    .map(|(p, v, im)| {
                        let reason = if im {
                            Reason::PrivateFill
                        } else {
                            Reason::Corner(name.to_string())
                        };
                        (permute_protocol(p, perm), v, reason)
                    })
                    .collect();
                return Some((name.to_string(), steps));
            }
        }
    }
    None
}

/// The seven-row region left for the second case once the first two steps
/// have been paid for.
fn reduced_region(np: &Rational, n: &[Rational; 3], gamma: &Rational) -> HPolyhedron {
    let s = total(n);
    let mut poly = HPolyhedron::new(3);
    for i in 0..3 {
        poly.push(unit_row(3, i), half(&(np + &n[i])));
    }
    poly.push(vec![int(1); 3], np + half(&s) + gamma);
    for i in 0..3 {
        let mut c = vec![rat(1, 2); 3];
        c[i] = int(1);
        poly.push(c, np + half(&s));
    }
    poly
}

fn constructive_steps(
    n: &NVector,
    budget: &[Rational],
) -> Result<(Recorder, AllocationTrace), String> {
    let mut rec = Recorder::default();
    let mut trace = AllocationTrace::default();
    let q = |v: usize| int(v as i64);

    rec.import(4, q(n.n12), Reason::Step1);
    rec.import(5, q(n.n13), Reason::Step1);
    rec.import(6, q(n.n23), Reason::Step1);
    let nt = n.n123.min(n.no);
    trace.splits.n_tilde = nt;
    rec.import(17, q(nt), Reason::Step2);

    let spent = rec.alloc.cost();
    let rem: [Rational; 3] = std::array::from_fn(|k| &budget[k] - &spent[k]);
    let privates = [q(n.n1), q(n.n2), q(n.n3)];
    let s = total(&privates);

    if nt == n.n123 {
        let nop = n.no - n.n123;
        trace.splits.no_rest = nop;
        let nop = q(nop);
        let excess: Vec<Rational> = (0..3)
            .map(|i| &rem[i] - half(&(&nop + &privates[i])))
            .collect();
        let ex_total: Rational = excess.iter().sum();
        if excess.iter().any(Signed::is_negative) || ex_total < half(&(&nop + &s)) {
            return Err("remaining budget does not cover the coupled and private demands".into());
        }
        let need = half(&nop);
        let a: Vec<Rational> = excess
            .iter()
            .map(|e| {
                if ex_total.is_zero() {
                    Rational::zero()
                } else {
                    e * &need / &ex_total
                }
            })
            .collect();
        let b: Vec<Rational> = excess.iter().zip(&a).map(|(e, a)| e - a).collect();
        let asum: Rational = a.iter().sum();
        for i in 0..3 {
            let lam = &nop / int(4) + half(&(&a[i] * int(3) - (&asum - &a[i])));
            rec.import(7 + i as u8, lam, Reason::CoupledSurplus);
        }
        let im_budget: Vec<Rational> = (0..3).map(|i| half(&privates[i]) + &b[i]).collect();
        trace.splits.a = a;
        trace.splits.b = b;
        for (p, v) in im_steps(&privates, &im_budget).map_err(|e| e.to_string())? {
            rec.import(p, v, Reason::PrivateFill);
        }
    } else {
        let np_usize = n.n123 - n.no;
        trace.splits.n123_rest = np_usize;
        let np = q(np_usize);
        let gamma = (0..3)
            .map(|i| half(&(&np + &privates[i])))
            .chain([half(&s)])
            .max()
            .expect("four candidates");
        trace.splits.gamma = Some(gamma.clone());
        let region = reduced_region(&np, &privates, &gamma);
        if !region.contains(&rem) {
            return Err("remaining budget is outside the reduced region".into());
        }
        let verts = vertices_3d(&region).map_err(|e| e.to_string())?;
        // convex weights on the corners whose combination fits in the budget,
        // cheapest total first
        let m = verts.len();
        let mut w = HPolyhedron::new(m);
        for j in 0..m {
            w.push(unit_row(m, j), Rational::zero());
        }
        w.push(vec![int(1); m], int(1));
        w.push(vec![int(-1); m], int(-1));
        for k in 0..3 {
            w.push(
                verts.iter().map(|v| -v[k].clone()).collect(),
                -rem[k].clone(),
            );
        }
        let objective: Vec<Rational> = verts.iter().map(|v| v.iter().sum()).collect();
        let res = lp_solve(&w, &objective, Sense::Minimize).map_err(|e| e.to_string())?;
        if res.status != LpStatus::Optimal {
            return Err("no convex combination of corners fits the budget".into());
        }
        for (v, theta) in verts.iter().zip(res.witness) {
            if theta.is_zero() {
                continue;
            }
            let (name, steps) = corner_allocation(v, &np, &privates, &gamma)
                .ok_or_else(|| format!("no recipe applies at corner {v:?}"))?;
            for (p, amount, reason) in steps {
                rec.import(p, &theta * amount, reason);
            }
            trace.corners.push(Corner {
                recipe: name,
                point: v.clone(),
                weight: theta,
            });
        }
    }
    Ok((rec, trace))
}

/// The stepwise allocation: pairwise sums first, then the three-party box
/// on the overlap of three-way and coupled demands, then either the coupled
/// remainder and private symbols, or the three-way remainder by a convex
/// decomposition over corner recipes. Falls back to [`allocate_lp`] (and
/// says so in the trace) if any recipe fails to validate.
pub fn allocate_constructive(
    n: &NVector,
    budget: &[Rational],
) -> Result<(Allocation, AllocationTrace), AllocError> {
    check_budget(budget)?;
    if let Some(row) = region_standard(n).first_violation(budget)? {
        return Err(AllocError::NotInRegion { row });
    }
    if let Ok((rec, mut trace)) = constructive_steps(n, budget) {
        if rec.alloc.is_sound(n, budget) {
            trace.steps = rec.steps;
            return Ok((rec.alloc, trace));
        }
    }
    let alloc = allocate_lp(n, budget)?;
    let trace = AllocationTrace {
        steps: alloc
            .support()
            .into_iter()
            .map(|(protocol, amount)| TraceStep {
                protocol,
                amount,
                reason: Reason::Fallback,
            })
            .collect(),
        fell_back: true,
        ..Default::default()
    };
    Ok((alloc, trace))
}

/// Budgets reachable with the listed protocols, projected out of the joint
/// `(Δ, λ)` system by Fourier–Motzkin elimination. Protocols that serve only
/// zero demands are left out first; they can always be set to zero.
pub fn projected_region(n: &NVector, protocols: &[u8]) -> Result<HPolyhedron, AllocError> {
    let demands = n.as_array();
    let used: Vec<u8> = protocols
        .iter()
        .copied()
        .filter(|&p| (0..8).any(|r| demands[r] > 0 && SERVING[r].contains(&p)))
        .collect();
    let dim = 3 + used.len();
    let mut poly = HPolyhedron::new(dim);
    for k in 0..3 {
        let mut c = unit_row(dim, k);
        for (j, &p) in used.iter().enumerate() {
            c[3 + j] = rat(-DOUBLED_COST[k][(p - 1) as usize], 2);
        }
        poly.push(c, Rational::zero());
        poly.push(unit_row(dim, k), Rational::zero());
    }
    for (r, &d) in demands.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let mut c = vec![Rational::zero(); dim];
        for (j, p) in used.iter().enumerate() {
            if SERVING[r].contains(p) {
                c[3 + j] = int(1);
            }
        }
        poly.push(c, int(d as i64));
    }
    for j in 0..used.len() {
        poly.push(unit_row(dim, 3 + j), Rational::zero());
    }
    let drop: Vec<usize> = (3..dim).collect();
    Ok(fm_eliminate(&poly, &drop)?)
}

/// Budgets achievable with all twenty protocols.
pub fn achievable_region(n: &NVector) -> Result<HPolyhedron, AllocError> {
    projected_region(n, &(1..=20).collect::<Vec<u8>>())
}

/// Budgets achievable with pairwise entanglement only: TQC and two-party box
/// protocols.
pub fn restricted_region_pairwise(n: &NVector) -> Result<HPolyhedron, AllocError> {
    projected_region(n, &(1..=16).collect::<Vec<u8>>())
}
