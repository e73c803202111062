//! Compiling a budget into a concrete coding scheme over a batch of
//! instances, and checking it by simulation.
//!
//! Each transmitter precodes its data with the invertible map from its
//! standard-form decomposition, feeds the resulting streams into protocol
//! units, and the receiver applies one linear map to the concatenated box
//! outputs to obtain every instance of the function.

use std::collections::BTreeMap;
use std::ops::Not;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocator::{allocate_constructive, allocate_lp, AllocError, Allocation};
use crate::document::{DocumentError, SpecDocument};
use crate::field::{FieldError, Fp, FpMatrix};
use crate::gadgets::{layout, raw_outputs, Block, GadgetError, GadgetKind, GadgetLayout};
use crate::polyhedra::PolyError;
use crate::rational::{denominator_lcm, int, Rational};
use crate::regions::{region_from_ranks, RegionError};
use crate::standard_form::{decompose, rank_profile, FunctionSpec, SpecError};

/// Exhaustive verification refuses more realizations than this by default.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Largest batch the compiler will build.
pub const MAX_BATCH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Alloc(#[from] AllocError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("budget violates region row {row}")]
    NotInRegion { row: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("exhaustive check needs {needed} realizations, cap is {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("batch size {0} exceeds the supported maximum")]
    BatchTooLarge(String),
    #[error("internal wiring error: {0}")]
    Wiring(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AllocationMethod {
    #[default]
    Lp,
    Constructive,
}

/// One protocol unit and where its inputs come from. `wiring[k][j]` is the
/// index of unit input `j` of transmitter `k` in that transmitter's
/// precoded stream (instance-major), or `None` for a zero pad.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetInstance {
    pub protocol: u8,
    #[serde(default, skip_serializing_if = "Not::not")]
    pub via_box2: bool,
    pub wiring: Vec<Vec<Option<usize>>>,
}

impl GadgetInstance {
    pub fn kind(&self) -> GadgetKind {
        GadgetKind {
            protocol: self.protocol,
            via_box2: self.via_box2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    pub spec: SpecDocument,
    #[serde(rename = "L")]
    pub batch: usize,
    /// Invertible per-transmitter precoders, row-major.
    pub precoders: Vec<Vec<Vec<u32>>>,
    pub gadgets: Vec<GadgetInstance>,
    /// Maps the concatenated raw box outputs to the `m L` outputs, ordered
    /// instance-major. Row-major, entries reduced mod `d`.
    pub postprocess: Vec<Vec<u32>>,
    /// Qudits sent by each transmitter over the whole batch.
    pub delta: Vec<usize>,
}

impl Scheme {
    pub fn cost(&self) -> Vec<Rational> {
        cost_of(self)
    }
}

/// `delta_k / L` per transmitter.
pub fn cost_of(s: &Scheme) -> Vec<Rational> {
    let l = s.batch.max(1) as i64;
    s.delta.iter().map(|&q| int(q as i64) / int(l)).collect()
}

fn unit_kind(protocol: u8, field: Fp) -> GadgetKind {
    if protocol == 16 && field.modulus() != 2 {
        GadgetKind::compact_sum()
    } else {
        GadgetKind::protocol(protocol)
    }
}

pub fn compile(spec: &FunctionSpec, budget: &[Rational]) -> Result<Scheme, SchemeError> {
    compile_with(spec, budget, AllocationMethod::Lp)
}

pub fn compile_with(
    spec: &FunctionSpec,
    budget: &[Rational],
    method: AllocationMethod,
) -> Result<Scheme, SchemeError> {
    if budget.len() != 3 {
        return Err(SchemeError::ShapeMismatch(format!(
            "budget has {} entries",
            budget.len()
        )));
    }
    let region = region_from_ranks(&rank_profile(spec)?)?;
    if let Some(row) = region.first_violation(budget)? {
        return Err(SchemeError::NotInRegion { row });
    }
    let sf = decompose(spec)?;
    let n = sf.n_vector();
    let alloc = match method {
        AllocationMethod::Lp => allocate_lp(&n, budget)?,
        AllocationMethod::Constructive => allocate_constructive(&n, budget)?.0,
    };
    build(spec, &sf, &n, &alloc)
}

fn build(
    spec: &FunctionSpec,
    sf: &crate::standard_form::StandardForm,
    n: &crate::standard_form::NVector,
    alloc: &Allocation,
) -> Result<Scheme, SchemeError> {
    let field = spec.field();
    let units: Vec<(GadgetKind, Rational)> = alloc
        .support()
        .into_iter()
        .map(|(p, lam)| {
            let kind = unit_kind(p, field);
            let per_unit = lam / int(kind.unit_dims() as i64);
            (kind, per_unit)
        })
        .collect();
    let per_unit: Vec<Rational> = units.iter().map(|(_, v)| v.clone()).collect();
    let lcm = denominator_lcm(&per_unit);
    let batch = lcm
        .to_usize()
        .filter(|&b| b <= MAX_BATCH)
        .ok_or_else(|| SchemeError::BatchTooLarge(lcm.to_string()))?;
    let batch_r = int(batch as i64);

    let mut layouts: BTreeMap<GadgetKind, GadgetLayout> = BTreeMap::new();
    let mut instances: Vec<GadgetKind> = Vec::new();
    for (kind, amount) in &units {
        let count = (amount * &batch_r)
            .to_integer()
            .to_usize()
            .ok_or_else(|| SchemeError::Wiring("unit count out of range".into()))?;
        if !layouts.contains_key(kind) {
            layouts.insert(*kind, layout(*kind, field)?);
        }
        instances.extend(std::iter::repeat(*kind).take(count));
    }

    // assign demand coordinates (instance, dim) block by block, instance-major
    let mut assigned: BTreeMap<(usize, Block, usize), (usize, usize)> = BTreeMap::new();
    for block in Block::ALL {
        let count = block.count(n);
        let mut items = (0..batch).flat_map(|l| (0..count).map(move |i| (l, i)));
        for (g, kind) in instances.iter().enumerate() {
            for dim in 0..layouts[kind].dims()[block.index()] {
                if let Some(item) = items.next() {
                    assigned.insert((g, block, dim), item);
                }
            }
        }
        if items.next().is_some() {
            return Err(SchemeError::Wiring(format!("{block:?} demand not covered")));
        }
    }

    let widths: Vec<usize> = (0..3).map(|k| sf.r[k].rows()).collect();
    let m = spec.rows();
    let basis = sf.output_basis();
    let raw_total: usize = instances.iter().map(|k| layouts[k].raw_len()).sum();
    let mut post = FpMatrix::zeros(field, m * batch, raw_total);
    let mut gadgets = Vec::with_capacity(instances.len());
    let mut delta = vec![0usize; 3];
    let mut base = 0;
    for (g, kind) in instances.iter().enumerate() {
        let lay = &layouts[kind];
        let wiring: Vec<Vec<Option<usize>>> = (0..3)
            .map(|k| {
                lay.inputs[k]
                    .iter()
                    .map(|&(block, dim)| {
                        assigned.get(&(g, block, dim)).map(|&(l, i)| {
                            l * widths[k]
                                + block.data_offset(k, n).expect("unit inputs are held")
                                + i
                        })
                    })
                    .collect()
            })
            .collect();
        for (o, label) in lay.outputs.iter().enumerate() {
            let Some(&(l, i)) = assigned.get(&(g, label.block, label.dim)) else {
                continue;
            };
            let t = label.block.demand_offset(label.part, n) + i;
            for r in 0..m {
                let u = basis.get(r, t);
                if u == 0 {
                    continue;
                }
                for c in 0..lay.raw_len() {
                    let dec = lay.decoder.get(o, c);
                    if dec == 0 {
                        continue;
                    }
                    let row = l * m + r;
                    let cur = post.get(row, base + c);
                    post.set(row, base + c, field.add(cur, field.mul(u, dec)));
                }
            }
        }
        for (k, q) in lay.qudits().iter().enumerate() {
            delta[k] += q;
        }
        base += lay.raw_len();
        gadgets.push(GadgetInstance {
            protocol: kind.protocol,
            via_box2: kind.via_box2,
            wiring,
        });
    }

    Ok(Scheme {
        spec: SpecDocument::from_spec(spec),
        batch,
        precoders: sf.r.iter().map(FpMatrix::to_rows).collect(),
        gadgets,
        postprocess: post.to_rows(),
        delta,
    })
}

/// A scheme checked for consistency and ready to run.
pub struct PreparedScheme {
    spec: FunctionSpec,
    batch: usize,
    precoders: Vec<FpMatrix>,
    units: Vec<(GadgetLayout, Vec<Vec<Option<usize>>>)>,
    post: FpMatrix,
}

impl PreparedScheme {
    pub fn new(s: &Scheme) -> Result<Self, SchemeError> {
        let spec = s.spec.to_spec()?;
        if spec.transmitters() != 3 || s.precoders.len() != 3 || s.delta.len() != 3 {
            return Err(SchemeError::ShapeMismatch(
                "expected three transmitters".into(),
            ));
        }
        let field = spec.field();
        let sizes = spec.data_sizes();
        let mut precoders = Vec::with_capacity(3);
        for (k, rows) in s.precoders.iter().enumerate() {
            let rows: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| r.iter().map(|&v| i64::from(v)).collect())
                .collect();
            let p = FpMatrix::from_rows_with_cols(field, &rows, sizes[k])?;
            precoders.push(p);
        }
        let mut units = Vec::with_capacity(s.gadgets.len());
        let mut raw_total = 0;
        for g in &s.gadgets {
            let lay = layout(g.kind(), field)?;
            if g.wiring.len() != 3 {
                return Err(SchemeError::ShapeMismatch(
                    "wiring must list three transmitters".into(),
                ));
            }
            for k in 0..3 {
                let limit = precoders[k].rows() * s.batch;
                if g.wiring[k].len() != lay.inputs[k].len()
                    || g.wiring[k].iter().flatten().any(|&i| i >= limit)
                {
                    return Err(SchemeError::ShapeMismatch(format!(
                        "wiring of transmitter {} does not fit {}",
                        k + 1,
                        g.kind()
                    )));
                }
            }
            raw_total += lay.raw_len();
            units.push((lay, g.wiring.clone()));
        }
        let rows: Vec<Vec<i64>> = s
            .postprocess
            .iter()
            .map(|r| r.iter().map(|&v| i64::from(v)).collect())
            .collect();
        let post = FpMatrix::from_rows_with_cols(field, &rows, raw_total)?;
        if post.rows() != spec.rows() * s.batch {
            return Err(SchemeError::ShapeMismatch(format!(
                "postprocess has {} rows, expected {}",
                post.rows(),
                spec.rows() * s.batch
            )));
        }
        Ok(PreparedScheme {
            spec,
            batch: s.batch,
            precoders,
            units,
            post,
        })
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    /// The receiver's output, `m x L`.
    pub fn run(&self, data: &[FpMatrix]) -> Result<FpMatrix, SchemeError> {
        let sizes = self.spec.data_sizes();
        if data.len() != 3
            || data
                .iter()
                .zip(&sizes)
                .any(|(w, &mk)| w.rows() != mk || w.cols() != self.batch)
        {
            return Err(SchemeError::ShapeMismatch(format!(
                "data must be {:?} rows by {} columns",
                sizes, self.batch
            )));
        }
        let streams: Vec<FpMatrix> = self
            .precoders
            .iter()
            .zip(data)
            .map(|(r, w)| r.mul(w))
            .collect::<Result<_, _>>()?;
        let mut raw = Vec::with_capacity(self.post.cols());
        for (lay, wiring) in &self.units {
            let inputs: [Vec<u32>; 3] = std::array::from_fn(|k| {
                let width = streams[k].rows();
                wiring[k]
                    .iter()
                    .map(|idx| idx.map_or(0, |i| streams[k].get(i % width, i / width)))
                    .collect()
            });
            raw.extend(raw_outputs(lay, &inputs)?);
        }
        let y = self.post.mul_vec(&raw)?;
        let m = self.spec.rows();
        let mut out = FpMatrix::zeros(self.spec.field(), m, self.batch);
        for l in 0..self.batch {
            for r in 0..m {
                out.set(r, l, y[l * m + r]);
            }
        }
        Ok(out)
    }
}

pub fn simulate(s: &Scheme, data: &[FpMatrix]) -> Result<FpMatrix, SchemeError> {
    PreparedScheme::new(s)?.run(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive { cap: u64 },
    Random { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub data: Vec<FpMatrix>,
    pub expected: FpMatrix,
    pub got: FpMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn data_from_symbols(field: Fp, sizes: &[usize], batch: usize, symbols: &[u32]) -> Vec<FpMatrix> {
    let mut it = symbols.iter();
    sizes
        .iter()
        .map(|&mk| {
            let mut w = FpMatrix::zeros(field, mk, batch);
            for r in 0..mk {
                for c in 0..batch {
                    w.set(r, c, *it.next().expect("enough symbols"));
                }
            }
            w
        })
        .collect()
}

/// Compares the scheme's output with direct evaluation, on every data
/// realization or on seeded random ones.
pub fn verify_scheme(s: &Scheme, mode: VerifyMode) -> Result<Verification, SchemeError> {
    let prep = PreparedScheme::new(s)?;
    let field = prep.spec.field();
    let d = field.modulus();
    let sizes = prep.spec.data_sizes();
    let symbols: usize = sizes.iter().sum::<usize>() * prep.batch;

    let check = |syms: &[u32]| -> Result<Option<Counterexample>, SchemeError> {
        let data = data_from_symbols(field, &sizes, prep.batch, syms);
        let got = prep.run(&data)?;
        let expected = prep.spec.evaluate(&data)?;
        Ok((got != expected).then_some(Counterexample {
            data,
            expected,
            got,
        }))
    };

    let mut checked = 0u64;
    match mode {
        VerifyMode::Exhaustive { cap } => {
            let total = u32::try_from(symbols)
                .ok()
                .and_then(|e| u64::from(d).checked_pow(e))
                .filter(|&t| t <= cap)
                .ok_or_else(|| SchemeError::CapExceeded {
                    needed: format!("{d}^{symbols}"),
                    cap,
                })?;
            let mut syms = vec![0u32; symbols];
            for _ in 0..total {
                checked += 1;
                if let Some(c) = check(&syms)? {
                    return Ok(Verification {
                        checked,
                        counterexample: Some(c),
                    });
                }
                for v in syms.iter_mut() {
                    *v += 1;
                    if *v < d {
                        break;
                    }
                    *v = 0;
                }
            }
        }
        VerifyMode::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let syms: Vec<u32> = (0..symbols).map(|_| rng.gen_range(0..d)).collect();
                checked += 1;
                if let Some(c) = check(&syms)? {
                    return Ok(Verification {
                        checked,
                        counterexample: Some(c),
                    });
                }
            }
        }
    }
    Ok(Verification {
        checked,
        counterexample: None,
    })
}

/// Number of units of each kind in the scheme.
pub fn unit_counts(s: &Scheme) -> BTreeMap<GadgetKind, usize> {
    let mut out = BTreeMap::new();
    for g in &s.gadgets {
        *out.entry(g.kind()).or_insert(0) += 1;
    }
    out
}

/// Whether the scheme's cost fits inside `budget`.
pub fn within_budget(s: &Scheme, budget: &[Rational]) -> bool {
    cost_of(s).iter().zip(budget).all(|(c, b)| c <= b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::vertices_3d;
    use crate::rational::rat;
    use crate::samples;

    fn b(v: [(i64, i64); 3]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    fn mat(field: Fp, rows: &[Vec<i64>]) -> FpMatrix {
        FpMatrix::from_rows(field, rows).unwrap()
    }

    #[test]
    fn coupled_pair_at_unit_cost() {
        let spec = samples::coupled_pair();
        let s = compile(&spec, &b([(1, 1); 3])).unwrap();
        assert_eq!(s.batch, 1);
        assert_eq!(
            unit_counts(&s).into_iter().collect::<Vec<_>>(),
            vec![(GadgetKind::protocol(17), 1)]
        );
        assert_eq!(cost_of(&s), b([(1, 1); 3]));
        let v = verify_scheme(&s, VerifyMode::Exhaustive { cap: DEFAULT_CAP }).unwrap();
        assert!(v.passed());
        assert_eq!(v.checked, 729);

        let f = spec.field();
        let ones = vec![mat(f, &[vec![1], vec![1]]); 3];
        let out = simulate(&s, &ones).unwrap();
        assert_eq!(out, mat(f, &[vec![0], vec![0], vec![0]]));
    }

    #[test]
    fn scalar_sum_at_half_cost() {
        let spec = samples::scalar_sum();
        let s = compile(&spec, &b([(1, 2); 3])).unwrap();
        assert_eq!(s.batch, 2);
        assert_eq!(s.gadgets.len(), 1);
        assert_eq!(cost_of(&s), b([(1, 2); 3]));
        let v = verify_scheme(&s, VerifyMode::Exhaustive { cap: DEFAULT_CAP }).unwrap();
        assert!(v.passed());
        assert_eq!(v.checked, 729);

        let f = spec.field();
        let data = vec![
            mat(f, &[vec![1, 2]]),
            mat(f, &[vec![0, 1]]),
            mat(f, &[vec![2, 2]]),
        ];
        assert_eq!(simulate(&s, &data).unwrap(), mat(f, &[vec![0, 2]]));
    }

    #[test]
    fn scalar_sum_over_f2_uses_pairwise_units() {
        let spec =
            FunctionSpec::from_integers(2, &[vec![vec![1]], vec![vec![1]], vec![vec![1]]]).unwrap();
        let s = compile(&spec, &b([(1, 2); 3])).unwrap();
        assert_eq!(s.batch, 4);
        assert_eq!(s.gadgets.len(), 1);
        assert!(!s.gadgets[0].via_box2);
        assert_eq!(cost_of(&s), b([(1, 2); 3]));
        assert!(
            verify_scheme(&s, VerifyMode::Exhaustive { cap: DEFAULT_CAP })
                .unwrap()
                .passed()
        );
    }

    #[test]
    fn sum_plus_private_at_every_vertex() {
        let spec = samples::sum_plus_private();
        let region = region_from_ranks(&rank_profile(&spec).unwrap()).unwrap();
        let verts = vertices_3d(&crate::polyhedra::remove_redundant(&region)).unwrap();
        assert_eq!(verts.len(), 3);
        for v in verts {
            let s = compile(&spec, &v).unwrap();
            assert_eq!(s.batch, 2, "{v:?}");
            assert!(within_budget(&s, &v));
            let r = verify_scheme(&s, VerifyMode::Exhaustive { cap: DEFAULT_CAP }).unwrap();
            assert!(r.passed(), "{v:?}");
            assert_eq!(r.checked, 6561);
        }
        let s = compile(&spec, &b([(1, 2), (1, 2), (3, 2)])).unwrap();
        let counts = unit_counts(&s);
        assert_eq!(counts[&GadgetKind::compact_sum()], 1);
        assert_eq!(counts[&GadgetKind::protocol(3)], 2);
    }

    #[test]
    fn constructive_allocation_compiles_too() {
        let spec = samples::shared_sums_with_privates();
        let region = region_from_ranks(&rank_profile(&spec).unwrap()).unwrap();
        for v in vertices_3d(&crate::polyhedra::remove_redundant(&region)).unwrap() {
            let s = compile_with(&spec, &v, AllocationMethod::Constructive).unwrap();
            assert!(within_budget(&s, &v));
            let r = verify_scheme(
                &s,
                VerifyMode::Random {
                    samples: 200,
                    seed: 7,
                },
            )
            .unwrap();
            assert!(r.passed(), "{v:?}");
        }
    }

    #[test]
    fn outside_region_is_rejected() {
        let spec = samples::sum_plus_private();
        assert!(matches!(
            compile(&spec, &b([(1, 2), (1, 2), (1, 1)])),
            Err(SchemeError::NotInRegion { .. })
        ));
    }

    #[test]
    fn empty_scheme_costs_nothing() {
        let spec =
            FunctionSpec::from_integers(3, &[vec![vec![]], vec![vec![]], vec![vec![]]]).unwrap();
        let s = compile(&spec, &b([(0, 1); 3])).unwrap();
        assert!(s.gadgets.is_empty());
        assert_eq!(cost_of(&s), b([(0, 1); 3]));
        assert!(
            verify_scheme(&s, VerifyMode::Exhaustive { cap: DEFAULT_CAP })
                .unwrap()
                .passed()
        );
    }

    #[test]
    fn corrupted_postprocess_is_caught() {
        let spec = samples::sum_plus_private();
        let mut s = compile(&spec, &b([(1, 2), (1, 2), (3, 2)])).unwrap();
        let row = s.postprocess[0].clone();
        let j = row.iter().position(|&v| v != 0).unwrap();
        s.postprocess[0][j] = (row[j] + 1) % 3;
        let r = verify_scheme(&s, VerifyMode::Exhaustive { cap: DEFAULT_CAP }).unwrap();
        let c = r.counterexample.expect("mutation must be detected");
        assert_ne!(c.expected, c.got);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = samples::shared_sums_with_privates();
        let s = compile(&spec, &b([(4, 1); 3])).unwrap();
        assert!(matches!(
            verify_scheme(&s, VerifyMode::Exhaustive { cap: 10 }),
            Err(SchemeError::CapExceeded { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let spec = samples::coupled_pair();
        let s = compile(&spec, &b([(1, 1); 3])).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"L\":1"));
        let back: Scheme = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(verify_scheme(
            &back,
            VerifyMode::Random {
                samples: 50,
                seed: 1
            }
        )
        .unwrap()
        .passed());
    }

    #[test]
    fn bad_shapes_are_reported() {
        let spec = samples::scalar_sum();
        let s = compile(&spec, &b([(1, 2); 3])).unwrap();
        let f = spec.field();
        let short = vec![mat(f, &[vec![1]]); 3];
        assert!(matches!(
            simulate(&s, &short),
            Err(SchemeError::ShapeMismatch(_))
        ));
        assert_eq!(
            simulate(&s, &vec![FpMatrix::zeros(f, 1, 2); 3]).unwrap(),
            FpMatrix::zeros(f, 1, 2)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn simulate_is_linear(seed in any::<u64>()) {
                let spec = samples::shared_sums_with_privates();
                let s = compile(&spec, &b([(7, 4); 3])).unwrap();
                let prep = PreparedScheme::new(&s).unwrap();
                let f = spec.field();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut draw = || -> Vec<FpMatrix> {
                    spec.data_sizes().iter().map(|&mk| {
                        let mut w = FpMatrix::zeros(f, mk, s.batch);
                        for r in 0..mk { for c in 0..s.batch { w.set(r, c, rand::Rng::gen_range(&mut rng, 0..3)); } }
                        w
                    }).collect()
                };
                let w1 = draw();
                let w2 = draw();
                let sum: Vec<FpMatrix> = w1.iter().zip(&w2).map(|(a, b)| a.add(b).unwrap()).collect();
                let lhs = prep.run(&sum).unwrap();
                let rhs = prep.run(&w1).unwrap().add(&prep.run(&w2).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
