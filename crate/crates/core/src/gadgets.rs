//! Executable building blocks: each protocol unit wires a few data symbols
//! of each transmitter into one or more boxes and decodes the measured
//! outputs into demanded sums.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Fp, FpMatrix};
use crate::nsum::{box1, box2, box_apply, tqc, BoxError, BoxState, TransferMatrix};
use crate::standard_form::NVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("unknown protocol P{0}")]
    UnknownProtocol(u8),
    #[error("the single-box three-way sum needs an odd field size, got {0}")]
    NeedsOddField(u32),
    #[error("transmitter {transmitter} supplied {found} symbols, expected {expected}")]
    BadArity {
        transmitter: usize,
        found: usize,
        expected: usize,
    },
    #[error(transparent)]
    Box(#[from] BoxError),
}

/// Demand blocks of the decomposed function, in component-count order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    Sum3,
    Pair12,
    Pair13,
    Pair23,
    Coupled,
    Own1,
    Own2,
    Own3,
}

impl Block {
    pub const ALL: [Block; 8] = [
        Block::Sum3,
        Block::Pair12,
        Block::Pair13,
        Block::Pair23,
        Block::Coupled,
        Block::Own1,
        Block::Own2,
        Block::Own3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Transmitters (0-based) holding data for this block.
    pub fn holders(self) -> &'static [usize] {
        match self {
            Block::Sum3 | Block::Coupled => &[0, 1, 2],
            Block::Pair12 => &[0, 1],
            Block::Pair13 => &[0, 2],
            Block::Pair23 => &[1, 2],
            Block::Own1 => &[0],
            Block::Own2 => &[1],
            Block::Own3 => &[2],
        }
    }

    /// Number of demanded outputs per dimension.
    pub fn parts(self) -> usize {
        if self == Block::Coupled {
            2
        } else {
            1
        }
    }

    pub fn count(self, n: &NVector) -> usize {
        n.as_array()[self.index()]
    }

    /// Blocks of transmitter `k`'s precoded data, in stacking order.
    pub fn data_order(k: usize) -> [Block; 5] {
        match k {
            0 => [
                Block::Sum3,
                Block::Pair12,
                Block::Pair13,
                Block::Coupled,
                Block::Own1,
            ],
            1 => [
                Block::Sum3,
                Block::Pair12,
                Block::Pair23,
                Block::Coupled,
                Block::Own2,
            ],
            _ => [
                Block::Sum3,
                Block::Pair13,
                Block::Pair23,
                Block::Coupled,
                Block::Own3,
            ],
        }
    }

    /// Offset of this block inside transmitter `k`'s precoded data.
    pub fn data_offset(self, k: usize, n: &NVector) -> Option<usize> {
        let mut off = 0;
        for b in Block::data_order(k) {
            if b == self {
                return Some(off);
            }
            off += b.count(n);
        }
        None
    }

    /// Offset of `(self, part)` in the demand vector
    /// `[sum3, pair12, pair13, pair23, coupled AB, coupled AC, own1, own2, own3]`.
    pub fn demand_offset(self, part: usize, n: &NVector) -> usize {
        let [n123, n12, n13, n23, no, n1, n2, _] = n.as_array();
        match self {
            Block::Sum3 => 0,
            Block::Pair12 => n123,
            Block::Pair13 => n123 + n12,
            Block::Pair23 => n123 + n12 + n13,
            Block::Coupled => n123 + n12 + n13 + n23 + part * no,
            Block::Own1 => n123 + n12 + n13 + n23 + 2 * no,
            Block::Own2 => n123 + n12 + n13 + n23 + 2 * no + n1,
            Block::Own3 => n123 + n12 + n13 + n23 + 2 * no + n1 + n2,
        }
    }
}

/// Length of the demand vector.
pub fn demand_len(n: &NVector) -> usize {
    n.as_array().iter().sum::<usize>() + n.no
}

/// A protocol id from 1 to 20; protocol 16 also has a variant that uses one
/// three-party box per two dimensions (odd fields only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GadgetKind {
    pub protocol: u8,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub via_box2: bool,
}

impl GadgetKind {
    pub fn protocol(protocol: u8) -> Self {
        GadgetKind {
            protocol,
            via_box2: false,
        }
    }

    pub fn compact_sum() -> Self {
        GadgetKind {
            protocol: 16,
            via_box2: true,
        }
    }

    /// Demand dimensions covered by one unit, for each block it serves.
    pub fn unit_dims(self) -> usize {
        match self.protocol {
            1..=3 | 17..=20 => 1,
            16 if !self.via_box2 => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.via_box2 {
            write!(f, "P{}'", self.protocol)
        } else {
            write!(f, "P{}", self.protocol)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxKind {
    Tqc,
    Box1,
    Box2,
}

impl BoxKind {
    pub fn transfer(self, field: Fp) -> TransferMatrix {
        match self {
            BoxKind::Tqc => tqc(field),
            BoxKind::Box1 => box1(field),
            BoxKind::Box2 => box2(field),
        }
    }

    pub fn size(self) -> usize {
        match self {
            BoxKind::Tqc => 1,
            BoxKind::Box1 => 2,
            BoxKind::Box2 => 3,
        }
    }
}

/// One transmitter's encoding into a box: `x` and `z` as linear forms over
/// that transmitter's unit inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub transmitter: usize,
    pub x: Vec<(usize, u32)>,
    pub z: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxUse {
    pub kind: BoxKind,
    pub slots: Vec<Slot>,
}

/// A demanded output of a unit: dimension `dim` of `block`, and for the
/// coupled block which of the two sums (0 for the 1+2 sum, 1 for 1+3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutputLabel {
    pub block: Block,
    pub dim: usize,
    pub part: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetLayout {
    pub kind: GadgetKind,
    pub field: Fp,
    /// Per transmitter, the `(block, dim)` of each unit input.
    pub inputs: [Vec<(Block, usize)>; 3],
    pub uses: Vec<BoxUse>,
    pub outputs: Vec<OutputLabel>,
    /// Maps concatenated raw box outputs to `outputs`.
    pub decoder: FpMatrix,
}

impl GadgetLayout {
    pub fn raw_len(&self) -> usize {
        self.uses.iter().map(|u| u.kind.size()).sum()
    }

    /// Qudits each transmitter sends per unit.
    pub fn qudits(&self) -> [usize; 3] {
        let mut q = [0; 3];
        for u in &self.uses {
            for s in &u.slots {
                q[s.transmitter] += 1;
            }
        }
        q
    }

    /// Dimensions of each block covered per unit.
    pub fn dims(&self) -> [usize; 8] {
        let mut d = [0; 8];
        for o in &self.outputs {
            if o.part == 0 {
                d[o.block.index()] += 1;
            }
        }
        d
    }

    pub fn input_index(&self, k: usize, block: Block, dim: usize) -> Option<usize> {
        self.inputs[k].iter().position(|&e| e == (block, dim))
    }
}

struct Builder {
    field: Fp,
    inputs: [Vec<(Block, usize)>; 3],
    uses: Vec<BoxUse>,
    raw: usize,
    outputs: Vec<(OutputLabel, Vec<(usize, i64)>)>,
}

impl Builder {
    fn new(field: Fp) -> Self {
        Builder {
            field,
            inputs: Default::default(),
            uses: Vec::new(),
            raw: 0,
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, k: usize, block: Block, dim: usize) -> usize {
        if let Some(i) = self.inputs[k].iter().position(|&e| e == (block, dim)) {
            return i;
        }
        self.inputs[k].push((block, dim));
        self.inputs[k].len() - 1
    }

    fn form(&self, terms: &[(usize, i64)]) -> Vec<(usize, u32)> {
        terms
            .iter()
            .map(|&(i, c)| (i, self.field.reduce(c)))
            .collect()
    }

    fn slot(&self, transmitter: usize, x: &[(usize, i64)], z: &[(usize, i64)]) -> Slot {
        Slot {
            transmitter,
            x: self.form(x),
            z: self.form(z),
        }
    }

    /// Adds a box use and returns the index of its first raw output.
    fn add_use(&mut self, kind: BoxKind, slots: Vec<Slot>) -> usize {
        let base = self.raw;
        self.raw += kind.size();
        self.uses.push(BoxUse { kind, slots });
        base
    }

    fn output(&mut self, block: Block, dim: usize, part: usize, combo: &[(usize, i64)]) {
        self.outputs
            .push((OutputLabel { block, dim, part }, combo.to_vec()));
    }

    fn finish(self, kind: GadgetKind) -> GadgetLayout {
        let mut decoder = FpMatrix::zeros(self.field, self.outputs.len(), self.raw);
        for (r, (_, combo)) in self.outputs.iter().enumerate() {
            for &(c, v) in combo {
                let cur = decoder.get(r, c);
                decoder.set(r, c, self.field.add(cur, self.field.reduce(v)));
            }
        }
        GadgetLayout {
            kind,
            field: self.field,
            inputs: self.inputs,
            uses: self.uses,
            outputs: self.outputs.into_iter().map(|(l, _)| l).collect(),
            decoder,
        }
    }
}

fn own_block(k: usize) -> Block {
    [Block::Own1, Block::Own2, Block::Own3][k]
}

/// Two-party box carrying two dimensions of `block`; `sign_i`, `sign_j`
/// scale the parties' data. Returns the first raw index.
fn pair_sum(b: &mut Builder, block: Block, i: usize, j: usize, sign_i: i64, sign_j: i64) -> usize {
    let i0 = b.input(i, block, 0);
    let i1 = b.input(i, block, 1);
    let j0 = b.input(j, block, 0);
    let j1 = b.input(j, block, 1);
    let slots = vec![
        b.slot(i, &[(i0, sign_i)], &[(i1, sign_i)]),
        b.slot(j, &[(j0, sign_j)], &[(j1, -sign_j)]),
    ];
    b.add_use(BoxKind::Box1, slots)
}

/// The unit layout of a protocol over `field`.
pub fn layout(kind: GadgetKind, field: Fp) -> Result<GadgetLayout, GadgetError> {
    let mut b = Builder::new(field);
    let p = kind.protocol;
    if kind.via_box2 && p != 16 {
        return Err(GadgetError::UnknownProtocol(p));
    }
    match p {
        1..=3 => {
            let k = (p - 1) as usize;
            let blk = own_block(k);
            let d = b.input(k, blk, 0);
            let s = b.slot(k, &[(d, 1)], &[]);
            let r = b.add_use(BoxKind::Tqc, vec![s]);
            b.output(blk, 0, 0, &[(r, 1)]);
        }
        4..=6 => {
            let (i, j, blk) = match p {
                4 => (0, 1, Block::Pair12),
                5 => (0, 2, Block::Pair13),
                _ => (1, 2, Block::Pair23),
            };
            let r = pair_sum(&mut b, blk, i, j, 1, 1);
            b.output(blk, 0, 0, &[(r, 1)]);
            b.output(blk, 1, 0, &[(r + 1, 1)]);
        }
        7 => {
            let ab = pair_sum(&mut b, Block::Coupled, 0, 1, 1, 1);
            let ac = pair_sum(&mut b, Block::Coupled, 0, 2, 1, 1);
            for j in 0..2 {
                b.output(Block::Coupled, j, 0, &[(ab + j, 1)]);
                b.output(Block::Coupled, j, 1, &[(ac + j, 1)]);
            }
        }
        8 => {
            let ab = pair_sum(&mut b, Block::Coupled, 0, 1, 1, 1);
            let cb = pair_sum(&mut b, Block::Coupled, 1, 2, -1, 1);
            for j in 0..2 {
                b.output(Block::Coupled, j, 0, &[(ab + j, 1)]);
                b.output(Block::Coupled, j, 1, &[(ab + j, 1), (cb + j, 1)]);
            }
        }
        9 => {
            let ac = pair_sum(&mut b, Block::Coupled, 0, 2, 1, 1);
            let bc = pair_sum(&mut b, Block::Coupled, 1, 2, 1, -1);
            for j in 0..2 {
                b.output(Block::Coupled, j, 0, &[(ac + j, 1), (bc + j, 1)]);
                b.output(Block::Coupled, j, 1, &[(ac + j, 1)]);
            }
        }
        10..=15 => {
            let (owner, helper) = match p {
                10 => (0, 1),
                11 => (0, 2),
                12 => (1, 0),
                13 => (1, 2),
                14 => (2, 0),
                _ => (2, 1),
            };
            let blk = own_block(owner);
            let d0 = b.input(owner, blk, 0);
            let d1 = b.input(owner, blk, 1);
            let slots = vec![
                b.slot(owner, &[(d0, 1)], &[(d1, 1)]),
                b.slot(helper, &[], &[]),
            ];
            let r = b.add_use(BoxKind::Box1, slots);
            b.output(blk, 0, 0, &[(r, 1)]);
            b.output(blk, 1, 0, &[(r + 1, 1)]);
        }
        16 if kind.via_box2 => {
            if field.modulus() == 2 {
                return Err(GadgetError::NeedsOddField(2));
            }
            let half = field.inv(2).expect("odd field") as i64;
            let u: Vec<usize> = (0..3).map(|k| b.input(k, Block::Sum3, 0)).collect();
            let v: Vec<usize> = (0..3).map(|k| b.input(k, Block::Sum3, 1)).collect();
            let slots = vec![
                b.slot(0, &[(u[0], 1)], &[(v[0], half)]),
                b.slot(1, &[(u[1], 1)], &[(v[1], -1)]),
                b.slot(2, &[(u[2], 1)], &[(v[2], -1)]),
            ];
            let r = b.add_use(BoxKind::Box2, slots);
            b.output(Block::Sum3, 0, 0, &[(r, 1)]);
            b.output(Block::Sum3, 1, 0, &[(r + 1, 1), (r + 2, 1)]);
        }
        16 => {
            // per transmitter: (u, v, w, x) are dimensions 0..4
            let sym = |b: &mut Builder, k: usize| -> [usize; 4] {
                std::array::from_fn(|j| b.input(k, Block::Sum3, j))
            };
            let [u1, v1, w1, x1] = sym(&mut b, 0);
            let [u2, v2, w2, x2] = sym(&mut b, 1);
            let [u3, v3, w3, x3] = sym(&mut b, 2);
            let s = vec![
                b.slot(0, &[(u1, 1), (v1, -1)], &[(w1, 1), (x1, -1)]),
                b.slot(1, &[(u2, 1)], &[(w2, -1)]),
            ];
            let ra = b.add_use(BoxKind::Box1, s);
            let s = vec![
                b.slot(1, &[(v2, 1)], &[(x2, 1)]),
                b.slot(2, &[(v3, 1), (u3, -1)], &[(x3, -1), (w3, 1)]),
            ];
            let rb = b.add_use(BoxKind::Box1, s);
            let s = vec![
                b.slot(0, &[(v1, 1)], &[(x1, 1)]),
                b.slot(2, &[(u3, 1)], &[(w3, -1)]),
            ];
            let rc = b.add_use(BoxKind::Box1, s);
            b.output(Block::Sum3, 0, 0, &[(ra, 1), (rc, 1)]);
            b.output(Block::Sum3, 1, 0, &[(rb, 1), (rc, 1)]);
            b.output(Block::Sum3, 2, 0, &[(ra + 1, 1), (rc + 1, 1)]);
            b.output(Block::Sum3, 3, 0, &[(rb + 1, 1), (rc + 1, 1)]);
        }
        17 => {
            let t: Vec<usize> = (0..3).map(|k| b.input(k, Block::Sum3, 0)).collect();
            let o: Vec<usize> = (0..3).map(|k| b.input(k, Block::Coupled, 0)).collect();
            let slots = vec![
                b.slot(0, &[(t[0], 1)], &[(o[0], 1)]),
                b.slot(1, &[(t[1], 1)], &[(o[1], -1)]),
                b.slot(2, &[(t[2], 1)], &[(o[2], -1)]),
            ];
            let r = b.add_use(BoxKind::Box2, slots);
            b.output(Block::Sum3, 0, 0, &[(r, 1)]);
            b.output(Block::Coupled, 0, 0, &[(r + 1, 1)]);
            b.output(Block::Coupled, 0, 1, &[(r + 2, 1)]);
        }
        18..=20 => {
            // the transmitter without a private demand anchors the box
            let (anchor, first, second) = match p {
                18 => (2, 0, 1),
                19 => (1, 0, 2),
                _ => (0, 1, 2),
            };
            let t: Vec<usize> = (0..3).map(|k| b.input(k, Block::Sum3, 0)).collect();
            let a = b.input(first, own_block(first), 0);
            let c = b.input(second, own_block(second), 0);
            let slots = vec![
                b.slot(anchor, &[(t[anchor], 1)], &[]),
                b.slot(first, &[(t[first], 1)], &[(a, -1)]),
                b.slot(second, &[(t[second], 1)], &[(c, -1)]),
            ];
            let r = b.add_use(BoxKind::Box2, slots);
            b.output(Block::Sum3, 0, 0, &[(r, 1)]);
            b.output(own_block(first), 0, 0, &[(r + 1, 1)]);
            b.output(own_block(second), 0, 0, &[(r + 2, 1)]);
        }
        _ => return Err(GadgetError::UnknownProtocol(p)),
    }
    Ok(b.finish(kind))
}

/// One execution of a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetRun {
    pub kind: GadgetKind,
    pub qudits: [usize; 3],
    pub inputs: [Vec<u32>; 3],
    pub raw: Vec<u32>,
    pub outputs: Vec<u32>,
}

fn eval_form(field: Fp, form: &[(usize, u32)], data: &[u32]) -> u32 {
    form.iter()
        .fold(0, |acc, &(i, c)| field.add(acc, field.mul(c, data[i])))
}

/// Raw box outputs for the given unit inputs.
pub fn raw_outputs(layout: &GadgetLayout, inputs: &[Vec<u32>; 3]) -> Result<Vec<u32>, GadgetError> {
    for k in 0..3 {
        if inputs[k].len() != layout.inputs[k].len() {
            return Err(GadgetError::BadArity {
                transmitter: k + 1,
                found: inputs[k].len(),
                expected: layout.inputs[k].len(),
            });
        }
    }
    let f = layout.field;
    let mut raw = Vec::with_capacity(layout.raw_len());
    for u in &layout.uses {
        let n = u.kind.size();
        let mut x = vec![0u32; n];
        let mut z = vec![0u32; n];
        for (i, s) in u.slots.iter().enumerate() {
            x[i] = eval_form(f, &s.x, &inputs[s.transmitter]);
            z[i] = eval_form(f, &s.z, &inputs[s.transmitter]);
        }
        let y = box_apply(&u.kind.transfer(f), &BoxState::zero(n), &x, &z)?;
        raw.extend(y.0);
    }
    Ok(raw)
}

pub fn gadget_execute(
    layout: &GadgetLayout,
    inputs: &[Vec<u32>; 3],
) -> Result<GadgetRun, GadgetError> {
    let raw = raw_outputs(layout, inputs)?;
    let outputs = layout.decoder.mul_vec(&raw).map_err(BoxError::from)?;
    Ok(GadgetRun {
        kind: layout.kind,
        qudits: layout.qudits(),
        inputs: inputs.clone(),
        raw,
        outputs,
    })
}

/// What each labelled output should equal, computed straight from the
/// inputs.
pub fn intended_outputs(layout: &GadgetLayout, inputs: &[Vec<u32>; 3]) -> Vec<u32> {
    let f = layout.field;
    let value = |k: usize, block: Block, dim: usize| -> u32 {
        layout
            .input_index(k, block, dim)
            .map_or(0, |i| inputs[k][i])
    };
    layout
        .outputs
        .iter()
        .map(|o| {
            let holders: &[usize] = match (o.block, o.part) {
                (Block::Coupled, 0) => &[0, 1],
                (Block::Coupled, _) => &[0, 2],
                (b, _) => b.holders(),
            };
            holders
                .iter()
                .fold(0, |acc, &k| f.add(acc, value(k, o.block, o.dim)))
        })
        .collect()
}

pub fn all_kinds() -> Vec<GadgetKind> {
    let mut v: Vec<GadgetKind> = (1..=20).map(GadgetKind::protocol).collect();
    v.push(GadgetKind::compact_sum());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fp {
        Fp::new(3).unwrap()
    }

    fn sweep(layout: &GadgetLayout) -> usize {
        let sizes: Vec<usize> = layout.inputs.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().sum();
        let p = layout.field.modulus() as usize;
        let mut count = 0;
        for mut code in 0..p.pow(total as u32) {
            let mut inputs: [Vec<u32>; 3] = Default::default();
            for k in 0..3 {
                for _ in 0..sizes[k] {
                    inputs[k].push((code % p) as u32);
                    code /= p;
                }
            }
            let run = gadget_execute(layout, &inputs).unwrap();
            assert_eq!(
                run.outputs,
                intended_outputs(layout, &inputs),
                "{} on {:?}",
                layout.kind,
                inputs
            );
            count += 1;
        }
        count
    }

    #[test]
    fn every_protocol_is_exact_over_f3() {
        for kind in all_kinds() {
            let l = layout(kind, f3()).unwrap();
            assert!(sweep(&l) >= 3);
        }
    }

    #[test]
    fn small_protocols_exact_over_f2_and_f5() {
        for p in [2u32, 5] {
            let f = Fp::new(p).unwrap();
            for kind in all_kinds() {
                if kind.protocol == 16 {
                    continue;
                }
                sweep(&layout(kind, f).unwrap());
            }
        }
        let f5 = Fp::new(5).unwrap();
        sweep(&layout(GadgetKind::compact_sum(), f5).unwrap());
        assert_eq!(
            layout(GadgetKind::compact_sum(), Fp::new(2).unwrap()),
            Err(GadgetError::NeedsOddField(2))
        );
    }

    #[test]
    fn unit_costs_and_dims() {
        let expect: [(u8, [usize; 3]); 20] = [
            (1, [1, 0, 0]),
            (2, [0, 1, 0]),
            (3, [0, 0, 1]),
            (4, [1, 1, 0]),
            (5, [1, 0, 1]),
            (6, [0, 1, 1]),
            (7, [2, 1, 1]),
            (8, [1, 2, 1]),
            (9, [1, 1, 2]),
            (10, [1, 1, 0]),
            (11, [1, 0, 1]),
            (12, [1, 1, 0]),
            (13, [0, 1, 1]),
            (14, [1, 0, 1]),
            (15, [0, 1, 1]),
            (16, [2, 2, 2]),
            (17, [1, 1, 1]),
            (18, [1, 1, 1]),
            (19, [1, 1, 1]),
            (20, [1, 1, 1]),
        ];
        for (p, q) in expect {
            let l = layout(GadgetKind::protocol(p), f3()).unwrap();
            assert_eq!(l.qudits(), q, "P{p}");
            let dims = l.dims();
            assert!(dims
                .iter()
                .all(|&d| d == 0 || d == GadgetKind::protocol(p).unit_dims()));
        }
        let c = layout(GadgetKind::compact_sum(), f3()).unwrap();
        assert_eq!(c.qudits(), [1, 1, 1]);
        assert_eq!(c.dims()[0], 2);
    }

    #[test]
    fn documented_runs() {
        let l = layout(GadgetKind::protocol(16), f3()).unwrap();
        let run = gadget_execute(&l, &[vec![0; 4], vec![0; 4], vec![0; 4]]).unwrap();
        assert_eq!(run.outputs, vec![0; 4]);
        assert_eq!(run.qudits, [2, 2, 2]);

        // inputs are (x_k, z_k): the sum symbol then the coupled symbol
        let l = layout(GadgetKind::protocol(17), f3()).unwrap();
        let run = gadget_execute(&l, &[vec![1, 1], vec![1, 2], vec![1, 0]]).unwrap();
        assert_eq!(run.outputs, vec![0, 0, 1]);

        let l = layout(GadgetKind::protocol(10), f3()).unwrap();
        let run = gadget_execute(&l, &[vec![2, 1], vec![], vec![]]).unwrap();
        assert_eq!(run.outputs, vec![2, 1]);
        assert_eq!(run.qudits, [1, 1, 0]);

        assert!(matches!(
            gadget_execute(&l, &[vec![2], vec![], vec![]]),
            Err(GadgetError::BadArity { .. })
        ));
        assert_eq!(
            layout(GadgetKind::protocol(21), f3()),
            Err(GadgetError::UnknownProtocol(21))
        );
    }

    #[test]
    fn offsets() {
        let n = NVector::from_array([1, 2, 0, 1, 1, 0, 2, 1]);
        assert_eq!(Block::Coupled.data_offset(0, &n), Some(3));
        assert_eq!(Block::Own2.data_offset(1, &n), Some(5));
        assert_eq!(Block::Pair23.data_offset(0, &n), None);
        assert_eq!(Block::Coupled.demand_offset(1, &n), 5);
        assert_eq!(Block::Own3.demand_offset(0, &n), 8);
        assert_eq!(demand_len(&n), 9);
    }
}
