//! Function specifications, their rank profiles, and the decomposition of a
//! three-transmitter function into sums of shared, pairwise, coupled and
//! private components.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{
    basis_extension, column_space_intersection, solve_linear, solve_matrix, FieldError, Fp,
    FpMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("at least one transmitter is required")]
    NoTransmitters,
    #[error("matrix V{index} has {found} rows, expected {expected}")]
    RowMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("matrix V{0} does not have full column rank")]
    RankDeficient(usize),
    #[error("operation needs exactly three transmitters, got {0}")]
    NotThreeTransmitters(usize),
    #[error("invalid rank profile: {0}")]
    InvalidRankProfile(String),
    #[error("decomposition failed verification: {0}")]
    DecompositionFailed(Violation),
}

/// A prime `d` and one coefficient matrix per transmitter. The receiver wants
/// `sum_k V_k W_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    field: Fp,
    rows: usize,
    v: Vec<FpMatrix>,
}

impl FunctionSpec {
    pub fn new(field: Fp, v: Vec<FpMatrix>) -> Result<Self, SpecError> {
        let Some(first) = v.first() else {
            return Err(SpecError::NoTransmitters);
        };
        let rows = first.rows();
        for (i, m) in v.iter().enumerate() {
            if m.field() != field {
                return Err(
                    FieldError::ModulusMismatch(field.modulus(), m.field().modulus()).into(),
                );
            }
            if m.rows() != rows {
                return Err(SpecError::RowMismatch {
                    index: i + 1,
                    found: m.rows(),
                    expected: rows,
                });
            }
            if !m.has_full_column_rank() {
                return Err(SpecError::RankDeficient(i + 1));
            }
        }
        Ok(FunctionSpec { field, rows, v })
    }

    /// Builds a spec from integer rows; an empty row list means a `0 x 0`
    /// matrix and `m` rows of length zero mean an `m x 0` matrix.
    pub fn from_integers(d: u32, v: &[Vec<Vec<i64>>]) -> Result<Self, SpecError> {
        let field = Fp::new(d)?;
        let mats = v
            .iter()
            .map(|rows| FpMatrix::from_rows(field, rows))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, mats)
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn d(&self) -> u32 {
        self.field.modulus()
    }

    /// Number of output rows `m`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn transmitters(&self) -> usize {
        self.v.len()
    }

    pub fn matrices(&self) -> &[FpMatrix] {
        &self.v
    }

    pub fn matrix(&self, k: usize) -> &FpMatrix {
        &self.v[k]
    }

    /// Number of data symbols held by each transmitter.
    pub fn data_sizes(&self) -> Vec<usize> {
        self.v.iter().map(FpMatrix::cols).collect()
    }

    /// Rank of the concatenation of the listed transmitters' matrices.
    pub fn rank_of(&self, subset: &[usize]) -> usize {
        let mut m = FpMatrix::zeros(self.field, self.rows, 0);
        for &k in subset {
            m = m.hcat(&self.v[k]).expect("shapes checked at construction");
        }
        m.rank()
    }

    /// Direct evaluation of `sum_k V_k W_k` for data `W_k` of shape `m_k x L`.
    pub fn evaluate(&self, data: &[FpMatrix]) -> Result<FpMatrix, FieldError> {
        if data.len() != self.v.len() {
            return Err(FieldError::DimensionMismatch(format!(
                "{} data blocks for {} transmitters",
                data.len(),
                self.v.len()
            )));
        }
        let batch = data.first().map_or(0, FpMatrix::cols);
        let mut acc = FpMatrix::zeros(self.field, self.rows, batch);
        for (v, w) in self.v.iter().zip(data) {
            acc = acc.add(&v.mul(w)?)?;
        }
        Ok(acc)
    }

    fn require_three(&self) -> Result<(), SpecError> {
        if self.v.len() == 3 {
            Ok(())
        } else {
            Err(SpecError::NotThreeTransmitters(self.v.len()))
        }
    }
}

/// Ranks of every nonempty union of the three transmitters' spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankProfile {
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
    pub r12: usize,
    pub r13: usize,
    pub r23: usize,
    pub r123: usize,
}

impl RankProfile {
    pub fn from_array(a: [usize; 7]) -> Self {
        RankProfile {
            r1: a[0],
            r2: a[1],
            r3: a[2],
            r12: a[3],
            r13: a[4],
            r23: a[5],
            r123: a[6],
        }
    }

    pub fn as_array(&self) -> [usize; 7] {
        [
            self.r1, self.r2, self.r3, self.r12, self.r13, self.r23, self.r123,
        ]
    }

    /// Rank of the union indexed by a nonempty bitmask over `{1,2,3}`.
    pub fn of_mask(&self, mask: u8) -> usize {
        match mask {
            0 => 0,
            0b001 => self.r1,
            0b010 => self.r2,
            0b100 => self.r3,
            0b011 => self.r12,
            0b101 => self.r13,
            0b110 => self.r23,
            _ => self.r123,
        }
    }

    /// `r1 + r2 + r3 - r12 - r13 - r23 + r123`, which equals `n123 - no` in
    /// every decomposition.
    pub fn triple_excess(&self) -> i64 {
        let [r1, r2, r3, r12, r13, r23, r123] = self.as_array().map(|v| v as i64);
        r1 + r2 + r3 - r12 - r13 - r23 + r123
    }

    /// Checks monotonicity, pairwise submodularity, and that some
    /// nonnegative component count realizes the profile.
    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |msg: String| Err(SpecError::InvalidRankProfile(msg));
        for (single, pair) in [
            (0b001, 0b011),
            (0b010, 0b011),
            (0b001, 0b101),
            (0b100, 0b101),
            (0b010, 0b110),
            (0b100, 0b110),
        ] {
            if self.of_mask(single) > self.of_mask(pair) {
                return bad(format!("r for set {single:03b} exceeds r for {pair:03b}"));
            }
        }
        for pair in [0b011u8, 0b101, 0b110] {
            if self.of_mask(pair) > self.r123 {
                return bad(format!("r for set {pair:03b} exceeds r123"));
            }
            let (i, j) = split_pair(pair);
            if self.of_mask(i) + self.of_mask(j) < self.of_mask(pair) {
                return bad(format!("r for set {pair:03b} is not subadditive"));
            }
        }
        let min_meet = [0b011u8, 0b101, 0b110]
            .iter()
            .map(|&p| {
                let (i, j) = split_pair(p);
                (self.of_mask(i) + self.of_mask(j) - self.of_mask(p)) as i64
            })
            .min()
            .expect("three pairs");
        if min_meet < self.triple_excess().max(0) {
            return bad("no nonnegative component counts realize this profile".into());
        }
        Ok(())
    }

    /// Component counts realizing this profile with the smallest admissible
    /// `n123`. Every admissible choice yields the same cost region.
    pub fn canonical_n_vector(&self) -> Result<NVector, SpecError> {
        self.validate()?;
        let n123 = self.triple_excess().max(0) as usize;
        let meet = |p: u8| {
            let (i, j) = split_pair(p);
            self.of_mask(i) + self.of_mask(j) - self.of_mask(p)
        };
        Ok(NVector {
            n123,
            n12: meet(0b011) - n123,
            n13: meet(0b101) - n123,
            n23: meet(0b110) - n123,
            no: (n123 as i64 - self.triple_excess()) as usize,
            n1: self.r123 - self.r23,
            n2: self.r123 - self.r13,
            n3: self.r123 - self.r12,
        })
    }
}

fn split_pair(p: u8) -> (u8, u8) {
    let low = p & p.wrapping_neg();
    (low, p ^ low)
}

/// Column counts of the decomposition blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct NVector {
    pub n123: usize,
    pub n12: usize,
    pub n13: usize,
    pub n23: usize,
    pub no: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl NVector {
    pub fn from_array(a: [usize; 8]) -> Self {
        NVector {
            n123: a[0],
            n12: a[1],
            n13: a[2],
            n23: a[3],
            no: a[4],
            n1: a[5],
            n2: a[6],
            n3: a[7],
        }
    }

    /// `(n123, n12, n13, n23, no, n1, n2, n3)`.
    pub fn as_array(&self) -> [usize; 8] {
        [
            self.n123, self.n12, self.n13, self.n23, self.no, self.n1, self.n2, self.n3,
        ]
    }

    /// The rank profile these counts produce.
    pub fn rank_profile(&self) -> RankProfile {
        let shared = self.n123 + self.n12 + self.n13 + self.n23 + 2 * self.no;
        RankProfile {
            r1: self.n123 + self.n12 + self.n13 + self.no + self.n1,
            r2: self.n123 + self.n12 + self.n23 + self.no + self.n2,
            r3: self.n123 + self.n13 + self.n23 + self.no + self.n3,
            r12: shared + self.n1 + self.n2,
            r13: shared + self.n1 + self.n3,
            r23: shared + self.n2 + self.n3,
            r123: shared + self.n1 + self.n2 + self.n3,
        }
    }
}

/// Which check of [`verify_standard_form`] failed. Conditions 1 to 7 are the
/// basis conditions; condition 8 is the additive coupling of the o-blocks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("block shapes are inconsistent: {0}")]
    Shape(String),
    #[error("condition {0} violated")]
    Condition(u8),
    #[error("precoder R{0} is not invertible")]
    NotInvertible(usize),
    #[error("V{0} differs from its basis times precoder")]
    Factorization(usize),
}

impl Violation {
    /// Numeric condition id, if this is one of the eight conditions.
    pub fn condition(&self) -> Option<u8> {
        match self {
            Violation::Condition(c) => Some(*c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardForm {
    pub u123: FpMatrix,
    pub u12: FpMatrix,
    pub u13: FpMatrix,
    pub u23: FpMatrix,
    pub u1_23: FpMatrix,
    pub u2_13: FpMatrix,
    pub u3_12: FpMatrix,
    pub u1: FpMatrix,
    pub u2: FpMatrix,
    pub u3: FpMatrix,
    /// Invertible precoders with `V_k = B_k R_k`.
    pub r: [FpMatrix; 3],
}

impl StandardForm {
    fn cat(&self, blocks: &[&FpMatrix]) -> FpMatrix {
        let field = self.u123.field();
        FpMatrix::hcat_all(field, self.u123.rows(), blocks).expect("blocks share row count")
    }

    /// Basis `B_k` of transmitter `k`'s span (0-based).
    pub fn transmitter_basis(&self, k: usize) -> FpMatrix {
        match k {
            0 => self.cat(&[&self.u123, &self.u12, &self.u13, &self.u1_23, &self.u1]),
            1 => self.cat(&[&self.u123, &self.u12, &self.u23, &self.u2_13, &self.u2]),
            _ => self.cat(&[&self.u123, &self.u13, &self.u23, &self.u3_12, &self.u3]),
        }
    }

    /// The full basis `U` multiplying the demand vector.
    pub fn output_basis(&self) -> FpMatrix {
        self.cat(&[
            &self.u123,
            &self.u12,
            &self.u13,
            &self.u23,
            &self.u2_13,
            &self.u3_12,
            &self.u1,
            &self.u2,
            &self.u3,
        ])
    }

    pub fn n_vector(&self) -> NVector {
        n_vector(self)
    }
}

/// Column counts of the blocks; `no` is the width of the coupled block.
pub fn n_vector(sf: &StandardForm) -> NVector {
    NVector {
        n123: sf.u123.cols(),
        n12: sf.u12.cols(),
        n13: sf.u13.cols(),
        n23: sf.u23.cols(),
        no: sf.u1_23.cols(),
        n1: sf.u1.cols(),
        n2: sf.u2.cols(),
        n3: sf.u3.cols(),
    }
}

pub fn rank_profile(spec: &FunctionSpec) -> Result<RankProfile, SpecError> {
    spec.require_three()?;
    Ok(RankProfile {
        r1: spec.rank_of(&[0]),
        r2: spec.rank_of(&[1]),
        r3: spec.rank_of(&[2]),
        r12: spec.rank_of(&[0, 1]),
        r13: spec.rank_of(&[0, 2]),
        r23: spec.rank_of(&[1, 2]),
        r123: spec.rank_of(&[0, 1, 2]),
    })
}

/// Splits a three-transmitter spec into the block structure and verifies
/// the result before returning it.
pub fn decompose(spec: &FunctionSpec) -> Result<StandardForm, SpecError> {
    spec.require_three()?;
    let f = spec.field();
    let m = spec.rows();
    let [v1, v2, v3] = [spec.matrix(0), spec.matrix(1), spec.matrix(2)];

    let s12 = column_space_intersection(v1, v2)?;
    let s13 = column_space_intersection(v1, v3)?;
    let s23 = column_space_intersection(v2, v3)?;
    let u123 = column_space_intersection(&s12, &s13)?;
    let u12 = basis_extension(&u123, &s12)?;
    let u13 = basis_extension(&u123, &s13)?;
    let u23 = basis_extension(&u123, &s23)?;

    let v23 = v2.hcat(v3)?;
    let coupled_space = column_space_intersection(v1, &v23)?;
    let known = FpMatrix::hcat_all(f, m, &[&u123, &u12, &u13])?;
    let u1_23 = basis_extension(&known, &coupled_space)?;

    // Write each coupled column as v + w with v in span(V2), w in span(V3).
    let b2 = v2.independent_columns();
    let b3 = v3.independent_columns();
    let split_basis = b2.hcat(&b3)?;
    let mut vs = Vec::with_capacity(u1_23.cols());
    let mut ws = Vec::with_capacity(u1_23.cols());
    for c in 0..u1_23.cols() {
        let u = u1_23.column(c);
        let coeffs = solve_linear(&split_basis, &u)?
            .ok_or(SpecError::DecompositionFailed(Violation::Condition(8)))?;
        let v = b2.mul_vec(&coeffs[..b2.cols()])?;
        let w = b3.mul_vec(&coeffs[b2.cols()..])?;
        vs.push(v);
        ws.push(w);
    }
    let u2_13 = FpMatrix::from_columns(f, m, &vs);
    let u3_12 = FpMatrix::from_columns(f, m, &ws);

    let u1 = basis_extension(&FpMatrix::hcat_all(f, m, &[&known, &u1_23])?, v1)?;
    let u2 = basis_extension(&FpMatrix::hcat_all(f, m, &[&u123, &u12, &u23, &u2_13])?, v2)?;
    let u3 = basis_extension(&FpMatrix::hcat_all(f, m, &[&u123, &u13, &u23, &u3_12])?, v3)?;

    let mut sf = StandardForm {
        u123,
        u12,
        u13,
        u23,
        u1_23,
        u2_13,
        u3_12,
        u1,
        u2,
        u3,
        r: std::array::from_fn(|_| FpMatrix::zeros(f, 0, 0)),
    };
    for k in 0..3 {
        let basis = sf.transmitter_basis(k);
        if basis.cols() != spec.matrix(k).cols() {
            return Err(SpecError::DecompositionFailed(Violation::Condition(
                k as u8 + 1,
            )));
        }
        sf.r[k] = solve_matrix(&basis, spec.matrix(k))?.ok_or(SpecError::DecompositionFailed(
            Violation::Factorization(k + 1),
        ))?;
    }
    verify_standard_form(spec, &sf).map_err(SpecError::DecompositionFailed)?;
    Ok(sf)
}

/// Checks the additive coupling, the seven basis conditions, invertibility
/// of each precoder, and `V_k = B_k R_k`, reporting the first failure in
/// that order.
pub fn verify_standard_form(spec: &FunctionSpec, sf: &StandardForm) -> Result<(), Violation> {
    if spec.transmitters() != 3 {
        return Err(Violation::Shape("three transmitters required".into()));
    }
    let m = spec.rows();
    let blocks = [
        &sf.u123, &sf.u12, &sf.u13, &sf.u23, &sf.u1_23, &sf.u2_13, &sf.u3_12, &sf.u1, &sf.u2,
        &sf.u3,
    ];
    if blocks
        .iter()
        .any(|b| b.rows() != m || b.field() != spec.field())
    {
        return Err(Violation::Shape("every block needs m rows over F_d".into()));
    }

    if sf.u1_23.cols() != sf.u2_13.cols() || sf.u1_23.cols() != sf.u3_12.cols() {
        return Err(Violation::Condition(8));
    }
    if sf.u2_13.add(&sf.u3_12).ok().as_ref() != Some(&sf.u1_23) {
        return Err(Violation::Condition(8));
    }

    let v12 = spec.matrix(0).hcat(spec.matrix(1)).expect("same rows");
    let v13 = spec.matrix(0).hcat(spec.matrix(2)).expect("same rows");
    let v23 = spec.matrix(1).hcat(spec.matrix(2)).expect("same rows");
    let v123 = v12.hcat(spec.matrix(2)).expect("same rows");
    let conditions: [(Vec<&FpMatrix>, &FpMatrix); 7] = [
        (
            vec![&sf.u123, &sf.u12, &sf.u13, &sf.u1_23, &sf.u1],
            spec.matrix(0),
        ),
        (
            vec![&sf.u123, &sf.u12, &sf.u23, &sf.u2_13, &sf.u2],
            spec.matrix(1),
        ),
        (
            vec![&sf.u123, &sf.u13, &sf.u23, &sf.u3_12, &sf.u3],
            spec.matrix(2),
        ),
        (
            vec![
                &sf.u123, &sf.u12, &sf.u13, &sf.u23, &sf.u1_23, &sf.u2_13, &sf.u1, &sf.u2,
            ],
            &v12,
        ),
        (
            vec![
                &sf.u123, &sf.u12, &sf.u13, &sf.u23, &sf.u1_23, &sf.u3_12, &sf.u1, &sf.u3,
            ],
            &v13,
        ),
        (
            vec![
                &sf.u123, &sf.u12, &sf.u13, &sf.u23, &sf.u2_13, &sf.u3_12, &sf.u2, &sf.u3,
            ],
            &v23,
        ),
        (
            vec![
                &sf.u123, &sf.u12, &sf.u13, &sf.u23, &sf.u2_13, &sf.u3_12, &sf.u1, &sf.u2, &sf.u3,
            ],
            &v123,
        ),
    ];
    for (i, (parts, target)) in conditions.iter().enumerate() {
        let basis = FpMatrix::hcat_all(spec.field(), m, parts).expect("same rows");
        let target_rank = target.rank();
        let is_basis = basis.cols() == target_rank
            && basis.rank() == target_rank
            && basis.hcat(target).expect("same rows").rank() == target_rank;
        if !is_basis {
            return Err(Violation::Condition(i as u8 + 1));
        }
    }

    for k in 0..3 {
        let r = &sf.r[k];
        let mk = spec.matrix(k).cols();
        if r.rows() != mk || r.cols() != mk || r.rank() != mk {
            return Err(Violation::NotInvertible(k + 1));
        }
    }
    for k in 0..3 {
        let product = sf.transmitter_basis(k).mul(&sf.r[k]);
        if product.ok().as_ref() != Some(spec.matrix(k)) {
            return Err(Violation::Factorization(k + 1));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn profiles_of_samples() {
        let rp = rank_profile(&samples::sum_plus_private()).unwrap();
        assert_eq!(rp.as_array(), [1, 1, 2, 1, 2, 2, 2]);
        let rp = rank_profile(&samples::shared_sums_with_privates()).unwrap();
        assert_eq!(rp.as_array(), [3, 3, 3, 4, 4, 4, 5]);
        let i2 = vec![vec![1, 0], vec![0, 1]];
        let spec = FunctionSpec::from_integers(2, &[i2.clone(), i2.clone(), i2]).unwrap();
        assert_eq!(rank_profile(&spec).unwrap().as_array(), [2; 7]);
    }

    #[test]
    fn decomposition_of_samples() {
        let sf = decompose(&samples::sum_plus_private()).unwrap();
        assert_eq!(n_vector(&sf).as_array(), [1, 0, 0, 0, 0, 0, 0, 1]);
        let sf = decompose(&samples::coupled_pair()).unwrap();
        assert_eq!(n_vector(&sf).as_array(), [1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(sf.u123.column(0), vec![1, 0, 0]);
        let sf = decompose(&samples::shared_sums_with_privates()).unwrap();
        assert_eq!(n_vector(&sf).as_array(), [2, 0, 0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn coupled_pair_splits_as_expected() {
        let spec = samples::coupled_pair();
        let sf = decompose(&spec).unwrap();
        // u = (0,1,1) must split into a part of span(V2) plus a part of span(V3)
        let u = sf.u1_23.column(0);
        let v = sf.u2_13.column(0);
        let w = sf.u3_12.column(0);
        let f = spec.field();
        let sum: Vec<u32> = v.iter().zip(&w).map(|(&a, &b)| f.add(a, b)).collect();
        assert_eq!(sum, u);
        assert_eq!(v[2], 0);
        assert_eq!(w[1], 0);
    }

    #[test]
    fn empty_matrices_give_zero_counts() {
        let spec = FunctionSpec::from_integers(
            3,
            &[
                vec![vec![], vec![]],
                vec![vec![], vec![]],
                vec![vec![], vec![]],
            ],
        )
        .unwrap();
        let sf = decompose(&spec).unwrap();
        assert_eq!(n_vector(&sf), NVector::default());
    }

    #[test]
    fn verifier_catches_mutations() {
        let spec = samples::coupled_pair();
        let sf = decompose(&spec).unwrap();
        let mut broken = sf.clone();
        broken.u2_13 = FpMatrix::zeros(spec.field(), 3, 1);
        assert_eq!(
            verify_standard_form(&spec, &broken),
            Err(Violation::Condition(8))
        );

        let mut broken = sf.clone();
        let r = &mut broken.r[1];
        for i in 0..r.rows() {
            r.set(i, 0, 0);
        }
        assert_eq!(
            verify_standard_form(&spec, &broken),
            Err(Violation::NotInvertible(2))
        );

        let sf3 = decompose(&samples::sum_plus_private()).unwrap();
        let mut swapped = sf3.clone();
        std::mem::swap(&mut swapped.u3, &mut swapped.u123);
        assert!(verify_standard_form(&samples::sum_plus_private(), &swapped).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            FunctionSpec::from_integers(4, &[vec![vec![1]]]),
            Err(SpecError::Field(FieldError::NotPrime(4)))
        ));
        assert_eq!(
            FunctionSpec::from_integers(3, &[vec![vec![1, 2], vec![2, 1]]]),
            Err(SpecError::RankDeficient(1))
        );
        assert!(matches!(
            FunctionSpec::from_integers(3, &[vec![vec![1]], vec![vec![1], vec![0]]]),
            Err(SpecError::RowMismatch { .. })
        ));
        let two = FunctionSpec::from_integers(3, &[vec![vec![1]], vec![vec![1]]]).unwrap();
        assert_eq!(rank_profile(&two), Err(SpecError::NotThreeTransmitters(2)));
    }

    #[test]
    fn profile_validation() {
        assert!(RankProfile::from_array([1, 1, 2, 1, 2, 2, 2])
            .validate()
            .is_ok());
        assert!(RankProfile::from_array([2, 1, 1, 1, 2, 2, 2])
            .validate()
            .is_err());
        assert!(RankProfile::from_array([1, 1, 1, 3, 2, 2, 3])
            .validate()
            .is_err());
        // three distinct lines in a plane are fine
        assert!(RankProfile::from_array([1, 1, 1, 2, 2, 2, 2])
            .validate()
            .is_ok());
        // the joint rank is too large for the pairwise ranks
        assert!(RankProfile::from_array([2, 2, 2, 3, 3, 3, 5])
            .validate()
            .is_err());
        let n = RankProfile::from_array([2, 2, 2, 3, 3, 3, 3])
            .canonical_n_vector()
            .unwrap();
        assert_eq!(n.as_array(), [0, 1, 1, 1, 0, 0, 0, 0]);
        assert_eq!(n.rank_profile().as_array(), [2, 2, 2, 3, 3, 3, 3]);
    }

    mod props {
        use super::*;
        use crate::samples::random_spec;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn random_specs_decompose(seed in any::<u64>(), use_three in any::<bool>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let d = if use_three { 3 } else { 2 };
                let spec = random_spec(&mut rng, d, 6, 4);
                let sf = decompose(&spec).unwrap();
                prop_assert!(verify_standard_form(&spec, &sf).is_ok());
                let n = n_vector(&sf);
                let rp = rank_profile(&spec).unwrap();
                prop_assert_eq!(n.rank_profile(), rp);
                prop_assert_eq!(n.n123 as i64 - n.no as i64, rp.triple_excess());
                prop_assert!(rp.validate().is_ok());
                prop_assert_eq!(decompose(&spec).unwrap(), sf);
            }
        }
    }
}
