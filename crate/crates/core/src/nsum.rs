//! Transfer-matrix simulation of N-sum boxes.
//!
//! A box with matrix `M = [Mx, Mz]` maps state index `a` to
//! `a + Mx x + Mz z` when the transmitters apply their `(x, z)` encodings.
//! Starting from `a = 0` the receiver measures `M (x; z)` exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, Fp, FpMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("transfer matrix is invalid: {0:?}")]
    Invalid(SsoFailure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SsoFailure {
    /// `[Mx, Mz]` has rank below `N`.
    RankDeficient,
    /// `Mx Mz^T != Mz Mx^T`.
    NotSso,
}

/// Checks full row rank of `[Mx, Mz]` and `Mx Mz^T = Mz Mx^T`.
pub fn check_sso(mx: &FpMatrix, mz: &FpMatrix) -> Result<Result<(), SsoFailure>, BoxError> {
    let n = mx.rows();
    if mx.cols() != n || mz.rows() != n || mz.cols() != n {
        return Err(BoxError::DimensionMismatch(format!(
            "Mx is {}x{}, Mz is {}x{}; both must be square of equal size",
            mx.rows(),
            mx.cols(),
            mz.rows(),
            mz.cols()
        )));
    }
    if mx.hcat(mz)?.rank() != n {
        return Ok(Err(SsoFailure::RankDeficient));
    }
    let left = mx.mul(&mz.transpose())?;
    let right = mz.mul(&mx.transpose())?;
    if left != right {
        return Ok(Err(SsoFailure::NotSso));
    }
    Ok(Ok(()))
}

/// Splits an `N x 2N` matrix into its `x` and `z` halves.
pub fn split_transfer(m: &FpMatrix) -> Result<(FpMatrix, FpMatrix), BoxError> {
    if m.cols() != 2 * m.rows() {
        return Err(BoxError::DimensionMismatch(format!(
            "transfer matrix must be N x 2N, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    Ok((m.column_range(0, n), m.column_range(n, n)))
}

/// A validated transfer matrix of an `N`-sum box over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    mx: FpMatrix,
    mz: FpMatrix,
}

impl TransferMatrix {
    pub fn new(mx: FpMatrix, mz: FpMatrix) -> Result<Self, BoxError> {
        check_sso(&mx, &mz)?.map_err(BoxError::Invalid)?;
        Ok(TransferMatrix { mx, mz })
    }

    pub fn from_rows(field: Fp, rows: &[Vec<i64>]) -> Result<Self, BoxError> {
        let m = FpMatrix::from_rows(field, rows)?;
        let (mx, mz) = split_transfer(&m)?;
        Self::new(mx, mz)
    }

    pub fn n(&self) -> usize {
        self.mx.rows()
    }

    pub fn field(&self) -> Fp {
        self.mx.field()
    }

    pub fn mx(&self) -> &FpMatrix {
        &self.mx
    }

    pub fn mz(&self) -> &FpMatrix {
        &self.mz
    }
}

/// Treating a qudit as a classical dit: the 1-sum box `[1 | 0]`.
pub fn tqc(field: Fp) -> TransferMatrix {
    TransferMatrix::from_rows(field, &[vec![1, 0]]).expect("valid 1-sum box")
}

/// The 2-sum box `[[1,1,0,0],[0,0,1,-1]]`.
pub fn box1(field: Fp) -> TransferMatrix {
    TransferMatrix::from_rows(field, &[vec![1, 1, 0, 0], vec![0, 0, 1, -1]])
        .expect("valid 2-sum box")
}

/// The 3-sum box `[[1,1,1,0,0,0],[0,0,0,1,-1,0],[0,0,0,1,0,-1]]`.
pub fn box2(field: Fp) -> TransferMatrix {
    TransferMatrix::from_rows(
        field,
        &[
            vec![1, 1, 1, 0, 0, 0],
            vec![0, 0, 0, 1, -1, 0],
            vec![0, 0, 0, 1, 0, -1],
        ],
    )
    .expect("valid 3-sum box")
}

/// The state index of a box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxState(pub Vec<u32>);

impl BoxState {
    pub fn zero(n: usize) -> Self {
        BoxState(vec![0; n])
    }
}

/// `a + Mx x + Mz z`.
pub fn box_apply(
    m: &TransferMatrix,
    a: &BoxState,
    x: &[u32],
    z: &[u32],
) -> Result<BoxState, BoxError> {
    let n = m.n();
    if a.0.len() != n || x.len() != n || z.len() != n {
        return Err(BoxError::DimensionMismatch(format!(
            "box of size {n} given state {}, x {}, z {}",
            a.0.len(),
            x.len(),
            z.len()
        )));
    }
    let f = m.field();
    let mxx = m.mx.mul_vec(x)?;
    let mzz = m.mz.mul_vec(z)?;
    Ok(BoxState(
        (0..n)
            .map(|i| f.add(f.add(a.0[i] % f.modulus(), mxx[i]), mzz[i]))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fp {
        Fp::new(3).unwrap()
    }

    #[test]
    fn catalog_boxes_are_sso() {
        for p in [2, 3, 5, 7] {
            let f = Fp::new(p).unwrap();
            let _ = (tqc(f), box1(f), box2(f));
        }
    }

    #[test]
    fn four_party_split_is_not_sso() {
        let m = FpMatrix::from_rows(
            f3(),
            &[
                vec![1, 0, 0, 0, 0, 0, 0, 0],
                vec![0, 1, 1, 1, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 1, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 1, 1, 1],
            ],
        )
        .unwrap();
        let (mx, mz) = split_transfer(&m).unwrap();
        assert_eq!(check_sso(&mx, &mz).unwrap(), Err(SsoFailure::NotSso));
    }

    #[test]
    fn coupled_pair_box_is_sso() {
        // outputs (x1+x2+x3, z1+2z2, z1+2z3)
        let m = TransferMatrix::from_rows(
            f3(),
            &[
                vec![1, 1, 1, 0, 0, 0],
                vec![0, 0, 0, 1, 2, 0],
                vec![0, 0, 0, 1, 0, 2],
            ],
        )
        .unwrap();
        let y = box_apply(&m, &BoxState::zero(3), &[1, 2, 2], &[1, 1, 2]).unwrap();
        assert_eq!(y.0, vec![2, 0, 2]);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let mx = FpMatrix::from_rows(f3(), &[vec![1, 0], vec![1, 0]]).unwrap();
        let mz = FpMatrix::zeros(f3(), 2, 2);
        assert_eq!(check_sso(&mx, &mz).unwrap(), Err(SsoFailure::RankDeficient));
        let bad = FpMatrix::zeros(f3(), 2, 3);
        assert!(check_sso(&bad, &mz).is_err());
    }

    #[test]
    fn apply_examples() {
        let b = box1(f3());
        assert_eq!(
            box_apply(&b, &BoxState::zero(2), &[0, 0], &[0, 0])
                .unwrap()
                .0,
            vec![0, 0]
        );
        let b2 = box2(Fp::new(5).unwrap());
        let y = box_apply(&b2, &BoxState::zero(3), &[1, 1, 1], &[0, 0, 0]).unwrap();
        assert_eq!(y.0, vec![3, 0, 0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec3(n: usize) -> impl Strategy<Value = Vec<u32>> {
            proptest::collection::vec(0u32..3, n)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]

            #[test]
            fn box1_updates_compose(a in vec3(2), x in vec3(2), z in vec3(2), x2 in vec3(2), z2 in vec3(2)) {
                let m = box1(f3());
                let f = f3();
                let a = BoxState(a);
                let once = box_apply(&m, &box_apply(&m, &a, &x, &z).unwrap(), &x2, &z2).unwrap();
                let xs: Vec<u32> = x.iter().zip(&x2).map(|(&p, &q)| f.add(p, q)).collect();
                let zs: Vec<u32> = z.iter().zip(&z2).map(|(&p, &q)| f.add(p, q)).collect();
                prop_assert_eq!(once, box_apply(&m, &a, &xs, &zs).unwrap());
            }

            #[test]
            fn box2_updates_compose(a in vec3(3), x in vec3(3), z in vec3(3), x2 in vec3(3), z2 in vec3(3)) {
                let m = box2(f3());
                let f = f3();
                let a = BoxState(a);
                let once = box_apply(&m, &box_apply(&m, &a, &x, &z).unwrap(), &x2, &z2).unwrap();
                let xs: Vec<u32> = x.iter().zip(&x2).map(|(&p, &q)| f.add(p, q)).collect();
                let zs: Vec<u32> = z.iter().zip(&z2).map(|(&p, &q)| f.add(p, q)).collect();
                prop_assert_eq!(once, box_apply(&m, &a, &xs, &zs).unwrap());
            }
        }
    }
}
