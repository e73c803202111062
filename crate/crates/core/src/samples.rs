//! Small worked functions and a random spec generator for tests.

use rand::Rng;

use crate::field::{Fp, FpMatrix};
use crate::standard_form::FunctionSpec;

fn spec(d: u32, v: &[&[&[i64]]]) -> FunctionSpec {
    let v: Vec<Vec<Vec<i64>>> = v
        .iter()
        .map(|m| m.iter().map(|r| r.to_vec()).collect())
        .collect();
    FunctionSpec::from_integers(d, &v).expect("sample specs are valid")
}

/// `[A+C+E, B+2D, B+2F]` over `F_3` with data `(A,B)`, `(C,D)`, `(E,F)`.
pub fn coupled_pair() -> FunctionSpec {
    spec(
        3,
        &[
            &[&[1, 0], &[0, 1], &[0, 1]],
            &[&[1, 0], &[0, 2], &[0, 0]],
            &[&[1, 0], &[0, 0], &[0, 2]],
        ],
    )
}

/// A single three-way sum `A+B+C` over `F_3`.
pub fn scalar_sum() -> FunctionSpec {
    spec(3, &[&[&[1]], &[&[1]], &[&[1]]])
}

/// `[A+B+C, D]` over `F_3` with data `(A)`, `(B)`, `(C,D)`.
pub fn sum_plus_private() -> FunctionSpec {
    spec(3, &[&[&[1], &[0]], &[&[1], &[0]], &[&[1, 0], &[0, 1]]])
}

/// `V_1 = I_K` and `V_k = e_1` for every other transmitter, over `F_3`.
pub fn identity_star(k: usize) -> FunctionSpec {
    let field = Fp::new(3).expect("3 is prime");
    let mut v = vec![FpMatrix::identity(field, k)];
    let mut e1 = FpMatrix::zeros(field, k, 1);
    e1.set(0, 0, 1);
    v.extend(std::iter::repeat(e1).take(k - 1));
    FunctionSpec::new(field, v).expect("valid by construction")
}

/// Four transmitters over `F_3`; the receiver wants
/// `(x1, x2+x3+x4, z1, z2+z3+z4)`.
pub fn four_party_split() -> FunctionSpec {
    let first: &[&[i64]] = &[&[1, 0], &[0, 0], &[0, 1], &[0, 0]];
    let rest: &[&[i64]] = &[&[0, 0], &[1, 0], &[0, 0], &[0, 1]];
    spec(3, &[first, rest, rest, rest])
}

/// `[A+B+C, D+E+F, G, H, I]` over `F_3`.
pub fn shared_sums_with_privates() -> FunctionSpec {
    spec(
        3,
        &[
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0], &[0, 0, 0]],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0], &[0, 0, 1], &[0, 0, 0]],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0], &[0, 0, 0], &[0, 0, 1]],
        ],
    )
}

/// A random three-transmitter spec with `m <= max_rows` and
/// `m_k <= max_cols`. Columns are drawn from combinations of a small shared
/// pool so that spans overlap often.
pub fn random_spec<R: Rng>(rng: &mut R, d: u32, max_rows: usize, max_cols: usize) -> FunctionSpec {
    let field = Fp::new(d).expect("prime modulus");
    let m = rng.gen_range(1..=max_rows);
    let pool: Vec<Vec<u32>> = (0..m + 1)
        .map(|_| (0..m).map(|_| rng.gen_range(0..d)).collect())
        .collect();
    let mut mats = Vec::with_capacity(3);
    for _ in 0..3 {
        loop {
            let cols = rng.gen_range(0..=max_cols.min(m));
            let columns: Vec<Vec<u32>> = (0..cols)
                .map(|_| {
                    let mut v = vec![0u32; m];
                    for _ in 0..rng.gen_range(1..=2) {
                        let pick = &pool[rng.gen_range(0..pool.len())];
                        let scale = rng.gen_range(1..d);
                        for (o, &p) in v.iter_mut().zip(pick) {
                            *o = field.add(*o, field.mul(scale, p));
                        }
                    }
                    v
                })
                .collect();
            let mat = FpMatrix::from_columns(field, m, &columns);
            if mat.has_full_column_rank() {
                mats.push(mat);
                break;
            }
        }
    }
    FunctionSpec::new(field, mats).expect("valid by construction")
}
