//! Exact state-level check that the two-party box is realized by a shared
//! generalized Bell pair, Pauli encodings and a Bell-basis measurement.
//!
//! Amplitudes live in `Z[ω]`, `ω = exp(2πi/q)`, stored as integer
//! coefficient vectors modulo `ω^q - 1`. For prime `q` such a vector is zero
//! in the cyclotomic field exactly when all its coefficients agree.

use thiserror::Error;

use crate::field::{FieldError, Fp, FpMatrix};
use crate::nsum::{box1, box_apply, BoxError, BoxState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BellError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error("measurement is not deterministic for encodings {0:?}")]
    NotDeterministic([u32; 4]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cyclo(Vec<i64>);

impl Cyclo {
    fn zero(q: usize) -> Self {
        Cyclo(vec![0; q])
    }

    fn root_power(q: usize, k: usize) -> Self {
        let mut c = Cyclo::zero(q);
        c.0[k % q] = 1;
        c
    }

    fn add_assign(&mut self, o: &Cyclo) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += b;
        }
    }

    fn mul(&self, o: &Cyclo) -> Cyclo {
        let q = self.0.len();
        let mut out = Cyclo::zero(q);
        for (i, a) in self.0.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out.0[(i + j) % q] += a * b;
            }
        }
        out
    }

    fn conj(&self) -> Cyclo {
        let q = self.0.len();
        let mut out = Cyclo::zero(q);
        for (i, a) in self.0.iter().enumerate() {
            out.0[(q - i) % q] += a;
        }
        out
    }

    /// The value as an integer, if it is one.
    fn as_integer(&self) -> Option<i64> {
        let tail = self.0[1..].first().copied().unwrap_or(0);
        if self.0[1..].iter().all(|&c| c == tail) {
            Some(self.0[0] - tail)
        } else {
            None
        }
    }
}

/// Two-qudit state, unnormalized, indexed by `i * q + j`.
type State = Vec<Cyclo>;

/// `Σ_j ω^{bj} |j+a, j⟩`.
fn bell_state(q: usize, a: usize, b: usize) -> State {
    let mut s = vec![Cyclo::zero(q); q * q];
    for j in 0..q {
        s[((j + a) % q) * q + j] = Cyclo::root_power(q, b * j);
    }
    s
}

/// `X^{x1} Z^{z1} ⊗ X^{x2} Z^{z2}` applied to the pair `Σ_j |j, j⟩`.
fn encoded_pair(q: usize, x1: usize, z1: usize, x2: usize, z2: usize) -> State {
    let mut s = vec![Cyclo::zero(q); q * q];
    for j in 0..q {
        s[((j + x1) % q) * q + (j + x2) % q] = Cyclo::root_power(q, (z1 + z2) * j);
    }
    s
}

fn inner(u: &State, v: &State) -> Cyclo {
    let q = u[0].0.len();
    let mut acc = Cyclo::zero(q);
    for (a, b) in u.iter().zip(v) {
        acc.add_assign(&a.conj().mul(b));
    }
    acc
}

/// Measures the encoded pair in the Bell basis and returns the outcome
/// `(a, b)`, checking that it occurs with probability exactly one.
pub fn bell_outcome(q: u32, x1: u32, z1: u32, x2: u32, z2: u32) -> Result<(u32, u32), BellError> {
    let field = Fp::new(q)?;
    let qs = field.modulus() as usize;
    let [x1, z1, x2, z2] = [x1, z1, x2, z2].map(|v| (v % q) as usize);
    let psi = encoded_pair(qs, x1, z1, x2, z2);
    // both states have squared norm q, so a certain outcome has |amp|^2 = q^2
    let full = (qs * qs) as i64;
    let mut hit = None;
    for a in 0..qs {
        for b in 0..qs {
            let amp = inner(&bell_state(qs, a, b), &psi);
            let prob = amp.conj().mul(&amp).as_integer();
            match prob {
                Some(0) => {}
                Some(p) if p == full && hit.is_none() => hit = Some((a as u32, b as u32)),
                _ => {
                    return Err(BellError::NotDeterministic(
                        [x1, z1, x2, z2].map(|v| v as u32),
                    ))
                }
            }
        }
    }
    hit.ok_or(BellError::NotDeterministic(
        [x1, z1, x2, z2].map(|v| v as u32),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellReport {
    pub q: u32,
    /// Outcome as a linear map of `(x1, x2, z1, z2)`.
    pub derived: FpMatrix,
    /// Every encoding agreed with the two-party box once the second
    /// transmitter negates its encoding.
    pub matches_box: bool,
    pub cases: usize,
}

/// Runs every encoding over `F_q`, recovers the outcome map, and compares it
/// with the two-party box.
pub fn verify_bell_box1(q: u32) -> Result<BellReport, BellError> {
    let field = Fp::new(q)?;
    let bx = box1(field);
    let mut cols: Vec<Vec<u32>> = Vec::new();
    // unit encodings in the order (x1, x2, z1, z2)
    for [x1, x2, z1, z2] in [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]] {
        let (a, b) = bell_outcome(q, x1, z1, x2, z2)?;
        cols.push(vec![a, b]);
    }
    let derived = FpMatrix::from_columns(field, 2, &cols);

    let mut matches = true;
    let mut cases = 0;
    for x1 in 0..q {
        for x2 in 0..q {
            for z1 in 0..q {
                for z2 in 0..q {
                    let (a, b) = bell_outcome(q, x1, z1, field.neg(x2), field.neg(z2))?;
                    let linear = derived.mul_vec(&[x1, field.neg(x2), z1, field.neg(z2)])?;
                    let boxed = box_apply(&bx, &BoxState::zero(2), &[x1, x2], &[z1, z2])?;
                    matches &= vec![a, b] == linear && boxed.0 == vec![a, b];
                    cases += 1;
                }
            }
        }
    }
    Ok(BellReport {
        q,
        derived,
        matches_box: matches,
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_zero_test() {
        let q = 3;
        let mut s = Cyclo::zero(q);
        for k in 0..q {
            s.add_assign(&Cyclo::root_power(q, k));
        }
        assert_eq!(s.as_integer(), Some(0));
        assert_eq!(Cyclo::root_power(q, 1).as_integer(), None);
        let w = Cyclo::root_power(q, 1);
        assert_eq!(w.conj().mul(&w).as_integer(), Some(1));
    }

    #[test]
    fn unencoded_pair_measures_zero() {
        assert_eq!(bell_outcome(3, 0, 0, 0, 0).unwrap(), (0, 0));
        assert_eq!(bell_outcome(3, 1, 0, 0, 0).unwrap(), (1, 0));
        assert_eq!(bell_outcome(3, 0, 0, 1, 0).unwrap(), (2, 0));
        assert_eq!(bell_outcome(3, 0, 0, 0, 1).unwrap(), (0, 1));
    }

    #[test]
    fn box1_from_bell_pairs() {
        for q in [2, 3, 5] {
            let r = verify_bell_box1(q).unwrap();
            let f = Fp::new(q).unwrap();
            // outcome (x1 - x2, z1 + z2)
            let expect = FpMatrix::from_rows(f, &[vec![1, -1, 0, 0], vec![0, 0, 1, 1]]).unwrap();
            assert_eq!(r.derived, expect, "q = {q}");
            assert!(r.matches_box, "q = {q}");
            assert_eq!(r.cases, (q as usize).pow(4));
        }
    }

    #[test]
    fn composite_q_rejected() {
        assert!(matches!(verify_bell_box1(4), Err(BellError::Field(_))));
    }
}
