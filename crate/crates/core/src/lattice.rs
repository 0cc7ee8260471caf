//! Subgroups of Z^S in canonical Hermite-basis form, keyed by a finite
//! ordered support of primes. Equality of canonical bases is equality of
//! subgroups.

use crate::error::{Error, Result};
use crate::fgmodule::Prime;
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    support: Vec<Prime>,
    /// Hermite-normal-form rows with zero rows removed; unique per subgroup.
    basis: IntMatrix,
}

impl Lattice {
    /// The subgroup generated by `vectors` inside Z^support.
    pub fn from_generators(support: Vec<Prime>, vectors: &[Vec<BigInt>]) -> Result<Self> {
        for v in vectors {
            if v.len() != support.len() {
                return Err(Error::DimensionMismatch(format!(
                    "vector of length {} over support of size {}",
                    v.len(),
                    support.len()
                )));
            }
        }
        let gens = IntMatrix::from_rows(vectors)?;
        // from_rows of an empty list loses the ambient dimension
        let gens = if vectors.is_empty() {
            IntMatrix::zero(0, support.len())
        } else {
            gens
        };
        Ok(Lattice {
            support,
            basis: canonical_basis(&gens),
        })
    }

    pub fn zero(support: Vec<Prime>) -> Self {
        let n = support.len();
        Lattice {
            support,
            basis: IntMatrix::zero(0, n),
        }
    }

    /// Z^support itself.
    pub fn full(support: Vec<Prime>) -> Self {
        let n = support.len();
        Lattice {
            support,
            basis: IntMatrix::identity(n),
        }
    }

    pub fn support(&self) -> &[Prime] {
        &self.support
    }

    pub fn ambient_dim(&self) -> usize {
        self.support.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows() == 0
    }

    pub fn is_full(&self) -> bool {
        self.basis == IntMatrix::identity(self.support.len())
    }

    /// Membership by back-substitution against the echelon basis.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.support.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against ambient dimension {}",
                v.len(),
                self.support.len()
            )));
        }
        let mut residual = v.to_vec();
        for r in 0..self.basis.rows() {
            let pivot_col = (0..self.basis.cols())
                .find(|&c| !self.basis.at(r, c).is_zero())
                .expect("canonical basis has no zero rows");
            let (q, rem) = num_integer::Integer::div_rem(&residual[pivot_col], self.basis.at(r, pivot_col));
            if !rem.is_zero() {
                return Ok(false);
            }
            for c in 0..self.basis.cols() {
                residual[c] = &residual[c] - &q * self.basis.at(r, c);
            }
        }
        Ok(residual.iter().all(|x| x.is_zero()))
    }

    /// Equality as subgroups; errors when the supports differ.
    pub fn equal(&self, other: &Lattice) -> Result<bool> {
        if self.support != other.support {
            return Err(Error::SupportMismatch(format!(
                "{:?} vs {:?}",
                self.support, other.support
            )));
        }
        Ok(self.basis == other.basis)
    }

    /// True when every element of `other` lies in `self` (same support).
    pub fn includes(&self, other: &Lattice) -> Result<bool> {
        if self.support != other.support {
            return Err(Error::SupportMismatch(format!(
                "{:?} vs {:?}",
                self.support, other.support
            )));
        }
        for row in other.basis_rows() {
            if !self.contains(&row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when the coordinate at `p` is zero on the whole subgroup.
    pub fn coordinate_forced_zero(&self, p: Prime) -> bool {
        match self.support.iter().position(|&q| q == p) {
            Some(c) => (0..self.basis.rows()).all(|r| self.basis.at(r, c).is_zero()),
            None => true,
        }
    }

    /// True when the unit vector at `p` belongs to the subgroup.
    pub fn contains_unit(&self, p: Prime) -> bool {
        match self.support.iter().position(|&q| q == p) {
            Some(c) => {
                let mut e = vec![BigInt::zero(); self.support.len()];
                e[c] = BigInt::from(1);
                self.contains(&e).expect("dimension matches")
            }
            None => false,
        }
    }

    /// Image under deleting the coordinates not in `keep` (a subset of the
    /// support, in support order).
    pub fn project(&self, keep: &[Prime]) -> Result<Lattice> {
        let idx: Vec<usize> = keep
            .iter()
            .map(|p| {
                self.support
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| Error::SupportMismatch(format!("{p} not in support")))
            })
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<BigInt>> = self
            .basis_rows()
            .iter()
            .map(|row| idx.iter().map(|&c| row[c].clone()).collect())
            .collect();
        Lattice::from_generators(keep.to_vec(), &rows)
    }

    /// Extension to a larger support: new coordinates are zero on every
    /// generator; when `free_at_new` is set the unit vector of each new
    /// coordinate is adjoined as well.
    pub fn extend(&self, support: Vec<Prime>, free_at_new: bool) -> Result<Lattice> {
        let idx: Vec<usize> = self
            .support
            .iter()
            .map(|p| {
                support
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| Error::SupportMismatch(format!("{p} missing from extension")))
            })
            .collect::<Result<_>>()?;
        let n = support.len();
        let mut rows: Vec<Vec<BigInt>> = self
            .basis_rows()
            .iter()
            .map(|row| {
                let mut out = vec![BigInt::zero(); n];
                for (old_c, &new_c) in idx.iter().enumerate() {
                    out[new_c] = row[old_c].clone();
                }
                out
            })
            .collect();
        if free_at_new {
            for c in 0..n {
                if !self.support.contains(&support[c]) {
                    let mut e = vec![BigInt::zero(); n];
                    e[c] = BigInt::from(1);
                    rows.push(e);
                }
            }
        }
        Lattice::from_generators(support, &rows)
    }
}

fn canonical_basis(generators: &IntMatrix) -> IntMatrix {
    let (h, _) = generators.hermite_normal_form();
    let rows: Vec<Vec<BigInt>> = (0..h.rows())
        .map(|r| h.row(r).to_vec())
        .filter(|row| row.iter().any(|e| !e.is_zero()))
        .collect();
    if rows.is_empty() {
        IntMatrix::zero(0, generators.cols())
    } else {
        IntMatrix::from_rows(&rows).expect("equal-length rows")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgmodule::Prime;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn lat(support: &[u64], rows: &[&[i64]]) -> Lattice {
        Lattice::from_generators(support.iter().map(|&v| p(v)).collect(), &vecs(rows)).unwrap()
    }

    #[test]
    fn canonical_form_examples() {
        let l = lat(&[2, 3], &[&[2, 0], &[0, 1]]);
        assert_eq!(l.basis(), &IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap());

        let empty = lat(&[2], &[]);
        assert!(empty.is_zero());

        let l = lat(&[2, 3], &[&[1, 1], &[3, 1]]);
        assert_eq!(l.basis(), &IntMatrix::from_rows(&[vec![1, 1], vec![0, 2]]).unwrap());
    }

    #[test]
    fn contains_examples() {
        let l = lat(&[2, 3], &[&[2, 0], &[0, 1]]);
        assert!(l.contains(&vecs(&[&[4, 5]])[0]).unwrap());
        assert!(!l.contains(&vecs(&[&[3, 0]])[0]).unwrap());

        let zero = lat(&[2, 3], &[]);
        assert!(zero.contains(&vecs(&[&[0, 0]])[0]).unwrap());
        assert!(!zero.contains(&vecs(&[&[0, 1]])[0]).unwrap());

        assert!(l.contains(&vecs(&[&[1]])[0]).is_err());
    }

    #[test]
    fn equality_examples() {
        let a = lat(&[2, 3], &[&[2, 0], &[0, 1]]);
        let b = lat(&[2, 3], &[&[2, 1], &[0, 1]]);
        assert!(a.equal(&b).unwrap());

        assert!(!lat(&[2], &[&[1]]).equal(&lat(&[2], &[&[2]])).unwrap());
        assert!(lat(&[2], &[]).equal(&Lattice::zero(vec![p(2)])).unwrap());
        assert!(lat(&[2], &[&[1]]).equal(&lat(&[3], &[&[1]])).is_err());
    }

    #[test]
    fn order_insensitive() {
        let a = lat(&[2, 3], &[&[1, 1], &[3, 1]]);
        let b = lat(&[2, 3], &[&[3, 1], &[1, 1]]);
        assert!(a.equal(&b).unwrap());
    }

    #[test]
    fn includes_examples() {
        let whole = Lattice::full(vec![p(2)]);
        let even = lat(&[2], &[&[2]]);
        assert!(whole.includes(&even).unwrap());
        assert!(!even.includes(&whole).unwrap());
        assert!(even.includes(&Lattice::zero(vec![p(2)])).unwrap());
    }

    #[test]
    fn project_and_extend() {
        let l = lat(&[2, 3], &[&[0, 2]]);
        assert!(l.coordinate_forced_zero(p(2)));
        assert!(!l.coordinate_forced_zero(p(3)));

        let projected = l.project(&[p(3)]).unwrap();
        assert_eq!(projected.basis(), &IntMatrix::from_rows(&[vec![2]]).unwrap());

        let back = projected.extend(vec![p(2), p(3)], false).unwrap();
        assert!(back.equal(&l).unwrap());

        let freed = projected.extend(vec![p(2), p(3)], true).unwrap();
        assert!(freed.contains(&vecs(&[&[1, 0]])[0]).unwrap());
        assert!(freed.contains(&vecs(&[&[0, 2]])[0]).unwrap());
        assert!(!freed.contains(&vecs(&[&[0, 1]])[0]).unwrap());
    }

    #[test]
    fn contains_unit() {
        let l = lat(&[2, 3], &[&[1, 0], &[0, 2]]);
        assert!(l.contains_unit(p(2)));
        assert!(!l.contains_unit(p(3)));
    }

    #[test]
    fn brute_force_membership_agreement() {
        // small-coefficient search agrees with back-substitution
        let l = lat(&[2, 3], &[&[1, 1], &[0, 3]]);
        let basis = l.basis_rows();
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let v = vec![BigInt::from(x), BigInt::from(y)];
                let mut found = false;
                for a in -10i64..=10 {
                    for b in -10i64..=10 {
                        let c0 = BigInt::from(a) * &basis[0][0] + BigInt::from(b) * &basis[1][0];
                        let c1 = BigInt::from(a) * &basis[0][1] + BigInt::from(b) * &basis[1][1];
                        if c0 == v[0] && c1 == v[1] {
                            found = true;
                        }
                    }
                }
                assert_eq!(l.contains(&v).unwrap(), found, "({x},{y})");
            }
        }
    }
}
