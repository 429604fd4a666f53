use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{0, …, d−1}`, stored as its image list: point `k` maps to
/// `images[k]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        if d == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d {
                return Err(Error::InvalidPermutation(format!(
                    "image {i} out of range for degree {d}"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("image {i} repeated")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[0, 1, 2]]` sends 0→1→2→0.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                if a >= degree || std::mem::replace(&mut touched[a], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "bad cycle point {a} for degree {degree}"
                    )));
                }
                images[a] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Permutation::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &i)| k == i)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (k, &i) in self.images.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first. Degrees must agree.
    pub(crate) fn after(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&k| self.images[k]).collect(),
        }
    }

    pub fn moved_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(k, i)| k != *i)
            .map(|(k, _)| k)
    }

    /// +1 for even, −1 for odd permutations.
    pub fn sign(&self) -> i32 {
        let mut seen = vec![false; self.degree()];
        let mut transpositions = 0;
        for start in 0..self.degree() {
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.images[k];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Composition `p ∘ q`, mapping `k ↦ p[q[k]]`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    if p.degree() != q.degree() {
        return Err(Error::DegreeMismatch {
            expected: p.degree(),
            found: q.degree(),
        });
    }
    Ok(p.after(q))
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        assert_eq!(
            compose(&perm(&[1, 0, 2]), &perm(&[0, 2, 1])).unwrap(),
            perm(&[1, 2, 0])
        );
        assert_eq!(
            compose(&Permutation::identity(4), &perm(&[3, 2, 1, 0])).unwrap(),
            perm(&[3, 2, 1, 0])
        );
        let p = perm(&[1, 2, 0]);
        assert_eq!(compose(&p, &p.inverse()).unwrap(), perm(&[0, 1, 2]));
    }

    #[test]
    fn compose_rejects_degree_mismatch() {
        let err = compose(&perm(&[1, 0]), &perm(&[0, 1, 2])).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch { .. }));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn cycles_and_sign() {
        let c = Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap();
        assert_eq!(c, perm(&[1, 2, 0, 3]));
        assert_eq!(c.sign(), 1);
        assert_eq!(perm(&[1, 0, 2, 3]).sign(), -1);
    }

    fn arb_perm() -> impl Strategy<Value = Permutation> {
        (1usize..9)
            .prop_flat_map(|d| Just((0..d).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_cancels(p in arb_perm()) {
            prop_assert!(compose(&p, &p.inverse()).unwrap().is_identity());
            prop_assert!(compose(&p.inverse(), &p).unwrap().is_identity());
        }

        #[test]
        fn serde_round_trip(p in arb_perm()) {
            let s = serde_json::to_string(&p).unwrap();
            let q: Permutation = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
