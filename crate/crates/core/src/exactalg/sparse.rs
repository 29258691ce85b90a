use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rat;

/// Sparse rational vector keyed by coordinate index.
pub type SparseVec = BTreeMap<usize, Rat>;

pub fn axpy(y: &mut SparseVec, a: &Rat, x: &SparseVec) {
    for (k, v) in x {
        let entry = y.entry(*k).or_insert_with(Rat::zero);
        *entry += a * v;
        if entry.is_zero() {
            y.remove(k);
        }
    }
}

/// Incremental echelon basis of a span of sparse vectors.
///
/// Each stored vector has a distinct leading coordinate (its smallest
/// nonzero index) normalized to 1, and is fully reduced against the others,
/// so reduction against the basis yields a unique normal form. Every stored
/// vector remembers which combination of the inserted vectors produced it.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    by_lead: BTreeMap<usize, (SparseVec, SparseVec)>,
    kernel: Vec<SparseVec>,
    inserted: usize,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.by_lead.len()
    }

    /// Combinations of inserted vectors (by insertion index) that vanish.
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_lead.keys().copied()
    }

    /// Stored basis vectors in increasing order of leading coordinate.
    pub fn vectors(&self) -> impl Iterator<Item = (usize, &SparseVec)> + '_ {
        self.by_lead.iter().map(|(k, (v, _))| (*k, v))
    }

    /// Reduce `v` to normal form; returns the remainder and the combination
    /// of basis-producing inputs that was subtracted.
    fn reduce_tracked(&self, mut v: SparseVec, mut combo: SparseVec) -> (SparseVec, SparseVec) {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(k, _)| self.by_lead.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let (bv, bc) = &self.by_lead[&k];
            let neg = -c;
            axpy(&mut v, &neg, bv);
            axpy(&mut combo, &neg, bc);
            cursor = k + 1;
        }
        (v, combo)
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_tracked(v.clone(), SparseVec::new()).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert the next vector; returns whether it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let mut combo = SparseVec::new();
        combo.insert(idx, Rat::one());
        let (mut r, mut c) = self.reduce_tracked(v, combo);
        let Some((&lead, lead_val)) = r.iter().next() else {
            self.kernel.push(c);
            return false;
        };
        let inv = lead_val.recip();
        for x in r.values_mut() {
            *x *= &inv;
        }
        for x in c.values_mut() {
            *x *= &inv;
        }
        // keep the basis fully reduced: clear `lead` from the other vectors
        for (bv, bc) in self.by_lead.values_mut() {
            if let Some(f) = bv.get(&lead).cloned() {
                let neg = -f;
                axpy(bv, &neg, &r);
                axpy(bc, &neg, &c);
            }
        }
        self.by_lead.insert(lead, (r, c));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, x)| (k, rat(x, 1))).collect()
    }

    #[test]
    fn dependent_vectors_land_in_kernel() {
        let mut b = EchelonBasis::new();
        assert!(b.insert(sv(&[(0, 1), (1, 2)])));
        assert!(b.insert(sv(&[(1, 1), (2, 1)])));
        assert!(!b.insert(sv(&[(0, 1), (1, 3), (2, 1)])));
        assert_eq!(b.rank(), 2);
        assert_eq!(b.kernel().len(), 1);
        let k = &b.kernel()[0];
        assert_eq!(k.get(&0), Some(&rat(-1, 1)));
        assert_eq!(k.get(&1), Some(&rat(-1, 1)));
        assert_eq!(k.get(&2), Some(&rat(1, 1)));
    }

    #[test]
    fn normal_form_is_unique() {
        let mut b = EchelonBasis::new();
        b.insert(sv(&[(1, 2), (3, 1)]));
        b.insert(sv(&[(0, 1), (1, 1)]));
        let r1 = b.reduce(&sv(&[(0, 1), (3, 5)]));
        let r2 = b.reduce(&sv(&[(1, -1), (3, 5)]));
        assert_eq!(r1, r2);
        assert!(r1.keys().all(|k| !b.pivots().any(|p| p == *k)));
    }
}
