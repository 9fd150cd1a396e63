//! Exact row echelon spans of sparse vectors and ranks of small matrices.

use std::collections::BTreeMap;

use crate::repr::SparseVector;
use crate::scalars::{Field, Scalar};

/// The span of a set of sparse vectors, kept in echelon form keyed by each
/// row's least key.
#[derive(Clone, Debug)]
pub struct Span<K: Ord> {
    field: Field,
    rows: BTreeMap<K, SparseVector<K>>,
}

impl<K: Ord + Clone> Span<K> {
    pub fn new(field: Field) -> Self {
        Span {
            field,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` modulo the span; empty iff `v` lies in it.
    pub fn reduce(&self, v: &SparseVector<K>) -> SparseVector<K> {
        let mut cur = v.clone();
        // Rows only carry keys at or above their pivot, so an ascending sweep
        // never reintroduces an eliminated pivot.
        let mut cursor: Option<K> = None;
        loop {
            let next = cur
                .keys()
                .find(|k| cursor.as_ref().is_none_or(|c| *k > c) && self.rows.contains_key(*k))
                .cloned();
            let Some(pivot) = next else { break };
            let c = cur.coefficient(&pivot).expect("present").clone();
            cur.add_scaled(&self.rows[&pivot], &-c);
            cursor = Some(pivot);
        }
        cur
    }

    pub fn contains(&self, v: &SparseVector<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns the new echelon row when `v` was independent.
    pub fn insert(&mut self, v: &SparseVector<K>) -> Option<SparseVector<K>> {
        let r = self.reduce(v);
        let (pivot, lead) = r.terms().next()?;
        let pivot = pivot.clone();
        let normalized = r.scale(&lead.inv().expect("nonzero"));
        self.rows.insert(pivot, normalized.clone());
        Some(normalized)
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVector<K>> {
        self.rows.values()
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// Rank of a dense matrix given by rows.
pub fn rank(field: Field, rows: &[Vec<Scalar>]) -> usize {
    let mut span = Span::new(field);
    for row in rows {
        let v = SparseVector::from_terms(field, row.iter().cloned().zip(0usize..));
        span.insert(&v);
    }
    span.dim()
}
