//! Seeded random instances for property tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Element, Lpa, Monomial, ScalingVector};
use crate::path::{enumerate_class, enumerate_sink_paths, EvInfPath, FinitePath, TailClass};
use crate::quiver::{Quiver, VertexId};
use crate::repr::{FVector, NVector, SparseVector};
use crate::scalars::{Field, Scalar};

/// A scalar `n/d` with `|n| <= 5`, `1 <= d <= 3`, reduced into the field.
pub fn scalar<R: Rng>(rng: &mut R, field: Field, nonzero: bool) -> Scalar {
    loop {
        let n = rng.gen_range(-5i64..=5);
        let d = rng.gen_range(1i64..=3);
        if let Ok(c) = field.from_ratio(n, d) {
            if !(nonzero && c.is_zero()) {
                return c;
            }
        }
    }
}

/// A random walk of at most `max_len` arrows, backwards from `v`.
pub fn path_ending_at<R: Rng>(rng: &mut R, q: &Quiver, v: VertexId, max_len: usize) -> FinitePath {
    let len = rng.gen_range(0..=max_len);
    let mut p = FinitePath::trivial(v);
    for _ in 0..len {
        let Some(&a) = q.incoming(p.source()).choose(rng) else {
            break;
        };
        p = FinitePath::arrow(q, a).then(q, &p).expect("walk is composable");
    }
    p
}

/// A random monomial `p^* q` with `l(p), l(q) <= max_len`.
pub fn monomial<R: Rng>(rng: &mut R, q: &Quiver, max_len: usize) -> Monomial {
    let t = VertexId(rng.gen_range(0..q.vertex_count() as u32));
    let star = path_ending_at(rng, q, t, max_len);
    let path = path_ending_at(rng, q, t, max_len);
    Monomial::new(star, path).expect("common target")
}

/// A random reduced monomial, by rejection.
pub fn reduced_monomial<R: Rng>(rng: &mut R, lpa: &Lpa, max_len: usize) -> Monomial {
    loop {
        let m = monomial(rng, lpa.quiver(), max_len);
        if !lpa.is_reducible(&m) {
            return m;
        }
    }
}

/// A nonzero reduced element with between 1 and `support` terms.
pub fn reduced_element<R: Rng>(rng: &mut R, lpa: &Lpa, support: usize, max_len: usize) -> Element {
    let size = rng.gen_range(1..=support.max(1));
    let mut x = lpa.zero();
    for _ in 0..size {
        let m = reduced_monomial(rng, lpa, max_len);
        if x.coefficient(&m).is_none() {
            x.add_term(m, scalar(rng, lpa.field(), true));
        }
    }
    x
}

/// An arbitrary, possibly unreduced, element.
pub fn element<R: Rng>(rng: &mut R, lpa: &Lpa, support: usize, max_len: usize) -> Element {
    let mut x = lpa.zero();
    for _ in 0..rng.gen_range(0..=support) {
        let m = monomial(rng, lpa.quiver(), max_len);
        x.add_term(m, scalar(rng, lpa.field(), true));
    }
    x
}

/// A nonzero vector of `F_[class]` supported on paths with prefix at most
/// `bound`.
pub fn class_vector<R: Rng>(
    rng: &mut R,
    q: &Quiver,
    field: Field,
    class: &TailClass,
    bound: usize,
    support: usize,
) -> FVector {
    let basis = enumerate_class(q, class, bound);
    nonzero_combination(rng, field, &basis, support)
}

/// A nonzero vector of `N_sink` supported on paths of length at most
/// `bound`.
pub fn sink_vector<R: Rng>(
    rng: &mut R,
    q: &Quiver,
    field: Field,
    sink: VertexId,
    bound: usize,
    support: usize,
) -> NVector {
    let basis = enumerate_sink_paths(q, sink, bound).expect("a sink");
    nonzero_combination(rng, field, &basis, support)
}

fn nonzero_combination<R: Rng, K: Ord + Clone>(
    rng: &mut R,
    field: Field,
    basis: &[K],
    support: usize,
) -> SparseVector<K> {
    let size = rng.gen_range(1..=support.clamp(1, basis.len()));
    let keys = basis.choose_multiple(rng, size);
    SparseVector::from_terms(field, keys.map(|k| (scalar(rng, field, true), k.clone())))
}

pub fn class_member<R: Rng>(rng: &mut R, q: &Quiver, class: &TailClass, bound: usize) -> EvInfPath {
    enumerate_class(q, class, bound).choose(rng).expect("classes are nonempty").clone()
}

/// A scaling vector with entries drawn from `pool`.
pub fn scaling<R: Rng>(rng: &mut R, q: &Quiver, pool: &[Scalar]) -> ScalingVector {
    let values = q.arrow_ids().map(|_| pool.choose(rng).expect("nonempty pool").clone()).collect();
    ScalingVector::new(q, values).expect("units")
}
