//! Structural consequences of the representations: linear-independence
//! probes, faithfulness witnesses for `F (+) N` and for the twisted sum, and
//! the matrix-unit decomposition of acyclic quivers.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{mono_mul, AlgebraError, Element, Lpa, Monomial, ScalingVector};
use crate::linalg::Span;
use crate::path::{enumerate_sink_paths, EvInfPath, FinitePath, TailClass};
use crate::quiver::{ArrowId, Quiver, QuiverError, VertexId};
use crate::repr::{
    act_rep, FModule, FNKey, FNModule, FNVector, Module, RepVector, ReprError, SparseVector,
};
use crate::scalars::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("the element is zero")]
    ZeroElement,
    #[error("vertex `{vertex}` reaches no sink and starts no non-cyclic infinite path")]
    HypothesisFailed { vertex: String },
    #[error("no unit of {0} separates the element from zero")]
    NoWitnessInFiniteField(Field),
    #[error("the quiver has an oriented cycle")]
    NotAcyclic,
    #[error("mode violation: {0}")]
    ModeViolation(String),
    #[error("no probe path available at vertex `{0}`")]
    NoProbeAvailable(String),
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// Which family of monomials an independence witness covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndependenceMode {
    /// `l(p) = m` and `l(q) = n` throughout.
    FixedLengths(usize, usize),
    /// `t(p) = t(q)` a sink throughout.
    SinkEnding,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceWitness {
    pub probes: Vec<FNKey>,
    /// Row keys: (probe index, basis element of the image).
    pub rows: Vec<(usize, FNKey)>,
    /// `matrix[r][c]` is the coefficient of row key `r` in `monos[c] . probe`.
    pub matrix: Vec<Vec<Scalar>>,
    pub rank: usize,
}

impl IndependenceWitness {
    pub fn full_rank(&self, count: usize) -> bool {
        self.rank == count
    }
}

/// Some eventually periodic left-infinite path starting at `v`.
pub fn infinite_path_from(q: &Quiver, v: VertexId) -> Option<EvInfPath> {
    let w = q.reachable_from(v).into_iter().find(|&w| q.on_cycle(w))?;
    let prefix = q.shortest_path(v, w)?;
    let cycle = q.cycle_through(w)?;
    EvInfPath::new(q, prefix, cycle).ok()
}

/// Probes that separate the given monomials: `p q1` with `p` a sink path or
/// infinite path out of `t(q1)` for fixed lengths, the bare path `q` for
/// sink-ending monomials.
pub fn independence_witness(
    lpa: &Lpa,
    monos: &[Monomial],
    mode: IndependenceMode,
) -> Result<IndependenceWitness, StructureError> {
    let q = lpa.quiver();
    let distinct: BTreeSet<&Monomial> = monos.iter().collect();
    if distinct.len() != monos.len() {
        return Err(StructureError::ModeViolation(
            "monomials are not pairwise distinct".into(),
        ));
    }
    for m in monos {
        let ok = match mode {
            IndependenceMode::FixedLengths(a, b) => m.star().len() == a && m.path().len() == b,
            IndependenceMode::SinkEnding => q.is_sink(m.path().target()),
        };
        if !ok {
            return Err(StructureError::ModeViolation(format!(
                "{} does not fit {:?}",
                m.display(q),
                mode
            )));
        }
    }
    let paths: BTreeSet<&FinitePath> = monos.iter().map(Monomial::path).collect();
    let mut probes = Vec::new();
    for q1 in paths {
        let j = q1.target();
        let probe = match mode {
            IndependenceMode::SinkEnding => FNKey::N(q1.clone()),
            IndependenceMode::FixedLengths(..) => {
                if let Some(p) = q.path_to_sink(j) {
                    FNKey::N(q1.then(q, &p)?)
                } else if let Some(p) = infinite_path_from(q, j) {
                    FNKey::F(p.extend(q, q1)?)
                } else {
                    return Err(StructureError::NoProbeAvailable(
                        q.vertex_name(j).to_string(),
                    ));
                }
            }
        };
        probes.push(probe);
    }
    let m = FNModule::new(lpa.quiver_arc(), lpa.field());
    let field = lpa.field();
    let columns: Vec<SparseVector<(usize, FNKey)>> = monos
        .iter()
        .map(|mono| {
            let mut col = SparseVector::zero(field);
            for (i, probe) in probes.iter().enumerate() {
                for (k, c) in m.act_monomial_key(mono, probe).terms() {
                    col.add_term((i, k.clone()), c.clone());
                }
            }
            col
        })
        .collect();
    let rows: Vec<(usize, FNKey)> = columns
        .iter()
        .flat_map(|c| c.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let matrix = rows
        .iter()
        .map(|r| {
            columns
                .iter()
                .map(|c| c.coefficient(r).cloned().unwrap_or_else(|| field.zero()))
                .collect()
        })
        .collect();
    let mut span = Span::new(field);
    for c in &columns {
        span.insert(c);
    }
    Ok(IndependenceWitness {
        probes,
        rows,
        matrix,
        rank: span.dim(),
    })
}

/// A verified nonzero action of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub element: Element,
    /// Arrows left-multiplied during the descent, in order.
    pub descent: Vec<ArrowId>,
    /// Vertex `j` reached at the end of the descent.
    pub vertex: VertexId,
    /// The descended element, a combination of paths ending at `vertex`.
    pub descended: Element,
    pub probe: RepVector,
    /// `(lambda, class)` when the probe lives in a twisted summand.
    pub twist: Option<(Scalar, TailClass)>,
    pub result: RepVector,
}

impl WitnessReport {
    pub fn is_nonzero(&self) -> bool {
        !self.result.is_zero()
    }
}

struct Descent {
    arrows: Vec<ArrowId>,
    vertex: VertexId,
    element: Element,
}

/// Replaces `u` by `e_j u`, then left-multiplies by arrows until no ghost
/// remains. The invariant strictly decreases at every step.
fn descend(lpa: &Lpa, u: &Element) -> Result<Descent, StructureError> {
    let q = lpa.quiver();
    let mut j = lpa
        .supporting_vertex(u)
        .map_err(|_| StructureError::ZeroElement)?;
    let mut cur = lpa.reduce(&(&lpa.vertex(j) * u));
    let mut arrows = Vec::new();
    let mut kappa = lpa.kappa_hat(&cur)?;
    while kappa > 0 {
        let (a, next) = q
            .outgoing(j)
            .iter()
            .find_map(|&a| {
                let v = lpa.reduce(&(&lpa.iota(&FinitePath::arrow(q, a)) * &cur));
                (!v.is_empty()).then_some((a, v))
            })
            .expect("a regular vertex: some arrow keeps the element nonzero");
        let next_kappa = lpa.kappa_hat(&next)?;
        assert!(next_kappa < kappa, "descent invariant did not decrease");
        arrows.push(a);
        j = q.target(a);
        cur = next;
        kappa = next_kappa;
    }
    Ok(Descent {
        arrows,
        vertex: j,
        element: cur,
    })
}

fn shortest_path_term(d: &Element) -> FinitePath {
    d.terms()
        .map(|(m, _)| m.path())
        .min_by_key(|p| p.len())
        .expect("nonzero")
        .clone()
}

/// Untwisted probe at vertex `j`: a sink extension if
/// one exists, otherwise a non-cyclic infinite extension.
fn untwisted_probe(
    q: &Quiver,
    j: VertexId,
    q1: &FinitePath,
) -> Result<Option<FNKey>, StructureError> {
    if let Some(p) = q.path_to_sink(j) {
        return Ok(Some(FNKey::N(q1.then(q, &p)?)));
    }
    if let Some(p) = q.noncyclic_tail(j) {
        return Ok(Some(FNKey::F(p.extend(q, q1)?)));
    }
    Ok(None)
}

fn verified(
    lpa: &Lpa,
    u: &Element,
    d: Descent,
    probe: FNVector,
    twist: Option<(Scalar, TailClass)>,
) -> Result<WitnessReport, StructureError> {
    let probe = RepVector::DirectSum(probe);
    let a = match &twist {
        Some((lambda, class)) => Some(ScalingVector::lambda_form(lpa.quiver(), lambda, class)?),
        None => None,
    };
    let result = act_rep(lpa, a.as_ref(), u, &probe)?;
    assert!(!result.is_zero(), "witness failed to verify");
    Ok(WitnessReport {
        element: u.clone(),
        descent: d.arrows,
        vertex: d.vertex,
        descended: d.element,
        probe,
        twist,
        result,
    })
}

/// Vertices that reach no sink and have no non-cyclic tail, where `F (+) N`
/// has no probe.
pub fn hypothesis_failures(q: &Quiver) -> Vec<VertexId> {
    q.vertex_ids()
        .filter(|&v| !q.reaches_sink(v) && !q.has_noncyclic_tail(v))
        .collect()
}

/// A vector of `F (+) N` on which `u` acts nontrivially.
pub fn faithfulness_witness(lpa: &Lpa, u: &Element) -> Result<WitnessReport, StructureError> {
    let q = lpa.quiver();
    if lpa.is_zero(u) {
        return Err(StructureError::ZeroElement);
    }
    if let Some(&v) = hypothesis_failures(q).first() {
        return Err(StructureError::HypothesisFailed {
            vertex: q.vertex_name(v).to_string(),
        });
    }
    let d = descend(lpa, u)?;
    let q1 = shortest_path_term(&d.element);
    let key = untwisted_probe(q, d.vertex, &q1)?.expect("hypothesis holds at every vertex");
    verified(lpa, u, d, SparseVector::basis(lpa.field(), key), None)
}

/// A vector of the twisted sum `S` on which `u` acts nontrivially. Falls back
/// to a cycle through the final vertex with a `lambda`-twist, trying units in
/// order: `1..=D+1` over the rationals (`D` bounds the degree of the
/// polynomial in `lambda`), every unit over a prime field.
pub fn s_faithfulness_witness(lpa: &Lpa, u: &Element) -> Result<WitnessReport, StructureError> {
    let q = lpa.quiver();
    if lpa.is_zero(u) {
        return Err(StructureError::ZeroElement);
    }
    let d = descend(lpa, u)?;
    let q1 = shortest_path_term(&d.element);
    if let Some(key) = untwisted_probe(q, d.vertex, &q1)? {
        return verified(lpa, u, d, SparseVector::basis(lpa.field(), key), None);
    }
    let cycle = q
        .cycle_through(d.vertex)
        .expect("a vertex with no sink and no non-cyclic tail lies on a cycle");
    let class = TailClass::of(q, &cycle)?;
    let probe_path = EvInfPath::cyclic(q, cycle)?.extend(q, &q1)?;
    let probe = SparseVector::basis(lpa.field(), probe_path);
    let field = lpa.field();
    let degree = d
        .element
        .terms()
        .map(|(m, _)| m.path().len())
        .max()
        .unwrap_or(0);
    let candidates: Box<dyn Iterator<Item = Scalar>> = if field.is_finite() {
        field.units()
    } else {
        Box::new((1..=degree as i64 + 1).map(move |n| field.from_i64(n)))
    };
    for lambda in candidates {
        let a = ScalingVector::lambda_form(q, &lambda, &class)?;
        let f = FModule::twisted(lpa.quiver_arc(), field, a);
        if !f.act(u, &probe)?.is_empty() {
            return verified(lpa, u, d, FNModule::inject_f(&probe), Some((lambda, class)));
        }
    }
    if field.is_finite() {
        Err(StructureError::NoWitnessInFiniteField(field))
    } else {
        unreachable!("a nonzero polynomial of degree {degree} has at most {degree} roots")
    }
}

/// One matrix block, indexed by the paths into a sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub sink: VertexId,
    pub paths: Vec<FinitePath>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.paths.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wedderburn {
    pub blocks: Vec<Block>,
    /// `sum n_i^2`.
    pub dim: usize,
    /// Number of reduced monomials spanning the algebra.
    pub reduced_dim: usize,
    /// Products checked against `E_pq E_gh = [q = g] E_ph`.
    pub table_checks: usize,
    pub table_failures: Vec<String>,
    /// Whether the diagonal matrix units sum to the unit `sum e_v`.
    pub unit_ok: bool,
    /// Rank of the matrix units under the sink-module probes.
    pub rank: usize,
}

impl Wedderburn {
    pub fn verified(&self) -> bool {
        self.table_failures.is_empty()
            && self.reduced_dim == self.dim
            && self.unit_ok
            && self.rank == self.dim
    }

    /// Block coordinates `(block, row, column)` of `p^* q`.
    pub fn position(&self, m: &Monomial) -> Option<(usize, usize, usize)> {
        let b = self
            .blocks
            .iter()
            .position(|b| b.sink == m.star().target())?;
        let row = self.blocks[b].paths.iter().position(|p| p == m.star())?;
        let col = self.blocks[b].paths.iter().position(|p| p == m.path())?;
        Some((b, row, col))
    }
}

/// `L_k(Q)` as a product of matrix algebras, one per sink, with an
/// exhaustive multiplication-table check.
pub fn wedderburn(lpa: &Lpa) -> Result<Wedderburn, StructureError> {
    let q = lpa.quiver();
    if q.has_cycle() {
        return Err(StructureError::NotAcyclic);
    }
    let bound = q.vertex_count();
    let blocks: Vec<Block> = q
        .sinks()
        .into_iter()
        .map(|s| {
            Ok(Block {
                sink: s,
                paths: enumerate_sink_paths(q, s, bound)?,
            })
        })
        .collect::<Result<_, QuiverError>>()?;
    let units: Vec<Monomial> = blocks
        .iter()
        .flat_map(|b| {
            b.paths.iter().flat_map(move |p| {
                b.paths
                    .iter()
                    .map(move |r| Monomial::new(p.clone(), r.clone()).expect("same sink"))
            })
        })
        .collect();
    let dim = units.len();
    let mut table_failures = Vec::new();
    for x in &units {
        for y in &units {
            let expect = (x.path() == y.star() && x.star().target() == y.star().target())
                .then(|| Monomial::new(x.star().clone(), y.path().clone()).expect("same sink"));
            if mono_mul(x, y) != expect {
                table_failures.push(format!("{} * {}", x.display(q), y.display(q)));
            }
        }
    }
    let diagonal = Element::from_terms(
        lpa.field(),
        blocks.iter().flat_map(|b| b.paths.iter()).map(|p| {
            (
                lpa.field().one(),
                Monomial::new(p.clone(), p.clone()).expect("same path"),
            )
        }),
    );
    let one = Element::from_terms(
        lpa.field(),
        q.vertex_ids()
            .map(|v| (lpa.field().one(), Monomial::vertex(v))),
    );
    let unit_ok = lpa.equals(&diagonal, &one);
    let rank = independence_witness(lpa, &units, IndependenceMode::SinkEnding)?.rank;
    Ok(Wedderburn {
        blocks,
        dim,
        reduced_dim: lpa.reduced_monomials(bound).len(),
        table_checks: dim * dim,
        table_failures,
        unit_ok,
        rank,
    })
}

/// Witness searches over many elements, one per item.
pub fn witness_batch(
    lpa: &Lpa,
    elements: &[Element],
    twisted: bool,
    exec: crate::batch::Exec,
) -> Vec<Result<WitnessReport, StructureError>> {
    exec.map(elements, |u| {
        if twisted {
            s_faithfulness_witness(lpa, u)
        } else {
            faithfulness_witness(lpa, u)
        }
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::Generator;
    use crate::quiver::standard::*;

    fn setup(q: Quiver, field: Field) -> Lpa {
        Lpa::new(Arc::new(q), field)
    }

    fn arrow(l: &Lpa, n: &str) -> Element {
        l.generator(Generator::Arrow(l.quiver().arrow(n).unwrap()))
    }

    fn ghost(l: &Lpa, n: &str) -> Element {
        l.generator(Generator::Ghost(l.quiver().arrow(n).unwrap()))
    }

    #[test]
    fn independence() {
        let l = setup(rose(2), Field::Rationals);
        let monos: Vec<Monomial> = ["a", "b"]
            .iter()
            .map(|n| Monomial::of_path(FinitePath::arrow(l.quiver(), l.quiver().arrow(n).unwrap())))
            .collect();
        let w = independence_witness(&l, &monos, IndependenceMode::FixedLengths(0, 1)).unwrap();
        assert!(w.full_rank(2));
        assert!(w.probes.iter().all(|p| matches!(p, FNKey::F(_))));
        assert!(matches!(
            independence_witness(&l, &monos, IndependenceMode::FixedLengths(1, 1)),
            Err(StructureError::ModeViolation(_))
        ));

        let t = setup(toeplitz(), Field::Rationals);
        let q = t.quiver();
        let f = FinitePath::arrow(q, q.arrow("f").unwrap());
        let fx = FinitePath::arrow(q, q.arrow("x").unwrap())
            .then(q, &f)
            .unwrap();
        let monos = vec![
            Monomial::new(f.clone(), f).unwrap(),
            Monomial::new(fx.clone(), fx).unwrap(),
        ];
        let w = independence_witness(&t, &monos, IndependenceMode::SinkEnding).unwrap();
        assert!(w.full_rank(2));
    }

    #[test]
    fn faithfulness_on_toeplitz() {
        let t = setup(toeplitz(), Field::Rationals);
        let e1 = t.vertex(t.quiver().vertex("1").unwrap());
        let u = &(&ghost(&t, "x") * &arrow(&t, "x")) - &e1;
        let w = faithfulness_witness(&t, &u).unwrap();
        assert!(w.is_nonzero());
        assert_eq!(w.probe.display(t.quiver()), "f");
        assert_eq!(w.result.display(t.quiver()), "-f");
        let w = faithfulness_witness(&t, &e1).unwrap();
        assert!(w.is_nonzero());
        assert_eq!(
            faithfulness_witness(&t, &t.zero()),
            Err(StructureError::ZeroElement)
        );
    }

    #[test]
    fn faithfulness_hypothesis() {
        let r1 = setup(rose(1), Field::Rationals);
        let u = &r1.vertex(VertexId(0)) - &arrow(&r1, "x");
        assert_eq!(
            faithfulness_witness(&r1, &u),
            Err(StructureError::HypothesisFailed { vertex: "v".into() })
        );
        let r2 = setup(rose(2), Field::Rationals);
        let u = &r2.vertex(VertexId(0)) - &arrow(&r2, "a");
        assert!(faithfulness_witness(&r2, &u).unwrap().is_nonzero());
    }

    #[test]
    fn twisted_faithfulness() {
        let r1 = setup(rose(1), Field::Rationals);
        let u = &r1.vertex(VertexId(0)) - &arrow(&r1, "x");
        let w = s_faithfulness_witness(&r1, &u).unwrap();
        let (lambda, _) = w.twist.clone().unwrap();
        assert_eq!(lambda, r1.scalar(2));
        assert_eq!(w.result.display(r1.quiver()), "-(x)^inf");

        let gf2 = setup(rose(1), Field::prime(2).unwrap());
        let u = &gf2.vertex(VertexId(0)) - &arrow(&gf2, "x");
        assert!(!gf2.is_zero(&u));
        assert_eq!(
            s_faithfulness_witness(&gf2, &u),
            Err(StructureError::NoWitnessInFiniteField(
                Field::prime(2).unwrap()
            ))
        );

        let t = setup(toeplitz(), Field::Rationals);
        let w = s_faithfulness_witness(&t, &arrow(&t, "f")).unwrap();
        assert!(w.twist.is_none());
    }

    #[test]
    fn wedderburn_blocks() {
        let a2 = setup(line(2), Field::Rationals);
        let w = wedderburn(&a2).unwrap();
        assert!(w.verified(), "{w:?}");
        assert_eq!((w.blocks.len(), w.blocks[0].size(), w.dim), (1, 2, 4));
        let a3 = setup(line(3), Field::Rationals);
        let w = wedderburn(&a3).unwrap();
        assert!(w.verified());
        assert_eq!((w.blocks[0].size(), w.dim), (3, 9));
        let point = setup(
            Quiver::new::<_, _, &str>("P", ["v"], []).unwrap(),
            Field::Rationals,
        );
        let w = wedderburn(&point).unwrap();
        assert!(w.verified() && w.dim == 1);
        assert_eq!(
            wedderburn(&setup(rose(1), Field::Rationals)),
            Err(StructureError::NotAcyclic)
        );
    }
}
