//! Elements of the Leavitt path algebra `L_k(Q)` as exact linear
//! combinations of monomials `p^* q`, with the rewriting system that decides
//! equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::path::{FinitePath, TailClass};
use crate::quiver::{ArrowId, Quiver, QuiverError, VertexId};
use crate::scalars::{Field, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("the element is zero")]
    ZeroElement,
    #[error("arrow `{arrow}` does not start at `{vertex}`")]
    BadSpecialEdge { vertex: String, arrow: String },
    #[error("scaling vector has {got} entries, quiver has {expected} arrows")]
    ScalingLength { expected: usize, got: usize },
    #[error("scaling entries must be nonzero (arrow `{0}`)")]
    ZeroScaling(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The monomial `p^* q` with `t(p) = t(q)`; `e_i` is `(e_i, e_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    star: FinitePath,
    path: FinitePath,
}

impl Monomial {
    pub fn new(star: FinitePath, path: FinitePath) -> Result<Self, QuiverError> {
        if star.target() != path.target() {
            return Err(QuiverError::NotComposable {
                left: format!("{:?}^*", star.arrows()),
                right: format!("{:?}", path.arrows()),
            });
        }
        Ok(Monomial { star, path })
    }

    pub fn vertex(v: VertexId) -> Self {
        Monomial {
            star: FinitePath::trivial(v),
            path: FinitePath::trivial(v),
        }
    }

    /// `iota(q) = e_{t(q)}^* q`.
    pub fn of_path(q: FinitePath) -> Self {
        Monomial {
            star: FinitePath::trivial(q.target()),
            path: q,
        }
    }

    /// `p^* = p^* e_{t(p)}`.
    pub fn of_ghost(p: FinitePath) -> Self {
        Monomial {
            path: FinitePath::trivial(p.target()),
            star: p,
        }
    }

    /// The starred path `p`.
    pub fn star(&self) -> &FinitePath {
        &self.star
    }

    /// The unstarred path `q`.
    pub fn path(&self) -> &FinitePath {
        &self.path
    }

    /// `deg(p^* q) = l(q) - l(p)`.
    pub fn degree(&self) -> i64 {
        self.path.len() as i64 - self.star.len() as i64
    }

    /// `(p^* q)^* = q^* p`.
    pub fn adjoint(&self) -> Monomial {
        Monomial {
            star: self.path.clone(),
            path: self.star.clone(),
        }
    }

    /// Generators whose successive application realises `p^* q` on a
    /// module: `e_{s(q)}`, the arrows of `q` in traversal order, then the
    /// ghosts of `p` from its last arrow back to its first.
    pub fn generator_word(&self) -> Vec<Generator> {
        let mut word = vec![Generator::Vertex(self.path.source())];
        word.extend(self.path.arrows().iter().map(|&a| Generator::Arrow(a)));
        word.extend(
            self.star
                .arrows()
                .iter()
                .rev()
                .map(|&a| Generator::Ghost(a)),
        );
        word
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> MonomialDisplay<'a> {
        MonomialDisplay {
            mono: self,
            quiver: q,
        }
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    quiver: &'a Quiver,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = (&self.mono.star, &self.mono.path);
        match (p.is_trivial(), q.is_trivial()) {
            (true, true) => write!(f, "e_{}", self.quiver.vertex_name(p.source())),
            (true, false) => write!(f, "{}", q.display(self.quiver)),
            (false, qt) => {
                if p.len() == 1 {
                    write!(f, "{}^*", p.display(self.quiver))?;
                } else {
                    write!(f, "({})^*", p.display(self.quiver))?;
                }
                if !qt {
                    write!(f, ".{}", q.display(self.quiver))?;
                }
                Ok(())
            }
        }
    }
}

/// Product of two monomials:
///
/// ```text
/// (p^* q)(g^* h) = (g' p)^* h   if g = g' q
///                = p^* (q' h)   if q = q' g
///                = 0            otherwise
/// ```
pub fn mono_mul(m1: &Monomial, m2: &Monomial) -> Option<Monomial> {
    let (p, q) = (&m1.star, &m1.path);
    let (g, h) = (&m2.star, &m2.path);
    if let Some(rest) = g.strip_prefix(q) {
        return Some(Monomial {
            star: p.join(&rest),
            path: h.clone(),
        });
    }
    if let Some(rest) = q.strip_prefix(g) {
        return Some(Monomial {
            star: p.clone(),
            path: h.join(&rest),
        });
    }
    None
}

/// A finitely supported combination of monomials with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero(field: Field) -> Self {
        Element {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: Field, m: Monomial) -> Self {
        let mut e = Element::zero(field);
        e.terms.insert(m, field.one());
        e
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (Scalar, Monomial)>) -> Self {
        let mut e = Element::zero(field);
        for (c, m) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        assert_eq!(c.field(), self.field, "coefficient from a different field");
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Terms in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.get(m)
    }

    /// Syntactic emptiness; use [`Lpa::is_zero`] for equality in `L_k(Q)`.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    fn check(&self, other: &Element) -> Result<(), AlgebraError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(AlgebraError::FieldMismatch(self.field, other.field))
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check(other)?;
        let mut out = Element::zero(self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(m) = mono_mul(m1, m2) {
                    out.add_term(m, c1 * c2);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        let mut out = Element::zero(self.field);
        for (m, d) in &self.terms {
            out.add_term(m.clone(), c * d);
        }
        out
    }

    /// The involution, `(p^* q)^* = q^* p`.
    pub fn star(&self) -> Element {
        Element {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.adjoint(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous components keyed by degree.
    pub fn degree_split(&self) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Element::zero(self.field))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The scaling automorphism: `gamma_a(p^* q) = a_p^{-1} a_q p^* q`.
    pub fn gamma(&self, a: &ScalingVector) -> Element {
        let mut out = Element::zero(self.field);
        for (m, c) in &self.terms {
            let w = &a.weight(&m.path) * &a.weight(&m.star).inv().expect("units");
            out.add_term(m.clone(), c * &w);
        }
        out
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> ElementDisplay<'a> {
        ElementDisplay {
            elem: self,
            quiver: q,
        }
    }
}

pub struct ElementDisplay<'a> {
    elem: &'a Element,
    quiver: &'a Quiver,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_combination(
            f,
            self.elem
                .terms
                .iter()
                .map(|(m, c)| (c, m.display(self.quiver).to_string())),
        )
    }
}

/// Writes `c1*k1 + c2*k2 - ...`, eliding unit coefficients; `0` when empty.
pub(crate) fn write_combination<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Scalar, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, key) in terms {
        let negative = c.is_negative();
        let magnitude = if negative { -c } else { c.clone() };
        match (first, negative) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        if magnitude.is_one() {
            write!(f, "{key}")?;
        } else {
            write!(f, "{magnitude}*{key}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs)
            .expect("elements over different fields")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs)
            .expect("elements over different fields")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs)
            .expect("elements over different fields")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// One designated outgoing arrow per regular vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialEdges {
    edges: Vec<Option<ArrowId>>,
}

impl SpecialEdges {
    /// Lexicographically least outgoing arrow at each regular vertex.
    pub fn least(q: &Quiver) -> Self {
        SpecialEdges {
            edges: q
                .vertex_ids()
                .map(|v| q.outgoing(v).first().copied())
                .collect(),
        }
    }

    pub fn with_overrides(
        q: &Quiver,
        overrides: &[(VertexId, ArrowId)],
    ) -> Result<Self, AlgebraError> {
        let mut s = SpecialEdges::least(q);
        for &(v, a) in overrides {
            if q.source(a) != v {
                return Err(AlgebraError::BadSpecialEdge {
                    vertex: q.vertex_name(v).to_string(),
                    arrow: q.arrow_name(a).to_string(),
                });
            }
            s.edges[v.index()] = Some(a);
        }
        Ok(s)
    }

    pub fn at(&self, v: VertexId) -> Option<ArrowId> {
        self.edges[v.index()]
    }
}

/// A nonzero scalar `a_alpha` per arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalingVector {
    values: Vec<Scalar>,
}

impl ScalingVector {
    pub fn new(q: &Quiver, values: Vec<Scalar>) -> Result<Self, AlgebraError> {
        if values.len() != q.arrow_count() {
            return Err(AlgebraError::ScalingLength {
                expected: q.arrow_count(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(Scalar::is_zero) {
            return Err(AlgebraError::ZeroScaling(
                q.arrow_name(ArrowId(i as u32)).to_string(),
            ));
        }
        Ok(ScalingVector { values })
    }

    pub fn ones(q: &Quiver, field: Field) -> Self {
        ScalingVector {
            values: vec![field.one(); q.arrow_count()],
        }
    }

    /// `a_{lambda, q}`: `lambda` on the class's designated first arrow, 1 elsewhere.
    pub fn lambda_form(
        q: &Quiver,
        lambda: &Scalar,
        class: &TailClass,
    ) -> Result<Self, AlgebraError> {
        let mut a = ScalingVector::ones(q, lambda.field());
        if lambda.is_zero() {
            return Err(AlgebraError::ZeroScaling(
                q.arrow_name(class.first_arrow()).to_string(),
            ));
        }
        a.values[class.first_arrow().index()] = lambda.clone();
        Ok(a)
    }

    pub fn get(&self, a: ArrowId) -> &Scalar {
        &self.values[a.index()]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// `a_p`, the product along `p`; 1 for trivial paths.
    pub fn weight(&self, p: &FinitePath) -> Scalar {
        let field = self.values[0].field();
        p.arrows()
            .iter()
            .fold(field.one(), |acc, &a| &acc * &self.values[a.index()])
    }

    /// Weight along a raw arrow sequence.
    pub fn weight_of(&self, arrows: &[ArrowId], field: Field) -> Scalar {
        arrows
            .iter()
            .fold(field.one(), |acc, &a| &acc * &self.values[a.index()])
    }

    pub fn inverse(&self) -> ScalingVector {
        ScalingVector {
            values: self
                .values
                .iter()
                .map(|v| v.inv().expect("units"))
                .collect(),
        }
    }

    pub fn product(&self, other: &ScalingVector) -> ScalingVector {
        ScalingVector {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * y)
                .collect(),
        }
    }

    pub fn is_stable(&self, p: &FinitePath) -> bool {
        self.weight(p).is_one()
    }
}

/// Algebra generators `e_i`, `alpha`, `alpha^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Vertex(VertexId),
    Arrow(ArrowId),
    Ghost(ArrowId),
}

impl Generator {
    pub fn monomial(&self, q: &Quiver) -> Monomial {
        match *self {
            Generator::Vertex(v) => Monomial::vertex(v),
            Generator::Arrow(a) => Monomial::of_path(FinitePath::arrow(q, a)),
            Generator::Ghost(a) => Monomial::of_ghost(FinitePath::arrow(q, a)),
        }
    }

    pub fn name(&self, q: &Quiver) -> String {
        match *self {
            Generator::Vertex(v) => format!("e_{}", q.vertex_name(v)),
            Generator::Arrow(a) => q.arrow_name(a).to_string(),
            Generator::Ghost(a) => format!("{}^*", q.arrow_name(a)),
        }
    }

    /// Every generator of `L_k(Q)`: vertices, then arrows, then ghosts.
    pub fn all(q: &Quiver) -> Vec<Generator> {
        q.vertex_ids()
            .map(Generator::Vertex)
            .chain(q.arrow_ids().map(Generator::Arrow))
            .chain(q.arrow_ids().map(Generator::Ghost))
            .collect()
    }
}

/// Order in which the rewriting engine picks reducible monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteOrder {
    Leftmost,
    Seeded(u64),
}

/// `L_k(Q)` for a fixed quiver, field and special-edge choice.
#[derive(Clone, Debug)]
pub struct Lpa {
    quiver: Arc<Quiver>,
    field: Field,
    special: SpecialEdges,
}

impl Lpa {
    pub fn new(quiver: Arc<Quiver>, field: Field) -> Self {
        let special = SpecialEdges::least(&quiver);
        Lpa {
            quiver,
            field,
            special,
        }
    }

    pub fn with_special(quiver: Arc<Quiver>, field: Field, special: SpecialEdges) -> Self {
        Lpa {
            quiver,
            field,
            special,
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn quiver_arc(&self) -> Arc<Quiver> {
        Arc::clone(&self.quiver)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn special(&self) -> &SpecialEdges {
        &self.special
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.field)
    }

    pub fn scalar(&self, n: i64) -> Scalar {
        self.field.from_i64(n)
    }

    pub fn monomial(&self, m: Monomial) -> Element {
        Element::monomial(self.field, m)
    }

    pub fn vertex(&self, v: VertexId) -> Element {
        self.monomial(Monomial::vertex(v))
    }

    pub fn generator(&self, g: Generator) -> Element {
        self.monomial(g.monomial(&self.quiver))
    }

    /// `iota_Q(p)`.
    pub fn iota(&self, p: &FinitePath) -> Element {
        self.monomial(Monomial::of_path(p.clone()))
    }

    /// `iota_Q` on a path-algebra combination.
    pub fn iota_combination(&self, terms: &[(Scalar, FinitePath)]) -> Element {
        Element::from_terms(
            self.field,
            terms
                .iter()
                .map(|(c, p)| (c.clone(), Monomial::of_path(p.clone()))),
        )
    }

    pub fn ghost_path(&self, p: &FinitePath) -> Element {
        self.monomial(Monomial::of_ghost(p.clone()))
    }

    fn own(&self, u: &Element) -> Result<(), AlgebraError> {
        if u.field == self.field {
            Ok(())
        } else {
            Err(AlgebraError::FieldMismatch(self.field, u.field))
        }
    }

    pub fn mul(&self, u: &Element, v: &Element) -> Result<Element, AlgebraError> {
        self.own(u)?;
        u.checked_mul(v)
    }

    /// Whether `m` matches the left side of the special-edge rule
    /// `(g p)^*(g q) -> p^* q - sum_{a != g, s(a) = s(g)} (a p)^*(a q)`.
    pub fn is_reducible(&self, m: &Monomial) -> bool {
        match (m.star.last_arrow(), m.path.last_arrow()) {
            (Some(x), Some(y)) => x == y && self.special.at(self.quiver.source(x)) == Some(x),
            _ => false,
        }
    }

    /// One rewrite of a reducible monomial.
    fn rewrite_once(&self, m: &Monomial) -> Vec<(bool, Monomial)> {
        let q = &*self.quiver;
        let g = m.star.last_arrow().expect("reducible");
        let p = m.star.drop_last(q).expect("nontrivial");
        let r = m.path.drop_last(q).expect("nontrivial");
        let mut out = vec![(
            true,
            Monomial {
                star: p.clone(),
                path: r.clone(),
            },
        )];
        for &a in q.outgoing(q.source(g)) {
            if a == g {
                continue;
            }
            let tail = FinitePath::arrow(q, a);
            out.push((
                false,
                Monomial {
                    star: p.join(&tail),
                    path: r.join(&tail),
                },
            ));
        }
        out
    }

    /// The unique reduced form.
    pub fn reduce(&self, u: &Element) -> Element {
        let mut out = Element::zero(u.field);
        for (m, c) in &u.terms {
            // Peel special heads off p^* q until the rule no longer applies.
            let mut cur = m.clone();
            while self.is_reducible(&cur) {
                let mut pieces = self.rewrite_once(&cur).into_iter();
                let (_, next) = pieces.next().expect("leading term");
                for (_, side) in pieces {
                    out.add_term(side, -c);
                }
                cur = next;
            }
            out.add_term(cur, c.clone());
        }
        out
    }

    /// General rewriting: repeatedly rewrites a reducible monomial chosen by
    /// `order`. Returns the normal form and the number of rewrite steps.
    pub fn reduce_with(&self, u: &Element, order: RewriteOrder) -> (Element, usize) {
        let bound: usize = u.terms.keys().map(|m| m.star.len().min(m.path.len())).sum();
        let mut rng = match order {
            RewriteOrder::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
            RewriteOrder::Leftmost => None,
        };
        let mut cur = u.clone();
        let mut steps = 0;
        loop {
            let reducible: Vec<Monomial> = cur
                .terms
                .keys()
                .filter(|m| self.is_reducible(m))
                .cloned()
                .collect();
            let pick = match (&mut rng, reducible.first()) {
                (_, None) => break,
                (None, Some(m)) => m.clone(),
                (Some(r), Some(_)) => reducible.choose(r).expect("nonempty").clone(),
            };
            let c = cur.terms.remove(&pick).expect("present");
            for (lead, m) in self.rewrite_once(&pick) {
                cur.add_term(m, if lead { c.clone() } else { -&c });
            }
            steps += 1;
            assert!(steps <= bound, "rewriting exceeded its termination bound");
        }
        (cur, steps)
    }

    pub fn is_zero(&self, u: &Element) -> bool {
        self.reduce(u).is_empty()
    }

    pub fn equals(&self, u: &Element, v: &Element) -> bool {
        self.is_zero(&(u - v))
    }

    /// Maximal star length in the reduced form; an upper bound for the
    /// minimal star length over all normal forms.
    pub fn kappa_hat(&self, u: &Element) -> Result<usize, AlgebraError> {
        let r = self.reduce(u);
        r.terms
            .keys()
            .map(|m| m.star.len())
            .max()
            .ok_or(AlgebraError::ZeroElement)
    }

    /// Sums of vertex idempotents `x`, `y` with `x u y = u`.
    pub fn local_units(&self, u: &Element) -> Result<(Element, Element), AlgebraError> {
        let r = self.reduce(u);
        if r.is_empty() {
            return Err(AlgebraError::ZeroElement);
        }
        let mut x = self.zero();
        let mut y = self.zero();
        let left: std::collections::BTreeSet<VertexId> =
            r.terms.keys().map(|m| m.star.source()).collect();
        let right: std::collections::BTreeSet<VertexId> =
            r.terms.keys().map(|m| m.path.source()).collect();
        for v in left {
            x.add_term(Monomial::vertex(v), self.field.one());
        }
        for v in right {
            y.add_term(Monomial::vertex(v), self.field.one());
        }
        Ok((x, y))
    }

    /// Least vertex `j` with `e_j u != 0`.
    pub fn supporting_vertex(&self, u: &Element) -> Result<VertexId, AlgebraError> {
        let (x, _) = self.local_units(u)?;
        x.terms
            .keys()
            .map(|m| m.star.source())
            .find(|&j| !self.is_zero(&(&self.vertex(j) * u)))
            .ok_or(AlgebraError::ZeroElement)
    }

    pub fn gamma(&self, a: &ScalingVector, u: &Element) -> Element {
        u.gamma(a)
    }

    /// Reduced monomials `p^* q` with both paths of length at most `max_len`.
    pub fn reduced_monomials(&self, max_len: usize) -> Vec<Monomial> {
        let q = &*self.quiver;
        let mut out = Vec::new();
        for v in q.vertex_ids() {
            let into: Vec<FinitePath> = (0..=max_len)
                .flat_map(|l| crate::path::paths_ending_at(q, v, l))
                .collect();
            for p in &into {
                for r in &into {
                    let m = Monomial {
                        star: p.clone(),
                        path: r.clone(),
                    };
                    if !self.is_reducible(&m) {
                        out.push(m);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

/// One instance of the defining relations, both sides given as sums of
/// generator words. A word lists generators in application order, so
/// `[g1, g2]` stands for the product `g2 g1`. An empty side is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub family: u8,
    pub label: String,
    pub lhs: Vec<Vec<Generator>>,
    pub rhs: Vec<Vec<Generator>>,
}

/// Every instance of relations (0) to (4) for `q`.
pub fn relations(q: &Quiver) -> Vec<Relation> {
    use Generator::*;
    let e = |v: VertexId| format!("e_{}", q.vertex_name(v));
    let n = |a: ArrowId| q.arrow_name(a).to_string();
    let mut out = Vec::new();
    for i in q.vertex_ids() {
        for j in q.vertex_ids() {
            out.push(Relation {
                family: 0,
                label: format!(
                    "{} {} = {}",
                    e(i),
                    e(j),
                    if i == j { e(i) } else { "0".into() }
                ),
                lhs: vec![vec![Vertex(j), Vertex(i)]],
                rhs: if i == j {
                    vec![vec![Vertex(i)]]
                } else {
                    vec![]
                },
            });
        }
    }
    for a in q.arrow_ids() {
        let (s, t) = (q.source(a), q.target(a));
        out.push(Relation {
            family: 1,
            label: format!("{} {} = {}", e(t), n(a), n(a)),
            lhs: vec![vec![Arrow(a), Vertex(t)]],
            rhs: vec![vec![Arrow(a)]],
        });
        out.push(Relation {
            family: 1,
            label: format!("{} {} = {}", n(a), e(s), n(a)),
            lhs: vec![vec![Vertex(s), Arrow(a)]],
            rhs: vec![vec![Arrow(a)]],
        });
        out.push(Relation {
            family: 2,
            label: format!("{} {}^* = {}^*", e(s), n(a), n(a)),
            lhs: vec![vec![Ghost(a), Vertex(s)]],
            rhs: vec![vec![Ghost(a)]],
        });
        out.push(Relation {
            family: 2,
            label: format!("{}^* {} = {}^*", n(a), e(t), n(a)),
            lhs: vec![vec![Vertex(t), Ghost(a)]],
            rhs: vec![vec![Ghost(a)]],
        });
    }
    for a in q.arrow_ids() {
        for b in q.arrow_ids() {
            let rhs = if a == b {
                vec![vec![Vertex(q.target(a))]]
            } else {
                vec![]
            };
            out.push(Relation {
                family: 3,
                label: format!(
                    "{} {}^* = {}",
                    n(a),
                    n(b),
                    if a == b { e(q.target(a)) } else { "0".into() }
                ),
                lhs: vec![vec![Ghost(b), Arrow(a)]],
                rhs,
            });
        }
    }
    for i in q.regular_vertices() {
        let terms: Vec<String> = q
            .outgoing(i)
            .iter()
            .map(|&a| format!("{}^* {}", n(a), n(a)))
            .collect();
        out.push(Relation {
            family: 4,
            label: format!("{} = {}", terms.join(" + "), e(i)),
            lhs: q
                .outgoing(i)
                .iter()
                .map(|&a| vec![Arrow(a), Ghost(a)])
                .collect(),
            rhs: vec![vec![Vertex(i)]],
        });
    }
    out
}

/// Outcome of checking one relation family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub family: u8,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    /// Folds per-instance outcomes `(family, passed, label)` into one
    /// report per family 0..=4.
    pub fn collect(outcomes: impl IntoIterator<Item = (u8, bool, String)>) -> Vec<RelationReport> {
        let mut reports: Vec<RelationReport> = (0..=4)
            .map(|family| RelationReport {
                family,
                checks: 0,
                failures: Vec::new(),
            })
            .collect();
        for (family, ok, label) in outcomes {
            let r = &mut reports[family as usize];
            r.checks += 1;
            if !ok {
                r.failures.push(label);
            }
        }
        reports
    }
}

impl Lpa {
    /// The product `g_n ... g_1` of a word `[g_1, ..., g_n]`.
    pub fn word_element(&self, word: &[Generator]) -> Element {
        word.iter()
            .fold(None::<Element>, |acc, &g| {
                let x = self.generator(g);
                Some(match acc {
                    None => x,
                    Some(prev) => &x * &prev,
                })
            })
            .unwrap_or_else(|| self.zero())
    }

    pub fn relation_side(&self, side: &[Vec<Generator>]) -> Element {
        side.iter()
            .fold(self.zero(), |acc, w| &acc + &self.word_element(w))
    }

    /// Relations (0) to (4) as identities of reduced elements.
    pub fn check_relations(&self) -> Vec<RelationReport> {
        RelationReport::collect(relations(&self.quiver).into_iter().map(|r| {
            let diff = &self.relation_side(&r.lhs) - &self.relation_side(&r.rhs);
            (r.family, self.is_zero(&diff), r.label)
        }))
    }
}
