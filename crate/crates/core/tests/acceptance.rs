//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always visible; exits nonzero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lpa_core::algebra::{mono_mul, Element, Generator, Lpa, Monomial};
use lpa_core::batch::Exec;
use lpa_core::branching::{classify_bs, generated_subspace, CanonicalBS, Classification, MModule};
use lpa_core::path::{enumerate_class, EvInfPath, FinitePath, TailClass};
use lpa_core::quiver::{standard, Quiver, VertexId};
use lpa_core::random;
use lpa_core::repr::{
    act_rep, f_window, generation_certificate_f, generation_certificate_n, line_point_iso, n_window, relation_check,
    twist_iso, FModule, Module, NModule, RepVector, SparseVector, TwistIso,
};
use lpa_core::scalars::Field;
use lpa_core::structure::{faithfulness_witness, s_faithfulness_witness, wedderburn, StructureError};
use lpa_core::text::parse_bs;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn lpa(q: Quiver, field: Field) -> Lpa {
    Lpa::new(Arc::new(q), field)
}

fn path(q: &Quiver, display: &str) -> FinitePath {
    let arrows: Vec<_> = display.split('.').rev().map(|n| q.arrow(n).unwrap()).collect();
    let source = q.source(arrows[0]);
    FinitePath::from_arrows(q, source, arrows).unwrap()
}

fn c1_relations() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    for q in standard::all() {
        let l = lpa(q, Field::Rationals);
        let q = l.quiver_arc();
        let f = FModule::new(Arc::clone(&q), l.field());
        let n = NModule::new(Arc::clone(&q), l.field());
        let reports = [
            ("algebra", l.check_relations()),
            ("F", relation_check(&f, &f_window(&q, 6), Exec::default())),
            ("N", relation_check(&n, &n_window(&q, 6), Exec::default())),
        ];
        for (name, rs) in reports {
            ensure(rs.len() == 5, || format!("{name} on {}: missing families", q.name()))?;
            for r in rs {
                checks += r.checks;
                ensure(r.holds(), || {
                    format!("{} on {}, family {}: {:?}", name, q.name(), r.family, r.failures)
                })?;
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checks} instances on R1 R2 A2 A3 T in {:.2?}", start.elapsed()))
}

fn c2_rose_sanity() -> Outcome {
    let q = standard::rose(1);
    let x = q.arrow("x").unwrap();
    let class = TailClass::of(&q, &FinitePath::arrow(&q, x)).unwrap();
    let f = FModule::new(Arc::new(q.clone()), Field::Rationals);
    for bound in 0..=12 {
        let members = enumerate_class(&q, &class, bound);
        ensure(members.len() == 1, || format!("bound {bound}: {} members", members.len()))?;
        let v = SparseVector::basis(Field::Rationals, members[0].clone());
        ensure(f.act_generator(Generator::Arrow(x), &v) == v, || "x is not the identity".into())?;
        ensure(f.act_generator(Generator::Ghost(x), &v) == v, || "x^* is not the identity".into())?;
    }
    Ok("[x^inf] = {x^inf} for bounds 0..=12; x and x^* act as the identity".into())
}

/// `E_pq` acts on the sink module as the matrix unit sending `q` to `p`.
fn matrix_unit_oracle(l: &Lpa, m: &Monomial, basis: &[FinitePath]) -> Result<(), String> {
    let n = NModule::new(l.quiver_arc(), l.field());
    for r in basis {
        let got = n.act_monomial(m, &SparseVector::basis(l.field(), r.clone()));
        let want = if r == m.path() {
            SparseVector::basis(l.field(), m.star().clone())
        } else {
            SparseVector::zero(l.field())
        };
        ensure(got == want, || format!("E acts wrongly on {}", r.display(l.quiver())))?;
    }
    Ok(())
}

fn c3_wedderburn() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    for (q, n) in [(standard::line(2), 2), (standard::line(3), 3)] {
        let l = lpa(q, Field::Rationals);
        let w = wedderburn(&l).map_err(|e| e.to_string())?;
        ensure(w.blocks.len() == 1 && w.blocks[0].size() == n, || format!("{}: blocks {:?}", l.quiver().name(), w.blocks))?;
        ensure(w.dim == n * n && w.reduced_dim == n * n, || format!("dim {} reduced {}", w.dim, w.reduced_dim))?;
        ensure(w.table_checks == n.pow(4) && w.table_failures.is_empty(), || format!("{:?}", w.table_failures))?;
        ensure(w.unit_ok && w.rank == n * n, || "unit or rank".into())?;
        let basis = &w.blocks[0].paths;
        for p in basis {
            for r in basis {
                matrix_unit_oracle(&l, &Monomial::new(p.clone(), r.clone()).unwrap(), basis)?;
            }
        }
        out.push(format!("{} = M{n}(k), dim {}", l.quiver().name(), w.dim));
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("{}; {} products checked", out.join(", "), 16 + 81))
}

fn c4_certificates() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let r2 = lpa(standard::rose(2), Field::Rationals);
    let q = r2.quiver_arc();
    let class = TailClass::of(&q, &path(&q, "a.b")).unwrap();
    let f = FModule::new(Arc::clone(&q), Field::Rationals);
    for i in 0..100 {
        let u = random::class_vector(&mut rng, &q, Field::Rationals, &class, 4, 6);
        let target = random::class_member(&mut rng, &q, &class, 4);
        let c = generation_certificate_f(&r2, &u, &target).map_err(|e| format!("F #{i}: {e}"))?;
        ensure(!c.lambda.is_zero(), || format!("F #{i}: lambda = 0"))?;
        let got = f.act(&c.element, &u).map_err(|e| e.to_string())?;
        let want = SparseVector::from_terms(Field::Rationals, [(c.lambda.clone(), target.clone())]);
        ensure(got == want, || format!("F #{i}: a.u != lambda target"))?;
    }
    let t = lpa(standard::toeplitz(), Field::Rationals);
    let q = t.quiver_arc();
    let sink = q.vertex("2").unwrap();
    let n = NModule::new(Arc::clone(&q), Field::Rationals);
    for i in 0..100 {
        let u = random::sink_vector(&mut rng, &q, Field::Rationals, sink, 6, 6);
        let basis = lpa_core::path::enumerate_sink_paths(&q, sink, 6).unwrap();
        let target = basis[rand::Rng::gen_range(&mut rng, 0..basis.len())].clone();
        let c = generation_certificate_n(&t, &u, &target).map_err(|e| format!("N #{i}: {e}"))?;
        ensure(!c.lambda.is_zero(), || format!("N #{i}: lambda = 0"))?;
        let got = n.act(&c.element, &u).map_err(|e| e.to_string())?;
        let want = SparseVector::from_terms(Field::Rationals, [(c.lambda.clone(), target.clone())]);
        ensure(got == want, || format!("N #{i}: a.u != lambda target"))?;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("100/100 in F_[(a.b)^inf] over R2, 100/100 in N_2 over T, {:.2?}", start.elapsed()))
}

fn c5_twists() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = lpa(standard::rose(2), Field::Rationals);
    let q = l.quiver_arc();
    let a_arrow = q.arrow("a").unwrap();
    let class = TailClass::of(&q, &FinitePath::arrow(&q, a_arrow)).unwrap();
    let field = Field::Rationals;
    let pool = [field.from_i64(1), field.from_i64(2), field.from_i64(-1), field.from_ratio(1, 2).unwrap()];
    let (mut isos, mut dists) = (0, 0);
    for i in 0..50 {
        let a = random::scaling(&mut rng, &q, &pool);
        let b = random::scaling(&mut rng, &q, &pool);
        let stable = a.get(a_arrow) == b.get(a_arrow);
        match twist_iso(&l, &a, &b, &class, 5, Exec::default()).map_err(|e| e.to_string())? {
            TwistIso::Iso { check, .. } => {
                ensure(stable, || format!("pair {i}: Iso for an unstable quotient"))?;
                ensure(check.holds() && check.checks > 0, || format!("pair {i}: {:?}", check.failures))?;
                isos += 1;
            }
            TwistIso::Distinguisher { a_q, b_q } => {
                ensure(!stable, || format!("pair {i}: Distinguisher for a stable quotient"))?;
                ensure(a_q != b_q && a_q == *a.get(a_arrow) && b_q == *b.get(a_arrow), || {
                    format!("pair {i}: a_q = {a_q}, b_q = {b_q}")
                })?;
                dists += 1;
            }
        }
    }
    ensure(isos > 0 && dists > 0, || "sample did not exercise both outcomes".into())?;
    Ok(format!("{isos} Iso (hom_check on window 5), {dists} Distinguisher"))
}

fn c6_branching() -> Outcome {
    let start = Instant::now();
    let field = Field::Rationals;
    let a2 = Arc::new(standard::line(2));
    let sink = a2.vertex("2").unwrap();
    let n2 = CanonicalBS::Sink(sink)
        .materialize(Arc::clone(&a2))
        .map_err(|e| e.to_string())?
        .ok_or("N_2 is finite")?;
    match classify_bs(&n2, field).map_err(|e| e.to_string())?.classification {
        Classification::Irreducible { target } => {
            ensure(target == CanonicalBS::Sink(sink), || format!("target {}", target.display(&a2)))?
        }
        other => return Err(format!("A2 N_2 system: {other:?}")),
    }

    let r1 = Arc::new(standard::rose(1));
    let swap = parse_bs("bs { points: x y; v: x y; x: [x y]; sigma x: x->y y->x; }", Arc::clone(&r1))
        .map_err(|e| e.to_string())?;
    let two = n2.disjoint_union(&n2);
    let mut dims = Vec::new();
    for (name, x) in [("swap", &swap), ("N_2 + N_2", &two)] {
        let Classification::Reducible { witness, subspace_dim, .. } =
            classify_bs(x, field).map_err(|e| e.to_string())?.classification
        else {
            return Err(format!("{name}: not reducible"));
        };
        // Independent check: the span of the witness orbit is invariant and proper.
        let m = MModule::new(x, field);
        let span = generated_subspace(&m, &witness);
        let gens = Generator::all(x.quiver());
        let invariant = span.rows().all(|r| gens.iter().all(|&g| span.contains(&m.act_generator(g, r))));
        ensure(invariant, || format!("{name}: witness span is not invariant"))?;
        ensure(span.dim() == subspace_dim && 0 < span.dim() && span.dim() < x.len(), || {
            format!("{name}: subspace of dimension {} in {}", span.dim(), x.len())
        })?;
        dims.push(format!("{name} reducible ({}/{})", span.dim(), x.len()));
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("A2 N_2 irreducible onto [e_2]; {}", dims.join(", ")))
}

fn c7_faithfulness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = lpa(standard::toeplitz(), Field::Rationals);
    for i in 0..100 {
        let u = random::reduced_element(&mut rng, &t, 8, 4);
        ensure(!t.is_zero(&u) && u.len() <= 8, || format!("#{i}: bad sample"))?;
        let w = faithfulness_witness(&t, &u).map_err(|e| format!("#{i} {}: {e}", u.display(t.quiver())))?;
        let again = act_rep(&t, None, &u, &w.probe).map_err(|e| e.to_string())?;
        ensure(!again.is_zero() && again == w.result, || format!("#{i}: witness does not verify"))?;
    }
    let r1 = lpa(standard::rose(1), Field::Rationals);
    let u = &r1.vertex(VertexId(0)) - &r1.iota(&path(r1.quiver(), "x"));
    match faithfulness_witness(&r1, &u) {
        Err(StructureError::HypothesisFailed { vertex }) if vertex == "v" => {}
        other => return Err(format!("R1: {other:?}")),
    }
    Ok("100/100 nonzero witnesses on T; R1 reports HypothesisFailed at v".into())
}

fn c8_twisted_faithfulness() -> Outcome {
    let q = standard::rose(1);
    let u_of = |l: &Lpa| &l.vertex(VertexId(0)) - &l.iota(&path(l.quiver(), "x"));
    let rat = lpa(q.clone(), Field::Rationals);
    let u = u_of(&rat);
    let w = s_faithfulness_witness(&rat, &u).map_err(|e| e.to_string())?;
    let (lambda, _) = w.twist.clone().ok_or("no twist")?;
    ensure(lambda == rat.scalar(2), || format!("lambda = {lambda}"))?;
    // (e - x) on x^inf in the 2-twist: x^inf - 2 x^inf = -x^inf.
    let xinf = EvInfPath::cyclic(&q, path(&q, "x")).unwrap();
    let want = RepVector::InF(SparseVector::from_terms(Field::Rationals, [(rat.scalar(-1), xinf.clone())]));
    let got = match &w.result {
        RepVector::DirectSum(v) => RepVector::InF(SparseVector::from_terms(
            Field::Rationals,
            v.terms().map(|(k, c)| match k {
                lpa_core::repr::FNKey::F(p) => (c.clone(), p.clone()),
                lpa_core::repr::FNKey::N(_) => panic!("no sinks in R1"),
            }),
        )),
        other => other.clone(),
    };
    ensure(got == want, || format!("result {}", w.result.display(&q)))?;

    let gf2 = lpa(q.clone(), Field::prime(2).unwrap());
    let u = u_of(&gf2);
    ensure(!gf2.reduce(&u).is_empty(), || "e - x reduced to 0 over GF(2)".into())?;
    let f = FModule::new(gf2.quiver_arc(), gf2.field());
    let killed = f.act(&u, &SparseVector::basis(gf2.field(), xinf)).map_err(|e| e.to_string())?;
    ensure(killed.is_empty(), || "the only twist should kill x^inf".into())?;
    match s_faithfulness_witness(&gf2, &u) {
        Err(StructureError::NoWitnessInFiniteField(f)) if f == Field::prime(2).unwrap() => {}
        other => return Err(format!("GF(2): {other:?}")),
    }
    Ok("Q: lambda = 2, (e - x).x^inf = -x^inf; GF(2): e - x != 0, NoWitnessInFiniteField".into())
}

fn c9_mono_mul_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut total = 0;
    for q in standard::all() {
        let l = lpa(q, Field::Rationals);
        let q = l.quiver_arc();
        let f = FModule::new(Arc::clone(&q), l.field());
        let n = NModule::new(Arc::clone(&q), l.field());
        let fw = f_window(&q, 3);
        let nw = n_window(&q, 4);
        for _ in 0..500 {
            let m1 = random::monomial(&mut rng, &q, 3);
            let m2 = random::monomial(&mut rng, &q, 3);
            let prod = mono_mul(&m1, &m2);
            let prod_el = prod.clone().map_or_else(|| l.zero(), |m| l.monomial(m));
            for w in &fw {
                let v = SparseVector::basis(l.field(), w.clone());
                let lhs = f.act_monomial(&m1, &f.act_monomial(&m2, &v));
                let rhs = f.act(&prod_el, &v).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || mismatch(&q, &m1, &m2, &w.display(&q).to_string()))?;
                total += 1;
            }
            for w in &nw {
                let v = SparseVector::basis(l.field(), w.clone());
                let lhs = n.act_monomial(&m1, &n.act_monomial(&m2, &v));
                let rhs = n.act(&prod_el, &v).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || mismatch(&q, &m1, &m2, &w.display(&q).to_string()))?;
                total += 1;
            }
        }
    }
    Ok(format!("500 pairs per quiver, {total} probe evaluations agree"))
}

fn mismatch(q: &Quiver, a: &Monomial, b: &Monomial, w: &str) -> String {
    format!("{} * {} on {w}", a.display(q), b.display(q))
}

fn c10_line_point() -> Outcome {
    let l = lpa(standard::line(3), Field::Rationals);
    let q = l.quiver_arc();
    let i = q.vertex("1").unwrap();
    let iso = line_point_iso(&l, i, 6, Exec::default()).map_err(|e| e.to_string())?;
    ensure(iso.full_basis && iso.images.len() == 3, || "basis of N_3 is not complete".into())?;
    ensure(iso.check.holds() && iso.check.checks > 0, || format!("{:?}", iso.check.failures))?;
    let qp = path(&q, "b.a");
    ensure(iso.path == qp, || format!("path {}", iso.path.display(&q)))?;
    let (qe, qs) = (l.iota(&qp), l.ghost_path(&qp));
    let e3 = l.vertex(q.vertex("3").unwrap());
    let e1 = l.vertex(i);
    ensure(l.reduce(&(&qe * &qs)) == e3, || "q q^* != e_3".into())?;
    ensure(l.reduce(&(&qs * &qe)) == e1, || "q^* q != e_1".into())?;
    // The images p^* q are distinct reduced monomials, hence independent.
    let images: Vec<&Element> = iso.images.iter().map(|(_, x)| x).collect();
    ensure(images.iter().all(|x| x.len() == 1), || "images are not monomials".into())?;
    Ok(format!("hom_check {} instances on all of N_3; q q^* = e_3, q^* q = e_1", iso.check.checks))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("relation suite", c1_relations),
        ("R1 sanity", c2_rose_sanity),
        ("Wedderburn", c3_wedderburn),
        ("irreducibility certificates", c4_certificates),
        ("twist classification", c5_twists),
        ("branching classification", c6_branching),
        ("faithfulness", c7_faithfulness),
        ("twisted faithfulness", c8_twisted_faithfulness),
        ("mono_mul oracle", c9_mono_mul_oracle),
        ("minimal ideal isomorphism", c10_line_point),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
