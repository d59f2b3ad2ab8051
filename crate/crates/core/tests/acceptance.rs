//! Acceptance suite: one PASS/FAIL line per criterion on stdout.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use dml_core::arith::rational::{format_rational, int, rat, Rational};
use dml_core::bounds::{
    count_gap_intervals, standard_deltas, theorem_lhs, verify_prop21_derivation_with_ceiling,
    verify_theorem_arithmetic,
};
use dml_core::heights::{height_point, height_vector, FormTriple, ProjectivePoint};
use dml_core::index::{index, MultihomogPolynomial};
use dml_core::places::{check_product_formula, Place};
use dml_core::recurrence::{
    multiplicity_count, solve_unit_equation, ternary_zero_count, BinaryRecurrence, TernaryRecurrence,
    UnitEquationProblem,
};
use dml_core::roth::{
    check_roth_instance, feasible_family_forms, feasible_family_theta, RothInstance, Verdict,
    FEASIBLE_FAMILY_MULTIDEGREE,
};
use dml_core::subspace::{
    check_exponent_system, prop21_line_bound, satisfies_system, scan_box, ExponentEntry, ExponentSystem,
    SubspaceQuery,
};
use dml_core::{Comparison, Error, Field, FieldElement};
use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{height_sq_oracle, oracle_index, points, random_case, random_complement, to_library, Poly};

const BITS: u32 = 128;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(n: u32, name: &str, limit: Option<u64>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = limit.is_none_or(|s| took <= Duration::from_secs(s));
    let pass = o.pass && in_time;
    let budget = limit.map_or(String::new(), |s| format!(", limit {s} s"));
    let late = if in_time { "" } else { "; runtime limit exceeded" };
    println!(
        "criterion {n} [{name}]: {} ({}{late}) [{:.2} s{budget}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    pass
}

fn q(n: i64, d: i64) -> FieldElement {
    FieldElement::rational(rat(n, d))
}

fn heights() -> Outcome {
    let h = height_point(&ProjectivePoint::from_ints(&[3, 4]).unwrap(), BITS).unwrap();
    if h.exact() != Some(&int(5)) {
        return outcome(false, format!("H((3,4)) = {h}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let tol20 = rat(1, 10).pow(20u32);
    let fields = [Field::Rationals, Field::Quadratic(2), Field::Quadratic(-1)];
    for i in 0..50 {
        let coords: Vec<FieldElement> = loop {
            let c: Vec<FieldElement> = (0..rng.gen_range(2..=4))
                .map(|_| q(rng.gen_range(-99..=99), rng.gen_range(1..=40)))
                .collect();
            if c.iter().any(|x| !x.is_zero()) {
                break c;
            }
        };
        let oracle = height_sq_oracle(&coords.iter().map(|c| c.a().clone()).collect::<Vec<_>>());
        let encl: Vec<_> = fields
            .iter()
            .map(|&f| height_vector(&coords.iter().map(|c| c.in_field(f).unwrap()).collect::<Vec<_>>(), 80).unwrap())
            .collect();
        let ok = encl.iter().all(|e| e.width() <= tol20 && (e * e).contains(&oracle))
            && encl.iter().all(|a| encl.iter().all(|b| a.overlaps(b)));
        if !ok {
            return outcome(false, format!("extension invariance broken at point {i}"));
        }
    }
    for i in 0..1000 {
        let n = loop {
            let n: i64 = rng.gen_range(-1_000_000..=1_000_000);
            if n != 0 {
                break n;
            }
        };
        let r = check_product_formula(&q(n, rng.gen_range(1..=1_000_000)), BITS).unwrap();
        if !(r.exact && r.product.exact() == Some(&Rational::one())) {
            return outcome(false, format!("rational product formula not exact at sample {i}"));
        }
    }
    let tol15 = rat(1, 10).pow(15u32);
    let ds = [-1i64, -2, -3, -7, -11, 2, 3, 5, 6, 7, 11, 17];
    for i in 0..200 {
        let field = Field::quadratic(ds[i % ds.len()]).unwrap();
        let x = loop {
            let x = FieldElement::new(
                rat(rng.gen_range(-99..=99), rng.gen_range(1..=30)),
                rat(rng.gen_range(-99..=99), rng.gen_range(1..=30)),
                field,
            )
            .unwrap();
            if !x.is_zero() {
                break x;
            }
        };
        let r = check_product_formula(&x, BITS).unwrap();
        if !(r.holds && r.product.width() <= tol15) {
            return outcome(false, format!("quadratic product formula failed for {x}: {}", r.product));
        }
    }
    outcome(true, "H((3,4)) = 5; 50 points invariant across Q, Q(sqrt2), Q(sqrt-1); 1000 exact + 200 certified product formulas")
}

fn index_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut positive = 0;
    for i in 0..500 {
        let c = random_case(&mut rng);
        let ws: Vec<[Rational; 2]> =
            c.pts.iter().map(|&p| random_complement(&mut rng, p)).map(|w| [int(w[0]), int(w[1])]).collect();
        let pr: Vec<[Rational; 2]> = c.pts.iter().map(|p| [int(p[0]), int(p[1])]).collect();
        let expected = oracle_index(&c.poly, &c.r, &pr, &ws);
        let got = index(&to_library(&c.poly, &c.r), &points(&c.pts)).unwrap().value;
        if got != expected {
            return outcome(false, format!("case {i}: basis rewrite {got} vs oracle {expected}"));
        }
        if !expected.is_zero() {
            positive += 1;
        }
    }
    outcome(true, format!("500/500 exact agreements ({positive} with positive index)"))
}

fn roth() -> Outcome {
    let forms = feasible_family_forms();
    let theta = feasible_family_theta();
    let pts: Vec<[Rational; 2]> = forms.iter().map(|l| [-l.c2().a().clone(), int(1)]).collect();
    let ws = vec![[int(0), int(1)], [int(0), int(1)]];
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut max_index = Rational::zero();
    for i in 0..100 {
        let poly: Poly = loop {
            let mut p = Poly::new();
            for a in 0..=FEASIBLE_FAMILY_MULTIDEGREE[0] {
                for b in 0..=FEASIBLE_FAMILY_MULTIDEGREE[1] {
                    let c = rng.gen_range(-9..=9);
                    if c != 0 {
                        p.insert(vec![a, b], int(c));
                    }
                }
            }
            if !p.is_empty() {
                break p;
            }
        };
        let lib: MultihomogPolynomial = to_library(&poly, &FEASIBLE_FAMILY_MULTIDEGREE);
        let rep = check_roth_instance(&RothInstance::new(theta.clone(), lib, forms.clone()).unwrap(), BITS).unwrap();
        if rep.hypotheses != Verdict::Holds || !rep.ratio_ok.iter().all(|&b| b) {
            return outcome(false, format!("P #{i}: hypotheses {:?}", rep.hypotheses));
        }
        if !rep.conclusion_holds || rep.conclusion_index.value != oracle_index(&poly, &FEASIBLE_FAMILY_MULTIDEGREE, &pts, &ws) {
            return outcome(false, format!("P #{i}: index {}", rep.conclusion_index));
        }
        max_index = max_index.max(rep.conclusion_index.value.clone());
    }
    outcome(
        true,
        format!("hypotheses certified for 100 P; index < 19/10 in all cases (max {})", format_rational(&max_index)),
    )
}

fn constants() -> Outcome {
    let mut failures = Vec::new();
    let mut overlaps = Vec::new();
    let mut max_bits = 0;
    let reports: Vec<_> = standard_deltas()
        .into_iter()
        .map(|d| (d.clone(), verify_prop21_derivation_with_ceiling(&d, BITS, 256).unwrap()))
        .collect();
    for (d, rep) in &reports {
        max_bits = max_bits.max(rep.max_bits());
        for tag in ["(a)", "(b)", "(c)"] {
            let c = rep.check(tag).expect("check present");
            if c.comparison == Comparison::Overlap || c.verdict == Verdict::Indeterminate {
                overlaps.push(format!("delta={} {tag}", format_rational(d)));
            } else if c.verdict != Verdict::Holds {
                failures.push(format!(
                    "delta={} {tag} {:.4e} vs {:.4e}",
                    format_rational(d),
                    c.lhs.to_f64_bounds().0,
                    c.rhs.to_f64_bounds().1
                ));
            }
        }
    }
    let lhs = theorem_lhs(BITS).unwrap();
    let inside = lhs.lo() > &int(32_000_000_000_000_000i64) && lhs.hi() < &int(33_000_000_000_000_000i64);
    let thm = verify_theorem_arithmetic(BITS).unwrap();
    let d_ok = inside && thm.all_hold && !thm.indeterminate;
    let pass = failures.is_empty() && overlaps.is_empty() && d_ok && max_bits <= 256;
    let mut detail = format!("(d) {} with left side in (3.2e16, 3.3e16): {inside}", if thm.all_hold { "holds" } else { "fails" });
    detail += &format!("; max precision {max_bits} bits");
    if !overlaps.is_empty() {
        detail += &format!("; OVERLAP at {}", overlaps.join(", "));
    }
    if failures.is_empty() {
        detail = format!("(a)-(c) certified for all five deltas; {detail}");
    } else {
        detail = format!("certified false: {}; {detail}", failures.join("; "));
    }
    outcome(pass, detail)
}

fn minimal_cover(values: &[u64], p: u32, qd: u32) -> usize {
    let n = values.len();
    let within = |v: u64, w: u64| Pow::pow(BigInt::from(v), qd) <= Pow::pow(BigInt::from(w), p);
    (0u32..(1 << n))
        .filter(|mask| values.iter().all(|&v| (0..n).any(|i| mask & (1 << i) != 0 && values[i] <= v && within(v, values[i]))))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

fn gaps() -> Outcome {
    let worked = [
        (count_gap_intervals(&[], &int(3)).unwrap(), 0),
        (count_gap_intervals(&[int(10), int(100), int(100000)], &int(3)).unwrap(), 2),
        (count_gap_intervals(&[int(10)], &int(2)).unwrap(), 1),
    ];
    if worked.iter().any(|(a, b)| a != b) {
        return outcome(false, format!("worked examples gave {:?}", worked.map(|w| w.0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let exps = [(3u32, 2u32), (2, 1), (5, 2), (3, 1), (7, 4)];
    for i in 0..200 {
        let n = rng.gen_range(0..=12);
        let mut values: Vec<u64> = (0..n)
            .map(|_| {
                let top = 1u64 << rng.gen_range(1..=28);
                rng.gen_range(2..=top)
            })
            .collect();
        values.sort();
        let (p, d) = *exps.choose(&mut rng).unwrap();
        let got = count_gap_intervals(&values.iter().map(|&v| int(v as i64)).collect::<Vec<_>>(), &rat(p as i64, d as i64)).unwrap();
        let want = minimal_cover(&values, p, d);
        if got != want {
            return outcome(false, format!("instance {i}: greedy {got} vs minimal {want}"));
        }
    }
    outcome(true, "3 worked examples and 200/200 random instances match minimal covering")
}

fn recurrences() -> Outcome {
    let mut lines = Vec::new();
    let p1 = UnitEquationProblem::new(q(1, 1), q(-1, 1), q(2, 1), q(3, 1)).unwrap();
    let r1 = solve_unit_equation(&p1, 100, BITS).unwrap();
    let p2 = UnitEquationProblem::new(q(-1, 2), q(-1, 2), q(2, 1), q(1, 2)).unwrap();
    let r2 = solve_unit_equation(&p2, 100, BITS).unwrap();
    let e3 = UnitEquationProblem::new(q(1, 1), q(1, 1), q(-1, 1), q(-1, 1));
    let fib = BinaryRecurrence::from_ints(1, 1, 0, 1).unwrap();
    let f0 = multiplicity_count(&fib, &q(0, 1), -30, 30).unwrap();
    let f1 = multiplicity_count(&fib, &q(1, 1), -10, 10).unwrap();
    let t = TernaryRecurrence::from_ints([2, 1, -2], [0, -1, 3]).unwrap();
    let t0 = ternary_zero_count(&t, 0, 50).unwrap();
    let checks = [
        ("unit (1,-1,2,3)", r1.solutions == vec![1] && r1.certificate.is_some()),
        ("unit (-1/2,-1/2,2,1/2)", r2.solutions == vec![0]),
        ("unit alpha=beta=-1 rejected", matches!(e3, Err(Error::Hypothesis(_)))),
        ("fib c=0", f0.solutions == vec![0] && f0.count == 1),
        ("fib c=1", f1.solutions == vec![-1, 1, 2] && f1.count == 3),
        ("ternary", t0.solutions == vec![0] && t0.count == 1),
    ];
    let bound_lines = [&r1.bound_line, &r2.bound_line, &f0.bound_line, &f1.bound_line, &t0.bound_line]
        .iter()
        .all(|l| l.contains("2^57"));
    let within = r1.count_within_bound && r2.count_within_bound && f0.count_within_bound && f1.count_within_bound && t0.count_within_bound;
    for (name, ok) in checks {
        if !ok {
            lines.push(name);
        }
    }
    if !bound_lines || !within {
        lines.push("bound line / count <= 2^57");
    }
    if lines.is_empty() {
        outcome(true, "6 examples reproduced, certificate emitted for (1,-1,2,3), all reports carry the 2^57 bound line")
    } else {
        outcome(false, format!("mismatch: {}", lines.join(", ")))
    }
}

fn subspace() -> Outcome {
    let inf = Place::infinite(Field::Rationals)[0].clone();
    let sys = |e1: Rational, e2: Rational| {
        ExponentSystem::new(
            Field::Rationals,
            vec![ExponentEntry { place: inf.clone(), forms: [FormTriple::L1, FormTriple::L2], e: [e1, e2] }],
        )
        .unwrap()
    };
    let query = SubspaceQuery::new(sys(rat(1, 2), rat(-1, 2)), int(100), rat(1, 10)).unwrap();
    let flipped = SubspaceQuery::new(sys(rat(-1, 2), rat(1, 2)), int(100), rat(1, 10)).unwrap();
    let x = |a, b| [FieldElement::from_int(a), FieldElement::from_int(b)];
    let verdicts = [
        satisfies_system(&x(1, 0), &query, BITS).unwrap(),
        satisfies_system(&x(0, 1), &query, BITS).unwrap(),
        satisfies_system(&x(1, 0), &flipped, BITS).unwrap(),
    ];
    if verdicts != [true, false, false] {
        return outcome(false, format!("worked verdicts {verdicts:?}"));
    }
    let scan = scan_box(&query, 1000, BITS).unwrap();
    let bound = prop21_line_bound(&rat(1, 10), BITS).unwrap();
    if Rational::from_integer(scan.line_count.into()) > *bound.hi() {
        return outcome(false, format!("{} lines exceed bound", scan.line_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let primes = [2u64, 3, 5, 7, 11, 13, 17];
    for i in 0..200 {
        let mut places = vec![inf.clone()];
        let k = rng.gen_range(0..=7);
        let mut ps = primes.to_vec();
        ps.shuffle(&mut rng);
        places.extend(ps[..k].iter().map(|&p| Place::finite(Field::Rationals, p, 0).unwrap()));
        let mut es: Vec<[Rational; 2]> = places
            .iter()
            .map(|_| [rat(rng.gen_range(-4..=4), rng.gen_range(1..=8)), rat(rng.gen_range(-4..=4), rng.gen_range(1..=8))])
            .collect();
        if rng.gen_bool(0.7) {
            let total: Rational = es.iter().map(|e| &e[0] + &e[1]).sum();
            let last = es.last_mut().unwrap();
            last[1] = &last[1] - total;
        }
        // exhaustive: each place contributes nothing, e1 or e2
        let total: Rational = es.iter().map(|e| &e[0] + &e[1]).sum();
        let mut oracle = total.is_zero();
        for code in 0..3u32.pow(es.len() as u32) {
            let (mut c, mut s) = (code, Rational::zero());
            for e in &es {
                if c % 3 > 0 {
                    s += &e[(c % 3 - 1) as usize];
                }
                c /= 3;
            }
            if s.abs() > Rational::one() {
                oracle = false;
            }
        }
        let entries = places
            .into_iter()
            .zip(es)
            .map(|(place, e)| ExponentEntry { place, forms: [FormTriple::L1, FormTriple::L3], e })
            .collect();
        let got = check_exponent_system(&ExponentSystem::new(Field::Rationals, entries).unwrap()).holds;
        if got != oracle {
            return outcome(false, format!("exponent system {i}: {got} vs oracle {oracle}"));
        }
    }
    outcome(
        true,
        format!(
            "verdicts (true, false, false); scan of {} coprime points gave {} solutions on {} lines <= {:.3e}; 200/200 exponent systems agree",
            scan.candidates,
            scan.solutions,
            scan.line_count,
            bound.to_f64_bounds().1
        ),
    )
}

#[test]
fn acceptance() {
    let results = [
        run(1, "height suite", Some(30), heights),
        run(2, "index oracle equivalence", Some(60), index_oracle),
        run(3, "roth end-to-end", Some(120), roth),
        run(4, "constant verification", Some(60), constants),
        run(5, "gap-interval counting", None, gaps),
        run(6, "recurrence suite", Some(30), recurrences),
        run(7, "subspace experiment", None, subspace),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria PASS", results.len());
    assert_eq!(passed, results.len(), "acceptance criteria failed");
}
