//! Acceptance suite: one line per criterion, non-zero exit when any fails.
//! Every check compares library output against an independent brute-force
//! computation written here, or against stored text.

use std::collections::{BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use defifix::compile::{compile_singleton, find_rootless, formula_to_neighbourhood, homogenize, neighbourhood_to_formula};
use defifix::curve::{build_t, compute_p, formula_8, verify_theorem5, CurveData, TMode, DEFAULT_T_CAP};
use defifix::field::{FieldDescriptor, FieldElement};
use defifix::formula::{definable_set, parse, parse_term, Formula, NameSupply, Term};
use defifix::neighbourhood::{
    certify_by_propagation, enumerate_arithmetic_maps, fixed_subfield, is_neighbourhood, nbhd_rational, Certificate,
    Neighbourhood, DEFAULT_MAP_CAP,
};
use defifix::normalize::{atomize, eliminate_negations, normalize, prenex, to_dnf, DEFAULT_DNF_CAP};
use defifix::random::{FormulaGenerator, RandomShape};
use defifix::schemas::{emit, SchemaParams, SCHEMA_NAMES};
use defifix::solver::Atom;

fn k(spec: &str) -> FieldDescriptor {
    FieldDescriptor::parse(spec).unwrap()
}

fn within(start: Instant, limit: u64) {
    let spent = start.elapsed();
    assert!(spent < Duration::from_secs(limit), "took {spent:.1?}, limit {limit}s");
}

// 1 --------------------------------------------------------------------------

fn normalization_soundness() {
    let start = Instant::now();
    let shape = RandomShape { max_vars: 3, max_degree: 3, max_negations: 2, ..Default::default() };
    let fields = [k("F2"), k("F3"), k("F5")];
    let mut generator = FormulaGenerator::new(2024, shape);
    for i in 0..200 {
        let f = generator.next_formula();
        assert!(f.all_vars().len() <= 3);
        let nf = normalize(&f).unwrap();
        for field in &fields {
            let before = definable_set(&f, field, "x").unwrap();
            assert_eq!(nf.definable_set(field).unwrap(), before, "formula {i} `{f}` over {}", field.spec());
        }
    }
    within(start, 60);
}

// 2 --------------------------------------------------------------------------

/// Atoms over names: `+`, `*` carry three names, `1` carries one.
type NamedAtom = (char, Vec<String>);

fn named(atoms: &[Atom], vars: &[String]) -> Vec<NamedAtom> {
    atoms
        .iter()
        .map(|a| match *a {
            Atom::Plus(i, j, l) => ('+', vec![vars[i].clone(), vars[j].clone(), vars[l].clone()]),
            Atom::Times(i, j, l) => ('*', vec![vars[i].clone(), vars[j].clone(), vars[l].clone()]),
            Atom::One(i) => ('1', vec![vars[i].clone()]),
        })
        .collect()
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

/// Same atoms after some bijection of the auxiliary names, reading `+` and `*`
/// as commutative in their first two slots.
fn equal_up_to_renaming(got: &[NamedAtom], want: &[NamedAtom], fixed: &[&str]) -> bool {
    let aux = |atoms: &[NamedAtom]| -> Vec<String> {
        let mut seen = Vec::new();
        for (_, names) in atoms {
            for n in names {
                if !fixed.contains(&n.as_str()) && !seen.contains(n) {
                    seen.push(n.clone());
                }
            }
        }
        seen
    };
    let (got_aux, want_aux) = (aux(got), aux(want));
    if got.len() != want.len() || got_aux.len() != want_aux.len() {
        return false;
    }
    let canon = |(op, names): &NamedAtom| -> (char, Vec<String>) {
        let mut n = names.clone();
        if n.len() == 3 && n[0] > n[1] {
            n.swap(0, 1);
        }
        (*op, n)
    };
    let target: BTreeSet<_> = want.iter().map(canon).collect();
    permutations(&want_aux).into_iter().any(|perm| {
        let map: HashMap<&String, &String> = got_aux.iter().zip(perm.iter()).collect();
        let renamed: BTreeSet<_> = got
            .iter()
            .map(|(op, names)| canon(&(*op, names.iter().map(|n| map.get(n).map_or(n.clone(), |m| (*m).clone())).collect())))
            .collect();
        renamed == target
    })
}

fn atomize_fidelity() {
    let eq = (parse_term("1 + x + y^2").unwrap(), Term::zero());
    let mut names = NameSupply::new(["x".to_string(), "y".to_string()]);
    let system = atomize(&[eq], &[], &mut names).unwrap();
    let got = named(&system.atoms, &system.vars);
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let reference: Vec<NamedAtom> = vec![
        ('1', s(&["t"])),
        ('+', s(&["t", "x", "u"])),
        ('*', s(&["y", "y", "z"])),
        ('+', s(&["u", "z", "s"])),
        ('+', s(&["s", "s", "s"])),
    ];
    assert_eq!(got.len(), 5, "{got:?}");
    assert!(equal_up_to_renaming(&got, &reference, &["x", "y"]), "{got:?}");
    // the matcher itself must reject a near miss
    let mut wrong = reference.clone();
    wrong[4] = ('+', s(&["u", "u", "u"]));
    assert!(!equal_up_to_renaming(&got, &wrong, &["x", "y"]));

    // one fresh variable per negated literal, on every disjunct of random formulas
    let mut generator = FormulaGenerator::new(77, RandomShape::default());
    let mut seen_negations = 0;
    for _ in 0..200 {
        let f = generator.next_formula();
        let (_, matrix) = prenex(&f).unwrap();
        for conj in to_dnf(&matrix, DEFAULT_DNF_CAP).unwrap() {
            let negations = conj.iter().filter(|l| l.negated).count();
            let mut names = NameSupply::new(f.all_vars());
            let (eqs, fresh) = eliminate_negations(&conj, &mut names).unwrap();
            assert_eq!(fresh.len(), negations, "`{f}`");
            assert_eq!(eqs.len(), conj.len());
            seen_negations += negations;
        }
    }
    assert!(seen_negations > 0);
}

// 3 --------------------------------------------------------------------------

fn prime_field_fixed() {
    for (spec, p) in [("F2^2", 2), ("F2^3", 2), ("F3^2", 3), ("F5", 5)] {
        let start = Instant::now();
        let field = k(spec);
        let fixed = fixed_subfield(&field, DEFAULT_MAP_CAP).unwrap();
        let prime: Vec<FieldElement> = (0..p).map(|i| field.from_i64(i)).collect();
        assert_eq!(fixed, prime, "{spec}");
        let frobenius_fixed: Vec<FieldElement> = field
            .elements()
            .unwrap()
            .into_iter()
            .filter(|e| field.pow(e, p as u32).unwrap() == *e)
            .collect();
        assert_eq!(fixed, frobenius_fixed, "{spec}");
        within(start, 10);
    }
}

// 4 --------------------------------------------------------------------------

fn round_trip() {
    let start = Instant::now();
    for spec in ["F5", "F7"] {
        let field = k(spec);
        for r in field.elements().unwrap() {
            let q = match field.as_finite().unwrap().index(&r) {
                Some(i) => BigRational::from_integer(BigInt::from(i)),
                None => unreachable!(),
            };
            let a = nbhd_rational(&q, &field).unwrap();
            assert_eq!(a.target(), &r);
            let phi = neighbourhood_to_formula(&a).unwrap();
            assert_eq!(definable_set(&phi, &field, "x").unwrap(), vec![r.clone()], "{spec} r={r}: `{phi}`");
            let back = formula_to_neighbourhood(&phi, &field).unwrap();
            assert_eq!(back.neighbourhood.target(), &r);
            assert!(is_neighbourhood(&back.neighbourhood).unwrap().is_yes(), "{spec} r={r}");
        }
    }
    within(start, 30);
}

// 5 --------------------------------------------------------------------------

/// `sum c_i u^i v^(n-i)` with field operations only.
fn eval_form(coeffs: &[BigInt], u: &FieldElement, v: &FieldElement, field: &FieldDescriptor) -> FieldElement {
    let n = coeffs.len() as u32 - 1;
    let mut acc = field.zero();
    for (i, c) in coeffs.iter().enumerate() {
        let term = field
            .mul(&field.from_bigint(c), &field.mul(&field.pow(u, i as u32).unwrap(), &field.pow(v, n - i as u32).unwrap()).unwrap())
            .unwrap();
        acc = field.add(&acc, &term).unwrap();
    }
    acc
}

fn at(u: &FieldElement, v: &FieldElement) -> HashMap<String, FieldElement> {
    HashMap::from([("x".to_string(), u.clone()), ("y".to_string(), v.clone())])
}

fn homogenized_form() {
    for spec in ["F3", "F5", "F7", "F3^2"] {
        let field = k(spec);
        let rootless = find_rootless(&field).unwrap();
        let b = homogenize(&rootless).unwrap();
        let elements = field.elements().unwrap();
        for r in &elements {
            assert!(!eval_form(&rootless.coefficients, r, &field.one(), &field).is_zero(), "{spec}: root {r}");
        }
        for u in &elements {
            for v in &elements {
                let value = b.eval(&field, &at(u, v)).unwrap();
                assert_eq!(value, eval_form(&rootless.coefficients, u, v, &field));
                assert_eq!(value.is_zero(), u.is_zero() && v.is_zero(), "{spec}: B({u}, {v})");
            }
        }
    }

    let q = FieldDescriptor::rationals();
    let b = homogenize(&find_rootless(&q).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rational = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.2) {
            return q.zero();
        }
        FieldElement::rational(rng.gen_range(-50i64..=50), rng.gen_range(1i64..=50)).unwrap()
    };
    for _ in 0..1000 {
        let (u, v) = (rational(&mut rng), rational(&mut rng));
        let value = b.eval(&q, &at(&u, &v)).unwrap();
        assert_eq!(value.is_zero(), u.is_zero() && v.is_zero(), "B({u}, {v}) = {value}");
    }

    let f7 = k("F7");
    let a = Neighbourhood::new(f7.clone(), vec![f7.from_i64(1), f7.from_i64(2)], &f7.from_i64(2)).unwrap();
    let single = compile_singleton(&a).unwrap();
    let phi = single.formula();
    assert!(matches!(&phi, Formula::Exists(..) | Formula::Equal(..)));
    assert_eq!(definable_set(&phi, &f7, "x").unwrap(), vec![f7.from_i64(2)], "`{phi}`");
}

// 6 --------------------------------------------------------------------------

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == size).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn curve_mechanics() {
    let start = Instant::now();
    let field = k("F5");
    let g = parse_term("y^2 - x^3 - x").unwrap();
    let g_at = |u: i64, s: i64| (s * s - u * u * u - u).rem_euclid(5);
    let brute: Vec<FieldElement> =
        (0..5i64).filter(|&u| (0..5i64).any(|s| g_at(u, s) == 0)).map(|u| field.from_i64(u)).collect();
    let p: Vec<FieldElement> = compute_p(&g, &field).unwrap().into_iter().map(|(u, _)| u).collect();
    assert_eq!(p, brute);

    let curve = CurveData::new(&g, &field).unwrap();
    for mode in [TMode::SubsetSums, TMode::Prefix] {
        let recipe = build_t(&curve, mode, DEFAULT_T_CAP).unwrap();
        let report = verify_theorem5(&curve, &recipe, DEFAULT_MAP_CAP).unwrap();
        assert_eq!(report.targets.len(), p.len());
        assert!(report.all_hold(), "{mode:?}: {report:?}");
    }

    let n = p.len();
    for size in 1..=n {
        let mut t = field.zero();
        for s in subsets(n, size) {
            let prod = s.iter().fold(field.one(), |acc, &i| field.mul(&acc, &p[i]).unwrap());
            t = field.add(&t, &prod).unwrap();
        }
        let phi = formula_8(&g, n, size).unwrap();
        assert_eq!(definable_set(&phi, &field, "v").unwrap(), vec![t], "k={size}");
    }
    within(start, 120);
}

// 7 --------------------------------------------------------------------------

fn rational_closure() {
    let start = Instant::now();
    let q = FieldDescriptor::rationals();
    let f11 = k("F11");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let c = rng.gen_range(-10i64..=10);
        let d = loop {
            let d = rng.gen_range(-10i64..=10);
            if d != 0 {
                break d;
            }
        };
        let r = BigRational::new(c.into(), d.into());
        let a = nbhd_rational(&r, &q).unwrap();
        assert_eq!(certify_by_propagation(&a), Certificate::Certified, "{c}/{d}");
        let image: Vec<FieldElement> = a.elements().iter().map(|e| to_f11(e, &f11)).collect();
        let target = to_f11(a.target(), &f11);
        let expected = (c * inverse_mod(d, 11)).rem_euclid(11);
        assert_eq!(target, f11.from_i64(expected));
        let reduced = Neighbourhood::new(f11.clone(), image, &target).unwrap();
        assert!(is_neighbourhood(&reduced).unwrap().is_yes(), "{c}/{d} over F11");
    }
    within(start, 60);
}

fn to_f11(e: &FieldElement, f11: &FieldDescriptor) -> FieldElement {
    match e {
        FieldElement::Rational(r) => f11.from_rational(r).unwrap(),
        other => panic!("not rational: {other}"),
    }
}

fn inverse_mod(d: i64, p: i64) -> i64 {
    (1..p).find(|i| (d * i).rem_euclid(p) == 1).unwrap()
}

// 8 --------------------------------------------------------------------------

/// Every map `A -> F_p` (as residues) satisfying the three conditions.
fn naive_maps(a: &[i64], p: i64) -> BTreeSet<Vec<i64>> {
    let pos = |v: i64| a.iter().position(|&x| x == v.rem_euclid(p));
    let mut out = BTreeSet::new();
    let total = (p as u64).pow(a.len() as u32);
    for code in 0..total {
        let f: Vec<i64> = (0..a.len()).map(|i| (code / (p as u64).pow(i as u32) % p as u64) as i64).collect();
        let mut ok = pos(1).map_or(true, |i| f[i] == 1);
        for i in 0..a.len() {
            for j in 0..a.len() {
                if let Some(s) = pos(a[i] + a[j]) {
                    ok &= f[s] == (f[i] + f[j]) % p;
                }
                if let Some(m) = pos(a[i] * a[j]) {
                    ok &= f[m] == (f[i] * f[j]) % p;
                }
            }
        }
        if ok {
            out.insert(f);
        }
    }
    out
}

fn library_maps(a: &[i64], field: &FieldDescriptor) -> BTreeSet<Vec<i64>> {
    let elements: Vec<FieldElement> = a.iter().map(|&x| field.from_i64(x)).collect();
    let nbhd = Neighbourhood::new(field.clone(), elements.clone(), &elements[0]).unwrap();
    let ff = field.as_finite().unwrap();
    enumerate_arithmetic_maps(&nbhd, DEFAULT_MAP_CAP)
        .unwrap()
        .into_iter()
        .map(|m| elements.iter().map(|e| ff.index(m.image(e).unwrap()).unwrap() as i64).collect())
        .collect()
}

fn oracle_equivalence() {
    let f3 = k("F3");
    let mut checked = 0;
    for mask in 1u32..8 {
        let a: Vec<i64> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        // every ordering of the set, so the target position does not matter
        for perm in permutations(&a.iter().map(|x| x.to_string()).collect::<Vec<_>>()) {
            let a: Vec<i64> = perm.iter().map(|s| s.parse().unwrap()).collect();
            assert_eq!(library_maps(&a, &f3), naive_maps(&a, 3), "A = {a:?} in F3");
            checked += 1;
        }
    }
    assert_eq!(checked, 15);
    let f5 = k("F5");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let size = rng.gen_range(1..=4);
        let mut a: Vec<i64> = Vec::new();
        while a.len() < size {
            let x = rng.gen_range(0..5);
            if !a.contains(&x) {
                a.push(x);
            }
        }
        assert_eq!(library_maps(&a, &f5), naive_maps(&a, 5), "A = {a:?} in F5");
    }
}

// 9 --------------------------------------------------------------------------

fn golden_params() -> SchemaParams {
    SchemaParams {
        root_poly: Some(parse_term("y^2 - 2").unwrap()),
        value_poly: Some(parse_term("y").unwrap()),
        matrix: Some(parse("x*x1 = 1").unwrap()),
        offset: Some(-2),
        ..Default::default()
    }
}

fn schema_goldens() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let params = golden_params();
    for name in SCHEMA_NAMES {
        let f = emit(name, &params).unwrap();
        let text = f.to_string();
        let stored = std::fs::read_to_string(dir.join(format!("{name}.txt"))).unwrap();
        assert_eq!(text, stored.trim_end(), "{name}");
        let reparsed = parse(&text).unwrap();
        assert_eq!(reparsed, f, "{name}");
        assert_eq!(reparsed.to_string(), text, "{name}");
    }
    let sentence = emit("theorem7_sentence", &SchemaParams { offset: Some(-2), ..Default::default() }).unwrap();
    assert!(sentence.free_vars().is_empty(), "{:?}", sentence.free_vars());
}

// ----------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 9] = [
        ("normalization preserves definable sets", normalization_soundness),
        ("atomization matches the worked example", atomize_fidelity),
        ("fixed subfield is the prime field", prime_field_fixed),
        ("neighbourhood/formula round trip", round_trip),
        ("homogenized form vanishes only at the origin", homogenized_form),
        ("curve abscissas and symmetric values are fixed", curve_mechanics),
        ("rational neighbourhoods certify and reduce", rational_closure),
        ("map enumeration equals the naive filter", oracle_equivalence),
        ("schema golden files", schema_goldens),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str()) || *f == (i + 1).to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let spent = start.elapsed();
        match outcome {
            Ok(()) => println!("PASS criterion {}: {label} ({spent:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL criterion {}: {label} ({spent:.2?}): {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
