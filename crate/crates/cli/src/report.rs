//! JSON reports for each subcommand. Field order is fixed by the structs, so
//! identical invocations print identical bytes.

use std::sync::Arc;

use obstructor::algebra::{
    hilbert_symbol, matrix_algebra, quaternion_for_prime, relevant_places, DMatrix, Place,
};
use obstructor::descriptor::{from_json_str, graph_from_json, graph_to_json, CornerInput};
use obstructor::divisor::{contains_double_fiber, parse_fiber, parse_poly, verify_factorization, MultiHomogPoly};
use obstructor::obstruction::{
    base_is_supersingular, corner_detect, flag_nonliftable, loop_oracle, path_spans, CornerReport, Verdict,
};
use obstructor::rational::{self, Rational};
use obstructor::witness::{
    build_r3_graph, build_r3_graph_seeded, build_r4_graph, build_r4_graph_seeded, genus_one_check,
    random_rosati_generator, verify_identity_chain, ChainReport, GenusOneReport, Status, DEFAULT_BOUND,
};
use obstructor::{Error, RatVector, Result};
use serde::Serialize;

use crate::Outcome;

const GENUS_ONE_SAMPLES: usize = 100;

fn emit<T: Serialize>(value: &T, passed: bool) -> Result<(String, Outcome)> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((json, if passed { Outcome::Passed } else { Outcome::Failed }))
}

#[derive(Serialize)]
struct Ramification {
    a: String,
    b: String,
    ramified: Vec<String>,
    expected: Vec<String>,
    status: Status,
}

fn ramification(p: u64) -> Result<Ramification> {
    let q = quaternion_for_prime(p)?;
    let params = q.quaternion_params().expect("built as a quaternion algebra");
    let ramified: Vec<String> = obstructor::algebra::ramified_places(&params.a, &params.b)?
        .iter()
        .map(Place::to_string)
        .collect();
    let expected = vec![p.to_string(), Place::Infinity.to_string()];
    Ok(Ramification {
        a: rational::format(&params.a),
        b: rational::format(&params.b),
        status: if ramified == expected { Status::Pass } else { Status::Fail },
        ramified,
        expected,
    })
}

#[derive(Serialize)]
struct DivisorExample {
    poly: String,
    double_fiber: Status,
    splitting: Status,
}

fn divisor_example() -> Result<DivisorExample> {
    let f = parse_poly("x1*x2*x3 - y1*y2*y3", 3)?;
    let zero_one = (rational::zero(), rational::one());
    let one_zero = (rational::one(), rational::zero());
    let hit = contains_double_fiber(&f, 1, &zero_one, 2, &one_zero)?;
    let cover = f.substitute_powers(&[2, 2, 2])?;
    let split = verify_factorization(&cover, &[f.clone(), parse_poly("x1*x2*x3 + y1*y2*y3", 3)?])?;
    let status = |ok| if ok { Status::Pass } else { Status::Fail };
    Ok(DivisorExample {
        poly: f.to_string(),
        double_fiber: status(hit),
        splitting: status(split),
    })
}

#[derive(Serialize)]
#[serde(untagged)]
enum GenusCase {
    Chain(Box<ChainReport>),
    GenusOne { g: usize, impossibility: GenusOneReport, status: Status },
}

#[derive(Serialize)]
struct VerifyReport {
    p: u64,
    strict: bool,
    runs: Vec<GenusCase>,
    ramification: Ramification,
    divisor_example: DivisorExample,
    discrepancies: usize,
    passed: bool,
}

pub fn verify(gs: &[usize], p: u64, strict: bool, seed: u64) -> Result<(String, Outcome)> {
    let mut runs = Vec::new();
    let mut passed = true;
    let mut discrepancies = 0;
    for &g in gs {
        if g == 1 {
            let report = genus_one_check(p, seed, GENUS_ONE_SAMPLES, DEFAULT_BOUND)?;
            let ok = report.holds();
            passed &= ok;
            runs.push(GenusCase::GenusOne {
                g,
                status: if ok { Status::Pass } else { Status::Fail },
                impossibility: report,
            });
        } else {
            let chain = verify_identity_chain(g)?;
            passed &= chain.passed();
            discrepancies += chain.discrepancies();
            runs.push(GenusCase::Chain(Box::new(chain)));
        }
    }
    let ramification = ramification(p)?;
    let divisor_example = divisor_example()?;
    passed &= ramification.status == Status::Pass
        && divisor_example.double_fiber == Status::Pass
        && divisor_example.splitting == Status::Pass
        && !(strict && discrepancies > 0);
    emit(
        &VerifyReport {
            p,
            strict,
            runs,
            ramification,
            divisor_example,
            discrepancies,
            passed,
        },
        passed,
    )
}

#[derive(Serialize)]
struct ObstructionReport {
    vertex: usize,
    e_dim: usize,
    ambient_dim: usize,
    basis: Vec<RatVector>,
    #[serde(flatten)]
    corner: CornerReport,
    rounds: usize,
    verdict: Verdict,
    note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_equal: Option<bool>,
}

pub fn obstruction(text: &str, vertex: usize, oracle_len: Option<usize>) -> Result<(String, Outcome)> {
    let graph = graph_from_json(text)?;
    graph.check_vertex(vertex)?;
    let spans = path_spans(&graph)?;
    let e = spans.get(vertex, vertex).clone();
    let end = Arc::new(graph.end_algebra(vertex)?);
    let corner = corner_detect(&e, &end)?;
    let verdict = flag_nonliftable(&corner, base_is_supersingular(graph.base()));
    let oracle = oracle_len.map(|len| loop_oracle(&graph, vertex, len)).transpose()?;
    let oracle_equal = oracle.as_ref().map(|o| *o == e);
    emit(
        &ObstructionReport {
            vertex,
            e_dim: e.dim(),
            ambient_dim: e.ambient_dim(),
            basis: e.basis().to_vec(),
            corner,
            rounds: spans.rounds,
            verdict: verdict.verdict,
            note: verdict.note,
            oracle_len,
            oracle_dim: oracle.as_ref().map(|o| o.dim()),
            oracle_equal,
        },
        oracle_equal != Some(false),
    )
}

#[derive(Serialize)]
struct GeneratorReport {
    g: usize,
    p: u64,
    seed: u64,
    bound: i64,
    found: bool,
    tries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    element: Option<Vec<Vec<Vec<String>>>>,
}

pub fn find_generator(g: usize, p: u64, seed: u64, tries: usize, bound: i64) -> Result<(String, Outcome)> {
    let base = Arc::new(quaternion_for_prime(p)?);
    let end = Arc::new(matrix_algebra(&base, g)?);
    let (found, tries, element) = match random_rosati_generator(&end, seed, tries, bound) {
        Ok(w) => (true, w.tries, Some(DMatrix::from_element(base, g, &w.element)?.to_nested_strings())),
        Err(Error::GeneratorNotFound { tries }) => (false, tries, None),
        Err(e) => return Err(e),
    };
    emit(
        &GeneratorReport {
            g,
            p,
            seed,
            bound,
            found,
            tries,
            element,
        },
        found,
    )
}

#[derive(Serialize)]
struct CornerOutput {
    ambient_dim: usize,
    e_dim: usize,
    corner: CornerReport,
}

pub fn corner(text: &str) -> Result<(String, Outcome)> {
    let (a, span) = from_json_str::<CornerInput>(text)?.build()?;
    let corner = corner_detect(&span, &a)?;
    emit(
        &CornerOutput {
            ambient_dim: span.ambient_dim(),
            e_dim: span.dim(),
            corner,
        },
        true,
    )
}

#[derive(Serialize)]
struct Symbol {
    place: String,
    symbol: i32,
}

#[derive(Serialize)]
struct HilbertReport {
    a: String,
    b: String,
    symbols: Vec<Symbol>,
    ramified: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<i32>,
}

pub fn hilbert(a: &str, b: &str, place: Option<&str>) -> Result<(String, Outcome)> {
    let (a, b): (Rational, Rational) = (rational::parse(a)?, rational::parse(b)?);
    let places = match place {
        Some(text) => vec![text.parse::<Place>()?],
        None => relevant_places(&a, &b),
    };
    let mut symbols = Vec::new();
    for v in &places {
        symbols.push(Symbol {
            place: v.to_string(),
            symbol: hilbert_symbol(&a, &b, *v)?,
        });
    }
    // the product formula only makes sense over all places
    let product = place.is_none().then(|| symbols.iter().map(|s| s.symbol).product());
    let ramified = symbols.iter().filter(|s| s.symbol == -1).map(|s| s.place.clone()).collect();
    emit(
        &HilbertReport {
            a: rational::format(&a),
            b: rational::format(&b),
            symbols,
            ramified,
            product,
        },
        product != Some(-1),
    )
}

#[derive(Serialize)]
struct FiberHit {
    fibers: [String; 2],
    contains: bool,
}

#[derive(Serialize)]
struct DivisorReport {
    poly: String,
    multidegree: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    substituted: Option<String>,
    double_fiber_hits: Vec<FiberHit>,
    contains: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    splitting_verified: Option<bool>,
}

pub fn divisor(
    text: &str,
    r: usize,
    subst: Option<&[u32]>,
    fibers: &[String],
    factors: &[String],
) -> Result<(String, Outcome)> {
    let f = parse_poly(text, r)?;
    let parsed = fibers.iter().map(|t| parse_fiber(t)).collect::<Result<Vec<_>>>()?;
    let mut hits = Vec::new();
    for (m, (i, pi)) in parsed.iter().enumerate() {
        for (n, (j, pj)) in parsed.iter().enumerate().skip(m + 1) {
            if i != j {
                hits.push(FiberHit {
                    fibers: [fibers[m].clone(), fibers[n].clone()],
                    contains: contains_double_fiber(&f, *i, pi, *j, pj)?,
                });
            }
        }
    }
    if !parsed.is_empty() && hits.is_empty() {
        return Err(Error::InvalidArgument("fibres must lie on at least two distinct factors".into()));
    }
    let target = match subst {
        Some(e) => Some(f.substitute_powers(e)?),
        None => None,
    };
    let splitting_verified = if factors.is_empty() {
        None
    } else {
        let parsed = factors.iter().map(|t| parse_poly(t, r)).collect::<Result<Vec<MultiHomogPoly>>>()?;
        Some(verify_factorization(target.as_ref().unwrap_or(&f), &parsed)?)
    };
    emit(
        &DivisorReport {
            poly: f.to_string(),
            multidegree: f.degrees().to_vec(),
            substituted: target.as_ref().map(ToString::to_string),
            contains: hits.iter().any(|h| h.contains),
            double_fiber_hits: hits,
            splitting_verified,
        },
        splitting_verified != Some(false),
    )
}

pub fn construct(r4: bool, g: usize, p: u64, seed: Option<u64>) -> Result<(String, Outcome)> {
    let graph = match (r4, seed) {
        (false, None) => build_r3_graph(g, p)?,
        (false, Some(s)) => build_r3_graph_seeded(g, p, s)?,
        (true, None) => build_r4_graph(g, p)?,
        (true, Some(s)) => build_r4_graph_seeded(g, p, s)?,
    };
    Ok((graph_to_json(&graph)?, Outcome::Passed))
}
