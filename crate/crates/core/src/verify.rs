//! Ground-truth checks that share no code with [`crate::energy`].
//!
//! Everything here walks all `C(N, x_i)` vertex subsets per colour and
//! compares edge colours pair by pair. It is slow and meant to be: it is the
//! reference the optimized enumeration is tested against, and the gate every
//! certificate has to pass.

use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use itertools::Itertools;
use sha2::{Digest, Sha256};

use crate::colouring::Colouring;
use crate::error::{ParseError, RamseyError, Result};
use crate::par::{self, Execution};
use crate::problem::Problem;

pub const HASH_ALGORITHM: &str = "sha256";

/// Default cap on the number of colourings [`min_energy_exhaustive`] visits.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 26;

const CERT_HEADER: &str = "ramsey-certificate v1";

/// A monochromatic target clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub vertices: Vec<usize>,
    pub colour: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vertices {{{}}} form a monochromatic {}-clique in colour {}",
            self.vertices.iter().join(","),
            self.vertices.len(),
            self.colour
        )
    }
}

fn check_palette(c: &Colouring, prob: &Problem) -> Result<()> {
    if c.n_colours() != prob.n_colours() {
        return Err(RamseyError::config(format!(
            "colouring uses {} colours but {prob} has {}",
            c.n_colours(),
            prob.n_colours()
        )));
    }
    Ok(())
}

fn is_mono(c: &Colouring, vertices: &[usize], colour: usize) -> bool {
    vertices
        .iter()
        .tuple_combinations()
        .all(|(&a, &b)| c.colour_between(a, b) == colour)
}

/// The first monochromatic target clique in (colour, lexicographic) order.
pub fn find_violation(c: &Colouring, prob: &Problem) -> Result<Option<Violation>> {
    check_palette(c, prob)?;
    for (colour, &x) in prob.clique_sizes().iter().enumerate() {
        for vertices in (0..c.n_vertices()).combinations(x) {
            if is_mono(c, &vertices, colour) {
                return Ok(Some(Violation { vertices, colour }));
            }
        }
    }
    Ok(None)
}

/// True iff no colour `i` has a monochromatic `x_i`-clique.
pub fn verify_clique_free(c: &Colouring, prob: &Problem) -> Result<bool> {
    Ok(find_violation(c, prob)?.is_none())
}

/// Per-colour monochromatic clique counts by plain subset enumeration.
pub fn naive_mono_counts(c: &Colouring, prob: &Problem) -> Result<Vec<u64>> {
    check_palette(c, prob)?;
    Ok(prob
        .clique_sizes()
        .iter()
        .enumerate()
        .map(|(colour, &x)| {
            (0..c.n_vertices())
                .combinations(x)
                .filter(|vs| is_mono(c, vs, colour))
                .count() as u64
        })
        .collect())
}

/// Energy by plain subset enumeration.
pub fn naive_energy(c: &Colouring, prob: &Problem) -> Result<f64> {
    Ok(prob.energy_from_counts(&naive_mono_counts(c, prob)?))
}

/// A verified clique-free colouring and the bound `R(x_1..x_l) >= N + 1`.
///
/// Only constructed by [`make_certificate`] or by parsing a certificate file,
/// both of which run [`verify_clique_free`] first.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    problem: Problem,
    colouring: Colouring,
    implied_bound: usize,
    verified_at: DateTime<Utc>,
    checksum: String,
}

fn checksum(c: &Colouring) -> String {
    hex::encode(Sha256::digest(c.to_canonical_string().as_bytes()))
}

/// Verifies `c` and issues a certificate, or names a violating clique.
pub fn make_certificate(c: &Colouring, prob: &Problem) -> Result<Certificate> {
    if let Some(v) = find_violation(c, prob)? {
        return Err(RamseyError::NotCliqueFree(v));
    }
    Ok(Certificate {
        problem: prob.clone(),
        colouring: c.clone(),
        implied_bound: c.n_vertices() + 1,
        verified_at: Utc::now(),
        checksum: checksum(c),
    })
}

impl Certificate {
    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn colouring(&self) -> &Colouring {
        &self.colouring
    }

    pub fn implied_bound(&self) -> usize {
        self.implied_bound
    }

    pub fn verified_at(&self) -> DateTime<Utc> {
        self.verified_at
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn hash_algorithm(&self) -> &'static str {
        HASH_ALGORITHM
    }

    /// `R(3,3) >= 6`
    pub fn statement(&self) -> String {
        format!("{} >= {}", self.problem, self.implied_bound)
    }

    /// Header block followed by the canonical colouring.
    pub fn to_file_string(&self) -> String {
        let weights = self
            .problem
            .weights()
            .iter()
            .map(|k| k.to_string())
            .join(",");
        format!(
            "{CERT_HEADER}\nproblem: {}\nweights: {weights}\nbound: {}\nhash-algorithm: {HASH_ALGORITHM}\nhash: {}\nverified-at: {}\n{}",
            self.problem,
            self.statement(),
            self.checksum,
            self.verified_at.to_rfc3339_opts(SecondsFormat::Secs, true),
            self.colouring.to_canonical_string(),
        )
    }

    /// Parses a certificate file and re-verifies it from scratch.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == CERT_HEADER => {}
            _ => return Err(ParseError::new(1, format!("expected `{CERT_HEADER}`")).into()),
        }
        let mut fields = std::collections::HashMap::new();
        let mut body_start = None;
        for (i, line) in lines.by_ref() {
            let line = line.trim();
            if line.starts_with("ramsey-colouring") {
                body_start = Some(i);
                break;
            }
            let (k, v) = line.split_once(':').ok_or_else(|| {
                ParseError::new(i + 1, format!("expected `key: value`, found `{line}`"))
            })?;
            fields.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let body_start = body_start
            .ok_or_else(|| ParseError::new(text.lines().count(), "missing colouring block"))?;
        let field = |key: &str| {
            fields.get(key).cloned().ok_or_else(|| {
                RamseyError::from(ParseError::new(1, format!("missing `{key}` field")))
            })
        };

        let body = text.lines().skip(body_start).join("\n");
        let colouring =
            Colouring::parse(&body).map_err(|e| ParseError::new(e.line + body_start, e.message))?;

        let (ln, problem) = field("problem")?;
        let sizes = problem
            .strip_prefix("R(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| ParseError::new(ln, format!("malformed problem `{problem}`")))?;
        let sizes = crate::problem::parse_targets(sizes)?;
        let problem = match fields.get("weights") {
            Some((ln, w)) => {
                let weights = w
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| ParseError::new(*ln, format!("malformed weights `{w}`")))?;
                Problem::new(sizes, weights)?
            }
            None => Problem::with_default_weights(sizes)?,
        };

        let (ln, algo) = field("hash-algorithm")?;
        if algo != HASH_ALGORITHM {
            return Err(ParseError::new(ln, format!("unsupported hash algorithm `{algo}`")).into());
        }
        let (ln, hash) = field("hash")?;
        let actual = checksum(&colouring);
        if hash != actual {
            return Err(RamseyError::CertificateMismatch(format!(
                "line {ln}: hash mismatch: recorded {hash}, computed {actual}"
            )));
        }
        let (ln, stamp) = field("verified-at")?;
        let verified_at = DateTime::parse_from_rfc3339(&stamp)
            .map_err(|e| ParseError::new(ln, format!("bad timestamp: {e}")))?
            .with_timezone(&Utc);

        let mut cert = make_certificate(&colouring, &problem)?;
        let (ln, bound) = field("bound")?;
        if bound != cert.statement() {
            return Err(RamseyError::CertificateMismatch(format!(
                "line {ln}: bound `{bound}` does not match `{}`",
                cert.statement()
            )));
        }
        cert.verified_at = verified_at;
        Ok(cert)
    }
}

/// Exact minimum of the energy over every colouring of `K_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveMinimum {
    pub min_energy: f64,
    pub minimizers: u64,
    pub enumerated: u64,
}

const EXHAUSTIVE_CHUNK: u64 = 1 << 12;

/// Visits all `l^(N(N-1)/2)` colourings, refusing if that exceeds `budget`.
pub fn min_energy_exhaustive(
    n: usize,
    prob: &Problem,
    budget: u128,
    exec: Execution,
) -> Result<ExhaustiveMinimum> {
    if n < 2 {
        return Err(RamseyError::precondition("need at least two vertices"));
    }
    let n_edges = n * (n - 1) / 2;
    let l = prob.n_colours();
    let required = u32::try_from(n_edges)
        .ok()
        .and_then(|e| (l as u128).checked_pow(e))
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(RamseyError::BudgetExceeded { required, budget });
    }
    let total = required as u64;

    // vertex subsets of each target size, as lists of flat edge indices
    let index = |p: usize, q: usize| p * (2 * n - p - 1) / 2 + (q - p - 1);
    let subsets: Vec<Vec<Vec<usize>>> = prob
        .clique_sizes()
        .iter()
        .map(|&x| {
            (0..n)
                .combinations(x)
                .map(|vs| {
                    vs.iter()
                        .tuple_combinations()
                        .map(|(&a, &b)| index(a, b))
                        .collect()
                })
                .collect()
        })
        .collect();

    let chunks = total.div_ceil(EXHAUSTIVE_CHUNK);
    let (min_energy, minimizers) = par::map_reduce(
        exec,
        chunks,
        (f64::INFINITY, 0u64),
        |chunk| {
            let start = chunk * EXHAUSTIVE_CHUNK;
            let end = (start + EXHAUSTIVE_CHUNK).min(total);
            let mut digits = vec![0u8; n_edges];
            let mut rest = start;
            for d in digits.iter_mut() {
                *d = (rest % l as u64) as u8;
                rest /= l as u64;
            }
            let mut counts = vec![0u64; l];
            let mut best = (f64::INFINITY, 0u64);
            for _ in start..end {
                for (colour, sets) in subsets.iter().enumerate() {
                    counts[colour] = sets
                        .iter()
                        .filter(|s| s.iter().all(|&e| digits[e] as usize == colour))
                        .count() as u64;
                }
                let energy = prob.energy_from_counts(&counts);
                best = merge_min(best, (energy, 1));
                for d in digits.iter_mut() {
                    *d += 1;
                    if (*d as usize) < l {
                        break;
                    }
                    *d = 0;
                }
            }
            best
        },
        merge_min,
    );
    Ok(ExhaustiveMinimum {
        min_energy,
        minimizers,
        enumerated: total,
    })
}

fn merge_min(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if a.0 < b.0 {
        a
    } else if b.0 < a.0 {
        b
    } else {
        (a.0, a.1 + b.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PENTAGON: &str = "ramsey-colouring v1\nn=5 colours=2\n0 0 1 1\n1 1 0\n0 1\n0\n";

    fn r33() -> Problem {
        Problem::with_unit_weights(vec![3, 3]).unwrap()
    }

    #[test]
    fn pentagon_is_clique_free() {
        let c = Colouring::parse(PENTAGON).unwrap();
        assert!(verify_clique_free(&c, &r33()).unwrap());
        let cert = make_certificate(&c, &r33()).unwrap();
        assert_eq!(cert.implied_bound(), 6);
        assert_eq!(cert.statement(), "R(3,3) >= 6");
    }

    #[test]
    fn uniform_triangle_is_refused() {
        let c = Colouring::uniform(3, 2, 0).unwrap();
        match make_certificate(&c, &r33()) {
            Err(RamseyError::NotCliqueFree(v)) => {
                assert_eq!(v.vertices, vec![0, 1, 2]);
                assert_eq!(v.colour, 0);
                assert!(v.to_string().contains("{0,1,2}"));
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn certificate_file_round_trips() {
        let c = Colouring::parse(PENTAGON).unwrap();
        let prob = Problem::with_default_weights(vec![3, 3]).unwrap();
        let cert = make_certificate(&c, &prob).unwrap();
        let text = cert.to_file_string();
        let back = Certificate::parse(&text).unwrap();
        assert_eq!(back.colouring(), &c);
        assert_eq!(back.checksum(), cert.checksum());
        assert_eq!(back.problem(), &prob);
        assert_eq!(back.checksum().len(), 64);
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let c = Colouring::parse(PENTAGON).unwrap();
        let text = make_certificate(&c, &r33()).unwrap().to_file_string();
        // recolour the last edge; the hash no longer matches
        let tampered = format!("{}1\n", text.strip_suffix("0\n").unwrap());
        let err = Certificate::parse(&tampered).unwrap_err();
        assert!(err.to_string().contains("hash mismatch"), "{err}");
    }

    #[test]
    fn exhaustive_small_cases() {
        let m3 =
            min_energy_exhaustive(3, &r33(), DEFAULT_ENUMERATION_BUDGET, Execution::Sequential)
                .unwrap();
        assert_eq!(m3.min_energy, 0.0);
        assert_eq!(m3.minimizers, 6);
        let m5 = min_energy_exhaustive(5, &r33(), DEFAULT_ENUMERATION_BUDGET, Execution::Parallel)
            .unwrap();
        assert_eq!(m5.min_energy, 0.0);
        assert!(m5.minimizers > 0);
        assert_eq!(m5.enumerated, 1 << 10);
    }

    #[test]
    fn exhaustive_respects_budget() {
        match min_energy_exhaustive(8, &r33(), DEFAULT_ENUMERATION_BUDGET, Execution::Sequential) {
            Err(RamseyError::BudgetExceeded { required, .. }) => assert_eq!(required, 1 << 28),
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }
}
