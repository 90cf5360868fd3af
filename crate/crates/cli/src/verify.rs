//! Verification suites. Each streams one JSON line per instance and ends
//! with a summary line; the process exits 1 if any instance failed.

use serde::Serialize;
use torsionlab_core::constants::commutator_inequality_check;
use torsionlab_core::homology::homology_all;
use torsionlab_core::hyperbolic::{
    convexity_suite, displacement_suite, obtuse_suite, orbit_suite, CONVEXITY_THRESHOLD,
};
use torsionlab_core::nerve::{annulus_cover, circle_cover, nerve, nerve_lemma_check, random_star_cover, relative_nerve};
use torsionlab_core::torsion::{batch_verify, diagonal_equality_suite, BatchParams};
use torsionlab_core::{AbelianGroupStructure, HomologyRecord};

use crate::args::{Suite, VerifyArgs};
use crate::{Failure, Outcome, Sink};

/// Displacement agreement with `sinh(d/2) = cosh(r) sinh(l/2)`.
pub const DISPLACEMENT_TOLERANCE: f64 = 1e-9;

#[derive(Serialize)]
struct Summary<'a> {
    suite: &'a str,
    seed: u64,
    count: usize,
    failures: Vec<String>,
    passed: bool,
}

fn finish(out: &mut Sink, suite: &str, seed: u64, count: usize, failures: Vec<String>) -> Outcome {
    let passed = failures.is_empty();
    out.line(&Summary { suite, seed, count, failures, passed });
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

pub fn run(args: &VerifyArgs, out: &mut Sink) -> Outcome {
    let seed = args.seed;
    if args.count == Some(0) {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    match args.suite {
        Suite::Soule => {
            let count = args.count.unwrap_or(1000);
            let (summary, reports) = batch_verify(&BatchParams::soule_default(), count, seed)?;
            for r in &reports {
                out.line(r);
            }
            let mut failures: Vec<String> = summary.failures.iter().map(|i| format!("random-{i}")).collect();
            for case in diagonal_equality_suite(count.min(100), 20, seed) {
                if !(case.report.holds && case.report.equality) {
                    failures.push(format!("diagonal-{}", case.index));
                }
                out.line(&case);
            }
            finish(out, "soule", seed, count, failures)
        }
        Suite::DvBound => {
            let count = args.count.unwrap_or(100);
            let (summary, reports) = batch_verify(&BatchParams::dv_default(), count, seed)?;
            for r in &reports {
                out.line(r);
            }
            finish(out, "dv-bound", seed, count, summary.failures.iter().map(ToString::to_string).collect())
        }
        Suite::Nerve => nerve_suite(args.count.unwrap_or(20), seed, out),
        Suite::Obtuse => {
            let count = args.count.unwrap_or(4);
            let cases = obtuse_suite(count, args.samples, seed)?;
            let failures = cases.iter().filter(|c| !c.report.passed).map(|c| c.index.to_string()).collect();
            for c in &cases {
                out.line(c);
            }
            finish(out, "obtuse", seed, count, failures)
        }
        Suite::Orbit => {
            let count = args.count.unwrap_or(200);
            let reports = orbit_suite(count, seed)?;
            let failures = reports.iter().enumerate().filter(|(_, r)| !r.passed).map(|(i, _)| i.to_string()).collect();
            for r in &reports {
                out.line(r);
            }
            finish(out, "orbit", seed, count, failures)
        }
        Suite::Commutator => {
            if args.d < 2 {
                return Err(Failure::Usage(format!("--d must be at least 2, got {}", args.d)));
            }
            let mut failures = Vec::new();
            for d in 2..=args.d {
                let report = commutator_inequality_check(d)?;
                if !report.passed() {
                    failures.push(format!("d={d}"));
                }
                out.line(&report);
            }
            finish(out, "commutator", seed, args.d - 1, failures)
        }
        Suite::Displacement => {
            let count = args.count.unwrap_or(100);
            let mut failures = Vec::new();
            for c in displacement_suite(count, seed)? {
                if !(c.error <= DISPLACEMENT_TOLERANCE) {
                    failures.push(format!("displacement-{}", c.index));
                }
                out.line(&c);
            }
            for c in convexity_suite(count, seed)? {
                if !(c.min_second_difference >= CONVEXITY_THRESHOLD) {
                    failures.push(format!("convexity-{}", c.index));
                }
                out.line(&c);
            }
            finish(out, "displacement", seed, count, failures)
        }
    }
}

#[derive(Serialize)]
struct NerveCase {
    case: String,
    f_vector: Vec<usize>,
    computed: Vec<HomologyRecord>,
    reference: Vec<HomologyRecord>,
    passed: bool,
}

fn records(groups: &[AbelianGroupStructure]) -> Vec<HomologyRecord> {
    groups.iter().enumerate().map(|(d, g)| HomologyRecord::new(d, g)).collect()
}

fn point(top: usize) -> Vec<AbelianGroupStructure> {
    let mut v = vec![AbelianGroupStructure::free(1)];
    v.resize(top + 1, AbelianGroupStructure::trivial());
    v
}

fn nerve_suite(count: usize, seed: u64, out: &mut Sink) -> Outcome {
    let mut cases = Vec::new();

    let circle = circle_cover(8, 0.9);
    let reference = vec![AbelianGroupStructure::free(1), AbelianGroupStructure::free(1)];
    let r = nerve_lemma_check(&circle, &reference, None)?;
    cases.push(NerveCase { case: "circle-8".into(), f_vector: r.f_vector, computed: r.computed, reference: r.reference, passed: r.passed });

    // The annulus retracts onto its inner circle, so the pair is acyclic.
    let annulus = annulus_cover(8, 0.7);
    let inner: Vec<usize> = (0..8).collect();
    let pair = relative_nerve(&annulus, &inner, &[0.45; 8], None)?;
    let computed = pair.relative_homology(2)?;
    let reference = vec![AbelianGroupStructure::trivial(); 3];
    cases.push(NerveCase {
        case: "annulus-rel-inner".into(),
        f_vector: pair.nerve.f_vector(),
        passed: computed == reference,
        computed: records(&computed),
        reference: records(&reference),
    });

    // Circle relative to an arc: H_1 = Z, everything else vanishes.
    let arc = [0, 1, 2];
    let pair = relative_nerve(&circle, &arc, &[0.8; 3], None)?;
    let computed = pair.relative_homology(1)?;
    let reference = vec![AbelianGroupStructure::trivial(), AbelianGroupStructure::free(1)];
    cases.push(NerveCase {
        case: "circle-rel-arc".into(),
        f_vector: pair.nerve.f_vector(),
        passed: computed == reference,
        computed: records(&computed),
        reference: records(&reference),
    });

    // Shrinking nothing: the pair (N, N) has trivial relative homology.
    let pair = relative_nerve(&circle, &(0..8).collect::<Vec<_>>(), &[0.9; 8], None)?;
    let computed = pair.relative_homology(1)?;
    let reference = vec![AbelianGroupStructure::trivial(); 2];
    cases.push(NerveCase {
        case: "circle-rel-self".into(),
        f_vector: pair.nerve.f_vector(),
        passed: computed == reference,
        computed: records(&computed),
        reference: records(&reference),
    });

    for i in 0..count {
        let hyperbolic = i % 2 == 1;
        let d = 2 + (i / 2) % 2;
        let n = 3 + i % 5;
        let cover = random_star_cover(hyperbolic, d, n, seed, i);
        let k = nerve(&cover, None)?;
        // Homology of the capped nerve is only meaningful below the cap.
        let top = k.dim().unwrap_or(0).min(cover.default_max_dim() - 1);
        let computed = homology_all(&k, top);
        let reference = point(top);
        cases.push(NerveCase {
            case: format!("star-{}{d}-{i}", if hyperbolic { "H" } else { "E" }),
            f_vector: k.f_vector(),
            passed: computed == reference,
            computed: records(&computed),
            reference: records(&reference),
        });
    }

    let failures = cases.iter().filter(|c| !c.passed).map(|c| c.case.clone()).collect();
    let total = cases.len();
    for c in &cases {
        out.line(c);
    }
    finish(out, "nerve", seed, total, failures)
}
