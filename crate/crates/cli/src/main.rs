//! `torsionlab`: homology, torsion-bound suites, nerves, hyperbolic checks
//! and Dehn-filling tables from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 64 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod verify;

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use torsionlab_core::constants::{
    b_upper_bound, commutator_inequality_check, figure_eight_volume, parse_decimal, rational_to_f64, step4_constants,
    thick_thin_constants, ThickThinConstants, FIGURE_EIGHT_VOLUME_BOUND,
};
use torsionlab_core::dehn::{figure_eight_family, fill_homology, torsion_schedule, Alpha};
use torsionlab_core::homology::homology_all;
use torsionlab_core::hyperbolic::{displacement, IsometryKind};
use torsionlab_core::io::{parse_complex, parse_cover, parse_isometries, parse_point, ComplexInput};
use torsionlab_core::nerve::nerve;
use torsionlab_core::torsion::PRECISION_ENV;
use torsionlab_core::{relative_homology, Error, FillingSlope, HomologyRecord, ThickThinParams};

use args::{Cli, Command};

pub enum Failure {
    Verification,
    Input(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::MalformedInput(_) => Failure::Input(e.to_string()),
            Error::InvalidParameter(_) | Error::InvalidSlope { .. } | Error::DimensionOutOfRange(_) | Error::Unsupported(_) => {
                Failure::Usage(e.to_string())
            }
            Error::IndeterminateIntersection { .. } | Error::Sampling(_) | Error::Inconsistency(_) => {
                eprintln!("error: {e}");
                Failure::Verification
            }
        }
    }
}

pub type Outcome = Result<(), Failure>;

/// Collects output lines so a failing command never leaves partial files behind.
#[derive(Default)]
pub struct Sink {
    buf: String,
}

impl Sink {
    pub fn line<T: Serialize>(&mut self, value: &T) {
        let text = serde_json::to_string(value).expect("serializable");
        let _ = writeln!(self.buf, "{text}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    if let Ok(v) = std::env::var(PRECISION_ENV) {
        if !matches!(v.trim().parse::<u32>(), Ok(b) if b > 0) {
            eprintln!("error: {PRECISION_ENV} must be a positive integer, got {v:?}");
            return ExitCode::from(64);
        }
    }
    let mut sink = Sink::default();
    let outcome = run(cli.command, &mut sink);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &sink.buf),
        None => std::io::stdout().write_all(sink.buf.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(64)
        }
    }
}

fn read(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(command: Command, out: &mut Sink) -> Outcome {
    match command {
        Command::Homology { path, degrees } => cmd_homology(&read(&path)?, degrees, out),
        Command::Verify(v) => verify::run(&v, out),
        Command::Constants { d, margulis_eps, margulis_m, m8, delta } => {
            cmd_constants(d, &margulis_eps, margulis_m, m8, delta, out)
        }
        Command::DehnFill { mu, lambda, relations, p, q } => {
            let data = args::peripheral(&mu, &lambda, &relations)?;
            let slope = FillingSlope::new(p, q)?;
            out.line(&fill_homology(&data, slope));
            Ok(())
        }
        Command::DehnTable { p, q } => {
            for row in figure_eight_family(args::range(&p)?, args::range(&q)?) {
                out.line(&row);
            }
            Ok(())
        }
        Command::Nerve { path, max_dim, degrees } => cmd_nerve(&read(&path)?, max_dim, degrees, out),
        Command::Displacement { path, point } => {
            let x = parse_point(&point)?;
            for (index, g) in parse_isometries(&read(&path)?)?.iter().enumerate() {
                if g.dim() != x.dim() {
                    return Err(Failure::Usage(format!("isometry {index} acts on H^{}, point is in H^{}", g.dim(), x.dim())));
                }
                out.line(&DisplacementLine { index, kind: g.kind(), displacement: displacement(g, &x) });
            }
            Ok(())
        }
        Command::Schedule { alpha, volumes } => {
            let alpha: Alpha = alpha.parse()?;
            let range = args::range(&volumes)?;
            let volumes: Vec<f64> = range.map(|v| v as f64).collect();
            out.line(&torsion_schedule(alpha, &volumes)?);
            Ok(())
        }
    }
}

fn cmd_homology(text: &str, degrees: Option<usize>, out: &mut Sink) -> Outcome {
    let input = parse_complex(text)?;
    let top = degrees.unwrap_or_else(|| input.total().dim().unwrap_or(0));
    let groups = match &input {
        ComplexInput::Complex(k) => homology_all(k, top),
        ComplexInput::Pair(p) => (0..=top).map(|d| relative_homology(p, d)).collect(),
    };
    for (d, g) in groups.iter().enumerate() {
        out.line(&HomologyRecord::new(d, g));
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantsDocument {
    #[serde(flatten)]
    thick_thin: ThickThinConstants,
    b_upper_bound: Option<u64>,
    commutator_chain_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    step4: Option<torsionlab_core::constants::Step4Constants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    figure_eight_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    figure_eight_volume_bound: Option<f64>,
}

fn cmd_constants(d: usize, margulis_eps: &str, margulis_m: u64, m8: bool, delta: Option<f64>, out: &mut Sink) -> Outcome {
    let params = ThickThinParams::new(d, parse_decimal(margulis_eps)?, margulis_m)?;
    let thick_thin = thick_thin_constants(&params);
    let b = b_upper_bound(d).ok();
    let step4 = match (delta, b) {
        (Some(delta), Some(b)) => {
            Some(step4_constants(d, rational_to_f64(&params.eps()), rational_to_f64(&params.eps0()), delta, b)?)
        }
        (Some(_), None) => return Err(Failure::Usage(format!("--delta needs the packing bound b({d}), unavailable for d={d}"))),
        (None, _) => None,
    };
    let commutator_chain_passed = d < 2 || commutator_inequality_check(d)?.passed();
    out.line(&ConstantsDocument {
        thick_thin,
        b_upper_bound: b,
        commutator_chain_passed,
        step4,
        figure_eight_volume: m8.then(figure_eight_volume),
        figure_eight_volume_bound: m8.then_some(FIGURE_EIGHT_VOLUME_BOUND),
    });
    Ok(())
}

#[derive(Serialize)]
struct NerveDocument {
    f_vector: Vec<usize>,
    maximal_simplices: Vec<Vec<usize>>,
    homology: Vec<HomologyRecord>,
}

fn cmd_nerve(text: &str, max_dim: Option<usize>, degrees: Option<usize>, out: &mut Sink) -> Outcome {
    let cover = parse_cover(text)?;
    if max_dim == Some(0) {
        return Err(Failure::Usage("--max-dim must be at least 1".into()));
    }
    let k = nerve(&cover, max_dim)?;
    let top = degrees.unwrap_or_else(|| k.dim().unwrap_or(0));
    out.line(&NerveDocument {
        f_vector: k.f_vector(),
        maximal_simplices: k.maximal_simplices().iter().map(|s| s.vertices().to_vec()).collect(),
        homology: homology_all(&k, top).iter().enumerate().map(|(d, g)| HomologyRecord::new(d, g)).collect(),
    });
    Ok(())
}

#[derive(Serialize)]
struct DisplacementLine<'a> {
    index: usize,
    #[serde(flatten)]
    kind: &'a IsometryKind,
    displacement: f64,
}
