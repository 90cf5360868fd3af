//! Line-based text formats for complexes, pairs, ball covers and isometries.
//!
//! `#` starts a comment everywhere. Errors carry 1-based line numbers.

use crate::error::{Error, Result};
use crate::hyperbolic::{HyperbolicPoint, LorentzIsometry};
use crate::nerve::{Ball, BallCover, Space};
use crate::simplicial::{SimplicialComplex, SimplicialPair};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-blank lines with comments stripped, paired with their line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok.parse().map_err(|_| parse_err(line, format!("expected a number, found {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number {tok:?}")));
    }
    Ok(x)
}

fn parse_csv(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split(',').map(|t| parse_f64(t.trim(), line)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComplexInput {
    Complex(SimplicialComplex),
    Pair(SimplicialPair),
}

impl ComplexInput {
    pub fn total(&self) -> &SimplicialComplex {
        match self {
            ComplexInput::Complex(k) => k,
            ComplexInput::Pair(p) => p.total(),
        }
    }
}

struct Block {
    vertex_count: usize,
    simplices: Vec<Vec<usize>>,
}

fn parse_header(line: &str, no: usize) -> Result<Option<usize>> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some("complex") {
        return Ok(None);
    }
    let spec = toks.next().ok_or_else(|| parse_err(no, "expected `complex V=<n>`"))?;
    let n = spec
        .strip_prefix("V=")
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| parse_err(no, format!("expected `V=<n>`, found {spec:?}")))?;
    if toks.next().is_some() {
        return Err(parse_err(no, "trailing tokens after header"));
    }
    Ok(Some(n))
}

fn parse_simplex(line: &str, no: usize, vertex_count: usize) -> Result<Vec<usize>> {
    let mut toks = line.split_whitespace();
    match toks.next() {
        Some("s") => {}
        Some(other) => return Err(parse_err(no, format!("unknown directive {other:?}"))),
        None => unreachable!("blank lines are skipped"),
    }
    let ids: Vec<usize> = toks
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(no, format!("bad vertex id {t:?}"))))
        .collect::<Result<_>>()?;
    if ids.is_empty() {
        return Err(parse_err(no, "simplex with no vertices"));
    }
    if ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(parse_err(no, "vertex ids must be strictly ascending"));
    }
    if let Some(&v) = ids.iter().find(|&&v| v >= vertex_count) {
        return Err(parse_err(no, format!("vertex id {v} out of range for V={vertex_count}")));
    }
    Ok(ids)
}

/// Parses a complex file, or a pair file with two blocks separated by `pair-sub`.
pub fn parse_complex(text: &str) -> Result<ComplexInput> {
    let mut lines = content_lines(text).peekable();
    let Some((no, first)) = lines.next() else {
        return Err(parse_err(last_line(text), "empty input: expected `complex V=<n>`"));
    };
    let vertex_count = parse_header(first, no)?.ok_or_else(|| parse_err(no, "expected `complex V=<n>` header"))?;
    let mut total = Block { vertex_count, simplices: Vec::new() };
    let mut sub: Option<(usize, Block)> = None;
    for (no, line) in lines {
        if line == "pair-sub" {
            if sub.is_some() {
                return Err(parse_err(no, "second `pair-sub` separator"));
            }
            sub = Some((no, Block { vertex_count: total.vertex_count, simplices: Vec::new() }));
            continue;
        }
        if let Some(n) = parse_header(line, no)? {
            match sub.as_mut() {
                Some((_, b)) if b.simplices.is_empty() => {
                    if n > total.vertex_count {
                        return Err(parse_err(no, format!("sub block V={n} exceeds V={}", total.vertex_count)));
                    }
                    b.vertex_count = n;
                    continue;
                }
                _ => return Err(parse_err(no, "unexpected header")),
            }
        }
        let block = match sub.as_mut() {
            Some((_, b)) => b,
            None => &mut total,
        };
        block.simplices.push(parse_simplex(line, no, block.vertex_count)?);
    }
    let build = |b: &Block, no: usize| {
        SimplicialComplex::build_with_vertex_count(b.vertex_count, &b.simplices).map_err(|e| parse_err(no, e.to_string()))
    };
    let k = build(&total, no)?;
    match sub {
        None => Ok(ComplexInput::Complex(k)),
        Some((sep, b)) => {
            let l = if b.simplices.is_empty() { SimplicialComplex::empty() } else { build(&b, sep)? };
            SimplicialPair::new(k, l)
                .map(ComplexInput::Pair)
                .map_err(|e| parse_err(sep, format!("sub block: {e}")))
        }
    }
}

/// Writes a complex in the format read by [`parse_complex`], listing maximal simplices.
pub fn format_complex(k: &SimplicialComplex) -> String {
    let mut out = format!("complex V={}\n", k.vertex_count());
    for s in k.maximal_simplices() {
        let ids: Vec<String> = s.vertices().iter().map(ToString::to_string).collect();
        out.push_str(&format!("s {}\n", ids.join(" ")));
    }
    out
}

pub fn format_pair(p: &SimplicialPair) -> String {
    let mut out = format_complex(p.total());
    out.push_str("pair-sub\n");
    if !p.sub().is_empty() {
        out.push_str(&format_complex(p.sub()));
    }
    out
}

/// `space E <d>` or `space H <d>`, then `ball x_1 ... x_k r` lines.
pub fn parse_cover(text: &str) -> Result<BallCover> {
    let mut lines = content_lines(text);
    let Some((no, first)) = lines.next() else {
        return Err(parse_err(last_line(text), "empty input: expected `space E|H <d>`"));
    };
    let toks: Vec<&str> = first.split_whitespace().collect();
    let space = match toks.as_slice() {
        ["space", kind, d] => {
            let d: usize = d.parse().map_err(|_| parse_err(no, format!("bad dimension {d:?}")))?;
            if d == 0 {
                return Err(parse_err(no, "dimension must be positive"));
            }
            match *kind {
                "E" => Space::Euclidean(d),
                "H" => Space::Hyperbolic(d),
                other => return Err(parse_err(no, format!("unknown space {other:?}, expected E or H"))),
            }
        }
        _ => return Err(parse_err(no, "expected `space E|H <d>` header")),
    };
    let mut balls = Vec::new();
    for (no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] != "ball" {
            return Err(parse_err(no, format!("unknown directive {:?}", toks[0])));
        }
        let k = space.coordinate_len();
        if toks.len() != k + 2 {
            return Err(parse_err(no, format!("expected {k} coordinates and a radius")));
        }
        let nums: Vec<f64> = toks[1..].iter().map(|t| parse_f64(t, no)).collect::<Result<_>>()?;
        let radius = nums[k];
        if radius <= 0.0 {
            return Err(parse_err(no, "radius must be positive"));
        }
        let center = nums[..k].to_vec();
        if let Space::Hyperbolic(_) = space {
            HyperbolicPoint::new(center.clone()).map_err(|e| parse_err(no, e.to_string()))?;
        }
        balls.push(Ball { center, radius });
    }
    BallCover::new(space, balls).map_err(|e| parse_err(no, e.to_string()))
}

/// Isometries: `isom d=<n>` followed by `n+1` matrix rows,
/// `loxo ℓ=<len> axis=<e1>;<e2>` or `para fix=<f> v=<v>`, vectors comma-separated.
pub fn parse_isometries(text: &str) -> Result<Vec<LorentzIsometry>> {
    let mut out = Vec::new();
    let mut lines = content_lines(text);
    while let Some((no, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        let head = toks.next().expect("nonblank");
        let fields: Vec<(&str, &str)> = toks
            .map(|t| t.split_once('=').ok_or_else(|| parse_err(no, format!("expected key=value, found {t:?}"))))
            .collect::<Result<_>>()?;
        let get = |keys: &[&str]| {
            fields
                .iter()
                .find(|(k, _)| keys.contains(k))
                .map(|(_, v)| *v)
                .ok_or_else(|| parse_err(no, format!("missing `{}=`", keys[0])))
        };
        let g = match head {
            "isom" => {
                let d: usize = get(&["d"])?.parse().map_err(|_| parse_err(no, "bad dimension"))?;
                if d == 0 {
                    return Err(parse_err(no, "dimension must be positive"));
                }
                let mut rows = Vec::with_capacity(d + 1);
                for _ in 0..=d {
                    let (rno, row) = lines.next().ok_or_else(|| parse_err(no, format!("expected {} matrix rows", d + 1)))?;
                    let r: Vec<f64> = row.split_whitespace().map(|t| parse_f64(t, rno)).collect::<Result<_>>()?;
                    if r.len() != d + 1 {
                        return Err(parse_err(rno, format!("expected {} entries", d + 1)));
                    }
                    rows.push(r);
                }
                LorentzIsometry::from_matrix(d, &rows).map_err(|e| parse_err(no, e.to_string()))?
            }
            "loxo" => {
                let length = parse_f64(get(&["ℓ", "l"])?, no)?;
                let (a, b) = get(&["axis"])?
                    .split_once(';')
                    .ok_or_else(|| parse_err(no, "axis needs two endpoints separated by `;`"))?;
                LorentzIsometry::loxodromic(length, &parse_csv(a, no)?, &parse_csv(b, no)?)
                    .map_err(|e| parse_err(no, e.to_string()))?
            }
            "para" => {
                let fixed = parse_csv(get(&["fix"])?, no)?;
                let v = parse_csv(get(&["v"])?, no)?;
                LorentzIsometry::parabolic(&fixed, &v).map_err(|e| parse_err(no, e.to_string()))?
            }
            other => return Err(parse_err(no, format!("unknown directive {other:?}"))),
        };
        out.push(g);
    }
    if out.is_empty() {
        return Err(parse_err(last_line(text), "no isometries found"));
    }
    Ok(out)
}

/// A comma- or space-separated list of hyperboloid coordinates.
pub fn parse_point(s: &str) -> Result<HyperbolicPoint> {
    let coords: Vec<f64> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_f64(t, 1))
        .collect::<Result<_>>()?;
    HyperbolicPoint::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::homology::homology_all;
    use crate::hyperbolic::IsometryKind;

    #[test]
    fn complex_round_trip() {
        let k = fixtures::torus();
        let text = format_complex(&k);
        assert_eq!(parse_complex(&text).unwrap(), ComplexInput::Complex(k));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# hollow triangle\n\ncomplex V=3\ns 0 1 # edge\ns 1 2\n  s 0 2\n";
        let ComplexInput::Complex(k) = parse_complex(text).unwrap() else { panic!() };
        assert_eq!(homology_all(&k, 1)[1].betti, 1);
    }

    #[test]
    fn pair_round_trip() {
        let k = fixtures::cylinder(4);
        let sub = fixtures::cycle(4, 0);
        let p = SimplicialPair::new(k, sub).unwrap();
        assert_eq!(parse_complex(&format_pair(&p)).unwrap(), ComplexInput::Pair(p));
    }

    #[test]
    fn complex_errors_have_lines() {
        let line_of = |t: &str| match parse_complex(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line_of(""), 1);
        assert_eq!(line_of("# only a comment\n"), 1);
        assert_eq!(line_of("complex V=3\ns 0 1\ns 2 1\n"), 3);
        assert_eq!(line_of("complex V=3\n\ns 0 3\n"), 3);
        assert_eq!(line_of("complex V=x\n"), 1);
        assert_eq!(line_of("complex V=3\nt 0 1\n"), 2);
        assert_eq!(line_of("complex V=3\ns 0 1\npair-sub\ns 1 2\n"), 3);
    }

    #[test]
    fn cover_parsing() {
        let text = "space E 2\nball 0 0 1\nball 1.5 0 1 # overlapping\n";
        let c = parse_cover(text).unwrap();
        assert_eq!(c.len(), 2);
        let h = parse_cover("space H 2\nball 1 0 0 0.5\n").unwrap();
        assert_eq!(h.space(), Space::Hyperbolic(2));
        assert!(matches!(parse_cover("space H 2\nball 1 1 0 0.5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_cover("space E 2\nball 0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_cover("space Q 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn isometry_parsing() {
        let text = "loxo ℓ=0.5 axis=0,0,-1;0,0,1\npara fix=0,0,1 v=0.3,0\nloxo l=1 axis=1,0;0,1\n";
        let gs = parse_isometries(text).unwrap();
        assert_eq!(gs.len(), 3);
        assert!(matches!(gs[0].kind(), IsometryKind::Loxodromic { length, .. } if *length == 0.5));
        assert!(matches!(gs[1].kind(), IsometryKind::Parabolic { .. }));
        let rows: Vec<String> =
            gs[2].rows().iter().map(|r| r.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ")).collect();
        let text = format!("isom d=2\n{}\n", rows.join("\n"));
        assert_eq!(parse_isometries(&text).unwrap()[0].rows(), gs[2].rows());
        assert!(matches!(parse_isometries("isom d=2\n1 0 0\n0 1 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_isometries("isom d=1\n2 0\n0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_isometries("loxo ℓ=0.5\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_isometries("").is_err());
    }
}
