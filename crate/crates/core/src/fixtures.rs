//! Small triangulations of standard spaces.

use crate::simplicial::SimplicialComplex;

/// Minimal 6-vertex triangulation of the real projective plane.
pub const RP2_TRIANGLES: [[usize; 3]; 10] = [
    [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
    [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
];

pub fn hollow_triangle() -> SimplicialComplex {
    SimplicialComplex::build(&[[0, 1], [1, 2], [0, 2]]).expect("valid")
}

/// Boundary of the octahedron, a 2-sphere.
pub fn octahedron() -> SimplicialComplex {
    let mut tris = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                tris.push([a, b, c]);
            }
        }
    }
    SimplicialComplex::build(&tris).expect("valid")
}

/// Möbius' 7-vertex torus.
pub fn torus() -> SimplicialComplex {
    let mut tris = Vec::new();
    for i in 0..7 {
        tris.push([i, (i + 1) % 7, (i + 3) % 7]);
        tris.push([i, (i + 2) % 7, (i + 3) % 7]);
    }
    SimplicialComplex::build(&tris).expect("valid")
}

pub fn rp2() -> SimplicialComplex {
    SimplicialComplex::build(&RP2_TRIANGLES).expect("valid")
}

/// 3x3 grid with the second side glued through the flip `i -> -i`.
pub fn klein_bottle() -> SimplicialComplex {
    let vertex = |i: i64, j: i64| -> usize {
        let i = if j >= 3 { -i } else { i };
        (i.rem_euclid(3) * 3 + j.rem_euclid(3)) as usize
    };
    let mut tris = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let (a, b, c, d) = (vertex(i, j), vertex(i + 1, j), vertex(i, j + 1), vertex(i + 1, j + 1));
            tris.push([a, b, d]);
            tris.push([a, c, d]);
        }
    }
    SimplicialComplex::build(&tris).expect("valid")
}

/// Triangulated annulus: outer circle on vertices 0..n, inner circle on n..2n.
pub fn cylinder(n: usize) -> SimplicialComplex {
    let mut tris = Vec::new();
    for i in 0..n {
        let (a, b, c, d) = (i, (i + 1) % n, n + i, n + (i + 1) % n);
        tris.push([a, b, d]);
        tris.push([a, c, d]);
    }
    SimplicialComplex::build(&tris).expect("valid")
}

/// The cycle on vertices `offset..offset+n`.
pub fn cycle(n: usize, offset: usize) -> SimplicialComplex {
    let edges: Vec<[usize; 2]> = (0..n).map(|i| [offset + i, offset + (i + 1) % n]).collect();
    SimplicialComplex::build(&edges).expect("valid")
}
