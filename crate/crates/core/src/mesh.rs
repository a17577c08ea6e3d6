//! Periodic tetrahedral meshes of the cube `[-1, 1]^3`.
//!
//! The cube is divided into `n^3` subcubes and each subcube into five
//! tetrahedra: one central tetrahedron and four corner tetrahedra. The split
//! alternates between neighbouring subcubes so that the diagonals on shared
//! square faces match, which needs an even `n` to close periodically.

use std::collections::HashMap;

use crate::{Error, Result};

/// Local vertex triples of the four reference faces, ordered so that the
/// right-hand normal points outwards: `zeta = 0`, `eta = 0`, `xi = 0` and
/// the slanted face.
pub const REFERENCE_FACES: [[usize; 3]; 4] = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];

/// Reference coordinates of the four vertices of the unit tetrahedron.
pub const REFERENCE_VERTICES: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Unit outward normal.
    pub normal: [f64; 3],
    pub area: f64,
    pub neighbor: usize,
    pub neighbor_face: usize,
    /// Local vertex indices in the neighbour matching this face's
    /// [`REFERENCE_FACES`] triple, in the same order.
    pub neighbor_vertices: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Physical vertex coordinates (not wrapped across the periodic boundary).
    pub vertices: [[f64; 3]; 4],
    /// Lattice indices of the vertices, reduced modulo `n`.
    pub lattice: [[usize; 3]; 4],
    /// `d x_a / d xi_b` of the affine map `x = v0 + J xi`.
    pub jacobian: [[f64; 3]; 3],
    /// `d xi_a / d x_b`.
    pub inverse_jacobian: [[f64; 3]; 3],
    pub det: f64,
    pub faces: [Face; 4],
}

impl Element {
    pub fn volume(&self) -> f64 {
        self.det / 6.0
    }

    /// Diameter of the inscribed sphere, `6 V / (total face area)`.
    pub fn insphere_diameter(&self) -> f64 {
        6.0 * self.volume() / self.faces.iter().map(|f| f.area).sum::<f64>()
    }

    /// Physical point of a reference point.
    pub fn map(&self, xi: [f64; 3]) -> [f64; 3] {
        let v0 = self.vertices[0];
        std::array::from_fn(|a| v0[a] + (0..3).map(|b| self.jacobian[a][b] * xi[b]).sum::<f64>())
    }

    pub fn centroid(&self) -> [f64; 3] {
        std::array::from_fn(|a| self.vertices.iter().map(|v| v[a]).sum::<f64>() / 4.0)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub subdivisions: usize,
    /// Subcube edge length.
    pub h: f64,
    pub elements: Vec<Element>,
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        self.elements.iter().map(Element::volume).sum()
    }

    /// Side length of the periodic domain.
    pub fn period(&self) -> f64 {
        2.0
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn inverse3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let d = det3(m);
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 1, 2, 2) / d, -c(0, 1, 2, 2) / d, c(0, 1, 1, 2) / d],
        [-c(1, 0, 2, 2) / d, c(0, 0, 2, 2) / d, -c(0, 0, 1, 2) / d],
        [c(1, 0, 2, 1) / d, -c(0, 0, 2, 1) / d, c(0, 0, 1, 1) / d],
    ]
}

/// Corner offsets of the five tetrahedra of a subcube whose lower corner
/// has even lattice parity. Odd subcubes use the mirrored split.
const EVEN_SPLIT: [[[usize; 3]; 4]; 5] = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
    [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[1, 1, 0], [0, 1, 0], [1, 0, 0], [1, 1, 1]],
    [[1, 0, 1], [1, 0, 0], [0, 0, 1], [1, 1, 1]],
    [[0, 1, 1], [0, 0, 1], [0, 1, 0], [1, 1, 1]],
];

/// Builds the periodic mesh of `[-1, 1]^3` with `n` subcubes per axis.
pub fn build_periodic_cube_mesh(n: usize) -> Result<Mesh> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Mesh(format!(
            "subdivisions must be even and at least 2 (got {n}); the alternating five-tetrahedra split only closes periodically for even n"
        )));
    }
    let h = 2.0 / n as f64;
    let mut raw: Vec<[[usize; 3]; 4]> = Vec::with_capacity(5 * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mirrored = (i + j + k) % 2 == 1;
                for tet in EVEN_SPLIT {
                    raw.push(tet.map(|c| {
                        let c = if mirrored { [c[0], 1 - c[1], c[2]] } else { c };
                        [i + c[0], j + c[1], k + c[2]]
                    }));
                }
            }
        }
    }

    let mut elements = Vec::with_capacity(raw.len());
    let mut unwrapped = Vec::with_capacity(raw.len());
    for mut corners in raw {
        let coords = |c: [usize; 3]| c.map(|v| -1.0 + h * v as f64);
        let mut v = corners.map(coords);
        let jac = |v: &[[f64; 3]; 4]| -> [[f64; 3]; 3] {
            let (e1, e2, e3) = (sub(v[1], v[0]), sub(v[2], v[0]), sub(v[3], v[0]));
            std::array::from_fn(|a| [e1[a], e2[a], e3[a]])
        };
        let mut j = jac(&v);
        if det3(j) < 0.0 {
            corners.swap(1, 2);
            v = corners.map(coords);
            j = jac(&v);
        }
        let det = det3(j);
        unwrapped.push(corners);
        let faces = REFERENCE_FACES.map(|[a, b, c]| {
            let cr = cross(sub(v[b], v[a]), sub(v[c], v[a]));
            let norm = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
            Face { normal: cr.map(|x| x / norm), area: 0.5 * norm, neighbor: usize::MAX, neighbor_face: usize::MAX, neighbor_vertices: [0; 3] }
        });
        elements.push(Element {
            vertices: v,
            lattice: corners.map(|c| c.map(|x| x % n)),
            jacobian: j,
            inverse_jacobian: inverse3(j),
            det,
            faces,
        });
    }

    // Pair faces by three times their lattice centroid, wrapped by the period.
    let mut open: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
    for e in 0..elements.len() {
        for f in 0..4 {
            let key: [usize; 3] =
                std::array::from_fn(|a| REFERENCE_FACES[f].iter().map(|&v| unwrapped[e][v][a]).sum::<usize>() % (3 * n));
            match open.remove(&key) {
                None => {
                    open.insert(key, (e, f));
                }
                Some(other) => {
                    link(&mut elements, (e, f), other)?;
                    link(&mut elements, other, (e, f))?;
                }
            }
        }
    }
    if !open.is_empty() {
        return Err(Error::Mesh(format!("{} faces without a neighbour", open.len())));
    }
    Ok(Mesh { subdivisions: n, h, elements })
}

fn link(elements: &mut [Element], (e, f): (usize, usize), (e2, f2): (usize, usize)) -> Result<()> {
    let own = REFERENCE_FACES[f].map(|v| elements[e].lattice[v]);
    let mut matched = [0; 3];
    for (slot, lat) in matched.iter_mut().zip(own) {
        *slot = REFERENCE_FACES[f2]
            .iter()
            .copied()
            .find(|&v| elements[e2].lattice[v] == lat)
            .ok_or_else(|| Error::Mesh(format!("faces ({e},{f}) and ({e2},{f2}) share a centroid but not their vertices")))?;
    }
    let face = &mut elements[e].faces[f];
    face.neighbor = e2;
    face.neighbor_face = f2;
    face.neighbor_vertices = matched;
    Ok(())
}
