//! Lagrange P1/P2/P3 bases on the reference triangle.
//!
//! Nodes live on the lattice `(a/k, b/k)`, `a + b ≤ k`. Local numbering:
//! the three vertices, then the `k − 1` nodes of each edge walked from its
//! first vertex to its second (edge `e` joins vertices `e` and `e + 1 mod 3`),
//! then the interior node for `k = 3`.

use std::fmt;

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};

/// Largest local node count (cubic elements).
pub const MAX_NODES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    Linear = 1,
    Quadratic = 2,
    Cubic = 3,
}

impl Degree {
    pub const ALL: [Degree; 3] = [Degree::Linear, Degree::Quadratic, Degree::Cubic];

    pub fn order(self) -> usize {
        self as usize
    }

    /// `½(k + 1)(k + 2)`
    pub fn num_nodes(self) -> usize {
        let k = self.order();
        (k + 1) * (k + 2) / 2
    }

    pub fn nodes_per_edge(self) -> usize {
        self.order() - 1
    }

    pub fn interior_nodes(self) -> usize {
        let k = self.order();
        (k - 1) * k.saturating_sub(2) / 2
    }

    /// Default element quadrature exactness `2k + 2`.
    pub fn default_exactness(self) -> usize {
        2 * self.order() + 2
    }

    /// Default number of Gauss points on segments, `k + 2`.
    pub fn default_segment_points(self) -> usize {
        self.order() + 2
    }
}

impl TryFrom<usize> for Degree {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Degree::Linear),
            2 => Ok(Degree::Quadratic),
            3 => Ok(Degree::Cubic),
            _ => Err(Error::UnsupportedDegree(k)),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.order())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Vertex(usize),
    /// `position` counts from 1 starting at the edge's first vertex.
    Edge { edge: usize, position: usize },
    Interior,
}

/// Values and reference gradients of all local basis functions at one point.
#[derive(Debug, Clone, Copy)]
pub struct BasisValues {
    pub len: usize,
    pub values: [f64; MAX_NODES],
    pub gradients: [Vector2<f64>; MAX_NODES],
}

impl BasisValues {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn gradients(&self) -> &[Vector2<f64>] {
        &self.gradients[..self.len]
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    degree: Degree,
    /// Lattice coordinates `(a, b)` of each node: reference point `(a/k, b/k)`.
    lattice: Vec<[usize; 2]>,
    kinds: Vec<NodeKind>,
}

impl ReferenceBasis {
    pub fn new(degree: Degree) -> Self {
        let k = degree.order();
        let mut lattice = vec![[0, 0], [k, 0], [0, k]];
        let mut kinds = vec![NodeKind::Vertex(0), NodeKind::Vertex(1), NodeKind::Vertex(2)];
        for edge in 0..3 {
            for j in 1..k {
                lattice.push(match edge {
                    0 => [j, 0],
                    1 => [k - j, j],
                    _ => [0, k - j],
                });
                kinds.push(NodeKind::Edge { edge, position: j });
            }
        }
        for b in 1..k {
            for a in 1..(k - b) {
                lattice.push([a, b]);
                kinds.push(NodeKind::Interior);
            }
        }
        ReferenceBasis { degree, lattice, kinds }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice(&self) -> &[[usize; 2]] {
        &self.lattice
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn node(&self, i: usize) -> Point2<f64> {
        let k = self.degree.order() as f64;
        let [a, b] = self.lattice[i];
        Point2::new(a as f64 / k, b as f64 / k)
    }

    pub fn nodes(&self) -> Vec<Point2<f64>> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Local index of the node at lattice position `(a, b)`.
    pub fn node_at_lattice(&self, a: usize, b: usize) -> Option<usize> {
        self.lattice.iter().position(|&l| l == [a, b])
    }

    /// Evaluates every basis function and its reference gradient at `p`.
    ///
    /// Each function is the product form `Π_m Π_{r < i_m} (kλ_m − r)/(r + 1)`
    /// over the node's barycentric lattice indices `i_m`.
    pub fn eval(&self, p: Point2<f64>) -> BasisValues {
        let k = self.degree.order();
        let lambda = [1.0 - p.x - p.y, p.x, p.y];
        // Barycentric gradients in reference coordinates.
        let dlambda = [Vector2::new(-1.0, -1.0), Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)];

        // Table of S_i(λ_m) and S_i'(λ_m) for i = 0..=k.
        let mut s = [[0.0; 4]; 3];
        let mut ds = [[0.0; 4]; 3];
        for m in 0..3 {
            let kl = k as f64 * lambda[m];
            s[m][0] = 1.0;
            ds[m][0] = 0.0;
            for i in 1..=k {
                let r = (i - 1) as f64;
                let factor = (kl - r) / i as f64;
                ds[m][i] = ds[m][i - 1] * factor + s[m][i - 1] * k as f64 / i as f64;
                s[m][i] = s[m][i - 1] * factor;
            }
        }

        let mut out = BasisValues {
            len: self.len(),
            values: [0.0; MAX_NODES],
            gradients: [Vector2::zeros(); MAX_NODES],
        };
        for (n, &[a, b]) in self.lattice.iter().enumerate() {
            let idx = [k - a - b, a, b];
            let f = [s[0][idx[0]], s[1][idx[1]], s[2][idx[2]]];
            let df = [ds[0][idx[0]], ds[1][idx[1]], ds[2][idx[2]]];
            out.values[n] = f[0] * f[1] * f[2];
            out.gradients[n] =
                dlambda[0] * (df[0] * f[1] * f[2]) + dlambda[1] * (f[0] * df[1] * f[2]) + dlambda[2] * (f[0] * f[1] * df[2]);
        }
        out
    }
}

/// Convenience wrapper: values and reference gradients for degree `k`.
pub fn eval_basis(k: usize, point: Point2<f64>) -> Result<(Vec<f64>, Vec<Vector2<f64>>)> {
    let basis = ReferenceBasis::new(Degree::try_from(k)?);
    let v = basis.eval(point);
    Ok((v.values().to_vec(), v.gradients().to_vec()))
}
