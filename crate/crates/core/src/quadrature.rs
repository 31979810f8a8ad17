//! Quadrature on the unit segment and on the reference triangle
//! `{x ≥ 0, y ≥ 0, x + y ≤ 1}`.
//!
//! Segment rules are Gauss–Legendre. Triangle rules are collapsed
//! (conical) products of Gauss–Legendre rules through the Duffy map
//! `(s, t) ↦ (s, t(1 − s))`, which keeps every weight positive and every
//! point strictly inside the triangle.

use nalgebra::Point2;

use crate::error::{Error, Result};

/// Largest number of Gauss points per direction we generate.
pub const MAX_GAUSS_POINTS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Polynomials of total degree up to this are integrated exactly.
    pub exactness: usize,
}

pub type SegmentRule = QuadratureRule<f64>;
pub type TriangleRule = QuadratureRule<Point2<f64>>;

impl<P: Copy> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_m`.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    if m == 1 {
        return (vec![0.0], vec![2.0]);
    }
    // Returns (P_m(x), P_m'(x)).
    let legendre = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        for j in 2..=m {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        (p1, m as f64 * (x * p1 - p0) / (x * x - 1.0))
    };
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule with `points` nodes on `[0, 1]`; exact to degree `2·points − 1`.
pub fn segment_rule(points: usize) -> Result<SegmentRule> {
    if points == 0 || points > MAX_GAUSS_POINTS {
        return Err(Error::UnsupportedQuadrature(format!(
            "segment rule with {points} points (supported: 1..={MAX_GAUSS_POINTS})"
        )));
    }
    let (nodes, weights) = gauss_legendre(points);
    Ok(QuadratureRule {
        points: nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: weights.iter().map(|w| 0.5 * w).collect(),
        exactness: 2 * points - 1,
    })
}

/// Triangle rule exact for total degree `exactness`; weights sum to ½.
pub fn triangle_rule(exactness: usize) -> Result<TriangleRule> {
    let m = (exactness + 2).div_ceil(2).max(1);
    if m > MAX_GAUSS_POINTS {
        return Err(Error::UnsupportedQuadrature(format!(
            "triangle rule of exactness {exactness} (max {})",
            2 * MAX_GAUSS_POINTS - 2
        )));
    }
    let gauss = segment_rule(m)?;
    let mut points = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for (s, ws) in gauss.iter() {
        for (t, wt) in gauss.iter() {
            points.push(Point2::new(s, t * (1.0 - s)));
            weights.push(ws * wt * (1.0 - s));
        }
    }
    Ok(QuadratureRule { points, weights, exactness })
}
