//! Composite Gauss–Legendre rules on the open unit interval.
//!
//! Semi-infinite integrals are mapped onto (0, 1) before integration, and the
//! mapped integrands are singular at the endpoints, so only rules whose nodes
//! are strictly interior are representable.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Fixed nodes and weights on (0, 1); the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    panels: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub const DEFAULT_PANELS: usize = 64;
    pub const DEFAULT_ORDER: usize = 16;

    /// `panels` equal-width panels, each carrying an `order`-point Gauss–Legendre rule.
    pub fn composite_gauss_legendre(panels: usize, order: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Domain {
                what: "quadrature panel count",
                value: 0.0,
            });
        }
        if order == 0 {
            return Err(Error::Domain {
                what: "quadrature order",
                value: 0.0,
            });
        }
        let (x, w) = gauss_legendre(order);
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Ok(Self {
            panels,
            order,
            nodes,
            weights,
        })
    }

    /// Same panel layout with twice as many panels; used for refinement checks.
    pub fn refined(&self) -> Self {
        Self::composite_gauss_legendre(2 * self.panels, self.order)
            .expect("a valid rule refines to a valid rule")
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::composite_gauss_legendre(Self::DEFAULT_PANELS, Self::DEFAULT_ORDER)
            .expect("default rule parameters are positive")
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Tricomi's initial guess, descending order.
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x.push(-z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

/// P_n(z) and P_n'(z) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// ∫₀¹ f(s) ds as the weighted node sum.
pub fn integrate_unit<F>(f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_range(f, 0.0, 1.0, rule)
}

/// ∫ f(s) ds over a sub-interval `[lo, hi]` of the unit interval, with the rule
/// mapped affinely onto it. Used to put panel edges on known kinks.
pub fn integrate_range<F>(mut f: F, lo: f64, hi: f64, rule: &QuadratureRule) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let width = hi - lo;
    let mut sum = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = lo + width * u;
        let v = f(s);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: s });
        }
        sum += w * v;
    }
    Ok(width * sum)
}
