//! Fixed-node Gauss–Legendre integration on the unit interval.
//!
//! Nodes never touch 0 or 1, so integrands with integrable endpoint
//! singularities can be evaluated directly. Each node also carries its
//! complement `1 - x` computed without cancellation, which matters for the
//! graded rule whose nodes crowd toward 1 far below machine epsilon.

use crate::error::{Error, Result};

pub const DEFAULT_PANELS: usize = 16;
pub const DEFAULT_ORDER: usize = 32;

/// A point of (0, 1) together with its exact complement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitPoint {
    pub x: f64,
    pub xc: f64,
}

impl UnitPoint {
    pub fn new(x: f64) -> Self {
        UnitPoint { x, xc: 1.0 - x }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    points: Vec<UnitPoint>,
    weights: Vec<f64>,
    panels: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::composite(DEFAULT_PANELS, DEFAULT_ORDER).expect("default rule")
    }
}

impl QuadratureRule {
    /// `order`-point Gauss–Legendre on each of `panels` equal subintervals.
    pub fn composite(panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || order < 2 {
            return Err(Error::Config(format!(
                "quadrature needs panels >= 1 and order >= 2 (got {panels}, {order})"
            )));
        }
        let (t, w) = gauss_legendre(order);
        let width = 1.0 / panels as f64;
        let mut points = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = p as f64 * width;
            let hi_c = (panels - p - 1) as f64 * width; // 1 - upper edge
            for (ti, wi) in t.iter().zip(&w) {
                points.push(UnitPoint {
                    x: lo + 0.5 * width * (1.0 + ti),
                    xc: hi_c + 0.5 * width * (1.0 - ti),
                });
                weights.push(0.5 * width * wi);
            }
        }
        Ok(QuadratureRule {
            points,
            weights,
            panels,
        })
    }

    /// Panels shrink geometrically toward both endpoints: on [0, 1/2] the
    /// breakpoints are `0, r^L/2, ..., r/2, 1/2`, mirrored on [1/2, 1].
    ///
    /// Integrable power singularities `x^(-s)` with `s < 1` converge
    /// geometrically in `levels` under this mesh.
    pub fn graded(order: usize, levels: usize, ratio: f64) -> Result<Self> {
        if order < 2 || !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Config(format!(
                "graded quadrature needs order >= 2 and ratio in (0, 1) (got {order}, {ratio})"
            )));
        }
        let (t, w) = gauss_legendre(order);
        let mut edges = vec![0.0];
        for k in (1..=levels).rev() {
            edges.push(0.5 * ratio.powi(k as i32));
        }
        edges.push(0.5);

        let mut lower = Vec::new();
        let mut lower_w = Vec::new();
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            for (ti, wi) in t.iter().zip(&w) {
                lower.push(lo + half * (1.0 + ti));
                lower_w.push(half * wi);
            }
        }
        let mut points = Vec::with_capacity(2 * lower.len());
        let mut weights = Vec::with_capacity(2 * lower.len());
        for (&x, &wx) in lower.iter().zip(&lower_w) {
            points.push(UnitPoint { x, xc: 1.0 - x });
            weights.push(wx);
        }
        for (&u, &wu) in lower.iter().zip(&lower_w).rev() {
            points.push(UnitPoint { x: 1.0 - u, xc: u });
            weights.push(wu);
        }
        Ok(QuadratureRule {
            points,
            weights,
            panels: 2 * (edges.len() - 1),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i f(x_i)`; fails on the first non-finite value.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        self.integrate_points(|p| f(p.x))
    }

    pub fn integrate_points<F: FnMut(UnitPoint) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = f(*p);
            if !v.is_finite() {
                return Err(Error::Integration { node: p.x, value: v });
            }
            sum += w * v;
        }
        Ok(sum)
    }
}

/// Free-function form of [`QuadratureRule::composite`].
pub fn make_rule(panels: usize, order: usize) -> Result<QuadratureRule> {
    QuadratureRule::composite(panels, order)
}

pub fn integrate_unit<F: FnMut(f64) -> f64>(f: F, rule: &QuadratureRule) -> Result<f64> {
    rule.integrate(f)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// ascending, found by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}
