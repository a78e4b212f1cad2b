//! Gauss-Legendre quadrature rules and tensor-product grids.

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Computed by Newton iteration on the Legendre recurrence; accurate to
/// machine precision for the orders used here (m <= 200).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "quadrature order must be at least 1");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess for the i-th root (descending).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_m(x) and its derivative by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=m {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
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

/// Gauss-Legendre rule scaled to `[a, b]`.
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(m);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (
        xs.iter().map(|x| c + h * x).collect(),
        ws.iter().map(|w| h * w).collect(),
    )
}

/// Integrate `f` over `[a, b]` with an `m`-point rule.
pub fn integrate_1d(m: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (xs, ws) = gauss_legendre_on(m, a, b);
    xs.iter().zip(&ws).map(|(&x, &w)| w * f(x)).sum()
}

/// Tensor-product Gauss-Legendre grid over the cube `[-r, r]^dim`.
///
/// Nodes are visited in row-major multi-index order, which fixes the
/// deterministic reduction order used by the valuation engine.
pub struct TensorGrid {
    pub dim: usize,
    pub order: usize,
    nodes_1d: Vec<f64>,
    weights_1d: Vec<f64>,
}

impl TensorGrid {
    pub fn new(dim: usize, order: usize, r: f64) -> Self {
        let (nodes_1d, weights_1d) = gauss_legendre_on(order, -r, r);
        TensorGrid {
            dim,
            order,
            nodes_1d,
            weights_1d,
        }
    }

    pub fn len(&self) -> usize {
        self.order.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fill `point` with the coordinates of node `index` and return its weight.
    pub fn node(&self, index: usize, point: &mut [f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        let mut rest = index;
        let mut w = 1.0;
        for d in (0..self.dim).rev() {
            let i = rest % self.order;
            rest /= self.order;
            point[d] = self.nodes_1d[i];
            w *= self.weights_1d[i];
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // m-point rule is exact up to degree 2m-1.
        let val = integrate_1d(6, -1.0, 2.0, |x| x.powi(11) - 3.0 * x.powi(4) + 1.0);
        let exact = (2.0f64.powi(12) - 1.0) / 12.0 - 3.0 * (2.0f64.powi(5) + 1.0) / 5.0 + 3.0;
        assert!((val - exact).abs() < 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn tensor_grid_volume() {
        let grid = TensorGrid::new(3, 4, 1.5);
        let mut p = [0.0; 3];
        let total: f64 = (0..grid.len()).map(|i| grid.node(i, &mut p)).sum();
        assert!((total - 27.0).abs() < 1e-12);
    }

    #[test]
    fn high_order_smooth_integral() {
        let val = integrate_1d(24, 0.0, 1.0, |x| (-x * x).exp());
        assert!((val - 0.7468241328124271).abs() < 1e-14);
    }
}
