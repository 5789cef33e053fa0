use crate::real::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence in the working precision.
pub fn gauss_legendre<T: Real>(points: usize) -> (Vec<T>, Vec<T>) {
    assert!(points > 0);
    let m = points;
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    let eps = T::epsilon() * T::of(4.0);
    for i in 0..m.div_ceil(2) {
        let mut x = T::of((std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos());
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= eps {
                let (_, d) = legendre(m, x);
                dp = d;
                break;
            }
        }
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = T::zero();
    }
    (nodes, weights)
}

fn legendre<T: Real>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for j in 2..=m {
        let jf = T::of_usize(j);
        let p2 = ((T::of_usize(2 * j - 1)) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (T::one(), T::zero());
    }
    let d = T::of_usize(m) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Per-interval Gauss–Legendre rule over a set of breakpoints.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    pub points_per_interval: usize,
    /// `nodes[interval * points + q]`
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn new(breakpoints: &[T], points: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(points);
        let mut nodes = Vec::with_capacity(points * (breakpoints.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for iv in breakpoints.windows(2) {
            let half = (iv[1] - iv[0]) / T::of(2.0);
            let mid = (iv[1] + iv[0]) / T::of(2.0);
            for q in 0..points {
                nodes.push(mid + half * x[q]);
                weights.push(half * w[q]);
            }
        }
        Self { points_per_interval: points, nodes, weights }
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() / self.points_per_interval
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
