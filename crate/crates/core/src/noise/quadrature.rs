//! Gauss–Legendre quadrature with adaptive bisection and dyadic grading
//! toward integrable logarithmic endpoint singularities.

use std::sync::OnceLock;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are found by Newton's method from the Chebyshev-like
/// initial guess `cos(pi (i - 1/4) / (n + 1/2))`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
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
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| {
        let (n1, w1) = gauss_legendre(15);
        let (n2, w2) = gauss_legendre(30);
        (
            Rule {
                nodes: n1,
                weights: w1,
            },
            Rule {
                nodes: n2,
                weights: w2,
            },
        )
    })
}

fn apply(rule: &Rule, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// Adaptive Gauss–Legendre: a panel is accepted when the 15- and 30-point
/// rules agree to `tol` (absolute), otherwise it is bisected.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (lo, hi) = rules();
        let coarse = apply(lo, f, a, b);
        let fine = apply(hi, f, a, b);
        if !fine.is_finite() {
            return fine;
        }
        // below roundoff the two rules cannot agree any better
        let floor = 64.0 * f64::EPSILON * fine.abs();
        if (fine - coarse).abs() <= tol.max(floor) || depth >= 40 {
            return fine;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, tol, 0)
}

/// Integral over `[a, b]` of a function with an integrable singularity at
/// the endpoint `a` (when `toward_a`) or `b`. The interval is cut into
/// dyadic panels shrinking toward the singular endpoint; the last `2^-64`
/// fraction of the interval, and any panel too thin to resolve in floating
/// point, is dropped. Accuracy is best when the singular endpoint is `0`.
pub fn integrate_graded(f: &impl Fn(f64) -> f64, a: f64, b: f64, toward_a: bool, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let len = b - a;
    let panels = 64;
    let mut total = 0.0;
    let mut outer = 1.0;
    for _ in 0..panels {
        let inner = 0.5 * outer;
        let (p, q) = if toward_a {
            (a + len * inner, a + len * outer)
        } else {
            (b - len * outer, b - len * inner)
        };
        if p >= q || (q - p) <= 4.0 * f64::EPSILON * p.abs().max(q.abs()) {
            break;
        }
        total += integrate(f, p, q, tol / panels as f64);
        outer = inner;
    }
    total
}

/// Integral over `[a, b]` split at the interior `breaks` (kinks of `f`).
pub fn integrate_with_breaks(f: &impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);
    let pieces = (edges.len() - 1) as f64;
    edges
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], tol / pieces))
        .sum()
}
