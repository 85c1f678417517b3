use super::{norm_mass, norm_pdf};
use std::sync::OnceLock;

const GL_ORDER: usize = 16;
/// Beyond |u| = 9 the standard normal carries less than 1.2e-19 of mass.
const TAIL: f64 = 9.0;
/// Half-width of the transition zone of a normal-CDF step, in step scales.
const STEP_SPAN: f64 = 9.0;

struct Rule {
    nodes: [f64; GL_ORDER],
    weights: [f64; GL_ORDER],
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (n, w) = gauss_legendre(GL_ORDER);
        let mut rule = Rule { nodes: [0.0; GL_ORDER], weights: [0.0; GL_ORDER] };
        rule.nodes.copy_from_slice(&n);
        rule.weights.copy_from_slice(&w);
        rule
    })
}

fn composite<F: Fn(f64) -> f64>(a: f64, b: f64, panel: f64, f: &F) -> f64 {
    let rule = rule();
    let panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            s += w * f(mid + half * x);
        }
        total += s * half;
    }
    total
}

/// ∫_{-∞}^{upper} φ(u) g(u) du for a monotone step `g` with values in [0, 1].
///
/// `g` must be within 1e-18 of its limiting values outside
/// `center ± 9·scale`; `one_below` says whether the left limit is 1 (else 0).
/// Outside the transition zone the integral is taken in closed form; the
/// zone itself is integrated with composite Gauss–Legendre on panels no
/// wider than the smaller of the step scale and the normal scale.
pub(crate) fn gaussian_step_integral<G: Fn(f64) -> f64>(
    upper: f64,
    center: f64,
    scale: f64,
    one_below: bool,
    g: G,
) -> f64 {
    let lo = -TAIL;
    let hi = upper.min(TAIL);
    if hi <= lo {
        return 0.0;
    }
    let t_lo = center - STEP_SPAN * scale;
    let t_hi = center + STEP_SPAN * scale;
    let mut total = 0.0;
    if one_below {
        total += norm_mass(lo, hi.min(t_lo));
    } else {
        total += norm_mass(lo.max(t_hi), hi);
    }
    let (a, b) = (lo.max(t_lo), hi.min(t_hi));
    if b > a {
        let panel = scale.min(1.0);
        total += composite(a, b, panel, &|u| norm_pdf(u) * g(u));
    }
    total
}
