//! Derivative-free scalar search: grid bracketing, golden-section
//! maximization, parabolic polishing, and bisection root-finding.

/// 1/phi
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    /// The best grid point sat on an end of the search interval.
    pub at_boundary: bool,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Maximum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 500 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    Maximum {
        x,
        fx,
        iterations,
        at_boundary: false,
    }
}

/// Scan `n_grid` log-spaced points on `[lo, hi]` (requires `0 < lo < hi`),
/// then refine around the best one by golden section.
pub fn maximize_bracketed<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n_grid: usize, tol: f64) -> Maximum {
    assert!(0.0 < lo && lo < hi, "need 0 < lo < hi");
    let n = n_grid.max(3);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (ratio * i as f64).exp() })
        .collect();
    let (best, _) = grid
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, fx)| if fx > acc.1 { (i, fx) } else { acc });
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n - 1)];
    let mut m = golden_section_max(&f, a, b, tol);
    m.at_boundary = best == 0 || best == n - 1;
    if !m.at_boundary {
        for rel in [1e-4, 1e-5] {
            m.x = parabolic_step(&f, m.x, rel * m.x, a, b);
        }
        m.fx = f(m.x);
    }
    m
}

/// Vertex of the parabola through `f` at `x - h, x, x + h`, kept inside
/// `[a, b]`.
///
/// Golden section alone stalls near `sqrt(f64::EPSILON)` relative accuracy
/// because `f` is flat at the peak. The wide stencil here divides the rounding
/// noise by `h`, so one or two steps reach far below that floor.
pub fn parabolic_step<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, a: f64, b: f64) -> f64 {
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    let curvature = fp - 2.0 * f0 + fm;
    if !(curvature < 0.0) {
        return x;
    }
    let step = 0.5 * h * (fp - fm) / curvature;
    if step.abs() > h {
        return x;
    }
    (x - step).clamp(a, b)
}

/// Bisection for a sign change of `f` on `[a, b]`; `None` if the endpoints
/// do not bracket a root.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let m = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!(m.iterations > 10);
    }

    #[test]
    fn bracketing_handles_narrow_peaks() {
        // peak far smaller than the interval width
        let m = maximize_bracketed(|x| -(x.ln() - 0.002f64.ln()).powi(2), 1e-4, 0.5, 200, 1e-13);
        assert!((m.x - 0.002).abs() < 1e-9);
        assert!(!m.at_boundary);
    }

    #[test]
    fn boundary_optimum_is_reported() {
        let m = maximize_bracketed(|x| -x, 1e-4, 0.5, 50, 1e-12);
        assert!(m.at_boundary);
        assert!(m.x < 2e-4);
    }

    #[test]
    fn parabolic_step_is_exact_on_parabolas() {
        let x = parabolic_step(|x| -(x - 0.3).powi(2), 0.3001, 1e-3, 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-14);
        // convex stencil leaves the point alone
        assert_eq!(parabolic_step(|x| x * x, 0.3, 1e-3, 0.0, 1.0), 0.3);
    }

    #[test]
    fn polished_peak_beats_golden_floor() {
        let f = |u: f64| -0.75 * u - 0.72 * 0.0016 / u;
        let exact = (0.72f64 * 0.0016 / 0.75).sqrt();
        let m = maximize_bracketed(f, 1e-4, 0.5, 400, 1e-12);
        assert!((m.x - exact).abs() / exact < 1e-10, "{}", (m.x - exact).abs() / exact);
    }

    #[test]
    fn bisection() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        assert!(bisect_root(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_none());
    }
}
