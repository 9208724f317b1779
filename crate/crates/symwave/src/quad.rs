//! Panel based Gauss-Legendre quadrature on `[0, inf)`.
//!
//! The moment integrands handled here are smooth, strictly positive and
//! decay like `exp(-l s^2)` with polynomial factors, so a fixed high order
//! rule applied panel by panel converges to machine precision long before
//! adaptivity would pay off. Integration stops once two consecutive panels
//! contribute a negligible fraction of the running total.

/// Number of nodes per panel.
pub const PANEL_ORDER: usize = 32;

/// Width of each panel on the half line.
pub const PANEL_WIDTH: f64 = 0.25;

/// Consecutive negligible panels required before stopping.
const STOP_RUN: usize = 2;

/// Hard cap on the number of panels (integration range `[0, 256]`).
const MAX_PANELS: usize = 1024;

/// Nodes and weights of the order `PANEL_ORDER` Gauss-Legendre rule on
/// `[0, 1]`, computed once by Newton iteration on the Legendre polynomial.
pub fn unit_rule() -> &'static ([f64; PANEL_ORDER], [f64; PANEL_ORDER]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<([f64; PANEL_ORDER], [f64; PANEL_ORDER])> = OnceLock::new();
    RULE.get_or_init(compute_unit_rule)
}

/// Legendre polynomial `P_n(x)` and its derivative by the three term
/// recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_unit_rule() -> ([f64; PANEL_ORDER], [f64; PANEL_ORDER]) {
    let n = PANEL_ORDER;
    let mut nodes = [0.0; PANEL_ORDER];
    let mut weights = [0.0; PANEL_ORDER];
    for i in 0..n {
        // Chebyshev style initial guess for the i-th root of P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1, 1] to [0, 1]; roots come out in descending order.
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Integrates `f` over `[0, inf)`, panel by panel, stopping after
/// `STOP_RUN` consecutive panels contribute less than `rel_floor` of the
/// accumulated total in absolute value.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, rel_floor: f64) -> f64 {
    let (nodes, weights) = unit_rule();
    let mut total = 0.0;
    let mut negligible_run = 0;
    for panel in 0..MAX_PANELS {
        let left = panel as f64 * PANEL_WIDTH;
        let mut panel_sum = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            panel_sum += w * f(left + PANEL_WIDTH * x);
        }
        panel_sum *= PANEL_WIDTH;
        total += panel_sum;
        let scale = total.abs().max(f64::MIN_POSITIVE);
        if panel_sum.abs() <= rel_floor * scale {
            negligible_run += 1;
            if negligible_run >= STOP_RUN {
                break;
            }
        } else {
            negligible_run = 0;
        }
    }
    total
}

/// Integrates a family of integrands sharing the envelope `env` over
/// `[0, inf)` in one sweep.
///
/// `eval(s, out)` must fill `out` with the integrand values at `s`. Panel
/// truncation is decided on `env` alone, which must dominate every stream
/// up to a constant factor; the individual streams then inherit its
/// accuracy.
pub fn integrate_half_line_batch<E, F>(n_streams: usize, mut env: E, mut eval: F, rel_floor: f64) -> Vec<f64>
where
    E: FnMut(f64) -> f64,
    F: FnMut(f64, &mut [f64]),
{
    let (nodes, weights) = unit_rule();
    let mut totals = vec![0.0; n_streams];
    let mut values = vec![0.0; n_streams];
    let mut env_total = 0.0;
    let mut negligible_run = 0;
    for panel in 0..MAX_PANELS {
        let left = panel as f64 * PANEL_WIDTH;
        let mut env_panel = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let s = left + PANEL_WIDTH * x;
            env_panel += w * env(s);
            eval(s, &mut values);
            for (tot, v) in totals.iter_mut().zip(values.iter()) {
                *tot += w * PANEL_WIDTH * v;
            }
        }
        env_panel *= PANEL_WIDTH;
        env_total += env_panel;
        let scale = env_total.abs().max(f64::MIN_POSITIVE);
        if env_panel.abs() <= rel_floor * scale {
            negligible_run += 1;
            if negligible_run >= STOP_RUN {
                break;
            }
        } else {
            negligible_run = 0;
        }
    }
    totals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rule_matches_reference_values() {
        let (nodes, weights) = unit_rule();
        // End nodes and weights of the 32 point rule mapped to [0, 1].
        assert!((nodes[0] - 0.0013680690752592).abs() < 1e-13);
        assert!((weights[0] - 0.0035093050047350).abs() < 1e-13);
        assert!((nodes[31] - 0.9986319309247408).abs() < 1e-13);
        let wsum: f64 = weights.iter().sum();
        assert!((wsum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral_on_half_line() {
        let value = integrate_half_line(|s| (-s * s).exp(), 1e-18);
        let exact = 0.5 * std::f64::consts::PI.sqrt();
        assert!((value - exact).abs() < 1e-14);
    }
}
