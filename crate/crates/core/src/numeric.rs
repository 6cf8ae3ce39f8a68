//! Small numerical kernels shared across the crate: composite-trapezoid
//! quadrature, finite-difference rates, and a scalar tridiagonal solver.

/// Composite trapezoid rule for `f(0), f(1), ..., f(n_nodes - 1)` sampled on a
/// uniform grid with step `h`.
///
/// Returns `0.0` for fewer than two nodes.
pub fn trapezoid_of(n_nodes: usize, h: f64, f: impl Fn(usize) -> f64) -> f64 {
    if n_nodes < 2 {
        return 0.0;
    }
    let mut sum = 0.5 * (f(0) + f(n_nodes - 1));
    for i in 1..n_nodes - 1 {
        sum += f(i);
    }
    sum * h
}

/// Composite trapezoid rule over sampled values.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    trapezoid_of(values.len(), h, |i| values[i])
}

/// Running trapezoid integral: `out[i] = ∫_0^{t_i} f` with `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trading rates from inventories: forward difference at every node, with the
/// final node carrying the backward difference (which equals the last forward
/// difference), so the output has the same length as the input.
pub fn forward_rates(inventory: &[f64], h: f64) -> Vec<f64> {
    let n = inventory.len();
    assert!(n >= 2, "need at least two nodes to difference");
    let mut v = Vec::with_capacity(n);
    for i in 0..n - 1 {
        v.push((inventory[i + 1] - inventory[i]) / h);
    }
    v.push(v[n - 2]);
    v
}

/// Thomas elimination for a scalar tridiagonal system.
///
/// `sub` and `sup` have length `n - 1`, `diag` and `rhs` length `n`.
/// Returns `None` when a pivot collapses below `1e-14` times the row scale
/// (the caller decides which error that maps to).
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    assert_eq!(sub.len(), n - 1, "subdiagonal length");
    assert_eq!(sup.len(), n - 1, "superdiagonal length");
    assert_eq!(rhs.len(), n, "right-hand side length");

    let mut c = vec![0.0; n - 1]; // modified superdiagonal
    let mut d = vec![0.0; n]; // modified rhs
    let scale = diag.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);

    let mut piv = diag[0];
    if piv.abs() <= 1e-14 * scale {
        return None;
    }
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if piv.abs() <= 1e-14 * scale {
            return None;
        }
        if i < n - 1 {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}
