//! Small dense-vector helpers over `f64` slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// Scales `v` in place onto the ball of radius `bound` if it lies outside.
/// Returns `true` when the vector was scaled.
#[inline]
pub fn project_ball(v: &mut [f64], bound: f64) -> bool {
    let n = norm(v);
    if n > bound {
        let s = bound / n;
        v.iter_mut().for_each(|x| *x *= s);
        true
    } else {
        false
    }
}

/// Adjoint of the radial ball projection: given `pre` (the unprojected input)
/// and an upstream gradient `g`, overwrite `g` with `J(pre)^T g`.
#[inline]
pub fn project_ball_adjoint(pre: &[f64], bound: f64, g: &mut [f64]) {
    let n = norm(pre);
    if n > bound {
        // J = (bound / n) (I - u u^T), u = pre / n; J is symmetric.
        let gu = dot(g, pre) / n;
        let s = bound / n;
        for (gk, pk) in g.iter_mut().zip(pre) {
            *gk = s * (*gk - gu * pk / n);
        }
    }
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yk, xk) in y.iter_mut().zip(x) {
        *yk += alpha * xk;
    }
}
