//! The quartic entropy kernel `ψ(x) = ¼‖x‖⁴ + ½‖x‖²`, its Bregman divergence
//! and the closed-form mirror step.

use crate::error::{check_len, Error, Result};
use crate::signal::{dot, norm_sq, sub, RealSignal};

/// `ψ(x) = ¼‖x‖⁴ + ½‖x‖²`
pub fn entropy_value(x: &[f64]) -> f64 {
    let s = norm_sq(x);
    0.25 * s * s + 0.5 * s
}

/// `∇ψ(x) = (‖x‖² + 1) x`
pub fn entropy_gradient(x: &[f64]) -> RealSignal {
    let scale = norm_sq(x) + 1.0;
    RealSignal::from_vec_unchecked(x.iter().map(|v| scale * v).collect())
}

/// Bregman divergence `D_φ(x, u) = φ(x) − φ(u) − ⟨∇φ(u), x − u⟩` of an
/// arbitrary differentiable kernel, evaluated from the definition.
pub fn bregman_divergence<V, G, Gv>(value: V, gradient: G, x: &[f64], u: &[f64]) -> Result<f64>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Gv,
    Gv: AsRef<[f64]>,
{
    check_len(x.len(), u.len())?;
    let g = gradient(u);
    let diff = sub(x, u);
    Ok(value(x) - value(u) - dot(g.as_ref(), &diff))
}

/// `D_ψ(x, u)` for the quartic kernel.
pub fn bregman_entropy(x: &[f64], u: &[f64]) -> Result<f64> {
    bregman_divergence(entropy_value, entropy_gradient, x, u)
}

/// Relative residual bound accepted for the cubic `c t³ + t − 1 = 0`.
pub const CUBIC_RESIDUAL_TOL: f64 = 1e-12;

/// Returns the unique positive root `t* ∈ (0, 1]` of `c t³ + t − 1 = 0`.
///
/// Newton's method on the convex increasing cubic, started to the right of
/// the root at `min(1, c^{-1/3})` so the iterates decrease monotonically; the
/// bracket `[lo, hi]` is kept as a bisection fallback.
pub fn solve_mirror_cubic(c: f64) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::NonFinite("cubic coefficient"));
    }
    if c < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cubic coefficient must be nonnegative, got {c}"
        )));
    }
    if c == 0.0 {
        return Ok(1.0);
    }
    let h = |t: f64| (c * t * t + 1.0) * t - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut t = c.cbrt().recip().min(1.0);
    for _ in 0..200 {
        let r = h(t);
        if r == 0.0 {
            return Ok(t);
        }
        if r > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        let mut next = t - r / (3.0 * c * t * t + 1.0);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 2.0 * f64::EPSILON * t {
            t = next;
            break;
        }
        t = next;
    }
    debug_assert!(h(t).abs() <= CUBIC_RESIDUAL_TOL * c.max(1.0));
    Ok(t)
}

/// Outcome of one mirror step.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorStepResult {
    pub next_point: RealSignal,
    /// Root of `t³‖p‖² + t − 1 = 0`.
    pub t_star: f64,
    /// `‖p_γ(x)‖²` with `p_γ(x) = ∇ψ(x) − γ grad`.
    pub p_norm_sq: f64,
}

/// Mirror step `x⁺ = ∇ψ*(∇ψ(x) − γ grad)`, computed as `x⁺ = t* p_γ(x)`.
///
/// `gamma = 0` is accepted and returns `x` itself (up to rounding).
pub fn mirror_step(x: &[f64], grad: &[f64], gamma: f64) -> Result<MirrorStepResult> {
    check_len(x.len(), grad.len())?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step size must be finite and nonnegative, got {gamma}"
        )));
    }
    let scale = norm_sq(x) + 1.0;
    let p: Vec<f64> = x
        .iter()
        .zip(grad)
        .map(|(xi, gi)| scale * xi - gamma * gi)
        .collect();
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("mirror step"));
    }
    let p_norm_sq = norm_sq(&p);
    let t_star = solve_mirror_cubic(p_norm_sq)?;
    let next = p.into_iter().map(|v| t_star * v).collect();
    Ok(MirrorStepResult {
        next_point: RealSignal::from_vec_unchecked(next),
        t_star,
        p_norm_sq,
    })
}
