use super::LossError;

/// Central differences at two step sizes and their relative disagreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradReport {
    pub fd_h: f64,
    pub fd_half_h: f64,
    pub relative_gap: f64,
}

const TINY: f64 = 1e-300;

/// Evaluates `f` at `p ± h` and `p ± h/2`. A small `relative_gap` means the
/// derivative estimate has converged; a large one flags a kink or
/// discontinuity inside `[p - h, p + h]`.
pub fn grad_consistency_check<F, E>(f: F, p: f64, h: f64) -> Result<GradReport, LossError>
where
    F: Fn(f64) -> Result<f64, E>,
    E: std::fmt::Display,
{
    if !(h.is_finite() && h > 0.0 && p.is_finite()) {
        return Err(LossError::EvaluationFailed(format!("bad point {p} or step {h}")));
    }
    let eval = |x: f64| -> Result<f64, LossError> {
        let y = f(x).map_err(|e| LossError::EvaluationFailed(format!("at {x}: {e}")))?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(LossError::EvaluationFailed(format!("non-finite value {y} at {x}")))
        }
    };
    let fd_h = (eval(p + h)? - eval(p - h)?) / (2.0 * h);
    let fd_half_h = (eval(p + h / 2.0)? - eval(p - h / 2.0)?) / h;
    let relative_gap = (fd_h - fd_half_h).abs() / fd_half_h.abs().max(TINY);
    Ok(GradReport { fd_h, fd_half_h, relative_gap })
}
