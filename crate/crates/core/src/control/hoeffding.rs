use crate::error::{Error, Result};

/// `2·exp(−2ε²M)`: Hoeffding's tail bound for the mean of `M` independent
/// outcomes confined to an interval of unit width. A ⟨Z⟩ estimate built from
/// ±1 outcomes spans width 2, so its deviation `ε` corresponds to
/// `hoeffding_shot_bound(ε / 2, M)`.
pub fn hoeffding_shot_bound(epsilon: f64, shots: u64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Precondition(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    if shots == 0 {
        return Err(Error::Precondition("shots must be at least 1".into()));
    }
    Ok(2.0 * (-2.0 * epsilon * epsilon * shots as f64).exp())
}
