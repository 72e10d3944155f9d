use serde::Serialize;

/// One named numerical check: worst residual against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check_name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(check_name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            max_residual,
            tolerance,
            // NaN residuals fail.
            pass: max_residual <= tolerance,
        }
    }

    /// A check whose outcome is decided elsewhere (e.g. exact comparisons).
    pub fn with_outcome(
        check_name: impl Into<String>,
        max_residual: f64,
        tolerance: f64,
        pass: bool,
    ) -> Self {
        Self {
            check_name: check_name.into(),
            max_residual,
            tolerance,
            pass,
        }
    }
}

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        assert!(!CheckRow::new("x", f64::NAN, 1.0).pass);
        assert!(CheckRow::new("x", 0.5, 1.0).pass);
        assert!(CheckRow::new("x", 0.0, 0.0).pass);
    }
}
