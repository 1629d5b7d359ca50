use serde::{Deserialize, Serialize};

/// One verified inequality: `lower <= actual <= upper`, with either side
/// optional. `margin` is the signed distance to the nearest violated side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub actual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        actual: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> Self {
        let margin = match (lower, upper) {
            (Some(l), Some(u)) => (actual - l).min(u - actual),
            (Some(l), None) => actual - l,
            (None, Some(u)) => u - actual,
            (None, None) => 0.0,
        };
        let mut c = Self {
            name: name.into(),
            actual,
            lower,
            upper,
            margin,
            pass: false,
        };
        c.pass = c.holds();
        c
    }

    pub fn at_most(name: impl Into<String>, actual: f64, upper: f64) -> Self {
        Self::new(name, actual, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, actual: f64, lower: f64) -> Self {
        Self::new(name, actual, Some(lower), None)
    }

    pub fn within(name: impl Into<String>, actual: f64, lower: f64, upper: f64) -> Self {
        Self::new(name, actual, Some(lower), Some(upper))
    }

    /// Recomputes the inequality from the stored numbers.
    pub fn holds(&self) -> bool {
        !self.actual.is_nan()
            && self.lower.is_none_or(|l| self.actual >= l)
            && self.upper.is_none_or(|u| self.actual <= u)
    }

    /// The stored pass flag agrees with the stored numbers.
    pub fn is_consistent(&self) -> bool {
        self.pass == self.holds()
    }
}
