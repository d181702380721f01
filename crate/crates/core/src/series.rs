use serde::Serialize;

use crate::{Error, Result};

/// Ordered `(n, value)` samples with a label, ready for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    label: String,
    points: Vec<(f64, f64)>,
}

impl CurveSeries {
    pub fn new(label: impl Into<String>) -> Self {
        CurveSeries {
            label: label.into(),
            points: Vec::new(),
        }
    }

    /// Appends a sample. `n` must exceed the previous abscissa and `value`
    /// must be finite.
    pub fn push(&mut self, n: f64, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid("series value", format!("{value} at n = {n}")));
        }
        if let Some(&(last, _)) = self.points.last() {
            if !(n > last) {
                return Err(Error::invalid(
                    "series abscissa",
                    format!("{n} does not follow {last}"),
                ));
            }
        }
        self.points.push((n, value));
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }

    pub fn value_at(&self, n: f64) -> Option<f64> {
        self.points.iter().find(|&&(x, _)| x == n).map(|&(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing_abscissa() {
        let mut s = CurveSeries::new("s");
        s.push(1.0, 0.5).unwrap();
        assert!(s.push(1.0, 0.4).is_err());
        assert!(s.push(0.5, 0.4).is_err());
        assert!(s.push(2.0, f64::NAN).is_err());
        s.push(2.0, 0.4).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.value_at(2.0), Some(0.4));
    }
}
