use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Element, Space};

/// A finite stretch of a bounded sequence. Indices from `tail_start` on stand
/// for the asymptotic regime.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Seq {
    elements: Vec<Element>,
    tail_start: usize,
}

impl Seq {
    pub fn new(elements: Vec<Element>, tail_start: usize) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidInput("empty sequence".into()))?;
        let space = *first.space();
        if elements.iter().any(|e| *e.space() != space) {
            return Err(Error::GeometryMismatch);
        }
        if tail_start >= elements.len() {
            return Err(Error::InsufficientTail(format!(
                "tail start {tail_start} leaves no elements out of {}",
                elements.len()
            )));
        }
        Ok(Seq {
            elements,
            tail_start,
        })
    }

    /// Sequence whose tail is its second half.
    pub fn with_half_tail(elements: Vec<Element>) -> Result<Self> {
        let n = elements.len();
        Seq::new(elements, n / 2)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn space(&self) -> &Space {
        self.elements[0].space()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    pub fn get(&self, k: usize) -> &Element {
        &self.elements[k]
    }

    pub fn tail_start(&self) -> usize {
        self.tail_start
    }

    pub fn tail(&self) -> &[Element] {
        &self.elements[self.tail_start..]
    }

    pub fn tail_len(&self) -> usize {
        self.len() - self.tail_start
    }

    pub fn with_tail_start(&self, tail_start: usize) -> Result<Self> {
        Seq::new(self.elements.clone(), tail_start)
    }

    pub fn norms(&self) -> Vec<f64> {
        self.elements.iter().map(Element::norm).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.elements.iter().map(Element::norm).fold(0.0, f64::max)
    }

    /// Largest norm over the tail (the finite stand-in for `limsup ‖x_k‖`).
    pub fn tail_sup_norm(&self) -> f64 {
        self.tail().iter().map(Element::norm).fold(0.0, f64::max)
    }

    /// Tail distances `‖x_k - x‖`.
    pub fn tail_distances(&self, x: &Element) -> Result<Vec<f64>> {
        self.tail().iter().map(|e| e.distance(x)).collect()
    }

    /// Smallest tail distance (the finite stand-in for `liminf ‖x_k - x‖`).
    pub fn tail_min_distance(&self, x: &Element) -> Result<f64> {
        Ok(self
            .tail_distances(x)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Sequence with `f` applied to every element.
    pub fn try_map(&self, f: impl Fn(&Element) -> Result<Element>) -> Result<Self> {
        let elements = self.elements.iter().map(f).collect::<Result<Vec<_>>>()?;
        Seq::new(elements, self.tail_start)
    }

    /// Like [`Seq::try_map`], with the index of each element.
    pub fn try_map_indexed(&self, f: impl Fn(usize, &Element) -> Result<Element>) -> Result<Self> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(k, x)| f(k, x))
            .collect::<Result<Vec<_>>>()?;
        Seq::new(elements, self.tail_start)
    }

    /// Elements at `indices`; the tail of the result is its second half.
    pub fn subsequence(&self, indices: &[usize]) -> Result<Self> {
        let elements = indices
            .iter()
            .map(|&i| {
                self.elements.get(i).cloned().ok_or_else(|| {
                    Error::InvalidInput(format!("index {i} out of range {}", self.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Seq::with_half_tail(elements)
    }
}

/// Statistics of the last and first quarter of a series, used to call a tail
/// trend decaying.
pub(crate) fn quarter_maxima(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let q = (n / 4).max(1);
    let first = values[..q].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let last = values[n - q..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (first, last)
}

/// A tail series decays if its last quarter is below `threshold` or has
/// shrunk below `ratio` times its first quarter.
pub(crate) fn decays(values: &[f64], threshold: f64, ratio: f64) -> bool {
    let (first, last) = quarter_maxima(values);
    last <= threshold || (first > 0.0 && last < ratio * first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_mixed() {
        assert!(Seq::new(vec![], 0).is_err());
        let a = Element::zeros(Space::sequence(2.0, 0, 1).unwrap(), 0).unwrap();
        let b = Element::zeros(Space::sequence(3.0, 0, 1).unwrap(), 0).unwrap();
        assert!(Seq::new(vec![a.clone(), b], 0).is_err());
        assert!(Seq::new(vec![a], 1).is_err());
    }

    #[test]
    fn decay_rule() {
        assert!(!decays(&[1.0, 0.9, 0.8, 0.5], 1e-3, 0.2));
        assert!(decays(&[1.0, 0.5, 0.2, 0.1], 1e-3, 0.2));
        assert!(decays(
            &[1.0, 0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.001],
            1e-3,
            0.2
        ));
        assert!(decays(&[0.0, 0.0, 0.0, 0.0], 1e-3, 0.2));
        assert!(!decays(&[1.0, 1.0, 1.0, 1.0], 1e-3, 0.2));
    }
}
