use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing set of 1-based site labels inside a declared
/// universe. Complements are taken within the universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSubset {
    elements: Vec<usize>,
    universe: Vec<usize>,
}

impl IndexSubset {
    pub fn new(elements: Vec<usize>, universe: Vec<usize>) -> Result<Self> {
        if !universe.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSubset(format!(
                "universe {universe:?} is not strictly increasing"
            )));
        }
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSubset(format!("{elements:?} is not strictly increasing")));
        }
        if let Some(e) = elements.iter().find(|e| universe.binary_search(e).is_err()) {
            return Err(Error::InvalidSubset(format!("{e} is not in the universe {universe:?}")));
        }
        Ok(Self { elements, universe })
    }

    /// A set that is its own universe.
    pub fn full(universe: Vec<usize>) -> Result<Self> {
        Self::new(universe.clone(), universe)
    }

    /// `{lo, ..., hi}` as its own universe.
    pub fn range(lo: usize, hi: usize) -> Self {
        let v: Vec<usize> = (lo..=hi).collect();
        Self {
            elements: v.clone(),
            universe: v,
        }
    }

    pub fn empty() -> Self {
        Self {
            elements: Vec::new(),
            universe: Vec::new(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.elements.binary_search(&site).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.elements.iter().copied()
    }

    pub fn complement(&self) -> Self {
        let elements = self.universe.iter().copied().filter(|s| !self.contains(*s)).collect();
        Self {
            elements,
            universe: self.universe.clone(),
        }
    }

    /// Union, with the union of both universes.
    pub fn union(&self, other: &Self) -> Self {
        let merge = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().sorted().dedup().collect() };
        Self {
            elements: merge(&self.elements, &other.elements),
            universe: merge(&self.universe, &other.universe),
        }
    }

    /// The set without `site`; the universe is kept.
    pub fn without(&self, site: usize) -> Self {
        Self {
            elements: self.elements.iter().copied().filter(|&s| s != site).collect(),
            universe: self.universe.clone(),
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.elements.iter().any(|s| other.contains(*s))
    }

    /// All `k`-element subsets of `universe`, in lexicographic order.
    pub fn subsets_of_size(universe: &[usize], k: usize) -> Vec<Self> {
        universe
            .iter()
            .copied()
            .combinations(k)
            .map(|elements| Self {
                elements,
                universe: universe.to_vec(),
            })
            .collect()
    }
}

pub(crate) fn ensure_disjoint(sets: &[&IndexSubset]) -> Result<()> {
    for (x, y) in sets.iter().tuple_combinations() {
        if let Some(s) = x.iter().find(|s| y.contains(*s)) {
            return Err(Error::Overlap(s));
        }
    }
    Ok(())
}

/// Coordinates `z_1, ..., z_S` of the sites. For the `2N`-site identities
/// `z_i = x_i` for `i ≤ N` and `z_i = y_{i−N}` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteAssignment {
    coords: Vec<Complex64>,
}

impl SiteAssignment {
    pub fn from_points(zs: Vec<Complex64>) -> Self {
        Self { coords: zs }
    }

    pub fn from_xy(xs: &[Complex64], ys: &[Complex64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        Ok(Self {
            coords: xs.iter().chain(ys).copied().collect(),
        })
    }

    pub fn sites(&self) -> usize {
        self.coords.len()
    }

    /// `N` for a `2N`-site assignment.
    pub fn half(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn z(&self, site: usize) -> Result<Complex64> {
        site.checked_sub(1)
            .and_then(|i| self.coords.get(i))
            .copied()
            .ok_or(Error::SiteOutOfRange {
                site,
                sites: self.coords.len(),
            })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn xs(&self) -> &[Complex64] {
        &self.coords[..self.half()]
    }

    pub fn ys(&self) -> &[Complex64] {
        &self.coords[self.half()..]
    }

    pub fn with_coord(&self, site: usize, value: Complex64) -> Result<Self> {
        self.z(site)?;
        let mut coords = self.coords.clone();
        coords[site - 1] = value;
        Ok(Self { coords })
    }

    /// `𝒩₁ = {1..N}`.
    pub fn n1(&self) -> Vec<usize> {
        (1..=self.half()).collect()
    }

    /// `𝒩₂ = {N+1..2N}`.
    pub fn n2(&self) -> Vec<usize> {
        (self.half() + 1..=2 * self.half()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_within_universe() {
        let i = IndexSubset::new(vec![4, 6], vec![4, 5, 6]).unwrap();
        assert_eq!(i.complement().elements(), &[5]);
        assert_eq!(i.complement().complement(), i);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(IndexSubset::new(vec![2, 1], vec![1, 2]).is_err());
        assert!(IndexSubset::new(vec![1, 1], vec![1, 2]).is_err());
        assert!(IndexSubset::new(vec![3], vec![1, 2]).is_err());
    }

    #[test]
    fn subsets_enumeration() {
        let all = IndexSubset::subsets_of_size(&[1, 2, 3], 2);
        let got: Vec<_> = all.iter().map(|s| s.elements().to_vec()).collect();
        assert_eq!(got, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(IndexSubset::subsets_of_size(&[1, 2], 0).len(), 1);
    }

    #[test]
    fn overlap_detected() {
        let a = IndexSubset::full(vec![1, 2]).unwrap();
        let b = IndexSubset::full(vec![2, 3]).unwrap();
        assert!(matches!(ensure_disjoint(&[&a, &b]), Err(Error::Overlap(2))));
    }

    #[test]
    fn site_assignment_layout() {
        let one = Complex64::new(1.0, 0.0);
        let sa = SiteAssignment::from_xy(&[one, 2.0 * one], &[3.0 * one, 4.0 * one]).unwrap();
        assert_eq!(sa.z(3).unwrap(), 3.0 * one);
        assert_eq!(sa.n2(), vec![3, 4]);
        assert!(sa.z(0).is_err() && sa.z(5).is_err());
        assert!(SiteAssignment::from_xy(&[one], &[]).is_err());
    }
}
