//! Jaccard and overlap indices over two or more sets.
//!
//! The k-set forms use the intersection and union of all k sets, and the
//! smallest cardinality for the overlap denominator.

use std::collections::BTreeSet;

use crate::model::{LinkSource, SimilarityReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCounts {
    pub cardinalities: Vec<usize>,
    pub intersection: usize,
    pub union: usize,
}

impl SetCounts {
    pub fn jaccard(&self) -> f64 {
        ratio(self.intersection, self.union)
    }

    pub fn overlap(&self) -> f64 {
        match self.cardinalities.iter().min() {
            Some(&m) if m > 0 => ratio(self.intersection, m),
            _ => 0.0,
        }
    }
}

/// `num / den`, or 0 when `den` is 0.
pub fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn set_counts<T: Ord>(sets: &[&BTreeSet<T>]) -> SetCounts {
    let cardinalities: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let Some(smallest) = sets.iter().min_by_key(|s| s.len()) else {
        return SetCounts {
            cardinalities,
            intersection: 0,
            union: 0,
        };
    };
    let intersection = smallest
        .iter()
        .filter(|x| sets.iter().all(|s| s.contains(x)))
        .count();
    let union = sets
        .iter()
        .flat_map(|s| s.iter())
        .collect::<BTreeSet<&T>>()
        .len();
    SetCounts {
        cardinalities,
        intersection,
        union,
    }
}

/// |∩| / |∪| over all given sets; 0 when the union is empty.
pub fn jaccard<T: Ord>(sets: &[&BTreeSet<T>]) -> f64 {
    set_counts(sets).jaccard()
}

/// |∩| / min |S|; 0 when any set is empty.
pub fn overlap<T: Ord>(sets: &[&BTreeSet<T>]) -> f64 {
    set_counts(sets).overlap()
}

pub fn report_from_counts(
    group_key: &str,
    labels: Vec<LinkSource>,
    counts: SetCounts,
) -> SimilarityReport {
    SimilarityReport {
        group_key: group_key.to_string(),
        sets_compared: labels,
        jaccard: counts.jaccard(),
        overlap: counts.overlap(),
        cardinalities: counts.cardinalities,
        intersection: counts.intersection,
        union_size: counts.union,
    }
}

pub fn report_for_sets<T: Ord>(
    group_key: &str,
    sets: &[(LinkSource, &BTreeSet<T>)],
) -> SimilarityReport {
    let refs: Vec<&BTreeSet<T>> = sets.iter().map(|(_, s)| *s).collect();
    report_from_counts(
        group_key,
        sets.iter().map(|(l, _)| *l).collect(),
        set_counts(&refs),
    )
}
