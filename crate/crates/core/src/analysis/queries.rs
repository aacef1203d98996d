//! Exploration queries over a dataset. Direction is ignored throughout:
//! "knowing" someone is symmetric.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{GraphDataset, Person};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown person {0:?}")]
    UnknownNode(String),
    #[error("common neighbours need two different persons, got {0:?} twice")]
    SamePerson(String),
}

/// Persons of maximum degree, canonical order. Empty for an empty dataset.
pub fn most_connected(dataset: &GraphDataset) -> Vec<String> {
    let deg = dataset.degrees();
    let Some(&max) = deg.iter().max() else {
        return Vec::new();
    };
    dataset
        .persons()
        .iter()
        .zip(&deg)
        .filter(|(_, &d)| d == max)
        .map(|(p, _)| p.id.clone())
        .collect()
}

/// Persons related to both `a` and `b`, excluding the two themselves, in
/// canonical order.
pub fn common_neighbors(dataset: &GraphDataset, a: &str, b: &str) -> Result<Vec<String>, QueryError> {
    let ia = dataset.index_of(a).ok_or_else(|| QueryError::UnknownNode(a.into()))?;
    let ib = dataset.index_of(b).ok_or_else(|| QueryError::UnknownNode(b.into()))?;
    if ia == ib {
        return Err(QueryError::SamePerson(a.into()));
    }
    let adj = dataset.adjacency();
    let na: BTreeSet<usize> = adj[ia].iter().map(|&(v, _)| v).collect();
    let nb: BTreeSet<usize> = adj[ib].iter().map(|&(v, _)| v).collect();
    Ok(na
        .intersection(&nb)
        .filter(|&&v| v != ia && v != ib)
        .map(|&v| dataset.persons()[v].id.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct YearSnapshot {
    pub year: i32,
    pub dataset: GraphDataset,
    /// Included persons whose inclusion rests on a missing birth or death year.
    pub undated_included: usize,
}

/// Whether `p` was alive in `year`; a missing date never excludes.
pub fn alive_in(p: &Person, year: i32) -> bool {
    p.birth_year.is_none_or(|b| b <= year) && p.death_year.is_none_or(|d| d >= year)
}

pub fn snapshot_at_year(dataset: &GraphDataset, year: i32) -> YearSnapshot {
    let sub = dataset.retain(|p| alive_in(p, year));
    let undated_included = sub
        .persons()
        .iter()
        .filter(|p| p.birth_year.is_none() || p.death_year.is_none())
        .count();
    YearSnapshot {
        year,
        dataset: sub,
        undated_included,
    }
}
