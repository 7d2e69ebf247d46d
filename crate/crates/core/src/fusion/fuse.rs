use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::moo::ParetoFront;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    /// Selected features enter the classifier unscaled.
    Vote,
    /// Selected feature columns are scaled by `votes / max_votes`.
    Weight,
}

impl FusionMode {
    pub fn name(&self) -> &'static str {
        match self {
            FusionMode::Vote => "vote",
            FusionMode::Weight => "weight",
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMode {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vote" => Ok(FusionMode::Vote),
            "weight" => Ok(FusionMode::Weight),
            _ => Err(FusionError::Unknown {
                kind: "fusion mode",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedEntry {
    pub feature: usize,
    pub votes: usize,
    /// `votes / max_votes`.
    pub weight: f64,
}

/// Features ordered by votes (descending, ties by index), zero-vote features
/// removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedRanking {
    pub mode: FusionMode,
    pub n_features: usize,
    pub entries: Vec<FusedEntry>,
}

impl FusedRanking {
    pub fn features(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.feature).collect()
    }

    /// `(feature, column multiplier)` in rank order.
    pub fn weighted_order(&self) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .map(|e| {
                let m = match self.mode {
                    FusionMode::Vote => 1.0,
                    FusionMode::Weight => e.weight,
                };
                (e.feature, m)
            })
            .collect()
    }

    /// Writes `feature,votes,weight,rank` rows (rank is 1-based).
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature", "votes", "weight", "rank"])?;
        for (i, e) in self.entries.iter().enumerate() {
            w.write_record([
                e.feature.to_string(),
                e.votes.to_string(),
                e.weight.to_string(),
                (i + 1).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Counts, per feature, the front members that select it.
pub fn fuse(fronts: &[ParetoFront], mode: FusionMode) -> Result<FusedRanking, FusionError> {
    let mut n_features: Option<usize> = None;
    let mut votes: Vec<usize> = Vec::new();
    for member in fronts.iter().flat_map(|f| &f.members) {
        let len = member.chromosome.len();
        match n_features {
            None => {
                n_features = Some(len);
                votes = vec![0; len];
            }
            Some(n) if n != len => return Err(FusionError::LengthMismatch(n, len)),
            Some(_) => {}
        }
        for j in member.chromosome.selected() {
            votes[j] += 1;
        }
    }
    let n_features = n_features.ok_or(FusionError::EmptyInput)?;
    let max_votes = votes.iter().copied().max().unwrap_or(0);
    if max_votes == 0 {
        return Err(FusionError::EmptyInput);
    }
    let mut entries: Vec<FusedEntry> = votes
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(feature, &v)| FusedEntry {
            feature,
            votes: v,
            weight: v as f64 / max_votes as f64,
        })
        .collect();
    entries.sort_by(|a, b| b.votes.cmp(&a.votes).then(a.feature.cmp(&b.feature)));
    Ok(FusedRanking {
        mode,
        n_features,
        entries,
    })
}

pub fn vote_fuse(fronts: &[ParetoFront]) -> Result<FusedRanking, FusionError> {
    fuse(fronts, FusionMode::Vote)
}

pub fn weight_fuse(fronts: &[ParetoFront]) -> Result<FusedRanking, FusionError> {
    fuse(fronts, FusionMode::Weight)
}
