use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Feature-subset encoding: gene `j` is `true` when feature `j` is selected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome(Vec<bool>);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid bitstring `{0}`")]
pub struct ParseChromosomeError(pub String);

impl Chromosome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// Genes set where `position[j] >= 0.5`.
    pub fn from_position(position: &[f64]) -> Self {
        Self(position.iter().map(|&p| p >= 0.5).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j)
    }

    /// 0/1 column multipliers for the classifier.
    pub fn to_multipliers(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// The bitstring read as a big-endian binary integer (gene 0 is the most
    /// significant bit). `None` above 128 genes.
    pub fn decode(&self) -> Option<u128> {
        (self.0.len() <= 128).then(|| self.0.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128))
    }

    pub fn hamming(&self, other: &Chromosome) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Chromosome {
    type Err = ParseChromosomeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseChromosomeError(s.to_string()));
        }
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(ParseChromosomeError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Chromosome)
    }
}
