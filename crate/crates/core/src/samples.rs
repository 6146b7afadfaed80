//! Multisets of sampled bitstrings shared by every sampler.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qubo::{energy_unchecked, Qubo};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleEntry {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub count: u64,
}

/// Distinct bitstrings with their energies and occurrence counts.
///
/// Entries are sorted by energy, ties by bit vector, so the merge order of
/// the reads never shows up in the result.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub entries: Vec<SampleEntry>,
    pub total_reads: u64,
    pub sampler_tag: String,
    pub seed: u64,
}

impl SampleSet {
    /// Groups raw reads and evaluates each distinct bitstring on `q`.
    ///
    /// Panics if a read's length differs from the QUBO's variable count.
    pub fn from_reads(
        q: &Qubo,
        reads: impl IntoIterator<Item = Vec<bool>>,
        sampler_tag: impl Into<String>,
        seed: u64,
    ) -> Self {
        let mut counts: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
        for bits in reads {
            assert_eq!(bits.len(), q.num_vars(), "sample length");
            *counts.entry(bits).or_insert(0) += 1;
        }
        Self::from_counts(q, counts, sampler_tag, seed)
    }

    pub fn from_counts(
        q: &Qubo,
        counts: BTreeMap<Vec<bool>, u64>,
        sampler_tag: impl Into<String>,
        seed: u64,
    ) -> Self {
        let mut entries: Vec<SampleEntry> = counts
            .into_iter()
            .map(|(bits, count)| SampleEntry { energy: energy_unchecked(q, &bits), bits, count })
            .collect();
        entries.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)));
        Self {
            total_reads: entries.iter().map(|e| e.count).sum(),
            entries,
            sampler_tag: sampler_tag.into(),
            seed,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lowest-energy entry.
    pub fn best(&self) -> Option<&SampleEntry> {
        self.entries.first()
    }

    /// Count-weighted mean energy.
    pub fn mean_energy(&self) -> f64 {
        if self.total_reads == 0 {
            return f64::NAN;
        }
        self.entries.iter().map(|e| e.energy * e.count as f64).sum::<f64>() / self.total_reads as f64
    }

    pub fn to_export(&self) -> SampleSetExport {
        SampleSetExport {
            sampler: self.sampler_tag.clone(),
            seed: self.seed,
            reads: self.total_reads,
            entries: self
                .entries
                .iter()
                .map(|e| EntryExport { bits: bits_to_string(&e.bits), energy: e.energy, count: e.count })
                .collect(),
        }
    }
}

/// JSON shape of a [`SampleSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSetExport {
    pub sampler: String,
    pub seed: u64,
    pub reads: u64,
    pub entries: Vec<EntryExport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryExport {
    pub bits: String,
    pub energy: f64,
    pub count: u64,
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn bits_from_string(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}
