use super::SpeakerTimelines;
use crate::timeline::Ticks;

/// Pairwise overlap between reference speakers (rows) and system speakers
/// (columns), both in name order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapMatrix {
    pub ref_names: Vec<String>,
    pub sys_names: Vec<String>,
    cells: Vec<Ticks>,
}

impl OverlapMatrix {
    /// Builds a matrix from explicit rows; every row must have
    /// `sys_names.len()` entries.
    pub fn from_rows(ref_names: Vec<String>, sys_names: Vec<String>, rows: Vec<Vec<Ticks>>) -> Self {
        assert_eq!(rows.len(), ref_names.len(), "one row per reference speaker");
        assert!(rows.iter().all(|r| r.len() == sys_names.len()), "one column per system speaker");
        assert!(rows.iter().flatten().all(|v| !v.is_negative()), "overlaps are non-negative");
        OverlapMatrix { ref_names, sys_names, cells: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.ref_names.len()
    }

    pub fn cols(&self) -> usize {
        self.sys_names.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Ticks {
        self.cells[row * self.cols() + col]
    }

    pub fn to_rows(&self) -> Vec<Vec<Ticks>> {
        if self.cols() == 0 {
            return vec![Vec::new(); self.rows()];
        }
        self.cells.chunks(self.cols()).map(<[Ticks]>::to_vec).collect()
    }
}

pub fn build_overlap_matrix(reference: &SpeakerTimelines, system: &SpeakerTimelines) -> OverlapMatrix {
    let mut cells = Vec::with_capacity(reference.len() * system.len());
    for (_, r) in reference.iter() {
        for (_, s) in system.iter() {
            cells.push(r.intersect(s).duration());
        }
    }
    OverlapMatrix {
        ref_names: reference.names().map(str::to_string).collect(),
        sys_names: system.names().map(str::to_string).collect(),
        cells,
    }
}
