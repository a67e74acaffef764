//! Compact 1-D phase spaces, uniform cell grids and cell-set algebra.
//!
//! Cells follow a half-open convention `[lo, lo + w)`, with the final cell of
//! an interval closed so that every point maps to exactly one index. On a
//! circle the last cell is adjacent to cell 0. Cell sets are stored as sorted
//! disjoint index runs, which keeps the set algebra used by the attractor
//! pipeline cheap.

use crate::error::{ConleyError, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type CellId = u32;

/// A compact 1-D phase space: a closed interval or a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSpace {
    Interval { lo: f64, hi: f64 },
    Circle { circumference: f64 },
}

impl PhaseSpace {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(ConleyError::Domain(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(PhaseSpace::Interval { lo, hi })
    }

    pub fn circle(circumference: f64) -> Result<Self> {
        if !(circumference > 0.0) || !circumference.is_finite() {
            return Err(ConleyError::Domain(format!(
                "circle requires circumference > 0, got {circumference}"
            )));
        }
        Ok(PhaseSpace::Circle { circumference })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, PhaseSpace::Circle { .. })
    }

    /// Total length of the space.
    pub fn extent(&self) -> f64 {
        match *self {
            PhaseSpace::Interval { lo, hi } => hi - lo,
            PhaseSpace::Circle { circumference } => circumference,
        }
    }

    /// Reduce a coordinate to its canonical representative.
    ///
    /// Interval points are returned unchanged; circle points are wrapped into
    /// `[0, circumference)`.
    pub fn canonical(&self, x: f64) -> f64 {
        match *self {
            PhaseSpace::Interval { .. } => x,
            PhaseSpace::Circle { circumference } => {
                let r = x.rem_euclid(circumference);
                if r >= circumference {
                    0.0
                } else {
                    r
                }
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            PhaseSpace::Interval { lo, hi } => x >= lo && x <= hi,
            PhaseSpace::Circle { .. } => x.is_finite(),
        }
    }

    /// Metric distance; wraparound on the circle.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            PhaseSpace::Interval { .. } => (x - y).abs(),
            PhaseSpace::Circle { circumference } => {
                let d = (self.canonical(x) - self.canonical(y)).abs();
                d.min(circumference - d)
            }
        }
    }
}

/// A uniform grid over a phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    space: PhaseSpace,
    n_cells: u32,
}

impl Grid {
    pub fn new(space: PhaseSpace, n_cells: u32) -> Result<Self> {
        if n_cells == 0 {
            return Err(ConleyError::Config("n_cells must be positive".into()));
        }
        Ok(Grid { space, n_cells })
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn n_cells(&self) -> u32 {
        self.n_cells
    }

    pub fn cell_width(&self) -> f64 {
        self.space.extent() / self.n_cells as f64
    }

    fn origin(&self) -> f64 {
        match self.space {
            PhaseSpace::Interval { lo, .. } => lo,
            PhaseSpace::Circle { .. } => 0.0,
        }
    }

    /// Index of the cell containing `x`.
    ///
    /// Cells are half-open `[lo, lo + w)`; the final cell of an interval is
    /// closed. Circle coordinates are reduced modulo the circumference.
    pub fn cell_of(&self, x: f64) -> Result<CellId> {
        match self.space {
            PhaseSpace::Interval { lo, hi } => {
                if !(x >= lo && x <= hi) {
                    return Err(ConleyError::Domain(format!(
                        "point {x} outside interval [{lo}, {hi}]"
                    )));
                }
                let i = ((x - lo) / self.cell_width()).floor() as i64;
                Ok(i.clamp(0, self.n_cells as i64 - 1) as CellId)
            }
            PhaseSpace::Circle { .. } => {
                if !x.is_finite() {
                    return Err(ConleyError::Domain(format!("non-finite circle point {x}")));
                }
                let c = self.space.canonical(x);
                let i = (c / self.cell_width()).floor() as i64;
                Ok(i.clamp(0, self.n_cells as i64 - 1) as CellId)
            }
        }
    }

    pub fn cell_lo(&self, c: CellId) -> f64 {
        self.origin() + c as f64 * self.cell_width()
    }

    pub fn cell_hi(&self, c: CellId) -> f64 {
        match self.space {
            // Keep the last edge exact.
            PhaseSpace::Interval { hi, .. } if c == self.n_cells - 1 => hi,
            _ => self.origin() + (c as f64 + 1.0) * self.cell_width(),
        }
    }

    pub fn cell_center(&self, c: CellId) -> f64 {
        self.origin() + (c as f64 + 0.5) * self.cell_width()
    }

    /// Evenly spaced sample points of a cell, endpoints included. A count of
    /// `k` yields `k + 1` points (so 2 requests endpoints + midpoint).
    pub fn sample_points(&self, c: CellId, samples_per_cell: u32) -> Vec<f64> {
        let n = samples_per_cell.max(2) as usize;
        let lo = self.cell_lo(c);
        let hi = self.cell_hi(c);
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Index distance between two cells (wraparound on the circle).
    pub fn cell_index_distance(&self, a: CellId, b: CellId) -> u32 {
        let d = a.abs_diff(b);
        if self.space.is_circle() {
            d.min(self.n_cells - d)
        } else {
            d
        }
    }

    /// Distance from a point to the closed interval of a cell.
    pub fn dist_point_to_cell(&self, x: f64, c: CellId) -> f64 {
        let lo = self.cell_lo(c);
        let hi = self.cell_hi(c);
        match self.space {
            PhaseSpace::Interval { .. } => {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            }
            PhaseSpace::Circle { .. } => {
                let xc = self.space.canonical(x);
                if xc >= lo && xc <= hi {
                    0.0
                } else {
                    self.space.distance(xc, lo).min(self.space.distance(xc, hi))
                }
            }
        }
    }

    /// Number of whole cells a set grows on each side when fattened by `eps`:
    /// the largest `k` with `(k - 1/2)·w < eps`, i.e. all cells whose center
    /// comes within `eps` of the set.
    pub fn fatten_radius(&self, eps: f64) -> Result<u32> {
        if eps < 0.0 || !eps.is_finite() {
            return Err(ConleyError::Domain(format!("eps must be >= 0, got {eps}")));
        }
        let ratio = eps / self.cell_width();
        let k = (ratio + 0.5 - 1e-9).ceil() as i64 - 1;
        Ok(k.max(0) as u32)
    }

    /// Cells whose closed interval meets the reference interval from `a` to
    /// `b`, with each end open or closed. Used to express reference sets
    /// like `(-1, 1)` or `[0, 1]` at grid resolution in tests and reports.
    pub fn cells_touching(
        &self,
        a: f64,
        b: f64,
        include_lo: bool,
        include_hi: bool,
    ) -> Result<CellSet> {
        if self.space.is_circle() && b - a >= self.space.extent() {
            return Ok(CellSet::full(self));
        }
        let mut start = self.cell_of(a)?;
        let mut end = self.cell_of(b)?;
        // A closed reference endpoint sitting exactly on a cell boundary also
        // touches the lower cell; an open one excludes the boundary-only cell.
        if include_lo && self.cell_lo(start) == a {
            if start > 0 {
                start -= 1;
            } else if self.space.is_circle() {
                start = self.n_cells - 1;
            }
        }
        if !include_hi && self.cell_lo(end) == b {
            if end > 0 {
                end -= 1;
            } else if self.space.is_circle() {
                end = self.n_cells - 1;
            }
        }
        let mut s = CellSet::empty(self);
        if !self.space.is_circle() && end < start {
            return Ok(s);
        }
        s.insert_arc(start, end);
        Ok(s)
    }
}

/// A finite set of grid cells, stored as sorted disjoint inclusive runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSet {
    n_cells: u32,
    wrap: bool,
    runs: Vec<(CellId, CellId)>,
}

impl CellSet {
    pub fn empty(grid: &Grid) -> Self {
        CellSet {
            n_cells: grid.n_cells(),
            wrap: grid.space().is_circle(),
            runs: Vec::new(),
        }
    }

    pub fn full(grid: &Grid) -> Self {
        CellSet {
            n_cells: grid.n_cells(),
            wrap: grid.space().is_circle(),
            runs: vec![(0, grid.n_cells() - 1)],
        }
    }

    pub fn from_cells<I: IntoIterator<Item = CellId>>(grid: &Grid, cells: I) -> Self {
        let mut v: Vec<CellId> = cells
            .into_iter()
            .filter(|&c| c < grid.n_cells())
            .collect();
        v.sort_unstable();
        v.dedup();
        let mut runs = Vec::new();
        for c in v {
            match runs.last_mut() {
                Some(&mut (_, ref mut hi)) if *hi + 1 == c => *hi = c,
                _ => runs.push((c, c)),
            }
        }
        CellSet {
            n_cells: grid.n_cells(),
            wrap: grid.space().is_circle(),
            runs,
        }
    }

    pub fn n_cells(&self) -> u32 {
        self.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of member cells.
    pub fn len(&self) -> u64 {
        self.runs
            .iter()
            .map(|&(lo, hi)| (hi - lo + 1) as u64)
            .sum()
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.runs
            .binary_search_by(|&(lo, hi)| {
                if c < lo {
                    std::cmp::Ordering::Greater
                } else if c > hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = CellId> + '_ {
        self.runs.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn runs(&self) -> &[(CellId, CellId)] {
        &self.runs
    }

    pub fn insert(&mut self, c: CellId) {
        self.insert_run(c, c);
    }

    /// Insert the inclusive index run `[lo, hi]` (no wraparound).
    pub fn insert_run(&mut self, lo: CellId, hi: CellId) {
        debug_assert!(lo <= hi && hi < self.n_cells);
        let mut out: Vec<(CellId, CellId)> = Vec::with_capacity(self.runs.len() + 1);
        let mut cur = (lo, hi);
        let mut placed = false;
        for &(a, b) in &self.runs {
            if placed || (b as u64) + 1 < cur.0 as u64 {
                // existing run fully left of the new one, or already merged
                out.push((a, b));
            } else if (a as u64) > cur.1 as u64 + 1 {
                // existing run fully right: emit the merged run first
                out.push(cur);
                out.push((a, b));
                placed = true;
            } else {
                // overlapping or adjacent: absorb
                cur = (cur.0.min(a), cur.1.max(b));
            }
        }
        if !placed {
            out.push(cur);
        }
        self.runs = out;
    }

    /// Insert an arc from `start` to `end` inclusive, moving in increasing
    /// index order; on a circle `start > end` wraps through the top cell.
    pub fn insert_arc(&mut self, start: CellId, end: CellId) {
        if start <= end {
            self.insert_run(start, end);
        } else if self.wrap {
            self.insert_run(start, self.n_cells - 1);
            self.insert_run(0, end);
        } else {
            // On an interval a reversed pair means the full bracket.
            self.insert_run(end, start);
        }
    }

    fn check_same_grid(&self, other: &CellSet) {
        assert_eq!(
            (self.n_cells, self.wrap),
            (other.n_cells, other.wrap),
            "cell sets from different grids"
        );
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        self.check_same_grid(other);
        let mut out = self.clone();
        for &(a, b) in &other.runs {
            out.insert_run(a, b);
        }
        out
    }

    pub fn intersect(&self, other: &CellSet) -> CellSet {
        self.check_same_grid(other);
        let mut runs = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.runs.len() && j < other.runs.len() {
            let (a1, b1) = self.runs[i];
            let (a2, b2) = other.runs[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo <= hi {
                runs.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        CellSet {
            n_cells: self.n_cells,
            wrap: self.wrap,
            runs,
        }
    }

    pub fn complement(&self) -> CellSet {
        let mut runs = Vec::new();
        let mut next = 0u32;
        for &(a, b) in &self.runs {
            if a > next {
                runs.push((next, a - 1));
            }
            next = b + 1;
        }
        if next < self.n_cells {
            runs.push((next, self.n_cells - 1));
        }
        CellSet {
            n_cells: self.n_cells,
            wrap: self.wrap,
            runs,
        }
    }

    pub fn minus(&self, other: &CellSet) -> CellSet {
        self.intersect(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &CellSet) -> CellSet {
        self.minus(other).union(&other.minus(self))
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.minus(other).is_empty()
    }

    /// Grow the set by `radius` cells on each side of every run.
    pub fn fatten_cells(&self, radius: u32) -> CellSet {
        if radius == 0 || self.is_empty() {
            return self.clone();
        }
        if 2 * radius as u64 + 1 >= self.n_cells as u64 {
            return CellSet {
                n_cells: self.n_cells,
                wrap: self.wrap,
                runs: vec![(0, self.n_cells - 1)],
            };
        }
        let mut out = CellSet {
            n_cells: self.n_cells,
            wrap: self.wrap,
            runs: Vec::new(),
        };
        for &(a, b) in &self.runs {
            if self.wrap {
                let lo = a as i64 - radius as i64;
                let hi = b as i64 + radius as i64;
                if hi - lo + 1 >= self.n_cells as i64 {
                    return CellSet::full_raw(self.n_cells, self.wrap);
                }
                let lo_w = lo.rem_euclid(self.n_cells as i64) as u32;
                let hi_w = hi.rem_euclid(self.n_cells as i64) as u32;
                out.insert_arc(lo_w, hi_w);
            } else {
                let lo = a.saturating_sub(radius);
                let hi = (b + radius).min(self.n_cells - 1);
                out.insert_run(lo, hi);
            }
        }
        out
    }

    fn full_raw(n_cells: u32, wrap: bool) -> CellSet {
        CellSet {
            n_cells,
            wrap,
            runs: vec![(0, n_cells - 1)],
        }
    }

    /// Minimum index distance between two non-empty sets (0 when they
    /// overlap, 1 for adjacent cells; wraparound on the circle).
    pub fn min_index_distance(&self, other: &CellSet) -> Option<u32> {
        self.check_same_grid(other);
        if self.is_empty() || other.is_empty() {
            return None;
        }
        let mut best = u32::MAX;
        for &(a1, b1) in &self.runs {
            for &(a2, b2) in &other.runs {
                let mut d = if b1 < a2 {
                    a2 - b1
                } else if b2 < a1 {
                    a1 - b2
                } else {
                    0
                };
                if self.wrap && d > 0 {
                    // distance going the other way around the circle
                    let around = self.n_cells - (b1.max(b2) - a1.min(a2));
                    d = d.min(around);
                }
                best = best.min(d);
                if best == 0 {
                    return Some(0);
                }
            }
        }
        Some(best)
    }
}

impl Serialize for CellSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n_cells: u32,
            wrap: bool,
            cells: Vec<CellId>,
        }
        Repr {
            n_cells: self.n_cells,
            wrap: self.wrap,
            cells: self.iter().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CellSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_cells: u32,
            wrap: bool,
            cells: Vec<CellId>,
        }
        let r = Repr::deserialize(deserializer)?;
        let mut runs = Vec::new();
        let mut cells = r.cells;
        cells.sort_unstable();
        cells.dedup();
        for c in cells {
            match runs.last_mut() {
                Some(&mut (_, ref mut hi)) if *hi + 1 == c => *hi = c,
                _ => runs.push((c, c)),
            }
        }
        Ok(CellSet {
            n_cells: r.n_cells,
            wrap: r.wrap,
            runs,
        })
    }
}

/// Cells whose closure intersects the `eps`-neighborhood of `s`.
pub fn fatten(grid: &Grid, s: &CellSet, eps: f64) -> Result<CellSet> {
    let r = grid.fatten_radius(eps)?;
    Ok(s.fatten_cells(r))
}

/// Hausdorff semi-distance `sup_{a in A} d(center(a), centers(B))`, computed
/// between cell-center point sets. Zero exactly when `a ⊆ b`.
pub fn hausdorff_semi(grid: &Grid, a: &CellSet, b: &CellSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(ConleyError::Domain(
            "hausdorff_semi requires non-empty cell sets".into(),
        ));
    }
    // On a uniform grid the nearest center of b is the nearest run endpoint,
    // and center distance equals index distance times cell width.
    let mut sup: u32 = 0;
    for ca in a.minus(b).iter() {
        let mut best = u32::MAX;
        for &(lo, hi) in b.runs() {
            let d = grid
                .cell_index_distance(ca, lo)
                .min(grid.cell_index_distance(ca, hi));
            best = best.min(d);
        }
        sup = sup.max(best);
    }
    Ok(sup as f64 * grid.cell_width())
}

/// Symmetric Hausdorff distance between cell sets (max of both semis).
pub fn hausdorff(grid: &Grid, a: &CellSet, b: &CellSet) -> Result<f64> {
    Ok(hausdorff_semi(grid, a, b)?.max(hausdorff_semi(grid, b, a)?))
}
