//! Stroboscopic time series of reduced density matrices and scalar channels.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::density::DensityMatrix;
use crate::error::{invalid_input, Result};

/// Kick window `[t_a, t_b]`, sampled every `stride` kicks starting at `t_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub t_a: u64,
    pub t_b: u64,
    pub stride: u64,
}

impl WindowSpec {
    pub fn new(t_a: u64, t_b: u64) -> Result<Self> {
        Self::with_stride(t_a, t_b, 1)
    }

    pub fn with_stride(t_a: u64, t_b: u64, stride: u64) -> Result<Self> {
        if t_a < 1 || t_a > t_b {
            return Err(invalid_input!("window needs 1 <= t_a <= t_b, got [{t_a}, {t_b}]"));
        }
        if stride == 0 {
            return Err(invalid_input!("window stride must be positive"));
        }
        Ok(Self { t_a, t_b, stride })
    }

    pub fn contains(&self, kick: u64) -> bool {
        kick >= self.t_a && kick <= self.t_b && (kick - self.t_a).is_multiple_of(self.stride)
    }

    /// Number of kicks sampled by the window.
    pub fn len(&self) -> u64 {
        (self.t_b - self.t_a) / self.stride + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Per-kick record of RDM snapshots and named real channels.
///
/// Every channel, the snapshot list (when snapshots are kept) and the
/// degeneracy flags have one entry per recorded kick.
#[derive(Debug, Clone, Default)]
pub struct MetricSeries {
    kick_indices: Vec<u64>,
    rdm_snapshots: Vec<DensityMatrix>,
    scalars: BTreeMap<String, Vec<f64>>,
    degenerate: Vec<bool>,
}

impl MetricSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a series from snapshots alone, one per kick.
    pub fn from_snapshots(kicks: Vec<u64>, snapshots: Vec<DensityMatrix>) -> Result<Self> {
        if kicks.len() != snapshots.len() {
            return Err(invalid_input!("kick and snapshot counts differ"));
        }
        let mut s = Self::new();
        for (k, r) in kicks.into_iter().zip(snapshots) {
            s.push(k, Some(r), &[], false)?;
        }
        Ok(s)
    }

    /// Builds a series holding a single scalar channel.
    pub fn from_channel(kicks: Vec<u64>, name: &str, values: Vec<f64>) -> Result<Self> {
        if kicks.len() != values.len() {
            return Err(invalid_input!("kick and value counts differ"));
        }
        let mut s = Self::new();
        for (k, v) in kicks.into_iter().zip(values) {
            s.push(k, None, &[(name, v)], false)?;
        }
        Ok(s)
    }

    pub fn push(
        &mut self,
        kick: u64,
        snapshot: Option<DensityMatrix>,
        scalars: &[(&str, f64)],
        degenerate: bool,
    ) -> Result<()> {
        if let Some(&last) = self.kick_indices.last() {
            if kick <= last {
                return Err(invalid_input!("kick indices must increase ({kick} after {last})"));
            }
        }
        let len = self.kick_indices.len();
        if len > 0 && (self.rdm_snapshots.len() == len) != snapshot.is_some() {
            return Err(invalid_input!("snapshots must be recorded on every kick or none"));
        }
        if scalars.len() != self.scalars.len() && len > 0 {
            return Err(invalid_input!("scalar channel set changed mid-series"));
        }
        for (name, _) in scalars {
            if len > 0 && !self.scalars.contains_key(*name) {
                return Err(invalid_input!("channel {name} introduced mid-series"));
            }
        }
        for (name, v) in scalars {
            self.scalars.entry(name.to_string()).or_default().push(*v);
        }
        if let Some(r) = snapshot {
            self.rdm_snapshots.push(r);
        }
        self.degenerate.push(degenerate);
        self.kick_indices.push(kick);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.kick_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kick_indices.is_empty()
    }

    pub fn kick_indices(&self) -> &[u64] {
        &self.kick_indices
    }

    pub fn snapshots(&self) -> &[DensityMatrix] {
        &self.rdm_snapshots
    }

    pub fn has_snapshots(&self) -> bool {
        !self.rdm_snapshots.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.scalars.get(name).map(Vec::as_slice)
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.scalars.keys().map(String::as_str)
    }

    pub fn degenerate_flags(&self) -> &[bool] {
        &self.degenerate
    }

    /// Positions of the recorded kicks that fall inside `window`.
    ///
    /// Fails if the window reaches outside the recorded kicks or selects nothing.
    pub fn window_positions(&self, window: &WindowSpec) -> Result<Vec<usize>> {
        let (first, last) = match (self.kick_indices.first(), self.kick_indices.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(invalid_input!("series is empty")),
        };
        if window.t_a < first || window.t_b > last {
            return Err(invalid_input!(
                "window [{}, {}] outside recorded kicks [{first}, {last}]",
                window.t_a,
                window.t_b
            ));
        }
        let positions: Vec<usize> =
            self.kick_indices.iter().enumerate().filter(|(_, &k)| window.contains(k)).map(|(p, _)| p).collect();
        if positions.is_empty() {
            return Err(invalid_input!("window selects no recorded kick"));
        }
        Ok(positions)
    }
}
