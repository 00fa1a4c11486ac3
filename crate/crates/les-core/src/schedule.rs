//! Binary schedule tensor indexed by (home, load, slot).
//!
//! A set bit means one energy packet of that load is delivered in that
//! slot. The tensor is stored flat, load-major, so each (home, load) pair
//! owns a contiguous `horizon`-wide stripe — the stripe is both the unit
//! the repair operator works on and the genome segment the optimizers
//! perturb.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::scenario::Scenario;

/// Shape of a schedule tensor: per-home load counts plus the horizon.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScheduleDims {
    loads_per_home: Vec<usize>,
    horizon: usize,
    /// Cumulative load counts; `home_offsets[b]` is the number of loads in
    /// homes before `b`.
    home_offsets: Vec<usize>,
}

impl ScheduleDims {
    pub fn of(scenario: &Scenario) -> Self {
        let loads_per_home: Vec<usize> =
            scenario.homes.iter().map(|h| h.loads.len()).collect();
        let mut home_offsets = Vec::with_capacity(loads_per_home.len());
        let mut acc = 0;
        for &n in &loads_per_home {
            home_offsets.push(acc);
            acc += n;
        }
        Self {
            loads_per_home,
            horizon: scenario.horizon,
            home_offsets,
        }
    }

    pub fn num_homes(&self) -> usize {
        self.loads_per_home.len()
    }

    pub fn num_loads(&self, home: usize) -> usize {
        self.loads_per_home[home]
    }

    pub fn total_loads(&self) -> usize {
        self.loads_per_home.iter().sum()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.total_loads() * self.horizon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn stripe_start(&self, home: usize, load: usize) -> usize {
        (self.home_offsets[home] + load) * self.horizon
    }
}

/// Flattened binary decision tensor over (home, load, slot).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScheduleMatrix {
    bits: Vec<bool>,
    dims: ScheduleDims,
}

impl ScheduleMatrix {
    pub fn zeros(scenario: &Scenario) -> Self {
        let dims = ScheduleDims::of(scenario);
        Self {
            bits: vec![false; dims.len()],
            dims,
        }
    }

    /// Wrap a flat bit vector; the length must match the dims.
    pub fn from_bits(bits: Vec<bool>, dims: ScheduleDims) -> Self {
        assert_eq!(bits.len(), dims.len(), "bit vector length mismatch");
        Self { bits, dims }
    }

    pub fn dims(&self) -> &ScheduleDims {
        &self.dims
    }

    pub fn matches(&self, scenario: &Scenario) -> bool {
        self.dims == ScheduleDims::of(scenario)
    }

    pub fn get(&self, home: usize, load: usize, slot: usize) -> bool {
        self.bits[self.dims.stripe_start(home, load) + slot]
    }

    pub fn set(&mut self, home: usize, load: usize, slot: usize, value: bool) {
        let idx = self.dims.stripe_start(home, load) + slot;
        self.bits[idx] = value;
    }

    /// The `horizon`-wide stripe of one load.
    pub fn stripe(&self, home: usize, load: usize) -> &[bool] {
        let start = self.dims.stripe_start(home, load);
        &self.bits[start..start + self.dims.horizon]
    }

    pub fn stripe_mut(&mut self, home: usize, load: usize) -> &mut [bool] {
        let start = self.dims.stripe_start(home, load);
        let horizon = self.dims.horizon;
        &mut self.bits[start..start + horizon]
    }

    /// Earliest slot in which this load delivers a packet.
    pub fn actual_start(&self, home: usize, load: usize) -> Option<usize> {
        self.stripe(home, load).iter().position(|&b| b)
    }

    pub fn packets_scheduled(&self, home: usize, load: usize) -> usize {
        self.stripe(home, load).iter().filter(|&&b| b).count()
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    /// Nested 0/1 arrays `[home][load][slot]`, the JSON wire form.
    pub fn to_nested(&self) -> Vec<Vec<Vec<u8>>> {
        (0..self.dims.num_homes())
            .map(|b| {
                (0..self.dims.num_loads(b))
                    .map(|l| self.stripe(b, l).iter().map(|&x| x as u8).collect())
                    .collect()
            })
            .collect()
    }

    pub fn from_nested(scenario: &Scenario, nested: &[Vec<Vec<u8>>]) -> Self {
        let mut m = Self::zeros(scenario);
        for (b, home) in nested.iter().enumerate() {
            for (l, stripe) in home.iter().enumerate() {
                for (t, &bit) in stripe.iter().enumerate() {
                    m.set(b, l, t, bit != 0);
                }
            }
        }
        m
    }
}

impl Serialize for ScheduleMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let nested = self.to_nested();
        let mut seq = serializer.serialize_seq(Some(nested.len()))?;
        for home in &nested {
            seq.serialize_element(home)?;
        }
        seq.end()
    }
}
