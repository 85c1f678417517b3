use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest number of arms (or populations) a closed test will enumerate.
pub const MAX_ARMS: usize = 8;

/// A set of arm (or population) indices, stored as a bit mask.
///
/// Index `k` refers to the `k`-th experimental arm (0-based; the control arm
/// is not part of any set). Subgroup designs use index 0 for the subgroup and
/// 1 for the full population.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArmSet(u16);

impl ArmSet {
    pub const EMPTY: ArmSet = ArmSet(0);

    pub fn full(k: usize) -> Self {
        debug_assert!(k <= 16);
        ArmSet(((1u32 << k) - 1) as u16)
    }

    pub fn from_mask(mask: u16) -> Self {
        ArmSet(mask)
    }

    pub fn singleton(k: usize) -> Self {
        ArmSet(1 << k)
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 & (1 << k) != 0
    }

    pub fn insert(&mut self, k: usize) {
        self.0 |= 1 << k;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: ArmSet) -> ArmSet {
        ArmSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: ArmSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..16).filter(move |k| mask & (1 << k) != 0)
    }
}

impl FromIterator<usize> for ArmSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ArmSet::EMPTY;
        for k in iter {
            set.insert(k);
        }
        set
    }
}

impl fmt::Debug for ArmSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
