//! The beacon-interval access schedule: contention-free service periods and
//! contention-based periods laid out inside each interval, plus the
//! owner-driven reshaping operations (truncate, extend, dynamic allocation).

use super::frames::StationId;
use super::MacError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationKind {
    /// Contention-free period between one source/destination pair.
    ServicePeriod {
        /// Recurs unchanged in following intervals without re-announcement.
        pseudo_static: bool,
        /// Consents to spatial reuse: may overlap other consenting
        /// allocations.
        spatial_share: bool,
    },
    /// Contention-based access period (EDCA inside).
    Cbap,
}

impl AllocationKind {
    pub fn is_sp(&self) -> bool {
        matches!(self, AllocationKind::ServicePeriod { .. })
    }

    fn shares_spatially(&self) -> bool {
        matches!(
            self,
            AllocationKind::ServicePeriod {
                spatial_share: true,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Allocation {
    pub kind: AllocationKind,
    pub source: StationId,
    pub destination: StationId,
    /// Offset from the start of the data-transfer phase, nanoseconds.
    pub start_ns: u64,
    pub duration_ns: u64,
}

impl Allocation {
    pub fn end_ns(&self) -> u64 {
        self.start_ns + self.duration_ns
    }

    fn overlaps(&self, other: &Allocation) -> bool {
        self.start_ns < other.end_ns() && other.start_ns < self.end_ns()
    }

    /// Two overlapping allocations are legal only when every service period
    /// involved consents to spatial sharing (and at most one is a CBAP).
    fn may_overlap(&self, other: &Allocation) -> bool {
        match (self.kind.is_sp(), other.kind.is_sp()) {
            (true, true) => self.kind.shares_spatially() && other.kind.shares_spatially(),
            (true, false) => self.kind.shares_spatially(),
            (false, true) => other.kind.shares_spatially(),
            (false, false) => false,
        }
    }
}

/// The data-transfer phase layout of one beacon interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Length of the data-transfer phase, nanoseconds.
    pub dti_ns: u64,
    allocations: Vec<Allocation>,
}

/// Owner-driven reshaping requests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleOp {
    /// Shorten allocation `index` to `keep_ns`, releasing the tail.
    Truncate {
        index: usize,
        requester: StationId,
        keep_ns: u64,
    },
    /// Lengthen allocation `index` by `extra_ns`.
    Extend {
        index: usize,
        requester: StationId,
        extra_ns: u64,
    },
    /// Carve a new allocation, announced inside an already-running one.
    AllocateDynamic {
        allocation: Allocation,
        announced_at_ns: u64,
    },
}

impl Schedule {
    pub fn new(dti_ns: u64) -> Self {
        Schedule {
            dti_ns,
            allocations: Vec::new(),
        }
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.allocations
    }

    /// Adds an allocation, enforcing interval bounds and overlap legality.
    pub fn add(&mut self, alloc: Allocation) -> Result<usize, MacError> {
        let index = self.allocations.len();
        if alloc.duration_ns == 0 {
            return Err(MacError::EmptyAllocation(index));
        }
        if alloc.end_ns() > self.dti_ns {
            return Err(MacError::OutsideInterval { index });
        }
        for (i, existing) in self.allocations.iter().enumerate() {
            if alloc.overlaps(existing) && !alloc.may_overlap(existing) {
                return Err(MacError::ScheduleConflict { a: i, b: index });
            }
        }
        self.allocations.push(alloc);
        Ok(index)
    }

    /// Full-schedule validation; returns every conflict rather than the
    /// first.
    pub fn validate(&self) -> Vec<MacError> {
        let mut problems = Vec::new();
        for (i, a) in self.allocations.iter().enumerate() {
            if a.duration_ns == 0 {
                problems.push(MacError::EmptyAllocation(i));
            }
            if a.end_ns() > self.dti_ns {
                problems.push(MacError::OutsideInterval { index: i });
            }
            for (j, b) in self.allocations.iter().enumerate().skip(i + 1) {
                if a.overlaps(b) && !a.may_overlap(b) {
                    problems.push(MacError::ScheduleConflict { a: i, b: j });
                }
            }
        }
        problems
    }

    fn check_owner(&self, index: usize, requester: StationId) -> Result<&Allocation, MacError> {
        let alloc = self
            .allocations
            .get(index)
            .ok_or(MacError::NoSuchAllocation(index))?;
        if alloc.source != requester {
            return Err(MacError::NotOwner {
                station: requester,
                index,
            });
        }
        Ok(alloc)
    }

    /// Applies one reshaping operation.
    pub fn apply(&mut self, op: ScheduleOp) -> Result<(), MacError> {
        match op {
            ScheduleOp::Truncate {
                index,
                requester,
                keep_ns,
            } => {
                self.check_owner(index, requester)?;
                if keep_ns == 0 {
                    return Err(MacError::EmptyAllocation(index));
                }
                let alloc = &mut self.allocations[index];
                alloc.duration_ns = alloc.duration_ns.min(keep_ns);
                Ok(())
            }
            ScheduleOp::Extend {
                index,
                requester,
                extra_ns,
            } => {
                self.check_owner(index, requester)?;
                let mut grown = self.allocations[index];
                grown.duration_ns += extra_ns;
                if grown.end_ns() > self.dti_ns {
                    return Err(MacError::OutsideInterval { index });
                }
                for (i, other) in self.allocations.iter().enumerate() {
                    if i != index && grown.overlaps(other) && !grown.may_overlap(other) {
                        return Err(MacError::ScheduleConflict { a: index, b: i });
                    }
                }
                self.allocations[index] = grown;
                Ok(())
            }
            ScheduleOp::AllocateDynamic {
                allocation,
                announced_at_ns,
            } => {
                let covered = self
                    .allocations
                    .iter()
                    .any(|a| a.start_ns <= announced_at_ns && announced_at_ns < a.end_ns());
                if !covered {
                    return Err(MacError::NoCoveringAllocation(announced_at_ns));
                }
                self.add(allocation).map(|_| ())
            }
        }
    }

    /// The allocation active at `offset_ns` into the data-transfer phase.
    pub fn active_at(&self, offset_ns: u64) -> Option<(usize, &Allocation)> {
        self.allocations
            .iter()
            .enumerate()
            .find(|(_, a)| a.start_ns <= offset_ns && offset_ns < a.end_ns())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(source: StationId, start_ns: u64, duration_ns: u64) -> Allocation {
        Allocation {
            kind: AllocationKind::ServicePeriod {
                pseudo_static: false,
                spatial_share: false,
            },
            source,
            destination: source + 1,
            start_ns,
            duration_ns,
        }
    }

    fn sharing_sp(source: StationId, start_ns: u64, duration_ns: u64) -> Allocation {
        Allocation {
            kind: AllocationKind::ServicePeriod {
                pseudo_static: false,
                spatial_share: true,
            },
            ..sp(source, start_ns, duration_ns)
        }
    }

    fn cbap(start_ns: u64, duration_ns: u64) -> Allocation {
        Allocation {
            kind: AllocationKind::Cbap,
            source: 0,
            destination: u16::MAX,
            start_ns,
            duration_ns,
        }
    }

    #[test]
    fn disjoint_layout_is_legal() {
        let mut s = Schedule::new(1_000_000);
        s.add(sp(1, 0, 300_000)).unwrap();
        s.add(cbap(300_000, 400_000)).unwrap();
        s.add(sp(2, 700_000, 300_000)).unwrap();
        assert!(s.validate().is_empty());
    }

    #[test]
    fn sp_overlapping_cbap_without_consent_conflicts() {
        let mut s = Schedule::new(1_000_000);
        s.add(cbap(0, 500_000)).unwrap();
        assert_eq!(
            s.add(sp(1, 400_000, 200_000)),
            Err(MacError::ScheduleConflict { a: 0, b: 1 })
        );
        // with spatial-sharing consent the same overlap is accepted
        s.add(sharing_sp(1, 400_000, 200_000)).unwrap();
        assert!(s.validate().is_empty());
    }

    #[test]
    fn sp_pair_needs_mutual_consent() {
        let mut s = Schedule::new(1_000_000);
        s.add(sharing_sp(1, 0, 500_000)).unwrap();
        assert!(s.add(sp(2, 250_000, 500_000)).is_err());
        s.add(sharing_sp(2, 250_000, 500_000)).unwrap();
    }

    #[test]
    fn interval_bounds_enforced() {
        let mut s = Schedule::new(1_000_000);
        assert_eq!(
            s.add(sp(1, 900_000, 200_000)),
            Err(MacError::OutsideInterval { index: 0 })
        );
        assert!(s.add(sp(1, 0, 0)).is_err());
    }

    #[test]
    fn truncation_releases_the_tail_for_reuse() {
        let mut s = Schedule::new(1_000_000);
        let idx = s.add(sp(1, 0, 600_000)).unwrap();
        // only the owner may truncate
        assert_eq!(
            s.apply(ScheduleOp::Truncate {
                index: idx,
                requester: 9,
                keep_ns: 300_000
            }),
            Err(MacError::NotOwner {
                station: 9,
                index: idx
            })
        );
        s.apply(ScheduleOp::Truncate {
            index: idx,
            requester: 1,
            keep_ns: 300_000,
        })
        .unwrap();
        assert_eq!(s.allocations()[idx].duration_ns, 300_000);
        // the released second half can now be allocated to someone else
        s.add(sp(2, 300_000, 300_000)).unwrap();
        assert!(s.validate().is_empty());
    }

    #[test]
    fn extension_respects_neighbors() {
        let mut s = Schedule::new(1_000_000);
        let idx = s.add(sp(1, 0, 300_000)).unwrap();
        s.add(sp(2, 600_000, 300_000)).unwrap();
        s.apply(ScheduleOp::Extend {
            index: idx,
            requester: 1,
            extra_ns: 200_000,
        })
        .unwrap();
        assert_eq!(s.allocations()[idx].duration_ns, 500_000);
        // growing into the neighbor is refused and leaves the schedule intact
        assert!(matches!(
            s.apply(ScheduleOp::Extend {
                index: idx,
                requester: 1,
                extra_ns: 200_000
            }),
            Err(MacError::ScheduleConflict { .. })
        ));
        assert_eq!(s.allocations()[idx].duration_ns, 500_000);
    }

    #[test]
    fn dynamic_allocation_needs_a_covering_period() {
        let mut s = Schedule::new(1_000_000);
        s.add(cbap(0, 400_000)).unwrap();
        // announced inside the CBAP, lands after it: fine
        s.apply(ScheduleOp::AllocateDynamic {
            allocation: sp(3, 500_000, 100_000),
            announced_at_ns: 100_000,
        })
        .unwrap();
        // announced in dead air: refused
        assert_eq!(
            s.apply(ScheduleOp::AllocateDynamic {
                allocation: sp(4, 700_000, 100_000),
                announced_at_ns: 450_000,
            }),
            Err(MacError::NoCoveringAllocation(450_000))
        );
    }

    #[test]
    fn active_lookup() {
        let mut s = Schedule::new(1_000_000);
        s.add(sp(1, 0, 300_000)).unwrap();
        s.add(cbap(300_000, 400_000)).unwrap();
        assert_eq!(s.active_at(0).unwrap().0, 0);
        assert_eq!(s.active_at(299_999).unwrap().0, 0);
        assert_eq!(s.active_at(300_000).unwrap().0, 1);
        assert!(s.active_at(700_000).is_none());
    }
}
