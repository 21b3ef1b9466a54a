use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinOutcome {
    Singlet,
    Triplet,
}

/// Which registry relationship the meeting radicals had.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncounterClass {
    /// The two are each other's registry partners.
    Correlated,
    /// Each belongs to a different registry pair.
    Cross,
    /// At least one of them has no partner.
    Partnerless,
}

impl EncounterClass {
    pub const ALL: [EncounterClass; 3] = [Self::Correlated, Self::Cross, Self::Partnerless];

    pub fn label(self) -> &'static str {
        match self {
            Self::Correlated => "correlated",
            Self::Cross => "cross",
            Self::Partnerless => "partnerless",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl SpinOutcome {
    pub fn label(self) -> &'static str {
        match self {
            Self::Singlet => "singlet",
            Self::Triplet => "triplet",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecombinationEvent {
    pub t: f64,
    pub plus: u64,
    pub minus: u64,
    pub class: EncounterClass,
    pub outcome: SpinOutcome,
    /// Werner index of the meeting pair for correlated encounters.
    pub index: Option<u32>,
    /// Index of the pair formed by the orphans, if any.
    pub new_index: Option<u32>,
    /// Former partners [+, −] of the meeting radicals in a cross encounter.
    pub orphans: Option<[u64; 2]>,
    /// ξ assigned to the meeting pair: (−1/3)ⁿ when correlated, 0 otherwise.
    pub xi_meeting: f64,
}

/// Singlet/triplet counts per encounter class, plus the class-(a) counts per
/// Werner index and the running sum of meeting-pair ξ.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecombinationTally {
    counts: [[u64; 2]; 3],
    by_index: BTreeMap<u32, [u64; 2]>,
    xi_sum: f64,
    events: Vec<RecombinationEvent>,
    keep_events: bool,
}

impl RecombinationTally {
    pub fn new(keep_events: bool) -> Self {
        Self {
            keep_events,
            ..Self::default()
        }
    }

    pub fn from_counts(singlet: u64, triplet: u64) -> Self {
        let mut t = Self::default();
        t.counts[EncounterClass::Partnerless.slot()] = [singlet, triplet];
        t
    }

    pub fn record(&mut self, event: RecombinationEvent) {
        self.counts[event.class.slot()][event.outcome.slot()] += 1;
        if let (EncounterClass::Correlated, Some(n)) = (event.class, event.index) {
            self.by_index.entry(n).or_default()[event.outcome.slot()] += 1;
        }
        self.xi_sum += event.xi_meeting;
        if self.keep_events {
            self.events.push(event);
        }
    }

    pub fn count(&self, class: EncounterClass, outcome: SpinOutcome) -> u64 {
        self.counts[class.slot()][outcome.slot()]
    }

    pub fn class_total(&self, class: EncounterClass) -> u64 {
        self.counts[class.slot()].iter().sum()
    }

    /// Correlated-class counts for meeting-pair index n.
    pub fn index_count(&self, n: u32, outcome: SpinOutcome) -> u64 {
        self.by_index.get(&n).map_or(0, |c| c[outcome.slot()])
    }

    pub fn max_index(&self) -> Option<u32> {
        self.by_index.keys().next_back().copied()
    }

    /// (index, singlets, triplets) for every index seen in correlated events.
    pub fn index_counts(&self) -> impl Iterator<Item = (u32, u64, u64)> + '_ {
        self.by_index.iter().map(|(&n, c)| (n, c[0], c[1]))
    }

    pub fn singlets(&self) -> u64 {
        self.counts.iter().map(|c| c[0]).sum()
    }

    pub fn triplets(&self) -> u64 {
        self.counts.iter().map(|c| c[1]).sum()
    }

    pub fn total(&self) -> u64 {
        self.singlets() + self.triplets()
    }

    /// Σ ξ_meeting over all events.
    pub fn xi_sum(&self) -> f64 {
        self.xi_sum
    }

    /// Event-weighted mean of ξ_meeting, the ξ̂(0) estimator.
    pub fn xi_mean(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| self.xi_sum / n as f64)
    }

    pub fn events(&self) -> &[RecombinationEvent] {
        &self.events
    }

    pub fn keeps_events(&self) -> bool {
        self.keep_events
    }

    /// Adds another tally's counts and appends its events.
    pub fn merge(&mut self, other: &RecombinationTally) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            a[0] += b[0];
            a[1] += b[1];
        }
        for (n, b) in &other.by_index {
            let a = self.by_index.entry(*n).or_default();
            a[0] += b[0];
            a[1] += b[1];
        }
        self.xi_sum += other.xi_sum;
        self.events.extend_from_slice(&other.events);
        self.keep_events |= other.keep_events;
    }

    /// Rebuilds the counts from the stored event log.
    pub fn recount(&self) -> RecombinationTally {
        let mut t = RecombinationTally::new(false);
        for e in &self.events {
            t.record(*e);
        }
        t
    }

    /// True when the counts equal the aggregation of the event log.
    pub fn consistent_with_log(&self) -> bool {
        let r = self.recount();
        r.counts == self.counts && r.by_index == self.by_index
    }
}
