use super::particles::{Charge, Radical};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub plus: u64,
    pub minus: u64,
    pub index: u32,
}

/// What a radical's registry entry looks like from its own side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Paired { partner: u64, index: u32 },
    Partnerless,
    Unknown,
}

/// Which living radicals form correlated pairs, and with what Werner index.
///
/// Pairs are keyed by the id of their + member; a second map gives the way
/// back from the − member. Ordered maps keep every traversal deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrelationRegistry {
    by_plus: BTreeMap<u64, (u64, u32)>,
    by_minus: BTreeMap<u64, u64>,
    partnerless: BTreeSet<u64>,
}

impl CorrelationRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_pair(&mut self, plus: u64, minus: u64, index: u32) {
        self.partnerless.remove(&plus);
        self.partnerless.remove(&minus);
        self.by_plus.insert(plus, (minus, index));
        self.by_minus.insert(minus, plus);
    }

    pub fn insert_partnerless(&mut self, id: u64) {
        self.partnerless.insert(id);
    }

    pub fn membership(&self, id: u64, charge: Charge) -> Membership {
        let paired = match charge {
            Charge::Plus => self.by_plus.get(&id).copied(),
            Charge::Minus => self
                .by_minus
                .get(&id)
                .map(|p| (*p, self.by_plus[p].1)),
        };
        match paired {
            Some((partner, index)) => Membership::Paired { partner, index },
            None if self.partnerless.contains(&id) => Membership::Partnerless,
            None => Membership::Unknown,
        }
    }

    /// Removes the pair containing `id`, returning its record.
    pub fn remove_pair_of(&mut self, id: u64, charge: Charge) -> Option<PairRecord> {
        let plus = match charge {
            Charge::Plus => id,
            Charge::Minus => *self.by_minus.get(&id)?,
        };
        let (minus, index) = self.by_plus.remove(&plus)?;
        self.by_minus.remove(&minus);
        Some(PairRecord { plus, minus, index })
    }

    /// Drops a radical from the partnerless set.
    pub fn forget(&mut self, id: u64) -> bool {
        self.partnerless.remove(&id)
    }

    pub fn pair_count(&self) -> usize {
        self.by_plus.len()
    }

    pub fn partnerless_count(&self) -> usize {
        self.partnerless.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = PairRecord> + '_ {
        self.by_plus
            .iter()
            .map(|(&plus, &(minus, index))| PairRecord { plus, minus, index })
    }

    pub fn partnerless_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.partnerless.iter().copied()
    }

    /// Number of pairs per Werner index.
    pub fn index_histogram(&self) -> BTreeMap<u32, u64> {
        let mut h = BTreeMap::new();
        for &(_, n) in self.by_plus.values() {
            *h.entry(n).or_insert(0) += 1;
        }
        h
    }

    /// Checks the registry against the living radicals: every living radical
    /// is in exactly one pair or in the partnerless set, every pair joins a +
    /// and a −, and no dead or unknown id is referenced.
    pub fn check(&self, radicals: &[Radical]) -> Result<(), String> {
        let living: BTreeMap<u64, Charge> = radicals
            .iter()
            .filter(|r| r.alive)
            .map(|r| (r.id, r.charge))
            .collect();
        if living.len() != radicals.iter().filter(|r| r.alive).count() {
            return Err("duplicate radical id".into());
        }
        let mut seen = BTreeSet::new();
        for p in self.pairs() {
            if living.get(&p.plus) != Some(&Charge::Plus) {
                return Err(format!("pair plus member {} is not a living + radical", p.plus));
            }
            if living.get(&p.minus) != Some(&Charge::Minus) {
                return Err(format!("pair minus member {} is not a living - radical", p.minus));
            }
            if self.by_minus.get(&p.minus) != Some(&p.plus) {
                return Err(format!("reverse link of {} is broken", p.minus));
            }
            if !seen.insert(p.plus) || !seen.insert(p.minus) {
                return Err(format!("radical in two pairs: {:?}", p));
            }
        }
        if self.by_minus.len() != self.by_plus.len() {
            return Err("forward and reverse maps differ in size".into());
        }
        for id in &self.partnerless {
            if !living.contains_key(id) {
                return Err(format!("partnerless id {id} is not alive"));
            }
            if !seen.insert(*id) {
                return Err(format!("radical {id} is both paired and partnerless"));
            }
        }
        if seen.len() != living.len() {
            return Err(format!(
                "{} living radicals but registry covers {}",
                living.len(),
                seen.len()
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radical(id: u64, charge: Charge) -> Radical {
        Radical {
            id,
            charge,
            position: [0.0; 3],
            alive: true,
        }
    }

    #[test]
    fn pair_lifecycle() {
        let mut reg = CorrelationRegistry::new();
        reg.insert_pair(0, 1, 0);
        reg.insert_pair(2, 3, 2);
        reg.insert_partnerless(4);
        reg.insert_partnerless(5);
        let mut rads = vec![
            radical(0, Charge::Plus),
            radical(1, Charge::Minus),
            radical(2, Charge::Plus),
            radical(3, Charge::Minus),
            radical(4, Charge::Plus),
            radical(5, Charge::Minus),
        ];
        reg.check(&rads).unwrap();
        assert_eq!(
            reg.membership(3, Charge::Minus),
            Membership::Paired { partner: 2, index: 2 }
        );
        assert_eq!(reg.membership(4, Charge::Plus), Membership::Partnerless);
        assert_eq!(reg.index_histogram(), BTreeMap::from([(0, 1), (2, 1)]));

        let rec = reg.remove_pair_of(1, Charge::Minus).unwrap();
        assert_eq!(rec, PairRecord { plus: 0, minus: 1, index: 0 });
        assert!(reg.check(&rads).is_err());
        rads[0].alive = false;
        rads[1].alive = false;
        reg.check(&rads).unwrap();
    }

    #[test]
    fn detects_bad_typing() {
        let mut reg = CorrelationRegistry::new();
        reg.insert_pair(0, 1, 0);
        let rads = vec![radical(0, Charge::Plus), radical(1, Charge::Plus)];
        assert!(reg.check(&rads).is_err());
    }
}
