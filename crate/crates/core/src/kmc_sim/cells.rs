use super::particles::{periodic_distance2, Charge, Radical};

/// A +/− pair closer than the reaction radius. Slots index the radical slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encounter {
    pub plus_slot: usize,
    pub minus_slot: usize,
    pub plus: u64,
    pub minus: u64,
    pub distance: f64,
}

/// Uniform cell list over the periodic box with cells no smaller than the
/// reaction radius, holding the − radicals.
#[derive(Debug)]
pub struct CellList {
    per_axis: usize,
    cell_side: f64,
    cells: Vec<Vec<usize>>,
}

impl CellList {
    pub fn build(radicals: &[Radical], side: f64, radius: f64) -> Self {
        let per_axis = ((side / radius).floor() as usize).max(1);
        let cell_side = side / per_axis as f64;
        let mut cells = vec![Vec::new(); per_axis.pow(3)];
        let mut list = Self {
            per_axis,
            cell_side,
            cells: Vec::new(),
        };
        for (slot, r) in radicals.iter().enumerate() {
            if r.alive && r.charge == Charge::Minus {
                cells[list.cell_of(&r.position)].push(slot);
            }
        }
        list.cells = cells;
        list
    }

    fn coord(&self, x: f64) -> usize {
        ((x / self.cell_side) as usize).min(self.per_axis - 1)
    }

    fn cell_of(&self, p: &[f64; 3]) -> usize {
        let m = self.per_axis;
        (self.coord(p[0]) * m + self.coord(p[1])) * m + self.coord(p[2])
    }

    /// Distinct cells in the 3×3×3 periodic neighbourhood of `p`.
    fn neighbourhood(&self, p: &[f64; 3]) -> Vec<usize> {
        let m = self.per_axis as isize;
        let c = p.map(|x| self.coord(x) as isize);
        let mut out = Vec::with_capacity(27);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let i = (c[0] + dx).rem_euclid(m);
                    let j = (c[1] + dy).rem_euclid(m);
                    let k = (c[2] + dz).rem_euclid(m);
                    out.push(((i * m + j) * m + k) as usize);
                }
            }
        }
        if m < 3 {
            out.sort_unstable();
            out.dedup();
        }
        out
    }
}

/// All +/− pairs with periodic distance below `radius`, via the cell list.
pub fn encounter_candidates(radicals: &[Radical], side: f64, radius: f64) -> Vec<Encounter> {
    let cells = CellList::build(radicals, side, radius);
    let r2 = radius * radius;
    let mut out = Vec::new();
    for (ps, p) in radicals.iter().enumerate() {
        if !(p.alive && p.charge == Charge::Plus) {
            continue;
        }
        for cell in cells.neighbourhood(&p.position) {
            for &ms in &cells.cells[cell] {
                let m = &radicals[ms];
                let d2 = periodic_distance2(&p.position, &m.position, side);
                if d2 < r2 {
                    out.push(Encounter {
                        plus_slot: ps,
                        minus_slot: ms,
                        plus: p.id,
                        minus: m.id,
                        distance: d2.sqrt(),
                    });
                }
            }
        }
    }
    out
}

/// O(N²) reference scan.
pub fn brute_force_candidates(radicals: &[Radical], side: f64, radius: f64) -> Vec<Encounter> {
    let r2 = radius * radius;
    let mut out = Vec::new();
    for (ps, p) in radicals.iter().enumerate() {
        if !(p.alive && p.charge == Charge::Plus) {
            continue;
        }
        for (ms, m) in radicals.iter().enumerate() {
            if !(m.alive && m.charge == Charge::Minus) {
                continue;
            }
            let d2 = periodic_distance2(&p.position, &m.position, side);
            if d2 < r2 {
                out.push(Encounter {
                    plus_slot: ps,
                    minus_slot: ms,
                    plus: p.id,
                    minus: m.id,
                    distance: d2.sqrt(),
                });
            }
        }
    }
    out
}

/// Closest-first greedy matching; ties broken by (+ id, − id).
pub fn greedy_match(mut candidates: Vec<Encounter>, slots: usize) -> Vec<Encounter> {
    candidates.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.plus.cmp(&b.plus))
            .then(a.minus.cmp(&b.minus))
    });
    let mut used = vec![false; slots];
    let mut out = Vec::new();
    for c in candidates {
        if !used[c.plus_slot] && !used[c.minus_slot] {
            used[c.plus_slot] = true;
            used[c.minus_slot] = true;
            out.push(c);
        }
    }
    out
}

/// Matched encounters for this step, closest first.
pub fn find_encounters(radicals: &[Radical], side: f64, radius: f64) -> Vec<Encounter> {
    greedy_match(encounter_candidates(radicals, side, radius), radicals.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(id: u64, charge: Charge, position: [f64; 3]) -> Radical {
        Radical {
            id,
            charge,
            position,
            alive: true,
        }
    }

    #[test]
    fn single_close_pair() {
        let rads = [
            at(0, Charge::Plus, [5.0, 5.0, 5.0]),
            at(1, Charge::Minus, [5.9, 5.0, 5.0]),
        ];
        let enc = find_encounters(&rads, 20.0, 1.0);
        assert_eq!(enc.len(), 1);
        assert_eq!((enc[0].plus, enc[0].minus), (0, 1));
    }

    #[test]
    fn across_the_boundary_and_same_charge_ignored() {
        let rads = [
            at(0, Charge::Plus, [0.1, 5.0, 5.0]),
            at(1, Charge::Minus, [19.8, 5.0, 5.0]),
            at(2, Charge::Plus, [19.9, 5.0, 5.0]),
        ];
        let cand = encounter_candidates(&rads, 20.0, 1.0);
        assert_eq!(cand.len(), 2);
        let enc = find_encounters(&rads, 20.0, 1.0);
        assert_eq!(enc.len(), 1);
        assert_eq!(enc[0].plus, 2);
    }

    #[test]
    fn equal_distances_resolve_by_id() {
        let rads = [
            at(7, Charge::Plus, [4.0, 5.0, 5.0]),
            at(3, Charge::Plus, [6.0, 5.0, 5.0]),
            at(9, Charge::Minus, [5.0, 5.0, 5.0]),
        ];
        let enc = find_encounters(&rads, 20.0, 1.5);
        assert_eq!(enc.len(), 1);
        assert_eq!(enc[0].plus, 3);
    }
}
