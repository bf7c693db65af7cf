//! Isolating partitions of a head set.
//!
//! A partition `S = S_1 ∪ ... ∪ S_T` is isolating when set sizes decay
//! doubly exponentially, no element of `S_t` is crowded by `S_t` under
//! any of round `t`'s hashings, and no element of `S_t` collides with an
//! element that is bad for `S_t` (collides with it in too many
//! hashings). The iterative construction defers every offending element
//! to the next round and fails if the active set has not emptied after
//! `T` rounds; the caller resamples hashings on failure.

use std::collections::BTreeSet;

use crate::hashing::{signed_mod, Hashing};
use crate::{Result, SfftError, SfftFloat};

/// Round schedule: `R_t = C1 * 2^t` hashings into `B_t >= C2*k/R_t^2`
/// buckets (clamped to `[b_min, n/2]` and rounded up to a power of two).
#[derive(Debug, Clone)]
pub struct PartitionSchedule {
    pub rounds: usize,
    pub repetitions: Vec<usize>,
    pub buckets: Vec<usize>,
    pub delta: f64,
    pub c1: usize,
    pub c2: usize,
}

pub const DEFAULT_DELTA: f64 = 0.25;
pub const DEFAULT_C1: usize = 1;
pub const DEFAULT_C2: usize = 4096;
pub const DEFAULT_C_T: usize = 3;
pub const DEFAULT_B_MIN: usize = 4;

impl PartitionSchedule {
    pub fn new(
        n: usize,
        k: usize,
        delta: f64,
        c1: usize,
        c2: usize,
        c_t: usize,
        b_min: usize,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(SfftError::InvalidParameter(format!(
                "delta={delta} outside (0, 1/2)"
            )));
        }
        if k == 0 || c1 == 0 || c2 == 0 {
            return Err(SfftError::InvalidParameter(
                "k, C1, C2 must be positive".into(),
            ));
        }
        let rounds = if k == 1 {
            1
        } else {
            let loglog = ((k as f64 + 1.0).log2()).log2();
            ((loglog / (1.0 - delta)).ceil() as usize).max(1) + c_t
        };
        let b_max = (n / 2).max(2);
        let mut repetitions = Vec::with_capacity(rounds);
        let mut buckets = Vec::with_capacity(rounds);
        for t in 1..=rounds {
            let r_t = c1 << t;
            let want = (c2 as f64 * k as f64 / (r_t as f64 * r_t as f64)).ceil() as usize;
            let b_t = want
                .next_power_of_two()
                .clamp(b_min.next_power_of_two(), b_max);
            repetitions.push(r_t);
            buckets.push(b_t);
        }
        Ok(Self {
            rounds,
            repetitions,
            buckets,
            delta,
            c1,
            c2,
        })
    }

    pub fn defaults(n: usize, k: usize) -> Result<Self> {
        Self::new(
            n,
            k,
            DEFAULT_DELTA,
            DEFAULT_C1,
            DEFAULT_C2,
            DEFAULT_C_T,
            DEFAULT_B_MIN,
        )
    }

    /// Size cap for round `t` (1-based): `k * (R_0/R_{t-1}) *
    /// 2^{-2^{(1-delta)(t-1)} + 1}`.
    pub fn size_cap(&self, k: usize, t: usize) -> f64 {
        let r0 = self.c1 as f64;
        let rt1 = if t >= 2 {
            self.repetitions[t - 2] as f64
        } else {
            r0
        };
        let e = (1.0 - self.delta) * (t as f64 - 1.0);
        k as f64 * (r0 / rt1) * 2f64.powf(-(2f64.powf(e)) + 1.0)
    }

    /// Bad-element threshold for round `t`: strictly more than
    /// `R_t^{1-delta}` colliding hashings.
    pub fn bad_threshold(&self, t: usize) -> f64 {
        (self.repetitions[t - 1] as f64).powf(1.0 - self.delta)
    }
}

/// Sorted permuted positions of a point set with O(log) circular range
/// counts.
#[derive(Debug, Clone)]
pub struct CircularIndex {
    n: usize,
    sorted: Vec<usize>,
}

impl CircularIndex {
    pub fn new<T: SfftFloat>(hashing: &Hashing<T>, set: &BTreeSet<usize>) -> Self {
        let mut sorted: Vec<usize> = set.iter().map(|&i| hashing.perm().apply(i)).collect();
        sorted.sort_unstable();
        Self {
            n: hashing.n(),
            sorted,
        }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Number of stored positions within circular distance `radius` of
    /// `center` (inclusive).
    pub fn count_within(&self, center: usize, radius: usize) -> usize {
        if self.sorted.is_empty() {
            return 0;
        }
        if 2 * radius + 1 >= self.n {
            return self.sorted.len();
        }
        let n = self.n as i64;
        let lo = (center as i64 - radius as i64).rem_euclid(n) as usize;
        let hi = (center as i64 + radius as i64).rem_euclid(n) as usize;
        if lo <= hi {
            self.count_in(lo, hi)
        } else {
            self.count_in(lo, self.n - 1) + self.count_in(0, hi)
        }
    }

    fn count_in(&self, lo: usize, hi: usize) -> usize {
        let a = self.sorted.partition_point(|&x| x < lo);
        let b = self.sorted.partition_point(|&x| x <= hi);
        b - a
    }
}

/// True iff `a` and `b` hash within `t_radius` buckets of each other:
/// `|pi(a) - pi(b)|_circ <= (n/B)(t_radius - 1)`.
pub fn collides<T: SfftFloat>(a: usize, b: usize, hashing: &Hashing<T>, t_radius: usize) -> bool {
    debug_assert_ne!(a, b);
    let n = hashing.n();
    let d = signed_mod(
        hashing.perm().apply(a) as i64 - hashing.perm().apply(b) as i64,
        n as i64,
    )
    .unsigned_abs() as usize;
    let radius = n / hashing.buckets() * t_radius.saturating_sub(1);
    d <= radius
}

/// True iff `a` is lambda-crowded by `Q` under the hashing: some scale
/// `q >= 0` has at least `lambda * 2^{2q}` permuted points of
/// `Q \ {a}` within `(n/B) * 2^q` of `pi(a)`.
pub fn is_crowded<T: SfftFloat>(
    a: usize,
    q_set: &BTreeSet<usize>,
    hashing: &Hashing<T>,
    lambda: f64,
) -> bool {
    let mut others = q_set.clone();
    others.remove(&a);
    if others.is_empty() {
        return false;
    }
    let index = CircularIndex::new(hashing, &others);
    crowded_via_index(a, &index, hashing, lambda)
}

fn crowded_via_index<T: SfftFloat>(
    a: usize,
    index: &CircularIndex,
    hashing: &Hashing<T>,
    lambda: f64,
) -> bool {
    let n = hashing.n();
    let b = hashing.buckets();
    let pa = hashing.perm().apply(a);
    let qmax = (b as f64).log2().ceil() as u32 + 1;
    for q in 0..=qmax {
        let radius = (n / b).saturating_mul(1usize << q).min(n);
        let threshold = lambda * 4f64.powi(q as i32);
        if (index.count_within(pa, radius) as f64) >= threshold {
            return true;
        }
    }
    false
}

/// Elements of `s_all` that collide with `target` in strictly more than
/// `R_t^{1-delta}` of the round's hashings. The returned set excludes
/// nobody: membership in `target` does not exempt an element.
pub fn find_bad_elements<T: SfftFloat>(
    s_all: &BTreeSet<usize>,
    target: &BTreeSet<usize>,
    hashings: &[Hashing<T>],
    t_radius: usize,
    delta: f64,
) -> BTreeSet<usize> {
    let mut bad = BTreeSet::new();
    if target.is_empty() {
        return bad;
    }
    let threshold = (hashings.len() as f64).powf(1.0 - delta);
    let indexes: Vec<CircularIndex> = hashings
        .iter()
        .map(|h| CircularIndex::new(h, target))
        .collect();
    for &a in s_all {
        let mut count = 0usize;
        for (h, index) in hashings.iter().zip(indexes.iter()) {
            if collides_with_set(a, target, index, h, t_radius) {
                count += 1;
            }
        }
        if (count as f64) > threshold {
            bad.insert(a);
        }
    }
    bad
}

fn collides_with_set<T: SfftFloat>(
    a: usize,
    set: &BTreeSet<usize>,
    index: &CircularIndex,
    hashing: &Hashing<T>,
    t_radius: usize,
) -> bool {
    let n = hashing.n();
    let radius = n / hashing.buckets() * t_radius.saturating_sub(1);
    let pa = hashing.perm().apply(a);
    let mut hits = index.count_within(pa, radius);
    if set.contains(&a) {
        hits = hits.saturating_sub(1); // self-collisions do not count
    }
    hits > 0
}

#[derive(Debug, Clone)]
pub struct IsolatingPartition {
    /// `sets[t-1]` is `S_t`; disjoint, union = original set.
    pub sets: Vec<BTreeSet<usize>>,
    pub schedule: PartitionSchedule,
}

impl IsolatingPartition {
    /// Diagnostic dump as JSON: `{"1": [..], "2": [..]}`.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (t, set) in self.sets.iter().enumerate() {
            if t > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{}\":[", t + 1));
            for (i, v) in set.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&v.to_string());
            }
            out.push(']');
        }
        out.push('}');
        out
    }
}

/// Runs the deferral loop: round `t` peels off the elements that are bad
/// for the active set, collide with a bad element, or are crowded, and
/// hands them to round `t+1`. Succeeds when the active set empties by
/// round `T`; the returned partition additionally re-checks the size
/// caps (the one property termination does not imply by itself).
pub fn construct_partition<T: SfftFloat>(
    s: &BTreeSet<usize>,
    schedule: &PartitionSchedule,
    hashings: &[Vec<Hashing<T>>],
) -> Result<IsolatingPartition> {
    let rounds = schedule.rounds;
    if hashings.len() < rounds {
        return Err(SfftError::InvalidParameter(format!(
            "need hashings for {rounds} rounds, got {}",
            hashings.len()
        )));
    }
    let k = s.len();
    let mut assigned: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); rounds];
    let mut active: BTreeSet<usize> = s.clone();

    for t in 1..=rounds {
        if active.is_empty() {
            break;
        }
        let round_hashings = &hashings[t - 1];
        let radius = schedule.repetitions[t - 1];
        let lambda = (radius as f64).powi(-3);

        let bad = find_bad_elements(s, &active, round_hashings, radius, schedule.delta);

        let mut next = bad.clone();
        // U_t: active elements colliding with a bad one in >= 1 hashing.
        if !bad.is_empty() {
            let bad_indexes: Vec<CircularIndex> = round_hashings
                .iter()
                .map(|h| CircularIndex::new(h, &bad))
                .collect();
            for &a in &active {
                let hit = round_hashings
                    .iter()
                    .zip(bad_indexes.iter())
                    .any(|(h, idx)| collides_with_set(a, &bad, idx, h, radius));
                if hit {
                    next.insert(a);
                }
            }
        }
        // V_t: active elements crowded by the active set in >= 1 hashing.
        for h in round_hashings {
            let index = CircularIndex::new(h, &active);
            for &a in &active {
                if next.contains(&a) {
                    continue;
                }
                let mut own = CircularIndex {
                    n: index.n,
                    sorted: index.sorted.clone(),
                };
                // remove a's own position once
                let pa = h.perm().apply(a);
                if let Ok(pos) = own.sorted.binary_search(&pa) {
                    own.sorted.remove(pos);
                }
                if crowded_via_index(a, &own, h, lambda) {
                    next.insert(a);
                }
            }
        }

        assigned[t - 1] = active.difference(&next).copied().collect();
        for prior in assigned.iter_mut().take(t - 1) {
            for moved in &next {
                prior.remove(moved);
            }
        }
        active = next.intersection(s).copied().collect();
        if t == rounds && !active.is_empty() {
            return Err(SfftError::PartitionFailure { rounds });
        }
    }

    let partition = IsolatingPartition {
        sets: assigned,
        schedule: schedule.clone(),
    };
    // Termination guarantees the collision/crowding properties but not
    // the size caps; reject (rare) oversized rounds so every returned
    // partition verifies.
    for t in 1..=rounds {
        if partition.sets[t - 1].len() as f64 > schedule.size_cap(k, t) {
            return Err(SfftError::PartitionFailure { rounds });
        }
    }
    Ok(partition)
}

/// Brute-force check of all three isolating-partition properties.
pub fn verify_partition<T: SfftFloat>(
    partition: &IsolatingPartition,
    s: &BTreeSet<usize>,
    hashings: &[Vec<Hashing<T>>],
) -> bool {
    let schedule = &partition.schedule;
    let k = s.len();
    let union: BTreeSet<usize> = partition.sets.iter().flatten().copied().collect();
    if union != *s {
        return false;
    }
    let total: usize = partition.sets.iter().map(|x| x.len()).sum();
    if total != s.len() {
        return false; // overlap between sets
    }
    for t in 1..=schedule.rounds {
        let set = &partition.sets[t - 1];
        if set.len() as f64 > schedule.size_cap(k, t) {
            return false;
        }
        if set.is_empty() {
            continue;
        }
        let round_hashings = &hashings[t - 1];
        let radius = schedule.repetitions[t - 1];
        let lambda = (radius as f64).powi(-3);
        for h in round_hashings {
            for &a in set {
                if is_crowded(a, set, h, lambda) {
                    return false;
                }
            }
        }
        let bad = find_bad_elements(s, set, round_hashings, radius, schedule.delta);
        for h in round_hashings {
            for &a in set {
                for &b in &bad {
                    if b != a && collides(a, b, h, radius) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Samples the full hashing collection for a schedule; `q` is fixed when
/// `fixed_q` is given (the recovery path uses q = 0).
pub fn sample_hashings<T: SfftFloat>(
    schedule: &PartitionSchedule,
    n: usize,
    f: usize,
    c_f: usize,
    bank: &crate::filter::FilterBank<T>,
    rng: &mut impl rand::Rng,
    fixed_q: Option<usize>,
) -> Result<Vec<Vec<Hashing<T>>>> {
    let mut out = Vec::with_capacity(schedule.rounds);
    for t in 1..=schedule.rounds {
        let b_t = schedule.buckets[t - 1];
        let filter = bank.get(n, b_t, f, c_f)?;
        let mut round = Vec::with_capacity(schedule.repetitions[t - 1]);
        for _ in 0..schedule.repetitions[t - 1] {
            let perm = crate::hashing::Permutation::random(rng, n, fixed_q);
            round.push(Hashing::new(perm, filter.clone())?);
        }
        out.push(round);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{FilterBank, DEFAULT_C_F};
    use crate::hashing::Permutation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hashing_with(sigma: usize, q: usize, n: usize, b: usize) -> Hashing<f64> {
        let bank = FilterBank::<f64>::new();
        let filt = bank.get(n, b, 8, DEFAULT_C_F).unwrap();
        Hashing::new(Permutation::new(sigma, q, n).unwrap(), filt).unwrap()
    }

    #[test]
    fn adjacent_positions_collide() {
        let n = 256;
        let h = hashing_with(1, 0, n, 8);
        // pi = identity: positions 10 and 11 differ by 1 <= (n/B)(t-1)
        assert!(collides(10, 11, &h, 2));
    }

    #[test]
    fn antipodal_positions_do_not_collide() {
        let n = 256;
        let h = hashing_with(1, 0, n, 8);
        assert!(!collides(0, n / 2, &h, 2));
    }

    #[test]
    fn collision_matches_direct_formula() {
        let n = 1 << 10;
        let h = hashing_with(333, 17, n, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            if b == a {
                b = (b + 1) % n;
            }
            let t_radius = rng.gen_range(1..8);
            let d = (h.perm().apply(a) as i64 - h.perm().apply(b) as i64).rem_euclid(n as i64);
            let circ = d.min(n as i64 - d) as usize;
            let expected = circ <= n / 64 * (t_radius - 1);
            assert_eq!(collides(a, b, &h, t_radius), expected);
        }
    }

    #[test]
    fn lone_element_is_not_crowded() {
        let n = 1 << 10;
        let h = hashing_with(5, 0, n, 64);
        let q: BTreeSet<usize> = [42].into_iter().collect();
        assert!(!is_crowded(42, &q, &h, 1.0));
    }

    #[test]
    fn immediate_neighbor_crowds_at_scale_zero() {
        let n = 1 << 10;
        let h = hashing_with(1, 0, n, 64);
        // positions 100 and 101: distance 1 <= n/B = 16, threshold 1*2^0 = 1
        let q: BTreeSet<usize> = [100, 101].into_iter().collect();
        assert!(is_crowded(100, &q, &h, 1.0));
    }

    #[test]
    fn crowding_matches_brute_force() {
        let n = 1 << 10;
        let b = 64;
        let h = hashing_with(77, 5, n, b);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let q: BTreeSet<usize> = (0..32).map(|_| rng.gen_range(0..n)).collect();
        for &a in &q {
            for &lambda in &[1.0, 0.25, 1.0 / 64.0] {
                // brute force over all scales and distances
                let mut expect = false;
                let qmax = (b as f64).log2().ceil() as u32 + 1;
                for qs in 0..=qmax {
                    let radius = (n / b) * (1usize << qs).min(n);
                    let count = q
                        .iter()
                        .filter(|&&x| x != a)
                        .filter(|&&x| {
                            let d = (h.perm().apply(x) as i64 - h.perm().apply(a) as i64)
                                .rem_euclid(n as i64);
                            d.min(n as i64 - d) <= radius.min(n) as i64
                        })
                        .count();
                    if count as f64 >= lambda * 4f64.powi(qs as i32) {
                        expect = true;
                    }
                }
                assert_eq!(is_crowded(a, &q, &h, lambda), expect, "a={a} l={lambda}");
            }
        }
    }

    #[test]
    fn bad_elements_empty_target() {
        let n = 1 << 10;
        let h = vec![hashing_with(9, 0, n, 64)];
        let s: BTreeSet<usize> = (0..48).collect();
        assert!(find_bad_elements(&s, &BTreeSet::new(), &h, 4, 0.25).is_empty());
    }

    #[test]
    fn always_colliding_element_is_bad() {
        let n = 1 << 10;
        // identity permutations: element 1 permanently collides with 0
        let hs: Vec<Hashing<f64>> = (0..16).map(|_| hashing_with(1, 0, n, 64)).collect();
        let s: BTreeSet<usize> = [0, 1, 500].into_iter().collect();
        let target: BTreeSet<usize> = [0].into_iter().collect();
        let bad = find_bad_elements(&s, &target, &hs, 4, 0.25);
        assert!(bad.contains(&1));
        assert!(!bad.contains(&500));
    }

    #[test]
    fn bad_elements_match_brute_force() {
        let n = 1 << 10;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hs: Vec<Hashing<f64>> = (0..16)
            .map(|_| {
                let bank = FilterBank::<f64>::new();
                let filt = bank.get(n, 64, 8, DEFAULT_C_F).unwrap();
                Hashing::new(Permutation::random(&mut rng, n, None), filt).unwrap()
            })
            .collect();
        let s: BTreeSet<usize> = (0..48).map(|_| rng.gen_range(0..n)).collect();
        let target: BTreeSet<usize> = s.iter().copied().take(8).collect();
        let delta = 0.25;
        let fast = find_bad_elements(&s, &target, &hs, 16, delta);
        let threshold = (hs.len() as f64).powf(1.0 - delta);
        let mut slow = BTreeSet::new();
        for &a in &s {
            let mut cnt = 0;
            for h in &hs {
                if target.iter().any(|&b| b != a && collides(a, b, h, 16)) {
                    cnt += 1;
                }
            }
            if cnt as f64 > threshold {
                slow.insert(a);
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn circular_index_matches_naive() {
        let n = 1 << 12;
        let h = hashing_with(1234 * 2 + 1, 99, n, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let set: BTreeSet<usize> = (0..64).map(|_| rng.gen_range(0..n)).collect();
        let index = CircularIndex::new(&h, &set);
        let positions: Vec<usize> = set.iter().map(|&i| h.perm().apply(i)).collect();
        for _ in 0..1000 {
            let center = rng.gen_range(0..n);
            let radius = rng.gen_range(0..n / 2);
            let naive = positions
                .iter()
                .filter(|&&p| {
                    let d = (p as i64 - center as i64).rem_euclid(n as i64);
                    d.min(n as i64 - d) <= radius as i64
                })
                .count();
            assert_eq!(index.count_within(center, radius), naive);
        }
    }

    #[test]
    fn singleton_terminates_immediately() {
        let n = 1 << 12;
        let schedule = PartitionSchedule::defaults(n, 1).unwrap();
        assert_eq!(schedule.rounds, 1);
        let bank = FilterBank::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let hashings =
            sample_hashings(&schedule, n, 8, DEFAULT_C_F, &bank, &mut rng, None).unwrap();
        let s: BTreeSet<usize> = [7].into_iter().collect();
        let p = construct_partition(&s, &schedule, &hashings).unwrap();
        assert_eq!(p.sets[0], s);
        assert!(verify_partition(&p, &s, &hashings));
    }

    #[test]
    fn empty_set_verifies() {
        let n = 1 << 12;
        let schedule = PartitionSchedule::defaults(n, 4).unwrap();
        let bank = FilterBank::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let hashings =
            sample_hashings(&schedule, n, 8, DEFAULT_C_F, &bank, &mut rng, None).unwrap();
        let p = IsolatingPartition {
            sets: vec![BTreeSet::new(); schedule.rounds],
            schedule: schedule.clone(),
        };
        assert!(verify_partition(&p, &BTreeSet::new(), &hashings));
    }

    #[test]
    fn planted_violation_fails_verification() {
        let n = 1 << 12;
        let schedule = PartitionSchedule::defaults(n, 8).unwrap();
        let bank = FilterBank::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        // identity-ish permutations so adjacent elements always crowd
        let mut hashings =
            sample_hashings(&schedule, n, 8, DEFAULT_C_F, &bank, &mut rng, None).unwrap();
        let filt = bank.get(n, schedule.buckets[0], 8, DEFAULT_C_F).unwrap();
        hashings[0] =
            vec![
                Hashing::new(Permutation::new(1, 0, n).unwrap(), filt).unwrap();
                schedule.repetitions[0]
            ];
        let s: BTreeSet<usize> = [100, 101].into_iter().collect(); // adjacent: crowded
        let p = IsolatingPartition {
            sets: {
                let mut sets = vec![BTreeSet::new(); schedule.rounds];
                sets[0] = s.clone();
                sets
            },
            schedule: schedule.clone(),
        };
        assert!(!verify_partition(&p, &s, &hashings));
    }

    #[test]
    fn strided_support_settles_in_one_round() {
        let n = 1 << 14;
        let k = 64;
        let schedule = PartitionSchedule::new(n, k, 0.25, 5, 4096, 3, 4).unwrap();
        let bank = FilterBank::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let hashings =
            sample_hashings(&schedule, n, 8, DEFAULT_C_F, &bank, &mut rng, None).unwrap();
        let s: BTreeSet<usize> = (0..k).map(|j| j * (n / k)).collect();
        let p = construct_partition(&s, &schedule, &hashings).unwrap();
        assert_eq!(p.sets[0].len(), k);
        assert!(verify_partition(&p, &s, &hashings));
    }

    #[test]
    fn construct_agrees_with_verifier_across_seeds() {
        // Partition logic never evaluates filter values, so F = 2 keeps
        // large-n filter construction cheap here.
        let n = 1 << 20;
        let k = 48;
        let schedule = PartitionSchedule::defaults(n, k).unwrap();
        let bank = FilterBank::<f64>::new();
        let mut successes = 0;
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
            let s: BTreeSet<usize> = {
                let mut set = BTreeSet::new();
                while set.len() < k {
                    set.insert(rng.gen_range(0..n));
                }
                set
            };
            let hashings =
                sample_hashings(&schedule, n, 2, DEFAULT_C_F, &bank, &mut rng, None).unwrap();
            if let Ok(p) = construct_partition(&s, &schedule, &hashings) {
                successes += 1;
                assert!(verify_partition(&p, &s, &hashings), "seed {seed}");
            }
        }
        assert!(successes >= 40, "only {successes}/50 succeeded");
    }
}
