//! Reference allocators: random, greedy and maximum-weight matching, each
//! placing at most one group per channel.

use rand::seq::index;

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::gains::GainTable;
use crate::metrics::{group_sinr, Assignment};
use crate::power::hungarian_match;
use crate::rng::{substream, tag};

/// `min(C, G)` groups drawn uniformly without replacement; the `i`-th drawn
/// group takes channel `i`.
pub fn random_allocate(num_channels: usize, num_groups: usize, seed: u64) -> Assignment {
    let mut a = Assignment::new(num_channels, num_groups);
    let mut rng = substream(seed, &[tag::RANDOM_ALLOC]);
    let picks = index::sample(&mut rng, num_groups, num_channels.min(num_groups));
    for (k, g) in picks.into_iter().enumerate() {
        a.assign(g, k);
    }
    a
}

/// Strongest gain from CU `k` to any receiver of group `g`.
pub fn cu_to_worst_receiver(gains: &GainTable, k: usize, g: usize) -> f64 {
    (0..gains.num_receivers(g))
        .map(|r| gains.cu_rx(k, g, r))
        .fold(0.0, f64::max)
}

/// Repeatedly pairs the unmatched CU and group with the weakest
/// CU-to-receiver interference; ties go to the lowest `(k, g)`.
pub fn greedy_allocate(gains: &GainTable) -> Assignment {
    let (c, n) = (gains.num_channels(), gains.num_groups());
    let mut a = Assignment::new(c, n);
    let mut cu_free = vec![true; c];
    for _ in 0..c.min(n) {
        let mut best: Option<(f64, usize, usize)> = None;
        for k in (0..c).filter(|&k| cu_free[k]) {
            for g in (0..n).filter(|&g| a.channel_of(g).is_none()) {
                let w = cu_to_worst_receiver(gains, k, g);
                if best.is_none_or(|(b, _, _)| w < b) {
                    best = Some((w, k, g));
                }
            }
        }
        let Some((_, k, g)) = best else { break };
        cu_free[k] = false;
        a.assign(g, k);
    }
    a
}

/// `w[k][g]`: CU rate plus multicast rate when group `g` alone shares
/// channel `k`, everything at full power.
pub fn bipartite_weights(gains: &GainTable, config: &ScenarioConfig) -> Result<Vec<Vec<f64>>> {
    let radio = config.radio();
    let (p_c, p_g) = (config.p_c_max_w(), config.p_g_max_w());
    let mut mg = vec![0.0; gains.num_groups()];
    (0..gains.num_channels())
        .map(|k| {
            (0..gains.num_groups())
                .map(|g| {
                    mg.fill(0.0);
                    mg[g] = p_g;
                    let cu = p_c * gains.cu_bs(k) / (p_g * gains.mg_bs(g, k) + radio.noise_w);
                    let d = group_sinr(g, k, &[g], &mg, p_c, gains, radio.noise_w)?;
                    Ok(radio.rate(cu) + radio.rate(d))
                })
                .collect()
        })
        .collect()
}

/// Maximum-weight matching of channels to groups on [`bipartite_weights`].
pub fn bipartite_allocate(gains: &GainTable, config: &ScenarioConfig) -> Result<Assignment> {
    let m = hungarian_match(&bipartite_weights(gains, config)?)?;
    let mut a = Assignment::new(gains.num_channels(), gains.num_groups());
    for (k, g) in m.group_of.iter().enumerate() {
        if let Some(g) = g {
            a.assign(*g, k);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_selection_sizes() {
        let a = random_allocate(3, 2, 1);
        assert_eq!(a.assigned_count(), 2);
        let b = random_allocate(3, 10, 1);
        assert_eq!(b.assigned_count(), 3);
        assert!((0..3).all(|k| b.group_count(k) == 1));
        assert_eq!(random_allocate(3, 10, 7), random_allocate(3, 10, 7));
    }

    #[test]
    fn random_selection_is_spread() {
        let mut seen = [0usize; 6];
        for seed in 0..600 {
            for g in 0..6 {
                if random_allocate(2, 6, seed).channel_of(g).is_some() {
                    seen[g] += 1;
                }
            }
        }
        // each group is picked with probability 1/3
        assert!(seen.iter().all(|&n| (150..250).contains(&n)), "{seen:?}");
    }

    #[test]
    fn greedy_one_by_one() {
        let mut t = GainTable::zeros(1, &[1]);
        t.set_cu_rx(0, 0, 0, 5.0);
        let a = greedy_allocate(&t);
        assert_eq!(a.channel_of(0), Some(0));
    }

    /// Interference gains CU k -> worst receiver of group g:
    ///   k0: g0 = 3, g1 = 1;  k1: g0 = 2, g1 = 4.
    /// Smallest is (k0, g1) = 1, leaving (k1, g0).
    #[test]
    fn greedy_two_by_two() {
        let mut t = GainTable::zeros(2, &[2, 1]);
        t.set_cu_rx(0, 0, 0, 3.0);
        t.set_cu_rx(0, 0, 1, 0.5);
        t.set_cu_rx(0, 1, 0, 1.0);
        t.set_cu_rx(1, 0, 0, 2.0);
        t.set_cu_rx(1, 1, 0, 4.0);
        let a = greedy_allocate(&t);
        assert_eq!(a.channel_of(1), Some(0));
        assert_eq!(a.channel_of(0), Some(1));
    }

    #[test]
    fn greedy_ties_go_to_lowest_index() {
        let t = GainTable::zeros(2, &[1, 1]);
        let a = greedy_allocate(&t);
        assert_eq!(a.channel_of(0), Some(0));
        assert_eq!(a.channel_of(1), Some(1));
    }

    #[test]
    fn bipartite_matches_the_best_pairs() {
        let mut t = GainTable::zeros(2, &[1, 1]);
        for k in 0..2 {
            t.set_cu_bs(k, 1e-10);
        }
        // group 0 is much better on channel 1, group 1 on channel 0
        t.set_mg_rx(0, 0, 0, 0, 1e-12);
        t.set_mg_rx(0, 0, 0, 1, 1e-7);
        t.set_mg_rx(1, 1, 0, 0, 1e-7);
        t.set_mg_rx(1, 1, 0, 1, 1e-12);
        let a = bipartite_allocate(&t, &ScenarioConfig::default()).unwrap();
        assert_eq!(a.channel_of(0), Some(1));
        assert_eq!(a.channel_of(1), Some(0));
    }
}
