//! SINR, rate, throughput-gain and outage formulas.
//!
//! Everything here is linear scale: powers in watts, gains dimensionless,
//! rates in bits/s.

use std::collections::BTreeSet;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gains::GainTable;

/// Noise power and channel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radio {
    pub noise_w: f64,
    pub bandwidth_hz: f64,
}

impl Radio {
    /// Shannon rate `B log2(1 + sinr)`.
    pub fn rate(&self, sinr: f64) -> f64 {
        self.bandwidth_hz * sinr.ln_1p() / std::f64::consts::LN_2
    }
}

/// Which channel, if any, each multicast group shares. A group uses at
/// most one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    num_channels: usize,
    channel_of: Vec<Option<usize>>,
}

impl Assignment {
    pub fn new(num_channels: usize, num_groups: usize) -> Self {
        Assignment {
            num_channels,
            channel_of: vec![None; num_groups],
        }
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn num_groups(&self) -> usize {
        self.channel_of.len()
    }

    /// Puts group `g` on channel `k`, moving it if it was elsewhere.
    pub fn assign(&mut self, g: usize, k: usize) {
        assert!(k < self.num_channels, "channel {k} out of range");
        self.channel_of[g] = Some(k);
    }

    pub fn unassign(&mut self, g: usize) {
        self.channel_of[g] = None;
    }

    pub fn channel_of(&self, g: usize) -> Option<usize> {
        self.channel_of[g]
    }

    /// Binary sharing indicator `a[g][k]`.
    pub fn shares(&self, g: usize, k: usize) -> bool {
        self.channel_of[g] == Some(k)
    }

    /// Groups on channel `k`, ascending.
    pub fn groups_on(&self, k: usize) -> Vec<usize> {
        (0..self.channel_of.len())
            .filter(|&g| self.channel_of[g] == Some(k))
            .collect()
    }

    pub fn group_count(&self, k: usize) -> usize {
        self.channel_of.iter().filter(|c| **c == Some(k)).count()
    }

    pub fn unassigned(&self) -> Vec<usize> {
        (0..self.channel_of.len())
            .filter(|&g| self.channel_of[g].is_none())
            .collect()
    }

    pub fn assigned_count(&self) -> usize {
        self.channel_of.iter().filter(|c| c.is_some()).count()
    }

    /// Dense `a[g][k]` matrix.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.channel_of
            .iter()
            .map(|c| (0..self.num_channels).map(|k| u8::from(*c == Some(k))).collect())
            .collect()
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Channel {
            cu: usize,
            mgs: Vec<usize>,
        }
        impl Serialize for Channel {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut st = s.serialize_struct("Channel", 2)?;
                st.serialize_field("cu", &self.cu)?;
                st.serialize_field("mgs", &self.mgs)?;
                st.end()
            }
        }
        let mut map = serializer.serialize_map(Some(self.num_channels + 1))?;
        for k in 0..self.num_channels {
            map.serialize_entry(
                &format!("channel_{k}"),
                &Channel {
                    cu: k,
                    mgs: self.groups_on(k),
                },
            )?;
        }
        map.serialize_entry("unassigned", &self.unassigned())?;
        map.end()
    }
}

/// Transmit powers in watts: `cu[k]` on channel `k`, `mg[g]` on the channel
/// group `g` uses.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    pub cu: Vec<f64>,
    pub mg: Vec<f64>,
}

impl PowerProfile {
    pub fn uniform(num_channels: usize, num_groups: usize, p_c: f64, p_g: f64) -> Self {
        PowerProfile {
            cu: vec![p_c; num_channels],
            mg: vec![p_g; num_groups],
        }
    }
}

fn round_sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

impl Serialize for PowerProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PowerProfile", 2)?;
        let cu: Vec<f64> = self.cu.iter().copied().map(round_sig12).collect();
        let mg: Vec<f64> = self.mg.iter().copied().map(round_sig12).collect();
        st.serialize_field("cu_watts", &cu)?;
        st.serialize_field("mg_watts", &mg)?;
        st.end()
    }
}

/// Total MG power received at the BS on channel `k` from `groups`.
pub fn bs_interference(k: usize, groups: &[usize], mg_power: &[f64], gains: &GainTable) -> f64 {
    groups.iter().map(|&g| mg_power[g] * gains.mg_bs(g, k)).sum()
}

/// SINR of receiver `r` of group `g` on channel `k` when `cochannel` (which
/// may contain `g` itself) share the channel with CU power `p_c`.
#[allow(clippy::too_many_arguments)]
pub fn receiver_sinr(
    g: usize,
    r: usize,
    k: usize,
    cochannel: &[usize],
    mg_power: &[f64],
    p_c: f64,
    gains: &GainTable,
    noise_w: f64,
) -> f64 {
    let interference: f64 = cochannel
        .iter()
        .filter(|&&j| j != g)
        .map(|&j| mg_power[j] * gains.mg_rx(j, g, r, k))
        .sum::<f64>()
        + p_c * gains.cu_rx(k, g, r)
        + noise_w;
    mg_power[g] * gains.own(g, r, k) / interference
}

/// Worst-receiver SINR of group `g` with an explicit co-channel set.
pub fn group_sinr(
    g: usize,
    k: usize,
    cochannel: &[usize],
    mg_power: &[f64],
    p_c: f64,
    gains: &GainTable,
    noise_w: f64,
) -> Result<f64> {
    let n = gains.num_receivers(g);
    if n == 0 {
        return Err(Error::EmptyGroup(g));
    }
    Ok((0..n)
        .map(|r| receiver_sinr(g, r, k, cochannel, mg_power, p_c, gains, noise_w))
        .fold(f64::INFINITY, f64::min))
}

/// SINR of CU `k` at the BS.
pub fn sinr_cu(
    k: usize,
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    radio: &Radio,
) -> f64 {
    let i = bs_interference(k, &assignment.groups_on(k), &powers.mg, gains);
    powers.cu[k] * gains.cu_bs(k) / (i + radio.noise_w)
}

pub fn rate_cu(
    k: usize,
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    radio: &Radio,
) -> f64 {
    radio.rate(sinr_cu(k, assignment, powers, gains, radio))
}

/// CU rate without any sharing MG.
pub fn rate_cu_solo(k: usize, powers: &PowerProfile, gains: &GainTable, radio: &Radio) -> f64 {
    radio.rate(powers.cu[k] * gains.cu_bs(k) / radio.noise_w)
}

/// Worst-receiver SINR of group `g` on channel `k`; the interferers are the
/// other groups `assignment` puts on `k`, plus CU `k`.
pub fn sinr_mg_worst(
    g: usize,
    k: usize,
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    radio: &Radio,
) -> Result<f64> {
    group_sinr(
        g,
        k,
        &assignment.groups_on(k),
        &powers.mg,
        powers.cu[k],
        gains,
        radio.noise_w,
    )
}

pub fn rate_mg(
    g: usize,
    k: usize,
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    radio: &Radio,
) -> Result<f64> {
    Ok(radio.rate(sinr_mg_worst(g, k, assignment, powers, gains, radio)?))
}

/// Throughput gain of the groups sharing channel `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputGain {
    /// Multicast rates added minus the CU rate lost.
    pub total: f64,
    /// Sum of multicast rates on the channel.
    pub mg_rate: f64,
    /// CU rate lost to interference, solo rate minus shared rate.
    pub cu_loss: f64,
}

pub fn throughput_gain(
    k: usize,
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    radio: &Radio,
) -> Result<ThroughputGain> {
    let groups = assignment.groups_on(k);
    throughput_gain_for(k, &groups, &powers.mg, powers.cu[k], gains, radio)
}

/// [`throughput_gain`] with an explicit group set.
pub fn throughput_gain_for(
    k: usize,
    groups: &[usize],
    mg_power: &[f64],
    p_c: f64,
    gains: &GainTable,
    radio: &Radio,
) -> Result<ThroughputGain> {
    let mut mg_rate = 0.0;
    for &g in groups {
        mg_rate += radio.rate(group_sinr(g, k, groups, mg_power, p_c, gains, radio.noise_w)?);
    }
    let solo = radio.rate(p_c * gains.cu_bs(k) / radio.noise_w);
    let shared = radio
        .rate(p_c * gains.cu_bs(k) / (bs_interference(k, groups, mg_power, gains) + radio.noise_w));
    let cu_loss = solo - shared;
    Ok(ThroughputGain {
        total: mg_rate - cu_loss,
        mg_rate,
        cu_loss,
    })
}

/// Smallest CU power meeting `r_min` bits/s against the MG interference on
/// channel `k`.
pub fn p_c_min(
    k: usize,
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    radio: &Radio,
    r_min: f64,
) -> Result<f64> {
    p_c_min_for(k, &assignment.groups_on(k), &powers.mg, gains, radio, r_min)
}

pub fn p_c_min_for(
    k: usize,
    groups: &[usize],
    mg_power: &[f64],
    gains: &GainTable,
    radio: &Radio,
    r_min: f64,
) -> Result<f64> {
    let h = gains.cu_bs(k);
    if h <= 0.0 {
        return Err(Error::BlockedCuLink(k));
    }
    let target = (r_min / radio.bandwidth_hz).exp2() - 1.0;
    Ok(target * (radio.noise_w + bs_interference(k, groups, mg_power, gains)) / h)
}

/// Interference budget of CU `k`: the largest MG power at the BS that still
/// lets the CU reach `r_min` at power `p_c`. Infinite when `r_min` is 0.
pub fn interference_budget(k: usize, p_c: f64, gains: &GainTable, radio: &Radio, r_min: f64) -> f64 {
    let target = (r_min / radio.bandwidth_hz).exp2() - 1.0;
    if target <= 0.0 {
        return f64::INFINITY;
    }
    p_c * gains.cu_bs(k) / target - radio.noise_w
}

/// Interference-limited CU rates (bits/s/Hz, no noise) against the
/// lower bound obtained by raising every MG to full power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceBound {
    /// `sum_k log2(p_c h_cb / sum_g p_g h_gb)`.
    pub interference_limited: f64,
    /// `sum_k [log2(p_c h_cb) - log2(sum_g P_g^max h_gb)]`.
    pub bound: f64,
}

/// Sums over the channels that carry at least one group; a channel without
/// interferers has no interference-limited rate.
pub fn prop1_lower_bound(
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    p_g_max: f64,
) -> Result<InterferenceBound> {
    let mut rate = 0.0;
    let mut bound = 0.0;
    for k in 0..assignment.num_channels() {
        let groups = assignment.groups_on(k);
        if groups.is_empty() {
            continue;
        }
        let signal = powers.cu[k] * gains.cu_bs(k);
        let actual = bs_interference(k, &groups, &powers.mg, gains);
        let worst: f64 = groups.iter().map(|&g| p_g_max * gains.mg_bs(g, k)).sum();
        if !(signal > 0.0 && actual > 0.0 && worst > 0.0) {
            return Err(Error::NonPositiveLog(k));
        }
        rate += (signal / actual).log2();
        bound += signal.log2() - worst.log2();
    }
    Ok(InterferenceBound {
        interference_limited: rate,
        bound,
    })
}

/// The summed per-group form `sum_k log2(p_c h_cb) - sum_k sum_g
/// log2(P_g^max h_gb)`. It coincides with [`prop1_lower_bound`] only when
/// every channel carries a single group.
pub fn prop1_per_group_form(
    assignment: &Assignment,
    powers: &PowerProfile,
    gains: &GainTable,
    p_g_max: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..assignment.num_channels() {
        let groups = assignment.groups_on(k);
        if groups.is_empty() {
            continue;
        }
        let signal = powers.cu[k] * gains.cu_bs(k);
        if signal <= 0.0 {
            return Err(Error::NonPositiveLog(k));
        }
        total += signal.log2();
        for &g in &groups {
            let x = p_g_max * gains.mg_bs(g, k);
            if x <= 0.0 {
                return Err(Error::NonPositiveLog(k));
            }
            total -= x.log2();
        }
    }
    Ok(total)
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos, g = 7, n = 9) with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        let series = LANCZOS_COEF[1..]
            .iter()
            .enumerate()
            .fold(LANCZOS_COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * series
    }
}

/// `pi Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)`.
pub fn outage_chi(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::OutageExponent(alpha));
    }
    let delta = 2.0 / alpha;
    Ok(std::f64::consts::PI * gamma(1.0 + delta) * gamma(1.0 - delta))
}

/// Outage probability of a receiver at distance `d` from its transmitter
/// (power `p_g`) under Rayleigh fading, with CU interferers (power `p_c`)
/// and MG interferers (power `p_g`) forming Poisson processes of densities
/// `lambda_c` and `lambda_g`:
///
/// `1 - exp(-chi gamma^(2/alpha) d^2 [lambda_c (p_c/p_g)^(2/alpha) + lambda_g])`.
pub fn outage_probability(
    gamma_o: f64,
    alpha: f64,
    d: f64,
    lambda_c: f64,
    lambda_g: f64,
    p_c: f64,
    p_g: f64,
) -> Result<f64> {
    let chi = outage_chi(alpha)?;
    let delta = 2.0 / alpha;
    let exponent =
        chi * gamma_o.powf(delta) * d * d * (lambda_c * (p_c / p_g).powf(delta) + lambda_g);
    Ok(-(-exponent).exp_m1())
}

/// Groups on channel `k` as a set, for callers that need membership tests.
pub fn channel_set(assignment: &Assignment, k: usize) -> BTreeSet<usize> {
    assignment.groups_on(k).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radio() -> Radio {
        Radio {
            noise_w: 1e-12,
            bandwidth_hz: 1e6,
        }
    }

    /// One channel, one group with a single receiver.
    fn single() -> (GainTable, Assignment, PowerProfile) {
        let mut t = GainTable::zeros(1, &[1]);
        t.set_cu_bs(0, 1e-6);
        t.set_mg_bs(0, 0, 1e-6);
        t.set_mg_rx(0, 0, 0, 0, 1e-5);
        t.set_cu_rx(0, 0, 0, 1e-8);
        let mut a = Assignment::new(1, 1);
        a.assign(0, 0);
        (t, a, PowerProfile { cu: vec![1.0], mg: vec![0.5] })
    }

    #[test]
    fn cu_sinr_examples() {
        let (t, a, p) = single();
        let r = radio();
        let s = sinr_cu(0, &a, &p, &t, &r);
        assert!((s - 1e-6 / (0.5e-6 + 1e-12)).abs() < 1e-9);
        assert!((s - 1.999996).abs() < 1e-6);

        let empty = Assignment::new(1, 1);
        let unit = PowerProfile { cu: vec![1e-12 / 1e-6], mg: vec![0.5] };
        assert!((sinr_cu(0, &empty, &unit, &t, &r) - 1.0).abs() < 1e-12);

        let zero = PowerProfile { cu: vec![0.0], mg: vec![0.5] };
        assert_eq!(sinr_cu(0, &a, &zero, &t, &r), 0.0);
        assert_eq!(rate_cu(0, &a, &zero, &t, &r), 0.0);
    }

    #[test]
    fn rate_examples() {
        let r = radio();
        assert_eq!(r.rate(0.0), 0.0);
        assert!((r.rate(1.0) - 1e6).abs() < 1e-6);
        let (t, _, p) = single();
        let empty = Assignment::new(1, 1);
        assert_eq!(rate_cu(0, &empty, &p, &t, &r), rate_cu_solo(0, &p, &t, &r));
    }

    #[test]
    fn worst_receiver_is_the_minimum() {
        let mut t = GainTable::zeros(1, &[3]);
        let own = [4e-6, 1e-6, 9e-6];
        let cu = [1e-7, 2e-7, 5e-8];
        for r in 0..3 {
            t.set_mg_rx(0, 0, r, 0, own[r]);
            t.set_cu_rx(0, 0, r, cu[r]);
        }
        let mut a = Assignment::new(1, 1);
        a.assign(0, 0);
        let p = PowerProfile { cu: vec![0.2], mg: vec![0.7] };
        let rd = radio();
        let by_hand = (0..3)
            .map(|r| 0.7 * own[r] / (0.2 * cu[r] + 1e-12))
            .fold(f64::INFINITY, f64::min);
        let got = sinr_mg_worst(0, 0, &a, &p, &t, &rd).unwrap();
        assert!((got / by_hand - 1.0).abs() < 1e-12);
        // receiver 1 is the worst: 0.7e-6 / 0.4e-7
        assert!((by_hand - 0.7e-6 / (0.4e-7 + 1e-12)).abs() < 1e-6);

        t.set_mg_rx(0, 0, 2, 0, 0.0);
        assert_eq!(rate_mg(0, 0, &a, &p, &t, &rd).unwrap(), 0.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        let t = GainTable::zeros(1, &[0]);
        let a = Assignment::new(1, 1);
        let p = PowerProfile::uniform(1, 1, 1.0, 1.0);
        assert!(matches!(
            sinr_mg_worst(0, 0, &a, &p, &t, &radio()),
            Err(Error::EmptyGroup(0))
        ));
    }

    #[test]
    fn throughput_gain_examples() {
        let (t, a, p) = single();
        let r = radio();
        let none = Assignment::new(1, 1);
        let g0 = throughput_gain(0, &none, &p, &t, &r).unwrap();
        assert_eq!(g0.total, 0.0);
        assert_eq!(g0.cu_loss, 0.0);

        // Strong own link, weak cross links: the group adds more than the CU loses.
        let mut t = t;
        t.set_mg_bs(0, 0, 1e-10);
        let g = throughput_gain(0, &a, &p, &t, &r).unwrap();
        assert!(g.cu_loss > 0.0);
        assert!(g.total > 0.0);
        let identity = g.mg_rate - g.cu_loss;
        assert!((g.total - identity).abs() < 1e-6);
        let direct = rate_mg(0, 0, &a, &p, &t, &r).unwrap() + rate_cu(0, &a, &p, &t, &r)
            - rate_cu_solo(0, &p, &t, &r);
        assert!((g.total - direct).abs() < 1e-6);
    }

    #[test]
    fn p_c_min_examples() {
        let (t, a, p) = single();
        let r = radio();
        assert_eq!(p_c_min(0, &a, &p, &t, &r, 0.0).unwrap(), 0.0);
        let none = Assignment::new(1, 1);
        let v = p_c_min(0, &none, &p, &t, &r, 1e6).unwrap();
        assert!((v - 1e-12 / 1e-6).abs() < 1e-20);

        // The rate at p_c_min equals the target exactly.
        let r_min = 3.3e6;
        let pc = p_c_min(0, &a, &p, &t, &r, r_min).unwrap();
        let at = PowerProfile { cu: vec![pc], mg: p.mg.clone() };
        assert!((rate_cu(0, &a, &at, &t, &r) - r_min).abs() < 1e-3);

        let mut blocked = t.clone();
        blocked.set_cu_bs(0, 0.0);
        assert!(matches!(
            p_c_min(0, &a, &p, &blocked, &r, 1e6),
            Err(Error::BlockedCuLink(0))
        ));
    }

    #[test]
    fn prop1_equality_and_strictness() {
        let (t, a, _) = single();
        let at_max = PowerProfile { cu: vec![1.0], mg: vec![2.0] };
        let b = prop1_lower_bound(&a, &at_max, &t, 2.0).unwrap();
        assert!((b.interference_limited - b.bound).abs() < 1e-12);
        let per_group = prop1_per_group_form(&a, &at_max, &t, 2.0).unwrap();
        assert!((per_group - b.bound).abs() < 1e-12);

        let below = PowerProfile { cu: vec![1.0], mg: vec![1.0] };
        let b = prop1_lower_bound(&a, &below, &t, 2.0).unwrap();
        assert!(b.interference_limited > b.bound);

        let mut z = t.clone();
        z.set_cu_bs(0, 0.0);
        assert!(prop1_lower_bound(&a, &below, &z, 2.0).is_err());
    }

    #[test]
    fn gamma_reference_values() {
        let pi = std::f64::consts::PI;
        let cases = [
            (0.5, pi.sqrt()),
            (1.5, pi.sqrt() / 2.0),
            (1.0, 1.0),
            (5.0, 24.0),
            (0.1, 9.513_507_698_668_732),
            (1.0 / 3.0, 2.678_938_534_707_747_6),
            (1.555_555_555_555_555_6, 0.889_286_732_452_212_9),
            (0.444_444_444_444_444_4, 1.992_893_522_756_922_9),
        ];
        for (x, want) in cases {
            let got = gamma(x);
            assert!(((got - want) / want).abs() < 1e-10, "gamma({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn outage_examples() {
        assert_eq!(outage_probability(0.0, 4.0, 20.0, 1e-5, 1e-5, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(outage_probability(1.0, 4.0, 0.0, 1e-5, 1e-5, 1.0, 1.0).unwrap(), 0.0);
        assert!(outage_probability(1.0, 2.0, 10.0, 1e-5, 1e-5, 1.0, 1.0).is_err());
        assert!(outage_probability(1.0, 1.5, 10.0, 1e-5, 1e-5, 1.0, 1.0).is_err());
        // alpha = 4: chi = pi * Gamma(1.5) * Gamma(0.5) = pi^2 / 2
        let chi = outage_chi(4.0).unwrap();
        assert!((chi - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
        let p = outage_probability(1.0, 4.0, 20.0, 1e-5, 1e-5, 1.0, 1.0).unwrap();
        let want = 1.0 - (-chi * 400.0 * 2e-5_f64).exp();
        assert!((p - want).abs() < 1e-15);
    }

    #[test]
    fn assignment_json_shape() {
        let mut a = Assignment::new(2, 4);
        a.assign(3, 0);
        a.assign(1, 0);
        a.assign(0, 1);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"channel_0":{"cu":0,"mgs":[1,3]},"channel_1":{"cu":1,"mgs":[0]},"unassigned":[2]}"#
        );
        assert_eq!(a.matrix()[3], vec![1, 0]);
    }

    #[test]
    fn power_json_uses_twelve_digits() {
        let p = PowerProfile { cu: vec![1.0 / 3.0], mg: vec![0.0, 2.0e-3] };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"cu_watts":[0.333333333333],"mg_watts":[0.0,0.002]}"#);
    }
}
