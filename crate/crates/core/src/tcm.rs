//! Four-state trellis-coded modulation with one input bit per real
//! amplitude symbol.
//!
//! For input bit `b_k` the encoder forms the window
//! `b = [b_k, b_{k-1}, b_{k-2}]` and emits
//!
//! ```text
//! s_k = ((-1)^(g11 . b) - 3 (-1)^(g12 . b)) / 2   in {-2, -1, 1, 2}
//! ```
//!
//! Consecutive real outputs are paired into complex symbols
//! `(s_{2t} + j s_{2t+1}) / sqrt(5)`, which have unit average energy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::c64;
use crate::error::{Error, Result};

/// Scale that brings the `{-2, -1, 1, 2}` alphabet to unit complex energy.
pub const LEVEL_SCALE: f64 = 0.447_213_595_499_958; // 1/sqrt(5)

const NUM_STATES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TcmConfig {
    pub g11: [u8; 3],
    pub g12: [u8; 3],
}

impl Default for TcmConfig {
    fn default() -> Self {
        TcmConfig {
            g11: [0, 1, 0],
            g12: [1, 1, 1],
        }
    }
}

/// State holds `(b_{k-1}, b_{k-2})` as `b_{k-1} << 1 | b_{k-2}`.
#[derive(Debug, Clone, Copy)]
struct Branch {
    level: i8,
    next: u8,
}

fn parity(g: &[u8; 3], window: [u8; 3]) -> u8 {
    g.iter().zip(window).fold(0, |acc, (g, b)| acc ^ (g & b & 1))
}

impl TcmConfig {
    fn branch(&self, state: u8, bit: u8) -> Branch {
        let window = [bit & 1, state >> 1, state & 1];
        let sign = |p: u8| if p == 0 { 1 } else { -1 };
        let level = (sign(parity(&self.g11, window)) - 3 * sign(parity(&self.g12, window))) / 2;
        Branch {
            level: level as i8,
            next: ((bit & 1) << 1) | (state >> 1),
        }
    }

    /// Unnormalized real outputs, one per input bit, from the zero state.
    pub fn encode_levels(&self, bits: &[u8]) -> Vec<i8> {
        let mut state = 0u8;
        bits.iter()
            .map(|&b| {
                let br = self.branch(state, b);
                state = br.next;
                br.level
            })
            .collect()
    }

    /// Encodes `2K` bits into `K` unit-energy complex symbols.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<c64>> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::OddBitCount(bits.len()));
        }
        Ok(self
            .encode_levels(bits)
            .chunks_exact(2)
            .map(|p| c64::new(p[0] as f64, p[1] as f64) * LEVEL_SCALE)
            .collect())
    }

    /// Maximum-likelihood sequence decoding of `received ~ scale * encode(bits) + noise`.
    ///
    /// Real and imaginary parts are consecutive trellis steps. The trellis
    /// starts in the zero state and is traced back from the best final state.
    pub fn decode(&self, received: &[c64], scale: f64) -> Result<Vec<u8>> {
        if received.is_empty() {
            return Err(Error::EmptyInput);
        }
        let reals: Vec<f64> = received.iter().flat_map(|z| [z.re, z.im]).collect();
        Ok(self.decode_reals(&reals, scale * LEVEL_SCALE))
    }

    /// Viterbi over a real sequence where level `s` is observed as `amp * s`.
    pub fn decode_reals(&self, r: &[f64], amp: f64) -> Vec<u8> {
        let branches: Vec<[Branch; 2]> = (0..NUM_STATES as u8)
            .map(|s| [self.branch(s, 0), self.branch(s, 1)])
            .collect();
        let mut metric = [f64::INFINITY; NUM_STATES];
        metric[0] = 0.0;
        // survivor[k][next] = (previous state, input bit)
        let mut survivors: Vec<[(u8, u8); NUM_STATES]> = Vec::with_capacity(r.len());
        for &obs in r {
            let mut next_metric = [f64::INFINITY; NUM_STATES];
            let mut surv = [(0u8, 0u8); NUM_STATES];
            for s in 0..NUM_STATES {
                if metric[s].is_infinite() {
                    continue;
                }
                for (bit, br) in branches[s].iter().enumerate() {
                    let e = obs - amp * br.level as f64;
                    let m = metric[s] + e * e;
                    let n = br.next as usize;
                    if m < next_metric[n] {
                        next_metric[n] = m;
                        surv[n] = (s as u8, bit as u8);
                    }
                }
            }
            metric = next_metric;
            survivors.push(surv);
        }
        let mut state = (0..NUM_STATES)
            .fold(0, |best, s| if metric[s] < metric[best] { s } else { best });
        let mut bits = vec![0u8; r.len()];
        for k in (0..r.len()).rev() {
            let (prev, bit) = survivors[k][state];
            bits[k] = bit;
            state = prev as usize;
        }
        bits
    }

    /// Squared free Euclidean distance of the unnormalized code: the
    /// smallest squared distance between two paths that leave a common
    /// state with different inputs and later meet again. Dijkstra over the
    /// product trellis.
    pub fn dfree_squared(&self) -> f64 {
        #[derive(PartialEq)]
        struct Node(f64, usize);
        impl Eq for Node {}
        impl PartialOrd for Node {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Node {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }

        let pair = |a: u8, b: u8| a as usize * NUM_STATES + b as usize;
        let mut dist = vec![f64::INFINITY; NUM_STATES * NUM_STATES];
        let mut heap = BinaryHeap::new();
        let mut best = f64::INFINITY;
        let relax = |a: Branch, b: Branch, base: f64, dist: &mut Vec<f64>, heap: &mut BinaryHeap<Node>, best: &mut f64| {
            let d = (a.level - b.level) as f64;
            let cost = base + d * d;
            if a.next == b.next {
                *best = best.min(cost);
            } else {
                let p = pair(a.next, b.next);
                if cost < dist[p] {
                    dist[p] = cost;
                    heap.push(Node(cost, p));
                }
            }
        };
        for s in 0..NUM_STATES as u8 {
            relax(self.branch(s, 0), self.branch(s, 1), 0.0, &mut dist, &mut heap, &mut best);
        }
        while let Some(Node(d, p)) = heap.pop() {
            if d > dist[p] || d >= best {
                continue;
            }
            let (a, b) = ((p / NUM_STATES) as u8, (p % NUM_STATES) as u8);
            for ba in 0..2 {
                for bb in 0..2 {
                    relax(self.branch(a, ba), self.branch(b, bb), d, &mut dist, &mut heap, &mut best);
                }
            }
        }
        best
    }

    pub fn dfree(&self) -> f64 {
        self.dfree_squared().sqrt()
    }
}

/// Encodes with the default code.
pub fn encode(bits: &[u8]) -> Result<Vec<c64>> {
    TcmConfig::default().encode(bits)
}

/// Decodes with the default code.
pub fn viterbi_decode(received: &[c64], scale: f64) -> Result<Vec<u8>> {
    TcmConfig::default().decode(received, scale)
}

/// Free distance of the default code, unnormalized alphabet.
pub fn compute_dfree() -> f64 {
    TcmConfig::default().dfree()
}
