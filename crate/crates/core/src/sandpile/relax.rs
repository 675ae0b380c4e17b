use std::collections::{HashMap, VecDeque};

use super::state::{Odometer, RelaxationResult, SandState, Topology, NO_SITE};
use super::EngineError;

/// Toppling budget after which a relaxation is abandoned. Relaxations on a
/// finite domain always stop, so hitting it means a bug.
pub const DEFAULT_CEILING: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelaxOptions {
    pub ceiling: u64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { ceiling: DEFAULT_CEILING }
    }
}

/// Reference relaxation: row-major sweeps, one toppling per unstable site
/// per visit, until a sweep finds nothing to topple.
pub fn relax_naive(state: &SandState, opts: &RelaxOptions) -> Result<RelaxationResult, EngineError> {
    let domain = state.domain().clone();
    let topo = Topology::new(&domain);
    let mut h: Vec<u64> = state.heights().iter().map(|&x| x as u64).collect();
    let mut odo = vec![0u64; h.len()];
    let (mut total, mut lost) = (0u64, 0u64);
    loop {
        let mut toppled = false;
        for i in 0..h.len() {
            if h[i] < 4 {
                continue;
            }
            toppled = true;
            h[i] -= 4;
            odo[i] += 1;
            total += 1;
            if total > opts.ceiling {
                return Err(EngineError::NonTermination { topplings: total });
            }
            for &n in topo.of(i) {
                if n == NO_SITE {
                    lost += 1;
                } else {
                    h[n as usize] += 1;
                }
            }
        }
        if !toppled {
            break;
        }
    }
    finish(state, h, odo, total, lost)
}

/// Worklist relaxation with bulk topplings: a popped site fires
/// `⌊φ(v)/4⌋` times at once. Produces the same result as [`relax_naive`].
pub fn relax_queue(state: &SandState, opts: &RelaxOptions) -> Result<RelaxationResult, EngineError> {
    relax_queue_observed(state, opts, 0, |_| {})
}

/// [`relax_queue`] that hands the current heights to `observe` every
/// `every` bulk topplings (never when `every == 0`).
pub fn relax_queue_observed<F>(
    state: &SandState,
    opts: &RelaxOptions,
    every: u64,
    mut observe: F,
) -> Result<RelaxationResult, EngineError>
where
    F: FnMut(&[u32]),
{
    let domain = state.domain().clone();
    let topo = Topology::new(&domain);
    let mut h = CompactHeights::from_heights(state.heights());
    let n = h.len();
    let mut odo = vec![0u64; n];
    let (mut total, mut lost) = (0u64, 0u64);
    let mut queued = vec![false; n];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for i in 0..n {
        if h.get(i) >= 4 {
            queued[i] = true;
            queue.push_back(i as u32);
        }
    }
    let mut fired = 0u64;
    while let Some(v) = queue.pop_front() {
        let v = v as usize;
        queued[v] = false;
        let hv = h.get(v);
        if hv < 4 {
            continue;
        }
        let t = hv / 4;
        h.set(v, hv - 4 * t);
        odo[v] += t;
        total += t;
        if total > opts.ceiling {
            return Err(EngineError::NonTermination { topplings: total });
        }
        for &w in topo.of(v) {
            if w == NO_SITE {
                lost += t;
                continue;
            }
            let w = w as usize;
            let hw = h.get(w) + t;
            h.set(w, hw);
            if hw >= 4 && !queued[w] {
                queued[w] = true;
                queue.push_back(w as u32);
            }
        }
        fired += 1;
        if every > 0 && fired % every == 0 {
            observe(&h.to_u32());
        }
    }
    let heights: Vec<u64> = (0..n).map(|i| h.get(i)).collect();
    finish(state, heights, odo, total, lost)
}

fn finish(
    state: &SandState,
    heights: Vec<u64>,
    odo: Vec<u64>,
    total: u64,
    lost: u64,
) -> Result<RelaxationResult, EngineError> {
    let domain = state.domain().clone();
    let heights = heights.into_iter().map(|x| x as u32).collect();
    Ok(RelaxationResult {
        final_state: SandState::new(domain.clone(), heights)?,
        odometer: Odometer::new(domain, odo)?,
        topplings_total: total,
        grains_lost: lost,
    })
}

const SPILL_MARK: u8 = u8::MAX;
const INLINE_MAX: u64 = 250;

/// Byte-per-site heights; values above 250 move to a side table.
struct CompactHeights {
    bytes: Vec<u8>,
    spill: HashMap<usize, u64>,
}

impl CompactHeights {
    fn from_heights(src: &[u32]) -> Self {
        let mut out = Self { bytes: vec![0; src.len()], spill: HashMap::new() };
        for (i, &v) in src.iter().enumerate() {
            out.set(i, v as u64);
        }
        out
    }

    fn len(&self) -> usize {
        self.bytes.len()
    }

    #[inline]
    fn get(&self, i: usize) -> u64 {
        match self.bytes[i] {
            SPILL_MARK => self.spill[&i],
            b => b as u64,
        }
    }

    #[inline]
    fn set(&mut self, i: usize, v: u64) {
        if v <= INLINE_MAX {
            if self.bytes[i] == SPILL_MARK {
                self.spill.remove(&i);
            }
            self.bytes[i] = v as u8;
        } else {
            self.bytes[i] = SPILL_MARK;
            self.spill.insert(i, v);
        }
    }

    fn to_u32(&self) -> Vec<u32> {
        (0..self.len()).map(|i| self.get(i) as u32).collect()
    }
}
