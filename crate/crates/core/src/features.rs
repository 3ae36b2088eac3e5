//! State construction: RSI, volume averages, the relative-movement cascade,
//! and assembly of the 27-component feature vector.

use crate::data_ingest::FilteredSeries;
use crate::error::{Error, Result};

pub const BLOCK: usize = 5;
pub const RSI_WINDOW: usize = 15;
pub const VOLUME_RING: usize = 20;
pub const FEATURE_LEN: usize = 27;

/// Five consecutive filtered prices and the volumes preceding each of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketBlock {
    pub prices: [f64; BLOCK],
    pub volumes: [f64; BLOCK],
    /// 1-based block counter; the block covers filtered points
    /// `(index - 1) * 5 .. index * 5`.
    pub index: usize,
}

impl MarketBlock {
    /// Number of complete blocks in a series.
    pub fn count(series: &FilteredSeries) -> usize {
        series.len() / BLOCK
    }

    pub fn from_series(series: &FilteredSeries, index: usize) -> Option<Self> {
        if index == 0 || index * BLOCK > series.len() {
            return None;
        }
        let lo = (index - 1) * BLOCK;
        let mut prices = [0.0; BLOCK];
        let mut volumes = [0.0; BLOCK];
        prices.copy_from_slice(&series.prices[lo..lo + BLOCK]);
        volumes.copy_from_slice(&series.volumes[lo..lo + BLOCK]);
        Some(Self {
            prices,
            volumes,
            index,
        })
    }

    pub fn first_price(&self) -> f64 {
        self.prices[0]
    }

    /// The price trades in this block execute at.
    pub fn last_price(&self) -> f64 {
        self.prices[BLOCK - 1]
    }

    pub fn last_volume(&self) -> f64 {
        self.volumes[BLOCK - 1]
    }
}

/// Iterated relative differences of a 5-price block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmdCascade {
    pub level1: [f64; 4],
    pub level2: [f64; 3],
    pub level3: [f64; 2],
    pub level4: f64,
}

/// Level 1 divides by the (positive) earlier price. Levels 2-4 divide by the
/// magnitude of the earlier term, floored at `denom_floor`, so the sign of
/// the numerator is kept and nothing divides by zero.
pub fn nmd_cascade(pr: &[f64; BLOCK], denom_floor: f64) -> NmdCascade {
    let rel = |next: f64, prev: f64| (next - prev) / prev.abs().max(denom_floor);
    let level1 = [0, 1, 2, 3].map(|i| (pr[i + 1] - pr[i]) / pr[i]);
    let level2 = [0, 1, 2].map(|k| rel(level1[k + 1], level1[k]));
    let level3 = [0, 1].map(|l| rel(level2[l + 1], level2[l]));
    let level4 = rel(level3[1], level3[0]);
    NmdCascade {
        level1,
        level2,
        level3,
        level4,
    }
}

/// Sliding 15-price window. Starts zero-filled, so the first two blocks of a
/// run see a partly synthetic window.
#[derive(Debug, Clone, PartialEq)]
pub struct RsiState {
    pub window: [f64; RSI_WINDOW],
    pub up: [f64; RSI_WINDOW - 1],
    pub down: [f64; RSI_WINDOW - 1],
}

impl Default for RsiState {
    fn default() -> Self {
        Self {
            window: [0.0; RSI_WINDOW],
            up: [0.0; RSI_WINDOW - 1],
            down: [0.0; RSI_WINDOW - 1],
        }
    }
}

impl RsiState {
    /// Shifts the block into the window and returns the new RSI.
    pub fn update(&mut self, pr: &[f64; BLOCK]) -> f64 {
        self.window.copy_within(BLOCK.., 0);
        self.window[RSI_WINDOW - BLOCK..].copy_from_slice(pr);
        for j in 0..RSI_WINDOW - 1 {
            let diff = self.window[j + 1] - self.window[j];
            if diff > 0.0 {
                self.up[j] = diff;
                self.down[j] = 0.0;
            } else if diff < 0.0 {
                self.up[j] = 0.0;
                self.down[j] = -diff;
            } else {
                self.up[j] = 0.0;
                self.down[j] = 0.0;
            }
        }
        self.value()
    }

    pub fn value(&self) -> f64 {
        let n = (RSI_WINDOW - 1) as f64;
        let mean_up = self.up.iter().sum::<f64>() / n;
        let mean_down = self.down.iter().sum::<f64>() / n;
        if mean_down == 0.0 {
            100.0
        } else {
            100.0 - 100.0 / (1.0 + mean_up / mean_down)
        }
    }
}

/// Moving average over the last 20 block-mean volumes (100 raw volumes).
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeState {
    ring: [f64; VOLUME_RING],
    pub cav: f64,
    pub av: f64,
}

impl Default for VolumeState {
    fn default() -> Self {
        Self {
            ring: [0.0; VOLUME_RING],
            cav: 0.0,
            av: 0.0,
        }
    }
}

impl VolumeState {
    /// Pushes the block's mean volume and returns `(cav, av)`.
    pub fn update(&mut self, vol: &[f64; BLOCK]) -> (f64, f64) {
        self.cav = vol.iter().sum::<f64>() / BLOCK as f64;
        self.ring.copy_within(1.., 0);
        self.ring[VOLUME_RING - 1] = self.cav;
        self.av = self.ring.iter().sum::<f64>() / VOLUME_RING as f64;
        (self.cav, self.av)
    }

    pub fn ring(&self) -> &[f64; VOLUME_RING] {
        &self.ring
    }
}

/// Scaled state representation: a leading bias of 1 followed by 26
/// components whose Euclidean norm equals the configured target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_LEN]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Everything besides the market block that enters the feature vector.
#[derive(Debug, Clone, Copy)]
pub struct FeatureInputs {
    pub ipr: f64,
    pub mon: f64,
    pub cns: f64,
    pub cav: f64,
    pub av: f64,
    pub rsi: f64,
    pub mlim: f64,
}

pub fn assemble_features(
    block: &MarketBlock,
    inputs: &FeatureInputs,
    nmd: &NmdCascade,
    target_norm: f64,
) -> Result<FeatureVector> {
    let FeatureInputs {
        ipr,
        mon,
        cns,
        cav,
        av,
        rsi,
        mlim,
    } = *inputs;
    if av == 0.0 || cav == 0.0 {
        return Err(Error::DegenerateVolume { av, cav });
    }
    let vol5 = block.last_volume();
    let pr5 = block.last_price();

    let mut f = [0.0; FEATURE_LEN];
    f[1..6].copy_from_slice(&block.prices);
    f[6] = ipr;
    f[7] = (pr5 - ipr) / ipr;
    f[8] = mon;
    f[9] = cns;
    f[10] = cav;
    f[11] = av;
    f[12] = (cav - av) / av;
    f[13] = (vol5 - av) / av;
    f[14] = (vol5 - cav) / cav;
    f[15] = rsi;
    f[16..20].copy_from_slice(&nmd.level1);
    f[20..23].copy_from_slice(&nmd.level2);
    f[23..25].copy_from_slice(&nmd.level3);
    f[25] = nmd.level4;
    f[26] = mlim;

    let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite("feature vector"));
    }
    let scale = target_norm / norm;
    for x in &mut f {
        *x *= scale;
    }
    f[0] = 1.0;
    Ok(FeatureVector(f))
}
