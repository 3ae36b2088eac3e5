//! Drives the agent over a filtered series, one 5-price block per step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::double_q::{DoubleQ, PairActivation};
use super::schedule::{select_action, Schedules};
use super::wallet::{
    apply_terminal, check_terminal, compute_reward, execute_action, Action, Terminal, Wallet,
    N_ACTIONS,
};
use crate::data_ingest::FilteredSeries;
use crate::error::{Error, Result};
use crate::features::{
    assemble_features, nmd_cascade, FeatureInputs, FeatureVector, MarketBlock, RsiState,
    VolumeState, BLOCK, FEATURE_LEN,
};
use crate::Config;

/// Minimum series length: two blocks, one to act in and one to observe.
pub const MIN_SERIES_LEN: usize = 2 * BLOCK;

/// One learning step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Block the action was taken in (1-based).
    pub block: usize,
    pub action: Action,
    pub executed: bool,
    pub eps: f64,
    pub alpha: f64,
    pub wth_before: f64,
    pub wth_after: f64,
    /// Wealth-change reward, including the failed-action penalty.
    pub reward: f64,
    /// Amount banked by a save terminal, added to the TD target.
    pub sav_bonus: f64,
    pub terminal: Terminal,
    /// Which network was trained (1 or 2).
    pub network: u8,
    pub td_target: f64,
    /// Discounted next-state term of the target; `None` on terminals.
    pub bootstrap: Option<f64>,
    pub renormalized: bool,
    pub wallet: Wallet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_sav: f64,
    pub final_twth: f64,
    pub steps: usize,
    pub episodes: usize,
    pub wallet: Wallet,
}

pub struct Agent<'a, R> {
    cfg: &'a Config,
    series: &'a FilteredSeries,
    rng: R,
    nets: DoubleQ,
    wallet: Wallet,
    schedules: Schedules,
    rsi_state: RsiState,
    volume: VolumeState,
    /// Current block (1-based).
    block: usize,
    ipr: f64,
    wth: f64,
    /// Price of the most recently observed block, for end-of-run valuation.
    last_price: f64,
    rsi: f64,
    current: PairActivation,
    features: FeatureVector,
    steps: usize,
    episodes: usize,
    done: bool,
}

impl<'a, R: Rng> Agent<'a, R> {
    /// Draws both networks from `rng` and opens the first episode at block 1.
    pub fn new(cfg: &'a Config, series: &'a FilteredSeries, mut rng: R) -> Result<Self> {
        if series.len() < MIN_SERIES_LEN {
            return Err(Error::InsufficientData {
                needed: MIN_SERIES_LEN,
                got: series.len(),
            });
        }
        let nets = DoubleQ::init(FEATURE_LEN, cfg.hidden_size, N_ACTIONS, &mut rng);
        let current = nets.activate(&[0.0; FEATURE_LEN]);
        let mut agent = Self {
            cfg,
            series,
            rng,
            nets,
            wallet: Wallet::new(cfg.initial_mon, cfg.mlimn),
            schedules: Schedules::from_config(cfg),
            rsi_state: RsiState::default(),
            volume: VolumeState::default(),
            block: 1,
            ipr: 0.0,
            wth: 0.0,
            last_price: 0.0,
            rsi: 0.0,
            current,
            features: FeatureVector([0.0; FEATURE_LEN]),
            steps: 0,
            episodes: 0,
            done: false,
        };
        agent.start_episode()?;
        Ok(agent)
    }

    fn block_at(&self, index: usize) -> MarketBlock {
        MarketBlock::from_series(self.series, index).expect("block index checked by caller")
    }

    fn build_features(&self, block: &MarketBlock, cav: f64, av: f64) -> Result<FeatureVector> {
        let inputs = FeatureInputs {
            ipr: self.ipr,
            mon: self.wallet.mon,
            cns: self.wallet.cns,
            cav,
            av,
            rsi: self.rsi,
            mlim: self.wallet.mlim,
        };
        let nmd = nmd_cascade(&block.prices, self.cfg.denom_floor);
        assemble_features(block, &inputs, &nmd, self.cfg.feature_norm)
    }

    fn start_episode(&mut self) -> Result<()> {
        let block = self.block_at(self.block);
        self.episodes += 1;
        self.ipr = block.first_price();
        let (cav, av) = self.volume.update(&block.volumes);
        self.rsi = self.rsi_state.update(&block.prices);
        self.features = self.build_features(&block, cav, av)?;
        self.current = self.nets.activate(self.features.as_slice());
        self.last_price = block.last_price();
        self.wth = self.wallet.wealth(self.last_price);
        Ok(())
    }

    pub fn has_next(&self) -> bool {
        !self.done && (self.block + 1) * BLOCK <= self.series.len()
    }

    /// Acts in the current block, observes the next one and trains one of
    /// the two networks. Returns `None` once no further block is available.
    pub fn step(&mut self) -> Result<Option<StepRecord>> {
        if !self.has_next() {
            self.done = true;
            return Ok(None);
        }
        let q = self.nets.values(&self.current);
        let q_avg = q.average();
        let eps = self.schedules.epsilon_step(&mut self.rng);
        let action = select_action(&q_avg, eps, &mut self.rng);
        let alpha = self.schedules.alpha_step();

        let here = self.block_at(self.block);
        let next = self.block_at(self.block + 1);
        let outcome = execute_action(&mut self.wallet, action, here.last_price(), self.cfg.fee_rate);
        if self.wallet.mon < 0.0 || self.wallet.cns < 0.0 {
            return Err(Error::NonFinite("wallet went negative"));
        }
        let wth_before = self.wth;
        self.last_price = next.last_price();
        let wth_after = self.wallet.wealth(self.last_price);
        let reward = compute_reward(wth_before, wth_after, outcome.executed);
        self.rsi = self.rsi_state.update(&next.prices);

        let terminal = check_terminal(&self.wallet, wth_after, q_avg[action.index()], self.rsi);
        let (update, sav_bonus) = if terminal.is_terminal() {
            let network = DoubleQ::coin(&mut self.rng);
            let sav_bonus = apply_terminal(&mut self.wallet, terminal, wth_after);
            let update = self.nets.update_terminal(
                network,
                action.index(),
                alpha,
                reward + sav_bonus,
                &self.current,
                &q,
            )?;
            // the observed block ends the episode; the one after it is skipped
            self.block += 2;
            if self.block * BLOCK > self.series.len() {
                self.done = true;
            } else {
                self.start_episode()?;
            }
            (update, sav_bonus)
        } else {
            let (cav, av) = self.volume.update(&next.volumes);
            self.features = self.build_features(&next, cav, av)?;
            let next_act = self.nets.activate(self.features.as_slice());
            let next_q = self.nets.values(&next_act);
            let network = DoubleQ::coin(&mut self.rng);
            let update = self.nets.update_bootstrap(
                network,
                action.index(),
                alpha,
                reward,
                self.cfg.gamma,
                &self.current,
                &q,
                &next_q,
            )?;
            self.current = next_act;
            self.wth = wth_after;
            self.block += 1;
            (update, 0.0)
        };
        self.steps += 1;

        Ok(Some(StepRecord {
            block: here.index,
            action,
            executed: outcome.executed,
            eps,
            alpha,
            wth_before,
            wth_after,
            reward,
            sav_bonus,
            terminal,
            network: update.network as u8 + 1,
            td_target: update.target,
            bootstrap: update.bootstrap,
            renormalized: update.outcome.renormalized,
            wallet: self.wallet,
        }))
    }

    /// Runs to the end of the series, handing every step to `on_step`.
    pub fn run_with<F: FnMut(&StepRecord)>(mut self, mut on_step: F) -> Result<RunSummary> {
        while let Some(rec) = self.step()? {
            on_step(&rec);
        }
        Ok(self.summary())
    }

    pub fn run(self) -> Result<RunSummary> {
        self.run_with(|_| {})
    }

    /// Totals valued at the last observed price with the current wallet.
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            final_sav: self.wallet.sav,
            final_twth: self.wallet.total_wealth(self.last_price),
            steps: self.steps,
            episodes: self.episodes,
            wallet: self.wallet,
        }
    }

    pub fn wallet(&self) -> &Wallet {
        &self.wallet
    }

    pub fn networks(&self) -> &DoubleQ {
        &self.nets
    }

    pub fn features(&self) -> &FeatureVector {
        &self.features
    }

    pub fn current_block(&self) -> usize {
        self.block
    }
}

/// Baseline trader: a uniformly random action every block with the same
/// fees and failure rules, and no learning or terminal states.
pub fn run_random_baseline<R: Rng>(
    cfg: &Config,
    series: &FilteredSeries,
    rng: &mut R,
) -> Result<RunSummary> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::InsufficientData {
            needed: MIN_SERIES_LEN,
            got: series.len(),
        });
    }
    let mut wallet = Wallet::new(cfg.initial_mon, cfg.mlimn);
    let mut block = 1;
    let mut steps = 0;
    while (block + 1) * BLOCK <= series.len() {
        let price = series.prices[block * BLOCK - 1];
        let action = Action::from_index(rng.random_range(0..N_ACTIONS));
        execute_action(&mut wallet, action, price, cfg.fee_rate);
        block += 1;
        steps += 1;
    }
    let last_price = series.prices[block * BLOCK - 1];
    Ok(RunSummary {
        final_sav: 0.0,
        final_twth: wallet.wealth(last_price),
        steps,
        episodes: 1,
        wallet,
    })
}
