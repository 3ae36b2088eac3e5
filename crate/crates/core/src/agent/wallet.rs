//! Money pools, the 19 trade actions, reward, and the three terminal states.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const N_ACTIONS: usize = 19;

/// Share of the excess over `mlim` moved to savings on a save terminal.
pub const SAVE_FRACTION: f64 = 0.34;
/// Share moved to reserves; the same share again stays in `mon`.
pub const RESERVE_FRACTION: f64 = 0.33;
pub const FAILED_ACTION_PENALTY: f64 = 0.1;
const REINVEST_RSI: f64 = 70.0;
const MARKDOWN_RSI: f64 = 30.0;

/// Trade action numbered 1..=19: 1-9 buy for 10..90, 10-18 sell for
/// 10..90, 19 hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Action(u8);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trade {
    Buy(f64),
    Sell(f64),
    Hold,
}

impl Action {
    pub const HOLD: Action = Action(19);

    pub fn new(number: u8) -> Option<Self> {
        (1..=N_ACTIONS as u8).contains(&number).then_some(Action(number))
    }

    /// From a 0-based network output index.
    pub fn from_index(index: usize) -> Self {
        assert!(index < N_ACTIONS, "action index {index} out of range");
        Action(index as u8 + 1)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// 0-based network output index.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn trade(self) -> Trade {
        match self.0 {
            k @ 1..=9 => Trade::Buy(10.0 * k as f64),
            k @ 10..=18 => Trade::Sell(10.0 * (k - 9) as f64),
            _ => Trade::Hold,
        }
    }

    pub fn all() -> impl Iterator<Item = Action> {
        (1..=N_ACTIONS as u8).map(Action)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wallet {
    /// Trading pool, in quote currency.
    pub mon: f64,
    /// Asset holdings.
    pub cns: f64,
    /// Savings; never traded again.
    pub sav: f64,
    /// Reserves, partly returned to `mon` by a reinvest terminal.
    pub res: f64,
    /// Savings threshold on `mon`.
    pub mlim: f64,
    /// Floor for `mlim`.
    pub mlimn: f64,
}

impl Wallet {
    pub fn new(initial_mon: f64, mlimn: f64) -> Self {
        Self {
            mon: initial_mon,
            cns: 0.0,
            sav: 0.0,
            res: 0.0,
            mlim: initial_mon,
            mlimn,
        }
    }

    /// Trading wealth `mon + price * cns`.
    pub fn wealth(&self, price: f64) -> f64 {
        self.mon + price * self.cns
    }

    /// Trading wealth plus savings and reserves.
    pub fn total_wealth(&self, price: f64) -> f64 {
        self.sav + self.wealth(price) + self.res
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionOutcome {
    pub action: Action,
    /// False when funds were insufficient; the wallet is then untouched.
    pub executed: bool,
    pub fee_paid: f64,
}

/// Trades at `price`. Buying spends the full amount from `mon` and credits
/// coins net of the fee; selling debits coins worth the full amount and
/// credits `mon` net of the fee.
pub fn execute_action(w: &mut Wallet, action: Action, price: f64, fee_rate: f64) -> ActionOutcome {
    let failed = ActionOutcome {
        action,
        executed: false,
        fee_paid: 0.0,
    };
    match action.trade() {
        Trade::Buy(amount) => {
            if w.mon < amount {
                return failed;
            }
            w.mon -= amount;
            w.cns += (1.0 - fee_rate) * amount / price;
            ActionOutcome {
                action,
                executed: true,
                fee_paid: fee_rate * amount,
            }
        }
        Trade::Sell(amount) => {
            if w.cns * price < amount {
                return failed;
            }
            // selling everything can leave -1 ulp of coins
            w.cns = (w.cns - amount / price).max(0.0);
            w.mon += (1.0 - fee_rate) * amount;
            ActionOutcome {
                action,
                executed: true,
                fee_paid: fee_rate * amount,
            }
        }
        Trade::Hold => ActionOutcome {
            action,
            executed: true,
            fee_paid: 0.0,
        },
    }
}

/// Concave in the wealth change `d`, peaking at 1 for `d = 2`; failed
/// actions cost an extra 0.1.
pub fn compute_reward(wth_before: f64, wth_after: f64, executed: bool) -> f64 {
    let d = wth_after - wth_before;
    let r = d - (d / 2.0).powi(2);
    if executed {
        r
    } else {
        r - FAILED_ACTION_PENALTY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    None,
    /// `mon` exceeded `mlim`: bank part of the excess.
    Save,
    /// Low on money in a rising market: release half the reserves.
    Reinvest,
    /// Unfavourable market: lower `mlim` to the current wealth.
    Markdown,
}

impl Terminal {
    pub fn is_terminal(self) -> bool {
        self != Terminal::None
    }
}

/// `q_sa` is the averaged action value of the action just taken, evaluated
/// in the pre-trade state; `rsi_after` is the RSI of the newly observed block.
pub fn check_terminal(w: &Wallet, wth_after: f64, q_sa: f64, rsi_after: f64) -> Terminal {
    if w.mon > w.mlim {
        Terminal::Save
    } else if wth_after < w.mlimn && q_sa > 0.0 && rsi_after > REINVEST_RSI {
        Terminal::Reinvest
    } else if wth_after >= w.mlimn && q_sa < 0.0 && rsi_after < MARKDOWN_RSI {
        Terminal::Markdown
    } else {
        Terminal::None
    }
}

/// Applies the wallet side of a terminal state and returns the amount added
/// to savings, which the caller adds to the terminal reward.
pub fn apply_terminal(w: &mut Wallet, kind: Terminal, wth_after: f64) -> f64 {
    match kind {
        Terminal::None => 0.0,
        Terminal::Save => {
            let mdf = w.mon - w.mlim;
            let saved = mdf * SAVE_FRACTION;
            w.sav += saved;
            w.res += mdf * RESERVE_FRACTION;
            w.mon = w.mlim + mdf * RESERVE_FRACTION;
            w.mlim = w.mon + mdf;
            saved
        }
        Terminal::Reinvest => {
            let half = w.res / 2.0;
            w.mon += half;
            w.res -= half;
            w.mlim = w.mlimn.max(w.mon);
            0.0
        }
        Terminal::Markdown => {
            w.mlim = wth_after;
            0.0
        }
    }
}
