//! Towers of exponentials and the counter bound of a game.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::model::game::Game;

/// Bits of the largest number materialized.
pub const DEFAULT_BUDGET_BITS: u64 = 65_536;

/// `nexp_height(base)`, flattened whenever the value fits the budget.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerNum {
    pub height: u32,
    pub base: BigUint,
}

impl TowerNum {
    pub fn flat(v: BigUint) -> TowerNum {
        TowerNum { height: 0, base: v }
    }

    pub fn value(&self) -> Option<&BigUint> {
        (self.height == 0).then_some(&self.base)
    }
}

impl fmt::Display for TowerNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.height == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "nexp^{}({})", self.height, self.base)
        }
    }
}

/// `nexp_0(v) = v`, `nexp_h(v) = 2^nexp_{h-1}(v)`.
pub fn nexp_eval(height: u32, v: BigUint, budget_bits: u64) -> TowerNum {
    let mut x = v.clone();
    for _ in 0..height {
        match x.to_u64() {
            Some(e) if e < budget_bits => x = BigUint::one() << e,
            _ => return TowerNum { height, base: v },
        }
    }
    TowerNum::flat(x)
}

/// Compares `nexp_d(a)` with the plain number `b`.
fn cmp_plain(d: u32, a: &BigUint, b: &BigUint) -> Ordering {
    if d == 0 {
        return a.cmp(b);
    }
    if b.is_zero() {
        return Ordering::Greater;
    }
    let k = b.bits() - 1;
    let below = cmp_plain(d - 1, a, &BigUint::from(k));
    let pow2 = b.trailing_zeros() == Some(k);
    match below {
        Ordering::Greater => Ordering::Greater,
        Ordering::Equal if pow2 => Ordering::Equal,
        Ordering::Equal => Ordering::Less,
        Ordering::Less => Ordering::Less,
    }
}

/// Total order on denoted values, by height normalization and iterated logarithms.
pub fn tower_cmp(x: &TowerNum, y: &TowerNum) -> Ordering {
    if x.height >= y.height {
        cmp_plain(x.height - y.height, &x.base, &y.base)
    } else {
        tower_cmp(y, x).reverse()
    }
}

/// Constants of the bound: `c` and `p` bound the rank-awareness blow-up by `c x^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub c: BigUint,
    pub p: u32,
    /// Number of ranks `m + 1`.
    pub m_prime: u32,
    /// `|Q| + |Σ|`.
    pub size: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("exponent p = {0} is below 9")]
    SmallExponent(u32),
    #[error("number of ranks {0} is below 2")]
    FewRanks(u32),
    #[error("size {0} is below 2")]
    Small(BigUint),
}

impl BoundParams {
    pub fn new(c: BigUint, p: u32, m_prime: u32, size: BigUint) -> Result<Self, BoundError> {
        if p < 9 {
            return Err(BoundError::SmallExponent(p));
        }
        if m_prime < 2 {
            return Err(BoundError::FewRanks(m_prime));
        }
        if size < BigUint::from(2u32) {
            return Err(BoundError::Small(size));
        }
        Ok(BoundParams { c, p, m_prime, size })
    }

    /// Parameters read off `game` with the given constants (`m'` at least 2).
    pub fn for_game(game: &dyn Game, c: BigUint, p: u32) -> Result<Self, BoundError> {
        BoundParams::new(c, p, (game.max_rank() + 1).max(2), game.size())
    }

    /// `c 16^p m'^(2p) |cpds|^(2p)`.
    pub fn core(&self) -> BigUint {
        let m = BigUint::from(self.m_prime);
        &self.c * BigUint::from(16u32).pow(self.p) * m.pow(2 * self.p) * self.size.pow(2 * self.p)
    }

    /// Exponent `c 2^p m'^(2p) |cpds|^(2p)` dominating each of the eight terms.
    pub fn term_exponent(&self) -> BigUint {
        let m = BigUint::from(self.m_prime);
        &self.c * (BigUint::one() << self.p) * m.pow(2 * self.p) * self.size.pow(2 * self.p)
    }
}

#[derive(Clone, Debug)]
pub struct GameBound {
    pub bound: TowerNum,
    /// The order-1 floor `|Q| |Σ| 2^(m'|Q|) m'`.
    pub floor: BigUint,
}

pub fn order1_floor(states: &BigUint, symbols: &BigUint, m_prime: u32) -> BigUint {
    let e = (states * BigUint::from(m_prime)).to_u64().expect("floor exponent fits 64 bits");
    states * symbols * (BigUint::one() << e) * BigUint::from(m_prime)
}

/// `nexp_n(c 16^p m'^(2p) |cpds|^(2p))` for a game of order `n`.
pub fn bound_for_game(game: &dyn Game, params: &BoundParams, budget_bits: u64) -> GameBound {
    let bound = nexp_eval(game.order() as u32, params.core(), budget_bits);
    let floor = order1_floor(&game.state_count(), &game.symbol_count(), params.m_prime);
    GameBound { bound, floor }
}

/// log2 of each of the eight product terms, next to the dominating exponent.
#[derive(Clone, Debug)]
pub struct TermCheck {
    pub terms_log2: [f64; 8],
    pub limit_log2: f64,
}

impl TermCheck {
    pub fn holds(&self) -> bool {
        self.terms_log2.iter().all(|&t| t <= self.limit_log2 * (1.0 + 1e-12))
    }
}

pub fn check_terms(params: &BoundParams) -> TermCheck {
    let c = crate::order_reduction::log2(&params.c).max(0.0);
    let cval = 2f64.powf(c);
    let p = params.p as f64;
    let m = (params.m_prime as f64).log2();
    let s = crate::order_reduction::log2(&params.size);
    let sval = 2f64.powf(s);
    let terms_log2 = [
        c,
        4.0 * p,
        2.0 * p * m,
        2.0 * p * c,
        2.0 * p * p * 6f64.log2(),
        4.0 * p * p * s,
        4.0 * p * p * m,
        4.0 * sval * params.m_prime as f64 * p * p,
    ];
    let limit_log2 = cval * 2f64.powf(p) * 2f64.powf(2.0 * p * m) * 2f64.powf(2.0 * p * s);
    TermCheck { terms_log2, limit_log2 }
}

/// Smallest integer `c >= 1` with `out <= c in^p` for every `(in, out)` sample.
pub fn fit_c(samples: &[(BigUint, BigUint)], p: u32) -> BigUint {
    let mut c = BigUint::one();
    for (i, o) in samples {
        let d = i.pow(p).max(BigUint::one());
        let need = (o + &d - 1u32) / &d;
        c = c.max(need);
    }
    c
}
