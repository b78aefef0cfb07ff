use std::fmt;

use crate::model::game::{Game, Role};
use crate::model::play::AnnotatedPlay;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankKey {
    Level(u8),
    Link,
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankKey::Level(k) => write!(f, "level {k}"),
            RankKey::Link => f.write_str("link"),
        }
    }
}

/// The top character of `play.configs[index]` disagrees with the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub key: RankKey,
    pub expected: u32,
    /// `None` when the character carries no rank function.
    pub found: Option<u32>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.found {
            Some(v) => write!(f, "config {}: {} expected {} found {v}", self.index, self.key, self.expected),
            None => write!(f, "config {}: {} expected {} found nothing", self.index, self.key, self.expected),
        }
    }
}

/// Compares every top character's rank function with the level and link
/// ranks of the play. Configurations at transient states are exempt.
pub fn check_awareness(game: &dyn Game, play: &AnnotatedPlay) -> Vec<Violation> {
    let n = game.order();
    let mut out = Vec::new();
    for (i, c) in play.configs.iter().enumerate() {
        if game.role(&c.state) == Role::Transient {
            continue;
        }
        let f = game.rank_fn(&c.stack.top_char().sym);
        for k in 1..=n {
            let expected = play.level_rank(i, k);
            let found = match &f {
                Some(f) if f.level(k).is_none() => continue,
                Some(f) => f.level(k),
                None => None,
            };
            if found != Some(expected) {
                out.push(Violation { index: i, key: RankKey::Level(k), expected, found });
            }
        }
        let expected = play.link_rank(i);
        let found = f.as_ref().map(|f| f.link());
        if found != Some(expected) {
            out.push(Violation { index: i, key: RankKey::Link, expected, found });
        }
    }
    out
}
