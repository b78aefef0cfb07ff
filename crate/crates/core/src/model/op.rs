use std::fmt;

/// A stack operation of an order-n CPDS.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op<S> {
    Push(u8),
    PushChar(S),
    Pop(u8),
    Collapse,
    Rewrite(S),
    Noop,
}

impl<S> Op<S> {
    pub fn map<S2>(&self, f: impl FnOnce(&S) -> S2) -> Op<S2> {
        match self {
            Op::Push(k) => Op::Push(*k),
            Op::PushChar(s) => Op::PushChar(f(s)),
            Op::Pop(k) => Op::Pop(*k),
            Op::Collapse => Op::Collapse,
            Op::Rewrite(s) => Op::Rewrite(f(s)),
            Op::Noop => Op::Noop,
        }
    }

    pub fn symbol(&self) -> Option<&S> {
        match self {
            Op::PushChar(s) | Op::Rewrite(s) => Some(s),
            _ => None,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Op<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Push(k) => write!(f, "push{k}"),
            Op::PushChar(s) => write!(f, "pusha({s})"),
            Op::Pop(k) => write!(f, "pop{k}"),
            Op::Collapse => f.write_str("collapse"),
            Op::Rewrite(s) => write!(f, "rew({s})"),
            Op::Noop => f.write_str("noop"),
        }
    }
}
