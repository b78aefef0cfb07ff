use std::fmt;
use std::sync::Arc;

use super::op::Op;

/// A stack character together with its collapse link.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedChar<S> {
    pub sym: S,
    pub link: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Cell<X> {
    head: X,
    tail: Option<Arc<Cell<X>>>,
    len: u32,
}

/// Persistent non-empty list, head first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct List<X>(Arc<Cell<X>>);

impl<X: Clone> List<X> {
    pub fn single(x: X) -> Self {
        List(Arc::new(Cell { head: x, tail: None, len: 1 }))
    }

    pub fn cons(x: X, tail: Option<List<X>>) -> Self {
        let len = tail.as_ref().map_or(0, |t| t.len()) as u32 + 1;
        List(Arc::new(Cell { head: x, tail: tail.map(|t| t.0), len }))
    }

    pub fn from_vec(items: Vec<X>) -> Option<Self> {
        let mut acc: Option<List<X>> = None;
        for x in items.into_iter().rev() {
            acc = Some(List::cons(x, acc));
        }
        acc
    }

    pub fn head(&self) -> &X {
        &self.0.head
    }

    pub fn tail(&self) -> Option<List<X>> {
        self.0.tail.clone().map(List)
    }

    pub fn len(&self) -> usize {
        self.0.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn replace_head(&self, x: X) -> Self {
        List::cons(x, self.tail())
    }

    /// Keeps the last `n` elements.
    pub fn keep_last(&self, n: usize) -> Option<Self> {
        if n == 0 || n > self.len() {
            return None;
        }
        let mut cur = self.clone();
        while cur.len() > n {
            cur = cur.tail()?;
        }
        Some(cur)
    }
}

impl<X> List<X> {
    pub fn iter(&self) -> ListIter<'_, X> {
        ListIter { cur: Some(&self.0) }
    }
}

pub struct ListIter<'a, X> {
    cur: Option<&'a Arc<Cell<X>>>,
}

impl<'a, X> Iterator for ListIter<'a, X> {
    type Item = &'a X;

    fn next(&mut self) -> Option<&'a X> {
        let cell = self.cur?;
        self.cur = cell.tail.as_ref();
        Some(&cell.head)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StackError {
    #[error("link/bottom out of range: order {order}, keep {keep}, length {len}")]
    OutOfRange { order: u8, keep: usize, len: usize },
    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: u8, found: u8 },
    #[error("stack syntax: {0}")]
    Syntax(String),
}

/// An order-k collapsible stack. Sequences are listed topmost first.
///
/// `T` is a per-substack tag; plain semantics uses `()`, the ancestor
/// bookkeeping of annotated plays stores creation indices there.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stack<S, T = ()> {
    Leaf { ch: AnnotatedChar<S>, tag: T },
    Seq { order: u8, tag: T, items: List<Stack<S, T>> },
}

type HeadFn<'a, S, T> = dyn Fn(&Stack<S, T>) -> Result<Stack<S, T>, StackError> + 'a;

impl<S: Clone, T: Clone> Stack<S, T> {
    pub fn leaf(sym: S, link: u32, tag: T) -> Self {
        Stack::Leaf { ch: AnnotatedChar { sym, link }, tag }
    }

    pub fn seq(tag: T, items: Vec<Stack<S, T>>) -> Result<Self, StackError> {
        let order = items
            .first()
            .ok_or_else(|| StackError::Syntax("empty sequence".into()))?
            .order()
            + 1;
        for it in &items {
            if it.order() + 1 != order {
                return Err(StackError::OrderMismatch { expected: order - 1, found: it.order() });
            }
        }
        Ok(Stack::Seq { order, tag, items: List::from_vec(items).expect("non-empty") })
    }

    /// The stack `[..[sym^0]..]` of order `n`, every level tagged with `tag`.
    pub fn initial(n: u8, sym: S, tag: T) -> Self {
        let mut s = Stack::leaf(sym, 0, tag.clone());
        for order in 1..=n {
            s = Stack::Seq { order, tag: tag.clone(), items: List::single(s) };
        }
        s
    }

    pub fn order(&self) -> u8 {
        match self {
            Stack::Leaf { .. } => 0,
            Stack::Seq { order, .. } => *order,
        }
    }

    pub fn tag(&self) -> &T {
        match self {
            Stack::Leaf { tag, .. } | Stack::Seq { tag, .. } => tag,
        }
    }

    pub fn with_tag(&self, tag: T) -> Self {
        match self {
            Stack::Leaf { ch, .. } => Stack::Leaf { ch: ch.clone(), tag },
            Stack::Seq { order, items, .. } => Stack::Seq { order: *order, tag, items: items.clone() },
        }
    }

    /// Number of elements of a sequence; 1 for a leaf.
    pub fn len(&self) -> usize {
        match self {
            Stack::Leaf { .. } => 1,
            Stack::Seq { items, .. } => items.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn items(&self) -> Option<&List<Stack<S, T>>> {
        match self {
            Stack::Leaf { .. } => None,
            Stack::Seq { items, .. } => Some(items),
        }
    }

    /// `top_k`: the topmost order-(k-1) element; `top(order+1)` is the stack itself.
    pub fn top(&self, k: u8) -> Option<&Stack<S, T>> {
        let n = self.order();
        if k == 0 || k > n + 1 {
            return None;
        }
        let mut cur = self;
        while cur.order() >= k {
            match cur {
                Stack::Seq { items, .. } => cur = items.head(),
                Stack::Leaf { .. } => unreachable!(),
            }
        }
        Some(cur)
    }

    pub fn top_leaf(&self) -> &Stack<S, T> {
        let mut cur = self;
        while let Stack::Seq { items, .. } = cur {
            cur = items.head();
        }
        cur
    }

    pub fn top_char(&self) -> &AnnotatedChar<S> {
        match self.top_leaf() {
            Stack::Leaf { ch, .. } => ch,
            Stack::Seq { .. } => unreachable!(),
        }
    }

    fn map_head(&self, k: u8, f: &HeadFn<'_, S, T>) -> Result<Self, StackError> {
        // applies `f` to the topmost order-k stack
        let n = self.order();
        if n == k {
            return f(self);
        }
        if n < k {
            return Err(StackError::OrderMismatch { expected: k, found: n });
        }
        match self {
            Stack::Seq { order, tag, items } => {
                let new_head = items.head().map_head(k, f)?;
                Ok(Stack::Seq { order: *order, tag: tag.clone(), items: items.replace_head(new_head) })
            }
            Stack::Leaf { .. } => unreachable!(),
        }
    }

    /// `bottom_{k,i}`: truncates the topmost order-k stack to its last `i` elements.
    pub fn bottom(&self, k: u8, i: usize) -> Result<Self, StackError> {
        if k == 0 {
            return Err(StackError::OrderMismatch { expected: 1, found: 0 });
        }
        self.map_head(k, &|s| match s {
            Stack::Seq { order, tag, items } => {
                let kept = items
                    .keep_last(i)
                    .ok_or(StackError::OutOfRange { order: *order, keep: i, len: items.len() })?;
                Ok(Stack::Seq { order: *order, tag: tag.clone(), items: kept })
            }
            Stack::Leaf { .. } => unreachable!(),
        })
    }

    /// Places `u` (order k-1) on top of the topmost order-k stack of `v`.
    pub fn compose(u: &Stack<S, T>, k: u8, v: &Stack<S, T>) -> Result<Self, StackError> {
        if k == 0 || u.order() + 1 != k {
            return Err(StackError::OrderMismatch { expected: k.saturating_sub(1), found: u.order() });
        }
        v.map_head(k, &|s| match s {
            Stack::Seq { order, tag, items } => Ok(Stack::Seq {
                order: *order,
                tag: tag.clone(),
                items: List::cons(u.clone(), Some(items.clone())),
            }),
            Stack::Leaf { .. } => unreachable!(),
        })
    }

    pub fn pop(&self, k: u8) -> Option<Self> {
        if k == 0 || k > self.order() {
            return None;
        }
        self.map_head(k, &|s| match s {
            Stack::Seq { order, tag, items } => match items.tail() {
                Some(rest) => Ok(Stack::Seq { order: *order, tag: tag.clone(), items: rest }),
                None => Err(StackError::OutOfRange { order: *order, keep: 0, len: 1 }),
            },
            Stack::Leaf { .. } => unreachable!(),
        })
        .ok()
    }

    /// `push_k`: copies the topmost order-(k-1) stack; the copy is tagged with `tag`.
    pub fn push(&self, k: u8, tag: T) -> Option<Self> {
        if k < 2 || k > self.order() {
            return None;
        }
        let copy = self.top(k)?.with_tag(tag);
        Stack::compose(&copy, k, self).ok()
    }

    /// Pushes `sym` whose link order is `link_order`, linking below the current top
    /// order-(link_order - 1) stack.
    pub fn push_char(&self, sym: S, link_order: u8, tag: T) -> Option<Self> {
        if link_order == 0 || link_order > self.order() {
            return None;
        }
        let link = self.top(link_order + 1)?.len() as u32 - 1;
        Stack::compose(&Stack::leaf(sym, link, tag), 1, self).ok()
    }

    pub fn collapse(&self, link_order: u8) -> Option<Self> {
        let link = self.top_char().link;
        if link == 0 {
            return None;
        }
        self.bottom(link_order, link as usize).ok()
    }

    pub fn rewrite(&self, sym: S) -> Self {
        self.map_head(1, &|s| match s {
            Stack::Seq { order, tag, items } => {
                let (link, ltag) = match items.head() {
                    Stack::Leaf { ch, tag } => (ch.link, tag.clone()),
                    Stack::Seq { .. } => unreachable!(),
                };
                let leaf = Stack::leaf(sym.clone(), link, ltag);
                Ok(Stack::Seq { order: *order, tag: tag.clone(), items: items.replace_head(leaf) })
            }
            Stack::Leaf { .. } => unreachable!(),
        })
        .expect("order-1 head exists")
    }

    /// Applies `op`; `None` means the operation is unavailable on this stack.
    /// New substacks created by pushes receive `tag`.
    pub fn apply(&self, op: &Op<S>, chorder: impl Fn(&S) -> u8, tag: T) -> Option<Self> {
        match op {
            Op::Push(k) => self.push(*k, tag),
            Op::PushChar(b) => self.push_char(b.clone(), chorder(b), tag),
            Op::Pop(k) => self.pop(*k),
            Op::Collapse => {
                let k = chorder(&self.top_char().sym);
                self.collapse(k)
            }
            Op::Rewrite(b) => {
                if chorder(b) != chorder(&self.top_char().sym) {
                    return None;
                }
                Some(self.rewrite(b.clone()))
            }
            Op::Noop => Some(self.clone()),
        }
    }

    pub fn map<S2: Clone, T2: Clone>(&self, f: &impl Fn(&S) -> S2, g: &impl Fn(&T) -> T2) -> Stack<S2, T2> {
        match self {
            Stack::Leaf { ch, tag } => Stack::Leaf { ch: AnnotatedChar { sym: f(&ch.sym), link: ch.link }, tag: g(tag) },
            Stack::Seq { order, tag, items } => {
                let v: Vec<_> = items.iter().map(|s| s.map(f, g)).collect();
                Stack::Seq { order: *order, tag: g(tag), items: List::from_vec(v).expect("non-empty") }
            }
        }
    }

    pub fn untagged(&self) -> Stack<S, ()> {
        self.map(&|s: &S| s.clone(), &|_| ())
    }

    /// Total number of characters.
    pub fn char_count(&self) -> usize {
        match self {
            Stack::Leaf { .. } => 1,
            Stack::Seq { items, .. } => items.iter().map(|s| s.char_count()).sum(),
        }
    }

    /// Characters of the topmost order-1 stack, topmost first.
    pub fn top_chars(&self) -> impl Iterator<Item = &AnnotatedChar<S>> {
        self.top(2).and_then(|s| s.items()).into_iter().flat_map(|l| l.iter()).map(|s| match s {
            Stack::Leaf { ch, .. } => ch,
            Stack::Seq { .. } => unreachable!(),
        })
    }

    /// Every sequence at every level is non-empty and orders decrease by one.
    pub fn well_formed(&self) -> bool {
        match self {
            Stack::Leaf { .. } => true,
            Stack::Seq { order, items, .. } => items.iter().all(|s| s.order() + 1 == *order && s.well_formed()),
        }
    }
}

impl<S: fmt::Display, T> fmt::Display for Stack<S, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stack::Leaf { ch, .. } => write!(f, "{}^{}", ch.sym, ch.link),
            Stack::Seq { order, items, .. } => {
                f.write_str("[")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]_{order}")
            }
        }
    }
}

/// Parses the bracket notation produced by `Display`, e.g. `[[a^1 b^0]_1]_2`.
pub fn parse_stack(text: &str) -> Result<Stack<String>, StackError> {
    let toks = tokenize(text)?;
    let mut pos = 0;
    let s = parse_elem(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(StackError::Syntax(format!("trailing input at token {pos}")));
    }
    Ok(s)
}

#[derive(Debug)]
enum Tok {
    Open,
    Close(u8),
    Char(String, u32),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, StackError> {
    let mut out = Vec::new();
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '[' {
            out.push(Tok::Open);
            i += 1;
        } else if c == ']' {
            i += 1;
            if i >= cs.len() || cs[i] != '_' {
                return Err(StackError::Syntax("expected `_<order>` after `]`".into()));
            }
            i += 1;
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let n: String = cs[start..i].iter().collect();
            out.push(Tok::Close(n.parse().map_err(|_| StackError::Syntax(format!("bad order `{n}`")))?));
        } else {
            let start = i;
            while i < cs.len() && !cs[i].is_whitespace() && cs[i] != '[' && cs[i] != ']' {
                i += 1;
            }
            let word: String = cs[start..i].iter().collect();
            let (sym, link) = word
                .rsplit_once('^')
                .ok_or_else(|| StackError::Syntax(format!("character `{word}` lacks `^link`")))?;
            let link = link.parse().map_err(|_| StackError::Syntax(format!("bad link in `{word}`")))?;
            out.push(Tok::Char(sym.to_string(), link));
        }
    }
    Ok(out)
}

fn parse_elem(toks: &[Tok], pos: &mut usize) -> Result<Stack<String>, StackError> {
    match toks.get(*pos) {
        Some(Tok::Char(s, l)) => {
            *pos += 1;
            Ok(Stack::leaf(s.clone(), *l, ()))
        }
        Some(Tok::Open) => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(Tok::Close(k)) => {
                        *pos += 1;
                        let s = Stack::seq((), items)?;
                        if s.order() != *k {
                            return Err(StackError::OrderMismatch { expected: *k, found: s.order() });
                        }
                        return Ok(s);
                    }
                    Some(_) => items.push(parse_elem(toks, pos)?),
                    None => return Err(StackError::Syntax("unclosed `[`".into())),
                }
            }
        }
        _ => Err(StackError::Syntax(format!("unexpected token at {pos}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::ptr_arg)]
    fn chorder(s: &String) -> u8 {
        match s.as_str() {
            "a" => 3,
            _ => 2,
        }
    }

    #[test]
    fn display_roundtrip() {
        let text = "[[[a^1 b^1]_1 [b^1]_1]_2 [[b^0]_1]_2]_3";
        let w = parse_stack(text).unwrap();
        assert_eq!(w.to_string(), text);
        assert_eq!(w.order(), 3);
    }

    #[test]
    fn pop_refuses_to_empty() {
        let w: Stack<String> = Stack::initial(2, "b".into(), ());
        assert!(w.pop(1).is_none());
        assert!(w.pop(2).is_none());
        let w2 = w.push(2, ()).unwrap();
        assert_eq!(w2.pop(2).unwrap(), w);
    }

    #[test]
    fn rewrite_keeps_link() {
        let w = parse_stack("[[[a^1 b^1]_1 [b^1]_1]_2 [[b^0]_1]_2]_3").unwrap();
        let r = w.apply(&Op::Rewrite("c".to_string()), |s| if s == "c" { 3 } else { chorder(s) }, ()).unwrap();
        assert_eq!(r.top_char(), &AnnotatedChar { sym: "c".to_string(), link: 1 });
        assert!(w.apply(&Op::Rewrite("b".to_string()), chorder, ()).is_none());
    }
}
