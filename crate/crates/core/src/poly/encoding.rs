//! Nested binary counter encodings.

use std::fmt;

/// What an encoding character stands for. Level-0 bits carry the value; bits
/// of higher levels and flat indices spell out positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncKind {
    Bit { level: u32, one: bool },
    Index { pos: u32 },
}

/// A character of the counter alphabet of an odd rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncChar {
    pub rank: u32,
    pub kind: EncKind,
}

impl EncChar {
    pub fn bit(rank: u32, level: u32, one: bool) -> EncChar {
        EncChar { rank, kind: EncKind::Bit { level, one } }
    }

    pub fn index(rank: u32, pos: u32) -> EncChar {
        EncChar { rank, kind: EncKind::Index { pos } }
    }

    /// A value bit (`0_r` or `1_r`).
    pub fn is_value_bit(&self) -> bool {
        matches!(self.kind, EncKind::Bit { level: 0, .. })
    }
}

impl fmt::Display for EncChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EncKind::Bit { level, one } => {
                write!(f, "${}{}_r{}", u8::from(one), "'".repeat(level as usize), self.rank)
            }
            EncKind::Index { pos } => write!(f, "$ix{pos}_r{}", self.rank),
        }
    }
}

/// Slot of the encoding template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Fixed(EncKind),
    /// The value bit at the given position.
    Value(u32),
}

impl Slot {
    pub fn admits(&self, k: EncKind) -> bool {
        match self {
            Slot::Fixed(x) => *x == k,
            Slot::Value(_) => matches!(k, EncKind::Bit { level: 0, .. }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EncodingParams {
    pub depth: u32,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("value {value} does not fit in {width} bits")]
    OutOfRange { value: u64, width: u32 },
}

/// The first offending position of a sequence (top-first); the length when
/// the sequence is too short.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("malformed encoding at position {pos}")]
pub struct Malformed {
    pub pos: usize,
}

impl EncodingParams {
    pub fn new(depth: u32, width: u32) -> EncodingParams {
        EncodingParams { depth: depth.max(1), width: width.max(1) }
    }

    /// Bit widths of the levels `0..depth`, then the range of flat indices.
    pub fn widths(&self) -> Vec<u32> {
        let mut w = vec![self.width];
        for _ in 0..self.depth {
            let last = *w.last().unwrap();
            w.push((u32::BITS - (last - 1).leading_zeros()).max(1));
        }
        w
    }

    /// Number of flat index characters.
    pub fn index_range(&self) -> u32 {
        self.widths()[self.depth as usize - 1]
    }

    /// Slots of a full encoding, topmost first.
    pub fn template(&self) -> Vec<Slot> {
        let w = self.widths();
        let mut out = Vec::new();
        for p in 0..self.width {
            self.prefix(&w, 0, p, &mut out);
            out.push(Slot::Value(p));
        }
        out
    }

    fn prefix(&self, w: &[u32], level: u32, p: u32, out: &mut Vec<Slot>) {
        if level + 1 >= self.depth {
            out.push(Slot::Fixed(EncKind::Index { pos: p }));
            return;
        }
        let lv = level + 1;
        for i in 0..w[lv as usize] {
            self.prefix(w, lv, i, out);
            out.push(Slot::Fixed(EncKind::Bit { level: lv, one: p >> i & 1 == 1 }));
        }
    }

    pub fn len(&self) -> usize {
        self.template().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest representable value.
    pub fn max_value(&self) -> u128 {
        (1u128 << self.width.min(127)) - 1
    }

    /// Every character of the counter alphabet of rank `r`.
    pub fn alphabet(&self, r: u32) -> Vec<EncChar> {
        let mut out = vec![EncChar::bit(r, 0, false), EncChar::bit(r, 0, true)];
        for level in 1..self.depth {
            out.push(EncChar::bit(r, level, false));
            out.push(EncChar::bit(r, level, true));
        }
        for pos in 0..self.index_range() {
            out.push(EncChar::index(r, pos));
        }
        out
    }
}

impl fmt::Display for EncodingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, W={})", self.depth, self.width)
    }
}

/// The encoding of `value` for rank `r`, topmost character first.
pub fn encode_counter(value: u64, r: u32, params: &EncodingParams) -> Result<Vec<EncChar>, EncodeError> {
    if params.width < 64 && value >> params.width != 0 {
        return Err(EncodeError::OutOfRange { value, width: params.width });
    }
    Ok(params
        .template()
        .into_iter()
        .map(|s| match s {
            Slot::Fixed(kind) => EncChar { rank: r, kind },
            Slot::Value(p) => EncChar::bit(r, 0, p < 64 && value >> p & 1 == 1),
        })
        .collect())
}

/// Inverse of [`encode_counter`].
pub fn decode_counter(seq: &[EncChar], r: u32, params: &EncodingParams) -> Result<u64, Malformed> {
    let t = params.template();
    let mut v = 0u64;
    for (i, slot) in t.iter().enumerate() {
        let Some(c) = seq.get(i) else { return Err(Malformed { pos: i }) };
        if c.rank != r || !slot.admits(c.kind) {
            return Err(Malformed { pos: i });
        }
        if let (Slot::Value(p), EncKind::Bit { one: true, .. }) = (slot, c.kind) {
            if *p >= 64 {
                return Err(Malformed { pos: i });
            }
            v |= 1 << p;
        }
    }
    if seq.len() > t.len() {
        return Err(Malformed { pos: t.len() });
    }
    Ok(v)
}

/// The maximal run of rank-`r` characters at the start of `top`.
pub fn top_block(top: &[Option<EncChar>], r: u32) -> Vec<EncChar> {
    top.iter().map_while(|c| c.filter(|c| c.rank == r)).collect()
}

/// The second run of rank-`r` characters, after skipping everything else.
fn next_block(top: &[Option<EncChar>], r: u32) -> Option<Vec<EncChar>> {
    let is_r = |c: &Option<EncChar>| c.is_some_and(|c| c.rank == r);
    let first = top.iter().take_while(|c| is_r(c)).count();
    let gap = top[first..].iter().take_while(|c| !is_r(c)).count();
    let start = first + gap;
    (start < top.len()).then(|| top_block(&top[start..], r))
}

/// The topmost rank-`r` block is a full encoding.
pub fn check_encoding(top: &[Option<EncChar>], r: u32, params: &EncodingParams) -> bool {
    decode_counter(&top_block(top, r), r, params).is_ok()
}

/// The topmost rank-`r` block encodes the same value as the next one.
pub fn check_equals(top: &[Option<EncChar>], r: u32, params: &EncodingParams) -> bool {
    let Ok(a) = decode_counter(&top_block(top, r), r, params) else { return false };
    match next_block(top, r) {
        Some(b) => decode_counter(&b, r, params) == Ok(a),
        None => false,
    }
}

/// `block` (topmost first) can still be completed to a full encoding by
/// pushing more characters on top.
pub fn is_template_suffix(block: &[EncChar], params: &EncodingParams) -> bool {
    let t = params.template();
    if block.len() > t.len() {
        return false;
    }
    let off = t.len() - block.len();
    block.iter().zip(&t[off..]).all(|(c, s)| s.admits(c.kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_in_sixteen_bits() {
        let p = EncodingParams::new(1, 16);
        let e = encode_counter(5, 1, &p).unwrap();
        let pairs: Vec<(u32, bool)> = e
            .chunks(2)
            .map(|c| match (c[0].kind, c[1].kind) {
                (EncKind::Index { pos }, EncKind::Bit { level: 0, one }) => (pos, one),
                _ => panic!("unexpected shape"),
            })
            .collect();
        assert_eq!(pairs.len(), 16);
        assert_eq!(&pairs[..5], &[(0, true), (1, false), (2, true), (3, false), (4, false)]);
        assert!(pairs[5..].iter().enumerate().all(|(i, &(p, b))| p == i as u32 + 5 && !b));
    }

    #[test]
    fn nested_position_four() {
        let p = EncodingParams::new(3, 16);
        assert_eq!(p.widths(), vec![16, 4, 2, 1]);
        let t = p.template();
        // position 4 sits after four full level-0 groups
        let group = t.len() / 16;
        let g4 = &t[4 * group..5 * group];
        let lv1: Vec<bool> = g4
            .iter()
            .filter_map(|s| match s {
                Slot::Fixed(EncKind::Bit { level: 1, one }) => Some(*one),
                _ => None,
            })
            .collect();
        assert_eq!(lv1, vec![false, false, true, false]);
    }

    #[test]
    fn roundtrip_and_mutation() {
        for (d, w) in [(1, 4), (2, 4)] {
            let p = EncodingParams::new(d, w);
            for v in 0..16 {
                let e = encode_counter(v, 3, &p).unwrap();
                assert_eq!(decode_counter(&e, 3, &p), Ok(v));
            }
        }
        let p = EncodingParams::new(1, 4);
        let mut e = encode_counter(6, 1, &p).unwrap();
        e[4] = EncChar::index(1, 3);
        assert_eq!(decode_counter(&e, 1, &p), Err(Malformed { pos: 4 }));
        assert_eq!(decode_counter(&e[..7], 1, &p).unwrap_err().pos, 4);
        let e = encode_counter(6, 1, &p).unwrap();
        assert_eq!(decode_counter(&e[..7], 1, &p), Err(Malformed { pos: 7 }));
        assert!(encode_counter(16, 1, &p).is_err());
    }

    #[test]
    fn checks_on_stacks() {
        let p = EncodingParams::new(1, 2);
        let e: Vec<Option<EncChar>> = encode_counter(2, 1, &p).unwrap().into_iter().map(Some).collect();
        let mut top = e.clone();
        top.push(None);
        top.extend(e.iter().cloned());
        top.push(None);
        assert!(check_encoding(&top, 1, &p));
        assert!(check_equals(&top, 1, &p));
        assert!(!check_equals(&e, 1, &p));
        let mut bad = top.clone();
        bad.insert(1, None);
        assert!(!check_encoding(&bad, 1, &p));
        assert!(is_template_suffix(&top_block(&e[2..], 1), &p));
        assert!(!is_template_suffix(&[EncChar::index(1, 0)], &p));
        assert!(!is_template_suffix(&encode_counter(0, 1, &p).unwrap().repeat(2), &p));
    }
}
