//! Subsets of a small ground set `{0, .., n-1}` stored as `u32` bitmasks.

pub type Mask = u32;

pub fn full(n: usize) -> Mask {
    if n >= 32 {
        Mask::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn contains(s: Mask, i: usize) -> bool {
    s >> i & 1 == 1
}

pub fn size(s: Mask) -> usize {
    s.count_ones() as usize
}

pub fn elements(s: Mask) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub fn to_vec(s: Mask) -> Vec<usize> {
    elements(s).collect()
}

pub fn from_elements<I: IntoIterator<Item = usize>>(it: I) -> Mask {
    it.into_iter().fold(0, |acc, i| acc | 1 << i)
}

/// All subsets of `{0..n-1}` of size `k`, in increasing mask order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = Mask> {
    (0..=full(n)).filter(move |&s| size(s) == k)
}

/// All submasks of `s`, including `s` and the empty set.
pub fn submasks(s: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(s);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & s) };
        Some(cur)
    })
}

/// Removes element `i` and shifts higher elements down by one.
pub fn delete_index(s: Mask, i: usize) -> Mask {
    let low = s & ((1 << i) - 1);
    let high = (s >> (i + 1)) << i;
    low | high
}

/// Inverse of [`delete_index`]: opens a gap at position `i`.
pub fn insert_gap(s: Mask, i: usize) -> Mask {
    let low = s & ((1 << i) - 1);
    let high = (s >> i) << (i + 1);
    low | high
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_round_trip() {
        for s in 0..64u32 {
            for i in 0..6 {
                assert_eq!(delete_index(insert_gap(s, i), i), s);
            }
        }
        assert_eq!(delete_index(0b1011, 1), 0b101);
    }

    #[test]
    fn submask_enumeration() {
        let subs: Vec<Mask> = submasks(0b101).collect();
        assert_eq!(subs, vec![0b101, 0b100, 0b001, 0]);
        assert_eq!(subsets_of_size(4, 2).count(), 6);
    }
}
