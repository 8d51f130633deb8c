//! Fixed-width bit rows.

/// Number of 64-bit words needed to hold `n` bits.
#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub fn get(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub fn set(words: &mut [u64], i: usize) {
    words[i >> 6] |= 1u64 << (i & 63);
}

#[inline]
pub fn clear(words: &mut [u64], i: usize) {
    words[i >> 6] &= !(1u64 << (i & 63));
}

#[inline]
pub fn count(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn or_into(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a |= *b;
    }
}

#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
pub fn or_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x | y).count_ones() as usize).sum()
}

/// Indices of set bits in increasing order.
pub fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            }
        })
    })
}

/// Bit row with the given indices set.
pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut w = vec![0u64; words_for(n)];
    for i in idx {
        set(&mut w, i);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_indices() {
        let idx = vec![0, 5, 63, 64, 127, 130];
        let w = from_indices(131, idx.iter().copied());
        assert_eq!(ones(&w).collect::<Vec<_>>(), idx);
        assert_eq!(count(&w), 6);
        assert!(get(&w, 64));
        assert!(!get(&w, 65));
    }
}
