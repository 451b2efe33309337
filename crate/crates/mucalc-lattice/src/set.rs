use fixedbitset::FixedBitSet;

/// Subset of a finite carrier `{0, .., n-1}`.
pub type Set = FixedBitSet;

pub fn empty(n: usize) -> Set {
    FixedBitSet::with_capacity(n)
}

pub fn full(n: usize) -> Set {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert_range(..);
    s
}

pub fn singleton(n: usize, x: usize) -> Set {
    let mut s = empty(n);
    s.insert(x);
    s
}

pub fn from_elems<I: IntoIterator<Item = usize>>(n: usize, elems: I) -> Set {
    let mut s = empty(n);
    for x in elems {
        s.insert(x);
    }
    s
}

pub fn complement(s: &Set) -> Set {
    let mut c = s.clone();
    c.toggle_range(..);
    c
}

pub fn union(a: &Set, b: &Set) -> Set {
    let mut u = a.clone();
    u.union_with(b);
    u
}

pub fn intersection(a: &Set, b: &Set) -> Set {
    let mut u = a.clone();
    u.intersect_with(b);
    u
}

pub fn difference(a: &Set, b: &Set) -> Set {
    let mut u = a.clone();
    u.difference_with(b);
    u
}

pub fn elems(s: &Set) -> Vec<usize> {
    s.ones().collect()
}

/// Bit pattern of a set over a carrier of at most 64 elements.
pub fn to_bits(s: &Set) -> u64 {
    s.ones().fold(0u64, |acc, x| acc | (1u64 << x))
}

pub fn from_bits(n: usize, bits: u64) -> Set {
    from_elems(n, (0..n).filter(|i| bits >> i & 1 == 1))
}

/// Every subset of an `n`-element carrier, in bit-pattern order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = Set> {
    assert!(n < 32, "subset enumeration over {n} elements");
    (0..1u64 << n).map(move |b| from_bits(n, b))
}
