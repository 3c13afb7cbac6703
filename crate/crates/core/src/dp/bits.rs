//! Bag assignments as bit masks: bit `i` holds the value of `bag[i]`.

/// Largest bag the engine handles.
pub const MAX_BAG: usize = 64;

/// Index of `v` in the sorted `bag`.
///
/// # Panics
/// If `v` is not in the bag.
pub fn bag_position(bag: &[usize], v: usize) -> usize {
    bag.binary_search(&v).unwrap_or_else(|_| panic!("vertex {v} not in bag {bag:?}"))
}

/// Inserts a bit at `pos`, shifting higher bits up.
pub fn insert_bit(mask: u64, pos: usize, value: bool) -> u64 {
    let m = mask as u128;
    let low = m & ((1u128 << pos) - 1);
    let high = (m >> pos) << (pos + 1);
    (low | high | (u128::from(value) << pos)) as u64
}

/// Removes the bit at `pos`, shifting higher bits down.
pub fn remove_bit(mask: u64, pos: usize) -> u64 {
    let m = mask as u128;
    let low = m & ((1u128 << pos) - 1);
    let high = (m >> (pos + 1)) << pos;
    (low | high) as u64
}
