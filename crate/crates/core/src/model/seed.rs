const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for realization `realization` at grid point `grid_index`, a pure
/// function of its arguments so any scheduling reproduces the same streams.
pub fn realization_seed(master: u64, grid_index: u64, realization: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ grid_index) ^ realization.wrapping_mul(GOLDEN))
}
