/// Environment variable overriding every carrier size bound.
pub const MAX_CARRIER_ENV: &str = "CONFUSE_MAX_CARRIER";

/// Size bounds for table-backed carriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest field order `q` (discrete-log tables are `O(q)`).
    pub max_field: u64,
    /// Largest modulus for subgroup enumeration.
    pub max_ring: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_field: 4096,
            max_ring: 512,
        }
    }
}

impl Limits {
    /// Defaults, with both bounds replaced by `CONFUSE_MAX_CARRIER` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(bound) = std::env::var(MAX_CARRIER_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            limits.max_field = bound;
            limits.max_ring = bound;
        }
        limits
    }
}
