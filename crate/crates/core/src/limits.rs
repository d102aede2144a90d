//! State-space caps for exhaustive constructions.

use crate::error::{Error, Result};

/// Default ceiling on enumerated states (graph vertices, permutations).
pub const DEFAULT_STATE_CAP: usize = 4_000_000;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "LISTUP_MAX_STATES";

/// Active cap: `LISTUP_MAX_STATES` when set and parseable, default otherwise.
pub fn state_cap() -> usize {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

/// Errors out once `states` passes the active cap.
pub fn check_states(states: usize) -> Result<()> {
    let cap = state_cap();
    if states > cap {
        Err(Error::StateSpaceExceeded { states, cap })
    } else {
        Ok(())
    }
}
