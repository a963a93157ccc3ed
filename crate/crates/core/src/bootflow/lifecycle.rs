// Licensed under the Apache-2.0 license

//! Lifecycle and creator secrets, fixed in mask ROM instead of OTP.
//!
//! There is no transition operation: the state is a constant.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LifecycleState {
    TestUnlocked,
}

/// Encoded lifecycle word as it would read from OTP.
pub const LC_STATE_WORD: u32 = 0x5445_5354;
pub const LIFECYCLE: LifecycleState = LifecycleState::TestUnlocked;

/// Creator key used to sign ROM_EXT manifests.
pub const CREATOR_KEY: [u8; 32] = *b"rotsim-test-unlocked-creator-key";

pub fn lifecycle_state() -> LifecycleState {
    LIFECYCLE
}

/// JTAG stays open in test-unlocked parts.
pub fn jtag_enabled(state: LifecycleState) -> bool {
    match state {
        LifecycleState::TestUnlocked => true,
    }
}
