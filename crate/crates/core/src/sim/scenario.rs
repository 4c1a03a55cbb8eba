//! The three mean scenarios of the simulation study.

use crate::error::{Error, Result};
use crate::profile::MeanProfile;

fn scenario2_block(i: usize) -> f64 {
    // 0-based position within a block of 1000.
    let one_based = i + 1;
    if (801..=820).contains(&one_based) {
        return -3.0;
    }
    let m = one_based / 100;
    let r = one_based % 100;
    if (1..=6).contains(&m) && (1..=10).contains(&r) {
        1.0
    } else {
        0.0
    }
}

/// Builds scenario `id`:
///
/// 1. `theta = 0`, any `n >= 4`;
/// 2. `theta_i = 1` on `100m+1..=100m+10` for `m = 1..6`, `-3` on `801..=820`,
///    zero elsewhere; the 1000-point pattern is repeated for multiples of 1000;
/// 3. `theta_i = 1` on `20m+1..=20m+10` and `-1` elsewhere; `n` a multiple of 20.
pub fn build_scenario(id: u8, n: usize) -> Result<MeanProfile> {
    match id {
        1 => MeanProfile::constant(n, 0.0),
        2 => {
            if n == 0 || !n.is_multiple_of(1000) {
                return Err(Error::domain(format!(
                    "scenario 2 needs n to be a multiple of 1000, got {n}"
                )));
            }
            MeanProfile::from_values((0..n).map(|i| scenario2_block(i % 1000)).collect())
        }
        3 => {
            if n == 0 || !n.is_multiple_of(20) {
                return Err(Error::domain(format!(
                    "scenario 3 needs n to be a multiple of 20, got {n}"
                )));
            }
            MeanProfile::alternating_blocks(n, 10, 1.0)
        }
        _ => Err(Error::domain(format!(
            "unknown scenario {id}; expected 1, 2 or 3"
        ))),
    }
}
