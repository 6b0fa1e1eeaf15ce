//! Gray-coded unit-energy QPSK.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::C64;

/// Index bit 0 selects the sign of the real part, bit 1 the imaginary part,
/// so neighbouring quadrants differ in one bit.
pub fn modulate(index: u8) -> C64 {
    let re = if index & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let im = if index & 2 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    C64::new(re, im)
}

/// Minimum-distance decision; invariant to positive scaling of `z`.
pub fn slice(z: C64) -> u8 {
    u8::from(z.re < 0.0) | (u8::from(z.im < 0.0) << 1)
}
