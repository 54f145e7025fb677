use super::C64;
use crate::error::{contract, Result};
use rustfft::FftPlanner;

/// Zero-padded, unnormalized inverse DFT:
/// `out[n] = Σ_{k<K} s[k]·exp(+j2πkn/N_A)`.
///
/// With this kernel a delay phase ramp `exp(−j2πkΔfτ)` peaks at the positive
/// bin `τΔfN_A`.
pub fn ifft_padded(s: &[C64], size: usize) -> Result<Vec<C64>> {
    if size < s.len() {
        return Err(contract(format!(
            "ifft size {size} is smaller than input length {}",
            s.len()
        )));
    }
    if !size.is_power_of_two() {
        return Err(contract(format!("ifft size {size} is not a power of two")));
    }
    let mut buf = vec![C64::new(0.0, 0.0); size];
    buf[..s.len()].copy_from_slice(s);
    FftPlanner::new().plan_fft_inverse(size).process(&mut buf);
    Ok(buf)
}
