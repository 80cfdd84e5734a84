use num_complex::Complex64 as C64;
use rand::Rng;

use crate::encoding::AmplitudeVector;

pub fn four_tone_amps() -> [C64; 4] {
    crate::fixtures::FOUR_TONE_AMPLITUDES
}

pub fn random_amps<R: Rng>(rng: &mut R, len: usize) -> AmplitudeVector {
    let v: Vec<C64> =
        (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    AmplitudeVector::new(v).unwrap()
}
