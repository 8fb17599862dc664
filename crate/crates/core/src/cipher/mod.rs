//! One-round color-image cipher: plaintext-keyed derivation, cross-channel
//! nibble mixing, and joint permutation / XOR-feedback diffusion.

mod image;
mod keys;
mod keystream;
mod mix;

use thiserror::Error;

pub use image::ImageBuffer;
pub use keys::{derive_keys, KeyMaterial};
pub use keystream::{make_keystream, KeystreamBundle};
pub use mix::{bit_mix, bit_unmix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CipherError {
    #[error("image must have at least one pixel (got {height}x{width})")]
    EmptyImage { height: usize, width: usize },
    #[error("sample count mismatch: expected {expected}, got {got}")]
    SampleCountMismatch { expected: usize, got: usize },
    #[error("malformed key: {reason}")]
    MalformedKey { reason: String },
    #[error("image dimensions differ: {h1}x{w1} vs {h2}x{w2}")]
    DimensionMismatch {
        h1: usize,
        w1: usize,
        h2: usize,
        w2: usize,
    },
}

/// Encrypts one image: nibble mixing, then the sort-permutation /
/// XOR-feedback diffusion pass over the flattened samples. The first two
/// output bytes are seeded from the permuted tail of the plaintext; every
/// later byte chains the two previous outputs.
pub fn encrypt(plain: &ImageBuffer, keys: &KeyMaterial) -> ImageBuffer {
    let mixed = bit_mix(plain);
    let ks = make_keystream(keys, plain.pixel_count());
    let r = mixed.samples();
    let n3 = r.len();
    let (w, v) = (&ks.w, &ks.v);
    let mut d = vec![0u8; n3];
    d[0] = r[w[0]] ^ r[w[n3 - 1]] ^ r[w[n3 - 2]] ^ v[0];
    d[1] = r[w[1]] ^ d[0] ^ r[w[n3 - 1]] ^ v[1];
    for i in 2..n3 {
        d[i] = r[w[i]] ^ d[i - 1] ^ d[i - 2] ^ v[i];
    }
    ImageBuffer::new(plain.height(), plain.width(), d).expect("dimensions preserved")
}

/// Decrypts one image by regenerating the identical keystream and running
/// the diffusion recurrence backwards, then undoing the nibble mixing.
pub fn decrypt(cipher: &ImageBuffer, keys: &KeyMaterial) -> ImageBuffer {
    let ks = make_keystream(keys, cipher.pixel_count());
    let d = cipher.samples();
    let n3 = d.len();
    let (w, v) = (&ks.w, &ks.v);
    let mut r = vec![0u8; n3];
    for i in (2..n3).rev() {
        r[w[i]] = d[i] ^ d[i - 1] ^ d[i - 2] ^ v[i];
    }
    r[w[1]] = d[1] ^ d[0] ^ r[w[n3 - 1]] ^ v[1];
    r[w[0]] = d[0] ^ r[w[n3 - 1]] ^ r[w[n3 - 2]] ^ v[0];
    let mixed =
        ImageBuffer::new(cipher.height(), cipher.width(), r).expect("dimensions preserved");
    bit_unmix(&mixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, h: usize, w: usize) -> ImageBuffer {
        let samples = (0..3 * h * w).map(|_| rng.gen()).collect();
        ImageBuffer::new(h, w, samples).unwrap()
    }

    #[test]
    fn round_trip_both_key_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &(h, w) in &[(1usize, 1usize), (2, 3), (17, 9), (64, 64)] {
            let img = random_image(&mut rng, h, w);
            let derived = KeyMaterial::derive(&img);
            assert_eq!(decrypt(&encrypt(&img, &derived), &derived), img);
            let raw = KeyMaterial::from_hash(rng.gen());
            assert_eq!(decrypt(&encrypt(&img, &raw), &raw), img);
        }
    }

    #[test]
    fn encryption_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let img = random_image(&mut rng, 8, 5);
        let keys = KeyMaterial::derive(&img);
        assert_eq!(encrypt(&img, &keys), encrypt(&img, &keys));
    }

    #[test]
    fn single_pixel_recurrence_by_hand() {
        // With n3 = 3 the whole diffusion is three equations; replay them
        // directly against an injected keystream.
        let img = ImageBuffer::new(1, 1, vec![0x12, 0x34, 0x56]).unwrap();
        let keys = KeyMaterial::derive(&img);
        let ks = make_keystream(&keys, 1);
        let mixed = bit_mix(&img);
        let r = mixed.samples();
        let (w, v) = (&ks.w, &ks.v);
        let d0 = r[w[0]] ^ r[w[2]] ^ r[w[1]] ^ v[0];
        let d1 = r[w[1]] ^ d0 ^ r[w[2]] ^ v[1];
        let d2 = r[w[2]] ^ d1 ^ d0 ^ v[2];
        let cipher = encrypt(&img, &keys);
        assert_eq!(cipher.samples(), &[d0, d1, d2]);
    }

    #[test]
    fn all_zero_cipher_reduces_to_v_chain() {
        // Decrypting an all-zero cipher image leaves r[w[i]] = v[i] for
        // i >= 2 and folds the recovered tail into the first two slots.
        let zero = ImageBuffer::new(1, 1, vec![0, 0, 0]).unwrap();
        let keys = KeyMaterial::from_hash([0x5A; 32]);
        let ks = make_keystream(&keys, 1);
        let (w, v) = (&ks.w, &ks.v);
        let mut r = [0u8; 3];
        r[w[2]] = v[2];
        r[w[1]] = r[w[2]] ^ v[1];
        r[w[0]] = r[w[2]] ^ r[w[1]] ^ v[0];
        let plain = decrypt(&zero, &keys);
        let remixed = bit_mix(&plain);
        assert_eq!(remixed.samples(), &r);
    }

    #[test]
    fn wrong_key_fails_noisily() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let img = random_image(&mut rng, 32, 32);
        let keys = KeyMaterial::derive(&img);
        let cipher = encrypt(&img, &keys);
        let mut flipped = *keys.hash();
        flipped[31] ^= 0x01;
        let wrong = KeyMaterial::from_hash(flipped);
        let garbled = decrypt(&cipher, &wrong);
        let differing = garbled
            .samples()
            .iter()
            .zip(img.samples())
            .filter(|(a, b)| a != b)
            .count();
        let ratio = 100.0 * differing as f64 / img.samples().len() as f64;
        assert!(ratio > 99.0, "wrong-key NPCR only {ratio:.2}%");
    }
}
