//! Chaotic keystream: concatenated orbit coordinates, the sort-induced
//! permutation, and the quantized byte mask.

use crate::chaos::{generate_orbit, DEFAULT_TRANSIENT};
use crate::cipher::KeyMaterial;

/// Keystream for an image with `n` pixels: `u` holds the concatenated
/// X || Y || Z orbit coordinates (3n reals), `w` the permutation that
/// sorts `u` ascending (stable, ties broken by ascending index), and `v`
/// the quantized mask `v[i] = floor(10000 u[i]) & 255`.
#[derive(Debug, Clone)]
pub struct KeystreamBundle {
    pub u: Vec<f64>,
    pub w: Vec<usize>,
    pub v: Vec<u8>,
}

impl KeystreamBundle {
    /// Builds the permutation and mask from an explicit real sequence.
    pub fn from_sequence(u: Vec<f64>) -> Self {
        let mut w: Vec<usize> = (0..u.len()).collect();
        // Vec::sort_by is stable; the index tiebreak keeps the rule
        // explicit for equal keys.
        w.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
        let v = u
            .iter()
            .map(|&x| (((10000.0 * x).floor() as i64) & 255) as u8)
            .collect();
        Self { u, w, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Number of pixels this keystream masks (a third of its length).
    pub fn pixel_count(&self) -> usize {
        self.u.len() / 3
    }
}

/// Generates the keystream for `n` pixels from the derived keys: one
/// orbit of length `n` after the default transient discard.
pub fn make_keystream(keys: &KeyMaterial, n: usize) -> KeystreamBundle {
    let orbit = generate_orbit(&keys.seed(), &keys.params(), DEFAULT_TRANSIENT, n)
        .expect("derived seeds are finite by construction");
    let mut u = Vec::with_capacity(3 * n);
    u.extend(orbit.xs());
    u.extend(orbit.ys());
    u.extend(orbit.zs());
    KeystreamBundle::from_sequence(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::ImageBuffer;

    #[test]
    fn hand_vector() {
        // U = (0.3, 0.1, 0.2): sorting gives W = (2, 3, 1) in 1-based
        // indexing, and V = (3000 & 255, 1000 & 255, 2000 & 255).
        let ks = KeystreamBundle::from_sequence(vec![0.3, 0.1, 0.2]);
        assert_eq!(ks.w, vec![1, 2, 0]);
        assert_eq!(ks.v, vec![184, 232, 208]);
    }

    #[test]
    fn permutation_sorts_u() {
        let keys = KeyMaterial::derive(&ImageBuffer::new(1, 3, vec![9; 9]).unwrap());
        let ks = make_keystream(&keys, 64);
        assert_eq!(ks.len(), 192);
        // w is a bijection
        let mut seen = vec![false; ks.len()];
        for &i in &ks.w {
            assert!(!seen[i]);
            seen[i] = true;
        }
        // applying w to u is non-decreasing
        for pair in ks.w.windows(2) {
            assert!(ks.u[pair[0]] <= ks.u[pair[1]]);
        }
    }

    #[test]
    fn ties_break_by_index() {
        let ks = KeystreamBundle::from_sequence(vec![0.5, 0.25, 0.5, 0.25]);
        assert_eq!(ks.w, vec![1, 3, 0, 2]);
    }

    #[test]
    fn keystream_depends_only_on_keys_and_length() {
        let img1 = ImageBuffer::new(2, 2, vec![1; 12]).unwrap();
        let keys = KeyMaterial::derive(&img1);
        let a = make_keystream(&keys, 4);
        let b = make_keystream(&keys, 4);
        assert_eq!(a.u, b.u);
        assert_eq!(a.w, b.w);
        assert_eq!(a.v, b.v);
    }
}
