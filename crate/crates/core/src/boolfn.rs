//! Boolean functions `f: {-1,+1}^n -> {0,1}` stored as dense bit tables,
//! their Walsh-Hadamard spectra, level weights and average distance.

use std::ops::{Add, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported dimension for dense tables.
pub const MAX_DIM: usize = 24;

/// Dense truth table of a Boolean function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFn {
    n: usize,
    words: Vec<u64>,
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        Err(Error::DimensionTooLarge { n, max: MAX_DIM })
    } else {
        Ok(())
    }
}

impl BoolFn {
    /// The zero function on `{-1,+1}^n`.
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            words: vec![0; (1usize << n).div_ceil(64)],
        })
    }

    /// Indicator of a set of point indices.
    pub fn from_support(n: usize, points: &[usize]) -> Result<Self> {
        let mut f = Self::zero(n)?;
        for &p in points {
            if p >= f.len() {
                return Err(Error::IndexOutOfRange { index: p, n });
            }
            f.set(p, true);
        }
        Ok(f)
    }

    /// Tabulates a predicate on point indices.
    pub fn from_fn(n: usize, pred: impl Fn(usize) -> bool) -> Result<Self> {
        let mut f = Self::zero(n)?;
        for i in 0..f.len() {
            if pred(i) {
                f.set(i, true);
            }
        }
        Ok(f)
    }

    /// Majority of three bits: `1{x1 + x2 + x3 > 0}`.
    pub fn majority3() -> Self {
        Self::from_fn(3, |i| i.count_ones() <= 1).expect("n = 3 is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    /// Support size `|A|`.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `E f = |A| / 2^n`.
    pub fn mean(&self) -> f64 {
        self.count() as f64 / self.len() as f64
    }

    /// Sorted support indices.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.get(i)).collect()
    }

    pub fn complement(&self) -> Self {
        let mut g = self.clone();
        for i in 0..self.len() {
            g.set(i, !self.get(i));
        }
        g
    }

    /// Coordinate sums `s_j = sum_{x in A} x_j` for `j = 1..n`, so that
    /// `f^_j = s_j / 2^n` and `4^n W_1 = sum_j s_j^2` exactly.
    pub fn coordinate_sums(&self) -> Vec<i64> {
        let m = self.count() as i64;
        let mut minus = vec![0i64; self.n];
        for i in self.support() {
            for (j, c) in minus.iter_mut().enumerate() {
                *c += ((i >> j) & 1) as i64;
            }
        }
        minus.into_iter().map(|c| m - 2 * c).collect()
    }

    /// Walsh-Hadamard spectrum, normalized so `coeffs[S] = E[f chi_S]`.
    pub fn wht(&self) -> Spectrum {
        let mut buf: Vec<i64> = (0..self.len()).map(|i| self.get(i) as i64).collect();
        fwht_in_place(&mut buf);
        let scale = 1.0 / self.len() as f64;
        Spectrum {
            n: self.n,
            coeffs: buf.into_iter().map(|v| v as f64 * scale).collect(),
        }
    }

    /// Restrictions `g = f|_{x_i = +1}` and `h = f|_{x_i = -1}`, both on
    /// dimension `n - 1`, with `i` 1-based.
    pub fn decompose(&self, i: usize) -> Result<(BoolFn, BoolFn)> {
        if i == 0 || i > self.n {
            return Err(Error::CoordinateOutOfRange { i, n: self.n });
        }
        let j = i - 1;
        let low = (1usize << j) - 1;
        let lift = |k: usize, bit: usize| ((k & !low) << 1) | (bit << j) | (k & low);
        let g = BoolFn::from_fn(self.n - 1, |k| self.get(lift(k, 0)))?;
        let h = BoolFn::from_fn(self.n - 1, |k| self.get(lift(k, 1)))?;
        Ok((g, h))
    }
}

/// Unnormalized in-place Walsh-Hadamard butterfly:
/// `buf[S] <- sum_i buf[i] (-1)^popcount(i & S)`. Length must be a power of two.
pub fn fwht_in_place<T>(buf: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let len = buf.len();
    assert!(
        len.is_power_of_two(),
        "transform length must be a power of two"
    );
    let mut h = 1;
    while h < len {
        for block in buf.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

/// Fourier coefficients of a function on `{-1,+1}^n`, indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    /// `W_k = sum_{|S| = k} f^_S^2`.
    pub fn level_weight(&self, k: usize) -> Result<f64> {
        if k > self.n {
            return Err(Error::CoordinateOutOfRange { i: k, n: self.n });
        }
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| s.count_ones() as usize == k)
            .map(|(_, c)| c * c)
            .sum())
    }

    /// `sum_S f^_S^2`.
    pub fn total_weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Average Hamming distance between two independent uniform points of the
/// support (ordered pairs, with replacement).
pub fn avg_distance(f: &BoolFn) -> Result<f64> {
    let m = f.count() as i64;
    if m == 0 {
        return Err(Error::EmptySupport);
    }
    // Coordinate j contributes 2 c (m - c) disagreeing ordered pairs.
    let numer: i64 = f
        .coordinate_sums()
        .iter()
        .map(|&s| {
            let c = (m - s) / 2;
            2 * c * (m - c)
        })
        .sum();
    Ok(numer as f64 / (m * m) as f64)
}

/// `|W_1 - a^2 (n - 2 D)|` with `W_1` taken from the spectrum.
pub fn check_wd_identity(f: &BoolFn) -> Result<f64> {
    let d = avg_distance(f)?;
    let a = f.mean();
    let w1 = f.wht().level_weight(1)?;
    Ok((w1 - a * a * (f.n() as f64 - 2.0 * d)).abs())
}

/// Uniformly random support of size `m`, reproducible for a fixed seed.
pub fn random_fn(n: usize, m: usize, seed: u64) -> Result<BoolFn> {
    check_dim(n)?;
    let len = 1usize << n;
    if m > len {
        return Err(Error::SupportSizeOutOfRange { m, max: len });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = rand::seq::index::sample(&mut rng, len, m).into_vec();
    points.sort_unstable();
    BoolFn::from_support(n, &points)
}

/// Parses a support list: one decimal index per line, blank lines ignored.
pub fn parse_support(n: usize, text: &str) -> Result<BoolFn> {
    let points = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad point index {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    BoolFn::from_support(n, &points)
}

/// Inverse of [`parse_support`]; sorted, newline-terminated.
pub fn format_support(f: &BoolFn) -> String {
    f.support().iter().map(|i| format!("{i}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_coeff(f: &BoolFn, s: usize) -> f64 {
        let sum: i64 = (0..f.len())
            .filter(|&i| f.get(i))
            .map(|i| {
                if (i & s).count_ones().is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            })
            .sum();
        sum as f64 / f.len() as f64
    }

    #[test]
    fn support_constructor() {
        let d = BoolFn::from_support(1, &[0]).unwrap();
        assert_eq!(d.mean(), 0.5);
        assert_eq!(BoolFn::from_support(2, &[]).unwrap().mean(), 0.0);
        assert_eq!(
            BoolFn::from_support(3, &[0, 1, 2, 3, 4, 5, 6, 7])
                .unwrap()
                .mean(),
            1.0
        );
        assert_eq!(
            BoolFn::from_support(2, &[4]),
            Err(Error::IndexOutOfRange { index: 4, n: 2 })
        );
        assert!(BoolFn::zero(25).is_err());
    }

    #[test]
    fn spectra_of_small_functions() {
        let d = BoolFn::from_support(1, &[0]).unwrap().wht();
        assert_eq!(d.coeffs(), &[0.5, 0.5]);

        let maj = BoolFn::majority3().wht();
        assert_eq!(maj.coeff(0), 0.5);
        for s in [1, 2, 4] {
            assert_eq!(maj.coeff(s), 0.25);
        }
        assert_eq!(maj.coeff(7), -0.25);
        for s in [3, 5, 6] {
            assert_eq!(maj.coeff(s), 0.0);
        }
        assert!(BoolFn::zero(4)
            .unwrap()
            .wht()
            .coeffs()
            .iter()
            .all(|&c| c == 0.0));
    }

    #[test]
    fn wht_matches_brute_force() {
        let f = random_fn(6, 23, 5).unwrap();
        let spec = f.wht();
        for s in 0..f.len() {
            assert_eq!(spec.coeff(s), brute_coeff(&f, s));
        }
    }

    #[test]
    fn level_weights() {
        let maj = BoolFn::majority3().wht();
        assert_eq!(maj.level_weight(1).unwrap(), 3.0 / 16.0);
        assert_eq!(maj.level_weight(0).unwrap(), 0.25);
        assert!(maj.level_weight(4).is_err());
        // Codimension-3 subcube inside n = 6.
        let cube = BoolFn::from_fn(6, |i| i & 0b111 == 0).unwrap();
        assert_eq!(cube.wht().level_weight(1).unwrap(), 3.0 / 64.0);
    }

    #[test]
    fn average_distance_values() {
        assert_eq!(
            avg_distance(&BoolFn::from_support(3, &[5]).unwrap()).unwrap(),
            0.0
        );
        assert_eq!(
            avg_distance(&BoolFn::from_support(3, &[0, 3]).unwrap()).unwrap(),
            1.0
        );
        let full = BoolFn::from_fn(5, |_| true).unwrap();
        assert_eq!(avg_distance(&full).unwrap(), 2.5);
        assert_eq!(
            avg_distance(&BoolFn::zero(3).unwrap()),
            Err(Error::EmptySupport)
        );
    }

    #[test]
    fn distance_identity_examples() {
        let single = BoolFn::from_support(3, &[0]).unwrap();
        assert_eq!(single.wht().level_weight(1).unwrap(), 3.0 / 64.0);
        assert_eq!(check_wd_identity(&single).unwrap(), 0.0);
        assert_eq!(check_wd_identity(&BoolFn::majority3()).unwrap(), 0.0);
        let f = random_fn(8, 97, 1).unwrap();
        assert!(check_wd_identity(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn decompose_examples() {
        let d = BoolFn::from_support(1, &[0]).unwrap();
        let (g, h) = d.decompose(1).unwrap();
        assert_eq!((g.n(), g.mean(), h.mean()), (0, 1.0, 0.0));

        let (g, h) = BoolFn::majority3().decompose(3).unwrap();
        assert_eq!((g.mean(), h.mean()), (0.75, 0.25));
        // g = OR-type: at least one of x1, x2 is +1; h = AND-type: both +1.
        assert_eq!(g.support(), vec![0, 1, 2]);
        assert_eq!(h.support(), vec![0]);
        assert!(BoolFn::majority3().decompose(4).is_err());
        assert!(BoolFn::majority3().decompose(0).is_err());
    }

    #[test]
    fn random_fn_contract() {
        assert_eq!(random_fn(3, 0, 9).unwrap().count(), 0);
        assert_eq!(random_fn(3, 8, 9).unwrap().count(), 8);
        assert_eq!(random_fn(4, 5, 42).unwrap(), random_fn(4, 5, 42).unwrap());
        assert_eq!(random_fn(4, 5, 42).unwrap().count(), 5);
        assert!(random_fn(3, 9, 1).is_err());
    }

    #[test]
    fn support_text_roundtrip() {
        let f = random_fn(5, 11, 3).unwrap();
        let text = format_support(&f);
        assert_eq!(parse_support(5, &text).unwrap(), f);
        assert!(parse_support(2, "1\nx\n").is_err());
        assert!(parse_support(2, "7\n").is_err());
    }

    fn arb_fn(max_n: usize) -> impl Strategy<Value = BoolFn> {
        (1..=max_n).prop_flat_map(|n| {
            (Just(n), 0..=(1usize << n), any::<u64>())
                .prop_map(|(n, m, seed)| random_fn(n, m, seed).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn parseval(f in arb_fn(10)) {
            let spec = f.wht();
            let a = f.mean();
            prop_assert!((spec.total_weight() - a).abs() <= 1e-12);
            let levels: f64 = (0..=f.n()).map(|k| spec.level_weight(k).unwrap()).sum();
            prop_assert!((levels - a).abs() <= 1e-12);
            prop_assert!((spec.coeff(0) - a).abs() <= 1e-14);
            prop_assert!((spec.level_weight(0).unwrap() - a * a).abs() <= 1e-14);
        }

        #[test]
        fn involution(f in arb_fn(10)) {
            let orig: Vec<i64> = (0..f.len()).map(|i| f.get(i) as i64).collect();
            let mut buf = orig.clone();
            fwht_in_place(&mut buf);
            fwht_in_place(&mut buf);
            let scale = f.len() as i64;
            prop_assert!(buf.iter().zip(&orig).all(|(x, y)| *x == scale * y));

            let mut fl: Vec<f64> = orig.iter().map(|&v| v as f64).collect();
            fwht_in_place(&mut fl);
            fwht_in_place(&mut fl);
            prop_assert!(fl.iter().zip(&orig).all(|(x, &y)| (x - (scale * y) as f64).abs() <= 1e-10));
        }

        #[test]
        fn distance_identity(f in arb_fn(10)) {
            prop_assume!(f.count() > 0);
            prop_assert!(check_wd_identity(&f).unwrap() <= 1e-12);
        }

        #[test]
        fn decomposition_identities(f in arb_fn(9), pick in 0usize..9) {
            let i = 1 + pick % f.n();
            let (g, h) = f.decompose(i).unwrap();
            prop_assert_eq!(f.mean(), (g.mean() + h.mean()) / 2.0);

            // Exact reconstruction.
            let j = i - 1;
            let low = (1usize << j) - 1;
            for k in 0..g.len() {
                let base = ((k & !low) << 1) | (k & low);
                prop_assert_eq!(f.get(base), g.get(k));
                prop_assert_eq!(f.get(base | (1 << j)), h.get(k));
            }

            let (fs, gs, hs) = (f.wht(), g.wht(), h.wht());
            prop_assert!((fs.coeff(1 << j) - (g.mean() - h.mean()) / 2.0).abs() <= 1e-13);
            for c in 0..f.n() {
                if c == j {
                    continue;
                }
                let reduced = if c < j { 1 << c } else { 1 << (c - 1) };
                let expect = (gs.coeff(reduced) + hs.coeff(reduced)) / 2.0;
                prop_assert!((fs.coeff(1 << c) - expect).abs() <= 1e-13);
            }
        }
    }
}
