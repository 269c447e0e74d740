//! Small numeric helpers shared across modules.

/// Largest `n` accepted by [`binomial`].
pub const MAX_BINOMIAL_N: usize = 64;

/// Binomial coefficient in floating point via the multiplicative recurrence.
///
/// Returns 0 for `k > n`. Panics if `n` exceeds [`MAX_BINOMIAL_N`].
pub fn binomial(n: usize, k: usize) -> f64 {
    assert!(n <= MAX_BINOMIAL_N, "binomial guard: n = {n} > {MAX_BINOMIAL_N}");
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    acc.round_if_integral()
}

trait RoundIfIntegral {
    fn round_if_integral(self) -> Self;
}

impl RoundIfIntegral for f64 {
    #[inline]
    fn round_if_integral(self) -> f64 {
        let r = self.round();
        if (self - r).abs() <= 1e-9 * r.abs().max(1.0) {
            r
        } else {
            self
        }
    }
}

/// Kahan-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// `a^s - b^s` for `a >= b >= 0`, computed as `(a - b) * sum_j a^j b^(s-1-j)`
/// with the difference supplied separately to avoid cancellation.
pub fn power_difference(a: f64, b: f64, diff: f64, s: u32) -> f64 {
    if s == 0 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut a_pow = 1.0;
    for j in 0..s {
        acc += a_pow * b.powi((s - 1 - j) as i32);
        a_pow *= a;
    }
    diff * acc
}

/// All `mask` values over `k` bits with exactly `s` bits set, ascending.
pub fn masks_of_size(k: usize, s: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << k)).filter(move |m| m.count_ones() as usize == s)
}

/// Format with 12 significant digits, '.' decimal point, `%g`-style.
pub fn fmt_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, exponent) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

/// Best rational approximation `p/q` of `x` with `q <= max_den`, accepted only
/// when `|x - p/q| <= tol`.
pub fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 > 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
        Some((h1 as i64, k1 as u64))
    } else {
        None
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(20, 10), 184_756.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn power_difference_matches_direct() {
        let (a, b) = (0.7, 0.4);
        let got = power_difference(a, b, a - b, 4);
        assert!((got - (a.powi(4) - b.powi(4))).abs() < 1e-15);
        assert_eq!(power_difference(a, b, a - b, 0), 0.0);
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.5), "0.5");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(2.0), "2");
        assert_eq!(fmt_sig12(-0.0), "0");
        assert_eq!(fmt_sig12(1234.5), "1234.5");
        assert_eq!(fmt_sig12(1.5e-7), "1.5e-7");
    }

    #[test]
    fn rational_recovery() {
        assert_eq!(rational_approx(1.0 / 6.0, 1000, 1e-12), Some((1, 6)));
        assert_eq!(rational_approx(0.75, 1000, 1e-12), Some((3, 4)));
        assert_eq!(rational_approx(0.0, 10, 1e-12), Some((0, 1)));
        assert_eq!(rational_approx(std::f64::consts::PI, 10, 1e-12), None);
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn mask_enumeration_ascending() {
        let m: Vec<u32> = masks_of_size(3, 2).collect();
        assert_eq!(m, vec![0b011, 0b101, 0b110]);
    }
}
