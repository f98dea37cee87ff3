//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Classical reduction of `x + iy` into the standard fundamental domain,
/// with `x = -1/2` on the vertical edges and `x <= 0` on the unit circle.
pub fn gauss_reduce_g1(mut x: f64, mut y: f64) -> (f64, f64) {
    for _ in 0..10_000 {
        x -= x.round();
        let r = x * x + y * y;
        if r < 1.0 - 1e-13 {
            x = -x / r;
            y /= r;
        } else {
            break;
        }
    }
    if x > 0.5 - 1e-12 {
        x -= 1.0;
    }
    let r = x * x + y * y;
    if (r - 1.0).abs() < 1e-12 && x > 0.0 {
        x = -x;
    }
    (x, y)
}

/// Every `[a, b, c, d]` with `ad - bc = 1` and entries in `[-t, t]`.
pub fn brute_force_g1(t: i64) -> BTreeSet<[i64; 4]> {
    let mut out = BTreeSet::new();
    for a in -t..=t {
        for b in -t..=t {
            for c in -t..=t {
                for d in -t..=t {
                    if a * d - b * c == 1 {
                        out.insert([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn is_symplectic4(m: &[i64; 16]) -> bool {
    // M J M^t = J for J = [[0, I], [-I, 0]], 2x2 blocks
    let j = |r: usize, c: usize| -> i64 {
        match (r, c) {
            (0, 2) | (1, 3) => 1,
            (2, 0) | (3, 1) => -1,
            _ => 0,
        }
    };
    for r in 0..4 {
        for c in r + 1..4 {
            let mut s = 0;
            for k in 0..4 {
                for l in 0..4 {
                    s += m[4 * r + k] * j(k, l) * m[4 * c + l];
                }
            }
            if s != j(r, c) {
                return false;
            }
        }
    }
    true
}

/// All integral symplectic `4 x 4` matrices with entries in `{-1, 0, 1}`.
pub fn brute_force_g2_t1() -> BTreeSet<[i64; 16]> {
    let mut out = BTreeSet::new();
    let mut m = [0i64; 16];
    for code in 0..3u64.pow(16) {
        let mut c = code;
        for e in m.iter_mut() {
            *e = (c % 3) as i64 - 1;
            c /= 3;
        }
        if is_symplectic4(&m) {
            out.insert(m);
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced primitive positive forms of discriminant `d`, by direct search
/// over `(a, b)` with `c` solved from the discriminant.
pub fn exhaustive_class_number(d: i64) -> usize {
    let n = -d;
    let mut count = 0;
    let mut a = 1;
    while a * a <= n {
        for b in -a..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            if c < a || gcd(gcd(a, b), c) != 1 {
                continue;
            }
            if (b == -a) || (a == c && b < 0) {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    count
}

/// Kronecker symbol `(a / n)` for `n > 0`.
pub fn kronecker(a: i64, mut n: i64) -> i64 {
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            1 | 7 => {}
            _ => result = -result,
        }
    }
    // Jacobi symbol for odd n
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn squarefree(mut n: i64) -> bool {
    n = n.abs();
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn is_fundamental(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => matches!((d / 4).rem_euclid(4), 2 | 3) && squarefree(d / 4),
        _ => false,
    }
}

fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Class number from the analytic class number formula for the fundamental
/// part and the conductor formula for orders.
pub fn analytic_class_number(d: i64) -> i64 {
    let mut f = 1;
    let mut k = 1;
    while k * k <= -d {
        if d % (k * k) == 0 && is_fundamental(d / (k * k)) {
            f = k;
        }
        k += 1;
    }
    let d0 = d / (f * f);
    let w = match d0 {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let m = -d0;
    let s: i64 = (1..m).map(|n| kronecker(d0, n) * n).sum();
    let h0 = -w * s / (2 * m);
    assert_eq!(-w * s % (2 * m), 0, "analytic sum not divisible for {d0}");
    if f == 1 {
        return h0;
    }
    let primes = prime_factors(f);
    let mut num = h0 * f;
    let mut den = 1;
    for p in primes {
        num *= p - kronecker(d0, p);
        den *= p;
    }
    let index = w / 2;
    assert_eq!(num % (den * index), 0, "conductor formula not integral for {d}");
    num / (den * index)
}
