//! Angle and series helpers for the geodesic solver.

/// Number of binary digits in an f64 mantissa; bounds the bisection fallback
/// iteration count in the inverse solver.
pub const DIGITS: u32 = 53;

#[inline]
pub fn sq(x: f64) -> f64 {
    x * x
}

/// Horner evaluation of a degree-`n` polynomial with coefficients `p[0..=n]`
/// (highest order first).
pub fn polyval(n: usize, p: &[f64], x: f64) -> f64 {
    let mut y = p[0];
    for c in &p[1..=n] {
        y = y * x + c;
    }
    y
}

/// Normalizes a sin/cos pair to unit norm.
pub fn norm(sin: &mut f64, cos: &mut f64) {
    let r = sin.hypot(*cos);
    *sin /= r;
    *cos /= r;
}

/// Rounds tiny angles (degrees) so that values that should be exact come out
/// exact; directly mirrors the usual geodesic-library trick of forcing
/// underflow near multiples of the representable grid.
pub fn ang_round(x: f64) -> f64 {
    const D: f64 = 1.0 / 16.0;
    if x == 0.0 {
        return 0.0;
    }
    let y = x.abs();
    let y = if y < D { D - (D - y) } else { y };
    if x < 0.0 {
        -y
    } else {
        y
    }
}

/// Reduces an angle in degrees to (-180, 180].
pub fn ang_normalize(x: f64) -> f64 {
    let y = x % 360.0;
    if y <= -180.0 {
        y + 360.0
    } else if y <= 180.0 {
        y
    } else {
        y - 360.0
    }
}

/// Replaces out-of-range latitudes with NaN.
pub fn lat_fix(x: f64) -> f64 {
    if x.abs() > 90.0 {
        f64::NAN
    } else {
        x
    }
}

/// Error-free sum: returns (round(u + v), residual).
fn two_sum(u: f64, v: f64) -> (f64, f64) {
    let s = u + v;
    let up = s - v;
    let vpp = s - up;
    let up = up - u;
    let vpp = vpp - v;
    (s, -(up + vpp))
}

/// Exact angular difference `y - x` in degrees: returns the reduced
/// difference and a correction term such that `d + t` equals the true
/// difference.
pub fn ang_diff(x: f64, y: f64) -> (f64, f64) {
    let (d, t) = two_sum(ang_normalize(-x), ang_normalize(y));
    let d = ang_normalize(d);
    if d == 180.0 && t > 0.0 {
        two_sum(-180.0, t)
    } else {
        two_sum(d, t)
    }
}

/// Sine and cosine of an angle in degrees, exact at multiples of 90.
pub fn sincosd(x: f64) -> (f64, f64) {
    let r = x % 360.0;
    let q = (r / 90.0).round();
    let r = (r - 90.0 * q).to_radians();
    let (s, c) = r.sin_cos();
    let q = (q as i64).rem_euclid(4);
    let (mut sinx, mut cosx) = match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    if sinx == 0.0 {
        sinx = sinx.copysign(x);
    }
    cosx += 0.0;
    (sinx, cosx)
}

/// Solves the astroid equation `k^4 + 2 k^3 - (x^2 + y^2 - 1) k^2
/// - 2 y^2 k - y^2 = 0` for its positive root; used for the starting guess
/// near the antipodal point.
pub fn astroid(x: f64, y: f64) -> f64 {
    let p = sq(x);
    let q = sq(y);
    let r = (p + q - 1.0) / 6.0;
    if q == 0.0 && r <= 0.0 {
        return 0.0;
    }
    let s = p * q / 4.0;
    let r2 = sq(r);
    let r3 = r * r2;
    let disc = s * (s + 2.0 * r3);
    let mut u = r;
    if disc >= 0.0 {
        let mut t3 = s + r3;
        t3 += if t3 < 0.0 { -disc.sqrt() } else { disc.sqrt() };
        let t = t3.cbrt();
        u += t + if t != 0.0 { r2 / t } else { 0.0 };
    } else {
        let ang = (-disc).sqrt().atan2(-(s + r3));
        u += 2.0 * r * (ang / 3.0).cos();
    }
    let v = (sq(u) + q).sqrt();
    let uv = if u < 0.0 { q / (v - u) } else { u + v };
    let w = (uv - q) / (2.0 * v);
    uv / ((uv + sq(w)).sqrt() + w)
}

/// Clenshaw summation of the trigonometric series
/// `sum(c[i] * sin(2i * sigma))` (for `sinp`) or the cosine analogue.
/// For the sine case `c[0]` is unused, matching the coefficient layout.
pub fn sin_cos_series(sinp: bool, sinx: f64, cosx: f64, c: &[f64]) -> f64 {
    let mut k = c.len();
    let mut n = k as i64 - i64::from(sinp);
    let ar = 2.0 * (cosx - sinx) * (cosx + sinx);
    let mut y1 = 0.0;
    let mut y0 = if n & 1 != 0 {
        k -= 1;
        c[k]
    } else {
        0.0
    };
    n /= 2;
    while n > 0 {
        n -= 1;
        k -= 1;
        y1 = ar * y0 - y1 + c[k];
        k -= 1;
        y0 = ar * y1 - y0 + c[k];
    }
    if sinp {
        2.0 * sinx * cosx * y0
    } else {
        cosx * (y0 - y1)
    }
}
