//! Quadrature + bisection reference for the inverse geodesic: exact auxiliary-sphere
//! relations with the arc-length and longitude integrals evaluated by
//! numerical quadrature and the azimuth found by bracketed bisection. No
//! series expansions are shared with the production solver.

const A: f64 = 6_378_137.0;
const F: f64 = 1.0 / 298.257_223_563;
const B: f64 = A * (1.0 - F);
const E2: f64 = F * (2.0 - F);
const EP2: f64 = E2 / ((1.0 - F) * (1.0 - F));

/// 20-point Gauss-Legendre nodes and weights on [-1, 1].
const GL: [(f64, f64); 20] = [
    (-0.9931285991850949, 0.0176140071391521),
    (-0.9639719272779138, 0.0406014298003869),
    (-0.9122344282513259, 0.0626720483341091),
    (-0.8391169718222188, 0.0832767415767048),
    (-0.7463319064601508, 0.1019301198172404),
    (-0.6360536807265150, 0.1181945319615184),
    (-0.5108670019508271, 0.1316886384491766),
    (-0.3737060887154195, 0.1420961093183820),
    (-0.2277858511416451, 0.1491729864726037),
    (-0.0765265211334973, 0.1527533871307258),
    (0.0765265211334973, 0.1527533871307258),
    (0.2277858511416451, 0.1491729864726037),
    (0.3737060887154195, 0.1420961093183820),
    (0.5108670019508271, 0.1316886384491766),
    (0.6360536807265150, 0.1181945319615184),
    (0.7463319064601508, 0.1019301198172404),
    (0.8391169718222188, 0.0832767415767048),
    (0.9122344282513259, 0.0626720483341091),
    (0.9639719272779138, 0.0406014298003869),
    (0.9931285991850949, 0.0176140071391521),
];

fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return 0.0;
    }
    let panels = ((hi - lo).abs() / (std::f64::consts::PI / 8.0)) as usize + 1;
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let center = lo + (i as f64 + 0.5) * h;
        for (x, w) in GL {
            total += w * f(center + h / 2.0 * x);
        }
    }
    total * h / 2.0
}

fn i1(k2: f64, lo: f64, hi: f64) -> f64 {
    integrate(|s| (1.0 + k2 * s.sin() * s.sin()).sqrt(), lo, hi)
}

fn i3(k2: f64, hi: f64) -> f64 {
    integrate(
        |s| (2.0 - F) / (1.0 + (1.0 - F) * (1.0 + k2 * s.sin() * s.sin()).sqrt()),
        0.0,
        hi,
    )
}

fn meridian_arc(phi1: f64, phi2: f64) -> f64 {
    integrate(
        |phi| {
            let s2 = phi.sin() * phi.sin();
            A * (1.0 - E2) / (1.0 - E2 * s2).powf(1.5)
        },
        phi1,
        phi2,
    )
}

fn reduced_lat(phi: f64) -> f64 {
    ((1.0 - F) * phi.tan()).atan()
}

/// Inverse geodesic distance in meters by quadrature + bisection.
pub fn oracle_distance(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let mut phi1 = lat1.to_radians();
    let mut phi2 = lat2.to_radians();
    let dlon = (lon2 - lon1).to_radians();
    let lam12 = dlon.sin().atan2(dlon.cos()).abs();

    // canonical arrangement: |beta1| >= |beta2|, beta1 <= 0
    if phi1.abs() < phi2.abs() {
        std::mem::swap(&mut phi1, &mut phi2);
    }
    if phi1 > 0.0 {
        phi1 = -phi1;
        phi2 = -phi2;
    }
    let beta1 = reduced_lat(phi1);
    let beta2 = reduced_lat(phi2);

    if lam12 == 0.0 && phi1 == phi2 {
        return 0.0;
    }
    if lam12 == 0.0 {
        return meridian_arc(phi1, phi2).abs();
    }
    if lam12 == std::f64::consts::PI && beta1 == 0.0 && beta2 == 0.0 {
        // antipodal equatorial points: over the pole
        return 2.0 * meridian_arc(0.0, std::f64::consts::FRAC_PI_2);
    }
    if beta1 == 0.0 && beta2 == 0.0 {
        if lam12 <= (1.0 - F) * std::f64::consts::PI {
            return A * lam12;
        }
        // shortest path leaves the equator; bisect on sin(alpha0)
        let lam_for = |sa0: f64| {
            let k2 = EP2 * (1.0 - sa0 * sa0);
            std::f64::consts::PI - F * sa0 * i3(k2, std::f64::consts::PI)
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if lam_for(mid) > lam12 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sa0 = (lo + hi) / 2.0;
        let k2 = EP2 * (1.0 - sa0 * sa0);
        return B * i1(k2, 0.0, std::f64::consts::PI);
    }

    let (sb1, cb1) = beta1.sin_cos();
    let (sb2, cb2) = beta2.sin_cos();

    // lambda12 as a monotone function of the departure azimuth alpha1
    let eval = |alpha1: f64| -> (f64, f64, f64, f64) {
        let (sa1, ca1) = alpha1.sin_cos();
        let sa0 = sa1 * cb1;
        let sig1 = sb1.atan2(ca1 * cb1);
        let omg1 = (sa0 * sig1.sin()).atan2(sig1.cos());
        let ca2cb2 = ((ca1 * cb1) * (ca1 * cb1) + (cb2 * cb2 - cb1 * cb1))
            .max(0.0)
            .sqrt();
        let sig2 = sb2.atan2(ca2cb2);
        let omg2 = (sa0 * sig2.sin()).atan2(sig2.cos());
        let k2 = EP2 * (1.0 - sa0 * sa0);
        let lam1 = omg1 - F * sa0 * i3(k2, sig1);
        let lam2 = omg2 - F * sa0 * i3(k2, sig2);
        (lam2 - lam1, sig1, sig2, k2)
    };

    let (mut lo, mut hi) = (1e-15, std::f64::consts::PI - 1e-15);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        let (lam, _, _, _) = eval(mid);
        if lam < lam12 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (_, sig1, sig2, k2) = eval((lo + hi) / 2.0);
    B * i1(k2, sig1, sig2)
}

