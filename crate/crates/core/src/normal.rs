//! Standard normal distribution functions.
//!
//! `erf`, `erfc` and the scaled `erfcx(x) = exp(x²)·erfc(x)` follow W. J. Cody's
//! rational Chebyshev approximations (CALERF). The normal CDF is built on
//! `erfc` with the rounding error of the `x/√2` scaling folded back in, and
//! `log_cdf` goes through `erfcx` so it stays finite far into the lower tail.

#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_SQRT_PI};

/// Low-order part of 1/√2 so that `FRAC_1_SQRT_2 + FRAC_1_SQRT_2_LO` is 1/√2 to ~32 digits.
const FRAC_1_SQRT_2_LO: f64 = -4.833_646_656_726_457e-17;
const FRAC_1_SQRT_PI: f64 = 0.5 * FRAC_2_SQRT_PI;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

const THRESH: f64 = 0.46875;
const XSMALL: f64 = 1.11e-16;
const XBIG: f64 = 26.543;
const XHUGE: f64 = 6.71e7;
const XMAX: f64 = 2.53e307;
const XNEG: f64 = -26.628;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const B: [f64; 4] = [
    2.360_129_095_234_412_1e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];
const C: [f64; 9] = [
    5.641_884_969_886_701e-1,
    8.883_149_794_388_376,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_691e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_6e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_6e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];
const P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_7e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_4,
    1.872_952_849_923_467_3,
    5.279_051_029_514_284e-1,
    6.051_834_131_244_132e-2,
    2.335_204_976_268_691_8e-3,
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Erf,
    Erfc,
    Erfcx,
}

/// exp(-y²) evaluated as exp(-ysq²)·exp(-del) with ysq = y truncated to 1/16,
/// which keeps the large exponent exact.
#[inline]
fn exp_neg_sq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

fn calerf(x: f64, kind: Kind) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    let mut result;
    if y <= THRESH {
        let ysq = if y > XSMALL { y * y } else { 0.0 };
        let mut xnum = A[4] * ysq;
        let mut xden = ysq;
        for i in 0..3 {
            xnum = (xnum + A[i]) * ysq;
            xden = (xden + B[i]) * ysq;
        }
        result = x * (xnum + A[3]) / (xden + B[3]);
        if kind != Kind::Erf {
            result = 1.0 - result;
        }
        if kind == Kind::Erfcx {
            result *= ysq.exp();
        }
        return result;
    } else if y <= 4.0 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        result = (xnum + C[7]) / (xden + D[7]);
        if kind != Kind::Erfcx {
            result *= exp_neg_sq(y);
        }
    } else {
        result = 0.0;
        let mut tail = true;
        if y >= XBIG {
            if kind != Kind::Erfcx || y >= XMAX {
                tail = false;
            } else if y >= XHUGE {
                result = FRAC_1_SQRT_PI / y;
                tail = false;
            }
        }
        if tail {
            let ysq = 1.0 / (y * y);
            let mut xnum = P[5] * ysq;
            let mut xden = ysq;
            for i in 0..4 {
                xnum = (xnum + P[i]) * ysq;
                xden = (xden + Q[i]) * ysq;
            }
            result = ysq * (xnum + P[4]) / (xden + Q[4]);
            result = (FRAC_1_SQRT_PI - result) / y;
            if kind != Kind::Erfcx {
                result *= exp_neg_sq(y);
            }
        }
    }

    match kind {
        Kind::Erf => {
            result = (0.5 - result) + 0.5;
            if x < 0.0 {
                -result
            } else {
                result
            }
        }
        Kind::Erfc => {
            if x < 0.0 {
                2.0 - result
            } else {
                result
            }
        }
        Kind::Erfcx => {
            if x < 0.0 {
                if x < XNEG {
                    f64::INFINITY
                } else {
                    let e = 1.0 / exp_neg_sq(x);
                    (e + e) - result
                }
            } else {
                result
            }
        }
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    calerf(x, Kind::Erf)
}

/// Complementary error function `1 - erf(x)`, accurate in the upper tail.
pub fn erfc(x: f64) -> f64 {
    calerf(x, Kind::Erfc)
}

/// Scaled complementary error function `exp(x²)·erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    calerf(x, Kind::Erfcx)
}

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF Φ(x).
pub fn cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    // y = -x/√2 in double-double; first-order correction for the low part.
    let yh = -x * FRAC_1_SQRT_2;
    let yl = (-x).mul_add(FRAC_1_SQRT_2, -yh) + (-x) * FRAC_1_SQRT_2_LO;
    let e = erfc(yh);
    if e == 0.0 || yl == 0.0 {
        return 0.5 * e;
    }
    0.5 * (e - yl * FRAC_2_SQRT_PI * exp_neg_sq(yh))
}

/// log Φ(x), finite for every finite `x`.
pub fn log_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x >= 0.0 {
        (-cdf(-x)).ln_1p()
    } else if x > -5.0 {
        cdf(x).ln()
    } else {
        (0.5 * erfcx(-x * FRAC_1_SQRT_2)).ln() - 0.5 * x * x
    }
}

/// Inverse standard normal CDF Φ⁻¹(p) for `p ∈ [0, 1]`.
///
/// Acklam's rational approximation followed by one Halley step against [`cdf`].
pub fn quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    const QA: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const QB: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const QC: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const QD: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };

    // Refine in whichever tail keeps the residual well conditioned.
    let e = if x <= 0.0 {
        cdf(x) - p
    } else {
        (1.0 - p) - cdf(-x)
    };
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    if u.is_finite() {
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Logistic function `1 / (1 + e^{-u})`.
#[inline]
pub fn expit(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Log-odds `ln(p / (1 - p))`.
#[inline]
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values from 40-digit arbitrary-precision evaluation.
    const ERFC_REF: [(f64, f64); 7] = [
        (0.1, 0.887_537_083_981_715_1),
        (0.5, 0.479_500_122_186_953_46),
        (1.0, 0.157_299_207_050_285_13),
        (2.0, 4.677_734_981_047_265_8e-3),
        (5.0, 1.537_459_794_428_034_9e-12),
        (10.0, 2.088_487_583_762_544_8e-45),
        (26.0, 5.663_192_408_856_142_8e-296),
    ];

    #[test]
    fn erfc_matches_reference() {
        for &(x, want) in &ERFC_REF {
            assert!(
                rel(erfc(x), want) < 2e-15,
                "erfc({x}) = {} vs {want}",
                erfc(x)
            );
        }
    }

    #[test]
    fn erf_is_odd_and_complements_erfc() {
        for i in -40..=40 {
            let x = i as f64 * 0.1;
            assert!((erf(x) + erf(-x)).abs() < 1e-16);
            assert!((erf(x) + erfc(x) - 1.0).abs() < 4e-16);
        }
    }

    #[test]
    fn erfcx_consistent_with_erfc() {
        for i in 0..60 {
            let x = -3.0 + i as f64 * 0.25;
            let want = (x * x).exp() * erfc(x);
            assert!(rel(erfcx(x), want) < 1e-13, "x={x}");
        }
        // Asymptotically 1/(x√π).
        assert!(rel(erfcx(1e8), FRAC_1_SQRT_PI / 1e8) < 1e-15);
    }

    #[test]
    fn cdf_reference_values() {
        let table = [
            (-8.0, 6.220_960_574_271_784e-16),
            (-5.0, 2.866_515_718_791_939e-7),
            (-1.0, 0.158_655_253_931_457_05),
            (0.0, 0.5),
            (0.5, 0.691_462_461_274_013_1),
            (0.979_982, 0.836_452_498_062_293_9),
            (3.0, 0.998_650_101_968_369_9),
        ];
        for (x, want) in table {
            assert!(
                rel(cdf(x), want) < 1e-15,
                "cdf({x}) = {:e}, want {want:e}",
                cdf(x)
            );
        }
    }

    #[test]
    fn log_cdf_deep_tail() {
        let table = [
            (-40.0, -804.608_442_013_753_8),
            (-20.0, -203.917_155_371_097_26),
            (-10.0, -53.231_285_150_512_47),
            (-8.0, -35.013_437_159_914_55),
            (-5.0, -15.064_998_393_988_726),
            (-1.0, -1.841_021_645_009_263_5),
            (0.0, -std::f64::consts::LN_2),
            (3.0, -1.350_809_964_748_193_8e-3),
            (8.0, -6.220_960_574_271_786e-16),
        ];
        for (x, want) in table {
            assert!(
                rel(log_cdf(x), want) < 1e-14,
                "log_cdf({x}) = {} vs {want}",
                log_cdf(x)
            );
        }
        assert!(log_cdf(-1e4).is_finite());
    }

    #[test]
    fn quantile_round_trips() {
        assert!((quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert_eq!(quantile(0.5), 0.0);
        for &p in &[1e-300, 1e-20, 1e-5, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-12] {
            let x = quantile(p);
            let back = if p < 0.5 { cdf(x) } else { 1.0 - cdf(-x) };
            assert!(rel(back, p) < 1e-12, "p={p}, x={x}, back={back}");
        }
        assert!(quantile(1.5).is_nan());
    }

    #[test]
    fn logistic_pair() {
        assert_eq!(expit(0.0), 0.5);
        assert!((logit(0.9) - 2.197_224_577_336_219_4).abs() < 1e-14);
        for &u in &[-30.0, -2.0, 0.3, 5.0, 700.0] {
            let p = expit(u);
            assert!(p > 0.0 && p <= 1.0);
        }
        assert!((logit(expit(1.7)) - 1.7).abs() < 1e-13);
    }
}
