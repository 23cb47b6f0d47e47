//! Φ₂(b₁, b₂; c; x, y) reference values from `oracles/reference_values.py`,
//! brute-force double sums at 50 digits.

/// (b1, b2, c, x, y, Φ₂) from an extended-precision brute-force double sum.
pub const PHI2_GRID: [(f64, f64, f64, f64, f64, f64); 20] = [
    (1.0, 0.5, 2.5, 0.7, 0.2, 1.397_466_720_109_441_163_7),
    (1.0, 0.3, 1.3, 2.0, 1.5, 6.644_192_778_525_485_956_6),
    (1.0, 2.7, 2.5, 5.0, 4.0, 239.802_996_281_806_143_46),
    (1.0, 1.0, 1.5, 10.0, 0.1, 6235.200_875_723_156_467_4),
    (1.0, 0.5, 4.0, 15.0, 9.0, 9168.244_926_648_799_508),
    (1.0, 3.0, 0.6, 1.0, 0.9, 26.498_024_133_105_275_307),
    (1.0, 0.2, 1.2, 25.0, 20.0, 47_900_055_104.173_774_348),
    (1.0, 1.5, 3.5, 35.0, 20.0, 2_592_251_404_655.893_063_4),
    (1.0, 0.7, 2.2, 45.0, 44.0, 4.349_108_879_418_833_237_8e18),
    (1.0, 4.0, 1.1, 60.0, 5.0, 1.021_759_552_558_112_463_4e26),
    (0.5, 0.5, 1.5, 3.0, 3.0, 10.130_011_201_000_487_601),
    (2.0, 1.0, 2.5, 4.0, 1.0, 38.715_022_668_693_674_38),
    (0.7, 1.7, 0.9, 6.0, 2.0, 492.033_939_642_501_869_98),
    (3.0, 0.4, 5.0, 8.0, 7.0, 488.277_453_882_243_136_58),
    (1.5, 2.5, 3.0, 0.05, 12.0, 66_777.352_479_084_190_594),
    (0.3, 0.3, 0.3, 1.0, 1.0, 4.853_664_306_694_760_035_4),
    (2.2, 0.8, 1.6, 12.0, 0.0, 621_243.537_235_711_278_35),
    (1.0, 5.0, 6.0, 0.0, 7.0, 480.548_772_048_884_249_63),
    (1.2, 1.2, 2.4, 9.0, 9.0, 8103.083_927_575_384_007_7),
    (0.9, 2.0, 1.4, 18.0, 3.0, 18_604_203.744_643_028_974),
];
