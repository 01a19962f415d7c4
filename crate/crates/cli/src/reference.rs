//! Published reference values the reproduction tables are compared with.

/// Minimum proxy points for an absolute Frobenius error below `1e-6` on the
/// far-field block of the first leaf of the `cos(πz/4)` matrix.
pub const T1_MIN_P: [(usize, usize); 9] = [
    (16, 21),
    (24, 27),
    (32, 34),
    (40, 39),
    (48, 47),
    (56, 53),
    (64, 59),
    (72, 65),
    (80, 72),
];
pub const T1_TOL: f64 = 1e-6;
pub const T1_SLACK: usize = 3;

/// `(n, L, p)`: minimum proxy points for a `1e-10` relative error on the
/// topmost block of the `cos(πz/n)` matrix.
pub const T2_MIN_P: [(usize, usize, usize); 10] = [
    (2048, 1, 26),
    (4096, 1, 27),
    (4096, 2, 27),
    (8192, 1, 28),
    (8192, 2, 28),
    (8192, 3, 28),
    (16384, 1, 28),
    (16384, 2, 28),
    (16384, 3, 28),
    (16384, 4, 28),
];
pub const T2_TOL: f64 = 1e-10;
pub const T2_SLACK: usize = 2;

/// `(n, L, p, relative error)` for `(z - n/2)²` with rank cap 28.
pub const T3_ERRORS: [(usize, usize, usize, f64); 12] = [
    (2048, 2, 32, 5.4863e-13),
    (2048, 4, 32, 2.9697e-13),
    (8192, 4, 32, 7.7119e-13),
    (8192, 6, 32, 3.3541e-13),
    (16384, 6, 32, 6.9370e-13),
    (16384, 7, 32, 3.4362e-13),
    (2048, 2, 48, 2.0441e-13),
    (2048, 4, 48, 9.3656e-13),
    (8192, 4, 48, 3.2532e-13),
    (8192, 6, 48, 1.0675e-13),
    (16384, 6, 48, 2.9239e-13),
    (16384, 7, 48, 1.0933e-13),
];

/// `(n, L, p, relative error)` for the skew Cauchy matrix `n/(j - i)` with
/// rank cap 28.
pub const T4_ERRORS: [(usize, usize, usize, f64); 12] = [
    (2048, 2, 32, 7.1041e-14),
    (2048, 4, 32, 5.9208e-14),
    (8192, 4, 32, 8.1024e-14),
    (8192, 6, 32, 6.1210e-14),
    (16384, 6, 32, 9.4705e-14),
    (16384, 7, 32, 6.1585e-14),
    (2048, 2, 48, 1.7926e-14),
    (2048, 4, 48, 1.1841e-14),
    (8192, 4, 48, 2.1102e-14),
    (8192, 6, 48, 1.2407e-14),
    (16384, 6, 48, 2.5062e-14),
    (16384, 7, 48, 1.2521e-14),
];

/// Numerical rank at `1e-14` of the topmost off-diagonal block of the
/// Cauchy matrix.
pub const T4_RANKS: [(usize, usize); 3] = [(2048, 26), (8192, 30), (16384, 33)];
pub const T4_RANK_TOL: f64 = 1e-14;
pub const T4_RANK_SLACK: usize = 2;

/// Measured errors pass when within this factor of the published ones.
pub const ERROR_FACTOR: f64 = 100.0;
pub const HSS_RANK_CAP: usize = 28;
