//! Printed accuracy and confusability tables used as fixtures.

/// `(pair, clause count, avg sim)` in printed order.
pub const CONFUSABILITY: [((u32, u32), u64, f64); 15] = [
    ((1, 5), 1152, 0.53),
    ((1, 2), 986, 0.59),
    ((2, 6), 802, 0.48),
    ((3, 6), 534, 0.54),
    ((1, 6), 532, 0.44),
    ((2, 5), 472, 0.40),
    ((2, 3), 214, 0.39),
    ((5, 6), 170, 0.27),
    ((1, 3), 158, 0.38),
    ((4, 6), 69, 0.40),
    ((2, 4), 57, 0.30),
    ((3, 5), 25, 0.16),
    ((3, 4), 16, 0.38),
    ((1, 4), 6, 0.21),
    ((4, 5), 5, 0.06),
];

/// Per-idea accuracy rows `(tag, essays, MI1..MI6)`.
pub const IDEA_ACCURACY: [(&str, usize, [f64; 6]); 5] = [
    ("GT1", 39, [76.92, 82.05, 69.23, 89.74, 71.79, 84.62]),
    ("GT2 O", 60, [63.33, 56.66, 66.66, 91.66, 86.66, 83.33]),
    ("GT2 R", 60, [63.33, 61.66, 76.66, 86.66, 86.66, 70.00]),
    ("GT2", 120, [63.33, 59.16, 71.66, 89.16, 86.66, 76.66]),
    ("All", 159, [66.66, 64.77, 71.06, 89.30, 83.01, 78.61]),
];

/// `(tag, pos, neg, total)` accuracy rows.
pub const ACCURACY: [(&str, f64, f64, f64); 5] = [
    ("GT1", 80.64, 76.56, 79.50),
    ("GT2 O", 73.73, 77.14, 74.72),
    ("GT2 R", 77.00, 55.32, 74.17),
    ("GT 2", 75.53, 70.39, 74.44),
    ("All", 76.78, 70.05, 75.47),
];

/// Mean pairwise similarity quoted for ideas 1, 2, 3, 4 and 6.
pub const QUOTED_IDEA_MEANS: [(u32, f64); 5] =
    [(1, 0.430), (2, 0.432), (3, 0.370), (4, 0.270), (6, 0.426)];
