//! Benchmark fixtures: the standard finite-type exchange matrices.

use seedcheck_core::IntMatrix;

pub fn named_instance(name: &str) -> IntMatrix {
    let rows: &[&[i64]] = match name {
        "A2" => &[&[0, 1], &[-1, 0]],
        "B2" => &[&[0, 1], &[-2, 0]],
        "G2" => &[&[0, 1], &[-3, 0]],
        "A3" => &[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]],
        "affine" => &[&[0, 2], &[-2, 0]],
        other => panic!("unknown instance {other}"),
    };
    IntMatrix::from_rows(rows).unwrap()
}
