mod common;

use common::*;
use hwenc::resources::count_sparse;

#[test]
fn dense_n6_k2_sequence_marks_and_gates() {
    check_dense_golden().unwrap();
}

#[test]
fn sparse_seven_address_circuit() {
    check_sparse_golden().unwrap();
}

#[test]
fn sparse_seven_address_budget_is_174() {
    let budget = count_sparse(&sparse_golden_report());
    let subtotals: Vec<i128> = budget.rows.iter().map(|r| r.subtotal()).collect();
    assert_eq!(budget.total_analytic, 174, "{subtotals:?}");
}

#[test]
fn binary_n6_skeleton() {
    check_binary_golden().unwrap();
}

#[test]
fn sparse_skeleton_ignores_values() {
    // same addresses, other values: the gate skeleton must not change
    let a = sparse_golden_report();
    let y = sparse_golden_tuple(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    let b = hwenc::encode_sparse(6, &y, Default::default()).unwrap();
    let shape = |r: &hwenc::EncoderReport| r.circuit.gates().iter().map(|g| (g.kind.name(), g.ins, g.outs, g.ctrls)).collect::<Vec<_>>();
    assert_eq!(shape(&a), shape(&b));
}
