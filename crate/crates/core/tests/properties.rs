mod props;

#[test]
fn normalize_is_idempotent() {
    props::normalize_idempotent(props::CASES).unwrap();
}

#[test]
fn ring_laws_hold() {
    props::ring_laws(props::CASES).unwrap();
}

#[test]
fn total_derivative_obeys_leibniz() {
    props::leibniz(props::CASES).unwrap();
}

#[test]
fn total_derivatives_commute_on_shell() {
    props::commutation(props::CASES).unwrap();
}

#[test]
fn d_squared_vanishes() {
    props::d_squared(props::CASES).unwrap();
}

#[test]
fn wedge_is_antisymmetric() {
    props::wedge_antisymmetry(props::CASES).unwrap();
}

#[test]
fn evaluation_is_a_homomorphism() {
    props::eval_homomorphism(props::CASES).unwrap();
}
