mod support;

#[test]
fn printed_expressions_parse_back() {
    support::parse_print_roundtrip(support::props::CASES).unwrap();
}
