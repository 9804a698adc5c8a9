//! Prints the elaborated form of a design: `cargo run --example dump_fixture -- file.sv`.
fn main() {
    let path = std::env::args().nth(1).expect("usage: dump_fixture <design.sv>");
    let src = std::fs::read_to_string(&path).expect("readable design");
    let ast = lemmaforge::frontend::parse_module_source(&src).unwrap_or_else(|e| panic!("{path}: {e}"));
    let ts = lemmaforge::ir::elaborate(&ast, &[]).unwrap_or_else(|e| panic!("{path}: {e}"));
    print!("{}", ts.dump());
}
