//! k-induction model checking for a small synchronous RTL subset, with
//! helper-lemma generation from templates or a language model.

pub mod cex;
pub mod engine;
pub mod frontend;
pub mod ir;
pub mod sat;
pub mod stub_llm;
pub mod suggest;
