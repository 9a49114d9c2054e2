pub mod checks;
pub mod ref_reader;
pub mod terms;
