//! Generator catalogues of the three symmetry classes and their bracket tables.

mod catalog;
mod table;

pub use crate::jet::commutator;
pub use catalog::{solution_field, Combination, GeneratorCatalog};
pub use table::{
    fit_in_basis, render_text, verify_bracket_table, BracketOptions, CellReport, ClosureEntry, JacobiReport, PrintedCell, PrintedTable,
    TableReport,
};
