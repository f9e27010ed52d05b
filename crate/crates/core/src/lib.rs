pub mod autgroup;
pub mod basis_change;
pub mod field;
pub mod groebner;
pub mod mpoly;
pub mod normal_forms;
pub mod parse;
pub mod upoly;
