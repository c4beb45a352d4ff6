pub mod bench;
pub mod diagnose;
pub mod gen;
pub mod mix;
pub mod probe;
pub mod regress;

use std::path::Path;

use spd_augment::data::read_matrices;
use spd_augment::LabeledDataset;

use crate::exit::{CliError, CliResult};

pub fn load(path: &Path) -> CliResult<LabeledDataset> {
    read_matrices(path).map_err(|e| {
        let status = CliError::from(e);
        CliError::new(status.status, format!("{}: {}", path.display(), status.message))
    })
}
