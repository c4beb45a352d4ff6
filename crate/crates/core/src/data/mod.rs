//! Dataset model, the SPDB container, series CSV ingestion and synthetic
//! generators.

pub mod dataset;
pub mod format;
pub mod generate;
pub mod series_csv;

pub use dataset::{LabeledDataset, Task};
pub use format::{labels_path, read_matrices, sidecar_path, write_matrices, MatrixFileHeader};
pub use generate::{gen_labeled_dataset, gen_random_spd, gen_synthetic_series, DatasetStructure};
pub use series_csv::{read_series_csv, write_series_csv, SeriesLayout};
