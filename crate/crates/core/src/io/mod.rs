//! Text formats and run configuration.

pub mod config;
pub mod format;
pub mod report;
pub mod ridge;
pub mod spectrum_csv;
pub mod svg;

pub use config::{parse_config, to_canonical_text, ConfigError, GridSpec, RunConfig};
pub use format::{format_sig, g9};
pub use report::{analysis_report, fit_report, residuals_csv};
pub use ridge::{read_ridge_csv, RidgeError};
pub use spectrum_csv::{
    read_spectrum_csv, rows_to_csv, write_spectrum_csv, SpectrumCsvError, SpectrumRow,
    SPECTRUM_HEADER,
};
pub use svg::{emit_spectrum_svg, SvgError, SvgStyle};
