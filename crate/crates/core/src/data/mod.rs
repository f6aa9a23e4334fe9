//! Ingestion, cleaning, feature derivation, rule labeling, scaling, splitting
//! and correlation analysis for raw consumption logs.

mod clean;
mod correlation;
mod dataset;
mod features;
mod label;
mod load;
mod plot;
mod record;
mod scale;
mod split;

pub use clean::{clean, validate, DropReason, DropTally};
pub use correlation::{correlation_matrix, Correlation};
pub use dataset::{ProcessedDataset, RowOrigin, Split};
pub use features::derive_features;
pub use label::{label, LabelRule, LabelRuleSet};
pub use load::{load_csv, load_csv_from_reader, write_rejections, LoadReport, Rejection, Schema, DATE_FORMAT};
pub use plot::{export_plot_data, PlotKind, DAILY_HOURS_REFERENCE};
pub use record::{feature_vector, DerivedFeatures, Field, FuelRecord, Label, RawRecord, FEATURE_NAMES, RUNNING_TIME_PER_DAY};
pub use scale::{scale_fit_transform, Scaler};
pub use split::stratified_split;
