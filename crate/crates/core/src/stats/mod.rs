//! Score records, per-image group averages, six-number summaries and the
//! table/figure emitters.

mod groups;
mod records;
mod report;
mod summary;

pub use groups::{
    builtin_group_specs, group_average, GroupAverage, GroupSpec, ScoreIndex, TableFamily, TableSpec, ANGLES,
    ORIGINAL_LABEL, STRENGTHS,
};
pub use records::{
    format_score, read_scores, read_scores_file, write_scores, write_scores_file, Metric, ScoreRecord, SCORES_HEADER,
};
pub use report::{
    emit_boxplot_svg, emit_table_csv, full_precision_path, read_table_csv, render_boxplot_svg, PlotScale, STAT_COLUMN,
};
pub use summary::{quantile_sorted, summarize, SummaryStats};
