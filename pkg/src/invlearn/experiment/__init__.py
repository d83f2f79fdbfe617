"""Config ingestion, batch runs over seeds, CSV/SVG output and the analysis report."""
from .batch import BatchSummary, analysis_report, analyze_run, load_run, plot_run, run_experiment_batch
from .config import ConfigError, DemandSpec, ExperimentConfig, parse_config, shipped_configs
from .io import OutputError, emit_belief_csv, emit_csv, read_trajectory_csv
from .svg import emit_svg_plot, render_svg
