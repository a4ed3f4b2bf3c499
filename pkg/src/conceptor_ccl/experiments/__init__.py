"""Experiment runners, configuration and output writers."""
from .config import ExperimentConfig, load_config
from .degradation import run_degradation
from .distortion import run_distortion
from .interpolation import run_interpolation
from .record import RunRecord, write_record
from .tables import Table, emit_csv, emit_plot_script

RUNNERS = {"interpolate": run_interpolation, "degrade": run_degradation, "distort": run_distortion}

__all__ = ["ExperimentConfig", "load_config", "run_interpolation", "run_degradation", "run_distortion",
           "RunRecord", "write_record", "Table", "emit_csv", "emit_plot_script", "RUNNERS"]
