# Utilities module initialization
from .logger import configure_logging, get_logger
from .config_loader import SearchConfig, Tolerances, RunConfig, load_run_config, default_output_dir

__all__ = [
    'configure_logging',
    'get_logger',
    'SearchConfig',
    'Tolerances',
    'RunConfig',
    'load_run_config',
    'default_output_dir'
]
