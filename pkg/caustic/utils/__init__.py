"""Configuration and output helpers"""
from .config import ConfigError, RunConfig, load_config
from .output import format_formulas, render, safe_json_dumps, status_table

__all__ = ['ConfigError', 'RunConfig', 'load_config', 'format_formulas', 'render',
           'safe_json_dumps', 'status_table']
