"""Prompt-based LLM time-series forecasting harness."""

__version__ = "0.1.0"
