"""Data ingestion, synthetic data, experiment runner, reporting and CLI."""
