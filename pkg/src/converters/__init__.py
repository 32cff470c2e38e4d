"""Run records, residual histories and field snapshots."""
