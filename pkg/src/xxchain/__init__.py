"""Measurement-assisted end-to-end entanglement in dissipative XX spin chains."""
