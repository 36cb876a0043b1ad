"""Decompose isometries, channels, POVMs and instruments into CNOT circuits."""
