"""Cesàro-Hardy operators, fractional calculus and their reproducing kernels."""
