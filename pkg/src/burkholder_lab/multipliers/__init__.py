"""Fourier multipliers on periodic grids: lattices, symbols, Lévy ratios, field files, probes."""
