"""Martingales: exact dyadic enumeration, Euler-simulated pairs and the space-time projection."""
