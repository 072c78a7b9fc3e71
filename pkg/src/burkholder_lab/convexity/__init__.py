"""Convexity lab: biconcavity of U, rank-one convexity and quasiconvexity probes of Psi_U."""
