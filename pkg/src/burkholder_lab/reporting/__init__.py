"""Reporting: constants tables, Markdown summaries and report files."""
