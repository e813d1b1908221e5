"""Collects the acceptance PASS/FAIL lines for the terminal summary."""
LINES = []
