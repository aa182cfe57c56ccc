"""cli package - command handlers, runtime settings and tracing setup for main.py."""
