"""
Subcommand handlers for jetcurv
"""
