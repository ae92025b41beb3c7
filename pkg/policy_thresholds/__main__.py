"""Allows `python -m policy_thresholds`"""

from .cli import main

main()
