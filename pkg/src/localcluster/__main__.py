"""Allow `python -m localcluster`."""

from .cli import run

run()
