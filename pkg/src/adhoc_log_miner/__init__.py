# -*- coding: utf-8 -*-
"""adhoc_log_miner package.

Mines console.log statements removed by commits and analyzes their context.
"""

__version__ = "0.2.0"

from .cli import main

__all__ = ["main"]
