"""
Run the qnetlab command line: python -m qnetlab
"""
import sys

from .cli import main

sys.exit(main())
