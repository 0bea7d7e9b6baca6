#!/usr/bin/env python3
"""
Star-network toolkit - Main Entry Point

Runs the starnet command-line interface from a source checkout,
e.g. `python app.py verify --n 2 --m 3`.
"""

import sys
import os

# Add the package root to path for development
sys.path.insert(0, os.path.dirname(__file__))

from starnet.__main__ import main

if __name__ == "__main__":
    main()
