"""
Main entry point for the star-network toolkit.

Runs the command-line interface; `python -m starnet serve` starts the MCP
server over HTTP.
"""

import logging
import sys
from typing import List, Optional

from .views.cli import main as cli_main

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None):
    """Main entry point; exits with the command's status code."""
    try:
        code = cli_main(argv)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        code = 0
    except Exception as e:
        logger.error(f"Unexpected failure: {e}")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
