#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
killing-forms - point d'entrée en ligne de commande.
Les journaux vont sur stderr ; stdout ne porte que les rapports.
"""

import logging
import os
import sys

from modules.settings import settings
from modules.cli import main

# --- Configuration ---
logging.basicConfig(
    level=os.getenv("LOG_LEVEL", settings["log_level"]),
    format='%(asctime)s - [KILLING] - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger("killing-forms")


if __name__ == "__main__":
    code = main()
    logger.debug("Sortie avec le code %d", code)
    sys.exit(code)
