"""
Global Configuration for Application
"""
import os
import logging

# Build defaults
EDINDEX_B = int(os.getenv("EDINDEX_B", "64"))
EDINDEX_ENGINE = os.getenv("EDINDEX_ENGINE", "both")
EDINDEX_SEED = int(os.getenv("EDINDEX_SEED", "0"))
HASH_MAX_RETRIES = int(os.getenv("HASH_MAX_RETRIES", "32"))

# Query fan-out
QUERY_WORKERS = int(os.getenv("QUERY_WORKERS", "1"))

# Randomized oracle suites run by `flask verify`
VERIFY_CASES = int(os.getenv("VERIFY_CASES", "200"))
VERIFY_SIGMAS = os.getenv("VERIFY_SIGMAS", "2,4,26,96")
VERIFY_MMAX = int(os.getenv("VERIFY_MMAX", "12"))
VERIFY_NMAX = int(os.getenv("VERIFY_NMAX", "200"))

LOGGING_LEVEL = logging.getLevelName(os.getenv("LOGGING_LEVEL", "INFO"))
