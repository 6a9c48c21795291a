"""Configuration settings for featbench"""
import os
from dotenv import load_dotenv

from errors import ConfigError

load_dotenv()

# Server settings
SERVER_NAME = os.getenv("FEATBENCH_SERVER_NAME", "featbench")
SERVER_VERSION = os.getenv("FEATBENCH_VERSION", "1.0.0")
PORT = int(os.getenv("PORT", 8080))

# Optional API key for the HTTP surface
API_KEY = os.getenv("FEATBENCH_API_KEY")

# CORS
ALLOWED_ORIGINS = os.getenv("ALLOWED_ORIGINS", "http://localhost:3000").split(",")

# Benchmark output
OUTPUT_DIR = os.getenv("FEATBENCH_OUTPUT_DIR", "results")

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = os.getenv("LOG_FORMAT", "text")


def threads_override():
    """FEATBENCH_THREADS, read at call time so a running process can be re-tuned."""
    raw = os.getenv("FEATBENCH_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"FEATBENCH_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"FEATBENCH_THREADS must be positive, got {value}")
    return value
