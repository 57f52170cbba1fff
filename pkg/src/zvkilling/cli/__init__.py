from .cache import CACHE_ENV, CacheCorruptionError, MatrixCache
from .geodesic import NON_RIGOROUS, GeodesicResult, GeodesicSingularityError, geodesic_sanity
from .main import (EXIT_CANDIDATE, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, ConfigError, RunConfig, main,
                   parse_point, parse_primes, run)
from .report import emit_report, strip_timing

__all__ = ["CACHE_ENV", "CacheCorruptionError", "MatrixCache", "NON_RIGOROUS", "GeodesicResult",
           "GeodesicSingularityError", "geodesic_sanity", "EXIT_CANDIDATE", "EXIT_ERROR", "EXIT_INCONCLUSIVE",
           "EXIT_OK", "ConfigError", "RunConfig", "main", "parse_point", "parse_primes", "run", "emit_report",
           "strip_timing"]
