"""Exception hierarchy shared across the package."""


class ProbeError(Exception):
    """Base class for all errors raised by this package."""


class WKTSyntaxError(ProbeError):
    """Malformed WKT token stream (bad tokens, odd coordinate count, unclosed ring)."""


class UnsupportedTypeError(ProbeError):
    """WKT type outside {POINT, LINESTRING, POLYGON} (e.g. MULTIPOLYGON, Z/M variants)."""


class EmptyGeometryError(ProbeError):
    """WKT EMPTY geometry, which the pipeline rejects."""


class DegenerateGeometryError(ProbeError):
    """Geometry unusable for a computation (zero length/area, self-intersecting ring)."""


class ConfigError(ProbeError):
    """Invalid builder/split configuration."""


class DataFormatError(ProbeError):
    """Malformed dataset file (WKT-lines, GeoJSON, relation table, cache, ...)."""


class EmptyInputError(ProbeError):
    """An operation received empty input where at least one element is required."""


class DimensionMismatchError(ProbeError):
    """Vector/matrix dimensions do not line up."""


class ProviderError(ProbeError):
    """Embedding provider unreachable or returned an invalid reply."""


class NonFiniteLossError(ProbeError):
    """Training loss became NaN/Inf; aborted with diagnostics."""


class EmptyPoolError(ProbeError):
    """Retrieval attempted against an empty candidate pool."""
