import os

from .errors import ResourceError

ENV_VAR = "CANTORLAB_DEPTH_GUARD"


def depth_guard(default: int) -> int:
    """Depth limit for an enumeration; ``CANTORLAB_DEPTH_GUARD`` overrides ``default``."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ResourceError(f"{ENV_VAR} must be an integer, got {raw!r}") from None


def check_depth(n: int, default: int, what: str) -> None:
    if n < 0:
        raise ValueError(f"{what}: depth must be nonnegative, got {n}")
    limit = depth_guard(default)
    if n > limit:
        raise ResourceError(f"{what}: depth {n} exceeds guard {limit} (set {ENV_VAR} to raise it)")
