"""
Settings resolution for rysbench.

Bounds, sampling parameters and worker counts are resolved through a
cascading set of sources, highest priority first:

1. Explicit overrides supplied by the caller (the command line).
2. Environment variables (``RYS_MAX_UNIVERSE``, ``RYS_JOBS``).
3. A ``.rysbench.toml`` project config file in the working directory, or a
   ``[tool.rysbench]`` table in ``pyproject.toml``.
4. The built-in defaults of :class:`Settings`.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from rysbench.errors import ConfigurationError

logger = logging.getLogger(__name__)

MEREOLOGY_MODES = ('literal', 'nonempty-witness')

_ENV_VARS = {
    'RYS_MAX_UNIVERSE': 'max_universe',
    'RYS_JOBS': 'jobs',
}


@dataclass(frozen=True)
class Settings:
    max_universe: int = 24          # hard size guard for any universe
    exhaustive_bound: int = 16      # largest |S| scanned over all 2^|S| subsets
    matrix_bound: int = 10          # largest |S| for N x N mereology matrices
    samples: int = 2000
    seed: int = 0
    max_depth: int = 2
    max_width: int | None = None    # None: number of granules
    max_n: int = 5
    budget: int = 5_000_000         # assignments per quasi-identity
    iso_budget: int = 200_000       # isomorphism search nodes
    jobs: int = 1
    timing: bool = False
    mereology: str = 'literal'

    def __post_init__(self):
        for name in ('max_universe', 'exhaustive_bound', 'matrix_bound', 'samples',
                     'max_depth', 'max_n', 'budget', 'iso_budget', 'jobs'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigurationError(f'setting {name!r} must be a positive integer, got {value!r}')
        if self.max_width is not None and (not isinstance(self.max_width, int) or self.max_width < 1):
            raise ConfigurationError(f'setting max_width must be a positive integer, got {self.max_width!r}')
        if self.mereology not in MEREOLOGY_MODES:
            raise ConfigurationError(
                f'setting mereology must be one of {", ".join(MEREOLOGY_MODES)}, got {self.mereology!r}')

    def updated(self, **changes: Any) -> Settings:
        """Return a copy with every non-None entry of *changes* applied."""
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ConfigurationError(f'unknown setting(s): {", ".join(sorted(unknown))}')
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


# ---------------------------------------------------------------------------
# Project config file
# ---------------------------------------------------------------------------

def _load_toml(path: Path) -> dict | None:
    try:
        import tomllib  # Python 3.11+
    except ImportError:
        try:
            import tomli as tomllib  # fallback
        except ImportError:
            logger.debug('no TOML reader available; skipping %s', path)
            return None
    try:
        return tomllib.loads(path.read_text(encoding='utf-8'))
    except Exception:
        logger.debug('could not read %s', path, exc_info=True)
        return None


def _read_project_config(workspace_root: str | Path | None) -> dict[str, Any]:
    """Return the settings table from ``.rysbench.toml`` or ``pyproject.toml``."""
    if workspace_root is None:
        return {}
    root = Path(workspace_root)
    own = root / '.rysbench.toml'
    if own.is_file():
        data = _load_toml(own)
        if data is not None:
            return dict(data.get('rysbench', data))
    pyproject = root / 'pyproject.toml'
    if pyproject.is_file():
        data = _load_toml(pyproject)
        if data is not None:
            return dict(data.get('tool', {}).get('rysbench', {}))
    return {}


# ---------------------------------------------------------------------------
# Environment
# ---------------------------------------------------------------------------

def _read_environment(environ: Mapping[str, str]) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for var, name in _ENV_VARS.items():
        raw = environ.get(var)
        if raw is None or not raw.strip():
            continue
        try:
            values[name] = int(raw)
        except ValueError:
            raise ConfigurationError(f'environment variable {var} must be an integer, got {raw!r}') from None
    return values


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

def resolve_settings(overrides: Mapping[str, Any] | None = None,
                     workspace_root: str | Path | None = '.',
                     environ: Mapping[str, str] | None = None) -> Settings:
    """Return the effective :class:`Settings` for a run.

    ``None`` values in *overrides* mean "not given" and fall through to the
    lower-priority sources.
    """
    settings = Settings()

    project = _read_project_config(workspace_root)
    if project:
        logger.debug('project settings: %s', project)
        settings = settings.updated(**{k.replace('-', '_'): v for k, v in project.items()})

    env = _read_environment(os.environ if environ is None else environ)
    if env:
        logger.debug('environment settings: %s', env)
        settings = settings.updated(**env)

    if overrides:
        settings = settings.updated(**overrides)
    return settings
