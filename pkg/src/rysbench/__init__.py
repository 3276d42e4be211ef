"""rysbench – finite-model workbench for rough Y-systems and enriched pre-rough algebras."""
try:
    from importlib.metadata import version, PackageNotFoundError
    try:
        __version__ = version('rysbench')
    except PackageNotFoundError:
        __version__ = '0.0.0.dev0'
except ImportError:
    __version__ = '0.0.0.dev0'
