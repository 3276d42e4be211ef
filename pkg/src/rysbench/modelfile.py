"""
Model files.

A model file is UTF-8 JSON validated against the bundled ``model.schema.json``.
Element order in ``universe`` fixes the bit encoding of every subset.  Names
are resolved against that universe here, so the rest of rysbench only sees
masks.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from rysbench.config import Settings
from rysbench.errors import ConfigurationError, ModelFileError
from rysbench.granules import GranuleSet
from rysbench.model import Cover, FamilyKind, FamilySpec, ModelContext, Partition, Universe
from rysbench.rys import RysSection

logger = logging.getLogger(__name__)

_DEFAULT_OPERATIONS = {'plus': 'union', 'times': 'intersection', 'tilde': 'complement'}


@lru_cache(maxsize=1)
def model_schema() -> dict:
    text = resources.files('rysbench').joinpath('model.schema.json').read_text(encoding='utf-8')
    return json.loads(text)


@dataclass
class ModelDocument:
    """A parsed model file."""
    ctx: ModelContext
    name: str = ''
    path: str = ''
    granules: dict[str, GranuleSet] = field(default_factory=dict)
    rys: RysSection = field(default_factory=RysSection)

    def granule_set(self, name: str) -> GranuleSet:
        """Look up granules by name; ``blocks`` and cover names are implicit sets."""
        if name in self.granules:
            return self.granules[name]
        if name == 'blocks' and self.ctx.partition is not None:
            return GranuleSet.of('blocks', self.ctx.partition.blocks)
        for cover in self.ctx.covers:
            if cover.name == name:
                return GranuleSet.of(name, cover.members, 'initial')
        known = sorted(set(self.granules) | {c.name for c in self.ctx.covers}
                       | ({'blocks'} if self.ctx.partition is not None else set()))
        raise ConfigurationError(f'no granule set {name!r}; available: {", ".join(known) or "none"}')


def validate_document(data: Any, path: str = '') -> None:
    validator = jsonschema.Draft202012Validator(model_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        where = '/'.join(str(p) for p in first.absolute_path) or '<root>'
        raise ModelFileError(f'{where}: {first.message}', path)


def _unary(universe: Universe, rows) -> dict[int, int]:
    return {universe.subset(x): universe.subset(z) for x, z in rows}


def _binary(universe: Universe, rows) -> dict[tuple[int, int], int]:
    return {(universe.subset(x), universe.subset(y)): universe.subset(z) for x, y, z in rows}


def _operation(universe: Universe, key: str, value, reader):
    if value is None:
        return None
    if isinstance(value, str):
        if value != _DEFAULT_OPERATIONS[key]:
            raise ConfigurationError(f'rys.{key} must be {_DEFAULT_OPERATIONS[key]!r} or a table, got {value!r}')
        return None
    return reader(universe, value)


def _rys_section(universe: Universe, data: Mapping[str, Any]) -> RysSection:
    parthood = data.get('parthood')
    one = data.get('one')
    definables = data.get('definables')
    return RysSection(
        mode=data.get('mode'),
        parthood=None if parthood is None else tuple(
            (universe.subset(x), universe.subset(y)) for x, y in parthood),
        plus=_operation(universe, 'plus', data.get('plus'), _binary),
        times=_operation(universe, 'times', data.get('times'), _binary),
        tilde=_operation(universe, 'tilde', data.get('tilde'), _unary),
        one=None if one is None else universe.subset(one),
        definables=None if definables is None else tuple(universe.subset(d) for d in definables),
    )


def model_from_dict(data: Mapping[str, Any], settings: Settings | None = None, path: str = '') -> ModelDocument:
    """Validate *data* and build the :class:`ModelDocument` it describes."""
    validate_document(data, path)
    try:
        universe = Universe.of(data['universe'])
        partition = None
        if 'partition' in data:
            partition = Partition.of(universe, (universe.subset(b) for b in data['partition']))
        covers = [Cover.of(universe, name, (universe.subset(m) for m in members))
                  for name, members in sorted(data.get('covers', {}).items())]
        families = []
        for entry in data.get('families', []):
            kind = FamilyKind(entry['kind'])
            if kind is FamilyKind.USER_TABLE and not ('lower' in entry and 'upper' in entry):
                raise ConfigurationError(f'user-table family {entry["index"]} needs lower and upper tables')
            families.append(FamilySpec(
                entry['index'], kind, entry.get('cover'),
                _unary(universe, entry['lower']) if 'lower' in entry else None,
                _unary(universe, entry['upper']) if 'upper' in entry else None,
            ))
        ctx = ModelContext(universe, partition, covers, families, settings=settings)
        granules = {}
        for name, value in sorted(data.get('granules', {}).items()):
            members, label = (value, 'unlabeled') if isinstance(value, list) else (
                value['members'], value.get('label', 'unlabeled'))
            granules[name] = GranuleSet.of(name, (universe.subset(m) for m in members), label)
        rys = _rys_section(universe, data.get('rys', {}))
    except ModelFileError:
        raise
    except ConfigurationError as exc:
        raise ModelFileError(str(exc), path) from None
    logger.debug('loaded model %s: |S|=%d, %d famil(y/ies)', path or '<dict>', universe.size, len(ctx.families))
    return ModelDocument(ctx, data.get('name', Path(path).stem if path else ''), path, granules, rys)


def load_model(path: str | Path, settings: Settings | None = None) -> ModelDocument:
    """Read and validate the model file at *path*."""
    path = str(path)
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as exc:
        raise ModelFileError(f'cannot read model file: {exc.strerror or exc}', path) from None
    except json.JSONDecodeError as exc:
        raise ModelFileError(f'invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}', path) from None
    return model_from_dict(data, settings, path)
