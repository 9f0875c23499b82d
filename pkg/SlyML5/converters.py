'''Converters between records and the dataclasses they describe.

Records are what `tomllib` and `json` produce: scalars, lists and
string-keyed dicts. Configuration and trace lines both go through here.'''
from dataclasses import MISSING, fields, is_dataclass
from enum import Enum
import inspect
from types import NoneType, UnionType
from typing import Any, Union, get_args, get_origin, get_type_hints

from ._type_vars import *
from .abc import *

def _bare(cls: Any) -> Any:
    return get_origin(cls) or cls

def _wrong(ctx: LoadCtx, record: Record, wanted: str) -> TypeError:
    return TypeError(F"At {ctx.where()}: expected {wanted}, found {type(record).__name__} {record!r}")

class ScalarConverter(Converter[RecordScalar]):
    def can_load(self, cls: type) -> bool:
        return cls in (int, str, bool, NoneType)

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> RecordScalar:
        # True is an int to isinstance, never to a record
        if type(record) is not cls:
            raise _wrong(ctx, record, cls.__name__)
        return record # type: ignore

    def dump(self, ctx: DumpCtx, value: RecordScalar) -> Record:
        return value

class SequenceConverter(Converter[Any]):
    'Lists, and tuples read as `tuple[X, ...]`'
    def can_load(self, cls: type) -> bool:
        return _bare(cls) in (list, tuple)

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> Any:
        if not isinstance(record, list):
            raise _wrong(ctx, record, 'a list')
        item = (get_args(cls) or (Any,))[0]
        if item is Any:
            return _bare(cls)(record)
        return _bare(cls)(ctx.load(x, item, str(i)) for i, x in enumerate(record))

    def dump(self, ctx: DumpCtx, value: Any) -> Record:
        return [ctx.dump(x) for x in value]

class EnumConverter(Converter[Enum]):
    'Enums stored by value'
    def can_load(self, cls: type) -> bool:
        return inspect.isclass(cls) and issubclass(cls, Enum)

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> Enum:
        for member in cls:
            if member.value == record:
                return member
        options = ', '.join(str(m.value) for m in cls)
        raise _wrong(ctx, record, F"one of {options}")

    def dump(self, ctx: DumpCtx, value: Enum) -> Record:
        return value.value

class OptionLoader(Loader[Any]):
    'Union fields: the first member type that loads wins.'
    def can_load(self, cls: type) -> bool:
        return isinstance(cls, UnionType) or get_origin(cls) is Union

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> Any:
        problems = []
        for option in get_args(cls):
            try:
                return ctx.load(record, option)
            except TypeError as err:
                problems.append(str(err))
        raise TypeError(F"At {ctx.where()}: no member of {cls} fits:\n  " + '\n  '.join(problems))

def _check_keys(ctx: LoadCtx, record: Record, allowed: set[str], needed: set[str]) -> dict:
    if not isinstance(record, dict):
        raise _wrong(ctx, record, 'a table')
    if unknown := set(record) - allowed:
        raise TypeError(F"At {ctx.where()}: unknown keys {sorted(unknown)}")
    if absent := needed - set(record):
        raise TypeError(F"At {ctx.where()}: missing keys {sorted(absent)}")
    return record

class DataclassConverter(Converter[Any]):
    '''Dataclasses as tables keyed by field name.

    Unknown keys are an error; fields with defaults may be left out.'''
    def can_load(self, cls: type) -> bool:
        return is_dataclass(_bare(cls))

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> Any:
        init = [f for f in fields(cls) if f.init]
        table = _check_keys(ctx, record, {f.name for f in init}, {
            f.name for f in init if f.default is MISSING and f.default_factory is MISSING})
        hints = get_type_hints(cls)
        return cls(**{f.name: ctx.load(table[f.name], hints[f.name], f.name)
                      for f in init if f.name in table})

    def dump(self, ctx: DumpCtx, value: Any) -> Record:
        return {f.name: ctx.dump(getattr(value, f.name)) for f in fields(value)}

def _variants(cls: type):
    for sub in cls.__subclasses__():
        yield sub
        yield from _variants(sub)

class TaggedConverter(Converter[Any]):
    '''A family of dataclasses as flat records sharing one key layout.

    Each concrete subclass names its tag in a `kind` class attribute and
    maps its fields to record keys in `record_keys`. Keys a subclass does
    not use are `None` in the record.'''
    base: type
    layout: tuple[str, ...]
    tag: str

    def __init__(self, base: type, layout: tuple[str, ...], tag: str = 'kind'):
        self.base = base
        self.layout = layout
        self.tag = tag

    def can_load(self, cls: type) -> bool:
        return inspect.isclass(cls) and issubclass(cls, self.base)

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> Any:
        table = _check_keys(ctx, record, set(self.layout), {self.tag})
        kind = table[self.tag]
        variant = next((v for v in _variants(self.base) if vars(v).get('kind') == kind), None)
        if variant is None:
            raise TypeError(F"At {ctx.where()}: unknown {self.tag} {kind!r}")
        if not issubclass(variant, cls):
            raise _wrong(ctx, record, cls.__name__)
        keys: dict[str, str] = variant.record_keys # type: ignore
        _check_keys(ctx, table, set(self.layout), set(keys.values()))
        hints = get_type_hints(variant)
        return variant(**{name: ctx.load(table[key], hints[name], key)
                          for name, key in keys.items()})

    def dump(self, ctx: DumpCtx, value: Any) -> Record:
        record: dict[str, Record] = dict.fromkeys(self.layout)
        record[self.tag] = type(value).kind
        for name, key in type(value).record_keys.items():
            record[key] = ctx.dump(getattr(value, name))
        return record

class ConverterCollection(Converter[Any]):
    '''Tries its converters in order; the first that accepts a type handles it.

    Loader-only members take part in loading and are skipped for dumping.'''
    members: tuple[Loader[Any], ...]

    def __init__(self, *members: Loader[Any]):
        self.members = members
        self._loaders: dict[Any, Loader[Any] | None] = {}
        self._dumpers: dict[type, Any] = {}

    def _loader(self, cls: Any) -> Loader[Any] | None:
        if cls not in self._loaders:
            self._loaders[cls] = next((m for m in self.members if m.can_load(cls)), None)
        return self._loaders[cls]

    def _dumper(self, cls: type) -> Dumper[Any] | None:
        if cls not in self._dumpers:
            self._dumpers[cls] = next((m for m in self.members
                                       if isinstance(m, Dumper) and m.can_dump(cls)), None)
        return self._dumpers[cls]

    def can_load(self, cls: type) -> bool:
        return self._loader(cls) is not None

    def can_dump(self, cls: type) -> bool:
        return self._dumper(cls) is not None

    def load(self, ctx: LoadCtx, record: Record, cls: type) -> Any:
        loader = self._loader(cls)
        if loader is None:
            raise TypeError(F"No loader for {cls}")
        return loader.load(ctx, record, cls)

    def dump(self, ctx: DumpCtx, value: Any) -> Record:
        dumper = self._dumper(type(value))
        if dumper is None:
            raise TypeError(F"No dumper for {type(value).__name__}")
        return dumper.dump(ctx, value)

    def with_(self, *members: Loader[Any]) -> 'ConverterCollection':
        'A new collection trying `members` before the existing ones'
        return ConverterCollection(*members, *self.members)
