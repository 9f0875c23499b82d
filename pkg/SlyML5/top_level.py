'Reading and writing SlyML5 records.'
from typing import Any

from ._type_vars import *
from .abc import DumpCtx, Dumper, LoadCtx, Loader
from .converters import *

RECORD_CONVERTER = ConverterCollection(
    ScalarConverter(),
    SequenceConverter(),
    EnumConverter(),
    OptionLoader(),
    DataclassConverter(),
)

def from_record(cls: type[T], record: Record, loader: Loader[Any] | None = None) -> T:
    '''Build a `cls` from a parsed TOML table or JSON object.

    Raises `TypeError` naming the key path of the first bad entry.'''
    return LoadCtx(loader or RECORD_CONVERTER).load(record, cls)

def to_record(value: Any, dumper: Dumper[Any] | None = None) -> Record:
    return DumpCtx(dumper or RECORD_CONVERTER).dump(value)
