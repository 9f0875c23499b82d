from collections.abc import Mapping, Sequence
from typing import TypeAlias, TypeVar

T = TypeVar('T')

RecordScalar: TypeAlias = int | bool | str | None

Record: TypeAlias = RecordScalar | Sequence['Record'] | Mapping[str, 'Record']
'TOML tables and JSON trace lines, once parsed'
