'Base classes for record converters and `get` marshallers.'
from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import Any, Generic

from ._type_vars import *
from .syntax import ModalType

class LoadCtx:
    'Recursion state while building values from records'
    loader: 'Loader[Any]'
    path: list[str]

    def __init__(self, loader: 'Loader[Any]'):
        self.loader = loader
        self.path = []

    def load(self, record: Record, cls: type[T], key: str | None = None) -> T:
        if key is None:
            return self.loader.load(self, record, cls)
        self.path.append(key)
        try:
            return self.loader.load(self, record, cls)
        finally:
            self.path.pop()

    def where(self) -> str:
        return '.'.join(self.path) or '<root>'

class DumpCtx:
    'Recursion state while turning values into records'
    dumper: 'Dumper[Any]'

    def __init__(self, dumper: 'Dumper[Any]'):
        self.dumper = dumper

    def dump(self, value: Any) -> Record:
        return self.dumper.dump(self, value)

class Dumper(ABC, Generic[T]):
    'Turns values of some Python types into records'

    @abstractmethod
    def can_dump(self, cls: type) -> bool: ...

    @abstractmethod
    def dump(self, ctx: DumpCtx, value: T) -> Record:
        'Called only if `can_dump` returned `True` for `type(value)`.'
        ...

class Loader(ABC, Generic[T]):
    'Builds values of some Python types from records'

    @abstractmethod
    def can_load(self, cls: type) -> bool: ...

    @abstractmethod
    def load(self, ctx: LoadCtx, record: Record, cls: type[T]) -> T:
        '''Build a `cls` from `record`, or raise `TypeError`.

        Called only if `can_load` returned `True` for `cls`.'''
        ...

class Converter(Dumper[T], Loader[T]):
    'Loads and dumps the same types'
    def can_dump(self, cls: type) -> bool:
        return self.can_load(cls)

class MarshalCtx:
    '''State for one `get` return: the sending and receiving sites, the
    configured site set, and the marshaller to recurse with.'''

    parent_marshaller: 'Marshaller'
    source: str
    target: str
    sites: tuple[str, ...]

    def __init__(self, marshaller: 'Marshaller', source: str, target: str,
                 sites: Sequence[str]):
        self.parent_marshaller = marshaller
        self.source = source
        self.target = target
        self.sites = tuple(sites)

    def marshal(self, value: Any, A: ModalType) -> Any:
        return self.parent_marshaller.marshal(self, value, A)

class Marshaller(ABC):
    'Copies values of one type constructor between sites'

    @abstractmethod
    def can_marshal(self, A: ModalType) -> bool:
        'Whether this marshaller handles values of the given (closed) type'
        ...

    @abstractmethod
    def marshal(self, ctx: MarshalCtx, value: Any, A: ModalType) -> Any:
        '''Copy `value : A` from `ctx.source` to `ctx.target`.

        Called only if `can_marshal` returned `True` for `A`.'''
        ...
