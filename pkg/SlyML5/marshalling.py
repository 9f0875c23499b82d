'''Marshallers for the results of `get`.

Only mobile types have a marshaller; reaching any other shape means the
mobility check let something through.'''
import logging
from typing import Any

from .abc import Marshaller, MarshalCtx
from .syntax import *
from .values import (MarshalError, VBox, VInl, VInr, VPack, VPair, VWorldTable,
                     world_function)

log = logging.getLogger(__name__)

def _expect(value: Any, cls: type | tuple[type, ...], A: ModalType) -> Any:
    if not isinstance(value, cls):
        raise MarshalError(F"Cannot marshal {value!r} at type {A}")
    return value

class BaseMarshaller(Marshaller):
    def can_marshal(self, A: ModalType) -> bool:
        return isinstance(A, Base)

    def marshal(self, ctx: MarshalCtx, value: Any, A: ModalType) -> Any:
        return _expect(value, (int, str, type(None)), A)

class ProdMarshaller(Marshaller):
    def can_marshal(self, A: ModalType) -> bool:
        return isinstance(A, Prod)

    def marshal(self, ctx: MarshalCtx, value: Any, A: Prod) -> Any:
        pair = _expect(value, VPair, A)
        return VPair(ctx.marshal(pair.left, A.left), ctx.marshal(pair.right, A.right))

class SumMarshaller(Marshaller):
    def can_marshal(self, A: ModalType) -> bool:
        return isinstance(A, Sum)

    def marshal(self, ctx: MarshalCtx, value: Any, A: Sum) -> Any:
        if isinstance(value, VInl):
            return VInl(ctx.marshal(value.value, A.left))
        return VInr(ctx.marshal(_expect(value, VInr, A).value, A.right))

class BoxMarshaller(Marshaller):
    '''Boxes travel as they are: their contents stay usable only at the
    box's home site, wherever the box itself goes.'''
    def can_marshal(self, A: ModalType) -> bool:
        return isinstance(A, At)

    def marshal(self, ctx: MarshalCtx, value: Any, A: At) -> Any:
        box = _expect(value, VBox, A)
        if not isinstance(A.world, WConst) or box.home != A.world.name:
            raise MarshalError(F"Box at {box.home} marshaled as {A}")
        return box

class WorldFunctionMarshaller(Marshaller):
    'A world function becomes a table of its instances at every site.'
    def can_marshal(self, A: ModalType) -> bool:
        return isinstance(A, Forall)

    def marshal(self, ctx: MarshalCtx, value: Any, A: Forall) -> Any:
        fn = world_function(value)
        if fn is None:
            raise MarshalError(F"Cannot marshal {value!r} at type {A}")
        return VWorldTable(tuple(
            (s, ctx.marshal(fn.at(s), subst_world(A.body, WConst(s))))
            for s in ctx.sites))

class PackageMarshaller(Marshaller):
    def can_marshal(self, A: ModalType) -> bool:
        return isinstance(A, Exists)

    def marshal(self, ctx: MarshalCtx, value: Any, A: Exists) -> Any:
        package = _expect(value, VPack, A)
        return VPack(package.site,
                     ctx.marshal(package.value, subst_world(A.body, WConst(package.site))))

class MarshallerCollection(Marshaller):
    'Dispatches on the type constructor'
    marshallers: list[Marshaller]

    def __init__(self, *marshallers: Marshaller):
        self.marshallers = list(marshallers)

    def find_marshaller(self, A: ModalType) -> Marshaller | None:
        for m in self.marshallers:
            if m.can_marshal(A):
                return m
        return None

    def can_marshal(self, A: ModalType) -> bool:
        return self.find_marshaller(A) is not None

    def marshal(self, ctx: MarshalCtx, value: Any, A: ModalType) -> Any:
        m = self.find_marshaller(A)
        if m is None:
            raise MarshalError(F"No marshaller for non-mobile type {A}")
        return m.marshal(ctx, value, A)

MARSHALLER = MarshallerCollection(
    BaseMarshaller(),
    ProdMarshaller(),
    SumMarshaller(),
    BoxMarshaller(),
    WorldFunctionMarshaller(),
    PackageMarshaller(),
)

def marshal(v: Any, A: ModalType, ctx: MarshalCtx | None = None) -> Any:
    '''Deep-copy `v : A` for transfer between sites.

    `A` must be closed; non-mobile shapes raise `MarshalError`.'''
    if ctx is None:
        ctx = MarshalCtx(MARSHALLER, '', '', ())
    result = ctx.marshal(v, A)
    log.debug("marshaled %s : %s from %s to %s", v, A, ctx.source or '?', ctx.target or '?')
    return result
