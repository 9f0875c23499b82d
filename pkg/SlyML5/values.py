'Runtime values of the multi-site machine.'
import json
from dataclasses import dataclass, field
from typing import Any, TypeAlias

from .syntax import ModalType, World, WConst, WVar, map_worlds

class MachineFault(RuntimeError):
    'The machine is stuck: its control is ill-typed.'

class MarshalError(MachineFault):
    'A non-mobile value reached marshaling.'

Env: TypeAlias = dict[str, Any]
WEnv: TypeAlias = tuple[str, ...]
'Sites bound to world variables, innermost first'

def resolve_world(w: World, wenv: WEnv) -> str:
    if isinstance(w, WVar):
        return wenv[w.index]
    return w.name

def close_type(A: ModalType, wenv: WEnv) -> ModalType:
    'Replace the free world variables of `A` by the sites they are bound to.'
    def fn(w: World, depth: int) -> World:
        if isinstance(w, WVar) and w.index >= depth:
            return WConst(wenv[w.index - depth])
        return w
    return map_worlds(A, fn) if wenv else A

@dataclass(frozen=True)
class VClosure:
    env: Env = field(compare=False, repr=False)
    var: str
    body: Any
    wenv: WEnv
    world: str
    dom: ModalType
    cod: ModalType | None

@dataclass(frozen=True)
class VPair:
    left: Any
    right: Any

@dataclass(frozen=True)
class VInl:
    value: Any

@dataclass(frozen=True)
class VInr:
    value: Any

@dataclass(frozen=True)
class VBox:
    'A value located at `home`; usable only there.'
    value: Any
    home: str

@dataclass(frozen=True)
class VWorldFun:
    env: Env = field(compare=False, repr=False)
    wenv: WEnv
    body: Any
    world: str
    sites: tuple[str, ...]

    def at(self, site: str) -> Any:
        from .runtime import evaluate
        return evaluate(self.body, self.env, (site,) + self.wenv, self.world, self.sites)

@dataclass(frozen=True)
class VWorldTable:
    'A world function after marshaling: its instance at every site.'
    table: tuple[tuple[str, Any], ...]

    def at(self, site: str) -> Any:
        return dict(self.table)[site]

def world_function(v: Any) -> VWorldFun | VWorldTable | None:
    return v if isinstance(v, (VWorldFun, VWorldTable)) else None

@dataclass(frozen=True)
class VPack:
    site: str
    value: Any

@dataclass(frozen=True)
class VComp:
    'A suspended computation that must run at `world`.'
    term: Any
    env: Env = field(compare=False, repr=False)
    wenv: WEnv
    world: str

@dataclass(frozen=True)
class VRef:
    site: str
    id: int
    cell: ModalType

    @property
    def handle(self) -> str:
        return F"h{self.id}"

def summarize(v: Any) -> str:
    'A short, deterministic rendering of a value for traces and output.'
    match v:
        case None:
            return '()'
        case bool():
            raise TypeError(F"Not a runtime value: {v!r}")
        case int():
            return str(v)
        case str():
            return json.dumps(v)
        case VPair(left, right):
            return F"({summarize(left)}, {summarize(right)})"
        case VInl(inner):
            return F"inl {_atom(inner)}"
        case VInr(inner):
            return F"inr {_atom(inner)}"
        case VBox(inner, home):
            return F"box@{home}({summarize(inner)})"
        case VPack(site, inner):
            return F"pack[{site}] {_atom(inner)}"
        case VRef(site, _):
            return F"{site}:{v.handle}"
        case VClosure():
            return F"<fn@{v.world}>"
        case VWorldFun() | VWorldTable():
            return '<wfn>'
        case VComp():
            return F"<comp@{v.world}>"
    raise TypeError(F"Not a runtime value: {v!r}")

def _atom(v: Any) -> str:
    text = summarize(v)
    return F"({text})" if ' ' in text and not text.startswith('(') else text
