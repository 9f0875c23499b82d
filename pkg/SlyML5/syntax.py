'Worlds, modal types, surface terms, contexts, and the mobility judgement.'
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field, fields, replace
from typing import Any, ClassVar, TypeAlias, TypeVar

# ---------------------------------------------------------------- worlds

@dataclass(frozen=True)
class WConst:
    'A site declared by the run configuration'
    name: str

    def __str__(self) -> str: return self.name

@dataclass(frozen=True)
class WVar:
    '''A bound world, as a de Bruijn index into the world context
    (0 is the innermost binder).'''
    index: int
    hint: str = field(default='', compare=False)

    def __str__(self) -> str: return self.hint or F"ω{self.index}"

World: TypeAlias = WConst | WVar

WorldFn: TypeAlias = Callable[[World, int], World]

def shift_world(w: World, by: int = 1, cutoff: int = 0) -> World:
    if isinstance(w, WVar) and w.index >= cutoff:
        return WVar(w.index + by, w.hint)
    return w

def wf_world(delta: int, w: World) -> bool:
    if isinstance(w, WVar):
        return 0 <= w.index < delta
    return True

# ----------------------------------------------------------------- types

class ModalType:
    'Base of every type constructor, surface (ML5) and core (HL5) alike.'

    def __str__(self) -> str:
        from .pretty import show_type
        return show_type(self)

@dataclass(frozen=True, repr=False)
class Base(ModalType):
    name: str # int | string | unit

    def __repr__(self) -> str: return self.name

INT = Base('int')
STRING = Base('string')
UNIT = Base('unit')
BASE_TYPES = (INT, STRING, UNIT)

@dataclass(frozen=True)
class Arrow(ModalType):
    dom: ModalType
    cod: ModalType

@dataclass(frozen=True)
class Prod(ModalType):
    left: ModalType
    right: ModalType

@dataclass(frozen=True)
class Sum(ModalType):
    left: ModalType
    right: ModalType

@dataclass(frozen=True)
class At(ModalType):
    'Hybrid connective: the inner type holds at `world`.'
    type: ModalType
    world: World

@dataclass(frozen=True)
class Forall(ModalType):
    'Quantification over worlds; `body` sees the bound world as `WVar(0)`.'
    body: ModalType
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class Exists(ModalType):
    body: ModalType
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class Shamrock(ModalType):
    type: ModalType

@dataclass(frozen=True)
class Ref(ModalType):
    type: ModalType

@dataclass(frozen=True)
class Lax(ModalType):
    'Computations that must run at the world of the judgement.'
    type: ModalType

Ml5Type: TypeAlias = Base | Arrow | Prod | Sum | At | Forall | Exists | Shamrock | Ref
Hl5Type: TypeAlias = Base | Arrow | Prod | Sum | At | Forall | Exists | Lax | Ref

TypeT = TypeVar('TypeT', bound=ModalType)

def map_worlds(A: ModalType, fn: WorldFn, depth: int = 0) -> Any:
    'Rebuild `A` with every world replaced by `fn(world, binders passed)`.'
    match A:
        case Base():
            return A
        case At(inner, w):
            return At(map_worlds(inner, fn, depth), fn(w, depth))
        case Forall(body, hint):
            return Forall(map_worlds(body, fn, depth + 1), hint)
        case Exists(body, hint):
            return Exists(map_worlds(body, fn, depth + 1), hint)
        case Arrow(a, b):
            return Arrow(map_worlds(a, fn, depth), map_worlds(b, fn, depth))
        case Prod(a, b):
            return Prod(map_worlds(a, fn, depth), map_worlds(b, fn, depth))
        case Sum(a, b):
            return Sum(map_worlds(a, fn, depth), map_worlds(b, fn, depth))
        case Shamrock(inner):
            return Shamrock(map_worlds(inner, fn, depth))
        case Ref(inner):
            return Ref(map_worlds(inner, fn, depth))
        case Lax(inner):
            return Lax(map_worlds(inner, fn, depth))
    raise TypeError(F"Not a modal type: {A!r}")

def iter_worlds(A: ModalType, depth: int = 0) -> Iterator[tuple[World, int]]:
    'Every world occurring in `A`, with the number of binders above it.'
    match A:
        case Base():
            return
        case At(inner, w):
            yield from iter_worlds(inner, depth)
            yield w, depth
        case Forall(body) | Exists(body):
            yield from iter_worlds(body, depth + 1)
        case Arrow(a, b) | Prod(a, b) | Sum(a, b):
            yield from iter_worlds(a, depth)
            yield from iter_worlds(b, depth)
        case Shamrock(inner) | Ref(inner) | Lax(inner):
            yield from iter_worlds(inner, depth)
        case _:
            raise TypeError(F"Not a modal type: {A!r}")

def _shifting(by: int, cutoff: int) -> WorldFn:
    return lambda w, depth: shift_world(w, by, cutoff + depth)

def _substituting(replacement: World, index: int) -> WorldFn:
    def fn(w: World, depth: int) -> World:
        if isinstance(w, WVar):
            if w.index == index + depth:
                return shift_world(replacement, depth)
            if w.index > index + depth:
                return WVar(w.index - 1, w.hint)
        return w
    return fn

def _abstracting(name: str) -> WorldFn:
    def fn(w: World, depth: int) -> World:
        if isinstance(w, WConst) and w.name == name:
            return WVar(depth, name)
        return shift_world(w, 1, depth)
    return fn

def shift(A: TypeT, by: int = 1, cutoff: int = 0) -> TypeT:
    return map_worlds(A, _shifting(by, cutoff))

def subst_world(A: TypeT, w: World, index: int = 0) -> TypeT:
    '''Instantiate the outermost bound world of a binder body with `w`.

    `A` lives under one more binder than `w`; the result lives under the
    same world context as `w`.'''
    return map_worlds(A, _substituting(w, index))

def wf_type(delta: int, A: ModalType) -> bool:
    return all(wf_world(delta + depth, w) for w, depth in iter_worlds(A))

def mentions_world(A: ModalType, index: int) -> bool:
    return any(isinstance(w, WVar) and w.index == index + depth
               for w, depth in iter_worlds(A))

def sites_of_type(A: ModalType) -> set[str]:
    return {w.name for w, _ in iter_worlds(A) if isinstance(w, WConst)}

def mobile(A: ModalType) -> bool:
    '''Whether values of `A` may be shipped between worlds by `get`.

    At re-tethers its contents, so every `A at w` is mobile; functions,
    references and suspended computations are tied to their world.'''
    match A:
        case Base() | At() | Shamrock():
            return True
        case Prod(a, b) | Sum(a, b):
            return mobile(a) and mobile(b)
        case Forall(body) | Exists(body):
            return mobile(body)
        case Arrow() | Ref() | Lax():
            return False
    raise TypeError(F"Not a modal type: {A!r}")

# ------------------------------------------------------------ term nodes

@dataclass(frozen=True)
class Pos:
    line: int
    column: int

    def __str__(self) -> str: return F"{self.line}:{self.column}"

@dataclass(frozen=True)
class Node:
    '''Base of term ASTs.

    Subclasses declare their binding structure: `binds` maps a subterm
    field to the fields naming the variables bound in it, and
    `world_binders` lists the subterm fields under one more world binder.'''
    binds: ClassVar[dict[str, tuple[str, ...]]] = {}
    world_binders: ClassVar[tuple[str, ...]] = ()
    is_var: ClassVar[bool] = False

    pos: Pos | None = field(default=None, compare=False, repr=False, kw_only=True)

    @classmethod
    def make_var(cls, name: str) -> 'Node':
        raise NotImplementedError

NodeT = TypeVar('NodeT', bound=Node)

def node_fields(node: Node) -> Iterator[tuple[str, Any]]:
    for f in fields(node):
        if f.name != 'pos':
            yield f.name, getattr(node, f.name)

def map_node_worlds(node: NodeT, fn: WorldFn, depth: int = 0) -> NodeT:
    changes: dict[str, Any] = {}
    for name, value in node_fields(node):
        d = depth + 1 if name in node.world_binders else depth
        if isinstance(value, Node):
            changes[name] = map_node_worlds(value, fn, d)
        elif isinstance(value, (WConst, WVar)):
            changes[name] = fn(value, depth)
        elif isinstance(value, ModalType):
            changes[name] = map_worlds(value, fn, depth)
    return replace(node, **changes) if changes else node

def iter_node_worlds(node: Node, depth: int = 0) -> Iterator[tuple[World, int]]:
    for name, value in node_fields(node):
        d = depth + 1 if name in node.world_binders else depth
        if isinstance(value, Node):
            yield from iter_node_worlds(value, d)
        elif isinstance(value, (WConst, WVar)):
            yield value, depth
        elif isinstance(value, ModalType):
            yield from iter_worlds(value, depth)

def shift_term(node: NodeT, by: int = 1, cutoff: int = 0) -> NodeT:
    return map_node_worlds(node, _shifting(by, cutoff))

def subst_world_term(node: NodeT, w: World, index: int = 0) -> NodeT:
    return map_node_worlds(node, _substituting(w, index))

def abstract_world(x: Any, name: str) -> Any:
    'Bind every occurrence of site `name` in a type or term as `WVar(0)`.'
    if isinstance(x, Node):
        return map_node_worlds(x, _abstracting(name))
    return map_worlds(x, _abstracting(name))

def sites_of_term(node: Node) -> set[str]:
    return {w.name for w, _ in iter_node_worlds(node) if isinstance(w, WConst)}

def free_vars(node: Node) -> frozenset[str]:
    if node.is_var:
        return frozenset((getattr(node, 'name'),))
    out: set[str] = set()
    for name, value in node_fields(node):
        if isinstance(value, Node):
            bound = {getattr(node, b) for b in node.binds.get(name, ())}
            out |= free_vars(value) - bound
    return frozenset(out)

def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    i = 1
    while (candidate := F"{base}{i}") in avoid:
        i += 1
    return candidate

def subst_term(node: NodeT, name: str, replacement: Node) -> NodeT:
    'Capture-avoiding substitution of `replacement` for the variable `name`.'
    if node.is_var:
        return replacement if getattr(node, 'name') == name else node # type: ignore
    repl_free = free_vars(replacement)
    changes: dict[str, Any] = {}
    for fname, value in node_fields(node):
        if not isinstance(value, Node):
            continue
        binders = node.binds.get(fname, ())
        if name in (getattr(node, b) for b in binders):
            continue
        if name not in free_vars(value):
            continue
        repl = shift_term(replacement, 1) if fname in node.world_binders else replacement
        body = value
        for b in binders:
            bound = getattr(node, b)
            if bound in repl_free:
                new = fresh_name(bound, repl_free | free_vars(body) | {name})
                body = subst_term(body, bound, type(node).make_var(new))
                changes[b] = new
        changes[fname] = subst_term(body, name, repl)
    return replace(node, **changes) if changes else node

# ----------------------------------------------------------- ML5 terms

@dataclass(frozen=True)
class Term(Node):
    'Surface ML5 term'

    @classmethod
    def make_var(cls, name: str) -> 'Term':
        return Var(name)

    def __str__(self) -> str:
        from .pretty import show_term
        return show_term(self)

Literal: TypeAlias = int | str | None

@dataclass(frozen=True)
class Var(Term):
    is_var: ClassVar[bool] = True
    name: str

@dataclass(frozen=True)
class Lit(Term):
    'Integer, string, or unit (`None`) literal'
    value: Literal

@dataclass(frozen=True)
class Lam(Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    var: str
    dom: ModalType
    body: Term

@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term

@dataclass(frozen=True)
class Inl(Term):
    value: Term

@dataclass(frozen=True)
class Inr(Term):
    value: Term

@dataclass(frozen=True)
class Hold(Term):
    'Introduces `A at world` from a value at `world`.'
    world: World
    value: Term

@dataclass(frozen=True)
class WLam(Term):
    world_binders: ClassVar[tuple[str, ...]] = ('body',)
    body: Term
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class WApp(Term):
    fn: Term
    world: World

@dataclass(frozen=True)
class Pack(Term):
    world: World
    value: Term

@dataclass(frozen=True)
class Sham(Term):
    world_binders: ClassVar[tuple[str, ...]] = ('body',)
    body: Term
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class Unsham(Term):
    value: Term

@dataclass(frozen=True)
class Ret(Term):
    value: Term

@dataclass(frozen=True)
class Let(Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    var: str
    bound: Term
    body: Term
    ann: ModalType | None = None

@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term

@dataclass(frozen=True)
class Fst(Term):
    pair: Term

@dataclass(frozen=True)
class Snd(Term):
    pair: Term

@dataclass(frozen=True)
class Case(Term):
    'Sum elimination on an expression scrutinee; always tethered.'
    binds: ClassVar[dict[str, tuple[str, ...]]] = {
        'left': ('left_var',), 'right': ('right_var',)}
    scrutinee: Term
    left_var: str
    left: Term
    right_var: str
    right: Term
    world: World | None = None

@dataclass(frozen=True)
class VCase(Term):
    'Sum elimination on a value scrutinee living at `world`.'
    binds: ClassVar[dict[str, tuple[str, ...]]] = {
        'left': ('left_var',), 'right': ('right_var',)}
    scrutinee: Term
    left_var: str
    left: Term
    right_var: str
    right: Term
    world: World | None = None

@dataclass(frozen=True)
class VSplit(Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('left_var', 'right_var')}
    scrutinee: Term
    left_var: str
    right_var: str
    body: Term
    world: World | None = None

@dataclass(frozen=True)
class LetA(Term):
    'At elimination: `var` is bound at the home world of the box.'
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    var: str
    boxed: Term
    body: Term
    world: World | None = None

@dataclass(frozen=True)
class Unpack(Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    world_binders: ClassVar[tuple[str, ...]] = ('body',)
    var: str
    package: Term
    body: Term
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class Get(Term):
    world: World
    body: Term

@dataclass(frozen=True)
class MkRef(Term):
    init: Term

@dataclass(frozen=True)
class Deref(Term):
    ref: Term

@dataclass(frozen=True)
class Assign(Term):
    ref: Term
    value: Term

@dataclass(frozen=True)
class Print(Term):
    arg: Term

@dataclass(frozen=True)
class BinOp(Term):
    op: str # + - * ^
    left: Term
    right: Term

@dataclass(frozen=True)
class Anno(Term):
    term: Term
    type: ModalType

BINOPS: dict[str, tuple[Base, Base]] = {
    '+': (INT, INT), '-': (INT, INT), '*': (INT, INT), '^': (STRING, STRING)
}

def is_value(t: Term) -> bool:
    match t:
        case Var() | Lit() | Lam():
            return True
        case Pair(a, b):
            return is_value(a) and is_value(b)
        case Inl(v) | Inr(v) | Hold(_, v) | Pack(_, v) | Unsham(v) | WApp(v):
            return is_value(v)
        case WLam(v) | Sham(v):
            return is_value(v)
        case Anno(v):
            return is_value(v)
        case LetA(_, scrutinee, body):
            return is_value(scrutinee) and is_value(body)
        case VCase(scrutinee, _, left, _, right):
            return is_value(scrutinee) and is_value(left) and is_value(right)
        case VSplit(scrutinee, _, _, body):
            return is_value(scrutinee) and is_value(body)
    return False

def map_children(t: NodeT, fn: Callable[[Any], Any]) -> NodeT:
    'Rebuild `t` with `fn` applied to each direct subterm.'
    changes = {name: fn(value) for name, value in node_fields(t) if isinstance(value, Node)}
    return replace(t, **changes) if changes else t

# -------------------------------------------------------------- contexts

@dataclass(frozen=True)
class Hyp:
    name: str
    type: ModalType
    world: World

@dataclass(frozen=True)
class Ctx:
    '''Typing context: `delta` bound worlds and hypotheses `x : A [w]`.

    Shared by the ML5 checker and the L5 checker.'''
    delta: int = 0
    entries: tuple[Hyp, ...] = ()

    def lookup(self, name: str) -> Hyp | None:
        for hyp in reversed(self.entries):
            if hyp.name == name:
                return hyp
        return None

    def extend(self, name: str, A: ModalType, w: World) -> 'Ctx':
        return Ctx(self.delta, self.entries + (Hyp(name, A, w),))

    def extend_world(self) -> 'Ctx':
        return Ctx(self.delta + 1, tuple(
            Hyp(h.name, shift(h.type), shift_world(h.world))
            for h in self.entries))

    def wf(self) -> bool:
        return all(wf_type(self.delta, h.type) and wf_world(self.delta, h.world)
                   for h in self.entries)
