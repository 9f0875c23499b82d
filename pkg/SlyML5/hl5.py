'''L5, the lax S5 core that translated programs inhabit, and the Kripke
reading of HL5 types over a finite site set.

L5 eliminations of sums, products, `at` and `exists` are untethered:
the scrutinee lives at its own world while the conclusion may live
anywhere. Effects only happen inside the indexed monad `Lax`.'''
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar

from .syntax import *

class L5TypeError(TypeError):
    'An L5 term does not have the type it was checked against'

# ------------------------------------------------------------- L5 terms

@dataclass(frozen=True)
class L5Term(Node):
    @classmethod
    def make_var(cls, name: str) -> 'L5Term':
        return LVar(name)

    def __str__(self) -> str:
        from .pretty import show_l5
        return show_l5(self)

@dataclass(frozen=True)
class LVar(L5Term):
    is_var: ClassVar[bool] = True
    name: str

@dataclass(frozen=True)
class LLit(L5Term):
    value: Literal

@dataclass(frozen=True)
class LLam(L5Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    var: str
    dom: ModalType
    body: L5Term
    cod: ModalType | None = None

@dataclass(frozen=True)
class LApp(L5Term):
    fn: L5Term
    arg: L5Term

@dataclass(frozen=True)
class LPair(L5Term):
    left: L5Term
    right: L5Term

@dataclass(frozen=True)
class LFst(L5Term):
    pair: L5Term

@dataclass(frozen=True)
class LSnd(L5Term):
    pair: L5Term

@dataclass(frozen=True)
class LSplit(L5Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('left_var', 'right_var')}
    scrutinee: L5Term
    left_var: str
    right_var: str
    body: L5Term
    world: World | None = None

@dataclass(frozen=True)
class LInl(L5Term):
    value: L5Term

@dataclass(frozen=True)
class LInr(L5Term):
    value: L5Term

@dataclass(frozen=True)
class LCase(L5Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {
        'left': ('left_var',), 'right': ('right_var',)}
    scrutinee: L5Term
    left_var: str
    left: L5Term
    right_var: str
    right: L5Term
    world: World | None = None

@dataclass(frozen=True)
class LBox(L5Term):
    world: World
    value: L5Term

@dataclass(frozen=True)
class LLetA(L5Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    var: str
    boxed: L5Term
    body: L5Term
    world: World | None = None

@dataclass(frozen=True)
class LWLam(L5Term):
    world_binders: ClassVar[tuple[str, ...]] = ('body',)
    body: L5Term
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class LWApp(L5Term):
    fn: L5Term
    world: World

@dataclass(frozen=True)
class LPack(L5Term):
    world: World
    value: L5Term

@dataclass(frozen=True)
class LUnpack(L5Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    world_binders: ClassVar[tuple[str, ...]] = ('body',)
    var: str
    package: L5Term
    body: L5Term
    world: World | None = None
    hint: str = field(default='', compare=False)

@dataclass(frozen=True)
class LPrim(L5Term):
    op: str
    left: L5Term
    right: L5Term

@dataclass(frozen=True)
class LAnno(L5Term):
    term: L5Term
    type: ModalType

# monadic forms

@dataclass(frozen=True)
class LRet(L5Term):
    value: L5Term

@dataclass(frozen=True)
class LBind(L5Term):
    binds: ClassVar[dict[str, tuple[str, ...]]] = {'body': ('var',)}
    var: str
    bound: L5Term
    body: L5Term
    ann: ModalType | None = None

@dataclass(frozen=True)
class LGet(L5Term):
    'Run a computation at `world`, returning its (mobile) result of type `ann`.'
    world: World
    body: L5Term
    ann: ModalType

@dataclass(frozen=True)
class LRef(L5Term):
    init: L5Term
    cell: ModalType

@dataclass(frozen=True)
class LDeref(L5Term):
    ref: L5Term

@dataclass(frozen=True)
class LAssign(L5Term):
    ref: L5Term
    value: L5Term

@dataclass(frozen=True)
class LPrint(L5Term):
    arg: L5Term

MONADIC = (LRet, LBind, LGet, LRef, LDeref, LAssign, LPrint)

def subst_l5(t: L5Term, name: str, replacement: L5Term) -> L5Term:
    return subst_term(t, name, replacement)

def subst_world_l5(t: L5Term, w: World) -> L5Term:
    return subst_world_term(t, w)

def subst_world_hl5(A: ModalType, w: World) -> ModalType:
    return subst_world(A, w)

def _canonical(node: Node, depth: int = 0) -> Node:
    changes: dict[str, Any] = {}
    for fname, value in node_fields(node):
        if not isinstance(value, Node):
            continue
        body = value
        for b in node.binds.get(fname, ()):
            new = F"%{depth}{b}"
            body = subst_term(body, getattr(node, b), type(node).make_var(new))
            changes[b] = new
        changes[fname] = _canonical(body, depth + 1)
    return replace(node, **changes) if changes else node

def alpha_equal(a: Node, b: Node) -> bool:
    'Equality up to the names of bound term variables.'
    return _canonical(a) == _canonical(b)

# ------------------------------------------------------------ L5 checker

class _L5Checker:
    def __init__(self, sites: Sequence[str] | None = None):
        self.sites = frozenset(sites) if sites is not None else None

    def world(self, ctx: Ctx, w: World) -> World:
        if not wf_world(ctx.delta, w):
            raise L5TypeError(F"Unbound world {w}")
        if self.sites is not None and isinstance(w, WConst) and w.name not in self.sites:
            raise L5TypeError(F"Unknown site {w}")
        return w

    def wf(self, ctx: Ctx, A: ModalType) -> ModalType:
        if not wf_type(ctx.delta, A):
            raise L5TypeError(F"Ill-formed type {A} under {ctx.delta} worlds")
        return A

    @staticmethod
    def expect(A: ModalType, cls: type[TypeT], t: L5Term) -> TypeT:
        if not isinstance(A, cls):
            raise L5TypeError(F"Mismatch: expected a {cls.__name__} type for {t}, found {A}")
        return A

    def synth(self, ctx: Ctx, t: L5Term, w: World) -> ModalType:
        match t:
            case LVar(name):
                hyp = ctx.lookup(name)
                if hyp is None:
                    raise L5TypeError(F"Unbound variable {name}")
                if hyp.world != w:
                    raise L5TypeError(F"Variable {name} lives at {hyp.world}, used at {w}")
                return hyp.type
            case LLit(value):
                return UNIT if value is None else STRING if isinstance(value, str) else INT
            case LLam(var, dom, body, cod):
                self.wf(ctx, dom)
                inner = ctx.extend(var, dom, w)
                if cod is not None:
                    self.check(inner, body, self.wf(ctx, cod), w)
                    return Arrow(dom, cod)
                return Arrow(dom, self.synth(inner, body, w))
            case LApp(fn, arg):
                arrow = self.expect(self.synth(ctx, fn, w), Arrow, fn)
                self.check(ctx, arg, arrow.dom, w)
                return arrow.cod
            case LPair(left, right):
                return Prod(self.synth(ctx, left, w), self.synth(ctx, right, w))
            case LFst(pair):
                return self.expect(self.synth(ctx, pair, w), Prod, pair).left
            case LSnd(pair):
                return self.expect(self.synth(ctx, pair, w), Prod, pair).right
            case LSplit(scrutinee, x, y, body, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                prod = self.expect(self.synth(ctx, scrutinee, w0), Prod, scrutinee)
                return self.synth(ctx.extend(x, prod.left, w0).extend(y, prod.right, w0), body, w)
            case LCase(scrutinee, x, left, y, right, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                sum_ = self.expect(self.synth(ctx, scrutinee, w0), Sum, scrutinee)
                C = self.synth(ctx.extend(x, sum_.left, w0), left, w)
                self.check(ctx.extend(y, sum_.right, w0), right, C, w)
                return C
            case LBox(home, value):
                self.world(ctx, home)
                return At(self.synth(ctx, value, home), home)
            case LLetA(var, boxed, body, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                at = self.expect(self.synth(ctx, boxed, w0), At, boxed)
                return self.synth(ctx.extend(var, at.type, at.world), body, w)
            case LWLam(body, hint):
                return Forall(self.synth(ctx.extend_world(), body, shift_world(w)), hint)
            case LWApp(fn, at_world):
                self.world(ctx, at_world)
                forall = self.expect(self.synth(ctx, fn, w), Forall, fn)
                return subst_world(forall.body, at_world)
            case LUnpack(var, package, body, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                exists = self.expect(self.synth(ctx, package, w0), Exists, package)
                inner = ctx.extend_world().extend(var, exists.body, shift_world(w0))
                B = self.synth(inner, body, shift_world(w))
                if mentions_world(B, 0):
                    raise L5TypeError(F"Unpacked world escapes in {B}")
                return shift(B, -1)
            case LPrim(op, left, right):
                arg_t, result_t = BINOPS[op]
                self.check(ctx, left, arg_t, w)
                self.check(ctx, right, arg_t, w)
                return result_t
            case LAnno(term, A):
                self.check(ctx, term, self.wf(ctx, A), w)
                return A
            case LRet(value):
                return Lax(self.synth(ctx, value, w))
            case LBind(var, bound, body, ann):
                if ann is not None:
                    self.check(ctx, bound, Lax(self.wf(ctx, ann)), w)
                    A = ann
                else:
                    A = self.expect(self.synth(ctx, bound, w), Lax, bound).type
                B = self.synth(ctx.extend(var, A, w), body, w)
                self.expect(B, Lax, body)
                return B
            case LGet(target, body, ann):
                self.world(ctx, target)
                self.wf(ctx, ann)
                if not mobile(ann):
                    raise L5TypeError(F"mget of non-mobile type {ann}")
                self.check(ctx, body, Lax(ann), target)
                return Lax(ann)
            case LRef(init, cell):
                self.check(ctx, init, self.wf(ctx, cell), w)
                return Lax(Ref(cell))
            case LDeref(ref):
                return Lax(self.expect(self.synth(ctx, ref, w), Ref, ref).type)
            case LAssign(ref, value):
                cell = self.expect(self.synth(ctx, ref, w), Ref, ref)
                self.check(ctx, value, cell.type, w)
                return Lax(UNIT)
            case LPrint(arg):
                self.expect(self.synth(ctx, arg, w), Base, arg)
                return Lax(UNIT)
            case LInl() | LInr() | LPack():
                raise L5TypeError(F"Cannot infer the type of {t}; annotate it")
        raise L5TypeError(F"Not an L5 term: {t!r}")

    def check(self, ctx: Ctx, t: L5Term, B: ModalType, w: World) -> None:
        match t:
            case LInl(value):
                self.check(ctx, value, self.expect(B, Sum, t).left, w)
            case LInr(value):
                self.check(ctx, value, self.expect(B, Sum, t).right, w)
            case LPack(witness, value):
                self.world(ctx, witness)
                self.check(ctx, value, subst_world(self.expect(B, Exists, t).body, witness), w)
            case LPair(left, right):
                prod = self.expect(B, Prod, t)
                self.check(ctx, left, prod.left, w)
                self.check(ctx, right, prod.right, w)
            case LRet(value):
                self.check(ctx, value, self.expect(B, Lax, t).type, w)
            case LBox(home, value):
                at = self.expect(B, At, t)
                if at.world != self.world(ctx, home):
                    raise L5TypeError(F"Box at {home} checked against {B}")
                self.check(ctx, value, at.type, home)
            case LWLam(body):
                self.check(ctx.extend_world(), body, self.expect(B, Forall, t).body,
                           shift_world(w))
            case LLam(var, dom, body, cod) if cod is None:
                arrow = self.expect(B, Arrow, t)
                if arrow.dom != dom:
                    raise L5TypeError(F"Mismatch: expected argument {arrow.dom}, found {dom}")
                self.check(ctx.extend(var, dom, w), body, arrow.cod, w)
            case LCase(scrutinee, x, left, y, right, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                sum_ = self.expect(self.synth(ctx, scrutinee, w0), Sum, scrutinee)
                self.check(ctx.extend(x, sum_.left, w0), left, B, w)
                self.check(ctx.extend(y, sum_.right, w0), right, B, w)
            case LSplit(scrutinee, x, y, body, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                prod = self.expect(self.synth(ctx, scrutinee, w0), Prod, scrutinee)
                self.check(ctx.extend(x, prod.left, w0).extend(y, prod.right, w0), body, B, w)
            case LLetA(var, boxed, body, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                at = self.expect(self.synth(ctx, boxed, w0), At, boxed)
                self.check(ctx.extend(var, at.type, at.world), body, B, w)
            case LUnpack(var, package, body, at_world):
                w0 = self.world(ctx, at_world if at_world is not None else w)
                exists = self.expect(self.synth(ctx, package, w0), Exists, package)
                inner = ctx.extend_world().extend(var, exists.body, shift_world(w0))
                self.check(inner, body, shift(B), shift_world(w))
            case LBind(var, bound, body, ann):
                if ann is not None:
                    self.check(ctx, bound, Lax(self.wf(ctx, ann)), w)
                    A = ann
                else:
                    A = self.expect(self.synth(ctx, bound, w), Lax, bound).type
                self.expect(B, Lax, t)
                self.check(ctx.extend(var, A, w), body, B, w)
            case _:
                found = self.synth(ctx, t, w)
                if found != B:
                    raise L5TypeError(F"Mismatch: expected {B}, found {found} for {t}")

def l5_diagnose(ctx: Ctx, t: L5Term, B: ModalType, w: World,
                sites: Sequence[str] | None = None) -> None:
    'Check `t : B <w>`, raising `L5TypeError` with the first failure.'
    _L5Checker(sites).check(ctx, t, B, w)

def l5_check(ctx: Ctx, t: L5Term, B: ModalType, w: World,
             sites: Sequence[str] | None = None) -> bool:
    try:
        l5_diagnose(ctx, t, B, w, sites)
    except L5TypeError:
        return False
    return True

def l5_synth(ctx: Ctx, t: L5Term, w: World) -> ModalType:
    return _L5Checker().synth(ctx, t, w)

# ------------------------------------------------------ Kripke semantics

class SemType:
    'Shape of the runtime values inhabiting a type at a world'

@dataclass(frozen=True)
class SemBase(SemType):
    name: str

@dataclass(frozen=True)
class SemFun(SemType):
    dom: ModalType
    cod: ModalType
    world: str

@dataclass(frozen=True)
class SemProd(SemType):
    left: SemType
    right: SemType

@dataclass(frozen=True)
class SemSum(SemType):
    left: SemType
    right: SemType

@dataclass(frozen=True)
class SemAll(SemType):
    'One shape per configured site'
    cases: tuple[tuple[str, SemType], ...]

@dataclass(frozen=True)
class SemSome(SemType):
    cases: tuple[tuple[str, SemType], ...]

@dataclass(frozen=True)
class SemComp(SemType):
    result: ModalType
    world: str

@dataclass(frozen=True)
class SemRef(SemType):
    world: str
    cell: ModalType

def _site(w: World) -> str:
    if not isinstance(w, WConst):
        raise ValueError(F"Open world {w} has no interpretation")
    return w.name

def interp(A: ModalType, w: World, sites: Sequence[str]) -> SemType:
    'The Kripke interpretation of a closed HL5 type at a site.'
    here = _site(w)
    match A:
        case Base(name):
            return SemBase(name)
        case Arrow(dom, cod):
            return SemFun(dom, cod, here)
        case Prod(left, right):
            return SemProd(interp(left, w, sites), interp(right, w, sites))
        case Sum(left, right):
            return SemSum(interp(left, w, sites), interp(right, w, sites))
        case At(inner, home):
            return interp(inner, home, sites)
        case Forall(body):
            return SemAll(tuple((s, interp(subst_world(body, WConst(s)), w, sites))
                                for s in sites))
        case Exists(body):
            return SemSome(tuple((s, interp(subst_world(body, WConst(s)), w, sites))
                                 for s in sites))
        case Lax(inner):
            return SemComp(inner, here)
        case Ref(cell):
            return SemRef(here, cell)
    raise ValueError(F"Not an HL5 type: {A}")

def classify(v: Any, A: ModalType, w: World, sites: Sequence[str]) -> bool:
    '''Whether runtime value `v` inhabits `interp(A, w)`.

    Functions and computations are judged by their tags.'''
    from .values import VBox, VClosure, VComp, VInl, VInr, VPack, VPair, VRef, world_function
    here = _site(w)
    match A:
        case Base('int'):
            return isinstance(v, int) and not isinstance(v, bool)
        case Base('string'):
            return isinstance(v, str)
        case Base('unit'):
            return v is None
        case Arrow(dom, cod):
            return (isinstance(v, VClosure) and v.world == here
                    and v.dom == dom and v.cod in (None, cod))
        case Prod(left, right):
            return (isinstance(v, VPair) and classify(v.left, left, w, sites)
                    and classify(v.right, right, w, sites))
        case Sum(left, right):
            if isinstance(v, VInl):
                return classify(v.value, left, w, sites)
            if isinstance(v, VInr):
                return classify(v.value, right, w, sites)
            return False
        case At(inner, home):
            return (isinstance(v, VBox) and v.home == _site(home)
                    and classify(v.value, inner, home, sites))
        case Forall(body):
            fn = world_function(v)
            return fn is not None and all(
                classify(fn.at(s), subst_world(body, WConst(s)), w, sites) for s in sites)
        case Exists(body):
            return (isinstance(v, VPack) and v.site in sites
                    and classify(v.value, subst_world(body, WConst(v.site)), w, sites))
        case Lax():
            return isinstance(v, VComp) and v.world == here
        case Ref(cell):
            return isinstance(v, VRef) and v.site == here and v.cell == cell
    return False
