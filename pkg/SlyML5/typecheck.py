'''Decides the ML5 judgements `v :: A [w]` and `e : A [w]`.

Checking is bidirectional: every binder carries its type, elimination
forms synthesize, and `get` names its target world. The checker runs in
one of two modes. Classic mode has the tethered `case` and a primitive
`⌘`; revised mode adds untethered eliminations on values (`vcase`,
`vsplit`, value-level `leta`) and expects `⌘` to be desugared away.'''
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
import logging

from .syntax import *

log = logging.getLogger(__name__)

class Mode(Enum):
    CLASSIC = 'classic'
    REVISED = 'revised'

class Kind(Enum):
    VALUE = 'value'
    EXPR = 'expr'

class Reason(Enum):
    WORLD_MISMATCH = 'WorldMismatch'
    NOT_MOBILE = 'NotMobile'
    NOT_A_VALUE = 'NotAValue'
    UNBOUND_VARIABLE = 'UnboundVariable'
    CONNECTIVE_MISMATCH = 'ConnectiveMismatch'
    TETHERING_VIOLATION = 'TetheringViolation'

class ML5TypeError(TypeError):
    'A violated side condition of an ML5 typing rule'
    reason: Reason
    expected: str
    found: str
    location: Pos | None
    decl: str | None

    def __init__(self, reason: Reason, found: str, expected: str = '',
                 location: Pos | None = None):
        self.reason = reason
        self.found = found
        self.expected = expected
        self.location = location
        self.decl = None
        super().__init__()

    def __str__(self) -> str:
        msg = F"{self.reason.value}: {self.found}"
        if self.expected:
            msg += F" (expected {self.expected})"
        where = [str(x) for x in (self.decl, self.location) if x is not None]
        if where:
            msg += F" at {':'.join(where)}"
        return msg

@dataclass(frozen=True)
class Judgement:
    kind: Kind
    ctx: Ctx
    term: Term
    type: ModalType
    world: World

@dataclass(frozen=True)
class Derivation:
    'A typing derivation: the conclusion, the rule used and its premises.'
    root: Judgement
    rule: str
    premises: tuple['Derivation', ...] = ()

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()

@dataclass(frozen=True)
class Decl:
    name: str
    type: ModalType
    world: World
    term: Term
    pos: Pos | None = field(default=None, compare=False)

@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...] = ()
    worlds: tuple[str, ...] = ()

def _show(x: object) -> str:
    return str(x)

class Checker:
    'ML5 typing rules for one mode and site set'
    mode: Mode
    sites: frozenset[str] | None

    def __init__(self, mode: Mode = Mode.CLASSIC, sites: Sequence[str] | None = None):
        self.mode = mode
        self.sites = frozenset(sites) if sites is not None else None

    # -- helpers

    def _world(self, ctx: Ctx, w: World) -> None:
        if not wf_world(ctx.delta, w):
            raise ML5TypeError(Reason.UNBOUND_VARIABLE, F"world {w}", 'a bound world')
        if self.sites is not None and isinstance(w, WConst) and w.name not in self.sites:
            raise ML5TypeError(Reason.UNBOUND_VARIABLE, F"world {w}",
                               F"one of {', '.join(sorted(self.sites))}")

    def _type(self, ctx: Ctx, A: ModalType) -> None:
        for w, depth in iter_worlds(A):
            if not wf_world(ctx.delta + depth, w):
                raise ML5TypeError(Reason.UNBOUND_VARIABLE, F"world {w} in {A}")
            if self.sites is not None and isinstance(w, WConst) and w.name not in self.sites:
                raise ML5TypeError(Reason.UNBOUND_VARIABLE, F"world {w} in {A}")
        if self.mode is Mode.REVISED and any(isinstance(t, Shamrock) for t in _subtypes(A)):
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(A),
                               'no shamrock after desugaring')

    def _revised_only(self, t: Term) -> None:
        if self.mode is not Mode.REVISED:
            raise ML5TypeError(Reason.TETHERING_VIOLATION, _describe(t),
                               'untethered elimination, available in revised mode')

    def _classic_only(self, t: Term) -> None:
        if self.mode is not Mode.CLASSIC:
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, _describe(t),
                               'no shamrock after desugaring')

    @staticmethod
    def _expect(A: ModalType | None, cls: type[TypeT], t: Term) -> TypeT | None:
        if A is None:
            return None
        if not isinstance(A, cls):
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, F"{_describe(t)} : {A}",
                               F"a type built with {cls.__name__}")
        return A

    @staticmethod
    def _synth_only(A: ModalType | None, t: Term, what: str) -> None:
        if A is None:
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, F"cannot infer the type of {what}",
                               'a type annotation')

    @staticmethod
    def _conclude(kind: Kind, ctx: Ctx, t: Term, found: ModalType, w: World,
                  expected: ModalType | None, rule: str,
                  *premises: Derivation) -> Derivation:
        if expected is not None and expected != found:
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(found), str(expected))
        return Derivation(Judgement(kind, ctx, t, found, w), rule, premises)

    @staticmethod
    def _hyp(ctx: Ctx, name: str, w: World) -> Hyp:
        hyp = ctx.lookup(name)
        if hyp is None:
            raise ML5TypeError(Reason.UNBOUND_VARIABLE, name)
        if hyp.world != w:
            raise ML5TypeError(Reason.WORLD_MISMATCH, F"{name} lives at {hyp.world}", str(w))
        return hyp

    # -- values

    def value(self, ctx: Ctx, v: Term, A: ModalType | None, w: World) -> Derivation:
        'Check `v :: A [w]`, or synthesize `A` when it is `None`.'
        try:
            return self._value(ctx, v, A, w)
        except ML5TypeError as err:
            if err.location is None:
                err.location = v.pos
            raise

    def _value(self, ctx: Ctx, v: Term, A: ModalType | None, w: World) -> Derivation:
        if not is_value(v):
            raise ML5TypeError(Reason.NOT_A_VALUE, _describe(v), 'a value')
        V = Kind.VALUE
        match v:
            case Var(name):
                hyp = self._hyp(ctx, name, w)
                return self._conclude(V, ctx, v, hyp.type, w, A, 'var')

            case Lit(value):
                return self._conclude(V, ctx, v, _literal_type(value), w, A, 'lit')

            case Lam(var, dom, body):
                self._type(ctx, dom)
                arrow = self._expect(A, Arrow, v)
                if arrow is not None and arrow.dom != dom:
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, F"lam {var} : {dom}",
                                       F"argument type {arrow.dom}")
                d = self.expr(ctx.extend(var, dom, w), body,
                              arrow.cod if arrow else None, w)
                return self._conclude(V, ctx, v, Arrow(dom, d.root.type), w, A, 'lam', d)

            case Pair(left, right):
                prod = self._expect(A, Prod, v)
                dl = self.value(ctx, left, prod.left if prod else None, w)
                dr = self.value(ctx, right, prod.right if prod else None, w)
                return self._conclude(V, ctx, v, Prod(dl.root.type, dr.root.type), w, A,
                                      'pair', dl, dr)

            case Inl(inner) | Inr(inner):
                self._synth_only(A, v, _describe(v))
                sum_ = self._expect(A, Sum, v)
                assert sum_ is not None
                left = isinstance(v, Inl)
                d = self.value(ctx, inner, sum_.left if left else sum_.right, w)
                return self._conclude(V, ctx, v, sum_, w, A, 'inl' if left else 'inr', d)

            case Hold(home, inner):
                self._world(ctx, home)
                at = self._expect(A, At, v)
                if at is not None and at.world != home:
                    raise ML5TypeError(Reason.WORLD_MISMATCH, F"hold[{home}]", str(at.world))
                d = self.value(ctx, inner, at.type if at else None, home)
                return self._conclude(V, ctx, v, At(d.root.type, home), w, A, 'hold', d)

            case WLam(body, hint):
                forall = self._expect(A, Forall, v)
                d = self.value(ctx.extend_world(), body, forall.body if forall else None,
                               shift_world(w))
                return self._conclude(V, ctx, v, Forall(d.root.type, hint), w, A, 'wlam', d)

            case WApp(fn, at_world):
                self._world(ctx, at_world)
                d = self.value(ctx, fn, None, w)
                forall = d.root.type
                if not isinstance(forall, Forall):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(forall), 'a forall type')
                return self._conclude(V, ctx, v, subst_world(forall.body, at_world), w, A,
                                      'wapp', d)

            case Pack(witness, inner):
                self._world(ctx, witness)
                self._synth_only(A, v, 'pack')
                exists = self._expect(A, Exists, v)
                assert exists is not None
                d = self.value(ctx, inner, subst_world(exists.body, witness), w)
                return self._conclude(V, ctx, v, exists, w, A, 'pack', d)

            case Sham(body, hint):
                self._classic_only(v)
                sham = self._expect(A, Shamrock, v)
                d = self.value(ctx.extend_world(), body,
                               shift(sham.type) if sham else None, WVar(0, hint))
                if mentions_world(d.root.type, 0):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(d.root.type),
                                       'a type that does not mention the bound world')
                return self._conclude(V, ctx, v, Shamrock(shift(d.root.type, -1)), w, A,
                                      'sham', d)

            case Unsham(inner):
                self._classic_only(v)
                d = self.value(ctx, inner, None, w)
                sham = d.root.type
                if not isinstance(sham, Shamrock):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(sham), 'a shamrock type')
                return self._conclude(V, ctx, v, sham.type, w, A, 'unsham', d)

            case Anno(inner, B):
                self._type(ctx, B)
                d = self.value(ctx, inner, B, w)
                return self._conclude(V, ctx, v, B, w, A, 'anno-value', d)

            case LetA():
                self._revised_only(v)
                return self._leta(V, ctx, v, A, w)

            case VCase():
                return self.value_case(ctx, v, A, w)

            case VSplit():
                self._revised_only(v)
                return self._vsplit(V, ctx, v, A, w)

        raise ML5TypeError(Reason.NOT_A_VALUE, _describe(v), 'a value')

    # -- shared eliminations

    def _leta(self, kind: Kind, ctx: Ctx, t: LetA, A: ModalType | None, w: World) -> Derivation:
        w0 = t.world if t.world is not None else w
        self._world(ctx, w0)
        ds = self.value(ctx, t.boxed, None, w0)
        at = ds.root.type
        if not isinstance(at, At):
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(at), 'an at type')
        inner = ctx.extend(t.var, at.type, at.world)
        db = self._sub(kind, inner, t.body, A, w)
        rule = 'leta-value' if kind is Kind.VALUE else 'leta'
        return self._conclude(kind, ctx, t, db.root.type, w, A, rule, ds, db)

    def _vsplit(self, kind: Kind, ctx: Ctx, t: VSplit, A: ModalType | None, w: World) -> Derivation:
        w0 = t.world if t.world is not None else w
        self._world(ctx, w0)
        ds = self.value(ctx, t.scrutinee, None, w0)
        prod = ds.root.type
        if not isinstance(prod, Prod):
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(prod), 'a product type')
        inner = ctx.extend(t.left_var, prod.left, w0).extend(t.right_var, prod.right, w0)
        db = self._sub(kind, inner, t.body, A, w)
        rule = 'vsplit-value' if kind is Kind.VALUE else 'vsplit'
        return self._conclude(kind, ctx, t, db.root.type, w, A, rule, ds, db)

    def _sub(self, kind: Kind, ctx: Ctx, t: Term, A: ModalType | None, w: World) -> Derivation:
        if kind is Kind.VALUE:
            return self.value(ctx, t, A, w)
        return self.expr(ctx, t, A, w)

    def value_case(self, ctx: Ctx, v: VCase, C: ModalType | None, w: World) -> Derivation:
        '''The untethered sum elimination on a value scrutinee.

        The scrutinee lives at `v.world` (default: `w`); the branches and
        the conclusion live at `w`. Branches are values when the whole
        case is a value, expressions otherwise.'''
        try:
            self._revised_only(v)
            kind = Kind.VALUE if is_value(v) else Kind.EXPR
            w0 = v.world if v.world is not None else w
            self._world(ctx, w0)
            ds = self.value(ctx, v.scrutinee, None, w0)
            sum_ = ds.root.type
            if not isinstance(sum_, Sum):
                raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(sum_), 'a sum type')
            dl = self._sub(kind, ctx.extend(v.left_var, sum_.left, w0), v.left, C, w)
            dr = self._sub(kind, ctx.extend(v.right_var, sum_.right, w0), v.right,
                           dl.root.type, w)
            rule = 'vcase-value' if kind is Kind.VALUE else 'vcase'
            return self._conclude(kind, ctx, v, dl.root.type, w, C, rule, ds, dl, dr)
        except ML5TypeError as err:
            if err.location is None:
                err.location = v.pos
            raise

    # -- expressions

    def expr(self, ctx: Ctx, e: Term, A: ModalType | None, w: World) -> Derivation:
        'Check `e : A [w]`, or synthesize `A` when it is `None`.'
        try:
            return self._expr(ctx, e, A, w)
        except ML5TypeError as err:
            if err.location is None:
                err.location = e.pos
            raise

    def _expr(self, ctx: Ctx, e: Term, A: ModalType | None, w: World) -> Derivation:
        E = Kind.EXPR
        if is_value(e):
            raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, F"value {_describe(e)}",
                               'an expression (wrap values in ret)')
        match e:
            case Ret(v):
                d = self.value(ctx, v, A, w)
                return self._conclude(E, ctx, e, d.root.type, w, A, 'ret', d)

            case Let(var, bound, body, ann):
                if ann is not None:
                    self._type(ctx, ann)
                d1 = self.expr(ctx, bound, ann, w)
                d2 = self.expr(ctx.extend(var, d1.root.type, w), body, A, w)
                return self._conclude(E, ctx, e, d2.root.type, w, A, 'let', d1, d2)

            case App(fn, arg):
                df = self.expr(ctx, fn, None, w)
                arrow = df.root.type
                if not isinstance(arrow, Arrow):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(arrow), 'a function type')
                da = self.expr(ctx, arg, arrow.dom, w)
                return self._conclude(E, ctx, e, arrow.cod, w, A, 'app', df, da)

            case Fst(pair) | Snd(pair):
                d = self.expr(ctx, pair, None, w)
                prod = d.root.type
                if not isinstance(prod, Prod):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(prod), 'a product type')
                first = isinstance(e, Fst)
                return self._conclude(E, ctx, e, prod.left if first else prod.right, w, A,
                                      'fst' if first else 'snd', d)

            case Case(scrutinee, left_var, left, right_var, right, at_world):
                if at_world is not None and at_world != w:
                    raise ML5TypeError(Reason.TETHERING_VIOLATION,
                                       F"case scrutinee at {at_world}", F"the case world {w}")
                ds = self.expr(ctx, scrutinee, None, w)
                sum_ = ds.root.type
                if not isinstance(sum_, Sum):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(sum_), 'a sum type')
                dl = self.expr(ctx.extend(left_var, sum_.left, w), left, A, w)
                dr = self.expr(ctx.extend(right_var, sum_.right, w), right, dl.root.type, w)
                return self._conclude(E, ctx, e, dl.root.type, w, A, 'case', ds, dl, dr)

            case VCase():
                return self.value_case(ctx, e, A, w)

            case VSplit():
                self._revised_only(e)
                return self._vsplit(E, ctx, e, A, w)

            case LetA(_, _, _, at_world):
                if at_world is not None and at_world != w:
                    self._revised_only(e)
                return self._leta(E, ctx, e, A, w)

            case Get(target, body):
                self._world(ctx, target)
                d = self.expr(ctx, body, A, target)
                if not mobile(d.root.type):
                    raise ML5TypeError(Reason.NOT_MOBILE, str(d.root.type), 'a mobile type')
                return self._conclude(E, ctx, e, d.root.type, w, A, 'get', d)

            case Unpack(var, package, body, hint):
                dp = self.value(ctx, package, None, w)
                exists = dp.root.type
                if not isinstance(exists, Exists):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(exists), 'an exists type')
                inner = ctx.extend_world().extend(var, exists.body, shift_world(w))
                db = self.expr(inner, body, shift(A) if A is not None else None,
                               shift_world(w))
                if mentions_world(db.root.type, 0):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH,
                                       F"{db.root.type} mentions the unpacked world",
                                       'a type independent of the witness')
                return self._conclude(E, ctx, e, shift(db.root.type, -1), w, A,
                                      'unpack', dp, db)

            case MkRef(init):
                ref = self._expect(A, Ref, e)
                d = self.expr(ctx, init, ref.type if ref else None, w)
                return self._conclude(E, ctx, e, Ref(d.root.type), w, A, 'ref', d)

            case Deref(target):
                d = self.expr(ctx, target, None, w)
                ref = d.root.type
                if not isinstance(ref, Ref):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(ref), 'a ref type')
                return self._conclude(E, ctx, e, ref.type, w, A, 'deref', d)

            case Assign(target, value):
                dr = self.expr(ctx, target, None, w)
                ref = dr.root.type
                if not isinstance(ref, Ref):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(ref), 'a ref type')
                dv = self.expr(ctx, value, ref.type, w)
                return self._conclude(E, ctx, e, UNIT, w, A, 'assign', dr, dv)

            case Print(arg):
                d = self.expr(ctx, arg, None, w)
                if not isinstance(d.root.type, Base):
                    raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, str(d.root.type), 'a base type')
                return self._conclude(E, ctx, e, UNIT, w, A, 'print', d)

            case BinOp(op, left, right):
                arg_t, result_t = BINOPS[op]
                dl = self.expr(ctx, left, arg_t, w)
                dr = self.expr(ctx, right, arg_t, w)
                return self._conclude(E, ctx, e, result_t, w, A, 'binop', dl, dr)

            case Anno(inner, B):
                self._type(ctx, B)
                d = self.expr(ctx, inner, B, w)
                return self._conclude(E, ctx, e, B, w, A, 'anno', d)

        raise ML5TypeError(Reason.CONNECTIVE_MISMATCH, _describe(e), 'an expression')

def _subtypes(A: ModalType):
    yield A
    for value in vars(A).values():
        if isinstance(value, ModalType):
            yield from _subtypes(value)

def _literal_type(value: Literal) -> Base:
    if value is None:
        return UNIT
    if isinstance(value, str):
        return STRING
    return INT

def _describe(t: Term) -> str:
    text = str(t)
    return text if len(text) <= 60 else text[:57] + '...'

def check_value(ctx: Ctx, v: Term, A: ModalType, w: World,
                mode: Mode = Mode.CLASSIC) -> Derivation:
    return Checker(mode).value(ctx, v, A, w)

def check_expr(ctx: Ctx, e: Term, A: ModalType, w: World,
               mode: Mode = Mode.CLASSIC) -> Derivation:
    return Checker(mode).expr(ctx, e, A, w)

def check_value_case(ctx: Ctx, v: VCase, C: ModalType, w: World,
                     mode: Mode = Mode.REVISED) -> Derivation:
    return Checker(mode).value_case(ctx, v, C, w)

def program_context(program: Program) -> Ctx:
    ctx = Ctx()
    for decl in program.decls:
        ctx = ctx.extend(decl.name, decl.type, decl.world)
    return ctx

def check_program(program: Program, mode: Mode = Mode.CLASSIC,
                  sites: Sequence[str] | None = None) -> list[Derivation]:
    '''Check declarations in order, each seeing the ones before it.

    In revised mode `⌘` is desugared first, which makes revised mode a
    superset of classic mode. Raises the first `ML5TypeError`.'''
    if mode is Mode.REVISED:
        from .translate import desugar_shamrock
        program = desugar_shamrock(program)
    checker = Checker(mode, sites)
    if sites is not None:
        for name in program.worlds:
            if name not in sites:
                raise ML5TypeError(Reason.UNBOUND_VARIABLE, F"world {name}",
                                   'a configured site')
    ctx = Ctx()
    derivations: list[Derivation] = []
    for decl in program.decls:
        try:
            if not isinstance(decl.world, WConst):
                raise ML5TypeError(Reason.UNBOUND_VARIABLE, F"world {decl.world}", 'a site')
            checker._world(ctx, decl.world)
            checker._type(ctx, decl.type)
            d = checker.expr(ctx, decl.term, decl.type, decl.world)
        except ML5TypeError as err:
            err.decl = decl.name
            if err.location is None:
                err.location = decl.pos
            raise
        log.debug("checked %s : %s [%s] (%s)", decl.name, decl.type, decl.world, d.rule)
        derivations.append(d)
        ctx = ctx.extend(decl.name, decl.type, decl.world)
    return derivations
