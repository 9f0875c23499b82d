'''The monadic translation from ML5 to L5, and the elaborations between
the classic and revised languages.

Values `v :: A [w]` become pure L5 terms of type `A* <w>`; expressions
`e : A [w]` become computations of type `◯A* <w>`. Translation is
directed by typing derivations, so each clause knows the types and
worlds of its premises.'''
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
import logging
from typing import Any

from .hl5 import *
from .syntax import *
from .typecheck import (Checker, Decl, Derivation, Kind, ML5TypeError, Mode, Program,
                        Reason, check_program)

log = logging.getLogger(__name__)

def trans_type(A: ModalType) -> ModalType:
    'The type translation `A*`: `◯` on function codomains, `⌘` as `∀ω. A* at ω`.'
    match A:
        case Base():
            return A
        case Arrow(dom, cod):
            return Arrow(trans_type(dom), Lax(trans_type(cod)))
        case Prod(left, right):
            return Prod(trans_type(left), trans_type(right))
        case Sum(left, right):
            return Sum(trans_type(left), trans_type(right))
        case At(inner, w):
            return At(trans_type(inner), w)
        case Forall(body, hint):
            return Forall(trans_type(body), hint)
        case Exists(body, hint):
            return Exists(trans_type(body), hint)
        case Ref(inner):
            return Ref(trans_type(inner))
        case Shamrock(inner):
            return Forall(At(shift(trans_type(inner)), WVar(0, 'ω')), 'ω')
    raise TypeError(F"Not an ML5 type: {A}")

def trans_ctx(ctx: Ctx) -> Ctx:
    return Ctx(ctx.delta, tuple(Hyp(h.name, trans_type(h.type), h.world) for h in ctx.entries))

@dataclass(frozen=True)
class TransResult:
    l5term: L5Term
    l5type: ModalType
    world: World

@dataclass(frozen=True)
class CoreDecl:
    'A translated declaration: a computation of type `type` to run at `world`.'
    name: str
    term: L5Term
    type: ModalType
    world: World

class Translator:
    counter: int

    def __init__(self):
        self.counter = 0

    def fresh(self, base: str) -> str:
        # source names never start with an underscore
        self.counter += 1
        return F"_{base}{self.counter}"

    def _bind(self, base: str, d: Derivation, rest: Callable[[LVar], L5Term]) -> L5Term:
        'Run the computation for `d`, then continue with its result.'
        x = self.fresh(base)
        return LBind(x, self.expr(d), rest(LVar(x)), trans_type(d.root.type))

    def value(self, d: Derivation) -> L5Term:
        t, A, w = d.root.term, d.root.type, d.root.world
        ps = d.premises
        match d.rule, t:
            case 'var', Var(name):
                return LVar(name)
            case 'lit', Lit(value):
                return LLit(value)
            case 'lam', Lam(var, dom):
                assert isinstance(A, Arrow)
                return LLam(var, trans_type(dom), self.expr(ps[0]), Lax(trans_type(A.cod)))
            case 'pair', _:
                return LPair(self.value(ps[0]), self.value(ps[1]))
            case 'inl', _:
                return LAnno(LInl(self.value(ps[0])), trans_type(A))
            case 'inr', _:
                return LAnno(LInr(self.value(ps[0])), trans_type(A))
            case 'hold', Hold(home):
                return LBox(home, self.value(ps[0]))
            case 'wlam', WLam(_, hint):
                return LWLam(self.value(ps[0]), hint)
            case 'wapp', WApp(_, at_world):
                return LWApp(self.value(ps[0]), at_world)
            case 'pack', Pack(witness):
                return LAnno(LPack(witness, self.value(ps[0])), trans_type(A))
            case 'sham', Sham(_, hint):
                return LWLam(LBox(WVar(0, hint), self.value(ps[0])), hint)
            case 'unsham', _:
                x = self.fresh('u')
                return LLetA(x, LWApp(self.value(ps[0]), w), LVar(x), w)
            case 'anno-value', _:
                return self.value(ps[0])
            case 'leta-value', LetA(var, _, _, at_world):
                return LLetA(var, self.value(ps[0]), self.value(ps[1]), at_world)
            case 'vcase-value', VCase(_, x, _, y, _, at_world):
                return LCase(self.value(ps[0]), x, self.value(ps[1]), y, self.value(ps[2]), at_world)
            case 'vsplit-value', VSplit(_, x, y, _, at_world):
                return LSplit(self.value(ps[0]), x, y, self.value(ps[1]), at_world)
        raise ValueError(F"Not a value derivation: {d.rule}")

    def expr(self, d: Derivation) -> L5Term:
        t, A = d.root.term, d.root.type
        ps = d.premises
        match d.rule, t:
            case 'ret', _:
                return LRet(self.value(ps[0]))
            case 'let', Let(var):
                return LBind(var, self.expr(ps[0]), self.expr(ps[1]), trans_type(ps[0].root.type))
            case 'app', _:
                return self._bind('f', ps[0], lambda f:
                       self._bind('a', ps[1], lambda a: LApp(f, a)))
            case 'fst', _:
                return self._bind('p', ps[0], lambda p: LRet(LFst(p)))
            case 'snd', _:
                return self._bind('p', ps[0], lambda p: LRet(LSnd(p)))
            case 'case', Case(_, x, _, y, _):
                # the scrutinee is effectful, so sequence it first
                return self._bind('s', ps[0], lambda s:
                       LCase(s, x, self.expr(ps[1]), y, self.expr(ps[2])))
            case 'vcase', VCase(_, x, _, y, _, at_world):
                return LCase(self.value(ps[0]), x, self.expr(ps[1]), y, self.expr(ps[2]), at_world)
            case 'vsplit', VSplit(_, x, y, _, at_world):
                return LSplit(self.value(ps[0]), x, y, self.expr(ps[1]), at_world)
            case 'get', Get(target):
                return LGet(target, self.expr(ps[0]), trans_type(A))
            case 'leta', LetA(var, _, _, at_world):
                return LLetA(var, self.value(ps[0]), self.expr(ps[1]), at_world)
            case 'unpack', Unpack(var, _, _, hint):
                return LUnpack(var, self.value(ps[0]), self.expr(ps[1]), None, hint)
            case 'ref', _:
                return self._bind('i', ps[0], lambda i: LRef(i, trans_type(ps[0].root.type)))
            case 'deref', _:
                return self._bind('r', ps[0], lambda r: LDeref(r))
            case 'assign', _:
                return self._bind('r', ps[0], lambda r:
                       self._bind('v', ps[1], lambda v: LAssign(r, v)))
            case 'print', _:
                return self._bind('x', ps[0], lambda x: LPrint(x))
            case 'binop', BinOp(op):
                return self._bind('l', ps[0], lambda l:
                       self._bind('r', ps[1], lambda r: LRet(LPrim(op, l, r))))
            case 'anno', _:
                return self.expr(ps[0])
        raise ValueError(F"Not an expression derivation: {d.rule}")

def trans_value(d: Derivation, translator: Translator | None = None) -> TransResult:
    if d.root.kind is not Kind.VALUE:
        raise ValueError(F"Expected a value derivation, found {d.rule}")
    term = (translator or Translator()).value(d)
    return TransResult(term, trans_type(d.root.type), d.root.world)

def trans_expr(d: Derivation, translator: Translator | None = None) -> TransResult:
    if d.root.kind is not Kind.EXPR:
        raise ValueError(F"Expected an expression derivation, found {d.rule}")
    term = (translator or Translator()).expr(d)
    return TransResult(term, Lax(trans_type(d.root.type)), d.root.world)

def translate_program(program: Program, mode: Mode = Mode.CLASSIC,
                      sites: Sequence[str] | None = None) -> list[CoreDecl]:
    '''Typecheck and translate every declaration.

    Each declaration becomes a computation; the value it returns is what
    later declarations see under its name.'''
    if mode is Mode.REVISED:
        program = desugar_shamrock(program)
    derivations = check_program(program, mode, sites)
    translator = Translator()
    out = []
    for decl, d in zip(program.decls, derivations):
        result = trans_expr(d, translator)
        log.debug("translated %s : %s <%s>", decl.name, result.l5type, result.world)
        out.append(CoreDecl(decl.name, result.l5term, result.l5type, decl.world))
    return out

def core_context(decls: Sequence[CoreDecl]) -> Ctx:
    'The L5 context later declarations are checked in'
    ctx = Ctx()
    for decl in decls:
        assert isinstance(decl.type, Lax)
        ctx = ctx.extend(decl.name, decl.type.type, decl.world)
    return ctx

# ------------------------------------------------------ shamrock removal

def _has_shamrock_type(A: ModalType | None) -> bool:
    match A:
        case None | Base():
            return False
        case Shamrock():
            return True
        case _:
            return any(_has_shamrock_type(x) for x in vars(A).values()
                       if isinstance(x, ModalType))

def _has_shamrock(t: Node) -> bool:
    if isinstance(t, (Sham, Unsham)):
        return True
    for _, value in node_fields(t):
        if isinstance(value, Node) and _has_shamrock(value):
            return True
        if isinstance(value, ModalType) and _has_shamrock_type(value):
            return True
    return False

def desugar_type(A: ModalType) -> ModalType:
    'Replace every `shamrock B` by `forall ω. B at ω`.'
    match A:
        case Shamrock(inner):
            return Forall(At(shift(desugar_type(inner)), WVar(0, 'ω')), 'ω')
        case Base():
            return A
        case At(inner, w):
            return At(desugar_type(inner), w)
        case Forall(body, hint):
            return Forall(desugar_type(body), hint)
        case Exists(body, hint):
            return Exists(desugar_type(body), hint)
        case Arrow(a, b):
            return Arrow(desugar_type(a), desugar_type(b))
        case Prod(a, b):
            return Prod(desugar_type(a), desugar_type(b))
        case Sum(a, b):
            return Sum(desugar_type(a), desugar_type(b))
        case Ref(inner) | Lax(inner):
            return type(A)(desugar_type(inner))
    raise TypeError(F"Not a modal type: {A}")

def _child_worlds(t: Term, w: World) -> dict[str, World]:
    'The world each direct subterm of `t` is judged at, when `t` is at `w`.'
    match t:
        case Hold(home):
            return {'value': home}
        case Get(target):
            return {'body': target}
        case Sham():
            return {'body': WVar(0, t.hint)}
        case WLam():
            return {'body': shift_world(w)}
        case Unpack():
            return {'package': w, 'body': shift_world(w)}
        case Case() | VCase() | VSplit():
            return {'scrutinee': t.world if t.world is not None else w}
        case LetA():
            return {'boxed': t.world if t.world is not None else w}
    return {}

def _desugar(t: Term, w: World) -> Term:
    worlds = _child_worlds(t, w)
    changes: dict[str, Any] = {}
    for name, value in node_fields(t):
        if isinstance(value, Term):
            changes[name] = _desugar(value, worlds.get(name, w))
        elif isinstance(value, ModalType):
            changes[name] = desugar_type(value)
    t = replace(t, **changes) if changes else t
    match t:
        case Sham(body, hint):
            return WLam(Hold(WVar(0, hint), body, pos=t.pos), hint, pos=t.pos)
        case Unsham(value):
            return LetA('it', WApp(value, w, pos=t.pos), Var('it', pos=t.pos), w, pos=t.pos)
    return t

def desugar_shamrock(program: Program) -> Program:
    '''Remove `shamrock`, `sham` and `unsham` from a program.

    `sham v` becomes `wlam ω. hold[ω] v` and `unsham v` at `w` becomes
    `leta[w] it = v [w] in it`. Programs without them are returned as is.'''
    if not any(_has_shamrock(d.term) or _has_shamrock_type(d.type) for d in program.decls):
        return program
    decls = tuple(
        replace(d, type=desugar_type(d.type), term=_desugar(d.term, d.world))
        for d in program.decls)
    return replace(program, decls=decls)

# ------------------------------------------------------ case elaboration

def elaborate_untethered_case(scrutinee: Term, scrutinee_world: World,
                              left_var: str, left: Term, right_var: str, right: Term,
                              C: ModalType, w: World) -> Term:
    '''Encode an untethered value case as classic ML5.

    The scrutinee lives at `scrutinee_world`, the branches conclude
    `C` at `w`. Across worlds the case runs at the scrutinee's world and
    each branch fetches its result back from `w`, which needs `C` mobile.'''
    if scrutinee_world == w:
        return Case(Ret(scrutinee), left_var, left, right_var, right)
    if not mobile(C):
        raise ML5TypeError(Reason.NOT_MOBILE, str(C), 'a mobile type')
    return Get(scrutinee_world,
               Case(Ret(scrutinee), left_var, Get(w, left), right_var, Get(w, right)))

def elaborate_tethered_case(t: Case) -> Term:
    '`case e of ...` becomes `let s = e in vcase s of ...`.'
    avoid = free_vars(t.left) | free_vars(t.right) | {t.left_var, t.right_var}
    s = fresh_name('s', avoid)
    return Let(s, t.scrutinee,
               VCase(Var(s), t.left_var, t.left, t.right_var, t.right, pos=t.pos), pos=t.pos)

def _rewrite(t: Term, fn: Callable[[Term, Callable[[Term], Term]], Term | None]) -> Term:
    'Top-down rewrite: `fn` returns a replacement, or `None` to descend.'
    def go(node: Term) -> Term:
        out = fn(node, go)
        return out if out is not None else map_children(node, go)
    return go(t)

def elaborate_program_cases(program: Program, sites: Sequence[str] | None = None) -> Program:
    '''Rewrite the untethered value cases of a revised program into classic
    form with `elaborate_untethered_case`.

    Value cases used as values (outside `ret`) have no classic form and are
    left alone.'''
    program = desugar_shamrock(program)
    derivations = check_program(program, Mode.REVISED, sites)
    info: dict[int, tuple[ModalType, World]] = {}
    for d in derivations:
        for node in d.walk():
            if node.rule in ('vcase', 'vcase-value'):
                info[id(node.root.term)] = (node.root.type, node.root.world)

    def elaborate(v: VCase, left: Term, right: Term, go: Callable[[Term], Term]) -> Term:
        C, w = info[id(v)]
        w0 = v.world if v.world is not None else w
        return elaborate_untethered_case(go(v.scrutinee), w0, v.left_var, left,
                                         v.right_var, right, C, w)

    def fn(t: Term, go: Callable[[Term], Term]) -> Term | None:
        if isinstance(t, Ret) and isinstance(t.value, VCase) and id(t.value) in info:
            v = t.value
            return elaborate(v, Ret(go(v.left)), Ret(go(v.right)), go)
        if isinstance(t, VCase) and not is_value(t) and id(t) in info:
            return elaborate(t, go(t.left), go(t.right), go)
        return None

    decls = tuple(replace(d, term=_rewrite(d.term, fn)) for d in program.decls)
    return replace(program, decls=decls)

def elaborate_tethered_cases(program: Program) -> Program:
    'Replace every tethered `case` of a program by `let` and a value case.'
    def fn(t: Term, go: Callable[[Term], Term]) -> Term | None:
        if isinstance(t, Case):
            return elaborate_tethered_case(map_children(t, go))
        return None
    decls = tuple(replace(d, term=_rewrite(d.term, fn)) for d in program.decls)
    return replace(program, decls=decls)
