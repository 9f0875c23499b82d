'''Printing types, ML5 programs and L5 programs in the concrete syntax
the parsers read back.'''
import json
from typing import Any

from .syntax import *

def _world(w: World, names: tuple[str, ...]) -> str:
    if isinstance(w, WVar):
        if w.index < len(names):
            return names[-1 - w.index]
        return str(w)
    return w.name

def show_world(w: World, names: tuple[str, ...] = ()) -> str:
    return _world(w, names)

def _pick(hint: str, names: tuple[str, ...], avoid: set[str]) -> str:
    'A binder name that neither shadows an enclosing binder nor hides a site.'
    base = hint or 'w'
    taken = set(names) | avoid
    return base if base not in taken else fresh_name(base, taken)

def _paren(text: str, level: int, prec: int) -> str:
    return F"({text})" if level > prec else text

# ----------------------------------------------------------------- types
# levels: binders 0, -> 1, + 2, * 3, at 4, prefix 5, atoms 6

def _type(A: ModalType, names: tuple[str, ...], level: int) -> str:
    match A:
        case Base(name):
            return name
        case Forall(body, hint) | Exists(body, hint):
            x = _pick(hint, names, sites_of_type(body))
            kw = 'forall' if isinstance(A, Forall) else 'exists'
            return _paren(F"{kw} {x}. {_type(body, names + (x,), 0)}", level, 0)
        case Arrow(dom, cod):
            return _paren(F"{_type(dom, names, 2)} -> {_type(cod, names, 0)}", level, 1)
        case Sum(left, right):
            return _paren(F"{_type(left, names, 2)} + {_type(right, names, 3)}", level, 2)
        case Prod(left, right):
            return _paren(F"{_type(left, names, 3)} * {_type(right, names, 4)}", level, 3)
        case At(inner, w):
            return _paren(F"{_type(inner, names, 4)} at {_world(w, names)}", level, 4)
        case Ref(inner):
            return _paren(F"ref {_type(inner, names, 5)}", level, 5)
        case Shamrock(inner):
            return _paren(F"shamrock {_type(inner, names, 5)}", level, 5)
        case Lax(inner):
            return _paren(F"◯{_type(inner, names, 5)}", level, 5)
    raise TypeError(F"Not a modal type: {A!r}")

def show_type(A: ModalType, names: tuple[str, ...] = ()) -> str:
    return _type(A, names, 0)

# ----------------------------------------------------------------- terms
# levels: binders 0, := 1, + - ^ 2, * 3, prefix 4, application 5, atoms 6

def _lit(value: Literal) -> str:
    if value is None:
        return '()'
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return F"~{-value}" if value < 0 else str(value)

def _sel(w: World | None, names: tuple[str, ...]) -> str:
    return '' if w is None else F"[{_world(w, names)}]"

class _Printer:
    'Shared printing of the constructs ML5 and L5 have in common'

    def term(self, t: Node, names: tuple[str, ...], level: int) -> str:
        raise NotImplementedError

    def ty(self, A: ModalType, names: tuple[str, ...]) -> str:
        return _type(A, names, 0)

    def binop(self, op: str, left: Node, right: Node, names: tuple[str, ...], level: int) -> str:
        if op == '*':
            text = F"{self.term(left, names, 3)} * {self.term(right, names, 4)}"
            return _paren(text, level, 3)
        text = F"{self.term(left, names, 2)} {op} {self.term(right, names, 3)}"
        return _paren(text, level, 2)

    def prefix(self, kw: str, t: Node, names: tuple[str, ...], level: int) -> str:
        sep = '' if kw == '!' else ' '
        return _paren(F"{kw}{sep}{self.term(t, names, 4)}", level, 4)

    def world_binder(self, hint: str, body: Node, names: tuple[str, ...]) -> str:
        return _pick(hint, names, sites_of_term(body))

class _Ml5Printer(_Printer):
    def term(self, t: Node, names: tuple[str, ...], level: int) -> str:
        p = self.term
        match t:
            case Var(name):
                return name
            case Lit(value):
                return _lit(value)
            case Pair(left, right):
                return F"({p(left, names, 0)}, {p(right, names, 0)})"
            case Anno(inner, A):
                return F"({p(inner, names, 0)} : {self.ty(A, names)})"
            case Lam(var, dom, body):
                return _paren(F"lam ({var} : {self.ty(dom, names)}). {p(body, names, 0)}", level, 0)
            case Let(var, bound, body, ann):
                ann_text = '' if ann is None else F" : {self.ty(ann, names)}"
                return _paren(F"let {var}{ann_text} = {p(bound, names, 0)} in {p(body, names, 0)}",
                              level, 0)
            case LetA(var, boxed, body, w):
                return _paren(F"leta{_sel(w, names)} {var} = {p(boxed, names, 0)} in "
                              F"{p(body, names, 0)}", level, 0)
            case Unpack(var, package, body, hint):
                x = self.world_binder(hint, body, names)
                return _paren(F"unpack {x}, {var} = {p(package, names, 0)} in "
                              F"{p(body, names + (x,), 0)}", level, 0)
            case WLam(body, hint) | Sham(body, hint):
                x = self.world_binder(hint, body, names)
                kw = 'wlam' if isinstance(t, WLam) else 'sham'
                return _paren(F"{kw} {x}. {p(body, names + (x,), 0)}", level, 0)
            case Case(scrutinee, x, left, y, right, w) | VCase(scrutinee, x, left, y, right, w):
                kw = 'case' if isinstance(t, Case) else 'vcase'
                return _paren(F"{kw}{_sel(w, names)} {p(scrutinee, names, 0)} of "
                              F"inl {x} => {p(left, names, 1)} | inr {y} => {p(right, names, 0)}",
                              level, 0)
            case VSplit(scrutinee, x, y, body, w):
                return _paren(F"vsplit{_sel(w, names)} {p(scrutinee, names, 0)} as ({x}, {y}) in "
                              F"{p(body, names, 0)}", level, 0)
            case Assign(ref, value):
                return _paren(F"{p(ref, names, 2)} := {p(value, names, 2)}", level, 1)
            case BinOp(op, left, right):
                return self.binop(op, left, right, names, level)
            case Get(w, body):
                return self.prefix(F"get[{_world(w, names)}]", body, names, level)
            case Hold(w, value):
                return self.prefix(F"hold[{_world(w, names)}]", value, names, level)
            case Pack(w, value):
                return self.prefix(F"pack[{_world(w, names)}]", value, names, level)
            case Ret(v) | MkRef(v) | Deref(v) | Print(v) | Fst(v) | Snd(v) | Inl(v) | Inr(v) | Unsham(v):
                kw = _ML5_PREFIX[type(t)]
                return self.prefix(kw, v, names, level)
            case App(fn, arg):
                return _paren(F"{p(fn, names, 5)} {p(arg, names, 6)}", level, 5)
            case WApp(fn, w):
                return _paren(F"{p(fn, names, 5)} [{_world(w, names)}]", level, 5)
        raise TypeError(F"Not an ML5 term: {t!r}")

_ML5_PREFIX: dict[type, str] = {
    Ret: 'ret', MkRef: 'ref', Deref: '!', Print: 'print', Fst: 'fst', Snd: 'snd',
    Inl: 'inl', Inr: 'inr', Unsham: 'unsham',
}

def show_term(t: Term, names: tuple[str, ...] = ()) -> str:
    return _Ml5Printer().term(t, names, 0)

def show_program(program: Any) -> str:
    'Print a parsed `Program`, one item per line.'
    lines = [F"world {name}" for name in program.worlds]
    for d in program.decls:
        lines.append(F"{d.name} : {show_type(d.type)} [{show_world(d.world)}] = {show_term(d.term)}")
    return ''.join(line + '\n' for line in lines)

# -------------------------------------------------------------------- L5

class _L5Printer(_Printer):
    def term(self, t: Node, names: tuple[str, ...], level: int) -> str:
        from .hl5 import (LAnno, LApp, LAssign, LBind, LBox, LCase, LDeref, LFst, LGet, LInl,
                          LInr, LLam, LLetA, LLit, LPack, LPair, LPrim, LPrint, LRef, LRet,
                          LSnd, LSplit, LUnpack, LVar, LWApp, LWLam)
        p = self.term
        match t:
            case LVar(name):
                return name
            case LLit(value):
                return _lit(value)
            case LPair(left, right):
                return F"({p(left, names, 0)}, {p(right, names, 0)})"
            case LAnno(inner, A):
                return F"({p(inner, names, 0)} : {self.ty(A, names)})"
            case LLam(var, dom, body, cod):
                cod_text = '' if cod is None else F" : {self.ty(cod, names)}"
                return _paren(F"lam ({var} : {self.ty(dom, names)}){cod_text}. {p(body, names, 0)}",
                              level, 0)
            case LBind(var, bound, body, ann):
                ann_text = '' if ann is None else F" : {self.ty(ann, names)}"
                return _paren(F"bind {var}{ann_text} <- {p(bound, names, 0)} in {p(body, names, 0)}",
                              level, 0)
            case LCase(scrutinee, x, left, y, right, w):
                return _paren(F"case{_sel(w, names)} {p(scrutinee, names, 0)} of "
                              F"inl {x} => {p(left, names, 1)} | inr {y} => {p(right, names, 0)}",
                              level, 0)
            case LSplit(scrutinee, x, y, body, w):
                return _paren(F"split{_sel(w, names)} {p(scrutinee, names, 0)} as ({x}, {y}) in "
                              F"{p(body, names, 0)}", level, 0)
            case LLetA(var, boxed, body, w):
                return _paren(F"leta{_sel(w, names)} {var} = {p(boxed, names, 0)} in "
                              F"{p(body, names, 0)}", level, 0)
            case LUnpack(var, package, body, w, hint):
                x = self.world_binder(hint, body, names)
                return _paren(F"unpack{_sel(w, names)} {x}, {var} = {p(package, names, 0)} in "
                              F"{p(body, names + (x,), 0)}", level, 0)
            case LWLam(body, hint):
                x = self.world_binder(hint, body, names)
                return _paren(F"wlam {x}. {p(body, names + (x,), 0)}", level, 0)
            case LAssign(ref, value):
                return _paren(F"{p(ref, names, 2)} := {p(value, names, 2)}", level, 1)
            case LPrim(op, left, right):
                return self.binop(op, left, right, names, level)
            case LGet(w, body, ann):
                return self.prefix(F"mget[{_world(w, names)}, {self.ty(ann, names)}]", body, names, level)
            case LRef(init, cell):
                return self.prefix(F"ref[{self.ty(cell, names)}]", init, names, level)
            case LBox(w, value):
                return self.prefix(F"box[{_world(w, names)}]", value, names, level)
            case LPack(w, value):
                return self.prefix(F"pack[{_world(w, names)}]", value, names, level)
            case LRet(v):
                return self.prefix('mret', v, names, level)
            case LDeref(v):
                return self.prefix('!', v, names, level)
            case LPrint(v):
                return self.prefix('print', v, names, level)
            case LFst(v):
                return self.prefix('fst', v, names, level)
            case LSnd(v):
                return self.prefix('snd', v, names, level)
            case LInl(v):
                return self.prefix('inl', v, names, level)
            case LInr(v):
                return self.prefix('inr', v, names, level)
            case LApp(fn, arg):
                return _paren(F"{p(fn, names, 5)} {p(arg, names, 6)}", level, 5)
            case LWApp(fn, w):
                return _paren(F"{p(fn, names, 5)} [{_world(w, names)}]", level, 5)
        raise TypeError(F"Not an L5 term: {t!r}")

def show_l5(t: Node, names: tuple[str, ...] = ()) -> str:
    return _L5Printer().term(t, names, 0)

def show_core_program(decls: Any, worlds: tuple[str, ...] = ()) -> str:
    'Print translated declarations as `name : ◯A ⟨w⟩ = term`.'
    lines = [F"world {name}" for name in worlds]
    for d in decls:
        lines.append(F"{d.name} : {show_type(d.type)} ⟨{show_world(d.world)}⟩ = {show_l5(d.term)}")
    return ''.join(line + '\n' for line in lines)
