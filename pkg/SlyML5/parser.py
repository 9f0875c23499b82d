'''Concrete syntax for ML5 source files and printed L5 programs.

Both grammars are lark Earley grammars. Bound world names are turned
into de Bruijn indices as each binder is built.'''
from dataclasses import dataclass
from functools import lru_cache
import json
from typing import Any

from lark import Lark, Transformer, v_args
from lark.exceptions import LexError, UnexpectedCharacters, UnexpectedEOF, \
    UnexpectedInput, UnexpectedToken, VisitError

from .hl5 import *
from .syntax import *
from .translate import CoreDecl
from .typecheck import Decl, Program

class ParseError(ValueError):
    'Malformed source text'
    line: int
    column: int
    expected: frozenset[str]

    def __init__(self, message: str, line: int, column: int,
                 expected: frozenset[str] = frozenset()):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(message)

    def __str__(self) -> str:
        msg = F"{self.line}:{self.column}: {self.args[0]}"
        if self.expected:
            msg += F" (expected one of {', '.join(sorted(self.expected))})"
        return msg

ML5_KEYWORDS = (
    'lam', 'let', 'in', 'leta', 'unpack', 'wlam', 'sham', 'unsham', 'case', 'vcase',
    'vsplit', 'of', 'inl', 'inr', 'as', 'get', 'hold', 'pack', 'ret', 'ref', 'print',
    'fst', 'snd', 'world', 'forall', 'exists', 'at', 'int', 'string', 'unit', 'shamrock',
)

L5_KEYWORDS = (
    'lam', 'bind', 'in', 'leta', 'unpack', 'wlam', 'case', 'split', 'of', 'inl', 'inr',
    'as', 'mget', 'mret', 'box', 'pack', 'ref', 'print', 'fst', 'snd', 'world',
    'forall', 'exists', 'at', 'int', 'string', 'unit', 'lax',
)

def _name_terminal(keywords: tuple[str, ...], leading_underscore: bool) -> str:
    excluded = '|'.join(sorted(keywords, key=len, reverse=True))
    start = '' if leading_underscore else '(?!_)'
    return F"NAME: /(?!(?:{excluded})(?![\\w'])){start}[^\\W\\d][\\w']*/"

_TYPES = r'''
?type: "forall" NAME "." type            -> forall
     | "exists" NAME "." type            -> exists
     | sum_ty "->" type                  -> arrow
     | sum_ty
?sum_ty: sum_ty "+" prod_ty              -> sum
       | prod_ty
?prod_ty: prod_ty "*" at_ty              -> prod
        | at_ty
?at_ty: at_ty "at" world                 -> at
      | prefix_ty
?prefix_ty: "ref" prefix_ty              -> ref_ty
          | "shamrock" prefix_ty         -> shamrock
          | LAX prefix_ty                -> lax
          | atom_ty
?atom_ty: "int"                          -> int_ty
        | "string"                       -> string_ty
        | "unit"                         -> unit_ty
        | "(" type ")"

world: NAME
'''

_OPERATORS = r'''
?assign: add ":=" add                    -> assign
       | add
?add: add "+" mul                        -> plus
    | add "-" mul                        -> minus
    | add "^" mul                        -> concat
    | mul
?mul: mul "*" prefix                     -> times
    | prefix
?app: app atom                           -> apply
    | app "[" world "]"                  -> wapp
    | atom
?atom: NAME                              -> var
     | INT                               -> int_lit
     | "~" INT                           -> neg_lit
     | ESCAPED_STRING                    -> str_lit
     | "(" ")"                           -> unit_lit
     | "(" term ")"
     | "(" term "," term ")"             -> pair
     | "(" term ":" type ")"             -> anno
'''

_COMMON = r'''
%import common.INT
%import common.ESCAPED_STRING
%import common.WS
COMMENT: /--[^\n]*/
%ignore WS
%ignore COMMENT
'''

ML5_GRAMMAR = r'''
start: item*
?item: "world" NAME                                  -> world_decl
     | NAME ":" type "[" world "]" "=" term          -> decl

?term: "lam" "(" NAME ":" type ")" "." term          -> lam
     | "let" NAME [":" type] "=" term "in" term      -> let
     | "leta" ["[" world "]"] NAME "=" term "in" term -> leta
     | "unpack" NAME "," NAME "=" term "in" term     -> unpack
     | "wlam" NAME "." term                          -> wlam
     | "sham" NAME "." term                          -> sham
     | "case" ["[" world "]"] term "of" "inl" NAME "=>" assign "|" "inr" NAME "=>" term -> case
     | "vcase" ["[" world "]"] term "of" "inl" NAME "=>" assign "|" "inr" NAME "=>" term -> vcase
     | "vsplit" ["[" world "]"] term "as" "(" NAME "," NAME ")" "in" term -> vsplit
     | assign

?prefix: "ret" prefix                                -> ret
       | "get" "[" world "]" prefix                  -> get
       | "ref" prefix                                -> mkref
       | "!" prefix                                  -> deref
       | "print" prefix                              -> print
       | "fst" prefix                                -> fst
       | "snd" prefix                                -> snd
       | "inl" prefix                                -> inl
       | "inr" prefix                                -> inr
       | "hold" "[" world "]" prefix                 -> hold
       | "pack" "[" world "]" prefix                 -> pack
       | "unsham" prefix                             -> unsham
       | app

LAX: "◯"
''' + _TYPES + _OPERATORS + _COMMON + _name_terminal(ML5_KEYWORDS, False)

L5_GRAMMAR = r'''
start: item*
?item: "world" NAME                                  -> world_decl
     | NAME ":" type ("⟨" | "<") world ("⟩" | ">") "=" term -> decl

?term: "lam" "(" NAME ":" type ")" [":" type] "." term -> lam
     | "bind" NAME [":" type] "<-" term "in" term    -> bind
     | "leta" ["[" world "]"] NAME "=" term "in" term -> leta
     | "unpack" ["[" world "]"] NAME "," NAME "=" term "in" term -> unpack
     | "wlam" NAME "." term                          -> wlam
     | "case" ["[" world "]"] term "of" "inl" NAME "=>" assign "|" "inr" NAME "=>" term -> case
     | "split" ["[" world "]"] term "as" "(" NAME "," NAME ")" "in" term -> split
     | assign

?prefix: "mret" prefix                               -> ret
       | "mget" "[" world "," type "]" prefix        -> get
       | "ref" "[" type "]" prefix                   -> mkref
       | "!" prefix                                  -> deref
       | "print" prefix                              -> print
       | "fst" prefix                                -> fst
       | "snd" prefix                                -> snd
       | "inl" prefix                                -> inl
       | "inr" prefix                                -> inr
       | "box" "[" world "]" prefix                  -> hold
       | "pack" "[" world "]" prefix                 -> pack
       | app

LAX: "◯" | "lax"
''' + _TYPES + _OPERATORS + _COMMON + _name_terminal(L5_KEYWORDS, True)

def _pos(meta: Any) -> Pos | None:
    return None if meta.empty else Pos(meta.line, meta.column)

@v_args(meta=True)
class _Builder(Transformer):
    'Shared rules: worlds, types and programs'

    def world(self, meta, children):
        return WConst(str(children[0]))

    def forall(self, meta, children):
        name, body = children
        return Forall(abstract_world(body, str(name)), str(name))

    def exists(self, meta, children):
        name, body = children
        return Exists(abstract_world(body, str(name)), str(name))

    def arrow(self, meta, children): return Arrow(*children)
    def sum(self, meta, children): return Sum(*children)
    def prod(self, meta, children): return Prod(*children)
    def at(self, meta, children): return At(*children)
    def ref_ty(self, meta, children): return Ref(children[0])
    def shamrock(self, meta, children): return Shamrock(children[0])
    def lax(self, meta, children): return Lax(children[-1])
    def int_ty(self, meta, children): return INT
    def string_ty(self, meta, children): return STRING
    def unit_ty(self, meta, children): return UNIT

    def int_lit(self, meta, children): return self.lit(int(children[0]), meta)
    def neg_lit(self, meta, children): return self.lit(-int(children[0]), meta)
    def str_lit(self, meta, children): return self.lit(json.loads(children[0]), meta)
    def unit_lit(self, meta, children): return self.lit(None, meta)

    def lit(self, value: Literal, meta: Any) -> Node:
        raise NotImplementedError

    def world_decl(self, meta, children):
        return str(children[0])

    def start(self, meta, children):
        worlds = tuple(c for c in children if isinstance(c, str))
        decls = tuple(c for c in children if not isinstance(c, str))
        seen: set[str] = set()
        for d in decls:
            if d.name in seen:
                line, column = (d.pos.line, d.pos.column) if d.pos else (0, 0)
                raise ParseError(F"Duplicate declaration {d.name}", line, column)
            seen.add(d.name)
        if len(set(worlds)) != len(worlds):
            raise ParseError("Duplicate world declaration", 0, 0)
        return self.program(decls, worlds)

    def program(self, decls: tuple[Any, ...], worlds: tuple[str, ...]) -> Any:
        raise NotImplementedError

@v_args(meta=True)
class _Ml5Builder(_Builder):
    def lit(self, value, meta): return Lit(value, pos=_pos(meta))

    def decl(self, meta, children):
        name, type_, world, term = children
        return Decl(str(name), type_, world, term, _pos(meta))

    def program(self, decls, worlds): return Program(decls, worlds)

    def var(self, meta, children): return Var(str(children[0]), pos=_pos(meta))

    def lam(self, meta, children):
        name, dom, body = children
        return Lam(str(name), dom, body, pos=_pos(meta))

    def let(self, meta, children):
        name, ann, bound, body = children
        return Let(str(name), bound, body, ann, pos=_pos(meta))

    def leta(self, meta, children):
        world, name, boxed, body = children
        return LetA(str(name), boxed, body, world, pos=_pos(meta))

    def unpack(self, meta, children):
        wname, name, package, body = children
        return Unpack(str(name), package, abstract_world(body, str(wname)), str(wname),
                      pos=_pos(meta))

    def wlam(self, meta, children):
        name, body = children
        return WLam(abstract_world(body, str(name)), str(name), pos=_pos(meta))

    def sham(self, meta, children):
        name, body = children
        return Sham(abstract_world(body, str(name)), str(name), pos=_pos(meta))

    def case(self, meta, children):
        world, scrutinee, x, left, y, right = children
        return Case(scrutinee, str(x), left, str(y), right, world, pos=_pos(meta))

    def vcase(self, meta, children):
        world, scrutinee, x, left, y, right = children
        return VCase(scrutinee, str(x), left, str(y), right, world, pos=_pos(meta))

    def vsplit(self, meta, children):
        world, scrutinee, x, y, body = children
        return VSplit(scrutinee, str(x), str(y), body, world, pos=_pos(meta))

    def assign(self, meta, children): return Assign(*children, pos=_pos(meta))
    def plus(self, meta, children): return BinOp('+', *children, pos=_pos(meta))
    def minus(self, meta, children): return BinOp('-', *children, pos=_pos(meta))
    def concat(self, meta, children): return BinOp('^', *children, pos=_pos(meta))
    def times(self, meta, children): return BinOp('*', *children, pos=_pos(meta))

    def ret(self, meta, children): return Ret(children[0], pos=_pos(meta))
    def get(self, meta, children): return Get(*children, pos=_pos(meta))
    def mkref(self, meta, children): return MkRef(children[0], pos=_pos(meta))
    def deref(self, meta, children): return Deref(children[0], pos=_pos(meta))
    def print(self, meta, children): return Print(children[0], pos=_pos(meta))
    def fst(self, meta, children): return Fst(children[0], pos=_pos(meta))
    def snd(self, meta, children): return Snd(children[0], pos=_pos(meta))
    def inl(self, meta, children): return Inl(children[0], pos=_pos(meta))
    def inr(self, meta, children): return Inr(children[0], pos=_pos(meta))
    def hold(self, meta, children): return Hold(*children, pos=_pos(meta))
    def pack(self, meta, children): return Pack(*children, pos=_pos(meta))
    def unsham(self, meta, children): return Unsham(children[0], pos=_pos(meta))

    def apply(self, meta, children): return App(*children, pos=_pos(meta))
    def wapp(self, meta, children): return WApp(*children, pos=_pos(meta))
    def pair(self, meta, children): return Pair(*children, pos=_pos(meta))
    def anno(self, meta, children): return Anno(*children, pos=_pos(meta))

@dataclass(frozen=True)
class CoreProgram:
    decls: tuple[CoreDecl, ...] = ()
    worlds: tuple[str, ...] = ()

@v_args(meta=True)
class _L5Builder(_Builder):
    def lit(self, value, meta): return LLit(value, pos=_pos(meta))

    def decl(self, meta, children):
        name, type_, world, term = children
        return _PositionedDecl(CoreDecl(str(name), term, type_, world), _pos(meta))

    def program(self, decls, worlds):
        return CoreProgram(tuple(d.decl for d in decls), worlds)

    def var(self, meta, children): return LVar(str(children[0]), pos=_pos(meta))

    def lam(self, meta, children):
        name, dom, cod, body = children
        return LLam(str(name), dom, body, cod, pos=_pos(meta))

    def bind(self, meta, children):
        name, ann, bound, body = children
        return LBind(str(name), bound, body, ann, pos=_pos(meta))

    def leta(self, meta, children):
        world, name, boxed, body = children
        return LLetA(str(name), boxed, body, world, pos=_pos(meta))

    def unpack(self, meta, children):
        world, wname, name, package, body = children
        return LUnpack(str(name), package, abstract_world(body, str(wname)), world, str(wname),
                       pos=_pos(meta))

    def wlam(self, meta, children):
        name, body = children
        return LWLam(abstract_world(body, str(name)), str(name), pos=_pos(meta))

    def case(self, meta, children):
        world, scrutinee, x, left, y, right = children
        return LCase(scrutinee, str(x), left, str(y), right, world, pos=_pos(meta))

    def split(self, meta, children):
        world, scrutinee, x, y, body = children
        return LSplit(scrutinee, str(x), str(y), body, world, pos=_pos(meta))

    def assign(self, meta, children): return LAssign(*children, pos=_pos(meta))
    def plus(self, meta, children): return LPrim('+', *children, pos=_pos(meta))
    def minus(self, meta, children): return LPrim('-', *children, pos=_pos(meta))
    def concat(self, meta, children): return LPrim('^', *children, pos=_pos(meta))
    def times(self, meta, children): return LPrim('*', *children, pos=_pos(meta))

    def ret(self, meta, children): return LRet(children[0], pos=_pos(meta))

    def get(self, meta, children):
        world, ann, body = children
        return LGet(world, body, ann, pos=_pos(meta))

    def mkref(self, meta, children):
        cell, init = children
        return LRef(init, cell, pos=_pos(meta))

    def deref(self, meta, children): return LDeref(children[0], pos=_pos(meta))
    def print(self, meta, children): return LPrint(children[0], pos=_pos(meta))
    def fst(self, meta, children): return LFst(children[0], pos=_pos(meta))
    def snd(self, meta, children): return LSnd(children[0], pos=_pos(meta))
    def inl(self, meta, children): return LInl(children[0], pos=_pos(meta))
    def inr(self, meta, children): return LInr(children[0], pos=_pos(meta))
    def hold(self, meta, children): return LBox(*children, pos=_pos(meta))
    def pack(self, meta, children): return LPack(*children, pos=_pos(meta))

    def apply(self, meta, children): return LApp(*children, pos=_pos(meta))
    def wapp(self, meta, children): return LWApp(*children, pos=_pos(meta))
    def pair(self, meta, children): return LPair(*children, pos=_pos(meta))
    def anno(self, meta, children): return LAnno(*children, pos=_pos(meta))

@dataclass(frozen=True)
class _PositionedDecl:
    decl: CoreDecl
    pos: Pos | None

    @property
    def name(self) -> str: return self.decl.name

@lru_cache
def _lark(grammar: str, start: str = 'start') -> Lark:
    return Lark(grammar, start=start, parser='earley', lexer='basic', propagate_positions=True)

def _parse(grammar: str, start: str, text: str, builder: Transformer) -> Any:
    try:
        tree = _lark(grammar, start).parse(text)
    except UnexpectedEOF as err:
        lines = text.splitlines() or ['']
        raise ParseError("Unexpected end of input", len(lines), len(lines[-1]) + 1,
                         frozenset(err.expected)) from None
    except UnexpectedCharacters as err:
        raise ParseError(F"Unexpected character {text[err.pos_in_stream]!r}",
                         err.line, err.column, frozenset(err.allowed or ())) from None
    except UnexpectedToken as err:
        raise ParseError(F"Unexpected {err.token!r}", err.line, err.column,
                         frozenset(err.expected or ())) from None
    except UnexpectedInput as err:
        raise ParseError("Unexpected input", err.line, err.column) from None
    except LexError as err:
        raise ParseError(F"Cannot tokenize: {err}", 1, 1) from None
    try:
        return builder.transform(tree)
    except VisitError as err:
        raise err.orig_exc from None

def parse_program(text: str) -> Program:
    'Parse an `.ml5` source file.'
    return _parse(ML5_GRAMMAR, 'start', text, _Ml5Builder())

def parse_term(text: str) -> Term:
    return _parse(ML5_GRAMMAR, 'term', text, _Ml5Builder())

def parse_type(text: str) -> ModalType:
    return _parse(ML5_GRAMMAR, 'type', text, _Ml5Builder())

def parse_core(text: str) -> CoreProgram:
    'Parse a translated program as printed by `show_core_program`.'
    return _parse(L5_GRAMMAR, 'start', text, _L5Builder())

def parse_l5_term(text: str) -> L5Term:
    return _parse(L5_GRAMMAR, 'term', text, _L5Builder())

def parse_l5_type(text: str) -> ModalType:
    return _parse(L5_GRAMMAR, 'type', text, _L5Builder())
