'''Rule-directed generation of well-typed ML5 expressions.

Each strategy picks a typing rule whose conclusion matches the goal and
generates its premises, so every draw typechecks by construction.'''
from dataclasses import dataclass
from typing import Any

from hypothesis import strategies as st

from SlyML5.syntax import *
from SlyML5.typecheck import Mode

MAX_DEPTH = 5

@dataclass
class _Gen:
    draw: Any
    sites: tuple[str, ...]
    mode: Mode
    counter: int = 0

    def fresh(self) -> str:
        self.counter += 1
        return F"x{self.counter}"

    def site(self) -> WConst:
        return WConst(self.draw(st.sampled_from(self.sites)))

    def lit(self, A: Base) -> Lit:
        if A == INT:
            return Lit(self.draw(st.integers(-20, 20)))
        if A == STRING:
            return Lit(self.draw(st.sampled_from(['', 'a', 'ml5', 'ω'])))
        return Lit(None)

    # -- types

    def type(self, depth: int) -> ModalType:
        if depth <= 0:
            return self.draw(st.sampled_from(BASE_TYPES))
        options = ['base', 'prod', 'sum', 'at', 'arrow', 'all', 'some']
        if self.mode is Mode.CLASSIC:
            options.append('shamrock')
        match self.draw(st.sampled_from(options)):
            case 'base':
                return self.draw(st.sampled_from(BASE_TYPES))
            case 'prod':
                return Prod(self.type(depth - 1), self.type(depth - 1))
            case 'sum':
                return Sum(self.type(depth - 1), self.type(depth - 1))
            case 'at':
                return At(self.type(depth - 1), self.site())
            case 'arrow':
                return Arrow(self.type(depth - 1), self.type(depth - 1))
            case 'all':
                return Forall(At(self.draw(st.sampled_from(BASE_TYPES)), WVar(0)))
            case 'some':
                return Exists(At(self.draw(st.sampled_from(BASE_TYPES)), WVar(0)))
            case _:
                return Shamrock(self.draw(st.sampled_from(BASE_TYPES)))

    # -- values

    def value(self, ctx: Ctx, A: ModalType, w: World, depth: int) -> Term:
        candidates = [h.name for h in ctx.entries
                      if h.type == A and h.world == w and ctx.lookup(h.name) == h]
        if candidates and self.draw(st.booleans()):
            return Var(self.draw(st.sampled_from(candidates)))
        d = depth - 1
        match A:
            case Base():
                return self.lit(A)
            case Prod(left, right):
                return Pair(self.value(ctx, left, w, d), self.value(ctx, right, w, d))
            case Sum(left, right):
                if self.draw(st.booleans()):
                    return Anno(Inl(self.value(ctx, left, w, d)), A)
                return Anno(Inr(self.value(ctx, right, w, d)), A)
            case At(inner, home):
                return Hold(home, self.value(ctx, inner, home, d))
            case Arrow(dom, cod):
                x = self.fresh()
                return Lam(x, dom, self.expr(ctx.extend(x, dom, w), cod, w, d))
            case Forall(At(inner, WVar(index=0))):
                assert isinstance(inner, Base)
                return WLam(Hold(WVar(0), self.lit(inner)))
            case Exists(At(inner, WVar(index=0))):
                assert isinstance(inner, Base)
                s = self.site()
                return Anno(Pack(s, Hold(s, self.lit(inner))), A)
            case Shamrock(inner):
                assert isinstance(inner, Base)
                return Sham(self.lit(inner))
        raise ValueError(F"No generator for {A}")

    # -- expressions

    def expr(self, ctx: Ctx, A: ModalType, w: World, depth: int) -> Term:
        if depth <= 0:
            return Ret(self.value(ctx, A, w, 0))
        d = depth - 1
        rules = ['ret', 'let', 'app', 'proj', 'case', 'leta']
        if mobile(A):
            rules.append('get')
        if A in (INT, STRING):
            rules.append('binop')
        if A == INT:
            rules.append('deref')
        if A == UNIT:
            rules += ['print', 'assign']
        if self.mode is Mode.REVISED:
            rules += ['vcase', 'vsplit']
        elif isinstance(A, Base):
            rules.append('unsham')
        if isinstance(w, WConst):
            rules.append('unpack')

        match self.draw(st.sampled_from(rules)):
            case 'ret':
                return Ret(self.value(ctx, A, w, d))
            case 'let':
                B = self.type(1)
                x = self.fresh()
                return Let(x, self.expr(ctx, B, w, d), self.expr(ctx.extend(x, B, w), A, w, d), B)
            case 'app':
                B = self.type(1)
                x = self.fresh()
                fn = Lam(x, B, self.expr(ctx.extend(x, B, w), A, w, d))
                return App(Ret(fn), self.expr(ctx, B, w, d))
            case 'proj':
                B = self.type(1)
                if self.draw(st.booleans()):
                    return Fst(self.expr(ctx, Prod(A, B), w, d))
                return Snd(self.expr(ctx, Prod(B, A), w, d))
            case 'case':
                B, C = self.type(1), self.type(1)
                x, y = self.fresh(), self.fresh()
                return Case(self.expr(ctx, Sum(B, C), w, d),
                            x, self.expr(ctx.extend(x, B, w), A, w, d),
                            y, self.expr(ctx.extend(y, C, w), A, w, d))
            case 'leta':
                home = self.site()
                B = self.type(1)
                x = self.fresh()
                boxed = self.value(ctx, At(B, home), w, d)
                return LetA(x, boxed, self.expr(ctx.extend(x, B, home), A, w, d))
            case 'get':
                target = self.site()
                return Get(target, self.expr(ctx, A, target, d))
            case 'binop':
                op = '^' if A == STRING else self.draw(st.sampled_from(['+', '-', '*']))
                return BinOp(op, self.expr(ctx, A, w, d), self.expr(ctx, A, w, d))
            case 'deref':
                return Deref(MkRef(self.expr(ctx, INT, w, d)))
            case 'print':
                return Print(self.expr(ctx, self.draw(st.sampled_from(BASE_TYPES)), w, d))
            case 'assign':
                return Assign(MkRef(self.expr(ctx, INT, w, d)), self.expr(ctx, INT, w, d))
            case 'unsham':
                sham = Sham(self.value(ctx.extend_world(), A, WVar(0), 0))
                return Ret(Unsham(Anno(sham, Shamrock(A))))
            case 'unpack':
                inner = self.draw(st.sampled_from(BASE_TYPES))
                x = self.fresh()
                package = self.value(ctx, Exists(At(inner, WVar(0))), w, d)
                body_ctx = ctx.extend_world().extend(x, At(inner, WVar(0)), w)
                y = self.fresh()
                body = LetA(y, Var(x), Get(WVar(0), Ret(Lit(None)))) if A == UNIT else \
                    self.expr(body_ctx, A, w, d)
                return Unpack(x, package, body)
            case 'vcase':
                home = self.site()
                B, C = self.type(1), self.type(1)
                x, y = self.fresh(), self.fresh()
                return VCase(self.value(ctx, Sum(B, C), home, d),
                             x, self.expr(ctx.extend(x, B, home), A, w, d),
                             y, self.expr(ctx.extend(y, C, home), A, w, d), home)
            case _:
                home = self.site()
                B, C = self.type(1), self.type(1)
                x, y = self.fresh(), self.fresh()
                return VSplit(self.value(ctx, Prod(B, C), home, d), x, y,
                              self.expr(ctx.extend(x, B, home).extend(y, C, home), A, w, d), home)

@st.composite
def well_typed(draw, mode: Mode = Mode.CLASSIC, sites: tuple[str, ...] = ('client', 'server'),
               depth: int = MAX_DEPTH) -> tuple[Term, ModalType, WConst]:
    '''An expression `e`, a type `A` and a site `w` with `e : A [w]` in
    the empty context.'''
    gen = _Gen(draw, sites, mode)
    A = gen.type(2)
    w = gen.site()
    return gen.expr(Ctx(), A, w, draw(st.integers(1, depth))), A, w

@st.composite
def open_well_typed(draw, depth: int = 3) -> tuple[Term, ModalType, WConst, str, ModalType, Term]:
    '''An expression `e : A [w]` under one hypothesis `y : B [w]`, and a
    closed value `v :: B [w]` to put in its place.'''
    gen = _Gen(draw, ('client', 'server'), Mode.CLASSIC)
    B = gen.type(1)
    A = gen.type(2)
    w = gen.site()
    e = gen.expr(Ctx().extend('y', B, w), A, w, draw(st.integers(1, depth)))
    return e, A, w, 'y', B, gen.value(Ctx(), B, w, 2)

@st.composite
def bind_chain(draw, depth: int = 3) -> tuple[Any, ...]:
    '''Pieces for sequencing computations at one site `w`: a closed
    `m : B`, a value `v :: B`, `k : A` under `y : B`, and `k2 : C` under
    `z : A`.'''
    gen = _Gen(draw, ('client', 'server'), Mode.CLASSIC)
    B, A, C = gen.type(1), gen.type(1), gen.type(1)
    w = gen.site()
    m = gen.expr(Ctx(), B, w, draw(st.integers(1, depth)))
    v = gen.value(Ctx(), B, w, 2)
    k = gen.expr(Ctx().extend('y', B, w), A, w, draw(st.integers(1, depth)))
    k2 = gen.expr(Ctx().extend('z', A, w), C, w, draw(st.integers(1, depth)))
    return w, (m, v, B), (k, A), (k2, C)
