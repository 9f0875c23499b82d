'''A deterministic multi-site abstract machine for L5.

The machine is a CEK machine with three kinds of control: evaluating a
pure term at a world, returning a value, and executing a suspended
computation at the machine's current site. Only `get` moves control
between sites, and it does so synchronously: the requesting site waits
on the continuation stack until the result is marshaled back.'''
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field
import logging
from typing import Any

from . import events
from .abc import MarshalCtx
from .config import RunConfig
from .events import Event
from .hl5 import *
from .marshalling import MARSHALLER
from .syntax import *
from .values import *

log = logging.getLogger(__name__)

# ------------------------------------------------------------- controls

@dataclass
class Eval:
    term: L5Term
    env: Env
    wenv: WEnv
    world: str

@dataclass
class Return:
    value: Any

@dataclass
class Exec:
    comp: VComp

Control = Eval | Return | Exec

@dataclass
class MachineState:
    sites: tuple[str, ...]
    heaps: dict[str, dict[int, Any]]
    fresh: dict[str, int]
    output: dict[str, list[str]]
    trace: list[Event] = field(default_factory=list)
    world: str = ''
    control: Control | None = None
    kont: list['Frame'] = field(default_factory=list)
    debug: bool = False
    steps: int = 0

    @property
    def halted(self) -> bool:
        return isinstance(self.control, Return) and not self.kont

    def emit(self, event: Event) -> None:
        self.trace.append(event)

def init_machine(config: RunConfig) -> MachineState:
    'Empty heaps for every configured site, positioned at the entry site.'
    if not config.sites:
        raise ValueError("A machine needs at least one site")
    return MachineState(
        sites=tuple(config.sites),
        heaps={s: {} for s in config.sites},
        fresh={s: 0 for s in config.sites},
        output={s: [] for s in config.sites},
        world=config.entry,
    )

# --------------------------------------------------------------- frames

class Frame(ABC):
    'A pending piece of work waiting for a value'

    @abstractmethod
    def resume(self, st: MachineState, value: Any) -> None: ...

def _fault(expected: str, value: Any) -> MachineFault:
    return MachineFault(F"Stuck: expected {expected}, found {value!r}")

@dataclass
class Build(Frame):
    'Wrap the value in a constructor.'
    make: Any

    def resume(self, st: MachineState, value: Any) -> None:
        st.control = Return(self.make(value))

@dataclass
class PairRight(Frame):
    right: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        st.kont.append(Build(lambda r: VPair(value, r)))
        st.control = Eval(self.right, self.env, self.wenv, self.world)

@dataclass
class Project(Frame):
    first: bool

    def resume(self, st: MachineState, value: Any) -> None:
        if not isinstance(value, VPair):
            raise _fault('a pair', value)
        st.control = Return(value.left if self.first else value.right)

@dataclass
class ApplyTo(Frame):
    'The function is known; evaluate its argument next.'
    arg: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        if not isinstance(value, VClosure):
            raise _fault('a closure', value)
        st.kont.append(Apply(value))
        st.control = Eval(self.arg, self.env, self.wenv, self.world)

@dataclass
class Apply(Frame):
    closure: VClosure

    def resume(self, st: MachineState, value: Any) -> None:
        c = self.closure
        st.control = Eval(c.body, {**c.env, c.var: value}, c.wenv, c.world)

@dataclass
class Split(Frame):
    left_var: str
    right_var: str
    body: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        if not isinstance(value, VPair):
            raise _fault('a pair', value)
        env = {**self.env, self.left_var: value.left, self.right_var: value.right}
        st.control = Eval(self.body, env, self.wenv, self.world)

@dataclass
class Branch(Frame):
    left_var: str
    left: L5Term
    right_var: str
    right: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        if isinstance(value, VInl):
            env, body = {**self.env, self.left_var: value.value}, self.left
        elif isinstance(value, VInr):
            env, body = {**self.env, self.right_var: value.value}, self.right
        else:
            raise _fault('an injection', value)
        st.control = Eval(body, env, self.wenv, self.world)

@dataclass
class Unbox(Frame):
    var: str
    body: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        if not isinstance(value, VBox):
            raise _fault('a box', value)
        st.control = Eval(self.body, {**self.env, self.var: value.value}, self.wenv, self.world)

@dataclass
class Instantiate(Frame):
    site: str

    def resume(self, st: MachineState, value: Any) -> None:
        if isinstance(value, VWorldFun):
            st.control = Eval(value.body, value.env, (self.site,) + value.wenv, value.world)
        elif isinstance(value, VWorldTable):
            st.control = Return(value.at(self.site))
        else:
            raise _fault('a world function', value)

@dataclass
class Open(Frame):
    var: str
    body: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        if not isinstance(value, VPack):
            raise _fault('a package', value)
        st.control = Eval(self.body, {**self.env, self.var: value.value},
                          (value.site,) + self.wenv, self.world)

@dataclass
class PrimRight(Frame):
    op: str
    right: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        st.kont.append(Build(lambda r: _prim(self.op, value, r)))
        st.control = Eval(self.right, self.env, self.wenv, self.world)

def _prim(op: str, a: Any, b: Any) -> Any:
    match op:
        case '+': return a + b
        case '-': return a - b
        case '*': return a * b
        case '^': return a + b
    raise MachineFault(F"Unknown primitive {op}")

# monadic frames

@dataclass
class Force(Frame):
    'The value is a computation; run it.'

    def resume(self, st: MachineState, value: Any) -> None:
        if not isinstance(value, VComp):
            raise _fault('a computation', value)
        st.control = Exec(value)

@dataclass
class BindRest(Frame):
    var: str
    body: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        env = {**self.env, self.var: value}
        st.control = Exec(VComp(self.body, env, self.wenv, self.world))

@dataclass
class Marshal(Frame):
    'Marshal the result back to the requesting site.'
    source: str
    target: str
    type: ModalType

    def resume(self, st: MachineState, value: Any) -> None:
        ctx = MarshalCtx(MARSHALLER, self.target, self.source, st.sites)
        copied = ctx.marshal(value, self.type)
        st.emit(events.GetReturn(self.target, self.source, summarize(copied)))
        log.debug("get returns %s from %s to %s", summarize(copied), self.target, self.source)
        st.world = self.source
        if st.debug and not classify(copied, self.type, WConst(self.source), st.sites):
            raise MachineFault(F"get result {summarize(copied)} does not classify at {self.type}")
        st.control = Return(copied)

@dataclass
class AllocCell(Frame):
    cell: ModalType

    def resume(self, st: MachineState, value: Any) -> None:
        site = st.world
        ref = VRef(site, st.fresh[site], self.cell)
        st.fresh[site] += 1
        st.heaps[site][ref.id] = value
        st.emit(events.Alloc(site, ref.handle))
        st.control = Return(ref)

def _local_ref(st: MachineState, value: Any) -> VRef:
    if not isinstance(value, VRef):
        raise _fault('a reference', value)
    if value.site != st.world:
        raise MachineFault(F"Reference {value.handle} of {value.site} used at {st.world}")
    return value

@dataclass
class ReadRef(Frame):
    def resume(self, st: MachineState, value: Any) -> None:
        ref = _local_ref(st, value)
        st.emit(events.Read(ref.site, ref.handle))
        st.control = Return(st.heaps[ref.site][ref.id])

@dataclass
class AssignTo(Frame):
    'The reference is known; evaluate the new contents next.'
    value: L5Term
    env: Env
    wenv: WEnv
    world: str

    def resume(self, st: MachineState, value: Any) -> None:
        st.kont.append(WriteRef(_local_ref(st, value)))
        st.control = Eval(self.value, self.env, self.wenv, self.world)

@dataclass
class WriteRef(Frame):
    ref: VRef

    def resume(self, st: MachineState, value: Any) -> None:
        st.heaps[self.ref.site][self.ref.id] = value
        st.emit(events.Write(self.ref.site, self.ref.handle))
        st.control = Return(None)

@dataclass
class PrintValue(Frame):
    def resume(self, st: MachineState, value: Any) -> None:
        text = value if isinstance(value, str) else summarize(value)
        st.output[st.world].append(text)
        st.emit(events.Print(st.world, text))
        st.control = Return(None)

# ----------------------------------------------------------------- step

def _eval(st: MachineState, c: Eval) -> None:
    env, wenv, world = c.env, c.wenv, c.world
    push = st.kont.append
    def at(w: World | None) -> str:
        return world if w is None else resolve_world(w, wenv)

    match c.term:
        case LVar(name):
            if name not in env:
                raise MachineFault(F"Unbound variable {name}")
            st.control = Return(env[name])
            return
        case LLit(value):
            st.control = Return(value)
            return
        case LLam(var, dom, body, cod):
            st.control = Return(VClosure(env, var, body, wenv, world, close_type(dom, wenv),
                                         None if cod is None else close_type(cod, wenv)))
            return
        case LWLam(body):
            st.control = Return(VWorldFun(env, wenv, body, world, st.sites))
            return
        case LRet() | LBind() | LGet() | LRef() | LDeref() | LAssign() | LPrint():
            st.control = Return(VComp(c.term, env, wenv, world))
            return
        case LApp(fn, arg):
            push(ApplyTo(arg, env, wenv, world))
            nxt = Eval(fn, env, wenv, world)
        case LPair(left, right):
            push(PairRight(right, env, wenv, world))
            nxt = Eval(left, env, wenv, world)
        case LFst(pair) | LSnd(pair):
            push(Project(isinstance(c.term, LFst)))
            nxt = Eval(pair, env, wenv, world)
        case LSplit(scrutinee, x, y, body, w0):
            push(Split(x, y, body, env, wenv, world))
            nxt = Eval(scrutinee, env, wenv, at(w0))
        case LInl(value):
            push(Build(VInl))
            nxt = Eval(value, env, wenv, world)
        case LInr(value):
            push(Build(VInr))
            nxt = Eval(value, env, wenv, world)
        case LCase(scrutinee, x, left, y, right, w0):
            push(Branch(x, left, y, right, env, wenv, world))
            nxt = Eval(scrutinee, env, wenv, at(w0))
        case LBox(home, value):
            site = at(home)
            push(Build(lambda v: VBox(v, site)))
            nxt = Eval(value, env, wenv, site)
        case LLetA(var, boxed, body, w0):
            push(Unbox(var, body, env, wenv, world))
            nxt = Eval(boxed, env, wenv, at(w0))
        case LWApp(fn, w):
            push(Instantiate(at(w)))
            nxt = Eval(fn, env, wenv, world)
        case LPack(w, value):
            site = at(w)
            push(Build(lambda v: VPack(site, v)))
            nxt = Eval(value, env, wenv, world)
        case LUnpack(var, package, body, w0):
            push(Open(var, body, env, wenv, world))
            nxt = Eval(package, env, wenv, at(w0))
        case LPrim(op, left, right):
            push(PrimRight(op, right, env, wenv, world))
            nxt = Eval(left, env, wenv, world)
        case LAnno(term):
            nxt = Eval(term, env, wenv, world)
        case other:
            raise MachineFault(F"Cannot evaluate {other!r}")
    st.control = nxt

def _exec(st: MachineState, comp: VComp) -> None:
    if comp.world != st.world:
        raise MachineFault(F"Computation for {comp.world} run at {st.world}")
    env, wenv, world = comp.env, comp.wenv, comp.world
    push = st.kont.append
    match comp.term:
        case LRet(value):
            st.control = Eval(value, env, wenv, world)
        case LBind(var, bound, body):
            push(BindRest(var, body, env, wenv, world))
            st.control = Exec(VComp(bound, env, wenv, world))
        case LGet(target_w, body, ann):
            target = resolve_world(target_w, wenv)
            if target not in st.sites:
                raise MachineFault(F"Unknown site {target}")
            if target != world:
                st.emit(events.GetRequest(world, target))
                log.debug("get from %s to %s", world, target)
                push(Marshal(world, target, close_type(ann, wenv)))
                st.world = target
            st.control = Exec(VComp(body, env, wenv, target))
        case LRef(init, cell):
            push(AllocCell(close_type(cell, wenv)))
            st.control = Eval(init, env, wenv, world)
        case LDeref(ref):
            push(ReadRef())
            st.control = Eval(ref, env, wenv, world)
        case LAssign(ref, value):
            push(AssignTo(value, env, wenv, world))
            st.control = Eval(ref, env, wenv, world)
        case LPrint(arg):
            push(PrintValue())
            st.control = Eval(arg, env, wenv, world)
        case term:
            push(Force())
            st.control = Eval(term, env, wenv, world)

def step(st: MachineState) -> MachineState:
    '''Advance the machine by one transition, in place.

    Stepping a halted machine is a fault.'''
    match st.control:
        case Eval() as c:
            _eval(st, c)
        case Exec(comp):
            _exec(st, comp)
        case Return(value) if st.kont:
            st.kont.pop().resume(st, value)
        case _:
            raise MachineFault("Stepped a halted machine")
    st.steps += 1
    return st

def _drive(st: MachineState) -> Any:
    while not st.halted:
        step(st)
    assert isinstance(st.control, Return)
    return st.control.value

def run(t: L5Term, w: str, st: MachineState, env: Env | None = None,
        result_type: ModalType | None = None) -> tuple[Any, list[Event]]:
    '''Run the computation `t` at site `w`.

    Returns the final value and the events this run appended to the
    trace. With `st.debug` set, the result is classified against
    `result_type`.'''
    if w not in st.sites:
        raise MachineFault(F"Unknown site {w}")
    start = len(st.trace)
    st.world = w
    st.kont = []
    st.control = Exec(VComp(t, dict(env or {}), (), w))
    value = _drive(st)
    if st.world != w:
        raise MachineFault(F"Run ended at {st.world} instead of {w}")
    if st.debug and result_type is not None and not classify(value, result_type, WConst(w), st.sites):
        raise MachineFault(F"Result {summarize(value)} does not classify at {result_type} <{w}>")
    return value, st.trace[start:]

def evaluate(t: L5Term, env: Env, wenv: WEnv, world: str, sites: Sequence[str]) -> Any:
    'Evaluate a pure term on a scratch machine; pure terms leave no trace.'
    st = MachineState(tuple(sites), {}, {}, {}, world=world)
    st.control = Eval(t, env, wenv, world)
    value = _drive(st)
    if st.trace:
        raise MachineFault("Pure evaluation produced events")
    return value

@dataclass
class ProgramResult:
    values: dict[str, Any]
    trace: list[Event]
    output: dict[str, list[str]]
    last: str | None = None

    @property
    def value(self) -> Any:
        'The value of `main`, or of the last declaration'
        name = 'main' if 'main' in self.values else self.last
        return None if name is None else self.values[name]

def run_program(decls: Sequence[Any], config: RunConfig, debug: bool = False) -> ProgramResult:
    '''Run translated declarations in order, each at its own site.

    `decls` are `CoreDecl`s; earlier results are in scope for later ones.'''
    st = init_machine(config)
    st.debug = debug
    env: Env = {}
    last = None
    for decl in decls:
        site = resolve_world(decl.world, ())
        result_type = decl.type.type if isinstance(decl.type, Lax) else None
        value, _ = run(decl.term, site, st, env, result_type)
        log.debug("%s = %s", decl.name, summarize(value))
        env[decl.name] = value
        last = decl.name
    return ProgramResult(env, st.trace, st.output, last)
