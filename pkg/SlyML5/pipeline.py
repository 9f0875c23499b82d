'''Source text to checked, translated and executed programs.

These are the steps behind the command line, usable on their own.'''
from collections.abc import Sequence
from dataclasses import dataclass
import logging

from .config import DEFAULT_CONFIG, RunConfig
from .hl5 import l5_diagnose
from .parser import CoreProgram, parse_core, parse_program
from .pretty import show_core_program
from .runtime import ProgramResult, run_program
from .syntax import WConst
from .translate import CoreDecl, core_context, translate_program
from .typecheck import Derivation, ML5TypeError, Program, Reason, check_program

log = logging.getLogger(__name__)

@dataclass(frozen=True)
class Checked:
    program: Program
    derivations: list[Derivation]

def check_source(text: str, config: RunConfig = DEFAULT_CONFIG) -> Checked:
    'Parse and typecheck; raises `ParseError` or `ML5TypeError`.'
    program = parse_program(text)
    return Checked(program, check_program(program, config.mode, config.sites))

def verify_core(decls: Sequence[CoreDecl], sites: Sequence[str]) -> None:
    '''Check every translated declaration at its declared type and world,
    with the declarations before it in scope. Raises `L5TypeError`.'''
    for i, decl in enumerate(decls):
        l5_diagnose(core_context(decls[:i]), decl.term, decl.type, decl.world, sites)

def translate_source(text: str, config: RunConfig = DEFAULT_CONFIG) -> CoreProgram:
    program = parse_program(text)
    decls = translate_program(program, config.mode, config.sites)
    verify_core(decls, config.sites)
    return CoreProgram(tuple(decls), program.worlds)

def show_core(core: CoreProgram) -> str:
    return show_core_program(core.decls, core.worlds)

def reload_core(text: str, config: RunConfig = DEFAULT_CONFIG) -> CoreProgram:
    'Read back printed L5 and check it again.'
    core = parse_core(text)
    verify_core(core.decls, config.sites)
    return core

def run_source(text: str, config: RunConfig = DEFAULT_CONFIG, debug: bool = False) -> ProgramResult:
    'Translate and run every declaration; `main` must live at the entry site.'
    core = translate_source(text, config)
    for decl in core.decls:
        if decl.name == 'main' and decl.world != WConst(config.entry):
            raise ML5TypeError(Reason.WORLD_MISMATCH, F"main at {decl.world}",
                               F"main at the entry site {config.entry}")
    log.debug("running %d declarations from %s", len(core.decls), config.entry)
    return run_program(core.decls, config, debug)
