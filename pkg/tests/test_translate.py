from dataclasses import replace

from hypothesis import HealthCheck, given, settings
import pytest

from SlyML5 import parse_program
from SlyML5.config import RunConfig
from SlyML5.events import effects
from SlyML5.hl5 import *
from SlyML5.pipeline import reload_core, show_core, translate_source, verify_core
from SlyML5.runtime import run_program
from SlyML5.syntax import *
from SlyML5.translate import *
from SlyML5.typecheck import *
from SlyML5.values import summarize

from generators import open_well_typed, well_typed
from programs import ACCEPTED

CLIENT = WConst('client')
SERVER = WConst('server')

def test_trans_type():
    assert trans_type(INT) == INT
    assert trans_type(Arrow(Ref(INT), UNIT)) == Arrow(Ref(INT), Lax(UNIT))
    assert trans_type(Shamrock(INT)) == Forall(At(INT, WVar(0)))
    assert trans_type(Arrow(INT, Arrow(INT, INT))) == Arrow(INT, Lax(Arrow(INT, Lax(INT))))
    assert trans_type(At(Arrow(INT, INT), SERVER)) == At(Arrow(INT, Lax(INT)), SERVER)

def test_trans_value():
    lit = trans_value(check_value(Ctx(), Lit(3), INT, CLIENT))
    assert (lit.l5term, lit.l5type, lit.world) == (LLit(3), INT, CLIENT)

    ident = trans_value(check_value(Ctx(), Lam('x', INT, Ret(Var('x'))), Arrow(INT, INT), CLIENT))
    assert ident.l5term == LLam('x', INT, LRet(LVar('x')), Lax(INT))
    assert ident.l5type == Arrow(INT, Lax(INT))
    assert l5_check(Ctx(), ident.l5term, ident.l5type, CLIENT)

    sham = trans_value(check_value(Ctx(), Sham(Lit(5)), Shamrock(INT), CLIENT))
    assert sham.l5term == LWLam(LBox(WVar(0), LLit(5)))
    assert l5_check(Ctx(), sham.l5term, sham.l5type, CLIENT)

def test_trans_expr():
    got = trans_expr(check_expr(Ctx(), Get(SERVER, Ret(Lit(3))), INT, CLIENT))
    assert got.l5term == LGet(SERVER, LRet(LLit(3)), INT)
    assert got.l5type == Lax(INT)
    assert l5_check(Ctx(), got.l5term, got.l5type, CLIENT)

    unit = trans_expr(check_expr(Ctx(), Ret(Lit(None)), UNIT, CLIENT))
    assert unit.l5term == LRet(LLit(None))
    assert unit.l5type == Lax(UNIT)

def test_trans_tethered_case():
    scrutinee = Ret(Anno(Inl(Lit(1)), Sum(INT, INT)))
    e = Case(scrutinee, 'x', Ret(Var('x')), 'y', Ret(Lit(0)))
    out = trans_expr(check_expr(Ctx(), e, INT, CLIENT)).l5term
    assert isinstance(out, LBind)
    assert out.bound == LRet(LAnno(LInl(LLit(1)), Sum(INT, INT)))
    assert isinstance(out.body, LCase)
    assert out.body.scrutinee == LVar(out.var)
    assert out.body.world is None

def test_translate_program_types():
    program = parse_program('''
        inc : int -> int [server] = ret (lam (n : int). ret n + ret 1)
        main : int [client] = get[server] ((ret inc) (ret 41))
    ''')
    decls = translate_program(program)
    assert [d.type for d in decls] == [Lax(Arrow(INT, Lax(INT))), Lax(INT)]
    assert [d.world for d in decls] == [SERVER, CLIENT]
    verify_core(decls, ['client', 'server'])

def _check_all_subderivations(d: Derivation, sites):
    for node in d.walk():
        j = node.root
        if j.kind is Kind.VALUE:
            result = trans_value(node)
        else:
            result = trans_expr(node)
        assert result.world == j.world
        l5_diagnose(trans_ctx(j.ctx), result.l5term, result.l5type, j.world, sites)

def test_type_preservation_corpus():
    assert len(ACCEPTED) >= 30
    for source in ACCEPTED:
        program = parse_program(source.text)
        verify_core(translate_program(program, source.mode, source.sites), source.sites)
        if source.mode is Mode.REVISED:
            program = desugar_shamrock(program)
        for d in check_program(program, source.mode, source.sites):
            _check_all_subderivations(d, source.sites)

@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(well_typed())
def test_type_preservation_generated(sample):
    e, A, w = sample
    result = trans_expr(check_expr(Ctx(), e, A, w))
    assert result.l5type == Lax(trans_type(A))
    l5_diagnose(Ctx(), result.l5term, result.l5type, w)

@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(well_typed(Mode.REVISED, ('client', 'server', 'db')))
def test_type_preservation_generated_revised(sample):
    e, A, w = sample
    sites = ['client', 'server', 'db']
    d = Checker(Mode.REVISED, sites).expr(Ctx(), e, A, w)
    _check_all_subderivations(d, sites)

@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(open_well_typed())
def test_translation_commutes_with_substitution(sample):
    e, A, w, x, B, v = sample
    opened = trans_expr(check_expr(Ctx().extend(x, B, w), e, A, w)).l5term
    value = trans_value(check_value(Ctx(), v, B, w)).l5term
    closed = trans_expr(check_expr(Ctx(), subst_term(e, x, v), A, w)).l5term
    assert alpha_equal(closed, subst_l5(opened, x, value))

def test_show_core_round_trip():
    for source in ACCEPTED:
        core = translate_source(source.text, source.config)
        again = reload_core(show_core(core), source.config)
        assert show_core(again) == show_core(core), source.name

# -- shamrock

def test_desugar_identity_without_shamrock():
    program = parse_program("main : int [client] = get[server] (ret 1)")
    assert desugar_shamrock(program) is program

def test_desugar_types():
    program = parse_program('''
        a : shamrock int [client] = ret (sham w. 1)
        b : shamrock shamrock int [client] = ret (sham w. sham v. 2)
    ''')
    out = desugar_shamrock(program)
    assert out.decls[0].type == Forall(At(INT, WVar(0)))
    assert out.decls[1].type == Forall(At(Forall(At(INT, WVar(0))), WVar(0)))
    assert out.decls[0].term == Ret(WLam(Hold(WVar(0), Lit(1))))

def test_desugar_checks_in_revised_mode():
    for source in ACCEPTED:
        if source.uses_shamrock():
            program = desugar_shamrock(parse_program(source.text))
            check_program(program, Mode.REVISED, source.sites)

def _run(program: Program, config: RunConfig):
    decls = translate_program(program, config.mode, config.sites)
    result = run_program(decls, config, debug=True)
    return summarize(result.value), result.trace

def test_shamrock_coherence():
    shamrock = [s for s in ACCEPTED if s.uses_shamrock()]
    assert shamrock
    for source in shamrock:
        program = parse_program(source.text)
        for sites in (source.sites, source.sites + ('db',)):
            classic = _run(program, RunConfig(sites, 'client', Mode.CLASSIC))
            revised = _run(program, RunConfig(sites, 'client', Mode.REVISED))
            assert classic == revised, source.name
            assert classic[0] == source.value

# -- case elaboration

def test_untethered_case_same_world():
    out = elaborate_untethered_case(Var('s'), CLIENT, 'x', Ret(Lit(1)), 'y', Ret(Lit(2)),
                                    INT, CLIENT)
    assert out == Case(Ret(Var('s')), 'x', Ret(Lit(1)), 'y', Ret(Lit(2)))

def test_untethered_case_across_worlds():
    out = elaborate_untethered_case(Var('s'), SERVER, 'x', Ret(Lit(1)), 'y', Ret(Lit(2)),
                                    INT, CLIENT)
    ctx = Ctx().extend('s', Sum(INT, INT), SERVER)
    d = check_expr(ctx, out, INT, CLIENT)
    assert d.rule == 'get'

def test_untethered_case_needs_mobile_conclusion():
    with pytest.raises(ML5TypeError) as info:
        elaborate_untethered_case(Var('s'), SERVER, 'x', Ret(Lit(1)), 'y', Ret(Lit(2)),
                                  Ref(INT), CLIENT)
    assert info.value.reason is Reason.NOT_MOBILE

def _untethered(t: Node) -> bool:
    if isinstance(t, (VCase, VSplit)) or (isinstance(t, LetA) and t.world is not None):
        return True
    return any(isinstance(v, Node) and _untethered(v) for _, v in node_fields(t))

ELABORATION_PROGRAMS = [
    ('client server', '''
        s : int + string [server] = ret (inl 20 : int + string)
        main : int [client] = vcase[server] s of
            inl n => (let u = print (ret "left") in get[server] (ret n + ret 1))
          | inr t => ret 0
    '''),
    ('client server db', '''
        s : int + int [db] = ret (inr 5 : int + int)
        main : int [client] =
          vcase[db] s of inl a => ret 0 | inr b => get[db] (ret b * ret 2)
    '''),
    ('client server', '''
        main : string [client] =
          vcase (inr "here" : int + string) of inl a => ret "there" | inr b => ret b
    '''),
]

def _revised_sources():
    for source in ACCEPTED:
        if source.mode is Mode.REVISED:
            yield source.name, source.sites, source.text
    for i, (sites, text) in enumerate(ELABORATION_PROGRAMS):
        yield F"elaboration-{i}", tuple(sites.split()), text

def test_untethered_cases_derivable_in_classic():
    elaborated = 0
    for name, sites, text in _revised_sources():
        program = desugar_shamrock(parse_program(text))
        classic = elaborate_program_cases(program, sites)
        if any(_untethered(d.term) for d in classic.decls):
            continue
        elaborated += 1
        check_program(classic, Mode.CLASSIC, sites)
        value, trace = _run(program, RunConfig(sites, 'client', Mode.REVISED))
        value2, trace2 = _run(classic, RunConfig(sites, 'client', Mode.CLASSIC))
        assert value == value2, name
        assert effects(trace) == effects(trace2), name
    assert elaborated >= len(ELABORATION_PROGRAMS) + 1

def test_tethered_cases_derivable_in_revised():
    cases = 0
    for source in ACCEPTED:
        if source.mode is not Mode.CLASSIC:
            continue
        program = parse_program(source.text)
        revised = elaborate_tethered_cases(program)
        if revised == program:
            continue
        cases += 1
        derivations = check_program(revised, Mode.REVISED, source.sites)
        assert not any(n.rule == 'case' for d in derivations for n in d.walk())
        before = _run(program, source.config)
        after = _run(revised, replace(source.config, mode=Mode.REVISED))
        assert before == after, source.name
    assert cases >= 2

def test_elaborate_tethered_case_shape():
    e = Case(Ret(Var('s')), 'x', Ret(Var('x')), 'y', Ret(Lit(0)))
    out = elaborate_tethered_case(e)
    assert isinstance(out, Let) and isinstance(out.body, VCase)
    assert out.bound == Ret(Var('s'))
    assert out.body.scrutinee == Var(out.var)
    assert out.var not in ('x', 'y')
