from hypothesis import HealthCheck, given, settings
import pytest

from SlyML5 import parse_program
from SlyML5.syntax import *
from SlyML5.typecheck import *

from generators import well_typed
from programs import ACCEPTED, by_name

CLIENT = WConst('client')
SERVER = WConst('server')

def _reason(fn, *args) -> Reason:
    with pytest.raises(ML5TypeError) as info:
        fn(*args)
    return info.value.reason

def test_var_rule():
    ctx = Ctx().extend('x', INT, CLIENT)
    d = check_value(ctx, Var('x'), INT, CLIENT)
    assert d.rule == 'var'
    assert d.root.type == INT and d.root.world == CLIENT

def test_var_world_is_rigid():
    ctx = Ctx().extend('x', INT, SERVER)
    assert _reason(check_value, ctx, Var('x'), INT, CLIENT) is Reason.WORLD_MISMATCH

def test_function_taking_client_ref():
    fn = Lam('r', Ref(INT), Ret(Lit(None)))
    d = check_value(Ctx(), fn, Arrow(Ref(INT), UNIT), CLIENT)
    assert d.rule == 'lam'

def test_get_mobility_gate():
    d = check_expr(Ctx(), Get(SERVER, Ret(Lit(3))), INT, CLIENT)
    assert d.rule == 'get'
    assert d.premises[0].root.world == SERVER
    bad = Get(SERVER, MkRef(Ret(Lit(0))))
    assert _reason(check_expr, Ctx(), bad, Ref(INT), CLIENT) is Reason.NOT_MOBILE

def test_get_closure_not_mobile():
    fn = Ret(Lam('x', INT, Ret(Var('x'))))
    assert _reason(check_expr, Ctx(), Get(SERVER, fn), Arrow(INT, INT), CLIENT) \
        is Reason.NOT_MOBILE

def test_get_boxed_ref_is_mobile():
    e = Get(SERVER, Let('r', MkRef(Ret(Lit(0))), Ret(Hold(SERVER, Var('r')))))
    d = check_expr(Ctx(), e, At(Ref(INT), SERVER), CLIENT)
    assert d.root.type == At(Ref(INT), SERVER)

def test_tethered_case():
    scrutinee = Ret(Anno(Inl(Lit(1)), Sum(INT, INT)))
    e = Case(scrutinee, 'x', Ret(Var('x')), 'y', Ret(Lit(0)))
    d = check_expr(Ctx(), e, INT, CLIENT)
    assert d.rule == 'case'
    assert all(p.root.world == CLIENT for p in d.premises)

def test_case_scrutinee_needs_annotation():
    e = Case(Ret(Inl(Lit(1))), 'x', Ret(Var('x')), 'y', Ret(Lit(0)))
    assert _reason(check_expr, Ctx(), e, INT, CLIENT) is Reason.CONNECTIVE_MISMATCH
    program = parse_program("main : int [client] = case ret (inl 1 : int + int) of inl x => ret x | inr y => ret 0")
    assert [d.rule for d in check_program(program)] == ['case']

def test_case_scrutinee_elsewhere_is_tethering_violation():
    e = Case(Ret(Var('s')), 'x', Ret(Lit(1)), 'y', Ret(Lit(2)), SERVER)
    ctx = Ctx().extend('s', Sum(INT, INT), SERVER)
    for mode in Mode:
        assert _reason(check_expr, ctx, e, INT, CLIENT, mode) is Reason.TETHERING_VIOLATION

def test_value_case_untethered():
    ctx = Ctx().extend('s', Sum(INT, INT), SERVER)
    v = VCase(Var('s'), 'x', Lit(1), 'y', Lit(2), SERVER)
    d = check_value_case(ctx, v, INT, CLIENT)
    assert d.rule == 'vcase-value'
    assert d.root.world == CLIENT
    assert d.premises[0].root.world == SERVER
    assert _reason(check_value_case, ctx, v, INT, CLIENT, Mode.CLASSIC) \
        is Reason.TETHERING_VIOLATION

def test_value_case_tethered_instance():
    scrutinee = Anno(Inl(Lit(1)), Sum(INT, STRING))
    v = VCase(scrutinee, 'x', Var('x'), 'y', Lit(0))
    d = check_value_case(Ctx(), v, INT, CLIENT)
    assert d.root.type == INT

def test_value_case_branch_sees_scrutinee_world():
    # the bound variable lives where the sum did
    ctx = Ctx().extend('s', Sum(INT, INT), SERVER)
    v = VCase(Var('s'), 'x', Var('x'), 'y', Lit(2), SERVER)
    assert _reason(check_value_case, ctx, v, INT, CLIENT) is Reason.WORLD_MISMATCH

def test_vsplit_and_leta_revised_only():
    ctx = Ctx().extend('p', Prod(INT, STRING), SERVER).extend('b', At(INT, SERVER), SERVER)
    split = VSplit(Var('p'), 'a', 'b2', Ret(Lit(0)), SERVER)
    assert check_expr(ctx, split, INT, CLIENT, Mode.REVISED).rule == 'vsplit'
    assert _reason(check_expr, ctx, split, INT, CLIENT) is Reason.TETHERING_VIOLATION
    leta = LetA('x', Var('b'), Ret(Lit(1)), SERVER)
    assert check_expr(ctx, leta, INT, CLIENT, Mode.REVISED).rule == 'leta'
    assert _reason(check_expr, ctx, leta, INT, CLIENT) is Reason.TETHERING_VIOLATION

def test_leta_binds_at_home():
    ctx = Ctx().extend('b', At(INT, SERVER), CLIENT)
    get_back = LetA('x', Var('b'), Get(SERVER, Ret(Var('x'))))
    assert check_expr(ctx, get_back, INT, CLIENT).rule == 'leta'
    use_here = LetA('x', Var('b'), Ret(Var('x')))
    assert _reason(check_expr, ctx, use_here, INT, CLIENT) is Reason.WORLD_MISMATCH

def test_world_abstraction():
    poly = WLam(Hold(WVar(0), Lit(7)))
    A = Forall(At(INT, WVar(0)))
    assert check_value(Ctx(), poly, A, CLIENT).rule == 'wlam'
    inst = check_value(Ctx().extend('f', A, CLIENT), WApp(Var('f'), SERVER), None, CLIENT)
    assert inst.root.type == At(INT, SERVER)

def test_unpack():
    package = Anno(Pack(SERVER, Hold(SERVER, Lit(4))), Exists(At(INT, WVar(0))))
    body = LetA('n', Var('x'), Get(WVar(0), Ret(Var('n'))))
    d = check_expr(Ctx(), Unpack('x', package, body), INT, CLIENT)
    assert d.rule == 'unpack'
    leak = Unpack('x', package, Ret(Var('x')))
    assert _reason(check_expr, Ctx(), leak, None, CLIENT) is Reason.CONNECTIVE_MISMATCH

def test_shamrock_classic_only():
    v = Sham(Lit(3))
    assert check_value(Ctx(), v, Shamrock(INT), CLIENT).rule == 'sham'
    e = Ret(Unsham(Anno(v, Shamrock(INT))))
    assert check_expr(Ctx(), e, INT, SERVER).root.type == INT
    assert _reason(check_value, Ctx(), v, Shamrock(INT), CLIENT, Mode.REVISED) \
        is Reason.CONNECTIVE_MISMATCH

def test_sham_body_must_be_portable():
    ctx = Ctx().extend('x', INT, CLIENT)
    assert _reason(check_value, ctx, Sham(Var('x')), Shamrock(INT), CLIENT) \
        is Reason.WORLD_MISMATCH

def test_error_reasons():
    assert _reason(check_expr, Ctx(), Ret(Var('nope')), INT, CLIENT) \
        is Reason.UNBOUND_VARIABLE
    assert _reason(check_expr, Ctx(), Ret(Ret(Lit(1))), INT, CLIENT) is Reason.NOT_A_VALUE
    assert _reason(check_expr, Ctx(), Ret(Lit('s')), INT, CLIENT) \
        is Reason.CONNECTIVE_MISMATCH
    # values need ret in expression position
    assert _reason(check_expr, Ctx(), Lit(1), INT, CLIENT) is Reason.CONNECTIVE_MISMATCH
    # sums need a known type
    assert _reason(check_expr, Ctx(), Print(Ret(Inl(Lit(1)))), UNIT, CLIENT) \
        is Reason.CONNECTIVE_MISMATCH

def test_unknown_site():
    checker = Checker(Mode.CLASSIC, ['client', 'server'])
    e = Get(WConst('db'), Ret(Lit(1)))
    assert _reason(checker.expr, Ctx(), e, INT, CLIENT) is Reason.UNBOUND_VARIABLE

def test_check_program():
    assert check_program(Program()) == []
    program = parse_program("main : unit [client] = ret ()")
    ds = check_program(program)
    assert len(ds) == 1
    assert ds[0].root.type == UNIT

def test_later_decls_see_earlier():
    program = parse_program('''
        n : int [server] = ret 20
        main : int [client] = get[server] (ret n + ret 1)
    ''')
    assert [d.rule for d in check_program(program)] == ['ret', 'get']

def test_program_error_location():
    source = by_name('get_ref')
    with pytest.raises(ML5TypeError) as info:
        check_program(parse_program(source.text), source.mode, source.sites)
    err = info.value
    assert err.reason is Reason.NOT_MOBILE
    assert err.decl == 'main'
    assert err.location is not None and err.location.line == 3
    assert str(err).startswith('NotMobile: ref int')
    assert 'main:3:' in str(err)

def test_revised_accepts_classic_corpus():
    for source in ACCEPTED:
        if source.mode is Mode.CLASSIC:
            program = parse_program(source.text)
            check_program(program, Mode.REVISED, source.sites)

def _assert_tethered(d: Derivation):
    for node in d.walk():
        if node.rule == 'case':
            assert all(p.root.world == node.root.world for p in node.premises)

def test_classic_cases_are_tethered():
    for source in ACCEPTED:
        if source.mode is Mode.CLASSIC:
            for d in check_program(parse_program(source.text), Mode.CLASSIC, source.sites):
                _assert_tethered(d)

@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(well_typed())
def test_generated_terms_typecheck(sample):
    e, A, w = sample
    d = check_expr(Ctx(), e, A, w)
    assert d.root.type == A and d.root.world == w
    _assert_tethered(d)
    assert check_expr(Ctx(), e, A, w) == d

@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(well_typed())
def test_weakening(sample):
    e, A, w = sample
    d = check_expr(Ctx(), e, A, w)
    for extra, at in ((Ref(INT), SERVER), (Arrow(INT, STRING), w), (At(UNIT, CLIENT), w)):
        weaker = check_expr(Ctx().extend('unused', extra, at), e, A, w)
        assert weaker.root.type == d.root.type
        assert [n.rule for n in weaker.walk()] == [n.rule for n in d.walk()]

@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(well_typed(Mode.REVISED, ('client', 'server', 'db')))
def test_generated_revised_terms_typecheck(sample):
    e, A, w = sample
    d = Checker(Mode.REVISED, ['client', 'server', 'db']).expr(Ctx(), e, A, w)
    assert d.root.type == A
