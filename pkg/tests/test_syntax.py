from hypothesis import given, strategies as st

from SlyML5.syntax import *

SERVER = WConst('server')
CLIENT = WConst('client')

def test_mobile_table():
    assert mobile(INT)
    assert mobile(UNIT)
    assert not mobile(Ref(INT))
    assert not mobile(Arrow(INT, INT))
    assert mobile(At(Arrow(INT, INT), CLIENT))
    assert mobile(At(Ref(INT), SERVER))
    assert mobile(Shamrock(Ref(INT)))
    assert mobile(Prod(INT, At(Ref(INT), SERVER)))
    assert not mobile(Prod(INT, Ref(INT)))
    assert not mobile(Sum(Arrow(INT, INT), INT))
    assert mobile(Forall(At(INT, WVar(0))))
    assert not mobile(Exists(Ref(INT)))
    assert not mobile(Lax(INT))

_types = st.recursive(st.sampled_from(BASE_TYPES), lambda _types: st.one_of(
    st.builds(Arrow, _types, _types),
    st.builds(Prod, _types, _types),
    st.builds(Sum, _types, _types),
    st.builds(At, _types, st.sampled_from([CLIENT, SERVER])),
    st.builds(Forall, _types),
    st.builds(Exists, _types),
    st.builds(Ref, _types),
    st.builds(Shamrock, _types),
), max_leaves=8)

@given(_types, _types)
def test_mobile_compositional(A, B):
    assert mobile(Prod(A, B)) == (mobile(A) and mobile(B))
    assert mobile(Sum(A, B)) == (mobile(A) and mobile(B))
    assert mobile(Forall(A)) == mobile(A)
    assert mobile(Exists(A)) == mobile(A)
    assert mobile(At(A, SERVER))
    assert not mobile(Arrow(A, B))
    assert not mobile(Ref(A))

def test_wf_type():
    assert wf_type(0, Forall(At(INT, WVar(0))))
    assert not wf_type(0, At(INT, WVar(0)))
    assert wf_type(1, At(INT, WVar(0)))
    assert not wf_type(1, Forall(At(INT, WVar(2))))
    assert wf_type(0, At(INT, SERVER))

def test_subst_world():
    assert subst_world(At(INT, WVar(0)), SERVER) == At(INT, SERVER)
    assert subst_world(INT, CLIENT) == INT
    assert subst_world(Forall(At(INT, WVar(1))), SERVER) == Forall(At(INT, SERVER))
    # bound occurrences stay bound
    assert subst_world(Forall(At(INT, WVar(0))), SERVER) == Forall(At(INT, WVar(0)))
    # outer variables move down past the removed binder
    assert subst_world(Prod(At(INT, WVar(0)), At(INT, WVar(1))), SERVER) \
        == Prod(At(INT, SERVER), At(INT, WVar(0)))

def test_subst_world_closed_identity():
    for A in (INT, At(Ref(INT), SERVER), Arrow(INT, Lax(UNIT)), Forall(At(INT, WVar(0)))):
        assert subst_world(A, CLIENT) == A

def test_shift():
    assert shift(At(INT, WVar(0))) == At(INT, WVar(1))
    assert shift(Forall(At(INT, WVar(0)))) == Forall(At(INT, WVar(0)))
    assert shift(shift(At(INT, WVar(2)), 2), -2) == At(INT, WVar(2))

def test_is_value():
    assert is_value(Lit(3))
    assert is_value(Var('x'))
    assert is_value(Lam('x', INT, Ret(Var('x'))))
    assert is_value(Pair(Lit(1), Hold(SERVER, Lit('s'))))
    assert is_value(WLam(Hold(WVar(0), Lit(1))))
    assert not is_value(Ret(Lit(1)))
    assert not is_value(Pair(Lit(1), Get(SERVER, Ret(Lit(1)))))
    assert not is_value(LetA('x', Var('b'), Ret(Var('x'))))
    assert is_value(LetA('x', Var('b'), Var('x')))

def test_subst_term():
    t = Lam('y', INT, App(Ret(Var('f')), Ret(Var('x'))))
    assert subst_term(t, 'x', Lit(1)) == Lam('y', INT, App(Ret(Var('f')), Ret(Lit(1))))
    # the bound variable shadows
    assert subst_term(Lam('x', INT, Ret(Var('x'))), 'x', Lit(1)) \
        == Lam('x', INT, Ret(Var('x')))

def test_subst_term_avoids_capture():
    t = Lam('y', INT, Ret(Pair(Var('x'), Var('y'))))
    out = subst_term(t, 'x', Var('y'))
    assert isinstance(out, Lam)
    assert out.var != 'y'
    assert out.body == Ret(Pair(Var('y'), Var(out.var)))

def test_subst_term_shifts_under_world_binders():
    t = WLam(Hold(WVar(0), Var('x')))
    out = subst_term(t, 'x', Hold(WVar(0), Lit(1)))
    assert out == WLam(Hold(WVar(0), Hold(WVar(1), Lit(1))))

def test_free_vars():
    t = Let('x', Ret(Var('a')), App(Ret(Var('x')), Ret(Var('b'))))
    assert free_vars(t) == {'a', 'b'}

def test_ctx_lookup_and_worlds():
    ctx = Ctx().extend('x', INT, CLIENT).extend('x', STRING, SERVER)
    assert ctx.lookup('x') == Hyp('x', STRING, SERVER)
    assert ctx.lookup('y') is None
    inner = Ctx(1).extend('b', At(INT, WVar(0)), WVar(0)).extend_world()
    assert inner.delta == 2
    assert inner.lookup('b') == Hyp('b', At(INT, WVar(1)), WVar(1))
    assert inner.wf()
    assert not Ctx().extend('b', INT, WVar(0)).wf()
