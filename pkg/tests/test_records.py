from dataclasses import asdict, dataclass, field

import pytest

from SlyML5 import Mode, RunConfig, from_record, to_record
from SlyML5.events import TRACE_CONVERTER, GetReturn, Print

def test_scalars():
    for x in (None, 1, "hi", True):
        assert x == from_record(type(x), x)
        assert x == to_record(x)

def test_bool_is_not_int():
    with pytest.raises(TypeError):
        from_record(int, True)

def test_list_and_tuple():
    assert [1, 2] == from_record(list[int], [1, 2])
    assert ('a', 'b') == from_record(tuple[str, ...], ['a', 'b'])
    assert ['a', 'b'] == to_record(('a', 'b'))
    with pytest.raises(TypeError):
        from_record(tuple[str, ...], 'ab')

def test_enum():
    assert Mode.REVISED == from_record(Mode, 'revised')
    assert 'classic' == to_record(Mode.CLASSIC)
    with pytest.raises(TypeError) as info:
        from_record(Mode, 'lenient')
    assert 'classic' in str(info.value)

def test_union():
    assert 1 == from_record(int | None, 1)
    assert None is from_record(int | None, None)
    with pytest.raises(TypeError):
        from_record(int | None, 'one')

def test_dataclass():
    @dataclass
    class Test:
        a: int
        b: str
        c: list[str] = field(default_factory=list)

    x = Test(1, "hi", ['x'])
    assert x == from_record(Test, asdict(x))
    assert asdict(x) == to_record(x)
    assert Test(2, "") == from_record(Test, {'a': 2, 'b': ""})

def test_dataclass_is_strict():
    @dataclass
    class Test:
        a: int

    with pytest.raises(TypeError):
        from_record(Test, {'a': 1, 'b': 2})
    with pytest.raises(TypeError):
        from_record(Test, {})
    with pytest.raises(TypeError):
        from_record(Test, [1])

def test_run_config():
    config = from_record(RunConfig, {'sites': ['a', 'b'], 'entry': 'b', 'mode': 'revised'})
    assert config == RunConfig(('a', 'b'), 'b', Mode.REVISED)
    assert to_record(config) == {'sites': ['a', 'b'], 'entry': 'b', 'mode': 'revised'}

def test_tagged_records():
    event = GetReturn('server', 'client', '3')
    record = to_record(event, TRACE_CONVERTER)
    assert record == {'seq': None, 'kind': 'GetReturn', 'from': 'server', 'to': 'client',
                      'site': None, 'handle': None, 'payload': '3'}
    assert event == from_record(GetReturn, record, TRACE_CONVERTER)

def test_tagged_records_check_kind():
    record = to_record(Print('client', 'hi'), TRACE_CONVERTER)
    with pytest.raises(TypeError):
        from_record(GetReturn, record, TRACE_CONVERTER)
    with pytest.raises(TypeError):
        from_record(Print, {**record, 'kind': 'Shout'}, TRACE_CONVERTER)
    with pytest.raises(TypeError):
        from_record(Print, {**record, 'extra': 1}, TRACE_CONVERTER)

def test_errors_name_the_key():
    with pytest.raises(TypeError) as info:
        from_record(RunConfig, {'sites': ['a', 2], 'entry': 'a'})
    assert str(info.value).startswith('At sites.1: expected str')
