from SlyML5 import ML5TypeError, Reason, check_source, run_source, summarize
from SlyML5.events import GetRequest, GetReturn

source = '''
inc : int -> int [server] = ret (lam (n : int). ret n + ret 1)
main : int [client] = get[server] ((ret inc) (ret 41))
'''

def test_in_one_line():

    assert summarize(run_source(source).value) == '42'

def test_readme():

    result = run_source(source)

    assert summarize(result.value) == '42'
    assert result.trace == [
        GetRequest('client', 'server'),
        GetReturn('server', 'client', '42'),
    ]

    # ...

    try:
        check_source("main : ref int [client] = get[server] (ref (ret 0))")
    except ML5TypeError as err:
        assert err.reason is Reason.NOT_MOBILE
    else:
        assert False
