'Typecheck, translate and run ML5 programs on simulated network sites.'
from .pipeline import \
    check_source as check_source, \
    translate_source as translate_source, \
    run_source as run_source

from .parser import \
    ParseError as ParseError, \
    parse_program as parse_program, \
    parse_core as parse_core

from .typecheck import \
    Mode as Mode, \
    Reason as Reason, \
    ML5TypeError as ML5TypeError, \
    check_program as check_program

from .translate import \
    trans_type as trans_type, \
    translate_program as translate_program

from .hl5 import \
    L5TypeError as L5TypeError, \
    l5_check as l5_check, \
    classify as classify

from .runtime import \
    run as run, \
    run_program as run_program

from .config import \
    RunConfig as RunConfig, \
    ConfigError as ConfigError, \
    load_config as load_config

from .events import \
    serialize_trace as serialize_trace, \
    load_trace as load_trace

from .values import \
    MachineFault as MachineFault, \
    MarshalError as MarshalError, \
    summarize as summarize

from .top_level import \
    from_record as from_record, \
    to_record as to_record
