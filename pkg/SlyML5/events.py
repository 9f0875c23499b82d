'''Trace events and their line-delimited JSON form.

Every line has the same keys: `seq, kind, from, to, site, handle,
payload`; keys an event does not use are `null`.'''
from collections.abc import Iterable
from dataclasses import dataclass
import json
from typing import ClassVar, TextIO

from .converters import TaggedConverter
from .top_level import RECORD_CONVERTER, from_record, to_record

TRACE_KEYS = ('seq', 'kind', 'from', 'to', 'site', 'handle', 'payload')

class Event:
    kind: ClassVar[str]
    record_keys: ClassVar[dict[str, str]]

    @property
    def sites(self) -> set[str]:
        return {getattr(self, name) for name, key in self.record_keys.items()
                if key in ('from', 'to', 'site')}

@dataclass(frozen=True)
class GetRequest(Event):
    'Control leaves `source` to run a computation at `target`.'
    kind = 'GetRequest'
    record_keys = {'source': 'from', 'target': 'to'}
    source: str
    target: str

@dataclass(frozen=True)
class GetReturn(Event):
    'The marshaled result travels from `source` back to `target`.'
    kind = 'GetReturn'
    record_keys = {'source': 'from', 'target': 'to', 'summary': 'payload'}
    source: str
    target: str
    summary: str

@dataclass(frozen=True)
class Alloc(Event):
    kind = 'Alloc'
    record_keys = {'site': 'site', 'handle': 'handle'}
    site: str
    handle: str

@dataclass(frozen=True)
class Read(Event):
    kind = 'Read'
    record_keys = {'site': 'site', 'handle': 'handle'}
    site: str
    handle: str

@dataclass(frozen=True)
class Write(Event):
    kind = 'Write'
    record_keys = {'site': 'site', 'handle': 'handle'}
    site: str
    handle: str

@dataclass(frozen=True)
class Print(Event):
    kind = 'Print'
    record_keys = {'site': 'site', 'text': 'payload'}
    site: str
    text: str

EFFECTS = (Alloc, Read, Write, Print)

TRACE_CONVERTER = RECORD_CONVERTER.with_(TaggedConverter(Event, TRACE_KEYS))

def effects(trace: Iterable[Event]) -> list[Event]:
    'The trace without its communication events'
    return [e for e in trace if isinstance(e, EFFECTS)]

def serialize_trace(trace: Iterable[Event]) -> str:
    lines = []
    for seq, event in enumerate(trace):
        record = to_record(event, TRACE_CONVERTER)
        assert isinstance(record, dict)
        record['seq'] = seq
        lines.append(json.dumps(record, ensure_ascii=False))
    return ''.join(line + '\n' for line in lines)

def load_trace(lines: Iterable[str] | TextIO) -> list[Event]:
    events: list[Event] = []
    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get('seq') != len(events):
            raise ValueError(F"Trace out of order at seq {record.get('seq')}")
        events.append(from_record(Event, record, TRACE_CONVERTER))
    return events
