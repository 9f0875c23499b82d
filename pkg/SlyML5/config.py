'Run configuration: the site set, the entry site and the checking mode.'
from dataclasses import dataclass, field, replace
import logging
from pathlib import Path
import tomllib

from .top_level import from_record
from .typecheck import Mode

log = logging.getLogger(__name__)

class ConfigError(ValueError):
    'An invalid run configuration'

@dataclass(frozen=True)
class RunConfig:
    '''Declared in a small TOML file:

        sites = ["client", "server"]
        entry = "client"
        mode = "classic"
    '''
    sites: tuple[str, ...] = field(default=('client', 'server'))
    entry: str = 'client'
    mode: Mode = Mode.CLASSIC

    def __post_init__(self):
        if not self.sites:
            raise ConfigError("A configuration needs at least one site")
        if len(set(self.sites)) != len(self.sites):
            raise ConfigError(F"Duplicate site names in {list(self.sites)}")
        if self.entry not in self.sites:
            raise ConfigError(F"Entry site {self.entry} is not one of {list(self.sites)}")

    def with_mode(self, mode: Mode | None) -> 'RunConfig':
        return self if mode is None else replace(self, mode=mode)

DEFAULT_CONFIG = RunConfig()

def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, 'rb') as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as err:
        raise ConfigError(F"Cannot read configuration {path}: {err}") from err
    try:
        config = from_record(RunConfig, data)
    except TypeError as err:
        raise ConfigError(F"Bad configuration {path}: {err}") from err
    log.debug("loaded %s", config)
    return config
