import pytest

from SlyML5 import ConfigError, Mode, RunConfig, load_config
from SlyML5.config import DEFAULT_CONFIG

def test_defaults():
    assert DEFAULT_CONFIG.sites == ('client', 'server')
    assert DEFAULT_CONFIG.entry == 'client'
    assert DEFAULT_CONFIG.mode is Mode.CLASSIC

def test_invalid():
    with pytest.raises(ConfigError):
        RunConfig(())
    with pytest.raises(ConfigError):
        RunConfig(('a', 'a'), 'a')
    with pytest.raises(ConfigError):
        RunConfig(('a', 'b'), 'c')

def test_with_mode():
    assert DEFAULT_CONFIG.with_mode(None) is DEFAULT_CONFIG
    revised = DEFAULT_CONFIG.with_mode(Mode.REVISED)
    assert revised.mode is Mode.REVISED
    assert revised.sites == DEFAULT_CONFIG.sites

def test_load_config(tmp_path):
    path = tmp_path / 'sites.toml'
    path.write_text('sites = ["client", "server", "db"]\nmode = "revised"\n')
    config = load_config(path)
    assert config == RunConfig(('client', 'server', 'db'), 'client', Mode.REVISED)

def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'missing.toml')
    bad = {
        'syntax.toml': 'sites = [',
        'extra.toml': 'sites = ["a"]\nentry = "a"\ncolour = "blue"\n',
        'mode.toml': 'mode = "lenient"\n',
        'entry.toml': 'sites = ["a"]\n',
        'types.toml': 'sites = "client"\n',
    }
    for name, text in bad.items():
        path = tmp_path / name
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_config(path)
