'Command line driver: `slyml5 check|translate|run FILE`.'
import argparse
import logging
from pathlib import Path
import sys

from .config import DEFAULT_CONFIG, ConfigError, RunConfig, load_config
from .events import serialize_trace
from .hl5 import L5TypeError
from .parser import ParseError
from .pipeline import check_source, run_source, show_core, translate_source
from .typecheck import ML5TypeError, Mode
from .values import MachineFault, summarize

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='slyml5', description="Check, translate and run ML5 programs.")
    ap.add_argument('--config', type=Path, help="TOML file with sites, entry and mode")
    ap.add_argument('--mode', choices=[m.value for m in Mode],
                    help="checking mode; overrides the configuration file")
    ap.add_argument('-v', '--verbose', action='store_true', help="log at debug level")
    commands = ap.add_subparsers(dest='command', required=True)

    check = commands.add_parser('check', help="typecheck a program")
    check.add_argument('file', type=Path)

    translate = commands.add_parser('translate', help="print the L5 translation")
    translate.add_argument('file', type=Path)

    run = commands.add_parser('run', help="run a program on the simulated sites")
    run.add_argument('file', type=Path)
    run.add_argument('--trace', type=Path, help="write the event trace here, one JSON object per line")
    run.add_argument('--debug', action='store_true', help="classify results while running")
    return ap

def _config(args: argparse.Namespace) -> RunConfig:
    config = DEFAULT_CONFIG if args.config is None else load_config(args.config)
    return config.with_mode(None if args.mode is None else Mode(args.mode))

def _command(args: argparse.Namespace) -> None:
    config = _config(args)
    text = args.file.read_text(encoding='utf-8')
    match args.command:
        case 'check':
            checked = check_source(text, config)
            for decl in checked.program.decls:
                print(F"{decl.name} : {decl.type} [{decl.world}]")
        case 'translate':
            print(show_core(translate_source(text, config)), end='')
        case 'run':
            result = run_source(text, config, args.debug)
            for site in config.sites:
                for line in result.output.get(site, []):
                    print(F"[{site}] {line}")
            if args.trace is not None:
                args.trace.write_text(serialize_trace(result.trace), encoding='utf-8')
            print(summarize(result.value))

def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        _command(args)
    except ParseError as err:
        print(F"ParseError: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (ML5TypeError, ConfigError) as err:
        print(err, file=sys.stderr)
        return EXIT_TYPE
    except OSError as err:
        print(F"{args.file}: {err.strerror}", file=sys.stderr)
        return EXIT_TYPE
    except (L5TypeError, MachineFault, AssertionError) as err:
        log.debug("internal invariant violated", exc_info=True)
        print(F"Internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK

if __name__ == '__main__':
    sys.exit(main())
