"""Command-line entry point.

Exit status: 0 success, 1 configuration error, 2 cross-check failure,
3 domain error (invalid physical input).
"""
import sys

from .config import parse_config
from .exceptions import ConfigError, DickeCorrelationError
from .runner import render

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CROSS_CHECK = 2
EXIT_DOMAIN = 3


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    if any(a in ("-h", "--help") for a in argv):
        from .config import build_parser

        build_parser().print_help(stdout)
        return EXIT_OK
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except DickeCorrelationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_DOMAIN
    try:
        text, verdict = render(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (DickeCorrelationError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_DOMAIN
    if cfg.out:
        try:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"config error: cannot write --out {cfg.out!r}: {exc}", file=stderr)
            return EXIT_CONFIG
    else:
        stdout.write(text)
    if verdict is not None:
        if verdict.passed:
            print(f"cross-check passed; closest call: {verdict.worst}", file=stderr)
        else:
            print(f"cross-check FAILED; worst offender: {verdict.worst}", file=stderr)
            return EXIT_CROSS_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
