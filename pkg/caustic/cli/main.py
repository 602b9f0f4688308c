"""Main CLI entry point for the relation engine"""
import functools
import logging
import sys
from typing import Callable, List, Optional

import click

from ..core.adjacency import JTable
from ..core.dsl import parse_expression
from ..core.engine import RelationEngine
from ..core.errors import CausticError
from ..core.fixtures import load_fixtures, verify_all
from ..core.parity import (
    ParityStatement, check_congruences, check_statement, dimension_checks, raw_congruences,
    reduced_basis, report_isolated_point_parities,
)
from ..core.relations import Hypothesis
from ..core.types import GENERATORS, MIXED
from ..utils.config import ConfigError, RunConfig, load_config
from ..utils.output import format_formulas, render, safe_json_dumps, status_table

logging.basicConfig(level=logging.WARNING, stream=sys.stderr)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def output_options(func: Callable) -> Callable:
    """--json / --text の切り替え"""
    func = click.option('--text', 'output_format', flag_value='text', default=True,
                        help='DSL / plain text output (default)')(func)
    return click.option('--json', 'output_format', flag_value='json',
                        help='JSON output')(func)


def handles_errors(func: Callable) -> Callable:
    """CausticError を構造化エラーとして出力し、終了コード2を返す"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CausticError as e:
            logger.debug(f"{func.__name__} failed", exc_info=True)
            if kwargs.get('output_format') == 'json':
                click.echo(safe_json_dumps(e.to_dict()))
            else:
                click.echo(f"Error: {e.message}", err=True)
            return EXIT_ERROR

    return wrapper


def _emit(config: RunConfig, data, text: str):
    click.echo(safe_json_dumps(data) if config.json else text)


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Verbose output')
def cli(verbose: bool):
    """Euler characteristic relations for Lagrangian multisingularities

    ラグランジュ写像の多重特異点の多様体のオイラー標数の間の普遍的な関係式
    """
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


@cli.command()
@click.option('--dim', type=int, default=5, help='Target dimension n (3, 4 or 5)')
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@click.option('--parametric', is_flag=True, help='Lift to symbolic-k formulas')
@output_options
@handles_errors
def derive(dim: int, a1_max: Optional[int], parametric: bool, output_format: str):
    """Solve the relation system for n and print the formulas"""
    config = load_config(dim=dim, a1_max=a1_max, output_format=output_format)
    engine = RelationEngine(a1_max=config.a1_max)
    if parametric:
        formulas = engine.parametric(config.dim)
        directives = [f"@dim {config.dim}", "@family k", "@symbols signed"]
    else:
        formulas = engine.solved(config.dim)
        directives = [f"@dim {config.dim}", "@symbols signed"]
    data = {"dim": config.dim, "a1_max": config.a1_max, "parametric": parametric,
            "formulas": [f.to_dict() for f in formulas]}
    _emit(config, data, format_formulas(formulas, directives))
    return EXIT_OK


@cli.command()
@click.option('--dim', type=int, default=5, help='Target dimension n (3, 4 or 5)')
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@output_options
@handles_errors
def ca(dim: int, a1_max: Optional[int], output_format: str):
    """Print relations between the Euler characteristics of A^ca"""
    config = load_config(dim=dim, a1_max=a1_max, output_format=output_format)
    formulas = RelationEngine(a1_max=config.a1_max).ca(config.dim)
    data = {"dim": config.dim, "a1_max": config.a1_max, "formulas": [f.to_dict() for f in formulas]}
    _emit(config, data, format_formulas(formulas, [f"@dim {config.dim}", "@symbols signed"]))
    return EXIT_OK


@cli.command()
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@output_options
@handles_errors
def collapse(a1_max: Optional[int], output_format: str):
    """Print the sign-collapsed relations for caustics in 5-space"""
    config = load_config(a1_max=a1_max, output_format=output_format)
    formulas = RelationEngine(a1_max=config.a1_max).collapsed()
    data = {"dim": 5, "a1_max": config.a1_max, "formulas": [f.to_dict() for f in formulas]}
    _emit(config, data, format_formulas(formulas, ["@dim 5", "@symbols caustic"]))
    return EXIT_OK


@cli.command()
@click.option('--dim', type=int, default=5, help='Target dimension n (3, 4 or 5)')
@click.option('--hypothesis', default=None, help='Hypothesis level H0, H1 or H2')
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@click.option('--fixtures', 'fixture_path', type=click.Path(), default=None,
              help='Fixture directory with the congruences to check')
@output_options
@handles_errors
def congruences(dim: int, hypothesis: Optional[str], a1_max: Optional[int],
                fixture_path: Optional[str], output_format: str):
    """Extract mod-2 congruences and check the listed ones against their span"""
    config = load_config(dim=dim, hypothesis=hypothesis, a1_max=a1_max,
                         output_format=output_format, fixture_path=fixture_path)
    engine = RelationEngine(a1_max=config.a1_max)
    formulas = engine.ca(config.dim)
    raw = raw_congruences(formulas, config.hypothesis)
    basis = reduced_basis(raw)
    checks = []
    if config.dim == 5:
        targets = load_fixtures(config.fixture_path).congruences
        checks = check_congruences(formulas, targets)
    failed = [c for c in checks
              if not c.implied or c.hypothesis.rank > config.hypothesis.rank]

    data = {
        "dim": config.dim,
        "hypothesis": config.hypothesis.value,
        "raw": [{"congruence": c.format(), "source": c.source} for c in raw],
        "basis": [{"congruence": c.format(), "witness": c.source} for c in basis],
        "checks": [c.to_dict() for c in checks],
    }
    lines = [f"# raw congruences ({config.hypothesis.value})"]
    lines += [f"{c.format()}    # {c.source}" for c in raw]
    lines.append("# reduced basis")
    lines += [f"{c.format()}    # {c.source}" for c in basis]
    if checks:
        table = status_table(
            "Listed congruences", ["Congruence", "Status", "Hypothesis", "Witness"],
            [(c.target.format(), "IMPLIED" if c.implied else "NOT IMPLIED",
              c.hypothesis.value if c.hypothesis else "-",
              " + ".join(w.source for w in c.witness)) for c in checks])
        lines.append(render(table))
    _emit(config, data, "\n".join(lines))
    return EXIT_FAILED if failed else EXIT_OK


@cli.command(name='check-parity')
@click.option('--statement', required=True, help='Linear combination, e.g. "D5+ A2 + D5- A2"')
@click.option('--modulus', type=int, default=2, help='Divisor d')
@click.option('--dim', type=int, default=5, help='Target dimension n (3, 4 or 5)')
@click.option('--hypothesis', default=None, help='Strongest hypothesis allowed (default H0)')
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@output_options
@handles_errors
def check_parity(statement: str, modulus: int, dim: int, hypothesis: Optional[str],
                 a1_max: Optional[int], output_format: str):
    """Decide whether a linear combination is divisible by d on every solution"""
    config = load_config(dim=dim, hypothesis=hypothesis, a1_max=a1_max,
                         output_format=output_format)
    if modulus < 1:
        raise ConfigError("--modulus must be a positive integer", {"modulus": modulus})
    element = parse_expression(statement, MIXED)
    lattice = RelationEngine(a1_max=config.a1_max).lattice(config.dim)
    stmt = ParityStatement(statement, element, modulus, config.dim, "command line")
    try:
        check = check_statement(lattice, stmt, config.hypothesis)
    except KeyError as e:
        raise ConfigError(f"statement is not over A1-free types of codim <= {config.dim}: {e}")

    result = check.result
    lines = [result.headline()]
    if result.implied:
        lines.append("combination:")
        lines += [f"  {label}: {value}" for label, value in result.combination.items()]
        lines.append("quotient:")
        lines += [f"  {name}: {value}" for name, value in result.quotient.items()]
        lines.append(f"verified: {'yes' if result.verified else 'no'}")
    _emit(config, check.to_dict(), "\n".join(lines))
    return EXIT_OK if result.implied else EXIT_FAILED


@cli.command()
@click.option('--fixtures', 'fixture_path', type=click.Path(), default=None,
              help='Fixture directory (default: bundled data/)')
@click.option('--dim', type=int, default=5, help='Target dimension n (3, 4 or 5)')
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@output_options
@handles_errors
def verify(fixture_path: Optional[str], dim: int, a1_max: Optional[int], output_format: str):
    """Run the full pipeline and compare everything with the fixtures"""
    config = load_config(dim=dim, a1_max=a1_max, output_format=output_format,
                         fixture_path=fixture_path)
    fixtures = load_fixtures(config.fixture_path)
    report = verify_all(fixtures, config.dim, config.a1_max)
    table = status_table(
        f"Verification (n={config.dim}, K={config.a1_max})", ["Section", "Status", "Diffs"],
        [(s.name, "PASS" if s.passed else "FAIL", str(len(s.diffs))) for s in report.sections])
    lines = [render(table)] + [d.format() for d in report.diffs()]
    lines += [f"[{s.name}] discrepancy: {note}" for s in report.sections
              for note in s.discrepancies]
    _emit(config, report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAILED


@cli.command()
@click.option('--validate', is_flag=True, help='Run the structural checks')
@click.option('--file', 'path', type=click.Path(), default=None, help='J table file')
@output_options
@handles_errors
def jtable(validate: bool, path: Optional[str], output_format: str):
    """Print or validate the adjacency table J"""
    config = load_config(output_format=output_format)
    table = JTable.load(path)
    if not validate:
        entries = table.entries
        data = {g.token: entries[g].to_json() for g in GENERATORS if g in entries}
        text = "\n".join(f"J({g}) = {entries[g].format()}" for g in GENERATORS if g in entries)
        _emit(config, data, text)
        return EXIT_OK
    report = table.validate()
    rendered = render(status_table(
        "J table checks", ["Check", "Status", "Detail"],
        [(c.name, "PASS" if c.passed else "FAIL", c.detail) for c in report.checks]))
    _emit(config, report.to_dict(), rendered)
    return EXIT_OK if report.ok else EXIT_FAILED


@cli.command()
@click.option('--a1-max', 'a1_max', type=int, default=None, help='A1 cutoff K (default 12)')
@click.option('--fixtures', 'fixture_path', type=click.Path(), default=None,
              help='Fixture directory (default: bundled data/)')
@output_options
@handles_errors
def report(a1_max: Optional[int], fixture_path: Optional[str], output_format: str):
    """One-page summary of the parity results"""
    config = load_config(a1_max=a1_max, output_format=output_format,
                         fixture_path=fixture_path)
    fixtures = load_fixtures(config.fixture_path)
    engine = RelationEngine(fixtures.jtable, config.a1_max)

    isolated = report_isolated_point_parities(engine.lattice(5), fixtures.statements)
    listed = check_congruences(engine.ca(5), fixtures.congruences)
    classical = dimension_checks({n: engine.lattice(n) for n in (3, 4)}, fixtures.statements)

    def status(implied: bool, hypothesis: Optional[Hypothesis]) -> str:
        return f"IMPLIED ({hypothesis.value})" if implied else "NOT_IMPLIED"

    parity_rows = [(c.statement.text, str(c.statement.dim), c.statement.expectation(),
                    c.outcome(), "yes" if c.as_expected else "NO")
                   for c in isolated + classical]
    congruence_rows = [(c.target.format(), "5", status(c.implied, c.hypothesis)) for c in listed]
    ok = (all(c.as_expected for c in isolated + classical)
          and all(c.implied and c.hypothesis is Hypothesis.H0 for c in listed))

    data = {
        "ok": ok,
        "isolated_points": [c.to_dict() for c in isolated],
        "congruences": [c.to_dict() for c in listed],
        "classical": [c.to_dict() for c in classical],
    }
    text = "\n\n".join([
        render(status_table("Parity statements",
                            ["Statement", "n", "Expected", "Actual", "Match"], parity_rows)),
        render(status_table("Congruences mod 2", ["Congruence", "n", "Status"], congruence_rows)),
    ])
    _emit(config, data, text)
    return EXIT_OK if ok else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """終了コードを返すエントリポイント（0 成功, 1 検証失敗, 2 使用法・内部エラー）"""
    try:
        result = cli.main(args=argv, prog_name='caustic', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_FAILED
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except Exception as e:
        logger.debug("unexpected error", exc_info=True)
        click.echo(f"Error: internal error: {type(e).__name__}: {e}", err=True)
        return EXIT_ERROR
    return result if isinstance(result, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
