"""Deterministic JSON and text rendering for command output"""
import json
from typing import Any, Iterable, List, Sequence

from rich.console import Console
from rich.table import Table


def safe_json_dumps(obj: Any, **kwargs) -> str:
    """
    決定的なJSON出力を行う

    Args:
        obj: JSONに変換するオブジェクト
        **kwargs: json.dumpsに渡す追加パラメータ

    Returns:
        キー順を固定したJSON文字列
    """
    defaults = {
        'ensure_ascii': False,
        'indent': 2,
        'separators': (',', ': '),
        'sort_keys': True,
    }
    defaults.update(kwargs)
    return json.dumps(obj, **defaults)


def format_formulas(formulas: Iterable, directives: Sequence[str] = ()) -> str:
    """式の列をDSL文書にする（@requires は変わる箇所にだけ出す）"""
    lines: List[str] = list(directives)
    current = None
    for f in formulas:
        tag = f.hypothesis.value
        at_zero = getattr(f, "hypothesis_at_zero", f.hypothesis).value
        directive = f"@requires {tag}" + (f" k0={at_zero}" if at_zero != tag else "")
        if directive != current:
            lines.append(directive)
            current = directive
        lines.append(f.format())
    return "\n".join(lines)


def status_table(title: str, columns: Sequence[str], rows: Iterable[Sequence[str]]) -> Table:
    table = Table(title=title)
    styles = ["cyan", "green", "magenta", "yellow"]
    for i, name in enumerate(columns):
        table.add_column(name, style=styles[i % len(styles)])
    for row in rows:
        table.add_row(*row)
    return table


def render(table: Table) -> str:
    """rich の表をプレーンテキストにする（端末幅に依存しない）"""
    console = Console(width=160, record=True, color_system=None, force_terminal=False)
    with console.capture() as capture:
        console.print(table)
    return capture.get().rstrip("\n")
