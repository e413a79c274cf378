"""Collects one result line per acceptance criterion for the terminal summary."""

from __future__ import annotations

LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    return line
