"""Collects one verdict line per acceptance criterion for the run summary."""

LINES: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    LINES.append(line)
    print(line)
