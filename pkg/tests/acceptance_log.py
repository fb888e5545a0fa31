"""Per-criterion verdicts, printed at the end of the session."""

LINES: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES[n] = line
    print(line)
