#!/usr/bin/env python3
"""Tabulate which design goals hold on each corpus variant.

    python scripts/corpus_report.py
"""

from pathlib import Path

from lanprove import FailureReport, TRUE, parse_assertion, parse_language, prove

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

VARIANTS = ("faulty", "fixed1", "fixed2", "fixed3", "fixed4")

GOALS = (
    "no-dupli-ef([CBN-BETA])",
    "no-dupli-ef([BETA])",
    "ctx-compliant([BETA])",
    "error-handler(try, 1)",
    "contra-resp([T-APP-BAD], arrow)",
    "contra-resp([T-APP], arrow)",
)


def main():
    langs = {name: parse_language(
        (CORPUS / f"lambda-div-print-{name}.lan").read_text())
        for name in VARIANTS}
    width = max(len(g) for g in GOALS)
    header = " " * (width + 2) + "  ".join(f"{v:>6}" for v in VARIANTS)
    print(header)
    for goal_text in GOALS:
        goal = parse_assertion(goal_text)
        cells = []
        for name in VARIANTS:
            result = prove(langs[name], TRUE, goal)
            cells.append("no" if isinstance(result, FailureReport) else "yes")
        row = "  ".join(f"{c:>6}" for c in cells)
        print(f"{goal_text:<{width}}  {row}")


if __name__ == "__main__":
    main()
