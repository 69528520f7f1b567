#!/usr/bin/env python3
"""Walk the debugging journey over the committed corpus.

For each defect the script asks the prover for the assertion that the
defect blocks, shows the failing premise, then proves the same goal on
the variant that repairs it.  Run from the repository root:

    python scripts/debug_journey.py
"""

from pathlib import Path

from lanprove import (
    FailureReport,
    TRUE,
    parse_assertion,
    parse_language,
    prove,
    render_assertion,
    render_tree,
)

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

JOURNEY = [
    ("effect duplication",
     "call-by-name application may copy an unevaluated print",
     "no-dupli-ef([CBN-BETA])", "faulty",
     "no-dupli-ef([BETA])", "fixed1"),
    ("argument evaluation",
     "the application argument has no evaluation context",
     "ctx-compliant([BETA])", "fixed1",
     "ctx-compliant([BETA])", "fixed2"),
    ("error stealing",
     "an error context aborts instead of letting try handle the error",
     "error-handler(try, 1)", "fixed2",
     "error-handler(try, 1)", "fixed3"),
    ("contravariance",
     "the application rule flips the subtyping of the function domain",
     "contra-resp([T-APP-BAD], arrow)", "fixed3",
     "contra-resp([T-APP], arrow)", "fixed4"),
]


def load(name: str):
    return parse_language((CORPUS / f"lambda-div-print-{name}.lan").read_text())


def main():
    for title, description, bad_goal, bad_variant, good_goal, good_variant in JOURNEY:
        print(f"== {title}: {description}")
        goal = parse_assertion(bad_goal)
        result = prove(load(bad_variant), TRUE, goal)
        assert isinstance(result, FailureReport), "expected the goal to fail"
        print(f"   {bad_variant}: no proof of {render_assertion(goal)}")
        for at, reason in result.nearest_misses:
            print(f"     {at}: {reason}")
        goal = parse_assertion(good_goal)
        tree = prove(load(good_variant), TRUE, goal)
        assert not isinstance(tree, FailureReport), "expected the goal to hold"
        print(f"   {good_variant}: proved {render_assertion(goal)} "
              f"({sum(1 for _ in tree.walk())} proof nodes)")
        print()

    print("== full derivation for the error handler, fixed3")
    tree = prove(load("fixed3"), TRUE, parse_assertion("error-handler(try, 1)"))
    print(render_tree(tree))


if __name__ == "__main__":
    main()
