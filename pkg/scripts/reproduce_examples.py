"""Print the table of worked examples: quoted value, computed value, match."""
import sys

from g2calib.cli import paper_examples


def main() -> int:
    rep = paper_examples()
    rows = rep.outputs["rows"]
    width = max(len(r["example"]) for r in rows)
    for r in rows:
        mark = "ok" if r["computed"] == r["quoted"] else "MISMATCH"
        print(f"{r['example']:<{width}}  quoted {r['quoted']!s:>6}  computed {r['computed']!s:>6}  {mark}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
