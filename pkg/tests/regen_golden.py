"""Regenerate tests/golden/*.json from the bundled CLI cases.

Run only after an intended report change:  python3 tests/regen_golden.py
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import GOLDEN, load_cases, run_cli  # noqa: E402

if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for case in load_cases():
        code, out, err = run_cli(case["argv"])
        if code != case.get("exit", 0):
            sys.exit(f"{case['name']}: exit {code}\n{err}")
        (GOLDEN / f"{case['name']}.json").write_text(out)
        print("wrote", case["name"])
