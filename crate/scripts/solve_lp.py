"""Solve LP files with HiGHS and write solution files the CLI can import.

    python3 scripts/solve_lp.py OUT_DIR FILE.lp [FILE.lp ...]

Each `name.lp` produces `OUT_DIR/name.sol` with `status`, `objective` and
one `variable value` line per nonzero variable.
"""

import sys
from pathlib import Path

import highspy


def solve(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.readModel(str(path))
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kInfeasible:
        return "status infeasible\n"
    if status != highspy.HighsModelStatus.kOptimal:
        raise SystemExit(f"{path}: solver status {h.modelStatusToString(status)}")
    lp = h.getLp()
    values = h.getSolution().col_value
    lines = ["status optimal", f"objective {h.getInfo().objective_function_value:.12g}"]
    for k, name in enumerate(lp.col_names_):
        v = values[k]
        if abs(v) > 1e-9:
            lines.append(f"{name} {v:.12g}")
    return "\n".join(lines) + "\n"


def main():
    if len(sys.argv) < 3:
        raise SystemExit(__doc__)
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    for arg in sys.argv[2:]:
        path = Path(arg)
        (out / (path.stem + ".sol")).write_text(solve(path))


if __name__ == "__main__":
    main()
