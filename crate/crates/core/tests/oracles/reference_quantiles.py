"""Reference quantiles for the Student-t and F distributions (scipy).

    python3 tests/oracles/reference_quantiles.py
writes data/reference/t_quantiles.csv and data/reference/f_quantiles.csv.
"""
import pathlib
from scipy import stats

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data" / "reference"
PROBS = [0.001, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99, 0.995, 0.999]

with open(ROOT / "t_quantiles.csv", "w") as f:
    f.write("df,p,quantile\n")
    for df in [1, 2, 3, 4, 5, 7, 10, 20, 30, 50, 94, 95, 100, 500]:
        for p in PROBS:
            f.write(f"{df},{p!r},{float(stats.t.ppf(p, df))!r}\n")

with open(ROOT / "f_quantiles.csv", "w") as f:
    f.write("df1,df2,p,quantile\n")
    for d1, d2 in [(1, 1), (1, 10), (2, 3), (2, 10), (2, 94), (3, 20), (4, 7), (5, 50), (10, 10), (2, 1000), (8, 3)]:
        for p in PROBS:
            f.write(f"{d1},{d2},{p!r},{float(stats.f.ppf(p, d1, d2))!r}\n")
