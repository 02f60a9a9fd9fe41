"""Regenerates quantization_golden.tsv with numpy as the independent reference.

Columns: kind, input, scale, expected
  half: input is an already-saturated value whose product with scale lands on
        an exact .5; expected = np.rint(input * scale) (round half to even)
  raw:  input is a raw logit; expected = np.rint(log(1 + relu(input)) * scale)
"""
import numpy as np

rows = []
# exact halves: k/8 * 100 = 12.5k, odd k -> .5 fraction
for k in range(1, 101, 2):
    rows.append(("half", k / 8, 100))
# scale 2 with quarter values: k/4 * 2 = k/2
for k in range(1, 101, 2):
    rows.append(("half", k / 4, 2))
rng = np.random.default_rng(20240501)
raw = list(rng.uniform(-3.0, 25.0, size=96)) + [1.5, 0.0, -2.0, 0.004]
for v in raw:
    rows.append(("raw", float(v), 100))

with open("quantization_golden.tsv", "w") as out:
    out.write("# kind\tinput\tscale\texpected\n")
    for kind, x, scale in rows:
        if kind == "half":
            expected = int(np.rint(np.float64(x) * scale))
        else:
            expected = int(np.rint(np.log1p(max(0.0, x)) * scale))
        out.write(f"{kind}\t{x!r}\t{scale}\t{expected}\n")
print(len(rows))
