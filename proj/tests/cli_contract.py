"""Contract checks for the kvreg command-line tool.

usage: cli_contract.py <path-to-kvreg> <path-to-schema>
"""

import csv
import io
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

KVREG, SCHEMA_PATH = sys.argv[1], sys.argv[2]
with open(SCHEMA_PATH) as f:
    SCHEMA = json.load(f)
jsonschema.Draft202012Validator.check_schema(SCHEMA)
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

failures = []


def run(*args):
    return subprocess.run([KVREG, *args], capture_output=True, text=True, timeout=600)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def json_report(name, args, want_exit=0):
    r = run(*args)
    check(f"{name}: exit {want_exit}", r.returncode == want_exit, f"got {r.returncode}: {r.stderr}")
    try:
        doc = json.loads(r.stdout)
    except json.JSONDecodeError as e:
        check(f"{name}: JSON parses", False, str(e))
        return None
    errors = sorted(VALIDATOR.iter_errors(doc), key=str)
    check(f"{name}: schema", not errors, errors[0].message if errors else "")
    cfg = doc["config"]
    check(f"{name}: config embeds seed", "seed" in cfg and cfg["command"] == args[0])
    return doc


# Independence at the documented example.
doc = json_report("check-independence",
                  ["check-independence", "--a", "2", "--b", "1", "--c", "1", "--n", "100000",
                   "--seed", "42"])
if doc:
    rep = doc["report"]
    ps = [rep["chi2"]["p"], rep["ks_u"]["p"], rep["ks_v"]["p"]]
    check("check-independence: three p-values > 0.01", all(p > 0.01 for p in ps), str(ps))
    check("check-independence: effective n and bins recorded",
          doc["config"]["n"] == 100000 and doc["config"]["bins"] == 10)

# Deterministic sample CSV.
args = ["sample", "--law", "kummer", "--a", "2", "--b", "1", "--c", "1", "--n", "5", "--seed", "7"]
first, second = run(*args), run(*args)
check("sample: exit 0", first.returncode == 0, first.stderr)
rows = list(csv.reader(io.StringIO(first.stdout)))
check("sample: header plus 5 rows", rows[0] == ["x"] and len(rows) == 6, str(rows))
check("sample: positive draws", all(float(r[0]) > 0 for r in rows[1:]))
check("sample: deterministic", first.stdout == second.stdout)
other = run(*args[:-1], "8")
check("sample: seed changes draws", other.stdout != first.stdout)

# Every report kind validates against the schema.
json_report("sample json", ["sample", "--law", "pair", "--a", "2", "--b", "1", "--n", "50",
                            "--format", "json"])
json_report("check-regression", ["check-regression", "--a", "2", "--b", "1", "--n", "20000",
                                 "--bins", "10"])
json_report("check-identities", ["check-identities", "--a", "2", "--b", "1", "--c", "1"])
json_report("check-ode", ["check-ode", "--a", "2", "--b", "1", "--c", "1"])
doc = json_report("fit", ["fit", "--a", "2", "--b", "1", "--n", "20000"])
if doc:
    check("fit: reports both parameter maps",
          "ab_denominator_variant" in doc["report"]["parameter_map"])
json_report("check-independence control",
            ["check-independence", "--a", "2", "--b", "1", "--n", "100000", "--control"])

# Gate failure: a control too small to reject exits 1.
json_report("check-regression weak control",
            ["check-regression", "--a", "2", "--b", "1", "--n", "2000", "--bins", "5",
             "--control"], want_exit=1)

# Usage and domain errors exit 2.
r = run("check-regression", "--a", "0.5", "--b", "1", "--c", "1")
check("a <= 1: exit 2", r.returncode == 2, f"got {r.returncode}")
check("a <= 1: message names E 1/X", "E 1/X" in r.stderr, r.stderr)
r = run("check-independence", "--a", "2", "--b", "1", "--bogus")
check("unknown flag: exit 2", r.returncode == 2, f"got {r.returncode}")
check("unknown flag: synopsis on stderr", "--seed" in r.stderr and r.stdout == "")
r = run()
check("no subcommand: exit 2", r.returncode == 2, f"got {r.returncode}")
r = run("check-independence", "--a", "2", "--b", "1", "--alpha", "0.6", "--beta", "2")
check("conflicting parameterizations: exit 2", r.returncode == 2, f"got {r.returncode}")
r = run("check-independence", "--a", "2", "--b", "1", "--n", "0")
check("n = 0: exit 2", r.returncode == 2, f"got {r.returncode}")
r = run("sample", "--law", "kummer", "--a", "-1", "--b", "1")
check("invalid Kummer a: exit 2", r.returncode == 2, f"got {r.returncode}")

# CSV headers and --out / --in round trip.
r = run("check-regression", "--a", "2", "--b", "1", "--n", "20000", "--bins", "10",
        "--format", "csv")
header = r.stdout.splitlines()[0]
check("regression csv header",
      header == "bin,count,v_lo,v_hi,v_center,mean_u,se_u,mean_inv_u,se_inv_u,"
                "mean_one_minus_u,se_one_minus_u,mean_one_minus_u_sq,se_one_minus_u_sq", header)
r = run("check-ode", "--a", "2", "--b", "1", "--format", "csv")
check("residual csv header",
      r.stdout.splitlines()[0] == "equation,point,lhs,rhs,rel_residual,tolerance")

with tempfile.TemporaryDirectory() as tmp:
    pairs = os.path.join(tmp, "pairs.csv")
    r = run("sample", "--law", "pair", "--a", "2", "--b", "1", "--n", "20000", "--out", pairs)
    check("--out: exit 0 and nothing on stdout", r.returncode == 0 and r.stdout == "")
    with open(pairs) as f:
        check("--out: pair header", f.readline().strip() == "x,y,u,v")
    doc = json_report("fit --in", ["fit", "--in", pairs])
    if doc:
        fitted = doc["report"]["fit"]["fitted"]
        check("fit --in: near (2, 1, 1)",
              abs(fitted["a"] - 2) < 0.3 and abs(fitted["b"] - 1) < 0.3 and
              abs(fitted["c"] - 1) < 0.3, str(fitted))
    r = run("fit", "--in", os.path.join(tmp, "missing.csv"))
    check("fit --in missing file: exit 2", r.returncode == 2, f"got {r.returncode}")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
