"""Run the identity suites from Python and drive the same checks via the CLI.

Every named identity in the library is registered under a stable id; a suite
run takes a selector (glob patterns work), a config with seeds and caps, and
a set of instances, and returns a replayable report.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path as P

from kgt import SuiteConfig, run_suite
from kgt.verify import REGISTRY, match_checks

print("registered checks:", len(REGISTRY))
for cid in match_checks("lemma-5.3*"):
    print(" ", cid, "-", REGISTRY[cid].summary)

cfg = SuiteConfig(graphs=4, cocycles=2, seed=1)
rep = run_suite("lemma-5.3*", config=cfg)
print("\nsuite:", rep.summary())
worst = max(rep.results, key=lambda r: r.millis)
print(f"slowest case: {worst.case.check_id} on {worst.case.subject} ({worst.millis:.1f} ms)")

# the command line wraps the same registry around JSON documents
work = P(tempfile.mkdtemp())
graph_doc = {
    "k": 1,
    "vertices": ["u", "v"],
    "edges": [
        {"id": "a", "color": 1, "range": "u", "source": "v"},
        {"id": "b", "color": 1, "range": "v", "source": "u"},
    ],
    "squares": [],
}
cocycle_doc = {"kind": "builtin", "name": "trivial", "params": {}}
(work / "g.json").write_text(json.dumps(graph_doc))
(work / "c.json").write_text(json.dumps(cocycle_doc))


def kgt_cli(*args):
    out = subprocess.run(
        [sys.executable, "-m", "kgt.cli", *args], capture_output=True, text=True
    )
    return out.returncode, out.stdout


code, _ = kgt_cli("validate", str(work / "g.json"))
print("\ncli validate exit code:", code)

code, text = kgt_cli(
    "check", str(work / "g.json"), str(work / "c.json"),
    "--suite", "def-3.1,prop-4.1", "--format", "machine",
)
report = json.loads(text)
print("cli check:", report["suite"], "->", [case["status"] for case in report["cases"]])

code, text = kgt_cli(
    "build", str(work / "g.json"), str(work / "g.json"),
    "--op", "cartesian", "--out-graph", str(work / "prod.json"),
)
built = json.loads((work / "prod.json").read_text())
print("cli build: cartesian product has", len(built["vertices"]), "vertices, exit", code)
