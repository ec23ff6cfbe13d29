"""
Checking computed numbers against the published tables
=======================================================

The bundled expectations file carries every printed cell of the
per-scenario and per-group tables, with the cells that cannot be
reproduced marked as errata.
"""

from icsrisk import assess, builtin_cstr_catalog
from icsrisk.analysis import Verdict, audit, audit_passed, builtin_expectations, summarize

report = assess(builtin_cstr_catalog())
findings = audit(report, builtin_expectations())

for s in summarize(findings):
    print(f"table {s.table}: {s.format()}")

# every mismatch, and whether it was predicted
for f in findings:
    if f.verdict is Verdict.MISMATCH:
        mark = "known" if f.erratum else "NEW"
        print(f"{mark:5} {f.cell:45} printed {f.expected:<5} computed {f.computed:.3f}")

print("passed:", audit_passed(findings))
