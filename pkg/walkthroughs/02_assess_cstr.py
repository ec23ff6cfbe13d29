"""
Assessing the reactor case study
================================

The bundled catalog holds thirty attack scenarios against a continuous
stirred tank reactor, each with its location, level and CVSS vector.
"""

from icsrisk import assess, builtin_cstr_catalog
from icsrisk.analysis import Settings
from icsrisk.render import render_report

cat = builtin_cstr_catalog()
print(len(cat), "scenarios")

report = assess(cat)
print(render_report(report, "table"))

# the riskiest scenarios, highest first
top = sorted(report.results, key=lambda r: r.risk, reverse=True)[:3]
for r in top:
    sc = cat.get(r.scenario_id)
    print(f"#{sc.id} {sc.location}: {sc.title} (risk {r.risk:.2f})")

# physical-access rows change when Physical is weighted like Adjacent
compat = assess(cat, Settings(paper_compat=True))
print(round(report.result(1).probability, 3), "->", round(compat.result(1).probability, 3))
