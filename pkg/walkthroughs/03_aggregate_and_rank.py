"""
Which levels deserve attention first
====================================

Group scenario scores by Purdue level or by device, average them, and
rank the groups.
"""

from icsrisk import assess, builtin_cstr_catalog
from icsrisk.analysis import Settings, aggregate, rank
from icsrisk.render import render_aggregates

report = assess(builtin_cstr_catalog(), Settings(paper_compat=True))

levels = aggregate(report, "level")
print(render_aggregates(levels, "level", "table", rank(levels, "risk")))

# severity puts controllers first, risk puts the supervisory level first
print(rank(levels, "severity").format())
print(rank(levels, "risk").format())

# per device; ties are reported rather than hidden
by_loc = rank(aggregate(report, "location"), "risk")
print(by_loc.format())
print("ties:", by_loc.ties)

# scaling every SI value by the same factor never changes an ordering
halved = {lvl: si / 2 for lvl, si in {0: 1.0, 1: 0.9, 2: 0.8, 3: 0.1, 4: 0.05}.items()}
again = assess(builtin_cstr_catalog(), Settings(paper_compat=True, si_table=halved))
print(rank(aggregate(again, "level"), "risk").format())
