"""
Scoring one vulnerability
=========================

A CVSS v3.1 vector gives a base score. The Purdue level of the device it
sits on scales that score into a safety-weighted severity, and the
exploitability weights give an attack probability.
"""

from icsrisk import base_score, parse_vector, score
from icsrisk.safety import display

# an attacker on the plant network reaching a PLC (level 1)
v = parse_vector("CVSS:3.1/AV:A/AC:H/PR:H/UI:N/S:U/C:H/I:H/A:H")
bd = base_score(v)
print("impact", round(bd.impact, 3), "exploitability", round(bd.exploitability, 3))
print("base score", bd.base_score)

# level 1 keeps 90% of the base score
r = score(v, 1)
print("severity", display(r.severity), "probability", display(r.probability), "risk", display(r.risk))

# the same vector one level up, on the enterprise network, barely matters for safety
far = score(v, 4)
print("level 4 severity", display(far.severity))

# a vector that touches nothing scores 0.0 however reachable it is
print(base_score(parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N")).base_score)
