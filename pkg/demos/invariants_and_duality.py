"""Invariants of the sphere, the Poincare sphere and their mirrors.

Each model stores eight times its Rokhlin invariant; the script checks the
ordering, the mirror rule and the mod 2 congruence in one report.

    python demos/invariants_and_duality.py
"""

from pin2floer.models import ModelSpec, dual, generate
from pin2floer.pin2 import InvariantRecord, check_invariant_properties, classify_image_i


def triple(model):
    return classify_image_i(model.data, model.involution, model.q, model.v, model.window)


records = []
for name in ("s3", "poincare"):
    m = generate(ModelSpec(name, (-20, 20)))
    here, mirror = triple(m), triple(dual(m))
    a, b, g = here.as_tuple()
    da, db, dg = mirror.as_tuple()
    print(f"{name:>9}: alpha={a} beta={b} gamma={g}   mirror: alpha={da} beta={db} gamma={dg}")
    records.append(InvariantRecord(name, here, m.data.metadata["rokhlin_times8"], mirror))

print()
print(check_invariant_properties(records))
