"""A walk through the sphere model.

Builds the tower of two-spheres, prints the three homology tables on
invariant chains, then shows how Q and V act on the hat flavor.

    python demos/s3_tower_tour.py
"""

from pin2floer.floer import FLAVORS, assemble
from pin2floer.graded import homology
from pin2floer.models import ModelSpec, generate
from pin2floer.pin2 import InvariantPart, induced_module

WINDOW = (-12, 12)

m = generate(ModelSpec("s3", WINDOW))
print(f"{len(m.data.manifolds)} critical spheres, window {WINDOW[0]}..{WINDOW[1]}\n")

tables = {}
for flavor in FLAVORS:
    c = assemble(m.data, flavor, m.window)
    tables[flavor] = homology(InvariantPart(c, m.involution).complex)

degrees = tables["bar"].degrees()
print(f"{'degree':>6}  " + "  ".join(f"{f:>5}" for f in FLAVORS))
for d in reversed(degrees):
    print(f"{int(d):>6}  " + "  ".join(f"{tables[f].dims[d]:>5}" for f in FLAVORS))

# Q drops one degree inside a sphere, V drops a whole level of the tower.
mod = induced_module(m.data, m.involution, m.q, m.v, "hat", m.window)
top = max(d for d in mod.homology.degrees() if mod.homology.dims[d] and d % 4 == 3
          and mod.word("QQ", d, 1) is not None)
print(f"\nhat tower top used below: degree {top}")
for word in ("Q", "QQ", "QQQ", "V", "VQ"):
    image = mod.word(word, top, 1)
    print(f"  {word:>3} . x = {'nonzero' if image else 'zero'}")
