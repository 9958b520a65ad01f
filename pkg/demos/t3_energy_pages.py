"""The three-torus and its energy filtration.

Prints every page of the spectral sequence on invariant bar chains and
marks where differentials act.

    python demos/t3_energy_pages.py
"""

from pin2floer.graded import spectral_sequence
from pin2floer.models import ModelSpec, generate

m = generate(ModelSpec("t3", (-6, 6)))
ss = spectral_sequence(m.filtered("bar"))

for r in range(1, len(ss.pages)):
    dims = ss.total_dims(r)
    marker = "  <- differentials act" if r in ss.nonzero_pages else ""
    row = " ".join(f"{int(d)}:{n}" for d, n in sorted(dims.items()) if n)
    print(f"page {r}: total {sum(dims.values()):>3}{marker}\n  {row}")

print(f"\nnonzero differentials on pages {ss.nonzero_pages}; collapse at page {ss.collapse_page}")
