"""Luxembourg norms on the weighted disk and a numerical embedding witness.

The test functions k (1 - z)^(-c) are singular at z = 1 and have closed-form
modulars for power growth functions, which makes them a good probe. The witness
reports the norm ratio over the family; a bounded ratio is evidence for the
embedding, not a proof of it.
"""

import math

from orliczkit.bergman import (QuadConfig, TestFunction, lux_norm, refinement_study,
                               witness_embedding)
from orliczkit.growth import InvGeo, parse_spec

P = parse_spec


def main():
    print("norm of the constant 1:")
    for name in ("pow:2", "expm1", "dexp"):
        r = lux_norm(TestFunction(), P(name), 0.0)
        print(f"  {name:8s} {r.lam:.12f}")
    print(f"  (1/log 2 = {1 / math.log(2):.12f})")

    print("\nquadrature refinement for |1 - z|^(-0.5), t^2, alpha = 0:")
    study = refinement_study(TestFunction(0.5, 1.0), P("pow:2"), 0.0, 1.0, QuadConfig(64, 64))
    for v in study.values:
        print(f"  {v:.15f}")
    print(f"  exact 4/pi = {4 / math.pi:.15f}")

    fam = [TestFunction(c / 10, 1.0) for c in range(10)]
    phi = InvGeo(P("pow:2"), P("pow:3"), 0.5)
    psi = InvGeo(P("pow:4"), P("pow:6"), 0.5)
    rep = witness_embedding(phi, psi, 0.0, 2.0, fam)
    print()
    print(rep.to_text(), end="")
    print(rep.to_csv(), end="")


if __name__ == "__main__":
    main()
