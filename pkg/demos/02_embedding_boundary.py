"""Where does A^phi_alpha embed into A^psi_beta?

For fixed (phi, psi, alpha) the admissible beta form a half-line [beta*(alpha), inf).
For the power pair t^2 -> t^4 the boundary is the straight line beta* = 2 alpha + 2;
for exp(t) - 1 -> t the whole first quadrant qualifies from beta = -1 on.
The sweep is written as CSV and as an SVG phase diagram.
"""

import sys
from pathlib import Path

from orliczkit.diagram import phase_diagram_svg
from orliczkit.embedding import EmbeddingParams, TDomain, beta_star, boundary_sweep, cmin
from orliczkit.growth import parse_spec

P = parse_spec


def main(out_dir="."):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for beta in (1.9, 2.0, 2.5):
        r = cmin(P("pow:2"), P("pow:4"), EmbeddingParams(0.0, beta, TDomain.FROM_ONE))
        print(f"pow:2 -> pow:4, alpha=0, beta={beta}: cmin={r.value:.9g} member={r.finite}")

    for phi, psi in (("pow:2", "pow:4"), ("pow:3", "pow:4"), ("expm1", "pow:1")):
        b = beta_star(P(phi), P(psi), 1.0)
        print(f"beta*({phi} -> {psi}, alpha=1) = {b.beta:.6f} after {b.iterations} steps")

    curve = boundary_sweep(P("pow:2"), P("pow:4"), 0.0, 2.0, 11)
    (out / "boundary.csv").write_text(curve.to_csv())
    (out / "boundary.svg").write_text(phase_diagram_svg(curve))
    print(f"\nwrote {out / 'boundary.csv'} and {out / 'boundary.svg'}")
    print(curve.to_csv(), end="")


if __name__ == "__main__":
    main(*sys.argv[1:2])
