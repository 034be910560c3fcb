"""Interpolating growth functions and what survives the interpolation.

Two geodesics are available: the value geodesic Phi_0^(1-th) Phi_1^th and the inverse
geodesic built the same way from the inverses. Types interpolate affinely along the
first; embedding constants interpolate log-convexly along the second.
"""

from orliczkit.embedding import EmbeddingParams, TDomain, verify_F_logconvexity
from orliczkit.growth import format_spec, make_view, parse_spec
from orliczkit.interpolation import (InterpFamily, Mode, check_type_propagation,
                                     interp_ratio_preservation, interpolate)

P = parse_spec


def main():
    fam = InterpFamily(P("pow:2"), P("pow:4"), Mode.INVERSE, (0.0, 0.25, 0.5, 0.75, 1.0))
    print("inverse geodesic between t^2 and t^4 (slope of log Phi in log t):")
    for th in fam.thetas:
        spec = interpolate(fam, th)
        print(f"  th={th:4.2f}  {format_spec(spec):28s} slope={make_view(spec).df(0.0):.6f}")

    print("\ntype exponents along the value geodesic t^2 log(1+t) -> t^4:")
    for th in (0.25, 0.5, 0.75):
        r = check_type_propagation(P("powlog:2:1"), P("pow:4"), th)
        print(f"  th={th}: q expected {r.q_expected:.4f} measured {r.q_measured:.4f}, "
              f"passed={r.passed}")

    rep = interp_ratio_preservation(P("pow:1"), P("expm1"), P("pow:2"), P("pow:4"),
                                    [0.25, 0.5, 0.75])
    print(f"\nratio monotonicity preserved for (t, e^t-1) ~ (t^2, t^4): {rep.passed}")

    params = EmbeddingParams(0.0, 2.0, TDomain.FROM_ONE)
    f = verify_F_logconvexity(P("pow:2"), P("pow:4"), P("expm1"), P("pow:1"), params,
                              [0.25, 0.5, 0.75])
    print("\nlog-convexity of the minimal constant:")
    print(f.to_text(), end="")


if __name__ == "__main__":
    main()
