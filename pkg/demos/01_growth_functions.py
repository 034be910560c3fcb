"""Growth functions, their log-log views and how they are classified.

A growth function Phi is handled through Lambda(x) = log Phi(e^x). Powers are straight
lines in this picture, exp(t) - 1 bends upward, and t^2 log(1+t) sits between t^2 and
t^3. The indices are the extreme slopes of Lambda; the dlog constants measure how far
Lambda is from being convex (minus) or concave (plus).
"""

import numpy as np

from orliczkit.classification import classify, duality_check
from orliczkit.growth import InverseView, format_spec, make_view, parse_spec

SPECS = ["pow:2", "powlog:2:1", "expm1", "dexp", "geo(pow:2,expm1,0.5)"]


def main():
    x = np.array([-5.0, 0.0, 5.0])
    print("log Phi(e^x) at x = -5, 0, 5")
    for text in SPECS:
        view = make_view(parse_spec(text))
        vals = ", ".join(f"{v:12.5g}" for v in view.f(np.clip(x, *view.domain)))
        print(f"  {text:24s} {vals}")

    for text in ("pow:2", "powlog:2:1", "expm1"):
        print(f"\n-- {text}")
        print(classify(parse_spec(text)).to_text(), end="")

    # inverting swaps the two dlog classes
    print("\nduality between Phi and its inverse")
    for text in ("expm1", "powlog:2:1"):
        rep = duality_check(parse_spec(text))
        print(f"  {text:12s} C_minus={rep.C_minus:.6g} C_plus(inverse)={rep.C_plus_of_inverse:.6g} "
              f"passed={rep.passed}")
    print(f"\ninverse of t^4 is {format_spec(InverseView(parse_spec('pow:4')))!s} "
          f"with slope {make_view(InverseView(parse_spec('pow:4'))).df(1.0):.3f}")


if __name__ == "__main__":
    main()
