"""Command line entry point: every operation over named fixtures, with
JSON-first deterministic output."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fixtures as fx
from .exactla import ExactGaussian, scalar_json
from .hodgedata import NotInCheckD, weight_moments
from .relmono import NilpotentTuple, Nonexistent, relative_monodromy, \
    validate_nilpotent_orbit
from .splitcore import GradedPoint, chart_encode, delta_decompose


def parse_gaussian(text) -> ExactGaussian:
    """Parse 'a', 'bi' or 'a+bi' with rational a, b."""
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        body = s[:-1]
        for cut in range(len(body) - 1, 0, -1):
            if body[cut] in "+-" and body[cut - 1] not in "/+-":
                re, im = body[:cut], body[cut:]
                im = im if im not in ("+", "-") else im + "1"
                return ExactGaussian(Fraction(re), Fraction(im))
        body = body if body not in ("", "+", "-") else body + "1"
        return ExactGaussian(0, Fraction(body))
    return ExactGaussian(Fraction(s), 0)


def _i():
    return ExactGaussian(0, 1)


def _exIII_nilp():
    return NilpotentTuple(fx.backdrop3(), [fx.nilp3()],
                          fx.point3(_i(), ExactGaussian(Fraction(-1, 2), 5),
                                    _i()))


FIXTURES = {
    "ex0": {
        "kind": "backdrop",
        "describe": "rank 2 pure backdrop, nonzero graded weight {-1}",
        "make": fx.backdrop0,
        "point": lambda: fx.point0(_i()),
    },
    "exI": {
        "kind": "backdrop",
        "describe": "rank 2 backdrop, graded weights {0, -2}",
        "make": fx.backdrop1,
        "point": lambda: fx.point1(ExactGaussian(2, 3)),
    },
    "exII": {
        "kind": "backdrop",
        "describe": "rank 3 backdrop, graded weights {0, -1}",
        "make": fx.backdrop2,
        "point": lambda: fx.point2(_i(), ExactGaussian(0, 2)),
    },
    "exIII": {
        "kind": "backdrop",
        "describe": "rank 3 backdrop, graded weights {0, -3}",
        "make": fx.backdrop3,
        "point": lambda: fx.point3(_i(), ExactGaussian(1, 2),
                                   ExactGaussian(3, 4)),
    },
    "exIV": {
        "kind": "backdrop",
        "describe": "rank 4 backdrop, graded weights {0, -1, -2}",
        "make": fx.backdrop4,
        "point": lambda: fx.point4(_i(), 1, ExactGaussian(2, 2), 3),
    },
    "exV": {
        "kind": "backdrop",
        "describe": "rank 5 backdrop, graded weights {0, 1}",
        "make": fx.backdrop5,
        "point": lambda: fx.point5(_i(), _i(), 1, 2, 3),
    },
    "ex0-nilp": {
        "kind": "nilpotent",
        "describe": "rank 2 pure one parameter degeneration",
        "make": lambda: NilpotentTuple(fx.backdrop0(), [fx.nilp0()],
                                       fx.point0(ExactGaussian(3))),
    },
    "exII-nilp": {
        "kind": "nilpotent",
        "describe": "one parameter degeneration with a split limit line",
        "make": lambda: NilpotentTuple(fx.backdrop2(), [fx.nilp2()],
                                       fx.point2(_i(), ExactGaussian(0, 2))),
    },
    "exIII-nilp": {
        "kind": "nilpotent",
        "describe": "rank 3 size three Jordan block degeneration",
        "make": _exIII_nilp,
    },
    "exIV-nilp": {
        "kind": "nilpotent",
        "describe": "rank 4 degeneration used for the height pairing",
        "make": lambda: NilpotentTuple(fx.backdrop4(), [fx.nilp4()],
                                       fx.point4(_i(), 1,
                                                 ExactGaussian(2, 2), 3)),
    },
    "exV-nilp2": {
        "kind": "nilpotent",
        "describe": "rank 5 two variable degeneration (both blocks)",
        "make": lambda: NilpotentTuple(
            fx.backdrop5(), [fx.nilp5_sym2(), fx.nilp5_curve()],
            fx.point5(_i(), _i(), ExactGaussian(1, 1), 0, 0)),
    },
    "exV-Q": {
        "kind": "fan",
        "describe": "two singleton weight lists; barycentric plane fan",
        "make": lambda: {0: ["M"], 1: ["Mp"]},
    },
    "slope-demo": {
        "kind": "height-family",
        "describe": "level 2 family with offsets (1/2, 0) and (0, 1/2)",
        "make": lambda: {
            "c": 2,
            "z": [(1, Fraction(1, 2), 0.1), (-1, Fraction(0), 0.2)],
            "w": [(1, Fraction(0), 0.35), (-1, Fraction(1, 2), 0.45)],
        },
    },
}


def _jsonify(obj):
    import numbers
    if isinstance(obj, ExactGaussian):
        return scalar_json(obj)
    if isinstance(obj, bool) or isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, numbers.Rational):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(x) for x in obj]
    if hasattr(obj, "to_json"):
        return _jsonify(obj.to_json())
    return obj


def emit(report, args):
    if args.out == "json":
        print(json.dumps(_jsonify(report), indent=2, sort_keys=True))
    else:
        _emit_text(report)
    checks = report.get("checks", [])
    return 0 if all(c.get("pass", True) for c in checks) else 1


def _emit_text(report, indent=0):
    pad = "  " * indent
    for k in sorted(report):
        v = report[k]
        if isinstance(v, dict):
            print(f"{pad}{k}:")
            _emit_text(v, indent + 1)
        else:
            print(f"{pad}{k}: {_jsonify(v)}")


def _fixture(args, kinds):
    fixt = FIXTURES.get(args.fixture)
    if fixt is None or fixt["kind"] not in kinds:
        raise SystemExit(f"unknown fixture {args.fixture!r}; run "
                         "'fixtures list'")
    return fixt


def cmd_fixtures_list(args):
    rows = {name: {"kind": f["kind"], "describe": f["describe"]}
            for name, f in FIXTURES.items()}
    return emit({"fixtures": rows}, args)


def cmd_mhs_check(args):
    fixt = _fixture(args, ("backdrop",))
    b = fixt["make"]()
    F = fixt["point"]()
    ok1, r1 = b.is_in_check_D(F)
    try:
        ok2, r2 = b.is_in_D(F)
    except NotInCheckD:
        ok2, r2 = False, ["not in the flag closure"]
    mu, var = weight_moments(b.weight)
    report = {
        "fixture": args.fixture,
        "weight_mean": mu, "weight_variance": var,
        "checks": [
            {"id": "flag-closure", "pass": ok1, "witness": r1},
            {"id": "polarized-interior", "pass": ok2, "witness": r2},
        ],
    }
    return emit(report, args)


def cmd_mhs_split(args):
    fixt = _fixture(args, ("backdrop",))
    b = fixt["make"]()
    F = fixt["point"]()
    s_prime, delta = delta_decompose(b, F)
    report = {"fixture": args.fixture, "s_prime": s_prime.to_json(),
              "delta": delta.to_json(),
              "checks": [{"id": "delta-zero", "pass": delta.is_zero(),
                          "witness": "split" if delta.is_zero()
                          else "non split"}]}
    return emit(report, args)


def cmd_mhs_canonical(args):
    fixt = _fixture(args, ("backdrop",))
    b = fixt["make"]()
    F = fixt["point"]()
    t = chart_encode(b, F)
    from .splitcore import chart_decode
    back = chart_decode(t)
    report = {"fixture": args.fixture, "triple": t.to_json(),
              "checks": [{"id": "round-trip", "pass": back == F,
                          "witness": "decode(encode(F)) == F"}]}
    return emit(report, args)


def cmd_relmono(args):
    fixt = _fixture(args, ("nilpotent",))
    t = fixt["make"]()
    M = relative_monodromy(t.sum_n(), t.backdrop.weight)
    if isinstance(M, Nonexistent):
        report = {"fixture": args.fixture, "exists": False,
                  "witness": M.reason,
                  "checks": [{"id": "exists", "pass": False,
                              "witness": M.reason}]}
    else:
        report = {"fixture": args.fixture, "exists": True,
                  "filtration": M.to_json(),
                  "dims": {str(k): s.dim for k, s in M.steps.items()},
                  "checks": [{"id": "exists", "pass": True, "witness": ""}]}
    return emit(report, args)


def cmd_orbit(args):
    from .orbitlimit import boundary_value, build_chain, hat_operators, \
        limit_probe, phi_normalize, psi
    fixt = _fixture(args, ("nilpotent",))
    t = fixt["make"]()
    if args.orbit_cmd == "validate":
        rep = validate_nilpotent_orbit(t)
        checks = [{"id": k, "pass": bool(v), "witness": ""}
                  for k, v in rep["conditions"].items()
                  if isinstance(v, bool)]
        return emit({"fixture": args.fixture, "report": rep,
                     "checks": checks}, args)
    if args.orbit_cmd == "psi":
        cls = psi(t)
        report = {"fixture": args.fixture,
                  "J": cls.J, "rank": cls.rank,
                  "grading_exponents": [list(th) for th, _ in
                                        cls.grading.blocks],
                  "weight_filtration_dims": [
                      {str(k): s.dim for k, s in wf.steps.items()}
                      for wf in cls.weight_filtrations],
                  "base_point": cls.r.to_json(),
                  "checks": [{"id": "class-built", "pass": True,
                              "witness": ""}]}
        return emit(report, args)
    if args.orbit_cmd == "phi":
        out = phi_normalize(t)
        changed = not all(
            a == bq for A, B in zip(t.nilpotents, out.nilpotents)
            for a, bq in zip(A, B)) or out.F != t.F
        report = {"fixture": args.fixture, "fixed_point": not changed,
                  "normalized": out.to_json(),
                  "checks": [{"id": "idempotent", "pass": True,
                              "witness": "asserted during construction"}]}
        return emit(report, args)
    if args.orbit_cmd == "hat":
        chain = build_chain(t)
        hats, deltas = hat_operators(chain)
        report = {"fixture": args.fixture,
                  "hat": [[[scalar_json(x) for x in row] for row in h]
                          for h in hats],
                  "delta_ops": [[[scalar_json(x) for x in row] for row in d]
                                for d in deltas],
                  "checks": [{"id": "identities", "pass": True,
                              "witness": "asserted during construction"}]}
        return emit(report, args)
    if args.orbit_cmd == "limit":
        rep = limit_probe(t)
        last = rep["points"][-1]
        report = {"fixture": args.fixture, "probe": rep,
                  "checks": [{"id": "converges",
                              "pass": last["distance"] < args.tol
                              or rep["monotone_tail"],
                              "witness": f"final distance "
                                         f"{last['distance']:.3e}"}]}
        return emit(report, args)
    if args.orbit_cmd == "boundary-value":
        c = [Fraction(x) for x in (args.c or "0").split(",")]
        cls = boundary_value(t, c)
        report = {"fixture": args.fixture, "c": [str(x) for x in c],
                  "J": cls.J, "rank": cls.rank,
                  "checks": [{"id": "class-built", "pass": True,
                              "witness": ""}]}
        return emit(report, args)
    raise SystemExit(f"unknown orbit command {args.orbit_cmd!r}")


def cmd_fan(args):
    from .fankit import phi_of_cone, sigma_Q, sigma_of_phi
    fixt = _fixture(args, ("fan",))
    per = fixt["make"]()
    fan = sigma_Q(per)
    if args.fan_cmd == "sigmaQ":
        ok, why = fan.validate()
        cones = []
        for c in sorted(fan.cones, key=lambda c: (c.dim, c.rays)):
            cones.append({"dim": c.dim,
                          "rays": [list(r) for r in c.rays],
                          "label": repr(c.label)})
        return emit({"fixture": args.fixture, "cones": cones,
                     "checks": [{"id": "fan-valid", "pass": ok,
                                 "witness": why}]}, args)
    if args.fan_cmd == "sigmaPhi":
        members = json.loads(args.phi) if args.phi else [{"0": 0, "1": 0}]
        members = [{int(k): v for k, v in m.items()} for m in members]
        cone = sigma_of_phi(per, members)
        back = phi_of_cone(per, cone)
        ok = sorted(tuple(sorted(m.items())) for m in back) == \
            sorted(tuple(sorted(m.items())) for m in members)
        return emit({"fixture": args.fixture,
                     "rays": [list(r) for r in cone.rays],
                     "dim": cone.dim,
                     "checks": [{"id": "in-fan", "pass": cone in fan,
                                 "witness": ""},
                                {"id": "inverse", "pass": ok,
                                 "witness": repr(back)}]}, args)
    raise SystemExit(f"unknown fan command {args.fan_cmd!r}")


def cmd_boundary(args):
    from .boundary import hodge_form
    fixt = _fixture(args, ("backdrop",))
    b = fixt["make"]()
    F = fixt["point"]()
    if args.boundary_cmd == "metric":
        form = hodge_form(b, F, Fraction(args.scale))
        pd = form.is_positive_definite()
        return emit({"fixture": args.fixture,
                     "matrix": [[scalar_json(x) if isinstance(
                         x, ExactGaussian) else _jsonify(x) for x in row]
                         for row in form.matrix],
                     "checks": [{"id": "positive-definite", "pass": pd,
                                 "witness": ""}]}, args)
    if args.boundary_cmd == "nu":
        s_prime, delta = delta_decompose(b, F)
        from .splitcore import canonical_splitting
        spl = canonical_splitting(b, F)
        return emit({"fixture": args.fixture,
                     "splitting": spl.to_json(),
                     "delta": delta.to_json(),
                     "checks": [{"id": "computed", "pass": True,
                                 "witness": ""}]}, args)
    raise SystemExit(f"unknown boundary command {args.boundary_cmd!r}")


def cmd_height(args):
    from .heightkit import DivisorSpec, degeneration_slope, height_pairing
    if args.height_cmd == "pair":
        tau = complex(parse_gaussian(args.tau))
        zspec = json.loads(args.z_spec)
        wspec = json.loads(args.w_spec)
        Z = DivisorSpec([p[0] for p in zspec],
                        [complex(p[1], p[2]) for p in zspec])
        W = DivisorSpec([p[0] for p in wspec],
                        [complex(p[1], p[2]) for p in wspec])
        val = height_pairing(tau, Z, W)
        sym = height_pairing(tau, W, Z)
        return emit({"pairing": val,
                     "checks": [{"id": "symmetry",
                                 "pass": abs(val - sym) < 1e-9,
                                 "witness": f"{abs(val - sym):.2e}"}]},
                    args)
    if args.height_cmd == "slope":
        fixt = _fixture(args, ("height-family",))
        fam = fixt["make"]()
        ymax = float(args.ymax)
        grid = [ymax * f for f in (0.25, 0.4, 0.55, 0.7, 0.85, 1.0)]
        res = degeneration_slope(fam["c"], fam["z"], fam["w"], grid)
        diff = abs(res["fitted_slope"] - float(res["predicted_slope"]))
        return emit({"fixture": args.fixture,
                     "fitted": res["fitted_slope"],
                     "predicted": str(res["predicted_slope"]),
                     "checks": [{"id": "slope-match",
                                 "pass": diff < 1e-3,
                                 "witness": f"difference {diff:.2e}"}]},
                    args)
    raise SystemExit(f"unknown height command {args.height_cmd!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", choices=("json", "text"), default="json")
    common.add_argument("--mode", choices=("exact", "float"),
                        default="exact")
    common.add_argument("--tol", type=float, default=1e-12)

    p = argparse.ArgumentParser(
        prog="hodgekit",
        description="mixed Hodge structure computations over named "
                    "fixtures")
    sub = p.add_subparsers(dest="group", required=True)

    fixtures = sub.add_parser("fixtures")
    fsub = fixtures.add_subparsers(dest="fixtures_cmd", required=True)
    fsub.add_parser("list", parents=[common]).set_defaults(
        func=cmd_fixtures_list)

    mhs = sub.add_parser("mhs")
    msub = mhs.add_subparsers(dest="mhs_cmd", required=True)
    for name, fn in (("check", cmd_mhs_check), ("split", cmd_mhs_split),
                     ("canonical", cmd_mhs_canonical)):
        q = msub.add_parser(name, parents=[common])
        q.add_argument("--fixture", required=True)
        q.set_defaults(func=fn)

    rel = sub.add_parser("relmono", parents=[common])
    rel.add_argument("--fixture", required=True)
    rel.set_defaults(func=cmd_relmono)

    orb = sub.add_parser("orbit")
    osub = orb.add_subparsers(dest="orbit_cmd", required=True)
    for name in ("validate", "psi", "phi", "hat", "limit",
                 "boundary-value"):
        q = osub.add_parser(name, parents=[common])
        q.add_argument("--fixture", required=True)
        q.add_argument("--c", default=None)
        q.set_defaults(func=cmd_orbit, orbit_cmd=name)

    fan = sub.add_parser("fan")
    fansub = fan.add_subparsers(dest="fan_cmd", required=True)
    for name in ("sigmaQ", "sigmaPhi"):
        q = fansub.add_parser(name, parents=[common])
        q.add_argument("--fixture", required=True)
        q.add_argument("--phi", default=None)
        q.set_defaults(func=cmd_fan, fan_cmd=name)

    bnd = sub.add_parser("boundary")
    bsub = bnd.add_subparsers(dest="boundary_cmd", required=True)
    for name in ("nu", "metric"):
        q = bsub.add_parser(name, parents=[common])
        q.add_argument("--fixture", required=True)
        q.add_argument("--scale", default="1")
        q.set_defaults(func=cmd_boundary, boundary_cmd=name)

    hgt = sub.add_parser("height")
    hsub = hgt.add_subparsers(dest="height_cmd", required=True)
    pair = hsub.add_parser("pair", parents=[common])
    pair.add_argument("--tau", required=True)
    pair.add_argument("--z-spec", required=True)
    pair.add_argument("--w-spec", required=True)
    pair.set_defaults(func=cmd_height, height_cmd="pair")
    slope = hsub.add_parser("slope", parents=[common])
    slope.add_argument("--fixture", required=True)
    slope.add_argument("--ymax", default="200")
    slope.set_defaults(func=cmd_height, height_cmd="slope")
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(json.dumps({"error": exc.code}), file=sys.stderr)
            return 2
        raise
    except (ValueError, KeyError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
