"""JSON report assembly.

Reports are schema-versioned and byte-deterministic: every certified value
is serialized as a {lo, hi} pair of decimal strings with outward-directed
rounding, rationals as exact "p/q" strings, and keys are emitted sorted.
Wall-clock timings never enter the JSON payload (they would break report
determinism); the text renderer may show them.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .numerics import CertifiedReal, decimal_string, format_rational

SCHEMA_VERSION = 1
DECIMAL_DIGITS = 30


def certified_json(value: CertifiedReal) -> dict:
    lo, hi = value.as_fractions()
    return {
        "lo": decimal_string(lo, DECIMAL_DIGITS, "floor"),
        "hi": decimal_string(hi, DECIMAL_DIGITS, "ceil"),
    }


def rational_json(q: Fraction) -> str:
    return format_rational(q)


def witness_json(witness) -> dict:
    return {
        "left": rational_json(witness.left),
        "right": rational_json(witness.right),
        "kind": witness.kind,
        "pieces": [
            {"type": t, "length": rational_json(length)} for t, length in witness.pieces
        ],
    }


def assumptions_json(report) -> dict:
    out: dict = {"a": {"status": report.a_status}}
    if report.a_witness is not None:
        island, pair = report.a_witness
        out["a"]["island"] = [rational_json(x) for x in island]
        out["a"]["containing_pair"] = [
            [rational_json(x) for x in iv] for iv in pair
        ]
    b: dict = {"status": report.b_status, "depth": report.b_depth}
    if report.b_residual is not None:
        b["residual"] = rational_json(report.b_residual)
    if report.b_point is not None:
        b["point"] = rational_json(report.b_point)
    out["b"] = b
    return out


def boundary_json(bnd) -> dict:
    out = {
        "D0_lower": certified_json(bnd.d0_lower),
        "D1_lower": certified_json(bnd.d1_lower),
        "k_left": bnd.k_left,
        "k_right": bnd.k_right,
    }
    if bnd.d0_upper is not None:
        out["D0_upper"] = certified_json(bnd.d0_upper)
        out["D1_upper"] = certified_json(bnd.d1_upper)
        out["k1"] = bnd.k1_upper
        out["k2"] = bnd.k2_upper
    if bnd.per_type_lower is not None:
        out["per_type"] = {
            str(t): {"D0_lower": certified_json(v[0]), "D1_lower": certified_json(v[1])}
            for t, v in sorted(bnd.per_type_lower.items())
        }
    return out


def density_json(extremal, what: str) -> dict:
    out = {
        "value": certified_json(extremal.value),
        "case": extremal.case,
        "certified": extremal.certified,
        "witness": witness_json(extremal.witness),
        "thresholds": {
            k: (v if not isinstance(v, Fraction) else rational_json(v))
            for k, v in sorted(extremal.thresholds.items())
            if v is not None
        },
        what: certified_json(extremal.measure),
    }
    return out


def base_report(command: str, spec, table=None, template=None, model=None) -> dict:
    report: dict = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": spec.to_config(),
        "input_order": list(spec.input_order),
    }
    if table is not None:
        report["gftc"] = {
            "confirmed": table.confirmed,
            "q": table.q,
            "k0": table.k0,
            "generations_examined": table.generations_examined,
        }
        report["types"] = [
            {
                "type": info.type_id,
                "first_generation": info.first_generation,
                "representative": {
                    "left": rational_json(info.representative.left),
                    "right": rational_json(info.representative.right),
                    "generation": info.representative.generation,
                },
                "children": [
                    {
                        "type": d.type_id,
                        "rel_left": rational_json(d.rel_left),
                        "rel_length": rational_json(d.rel_length),
                    }
                    for d in info.children
                ],
            }
            for info in table.types
        ]
    if model is not None:
        report["alpha"] = certified_json(model.alpha)
        report["degenerate"] = model.degenerate
        report["perron"] = [certified_json(a) for a in model.perron]
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_text(report: dict, timings: dict | None = None) -> str:
    lines = [f"cantormeasure report (schema {report['schema']}) - {report['command']}"]
    cfg = report["config"]
    lines.append(f"  maps: {len(cfg['maps'])}  scheme: {cfg['scheme']}  mode: {cfg['mode']}")
    if "gftc" in report:
        g = report["gftc"]
        lines.append(
            f"  finite type structure: confirmed={g['confirmed']} q={g['q']} k0={g['k0']}"
        )
    if "irreducible" in report:
        lines.append(f"  irreducible: {report['irreducible']}")
    if "alpha" in report:
        a = report["alpha"]
        lines.append(f"  alpha in [{a['lo']}, {a['hi']}]")
    if "assumptions" in report:
        s = report["assumptions"]
        lines.append(f"  assumption A: {s['a']['status']}   assumption B: {s['b']['status']}")
        if "point" in s["b"]:
            lines.append(f"    violation point: {s['b']['point']}")
    if "boundary" in report:
        b = report["boundary"]
        lines.append(f"  D0_lower in [{b['D0_lower']['lo']}, {b['D0_lower']['hi']}]")
        lines.append(f"  D1_lower in [{b['D1_lower']['lo']}, {b['D1_lower']['hi']}]")
    for key, label in (("d_max", "hausdorff"), ("d_min", "packing")):
        if key in report:
            d = report[key]
            lines.append(f"  {key}: [{d['value']['lo']}, {d['value']['hi']}] case={d['case']}")
            m = d[label]
            lines.append(f"  {label} measure in [{m['lo']}, {m['hi']}]")
            w = d["witness"]
            lines.append(f"    witness [{w['left']}, {w['right']}] ({w['kind']})")
    if timings:
        for stage, secs in timings.items():
            lines.append(f"  time[{stage}] = {secs:.3f}s")
    return "\n".join(lines) + "\n"
