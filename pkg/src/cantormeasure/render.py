"""SVG island diagrams: one horizontal bar per generation, islands drawn as
rectangles colored by overlap type, lakes left blank."""

from __future__ import annotations

from fractions import Fraction

from .generation import GenerationFrame
from .numerics import decimal_string
from .overlap import TypeTable, ensure_types

_PALETTE = [
    "#4878cf", "#d65f5f", "#6acc65", "#956cb4", "#c4ad66",
    "#77bedb", "#ee854a", "#8c613c", "#dc7ec0", "#797979",
]

_X_DIGITS = 12


def _coord(value: Fraction) -> str:
    # rational -> decimal at fixed digits so output is platform independent
    s = decimal_string(value, _X_DIGITS, "floor").rstrip("0").rstrip(".")
    return s or "0"


def render_svg(
    table: TypeTable,
    frames: list[GenerationFrame],
    *,
    width: int = 900,
    row_height: int = 28,
    gap: int = 10,
    margin: int = 20,
) -> str:
    """SVG 1.1 document with one row per generation plus a type legend."""
    levels = len(frames)
    ensure_types(table, levels - 1)
    legend_height = 22 * ((table.q + 4) // 5) + 10
    height = margin * 2 + levels * (row_height + gap) + legend_height
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width + 2 * margin}" height="{height}" '
        f'viewBox="0 0 {width + 2 * margin} {height}">',
        f'<rect width="{width + 2 * margin}" height="{height}" fill="white"/>',
    ]
    for row, frame in enumerate(frames):
        y = margin + row * (row_height + gap)
        parts.append(
            f'<text x="2" y="{y + row_height // 2 + 4}" font-size="11" '
            f'font-family="monospace">{frame.k}</text>'
        )
        for isl in frame.islands:
            color = _PALETTE[((isl.type_id or 1) - 1) % len(_PALETTE)]
            x0 = _coord(margin + isl.left * width)
            w = _coord((isl.right - isl.left) * width)
            parts.append(
                f'<rect x="{x0}" y="{y}" width="{w}" '
                f'height="{row_height}" fill="{color}" stroke="black" '
                f'stroke-width="0.3"><title>type {isl.type_id} '
                f'[{isl.left}, {isl.right}]</title></rect>'
            )
    legend_y = margin + levels * (row_height + gap) + 8
    for idx in range(table.q):
        color = _PALETTE[idx % len(_PALETTE)]
        lx = margin + (idx % 5) * (width // 5)
        ly = legend_y + 22 * (idx // 5)
        parts.append(
            f'<rect x="{lx}" y="{ly}" width="14" height="14" fill="{color}" '
            f'stroke="black" stroke-width="0.3"/>'
        )
        parts.append(
            f'<text x="{lx + 20}" y="{ly + 12}" font-size="12" '
            f'font-family="monospace">type {idx + 1}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
