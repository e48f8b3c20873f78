#!/usr/bin/env python3
"""Render figures from a manifest of FigureSpecs.

Usage: python render_figures.py MANIFEST.json [--base-dir DIR]

The manifest is a JSON list of specs:

    [{"kind": "vector_field",
      "inputs": {"field": "field.csv", "winding": "winding.csv"},
      "output": "fig_vector_field.svg",
      "options": {"title": "..."}}, ...]

Relative input/output paths resolve against --base-dir (default: the
manifest's directory).  Only exported CSV files are consumed; the simulation
engine is never invoked.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from figkinds import RENDERERS, FigureInputError

SPEC_KEYS = {"kind", "inputs", "output", "options"}


def resolve_paths(spec_inputs, base: Path):
    resolved = {}
    for key, value in spec_inputs.items():
        if isinstance(value, list):
            resolved[key] = [
                {
                    k: (str(base / v) if k in ("path", "fit") else v)
                    for k, v in item.items()
                }
                for item in value
            ]
        else:
            resolved[key] = str(base / value)
    return resolved


def run_manifest(manifest_path: str, base_dir: str | None = None) -> list[dict]:
    manifest_path = Path(manifest_path)
    base = Path(base_dir) if base_dir else manifest_path.parent
    specs = json.loads(manifest_path.read_text())
    if not isinstance(specs, list):
        raise FigureInputError("manifest must be a JSON list of figure specs")
    results = []
    for k, spec in enumerate(specs):
        unknown = set(spec) - SPEC_KEYS
        if unknown:
            raise FigureInputError(f"spec {k}: unknown keys {sorted(unknown)}")
        kind = spec.get("kind")
        if kind not in RENDERERS:
            raise FigureInputError(
                f"spec {k}: unknown figure kind {kind!r}; "
                f"expected one of {sorted(RENDERERS)}"
            )
        inputs = resolve_paths(spec["inputs"], base)
        output = str(base / spec["output"])
        summary = RENDERERS[kind](inputs, output, spec.get("options"))
        summary.update({"kind": kind, "output": output})
        results.append(summary)
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("manifest")
    parser.add_argument("--base-dir", default=None)
    args = parser.parse_args(argv)
    try:
        results = run_manifest(args.manifest, args.base_dir)
    except (FigureInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for res in results:
        print(json.dumps(res))
    return 0


if __name__ == "__main__":
    sys.exit(main())
