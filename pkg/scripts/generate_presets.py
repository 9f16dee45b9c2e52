"""Regenerate the packaged preset JSON files from the builder functions."""

import json
from pathlib import Path

from snntune.engine import validate, errors_of
from snntune.experiments import build_preset, catalog_names

OUT = Path(__file__).resolve().parent.parent / "src" / "snntune" / "presets"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name in catalog_names():
        p = build_preset(name)
        errors = errors_of(validate(p.spec))
        if errors:
            raise SystemExit(f"{name}: invalid spec: {[e.message for e in errors]}")
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(p.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"wrote {path.name}")


if __name__ == "__main__":
    main()
