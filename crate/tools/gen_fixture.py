#!/usr/bin/env python3
"""Writes the templated Java method fixtures used by the CLI tests.

Each record is a small accessor-style method with a javadoc summary that
follows from the method name. The train and test files share templates and
vocabulary but never a (template, field) combination.
"""

import argparse
import json
import random
from pathlib import Path

WORDS = [
    "user", "name", "account", "order", "item", "price", "total", "file",
    "path", "stream", "buffer", "cache", "session", "token", "request",
    "response", "message", "event", "node", "index",
]

TYPES = ["String", "int", "long", "Object", "List<String>"]

TEMPLATES = [
    ("public {t} get{N}() {{ return {n}; }}",
     "Returns the {w}."),
    ("public void set{N}({t} {n}) {{ this.{n} = {n}; }}",
     "Sets the {w}."),
    ("public boolean has{N}() {{ return {n} != null; }}",
     "Checks whether the {w} is present."),
    ("public void add{N}({t} item) {{ {n}List.add(item); }}",
     "Adds an item to the {w} list."),
    ("public boolean remove{N}({t} item) {{ return {n}List.remove(item); }}",
     "Removes an item from the {w} list."),
    ("public void clear{N}() {{ {n}List.clear(); }}",
     "Clears the {w} list."),
    ("public int count{N}() {{ return {n}List.size(); }}",
     "Returns the number of {w} entries."),
    ("public void reset{N}() {{ {n} = null; }}",
     "Resets the {w} to its default value."),
    ("public void validate{N}({t} value) {{ if (value == null) {{ "
     "throw new IllegalArgumentException(\"{n}\"); }} }}",
     "Validates the given {w}."),
    ("public void print{N}() {{ System.out.println({n}); }}",
     "Prints the {w} to the console."),
]


def fields():
    out = [(w,) for w in WORDS]
    out += [(a, b) for a in WORDS for b in WORDS if a != b]
    return out


def record(template, field, rng, project):
    code, doc = TEMPLATES[template]
    camel = "".join(p.capitalize() for p in field)
    lower = field[0] + "".join(p.capitalize() for p in field[1:])
    source = code.format(t=rng.choice(TYPES), N=camel, n=lower)
    return {
        "source_text": source,
        "doc_text": "/** " + doc.format(w=" ".join(field)) + " */",
        "project_id": project,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, required=True)
    ap.add_argument("--train", type=int, default=200)
    ap.add_argument("--test", type=int, default=50)
    ap.add_argument("--projects", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    combos = [(t, f) for t in range(len(TEMPLATES)) for f in fields()]
    rng.shuffle(combos)
    picked = combos[: args.train + args.test]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, chunk in (("train", picked[: args.train]), ("test", picked[args.train:])):
        path = args.out_dir / f"{name}_raw.jsonl"
        with path.open("w", encoding="utf-8") as fh:
            for i, (t, f) in enumerate(chunk):
                project = f"{name}-project-{i % args.projects:02d}"
                fh.write(json.dumps(record(t, f, rng, project), sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
