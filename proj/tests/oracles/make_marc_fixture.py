# SPDX-License-Identifier: Apache-2.0
"""Writes the ISO 2709 fixtures with pymarc and records the field data they
were generated from, so the C++ reader can be checked field by field.

    python3 tests/oracles/make_marc_fixture.py

Outputs (in fixtures/): mini.mrc, mini_auth.mrc, random.mrc, random_auth.mrc
and the matching *.expected.json files.
"""
import json
import random
import re
from pathlib import Path

from pymarc import Field, Indicators, Record, Subfield

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"

BIB_LEADER = "00000nam a2200000 i 4500"
AUTH_LEADER = "00000nz  a2200000n  4500"


def subfields(pairs):
    return [Subfield(code=c, value=v) for c, v in pairs]


def bib_record(entry):
    rec = Record(force_utf8=True, leader=BIB_LEADER)
    rec.add_field(Field(tag="001", data=entry["id"]))
    t = [("a", entry["245a"])]
    if entry.get("245b"):
        t.append(("b", entry["245b"]))
    if entry.get("245c"):
        t.append(("c", entry["245c"]))
    rec.add_field(Field(tag="245", indicators=Indicators("1", "0"), subfields=subfields(t)))
    if entry.get("imprint"):
        tag, value = entry["imprint"]
        rec.add_field(Field(tag=tag, indicators=Indicators(" ", "1"),
                            subfields=subfields([("a", "New York :"), ("b", "Wiley,"), ("c", value)])))
    if entry.get("490a"):
        rec.add_field(Field(tag="490", indicators=Indicators("1", " "),
                            subfields=subfields([("a", entry["490a"]), ("v", "12")])))
    for sub in entry.get("650", []):
        rec.add_field(Field(tag="650", indicators=Indicators(" ", "0"), subfields=subfields(sub)))
    for sub in entry.get("651", []):
        rec.add_field(Field(tag="651", indicators=Indicators(" ", "0"), subfields=subfields(sub)))
    return rec


def norm(text):
    text = "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in text)
    text = " ".join(text.split())
    while True:
        nxt = re.sub(r" ?-{2,} ?", "--", text)
        if nxt == text:
            return text
        text = nxt


def heading_of(pairs):
    main = [v for c, v in pairs if c == "a"][0]
    rest = [v for c, v in pairs if c in "xvyz"]
    return "--".join([main] + rest)


def first_year(text):
    digits = ""
    for ch in text + " ":
        if ch.isdigit() and ch.isascii():
            digits += ch
            continue
        if len(digits) == 4:
            return int(digits)
        digits = ""
    return None


def expected_bib(entry):
    out = {"id": entry["id"], "title": entry["245a"]}
    if entry.get("245b"):
        out["title"] += " " + entry["245b"]
    if entry.get("245c"):
        out["statement"] = entry["245c"]
    if entry.get("imprint"):
        year = first_year(entry["imprint"][1])
        if year is not None:
            out["year"] = year
    if entry.get("490a"):
        out["series"] = entry["490a"]
    subjects, seen = [], set()
    for sub in entry.get("650", []):
        h = heading_of(sub)
        key = norm(h)
        if key not in seen:
            seen.add(key)
            subjects.append(h)
    out["subjects"] = subjects
    return out


def auth_record(entry):
    rec = Record(force_utf8=True, leader=AUTH_LEADER)
    rec.add_field(Field(tag="001", data=entry["id"]))
    rec.add_field(Field(tag="150", indicators=Indicators(" ", " "), subfields=subfields(entry["150"])))
    for w, sub in entry.get("550", []):
        pairs = ([("w", w)] if w else []) + sub
        rec.add_field(Field(tag="550", indicators=Indicators(" ", " "), subfields=subfields(pairs)))
    return rec


def expected_auth(entry):
    out = {"id": entry["id"], "heading": heading_of(entry["150"])}
    broader, seen = [], {norm(out["heading"])}
    for w, sub in entry.get("550", []):
        if "g" not in w:
            continue
        h = heading_of(sub)
        key = norm(h)
        if key not in seen:
            seen.add(key)
            broader.append(h)
    out["broader"] = broader
    return out


MINI_BIBS = [
    {"id": "b1", "245a": "Finite elements", "245c": "Eric B. Becker, Graham F. Carey, J. Tinsley Oden.",
     "imprint": ("260", "c1986."), "490a": "Texas finite element series",
     "650": [[("a", "Finite element method")]]},
    {"id": "b2", "245a": "Introduction to finite and boundary element methods for engineers /",
     "imprint": ("264", "[1992]"),
     "650": [[("a", "Finite element method")], [("a", "Boundary element methods")]]},
    {"id": "b3", "245a": "Programming the finite element method :", "245b": "with application to geomechanics",
     "imprint": ("260", "2004, c1998"),
     "650": [[("a", "Finite element method"), ("x", "Computer programs")],
             [("a", "Finite element method"), ("x", "Data processing"), ("v", "Handbooks, manuals, etc.")]],
     "651": [[("a", "Texas"), ("x", "Maps")]]},
    {"id": "b4", "245a": "Untitled symposium"},
    {"id": "b5", "245a": "Équations aux dérivées partielles", "imprint": ("260", "s.d."),
     "650": [[("a", "Differential equations, Partial"), ("x", "Numerical solutions"), ("y", "20th century"),
              ("z", "France")]]},
]

MINI_AUTHS = [
    {"id": "sh1", "150": [("a", "Finite element method"), ("x", "Data processing")],
     "550": [("g", [("a", "Finite element method")]), ("g", [("a", "Electronic data processing")])]},
    {"id": "sh2", "150": [("a", "Finite element method")],
     "550": [("g", [("a", "Numerical analysis")]), ("h", [("a", "Finite strip method")]),
             ("", [("a", "Structural analysis (Engineering)")])]},
    {"id": "sh3", "150": [("a", "Numerical analysis")], "550": [("g", [("a", "Mathematical analysis")])]},
    {"id": "sh4", "150": [("a", "Mathematics")]},
]

WORDS = ["finite", "element", "method", "boundary", "numerical", "analysis", "théorie", "Mathematik",
         "elasticity", "fluid", "mechanics", "données", "plates", "shells", "graphs", "wavelets"]


def random_heading(rng):
    pairs = [("a", " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 3))).capitalize())]
    for code in rng.sample("xvyz", rng.randint(0, 2)):
        pairs.append((code, rng.choice(WORDS).capitalize()))
    return pairs


def random_corpus(seed, n_bib=60, n_auth=40):
    rng = random.Random(seed)
    bibs = []
    for i in range(n_bib):
        entry = {"id": f"r{i:03d}", "245a": " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6)))}
        if rng.random() < 0.5:
            entry["245b"] = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 4)))
        if rng.random() < 0.6:
            entry["245c"] = rng.choice(["by A. Author.", "edited by B. Editor", "Zoë Ångström"])
        if rng.random() < 0.8:
            entry["imprint"] = (rng.choice(["260", "264"]),
                               rng.choice([f"c{rng.randint(1900, 2020)}.", f"[{rng.randint(1900, 2020)}]", "n.d."]))
        if rng.random() < 0.3:
            entry["490a"] = " ".join(rng.choice(WORDS) for _ in range(2)) + " series"
        entry["650"] = [random_heading(rng) for _ in range(rng.randint(0, 4))]
        bibs.append(entry)
    auths = []
    for i in range(n_auth):
        entry = {"id": f"sh{i:03d}", "150": random_heading(rng), "550": []}
        for _ in range(rng.randint(0, 3)):
            entry["550"].append((rng.choice(["g", "g", "h", "", "gz"]), random_heading(rng)))
        auths.append(entry)
    return bibs, auths


def write(name, records):
    (FIXTURES / name).write_bytes(b"".join(r.as_marc() for r in records))


def write_json(name, data):
    (FIXTURES / name).write_text(json.dumps(data, ensure_ascii=False, indent=1, sort_keys=True) + "\n",
                                 encoding="utf-8")


def main():
    write("mini.mrc", [bib_record(s) for s in MINI_BIBS])
    write("mini_auth.mrc", [auth_record(s) for s in MINI_AUTHS])
    write_json("mini.expected.json", {"bib": [expected_bib(s) for s in MINI_BIBS],
                                      "auth": [expected_auth(s) for s in MINI_AUTHS]})
    bibs, auths = random_corpus(20260917)
    write("random.mrc", [bib_record(s) for s in bibs])
    write("random_auth.mrc", [auth_record(s) for s in auths])
    write_json("random.expected.json", {"bib": [expected_bib(s) for s in bibs],
                                        "auth": [expected_auth(s) for s in auths]})


if __name__ == "__main__":
    main()
