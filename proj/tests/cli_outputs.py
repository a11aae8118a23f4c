"""End-to-end checks of the peanolab command line: exit codes, CSV headers,
JSON schema conformance, config precedence and rerun determinism."""

import argparse
import csv
import json
import os
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

import jsonschema

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(binary, *args, env=None, cwd=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    proc = subprocess.run([str(binary), *map(str, args)], capture_output=True, text=True, env=full_env, cwd=cwd)
    return proc


def header(path):
    with open(path, newline="") as f:
        return next(csv.reader(f))


def validate(doc, schema, what):
    try:
        jsonschema.validate(doc, schema)
        check(True, what)
    except jsonschema.ValidationError as err:
        check(False, f"{what}: {err.message}")


def strip_stamp(path):
    doc = json.loads(Path(path).read_text())
    doc.pop("environment", None)
    return json.dumps(doc, sort_keys=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--binary", required=True)
    ap.add_argument("--schemas", required=True)
    ap.add_argument("--configs", required=True)
    opts = ap.parse_args()
    exe = Path(opts.binary).resolve()
    report_schema = json.loads((Path(opts.schemas) / "report.schema.json").read_text())
    map_schema = json.loads((Path(opts.schemas) / "map_summary.schema.json").read_text())
    quick = (Path(opts.configs) / "quick.ini").resolve()
    default = (Path(opts.configs) / "default.ini").resolve()

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        # usage errors
        check(run(exe).returncode == 2, "no subcommand exits 2")
        check(run(exe, "simulate", "--steps", "0", "--output", tmp / "x.bin").returncode == 2,
              "simulate with n=0 exits 2")
        check(run(exe, "simulate", "--kappa-prime", "3", "--output", tmp / "x.bin").returncode == 2,
              "kappa' out of range exits 2")
        check(run(exe, "conescan", "--input", tmp / "x.bin", "--window-a", "0.7", "--window-b", "0.2").returncode == 2,
              "reversed window exits 2")
        check(run(exe, "verify-all", "--eps-min-exp", "-5", "--eps-max-exp", "-3").returncode == 2,
              "too few covering scales exits 2")
        check(run(exe, "--help").returncode == 0, "--help exits 0")

        # simulate
        lat = tmp / "lattice.bin"
        bro = tmp / "brownian.bin"
        check(run(exe, "--config", quick, "simulate", "--output", lat).returncode == 0, "simulate lattice")
        check(lat.stat().st_size == 4 + 2 + 1 + 8 * 3 + 8 + 16 * 4097, "config sets the step count")
        check(run(exe, "simulate", "--kind", "brownian", "--steps", "4096", "--dt", "0.5", "--output", bro).returncode == 0,
              "simulate brownian")

        # runtime and format errors
        trunc = tmp / "trunc.bin"
        trunc.write_bytes(lat.read_bytes()[:100])
        proc = run(exe, "conescan", "--input", trunc, "--output-dir", tmp / "t")
        check(proc.returncode == 1, "conescan on a truncated path file exits 1")
        check("trunc.bin" in proc.stderr, "format error names the file")
        check(run(exe, "conescan", "--input", tmp / "missing.bin").returncode == 1, "missing input exits 1")
        check(run(exe, "--config", tmp / "missing.ini", "simulate", "--output", lat).returncode == 1,
              "missing config exits 1")
        check(run(exe, "mate", "--input", bro, "--output-dir", tmp / "m").returncode == 1,
              "mating a Brownian path exits 1")

        # conescan / beads / mate outputs
        for d in ("a", "b"):
            out = tmp / d
            check(run(exe, "conescan", "--input", lat, "--output-dir", out).returncode == 0, f"conescan run {d}")
            check(run(exe, "beads", "--input", lat, "--output-dir", out).returncode == 0, f"beads run {d}")
            check(run(exe, "mate", "--input", lat, "--output-dir", out).returncode == 0, f"mate run {d}")
        expected = {
            "intervals.csv": ["v", "t", "side", "dL", "dR", "area"],
            "covering_ancestor_free.csv": ["epsilon", "count"],
            "covering_infima.csv": ["epsilon", "count"],
            "ledger.csv": ["start", "end", "area", "dL", "dR"],
            "chordal.csv": ["mass_time", "Lb", "Rb", "is_jump"],
            "map.csv": ["half_edge", "twin", "next_at_vertex", "vertex"],
        }
        for name, cols in expected.items():
            check(header(tmp / "a" / name) == cols, f"{name} header")
        for name in [*expected, "map_summary.json"]:
            check((tmp / "a" / name).read_bytes() == (tmp / "b" / name).read_bytes(), f"{name} identical on rerun")
        summary = json.loads((tmp / "a" / "map_summary.json").read_text())
        validate(summary, map_schema, "map summary matches schema")
        check(summary["genus"] == 0, "mated lattice map is a sphere")
        check(run(exe, "mate", "--input", bro, "--coarsen", "--output-dir", tmp / "c").returncode == 0,
              "mate --coarsen accepts a Brownian path")
        validate(json.loads((tmp / "c" / "map_summary.json").read_text()), map_schema, "coarsened summary matches schema")

        # exponents
        proc = run(exe, "--config", quick, "exponents", "--output-dir", tmp / "e", "--plots")
        check(proc.returncode in (0, 3), "exponents exits 0 or 3")
        report = json.loads((tmp / "e" / "exponents.json").read_text())
        validate(report, report_schema, "exponents report matches schema")
        check(report["pass"] == (proc.returncode == 0), "exponents exit code follows the claims")
        svgs = sorted((tmp / "e").glob("*.svg"))
        check(len(svgs) == 4, "one plot per fitted claim")
        for svg in svgs:
            check(ET.parse(svg).getroot().tag.endswith("svg"), f"{svg.name} is well-formed SVG")

        # verify-all: config, precedence, determinism across worker counts
        runs = {}
        for label, extra, threads in (("one", [], "1"), ("three", [], "3"), ("seed", ["--seed", "9"], "2")):
            out = tmp / f"v-{label}"
            proc = run(exe, "--config", quick, "verify-all", "--output-dir", out, *extra,
                       env={"PEANOLAB_THREADS": threads})
            check(proc.returncode in (0, 3), f"verify-all ({label}) exits 0 or 3")
            doc = json.loads((out / "report.json").read_text())
            validate(doc, report_schema, f"verify-all report ({label}) matches schema")
            check(doc["pass"] == (proc.returncode == 0), f"verify-all ({label}) exit code follows the claims")
            check(doc["environment"]["workers"] == int(threads), f"PEANOLAB_THREADS={threads} caps the workers")
            runs[label] = (out / "report.json", doc)
        check(runs["one"][1]["environment"]["seed"] == 7, "INI value applies")
        check(runs["seed"][1]["environment"]["seed"] == 9, "command-line flag beats the INI value")
        check(strip_stamp(runs["one"][0]) == strip_stamp(runs["three"][0]),
              "reports identical outside the stamp across worker counts")
        check(strip_stamp(runs["one"][0]) != strip_stamp(runs["seed"][0]), "a new seed changes the estimates")
        ids = [c["claim_id"] for c in runs["one"][1]["claims"]]
        check(len(ids) == len(set(ids)) == 19, "every claim appears exactly once")
        check(sorted({c["criterion"] for c in runs["one"][1]["claims"]}) == list(range(1, 13)),
              "claims cover criteria 1 to 12")
        check(default.exists() and "[verify-all]" in default.read_text(), "default config ships a verify-all section")

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    print("all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
