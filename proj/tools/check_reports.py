"""Runs every subcommand and validates its report against docs/report.schema.json."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    binary, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)

        def run(*args):
            proc = subprocess.run([binary, *map(str, args)], capture_output=True, text=True)
            return proc.returncode, proc.stdout

        points, balls, multi = tmp / "points.json", tmp / "balls.json", tmp / "multi.json"
        run("gen", "--kind", "random", "--red", 3, "--blue", 4, "-d", 2, "--seed", 5, "--range", 30, "-o", points)
        run("gen", "--kind", "balls", "--red", 2, "--blue", 3, "-d", 2, "--seed", 5, "-o", balls)
        run("gen", "--kind", "multipoint", "--red", 2, "--blue", 2, "-d", 3, "--seed", 5, "--level", "sgpp", "-o", multi)
        big = tmp / "big.json"
        run("gen", "--kind", "random", "--red", 12, "--blue", 12, "-d", 2, "--seed", 1, "-o", big)
        collinear = tmp / "collinear.json"
        collinear.write_text(json.dumps({"version": 1, "dimension": 2, "points": [
            {"color": "red", "coords": [0, 0]}, {"color": "blue", "coords": [1, 1]}, {"color": "blue", "coords": [2, 2]}]}))
        cases = [
            ((0, 2), ["validate", "-i", points]),
            ((2,), ["validate", "-i", collinear]),
            ((0,), ["transform", "-i", multi]),
            ((0,), ["sp", "-i", points]),
            ((0,), ["sp", "-i", points, "--mode", "float", "--strategy", "scan"]),
            ((0,), ["sp", "-i", multi]),
            ((2,), ["sp", "-i", collinear]),
            ((0,), ["esm", "-i", points]),
            ((0,), ["esm", "-i", points, "--mode", "exact"]),
            ((0,), ["sp-objects", "-i", balls]),
            ((0,), ["esm-objects", "-i", balls]),
            ((0,), ["sch", "-i", points, "--kind", "membership", "-q", "1,1"]),
            ((0,), ["sch", "-i", points, "--kind", "intersection", "-q", "1,1", "-q", "7/3,5"]),
            ((0,), ["sch", "-i", points, "--kind", "eps-distant", "-q", "1,1", "--eps", "1/10"]),
            ((0,), ["sch", "-i", points, "--kind", "expected-distance", "-q", "1,1"]),
            ((0,), ["oracle", "-i", points, "--what", "all"]),
            ((0,), ["oracle", "-i", balls, "--what", "all"]),
            ((0,), ["gen", "--kind", "cluster", "--red", 2, "--blue", 4]),
            ((0,), ["bench", "-d", 2, "--n", 2, "--sizes", "4,8"]),
            ((0,), ["sp", "-i", points, "--threads", 2, "--timings"]),
            ((3,), ["oracle", "-i", big]),
        ]
        for codes, args in cases:
            code, out = run(*args)
            label = " ".join(map(str, args[:3]))
            try:
                validator.validate(json.loads(out))
            except (json.JSONDecodeError, jsonschema.ValidationError) as e:
                print(f"FAIL schema {label}: {str(e).splitlines()[0]}")
                failures += 1
                continue
            if code not in codes:
                print(f"FAIL exit {label}: {code} not in {codes}")
                failures += 1
                continue
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
