"""Batch front-end: classify / verify / fine / stats on JSON-line records.

Record schema (one JSON object per line):

    {"dim": int, "mode": "canonical"|"terminal",
     "weights": [int, ...],
     "torsion": [{"mu": int, "eta": [int, ...]}, ...],
     "class": "terminal"|"canonical_strict",
     "simplex": [[int, ...], ...],                 # optional
     "fine": {"dim": int, "vertices": [["p/q", ...], ...]},  # optional
     "fine_key": str}                              # optional

Records are sorted by (weights, torsion signature) and rationals are exact
strings, so repeated runs are byte-identical regardless of --jobs.

Exit codes: 0 success, 2 verification failure, 3 resource cap, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import census as census_mod
from . import fine as fine_mod
from . import polytope as polytope_mod
from . import singtest
from .degmat import DegreeMatrix, TorsionRow, is_almost_free, simplex
from .errors import FanoForgeError, ResourceCapError

THREADS_ENV = "FANO_FORGE_THREADS"

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_RESOURCE = 3
EXIT_IO = 4


def _default_jobs() -> int:
    val = os.environ.get(THREADS_ENV)
    if val:
        try:
            return max(1, int(val))
        except ValueError:
            pass
    return 1


def record_to_json(rec: census_mod.ClassificationRecord, n: int, mode: str,
                   with_simplex: bool = True) -> dict:
    Q = rec.matrix
    obj = {
        "dim": n,
        "mode": mode,
        "weights": list(Q.weights),
        "torsion": [{"mu": r.modulus, "eta": list(r.entries)} for r in Q.rows],
        "class": rec.sing.value,
    }
    if with_simplex:
        obj["simplex"] = simplex(Q)
    return obj


def matrix_from_json(obj) -> DegreeMatrix:
    rows = tuple(TorsionRow(t["mu"], tuple(t["eta"])) for t in obj["torsion"])
    return DegreeMatrix(tuple(obj["weights"]), rows)


def dump_record(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_records(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for k, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise FanoForgeError(f"{path}:{k + 1}: bad record: {exc}")
    return out


def read_weights_file(path):
    vectors = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            vectors.append(tuple(int(tok) for tok in line.split()))
    return vectors


# ---------------------------------------------------------------------------
# classify


def _record_sort_key(obj):
    return (tuple(obj["weights"]),
            tuple((t["mu"], tuple(t["eta"])) for t in obj["torsion"]))


def _shard_name(w) -> str:
    return "w-" + "-".join(map(str, w)) + ".jsonl"


def _journal_read(path):
    done = {}
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                done[tuple(entry["weights"])] = entry["sha256"]
    return done


def cmd_classify(args) -> int:
    mode = args.mode
    n = args.dim
    jobs = args.jobs
    opts = census_mod.ClassifyOptions(h_cap=args.h_cap, jobs=1)
    if args.weights_file:
        opts.weight_vectors = read_weights_file(args.weights_file)
        ws = sorted({w for w in opts.weight_vectors
                     if census_mod.validate_weight_vector(w)
                     and singtest.matches_mode(census_mod._wps_class(w), mode)})
    else:
        ws = census_mod.enumerate_weight_vectors(n, mode, args.h_cap)
    shard_dir = None
    done = {}
    if args.checkpoint:
        shard_dir = args.checkpoint + ".shards"
        os.makedirs(shard_dir, exist_ok=True)
        done = _journal_read(args.checkpoint)

    def shard_lines(w):
        recs = census_mod.classify_weight_vector(w, mode)
        return [dump_record(record_to_json(r, n, mode)) for r in recs]

    pending = [w for w in ws if w not in done]
    produced = {}
    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for w, lines in zip(pending, pool.map(
                    _classify_shard_worker, [(w, n, mode) for w in pending],
                    chunksize=max(1, len(pending) // (8 * jobs)))):
                produced[w] = lines
    else:
        for w in pending:
            produced[w] = shard_lines(w)

    if args.checkpoint:
        with open(args.checkpoint, "a", encoding="utf-8") as journal:
            for w in pending:
                lines = produced[w]
                blob = ("\n".join(lines) + "\n") if lines else ""
                digest = hashlib.sha256(blob.encode()).hexdigest()
                with open(os.path.join(shard_dir, _shard_name(w)), "w",
                          encoding="utf-8") as fh:
                    fh.write(blob)
                journal.write(dump_record(
                    {"weights": list(w), "sha256": digest}) + "\n")
                journal.flush()

    all_lines = []
    for w in ws:
        if w in produced:
            all_lines.extend(produced[w])
        else:
            shard_path = os.path.join(shard_dir, _shard_name(w))
            with open(shard_path, "r", encoding="utf-8") as fh:
                blob = fh.read()
            if hashlib.sha256(blob.encode()).hexdigest() != done[w]:
                raise FanoForgeError(f"checkpoint shard mismatch for {w}")
            all_lines.extend(l for l in blob.splitlines() if l)
    all_lines.sort(key=lambda l: _record_sort_key(json.loads(l)))
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in all_lines:
            fh.write(line + "\n")
    print(f"classify: wrote {len(all_lines)} records to {args.out}")
    return EXIT_OK


def _classify_shard_worker(triple):
    w, n, mode = triple
    recs = census_mod.classify_weight_vector(w, mode)
    return [dump_record(record_to_json(r, n, mode)) for r in recs]


# ---------------------------------------------------------------------------
# verify


def _verify_record(obj, oracle_cap):
    Q = matrix_from_json(obj)
    problems = []
    if not census_mod.validate_weight_vector(Q.weights):
        problems.append("invalid weight vector")
    if not is_almost_free(Q):
        problems.append("matrix is not almost free")
        return problems
    cls = singtest.classify(Q)
    if cls.value != obj["class"]:
        problems.append(f"class mismatch: stored {obj['class']}, got {cls.value}")
    if not singtest.matches_mode(cls, obj["mode"]):
        problems.append("class outside the run mode")
    rep = census_mod.minimal_representative(Q)
    if rep != Q:
        problems.append("matrix is not its own minimal representative")
    P = simplex(Q)
    if "simplex" in obj and obj["simplex"] != P:
        problems.append("stored simplex differs from the reconstruction")
    volume = sum(Q.weights) * Q.group.order
    if oracle_cap == 0 or volume <= oracle_cap:
        if singtest.lattice_point_oracle(P) != cls:
            problems.append("lattice point oracle disagrees")
    if "fine" in obj:
        problems.extend(_verify_fine_block(obj, P))
    return problems


def _verify_fine_block(obj, P):
    problems = []
    delta = polytope_mod.simplex_polytope(P)
    verts = [tuple(Fraction(v) for v in row) for row in obj["fine"]["vertices"]]
    for v in verts:
        if not delta.contains(v, strict=True):
            problems.append("fine vertex not strictly inside the simplex")
            break
    res = fine_mod.fine_interior(delta, dim_cap=delta.ambient_dim)
    if sorted(res.polytope.vertices) != sorted(verts):
        problems.append("stored fine body differs from the recomputation")
    elif res.dim != obj["fine"]["dim"]:
        problems.append("stored fine dimension is wrong")
    return problems


def cmd_verify(args) -> int:
    records = load_records(args.infile)
    failures = 0
    for k, obj in enumerate(records):
        problems = _verify_record(obj, args.oracle_cap)
        if problems:
            failures += 1
            for p in problems:
                print(f"record {k}: FAIL: {p}")
        elif args.verbose:
            print(f"record {k}: ok")
    print(f"verify: {len(records) - failures}/{len(records)} records pass")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------
# fine


def _fine_worker(line):
    obj = json.loads(line)
    Q = matrix_from_json(obj)
    P = obj.get("simplex") or simplex(Q)
    delta = polytope_mod.simplex_polytope(P)
    res = fine_mod.fine_interior(delta, dim_cap=max(fine_mod.DEFAULT_DIM_CAP,
                                                    delta.ambient_dim))
    obj["simplex"] = P
    obj["fine"] = {
        "dim": res.dim,
        "vertices": [[str(x) for x in v] for v in res.polytope.vertices],
    }
    obj["fine_key"] = polytope_mod.unimodular_key(res.polytope)
    return dump_record(obj)


def cmd_fine(args) -> int:
    records = load_records(args.infile)
    lines = [dump_record(o) for o in records]
    if args.jobs > 1 and len(lines) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            out = list(pool.map(_fine_worker, lines,
                                chunksize=max(1, len(lines) // (8 * args.jobs))))
    else:
        out = [_fine_worker(l) for l in lines]
    out.sort(key=lambda l: _record_sort_key(json.loads(l)))
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in out:
            fh.write(line + "\n")
    print(f"fine: wrote {len(out)} augmented records to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# stats


def _read_extra_column(path, count):
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                vals.append(line)
    if len(vals) != count:
        raise FanoForgeError(
            f"extra column has {len(vals)} values for {count} records")
    return vals


def cmd_stats(args) -> int:
    records = load_records(args.infile)
    extra = None
    if args.extra_column:
        extra = _read_extra_column(args.extra_column, len(records))
    writer = csv.writer(sys.stdout)
    if args.by == "weights":
        key = lambda o: " ".join(map(str, o["weights"]))
        header = ["weights"]
    elif args.by == "fine_dim":
        key = lambda o: o["fine"]["dim"]
        header = ["fine_dim"]
    elif args.by == "fine_key":
        counts = {}
        for o in records:
            counts.setdefault(o["fine"]["dim"], set()).add(o["fine_key"])
        writer.writerow(["fine_dim", "distinct_fine_keys"])
        for d in sorted(counts):
            writer.writerow([d, len(counts[d])])
        return EXIT_OK
    else:
        raise FanoForgeError(f"unknown grouping {args.by!r}")
    counts = {}
    for i, o in enumerate(records):
        k = key(o)
        if extra is not None:
            k = (k, extra[i])
        counts[k] = counts.get(k, 0) + 1
    if extra is not None:
        writer.writerow(header + ["extra", "count"])
        for k in sorted(counts, key=str):
            writer.writerow([k[0], k[1], counts[k]])
    else:
        writer.writerow(header + ["count"])
        for k in sorted(counts, key=str):
            writer.writerow([k, counts[k]])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fanoforge",
        description="Classify canonical/terminal fake weighted projective "
                    "spaces and compute Fine interiors of their simplices.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run the classification")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--mode", choices=["canonical", "terminal"], required=True)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--h-cap", type=int, default=None,
                   help="override the weight-sum search cap")
    p.add_argument("--weights-file", default=None,
                   help="one whitespace-separated weight tuple per line, "
                        "'#' comments")
    p.add_argument("--checkpoint", default=None,
                   help="journal path; completed weight vectors are skipped "
                        "on resume")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="re-check a record file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--oracle-cap", type=int, default=20000,
                   help="skip the lattice point oracle above this normalized "
                        "volume (0 = never skip)")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fine", help="augment records with Fine interiors")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.set_defaults(func=cmd_fine)

    p = sub.add_parser("stats", help="aggregate a record file to CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--by", choices=["fine_dim", "fine_key", "weights"],
                   required=True)
    p.add_argument("--extra-column", default=None,
                   help="file with one scalar per record, grouped into the "
                        "histogram")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FanoForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
