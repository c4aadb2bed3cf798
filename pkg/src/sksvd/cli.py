"""Command-line surface: init, update, spectrum, certify, merge, oracle.

Exit codes: 0 success (certify: certificate passed), 1 certificate
failed, 2 usage, 3 ingestion (bad stream or state file), 4 numerical,
5 resource budget, 6 incompatible states.

Reports go to stdout (or --out) and are byte-identical across runs for
identical inputs; each command additionally emits a one-line JSON run
manifest to stderr carrying input digests and wall time.
"""

from __future__ import annotations

import argparse
import fcntl
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import bounds, graphs, oracle, spectral, turnstile
from .errors import (BudgetExceededError, CorruptStateError,
                     IncompatibleSketchError, StreamFormatError)
from .jl import GAUSSIAN, IDENTITY, RADEMACHER, SPARSE_SIGN, JlFamily, SketchConfig, \
    required_measurements

EXIT_PASS = 0
EXIT_CERT_FAIL = 1
EXIT_USAGE = 2
EXIT_INGEST = 3
EXIT_NUMERICAL = 4
EXIT_RESOURCE = 5
EXIT_INCOMPATIBLE = 6


def _digest(data: bytes) -> str:
    """64-bit content hash (leading 16 hex digits of SHA-256)."""
    return hashlib.sha256(data).hexdigest()[:16]


def _emit_manifest(command: str, config: SketchConfig | None, inputs: dict,
                   outputs: list, started: float, extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "config": config.to_dict() if config is not None else None,
        "inputs": inputs,
        "outputs": outputs,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    if extra:
        manifest.update(extra)
    print(json.dumps(manifest), file=sys.stderr)


def _atomic_write(path: str, data: bytes) -> None:
    # temp file in the destination directory so rename stays on one filesystem
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sksv-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_state(path: str) -> tuple[turnstile.SketchState, str, bytes]:
    try:
        with open(path, "rb") as fh:
            fcntl.flock(fh, fcntl.LOCK_SH)
            data = fh.read()
    except OSError as exc:
        raise CorruptStateError(f"cannot read state file {path}: {exc}") from exc
    state, mode = turnstile.deserialize_with_mode(data)
    return state, mode, data


def _write_report(text: str, out_path: str | None) -> list:
    if out_path:
        _atomic_write(out_path, text.encode("utf-8") + b"\n")
        return [out_path]
    print(text)
    return []


def _open_stream(source: str):
    if source == "-":
        return sys.stdin, False
    return open(source, "r", encoding="utf-8"), True


# ---------------------------------------------------------------- commands

def cmd_init(args) -> int:
    started = time.perf_counter()
    if args.mode == "graph":
        if args.vertices is None:
            raise _Usage("--mode graph requires --vertices")
        n = args.vertices
        N = graphs.pair_count(n)
    else:
        if args.rows is None or args.cols is None:
            raise _Usage("--mode matrix requires --rows and --cols")
        N, n = args.rows, args.cols

    if args.phi == IDENTITY:
        if not args.unsafe_test_mode:
            raise _Usage("--phi identity requires --unsafe-test-mode")
        if args.m is not None and args.m != N:
            raise _Usage(f"identity operator forces m == N == {N}")
        family, m = JlFamily(IDENTITY), N
    else:
        family = JlFamily(args.family, args.sparsity)
        if args.m is not None:
            m = args.m
        elif args.k is not None:
            m = required_measurements(args.k, args.eps, args.delta, family)
        else:
            raise _Usage("give either --m or --k (to compute m)")

    k_hint = args.k_hint if args.k_hint is not None else args.k
    config = SketchConfig(seed=args.seed, family=family, m=m, N=N, n=n,
                          eps=args.eps, delta=args.delta, k_hint=k_hint)
    state = turnstile.new_sketch(config)
    blob = turnstile.serialize(state, mode=args.mode)
    _atomic_write(args.out, blob)
    print(json.dumps({"m": m, "N": N, "n": n, "out": args.out}))
    _emit_manifest("init", config, {}, [args.out], started)
    return EXIT_PASS


def cmd_update(args) -> int:
    started = time.perf_counter()
    state, mode, raw = _read_state(args.state)
    applied = rejected = 0
    fh, close = _open_stream(args.stream)
    try:
        if mode == turnstile.MODE_GRAPH:
            g = graphs.GraphSketch(vertices=state.config.n, inner=state)
            parse, apply = graphs.iter_edge_updates, lambda u: graphs.apply_edge_update(g, u)
        else:
            parse, apply = turnstile.iter_updates, lambda u: turnstile.apply_update(state, u)
        it = parse(fh)
        while True:
            try:
                u = next(it)
            except StopIteration:
                break
            except StreamFormatError:
                if args.on_error == "abort":
                    raise
                rejected += 1
                it = parse(fh)  # the generator died with the bad line; resume
                continue
            try:
                apply(u)
                applied += 1
            except (IndexError, ValueError) as exc:
                if args.on_error == "abort":
                    raise StreamFormatError(f"rejected update {u}: {exc}") from exc
                rejected += 1
    finally:
        if close:
            fh.close()
    blob = turnstile.serialize(state, mode=mode)
    _atomic_write(args.state, blob)
    _emit_manifest("update", state.config, {args.state: _digest(raw)}, [args.state],
                   started, {"applied": applied, "rejected": rejected})
    return EXIT_PASS


def cmd_spectrum(args) -> int:
    started = time.perf_counter()
    state, mode, raw = _read_state(args.state)
    estimate = spectral.sketched_svd(turnstile.snapshot(state), tol=args.tol)
    if state.config.k_hint is not None and estimate.rank != state.config.k_hint:
        print(f"warning: detected rank {estimate.rank} != expected rank "
              f"{state.config.k_hint}", file=sys.stderr)
    report = estimate.to_dict()
    if mode == turnstile.MODE_GRAPH:
        report["n"] = state.config.n
        report["k_detected"] = estimate.rank
    outputs = _write_report(json.dumps(report), args.out)
    _emit_manifest("spectrum", state.config, {args.state: _digest(raw)}, outputs, started)
    return EXIT_PASS


def _replay_oracle(log_path: str, mode: str, N: int, n: int, tol: float):
    """Oracle decomposition (and graph ground truth, if any) from an update log."""
    with open(log_path, "r", encoding="utf-8") as fh:
        if mode == turnstile.MODE_GRAPH:
            graph = graphs.oracle_laplacian(graphs.iter_edge_updates(fh), n)
            return oracle.exact_svd(graph.incidence, tol), graph
        X = oracle.materialize_X(turnstile.iter_updates(fh), N, n)
        return oracle.exact_svd(X, tol), None


def cmd_certify(args) -> int:
    started = time.perf_counter()
    state, mode, raw = _read_state(args.state)
    config = state.config
    eps = args.eps if args.eps is not None else config.eps
    decomp, graph = _replay_oracle(args.log, mode, config.N, config.n, args.tol)
    estimate = spectral.sketched_svd(turnstile.snapshot(state), tol=args.tol)

    meta = {"m": config.m, "seed": config.seed, "trial_id": args.trial_id}
    certificate = bounds.certify(decomp, estimate, eps, meta=meta)
    diag = oracle.perturbation_diagnostics(config, decomp, turnstile.snapshot(state))
    L = min(decomp.k, estimate.rank)
    trimmed = oracle.OracleDecomposition(X=decomp.X, U=decomp.U[:, :L],
                                         sigma=decomp.sigma[:L], V=decomp.V[:, :L], k=L)
    est_trim = spectral.SpectralEstimate(
        singular_values=estimate.singular_values[:L],
        right_vectors=estimate.right_vectors[:, :L],
        eigenvalues=estimate.eigenvalues[:L],
        rank=L, tol_used=estimate.tol_used)
    weyl_ok = oracle.weyl_check(trimmed, diag, est_trim)
    embed_ok = oracle.subspace_embedding_check(config, decomp, eps)

    report = certificate.to_dict()
    report.update({
        "weyl_pass": weyl_ok,
        "subspace_embedding_pass": embed_ok,
        "projected_norm": diag.projected_norm,
        "E_norm": diag.E_norm,
        "delta_phi_norm": diag.delta_phi_norm,
    })
    if graph is not None:
        report["n"] = config.n
        report["c_oracle"] = graph.components
        report["k_detected"] = estimate.rank
        report["laplacian_matches_incidence_gram"] = bool(
            np.allclose(graph.laplacian, graph.incidence_gram, atol=1e-12))
    outputs = _write_report(json.dumps(report), args.out)
    _emit_manifest("certify", config,
                   {args.state: _digest(raw), args.log: _digest(open(args.log, "rb").read())},
                   outputs, started)
    return EXIT_PASS if certificate.overall_pass else EXIT_CERT_FAIL


def cmd_merge(args) -> int:
    started = time.perf_counter()
    state_a, mode_a, raw_a = _read_state(args.state_a)
    state_b, mode_b, raw_b = _read_state(args.state_b)
    if mode_a != mode_b:
        raise IncompatibleSketchError(f"mode mismatch: {mode_a} vs {mode_b}")
    merged = turnstile.merge(state_a, state_b)
    _atomic_write(args.out, turnstile.serialize(merged, mode=mode_a))
    _emit_manifest("merge", merged.config,
                   {args.state_a: _digest(raw_a), args.state_b: _digest(raw_b)},
                   [args.out], started)
    return EXIT_PASS


def cmd_oracle(args) -> int:
    started = time.perf_counter()
    if args.mode == "graph":
        if args.vertices is None:
            raise _Usage("--mode graph requires --vertices")
        N, n = graphs.pair_count(args.vertices), args.vertices
    else:
        if args.rows is None or args.cols is None:
            raise _Usage("--mode matrix requires --rows and --cols")
        N, n = args.rows, args.cols
    decomp, graph = _replay_oracle(args.log, args.mode, N, n, args.tol)
    report = {
        "N": N, "n": n, "k": decomp.k,
        "singular_values": [float(s) for s in decomp.sigma],
        "eigenvalues": [float(v) for v in decomp.eigenvalues],
        "right_vectors": [[float(x) for x in row] for row in decomp.V],
    }
    if graph is not None:
        report["c"] = graph.components
        report["rank"] = graph.rank
        report["laplacian_eigenvalues"] = sorted(
            (float(v) for v in np.linalg.eigvalsh(graph.laplacian)), reverse=True)
    outputs = _write_report(json.dumps(report), args.out)
    _emit_manifest("oracle", None, {args.log: _digest(open(args.log, "rb").read())},
                   outputs, started)
    return EXIT_PASS


# ---------------------------------------------------------------- wiring

class _Usage(Exception):
    """Post-parse usage error (maps to exit 2 like argparse's own)."""


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sksvd",
                                description="streaming sketched SVD toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    init = sub.add_parser("init", help="create an empty sketch state file")
    init.add_argument("--mode", choices=["matrix", "graph"], default="matrix")
    init.add_argument("--rows", type=int, help="ambient rows N (matrix mode)")
    init.add_argument("--cols", type=int, help="data columns n (matrix mode)")
    init.add_argument("--vertices", type=int, help="vertex count (graph mode)")
    init.add_argument("--k", type=int, help="target rank; used to compute m")
    init.add_argument("--m", type=int, help="sketch rows (overrides --k)")
    init.add_argument("--eps", type=float, required=True)
    init.add_argument("--delta", type=float, required=True)
    init.add_argument("--seed", type=int, required=True)
    init.add_argument("--family", choices=[GAUSSIAN, RADEMACHER, SPARSE_SIGN],
                      default=GAUSSIAN)
    init.add_argument("--sparsity", type=int, default=3,
                      help="nonzero fraction 1/s for sparse_sign")
    init.add_argument("--k-hint", type=int, default=None)
    init.add_argument("--phi", choices=[IDENTITY], default=None,
                      help="test-only operator override")
    init.add_argument("--unsafe-test-mode", action="store_true")
    init.add_argument("--out", required=True)
    init.set_defaults(func=cmd_init)

    upd = sub.add_parser("update", help="apply a JSONL update stream to a state file")
    upd.add_argument("state")
    upd.add_argument("--stream", default="-", help="JSONL file, or - for stdin")
    upd.add_argument("--on-error", choices=["abort", "skip"], default="abort")
    upd.set_defaults(func=cmd_update)

    spec = sub.add_parser("spectrum", help="spectral estimate of a sketch state")
    spec.add_argument("state")
    spec.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
    spec.add_argument("--out", default=None)
    spec.set_defaults(func=cmd_spectrum)

    cert = sub.add_parser("certify",
                          help="replay the update log as a dense oracle and certify")
    cert.add_argument("state")
    cert.add_argument("--log", required=True, help="JSONL update log to replay")
    cert.add_argument("--eps", type=float, default=None,
                      help="distortion to certify at (default: config eps)")
    cert.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
    cert.add_argument("--trial-id", default=None)
    cert.add_argument("--out", default=None)
    cert.set_defaults(func=cmd_certify)

    mrg = sub.add_parser("merge", help="add two sketches of the same config")
    mrg.add_argument("state_a")
    mrg.add_argument("state_b")
    mrg.add_argument("--out", required=True)
    mrg.set_defaults(func=cmd_merge)

    orc = sub.add_parser("oracle", help="dump the dense oracle decomposition of a log")
    orc.add_argument("--log", required=True)
    orc.add_argument("--mode", choices=["matrix", "graph"], default="matrix")
    orc.add_argument("--rows", type=int)
    orc.add_argument("--cols", type=int)
    orc.add_argument("--vertices", type=int)
    orc.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
    orc.add_argument("--out", default=None)
    orc.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"sksvd: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StreamFormatError, CorruptStateError, FileNotFoundError) as exc:
        print(f"sksvd: ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except np.linalg.LinAlgError as exc:
        print(f"sksvd: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BudgetExceededError as exc:
        print(f"sksvd: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except IncompatibleSketchError as exc:
        print(f"sksvd: incompatible states: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except ValueError as exc:
        print(f"sksvd: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
