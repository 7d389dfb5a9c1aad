"""Command-line pipeline: encrypt secrets into shares, decrypt them back,
score image pairs, run the built-in demo, or self-check the scheme.

Every run is reproducible: an explicit --seed (or QVMSS_SEED in the
environment) pins all randomness, and an auto-drawn seed is always echoed
so the run can be repeated.  Output files are staged and renamed into
place, so failures never leave partial artifacts.  manifest.json records
`{"seed", "arity", "width", "height", "files": {name: sha256-hex}}`.

Exit codes: 0 success, 1 selftest property failure, 2 I/O or parse
failure, 3 image dimension mismatch.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

from . import metrics, scheme
from .imaging import (
    BinaryImage,
    PbmParseError,
    PbmVariant,
    make_fixture,
    read_pbm,
    write_pbm,
)
from .scheme import SchemeConfig, classical_encrypt, decrypt, decrypt_all, encrypt

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_IO = 2
EXIT_SHAPE = 3

_MASK64 = (1 << 64) - 1


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _resolve_seed(explicit: int | None) -> int:
    if explicit is not None:
        return explicit & _MASK64
    env = os.environ.get("QVMSS_SEED")
    if env is not None:
        try:
            return int(env, 0) & _MASK64
        except ValueError:
            raise _Failure(EXIT_IO, f"QVMSS_SEED is not an integer: {env!r}")
    return int.from_bytes(os.urandom(8), "big")


def _load_image(path: str) -> BinaryImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise _Failure(EXIT_IO, f"{path}: {exc}")
    try:
        return read_pbm(data)
    except PbmParseError as exc:
        raise _Failure(EXIT_IO, f"{path}: {exc}")


def _load_matching_images(paths: list[str]) -> list[BinaryImage]:
    images = [_load_image(p) for p in paths]
    first = images[0]
    for path, img in zip(paths[1:], images[1:]):
        if (img.width, img.height) != (first.width, first.height):
            raise _Failure(
                EXIT_SHAPE,
                f"{path}: dimensions {img.width}x{img.height} do not match "
                f"{paths[0]} ({first.width}x{first.height})",
            )
    return images


def _write_outputs(out_dir: str, artifacts: dict[str, bytes]) -> dict[str, str]:
    """Stage every artifact, then rename into place; returns name -> sha256."""
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        staged = []
        try:
            for name, payload in artifacts.items():
                tmp = directory / (name + ".tmp")
                tmp.write_bytes(payload)
                staged.append((tmp, directory / name))
            for tmp, final in staged:
                os.replace(tmp, final)
        except OSError:
            for tmp, _ in staged:
                tmp.unlink(missing_ok=True)
            raise
    except OSError as exc:
        raise _Failure(EXIT_IO, f"{out_dir}: {exc}")
    return {name: hashlib.sha256(payload).hexdigest() for name, payload in artifacts.items()}


def _manifest_bytes(seed: int, arity: int, width: int, height: int,
                    digests: dict[str, str]) -> bytes:
    manifest = {
        "seed": seed,
        "arity": arity,
        "width": width,
        "height": height,
        "files": dict(sorted(digests.items())),
    }
    return (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("ascii")


def _variant(name: str) -> PbmVariant:
    return PbmVariant.P1_ASCII if name == "p1" else PbmVariant.P4_PACKED


def cmd_encrypt(args) -> int:
    seed = _resolve_seed(args.seed)
    secrets = _load_matching_images(args.secrets)
    config = SchemeConfig(arity_n=len(secrets), master_seed=seed)
    share_set = encrypt(secrets, config, threads=args.threads)

    variant = _variant(args.format)
    artifacts = {"U.pbm": write_pbm(share_set.unishare, variant)}
    for i, share in enumerate(share_set.shares, start=1):
        artifacts[f"S{i}.pbm"] = write_pbm(share, variant)
    digests = {name: hashlib.sha256(data).hexdigest() for name, data in artifacts.items()}
    artifacts["manifest.json"] = _manifest_bytes(
        seed, len(secrets), share_set.width, share_set.height, digests
    )
    _write_outputs(args.out_dir, artifacts)

    if args.json:
        print(json.dumps({"seed": seed, "out_dir": args.out_dir, "files": sorted(artifacts)}))
    else:
        print(f"seed: {seed}")
        for name in artifacts:
            print(f"wrote {Path(args.out_dir) / name}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    images = _load_matching_images([args.unishare, *args.shares])
    unishare, shares = images[0], images[1:]

    variant = _variant(args.format)
    artifacts = {}
    for i, share in enumerate(shares, start=1):
        artifacts[f"G{i}_rec.pbm"] = write_pbm(decrypt(unishare, share), variant)
    _write_outputs(args.out_dir, artifacts)

    if args.json:
        print(json.dumps({"out_dir": args.out_dir, "files": sorted(artifacts)}))
    else:
        for name in artifacts:
            print(f"wrote {Path(args.out_dir) / name}")
    return EXIT_OK


def _pair_entry(name_a: str, a: BinaryImage, name_b: str, b: BinaryImage) -> dict:
    if (a.width, a.height) != (b.width, b.height):
        raise _Failure(
            EXIT_SHAPE,
            f"{name_b}: dimensions {b.width}x{b.height} do not match "
            f"{name_a} ({a.width}x{a.height})",
        )
    return {"a": name_a, "b": name_b, **metrics.report(a, b).to_dict()}


def cmd_metrics(args) -> int:
    if args.pairs:
        if not args.secrets or not args.shares:
            raise _Failure(EXIT_IO, "--pairs needs --secrets and --shares")
        secrets = [(p, _load_image(p)) for p in args.secrets]
        shares = [(p, _load_image(p)) for p in args.shares]
        unishare = (args.unishare, _load_image(args.unishare)) if args.unishare else None
        entries = [
            _pair_entry(gn, g, sn, s) for gn, g in secrets for sn, s in shares
        ]
        if unishare is not None:
            un, u = unishare
            entries += [_pair_entry(gn, g, un, u) for gn, g in secrets]
            entries += [_pair_entry(sn, s, un, u) for sn, s in shares]
        print(json.dumps(entries, indent=2))
        return EXIT_OK

    if len(args.images) != 2:
        raise _Failure(EXIT_IO, "metrics needs exactly two images (or --pairs)")
    name_a, name_b = args.images
    a, b = _load_image(name_a), _load_image(name_b)
    if (a.width, a.height) != (b.width, b.height):
        raise _Failure(
            EXIT_SHAPE,
            f"{name_b}: dimensions {b.width}x{b.height} do not match "
            f"{name_a} ({a.width}x{a.height})",
        )
    print(metrics.report(a, b).to_json(indent=2))
    return EXIT_OK


def _format_metric(value) -> str:
    if value is None:
        return "     n/a"
    if isinstance(value, float) and math.isinf(value):
        return "     inf"
    return f"{value:8.4f}"


def cmd_demo(args) -> int:
    seed = _resolve_seed(args.seed)
    size = args.size
    g1 = make_fixture("text_glyphs", size, size)
    g2 = make_fixture("checkerboard", size, size)

    config = SchemeConfig(arity_n=2, master_seed=seed)
    share_set = encrypt([g1, g2], config, threads=args.threads)
    recovered = decrypt_all(share_set)

    named = {
        "G1.pbm": g1,
        "G2.pbm": g2,
        "U.pbm": share_set.unishare,
        "S1.pbm": share_set.shares[0],
        "S2.pbm": share_set.shares[1],
        "G1_rec.pbm": recovered[0],
        "G2_rec.pbm": recovered[1],
    }
    pairs = [
        ("G1.pbm", "G1_rec.pbm"), ("G2.pbm", "G2_rec.pbm"),
        ("G1.pbm", "S1.pbm"), ("G1.pbm", "S2.pbm"),
        ("G2.pbm", "S1.pbm"), ("G2.pbm", "S2.pbm"),
        ("G1.pbm", "U.pbm"), ("G2.pbm", "U.pbm"),
        ("S1.pbm", "U.pbm"), ("S2.pbm", "U.pbm"),
    ]
    entries = [_pair_entry(a, named[a], b, named[b]) for a, b in pairs]

    variant = _variant(args.format)
    artifacts = {name: write_pbm(img, variant) for name, img in named.items()}
    artifacts["metrics_pairs.json"] = (json.dumps(entries, indent=2) + "\n").encode("ascii")
    digests = {name: hashlib.sha256(data).hexdigest() for name, data in artifacts.items()}
    artifacts["manifest.json"] = _manifest_bytes(seed, 2, size, size, digests)
    _write_outputs(args.out_dir, artifacts)

    if args.json:
        print(json.dumps({"seed": seed, "out_dir": args.out_dir, "pairs": entries}))
        return EXIT_OK

    print(f"seed: {seed}")
    print(f"artifacts in {args.out_dir}: {' '.join(artifacts)}")
    header = f"{'pair':<24} {'psnr_db':>8} {'ssim':>8} {'corr':>8} {'mismatch':>8}"
    print(header)
    print("-" * len(header))
    for entry in entries:
        label = f"{entry['a'][:-4]} vs {entry['b'][:-4]}"
        psnr_db = math.inf if entry["psnr_db"] == "inf" else entry["psnr_db"]
        print(
            f"{label:<24} {_format_metric(psnr_db)} {_format_metric(entry['ssim'])}"
            f" {_format_metric(entry['correlation'])} {_format_metric(entry['mismatch_fraction'])}"
        )
    return EXIT_OK


def _selftest_properties(seed: int, inject_fault: bool):
    """Yield (name, passed, detail) for each scheme property."""
    size = 256
    bound = 4.0 * 0.5 / size  # 4 sigma for a size*size pixel Bernoulli(1/2) mean

    g1 = make_fixture("random", size, size, seed=seed ^ 0x5EC1)
    g2 = make_fixture("text_glyphs", size, size)
    config = SchemeConfig(arity_n=2, master_seed=seed)
    share_set = encrypt([g1, g2], config)
    s1, s2 = share_set.shares
    if inject_fault:
        flipped = s1.bits.copy()
        flipped[0] ^= 1
        s1 = BinaryImage(s1.width, s1.height, flipped)
        share_set = scheme.ShareSet(2, share_set.unishare, (s1, s2), size, size)

    yield _check_two_branch_support()

    recovered = decrypt_all(share_set)
    ok = recovered[0] == g1 and recovered[1] == g2
    yield ("round_trip", ok, "decrypt_all(encrypt(G)) == G" if ok else "recovered images differ")

    oracle = classical_encrypt([g1, g2], share_set.unishare)
    ok = s1 == oracle[0] and s2 == oracle[1]
    yield ("oracle_equivalence", ok,
           "circuit shares match XOR oracle" if ok else "circuit shares differ from XOR oracle")

    dev = abs(share_set.unishare.ones_fraction() - 0.5)
    yield ("unishare_uniformity", dev <= bound, f"|ones-0.5| = {dev:.6f} (bound {bound:.6f})")

    devs = [abs(s.ones_fraction() - 0.5) for s in (s1, s2)]
    yield ("share_uniformity", max(devs) <= bound,
           f"max |ones-0.5| = {max(devs):.6f} (bound {bound:.6f})")

    ok = (s1 ^ s2) == (g1 ^ g2)
    yield ("pairwise_xor", ok, "S1 xor S2 == G1 xor G2" if ok else "pairwise XOR identity broken")

    combos = [(u, s) for u in (0, 1) for s in (0, 1)]
    ok = all(
        scheme.decode_pixel(u, s, use_circuit=True) == scheme.decode_pixel(u, s) == (u ^ s)
        for u, s in combos
    )
    yield ("decoder_agreement", ok,
           "circuit and XOR decoders agree on all inputs" if ok else "decoder paths disagree")


def _check_two_branch_support():
    for n in range(1, 5):
        for value in range(1 << n):
            g = [(value >> (n - 1 - j)) & 1 for j in range(n)]
            support = scheme.transmitter_state(g).probabilities()
            idx = [i for i, p in enumerate(support) if p > 0.0]
            if len(idx) != 2:
                return ("two_branch_support", False, f"support size {len(idx)} for g={g}")
            if idx[0] ^ idx[1] != (1 << (n + 1)) - 1:
                return ("two_branch_support", False, f"branches not complementary for g={g}")
            if any(abs(support[i] - 0.5) > 1e-12 for i in idx):
                return ("two_branch_support", False, f"branch probabilities off 0.5 for g={g}")
    return ("two_branch_support", True, "all g for n in 1..4: two complementary 0.5 branches")


def cmd_selftest(args) -> int:
    seed = _resolve_seed(args.seed)
    results = list(_selftest_properties(seed, args.inject_fault))
    failed = [name for name, passed, _ in results if not passed]
    if args.json:
        print(json.dumps({
            "seed": seed,
            "passed": not failed,
            "results": [
                {"property": name, "passed": passed, "detail": detail}
                for name, passed, detail in results
            ],
        }))
    else:
        print(f"seed: {seed}")
        for name, passed, detail in results:
            print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        if failed:
            print(f"{len(failed)} of {len(results)} properties failed")
        else:
            print(f"all {len(results)} properties passed")
    return EXIT_SELFTEST if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvmss",
        description="Universal-share (n, n+1) multi-secret sharing of binary PBM images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, out_default: str):
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                       help="64-bit master seed (default: QVMSS_SEED or OS entropy)")
        p.add_argument("-o", "--out-dir", default=out_default, help="output directory")
        p.add_argument("--format", choices=["p1", "p4"], default="p4",
                       help="PBM variant for written images")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p_enc = sub.add_parser("encrypt", help="encrypt n secrets into U.pbm and S1..Sn.pbm")
    p_enc.add_argument("secrets", nargs="+", help="secret images (PBM)")
    add_common(p_enc, ".")
    p_enc.add_argument("--threads", type=int, default=1, help="worker threads for pixel encoding")
    p_enc.set_defaults(handler=cmd_encrypt)

    p_dec = sub.add_parser("decrypt", help="recover secrets from the UniShare plus shares")
    p_dec.add_argument("-u", "--unishare", required=True, help="UniShare image (PBM)")
    p_dec.add_argument("shares", nargs="+", help="share images (PBM)")
    add_common(p_dec, ".")
    p_dec.set_defaults(handler=cmd_decrypt)

    p_met = sub.add_parser("metrics", help="quality/secrecy metrics for image pairs")
    p_met.add_argument("images", nargs="*", help="two images to compare")
    p_met.add_argument("--pairs", action="store_true",
                       help="score every secret x share x UniShare pairing")
    p_met.add_argument("--secrets", nargs="+", default=None)
    p_met.add_argument("--shares", nargs="+", default=None)
    p_met.add_argument("--unishare", default=None)
    p_met.add_argument("--json", action="store_true", help=argparse.SUPPRESS)
    p_met.set_defaults(handler=cmd_metrics)

    p_demo = sub.add_parser("demo", help="end-to-end pipeline on built-in fixtures")
    add_common(p_demo, "qvmss_demo")
    p_demo.add_argument("--size", type=int, default=512, help="fixture edge length in pixels")
    p_demo.add_argument("--threads", type=int, default=1, help="worker threads for pixel encoding")
    p_demo.set_defaults(handler=cmd_demo)

    p_self = sub.add_parser("selftest", help="run the scheme property suite")
    p_self.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    p_self.add_argument("--inject-fault", action="store_true",
                        help="flip one share bit to exercise the failure path")
    p_self.add_argument("--json", action="store_true", help=argparse.SUPPRESS)
    p_self.set_defaults(handler=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except scheme.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
