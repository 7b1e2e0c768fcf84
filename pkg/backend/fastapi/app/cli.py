"""Command line: `python -m backend.fastapi.app <command> [flags]`.

Every command computes all of its artifacts in memory first; files are then
written to a temporary name and renamed into place, so a failing run never
leaves partial output behind.

Exit codes: 0 success, 1 validation failure, 2 I/O or parse failure,
3 verification failure.
"""
from __future__ import annotations
import argparse
import contextlib
import csv
import io
import logging
import os
import sys
import tempfile
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import ValidationError

from .config import AppConfig, get_config, load_config
from .errors import FrftError, ParseError
from .services.crypto.drpe import CipherImage, decrypt, encrypt, generate_key, quality_metrics
from .services.crypto.keyfile import load_key, save_key
from .services.experiments import run_attack_demo, run_shift_demo
from .services.frft.core import Angle, frft2d, ifrft2d
from .services.frft.shifts import FrequencyShift, SpatialShift
from .services.imageio.complex_format import MAGIC as COMPLEX_MAGIC
from .services.imageio.complex_format import load_cipher, load_complex, save_cipher, save_complex
from .services.imageio.panel import to_png
from .services.imageio.pgm import GrayImage, load_pgm, save_pgm
from .services.imageio.synthetic import synthetic_image
from .services.verification.suite import run_suite
from .types import METRIC_COLUMNS, PROPERTY_COLUMNS, REPORT_COLUMNS, RunConfig, StageMetrics

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_VERIFICATION = 3

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class Artifacts:
    """Named output files, held in memory until `commit`."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.files: Dict[str, bytes] = {}

    def add(self, name: str, data: bytes, path: Optional[str] = None) -> None:
        self.files[path or os.path.join(self.out_dir, name)] = data

    def add_gray(self, name: str, image: GrayImage, png: bool) -> None:
        self.add(f"{name}.pgm", save_pgm(image))
        if png:
            self.add(f"{name}.png", to_png(image))

    def commit(self) -> List[str]:
        for path, data in self.files.items():
            _atomic_write(path, data)
            logger.debug("wrote %s (%d bytes)", path, len(data))
        return list(self.files)


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="-" + os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def csv_bytes(columns: Sequence[str], rows: Iterable[Sequence[str]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def display_magnitude(values: NDArray[np.complex128]) -> GrayImage:
    """|values| as a gray image, divided by its maximum only when that exceeds 1."""
    mag = np.abs(values)
    peak = float(mag.max())
    return GrayImage.from_array(mag / peak if peak > 1.0 else mag)


def _read(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _load_image(path: str) -> NDArray[np.complex128]:
    data = _read(path)
    if data.startswith(COMPLEX_MAGIC):
        return load_complex(data)
    return load_pgm(data).pixels.astype(np.complex128)


def _input_or_synthetic(run: RunConfig, cfg: AppConfig) -> Tuple[NDArray[np.float64], str]:
    if run.input_path:
        return load_pgm(_read(run.input_path)).pixels, os.path.basename(run.input_path)
    size = run.size or cfg.synthetic.size
    return synthetic_image(size, cfg.synthetic.seed), f"synthetic-{size}"


def _angles(run: RunConfig) -> Tuple[Angle, Angle]:
    return Angle.from_degrees(run.alpha_deg), Angle.from_degrees(run.beta_deg)


# -------- commands --------

def cmd_transform(run: RunConfig, cfg: AppConfig) -> Tuple[Artifacts, int]:
    alpha, beta = _angles(run)
    data = _load_image(run.input_path)
    out = (ifrft2d if run.inverse else frft2d)(data, alpha, beta)
    stem = "inverse" if run.inverse else "transform"
    art = Artifacts(run.out_dir)
    art.add(f"{stem}.frft2d", save_complex(out))
    art.add_gray(f"{stem}_magnitude", display_magnitude(out), run.png)
    logger.info("%s %s at %.6g/%.6g deg", stem, data.shape, run.alpha_deg, run.beta_deg)
    return art, EXIT_OK


def cmd_shift_demo(run: RunConfig, cfg: AppConfig) -> Tuple[Artifacts, int]:
    image, image_id = _input_or_synthetic(run, cfg)
    deltas = [run.delta] if run.delta is not None else cfg.shift_demo.deltas
    spatial = SpatialShift(rho=run.rho, lambda_=run.lambda_)
    result = run_shift_demo(image, *_angles(run), deltas, run.epsilon, image_id=image_id, spatial=spatial)
    art = Artifacts(run.out_dir)
    art.add_gray("shift_demo_panel", result.panel, run.png)
    art.add("shift_demo_panel.txt", ("\n".join(result.legend) + "\n").encode("utf-8"))
    art.add("shift_demo.csv", csv_bytes(REPORT_COLUMNS, (r.to_csv_row() for r in result.reports)),
            path=run.report_path)
    return art, EXIT_OK


def cmd_encrypt(run: RunConfig, cfg: AppConfig) -> Tuple[Artifacts, int]:
    plain = load_pgm(_read(run.input_path)).pixels
    key = generate_key(run.seed, plain.shape[0], plain.shape[1], *_angles(run))
    cipher = encrypt(plain, key)
    art = Artifacts(run.out_dir)
    art.add("cipher.frft2d", save_cipher(cipher.data, cipher.key_fingerprint))
    art.add("key.drpekey", save_key(key), path=run.key_path)
    art.add_gray("cipher_magnitude", display_magnitude(cipher.data), run.png)
    logger.info("encrypted %s with key %s", plain.shape, key.fingerprint.hex()[:16])
    return art, EXIT_OK


def cmd_decrypt(run: RunConfig, cfg: AppConfig) -> Tuple[Artifacts, int]:
    data, fingerprint = load_cipher(_read(run.input_path))
    if run.key_path:
        key = load_key(_read(run.key_path))
    else:
        key = generate_key(run.seed, data.shape[0], data.shape[1], *_angles(run))
    plain = decrypt(CipherImage(data=data, key_fingerprint=fingerprint), key)
    real = np.clip(plain.real, 0.0, None)
    modulus = np.abs(plain)

    art = Artifacts(run.out_dir)
    art.add("decrypted.frft2d", save_complex(plain))
    art.add_gray("decrypted_real", GrayImage.from_array(real), run.png)
    art.add_gray("decrypted_modulus", GrayImage.from_array(modulus), run.png)
    if run.reference_path:
        reference = load_pgm(_read(run.reference_path)).pixels
        stages = []
        for name, candidate in (("real", plain.real), ("modulus", modulus)):
            q = quality_metrics(reference, candidate)
            stages.append(StageMetrics(stage=name, **q.model_dump()))
            logger.info("decrypt %s: correlation %.4f", name, q.correlation)
        art.add("decrypt_metrics.csv", csv_bytes(METRIC_COLUMNS, (s.to_csv_row() for s in stages)),
                path=run.report_path)
    return art, EXIT_OK


def cmd_attack_demo(run: RunConfig, cfg: AppConfig) -> Tuple[Artifacts, int]:
    image, _ = _input_or_synthetic(run, cfg)
    key = generate_key(run.seed, image.shape[0], image.shape[1], *_angles(run))
    delta = cfg.attack_demo.delta if run.delta is None else run.delta
    spatial = SpatialShift(rho=run.rho, lambda_=run.lambda_)
    result = run_attack_demo(image, key, FrequencyShift(delta=delta, epsilon=run.epsilon),
                             None if spatial.is_zero else spatial)
    art = Artifacts(run.out_dir)
    art.add_gray("attack_demo_panel", result.panel, run.png)
    art.add("attack_demo_panel.txt", ("\n".join(result.legend) + "\n").encode("utf-8"))
    art.add("attack_demo.csv", csv_bytes(METRIC_COLUMNS, (s.to_csv_row() for s in result.metrics.stages)),
            path=run.report_path)
    return art, EXIT_OK


def cmd_verify(run: RunConfig, cfg: AppConfig) -> Tuple[Artifacts, int]:
    report = run_suite(cfg, inject_fault=run.inject_fault)
    art = Artifacts(run.out_dir)
    art.add("verify.csv", csv_bytes(PROPERTY_COLUMNS, (r.to_csv_row() for r in report.results)),
            path=run.report_path)
    for r in report.failures():
        logger.error("FAIL %s/%s: measured %r, needs %s %r", r.module, r.name, r.measured, r.comparison, r.threshold)
    return art, EXIT_OK if report.passed else EXIT_VERIFICATION


COMMANDS: Dict[str, Callable[[RunConfig, AppConfig], Tuple[Artifacts, int]]] = {
    "transform": cmd_transform,
    "shift-demo": cmd_shift_demo,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "attack-demo": cmd_attack_demo,
    "verify": cmd_verify,
}


# -------- argument handling --------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="row transform angle in degrees")
    common.add_argument("--beta", type=float, help="column transform angle in degrees")
    common.add_argument("--delta", type=float, help="row frequency shift (cycles/pixel)")
    common.add_argument("--epsilon", type=float, help="column frequency shift (cycles/pixel)")
    common.add_argument("--rho", type=int, help="row spatial shift in pixels")
    common.add_argument("--lambda", dest="lambda_", type=int, help="column spatial shift in pixels")
    common.add_argument("--seed", type=int, help="phase mask seed (u64)")
    common.add_argument("--in", dest="input_path", help="input PGM or FRFT2D file")
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--size", type=int, help="synthetic image size when --in is not given")
    common.add_argument("--report", dest="report_path", help="CSV report path")
    common.add_argument("--config", help="YAML config (default: $FRFT_CONFIG_PATH or shared/frft_config.yaml)")
    common.add_argument("--png", action="store_true", help="also write PNG copies of gray outputs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="frft2d", description="2D fractional Fourier transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    t = sub.add_parser("transform", parents=[common], help="forward or inverse 2D transform")
    t.add_argument("--inverse", action="store_true")
    sub.add_parser("shift-demo", parents=[common], help="frequency-shift theorem demonstration")
    enc = sub.add_parser("encrypt", parents=[common], help="random phase encoding")
    enc.add_argument("--key", dest="key_path", help="key file path (default: <out-dir>/key.drpekey)")
    d = sub.add_parser("decrypt", parents=[common], help="decrypt with a key file or key flags")
    d.add_argument("--key", dest="key_path", help="key file written by encrypt")
    d.add_argument("--reference", dest="reference_path", help="plaintext PGM for metrics")
    sub.add_parser("attack-demo", parents=[common], help="frequency-shift attack on the cipher path")
    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--inject-fault", type=float, default=0.0, help="perturb one operator entry (test hook)")
    return parser


def make_run_config(args: argparse.Namespace, cfg: AppConfig) -> RunConfig:
    """Merge command-line flags over the config defaults for the chosen command."""
    if args.command in ("shift-demo", "transform"):
        alpha, beta = cfg.shift_demo.alpha_deg, cfg.shift_demo.beta_deg
        epsilon = cfg.shift_demo.epsilon
    else:
        alpha, beta = cfg.attack_demo.alpha_deg, cfg.attack_demo.beta_deg
        epsilon = cfg.attack_demo.epsilon

    def pick(name: str, default):
        value = getattr(args, name, None)
        return default if value is None else value

    return RunConfig(
        command=args.command,
        input_path=args.input_path,
        out_dir=args.out_dir,
        report_path=args.report_path,
        key_path=getattr(args, "key_path", None),
        reference_path=getattr(args, "reference_path", None),
        alpha_deg=pick("alpha", alpha),
        beta_deg=pick("beta", beta),
        delta=args.delta,
        epsilon=pick("epsilon", epsilon),
        rho=pick("rho", 0),
        lambda_=pick("lambda_", 0),
        seed=pick("seed", cfg.attack_demo.key_seed),
        size=args.size,
        inverse=getattr(args, "inverse", False),
        png=args.png,
        inject_fault=getattr(args, "inject_fault", 0.0),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    try:
        cfg = load_config(args.config) if args.config else get_config()
        run = make_run_config(args, cfg)
        artifacts, status = COMMANDS[run.command](run, cfg)
        artifacts.commit()
    except ValidationError as e:
        logger.error("invalid arguments: %s", e)
        return EXIT_VALIDATION
    except ParseError as e:
        logger.error("parse error: %s", e)
        return EXIT_IO
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
    except (FrftError, ValueError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_VALIDATION
    return status
