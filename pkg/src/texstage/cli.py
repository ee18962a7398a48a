"""Command-line workflows tying the pipeline together.

Subcommands: ``extract``, ``train``, ``classify``, ``sweep``, ``evaluate``,
``trend``.  Shared flags control the feature configuration (``--levels``,
``--offsets``, ``--symmetric``, ``--formula``), the classifier
(``--normalize``, ``--k``), and output (``--binary``, ``--format``,
``--seed``).  The environment variable ``TEXSTAGE_CONFIG`` may point to a
JSON file supplying the same keys as defaults; explicit flags win.

Every command is deterministic for identical inputs and flags, and exits
nonzero exactly when an error diagnostic was emitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import dataset as ds
from . import knn, metrics
from .errors import InvalidConfigError, InvalidInputError, TexstageError
from .glcm import FEATURE_NAMES, GlcmConfig, image_features
from .imaging import load_gray

CONFIG_ENV = "TEXSTAGE_CONFIG"

_CONFIG_KEYS = ("levels", "offsets", "symmetric", "formula", "normalize", "k", "binary", "format", "seed")

_DEFAULTS = {
    "levels": 8,
    "offsets": ((0, 1),),
    "symmetric": True,
    "formula": "paper",
    "normalize": "none",
    "k": 6,
    "binary": False,
    "format": "text",
    "seed": 0,
}


@dataclass(frozen=True)
class CliConfig:
    levels: int
    offsets: tuple[tuple[int, int], ...]
    symmetric: bool
    formula: str
    normalize: str
    k: int
    binary: bool
    format: str
    seed: int
    explicit: frozenset

    def glcm_config(self) -> GlcmConfig:
        return GlcmConfig(m=self.levels, offsets=self.offsets, symmetric=self.symmetric, mode=self.formula)


def _parse_offsets(value) -> tuple[tuple[int, int], ...]:
    if isinstance(value, (list, tuple)):
        pairs = [tuple(int(v) for v in pair) for pair in value]
    else:
        pairs = []
        for part in str(value).split(";"):
            bits = part.strip().split(",")
            if len(bits) != 2:
                raise InvalidConfigError(f"bad offset {part!r}; expected 'dr,dc[;dr,dc...]'")
            try:
                pairs.append((int(bits[0]), int(bits[1])))
            except ValueError as exc:
                raise InvalidConfigError(f"bad offset {part!r}: {exc}") from exc
    for pair in pairs:
        if len(pair) != 2:
            raise InvalidConfigError(f"bad offset {pair!r}")
    return tuple(pairs)


def _load_env_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfigError(f"cannot read {CONFIG_ENV} file {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidConfigError(f"{CONFIG_ENV} file must hold a JSON object")
    unknown = sorted(set(doc) - set(_CONFIG_KEYS))
    if unknown:
        raise InvalidConfigError(f"unknown keys in {CONFIG_ENV} file: {unknown}")
    return doc


def resolve_config(args: argparse.Namespace) -> CliConfig:
    env = _load_env_config()
    values = {}
    explicit = set()
    for key in _CONFIG_KEYS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            values[key] = cli_value
            explicit.add(key)
        elif key in env:
            values[key] = env[key]
            explicit.add(key)
        else:
            values[key] = _DEFAULTS[key]
    values["offsets"] = _parse_offsets(values["offsets"])
    cfg = CliConfig(explicit=frozenset(explicit), **values)
    cfg.glcm_config()  # validate eagerly so bad values fail before any work
    return cfg


def _check_model_compatibility(cfg: CliConfig, model: knn.Model) -> None:
    requested = {
        "levels": cfg.levels if "levels" in cfg.explicit else model.glcm_config.m,
        "offsets": cfg.offsets if "offsets" in cfg.explicit else model.glcm_config.offsets,
        "symmetric": cfg.symmetric if "symmetric" in cfg.explicit else model.glcm_config.symmetric,
        "formula": cfg.formula if "formula" in cfg.explicit else model.glcm_config.mode,
    }
    wanted = GlcmConfig(
        m=requested["levels"],
        offsets=requested["offsets"],
        symmetric=requested["symmetric"],
        mode=requested["formula"],
    )
    if wanted.fingerprint() != model.fingerprint:
        raise InvalidConfigError(
            "feature configuration mismatch: the model was trained with "
            f"levels={model.glcm_config.m}, offsets={list(model.glcm_config.offsets)}, "
            f"symmetric={model.glcm_config.symmetric}, formula={model.glcm_config.mode!r}; "
            "re-run without conflicting flags or retrain the model"
        )
    if "normalize" in cfg.explicit and cfg.normalize != model.normalization:
        raise InvalidConfigError(
            f"normalization mismatch: the model uses {model.normalization!r}"
        )


def _emit(cfg: CliConfig, text: str, payload: dict) -> None:
    if cfg.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_extract(args: argparse.Namespace, cfg: CliConfig) -> int:
    glcm_cfg = cfg.glcm_config()
    out = Path(args.out)

    if args.synthetic is not None:
        if args.images:
            raise InvalidInputError("--synthetic cannot be combined with image paths")
        samples = ds.synthetic_samples(args.synthetic, cfg.seed, glcm_cfg)
        ds.save_dataset(samples, out, append=args.append)
        _emit(cfg, f"wrote {len(samples)} synthetic rows to {out}",
              {"written": len(samples), "out": str(out), "failures": []})
        return 0

    if not args.images:
        raise InvalidInputError("no input images given (or use --synthetic N)")
    if args.day is None:
        raise InvalidInputError("--day is required when extracting from images")

    if args.triplet:
        if len(args.images) % 3 != 0:
            raise InvalidInputError(
                f"--triplet needs a multiple of 3 images, got {len(args.images)}"
            )
        groups = [args.images[i:i + 3] for i in range(0, len(args.images), 3)]
    else:
        groups = [[p] for p in args.images]

    taken = {s.source_id for s in ds.load_dataset(out)} if args.append and out.exists() else set()
    samples = []
    failures = []
    for group in groups:
        name = Path(group[0]).stem
        try:
            feats = [image_features(load_gray(p), glcm_cfg) for p in group]
            vec = feats[0] if len(feats) == 1 else ds.average_triplet(*feats)
            if name in taken:
                raise InvalidInputError(f"duplicate source_id {name!r}")
            sample = ds.make_sample(name, args.day, vec)
            taken.add(name)
            samples.append(sample)
        except TexstageError as exc:
            failures.append({"source": ", ".join(str(p) for p in group), "error": str(exc)})
            print(f"error: {group[0]}: {exc}", file=sys.stderr)
    ds.save_dataset(samples, out, append=args.append)
    _emit(
        cfg,
        f"wrote {len(samples)} of {len(groups)} rows to {out}"
        + (f" ({len(failures)} failed)" if failures else ""),
        {"written": len(samples), "out": str(out), "failures": failures},
    )
    return 1 if failures else 0


def cmd_train(args: argparse.Namespace, cfg: CliConfig) -> int:
    samples = ds.load_dataset(args.data)
    if not samples:
        raise InvalidInputError(f"dataset {args.data} is empty")
    model = knn.build_model(
        ds.as_training_samples(samples),
        k=cfg.k,
        glcm_config=cfg.glcm_config(),
        normalization=cfg.normalize,
    )
    knn.save_model(model, args.out)
    _emit(
        cfg,
        f"wrote model with {len(samples)} samples (k={cfg.k}) to {args.out}",
        {"out": str(args.out), "samples": len(samples), "k": cfg.k,
         "fingerprint": model.fingerprint},
    )
    return 0


def cmd_classify(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = knn.load_model(args.model)
    _check_model_compatibility(cfg, model)
    if args.triplet:
        if len(args.images) != 3:
            raise InvalidInputError(f"--triplet needs exactly 3 images, got {len(args.images)}")
        feats = [image_features(load_gray(p), model.glcm_config) for p in args.images]
        vec = ds.average_triplet(*feats)
    else:
        if len(args.images) != 1:
            raise InvalidInputError(f"expected one image (or three with --triplet), got {len(args.images)}")
        vec = image_features(load_gray(args.images[0]), model.glcm_config)
    pred = knn.classify(model, vec)

    text = f"{pred.label}: {pred.label.phrase}"
    payload = {
        "stage": pred.label.code,
        "phrase": pred.label.phrase,
        "features": list(vec),
        "model_version": knn.model_digest(model),
        "neighbors": [
            {"id": n.sample_id, "label": n.label.code, "distance": n.distance}
            for n in pred.neighbors
        ],
    }
    if cfg.binary:
        verdict = knn.to_binary(pred.label)
        text += f"\nbinary: {verdict.value}"
        payload["binary"] = verdict.value
    _emit(cfg, text, payload)
    return 0


def cmd_sweep(args: argparse.Namespace, cfg: CliConfig) -> int:
    train = ds.load_dataset(args.train)
    eval_samples = ds.load_dataset(args.eval)
    result = knn.sweep_k(
        ds.as_training_samples(train),
        eval_samples,
        args.k_min,
        args.k_max,
        glcm_config=cfg.glcm_config(),
        normalization=cfg.normalize,
    )
    lines = [f"{'k':>3} {'correct':>8} {'accuracy':>9}"]
    for row in result.rows:
        lines.append(f"{row.k:>3} {row.correct:>8} {100 * row.accuracy:>8.2f}%")
    lines.append(f"best k: {result.best_k}")
    _emit(
        cfg,
        "\n".join(lines),
        {"rows": [{"k": r.k, "correct": r.correct, "accuracy": r.accuracy} for r in result.rows],
         "best_k": result.best_k},
    )
    return 0


def cmd_evaluate(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = knn.load_model(args.model)
    _check_model_compatibility(cfg, model)
    samples = ds.load_dataset(args.data)
    if not samples:
        raise InvalidInputError(f"evaluation set {args.data} is empty")
    truth = [s.label for s in samples]
    preds = [knn.classify(model, s.features).label for s in samples]
    cm = metrics.confusion(truth, preds)
    text = metrics.render_text(cm)
    payload = metrics.report_dict(cm)
    if cfg.binary:
        cm_b = metrics.confusion([knn.to_binary(t) for t in truth], [knn.to_binary(p) for p in preds])
        text += "\n\ncollapsed two-way report\n" + metrics.render_text(cm_b)
        payload["binary"] = metrics.report_dict(cm_b)
    _emit(cfg, text, payload)
    return 0


def cmd_trend(args: argparse.Namespace, cfg: CliConfig) -> int:
    samples = ds.load_dataset(args.data)
    if not samples:
        raise InvalidInputError(f"dataset {args.data} is empty")
    by_day: dict[int, list] = {}
    for s in samples:
        by_day.setdefault(s.day, []).append(s.features)
    rows = []
    for day in sorted(by_day):
        vecs = by_day[day]
        means = [sum(v[i] for v in vecs) / len(vecs) for i in range(4)]
        rows.append({"day": day, "count": len(vecs),
                     **{name: mean for name, mean in zip(FEATURE_NAMES, means)}})
    lines = [f"{'day':>4} {'count':>6}" + "".join(f"{name:>14}" for name in FEATURE_NAMES)]
    for r in rows:
        lines.append(
            f"{r['day']:>4} {r['count']:>6}"
            + "".join(f"{r[name]:>14.6g}" for name in FEATURE_NAMES)
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("day," + ",".join(FEATURE_NAMES) + "\n")
            for r in rows:
                fh.write(",".join([str(r["day"])] + [format(r[n], ".17g") for n in FEATURE_NAMES]) + "\n")
        lines.append(f"wrote {args.out}")
    _emit(cfg, "\n".join(lines), {"rows": rows})
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--levels", type=int, help="gray-level count (default 8)")
    g.add_argument("--offsets", help="displacements 'dr,dc[;dr,dc...]' (default '0,1')")
    g.add_argument("--symmetric", action=argparse.BooleanOptionalAction, default=None,
                   help="count each pixel pair in both directions (default on)")
    g.add_argument("--formula", choices=("paper", "standard"),
                   help="texture measure variant (default paper)")
    g.add_argument("--normalize", choices=("none", "zscore"),
                   help="feature normalization policy (default none)")
    g.add_argument("--k", type=int, help="neighbor count (default 6)")
    g.add_argument("--binary", action="store_true", default=None,
                   help="also report the collapsed two-way verdict")
    g.add_argument("--format", choices=("text", "json"), help="output format (default text)")
    g.add_argument("--seed", type=int, help="base seed for synthetic generation (default 0)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="texstage",
        description="Texture-feature extraction and mask service-stage classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common],
                       help="extract feature rows from images (or synthesize them)")
    p.add_argument("images", nargs="*", help="PNG/JPEG files")
    p.add_argument("--day", type=int, help="use-day of the photographs (0..5)")
    p.add_argument("--triplet", action="store_true",
                   help="average consecutive groups of 3 images into one row")
    p.add_argument("--synthetic", type=int, metavar="N",
                   help="generate N synthetic samples per class instead of reading images")
    p.add_argument("--out", required=True, help="dataset CSV to write")
    p.add_argument("--append", action="store_true", help="append to an existing dataset")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", parents=[common], help="store a dataset as a model file")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--out", required=True, help="model JSON to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", parents=[common], help="classify one image (or one triplet)")
    p.add_argument("images", nargs="+", help="one image, or three with --triplet")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--triplet", action="store_true", help="average the three images first")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", parents=[common], help="accuracy for every k in a range")
    p.add_argument("--train", required=True, help="training dataset CSV")
    p.add_argument("--eval", required=True, help="evaluation dataset CSV")
    p.add_argument("--k-min", type=int, default=4)
    p.add_argument("--k-max", type=int, default=16)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evaluate", parents=[common], help="metrics report on a labeled set")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--data", required=True, help="labeled evaluation CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("trend", parents=[common], help="per-day feature means")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--out", help="write the plot-ready CSV here")
    p.set_defaults(func=cmd_trend)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except TexstageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
