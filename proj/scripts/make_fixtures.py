#!/usr/bin/env python3
"""Builds the shipped benchmark fixtures: three 28x28 glyph-classification
datasets in IDX format plus bias-free MLP weights in HTWT format, all
deterministic from fixed seeds.

Run from the repository root:

    python3 scripts/make_fixtures.py

Heavy work happens only when outputs are missing or --force is given.
"""

import argparse
import gzip
import io
import json
import struct
import zlib
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter, ImageFont

import torch
import torch.nn as nn

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


# ---------------------------------------------------------------- datasets

def render_glyph(ch: str, rng: np.random.Generator, noise_sigma: float,
                 max_angle: float, max_jitter: int) -> np.ndarray:
    """One noisy 28x28 sample of the character `ch`, pixels in [0,1]."""
    font = ImageFont.load_default()
    pad = Image.new("L", (16, 16), 0)
    ImageDraw.Draw(pad).text((2, 2), ch, fill=255, font=font)
    bbox = pad.getbbox()
    if bbox is None:
        bbox = (0, 0, 16, 16)
    glyph = pad.crop(bbox)

    size = int(rng.integers(15, 22))
    w = max(4, int(round(size * glyph.width / max(glyph.height, 1))))
    w = min(w, 24)
    glyph = glyph.resize((w, size), Image.BILINEAR)

    canvas = Image.new("L", (28, 28), 0)
    max_x = 28 - glyph.width
    max_y = 28 - glyph.height
    x = int(rng.integers(max(0, max_x // 2 - max_jitter),
                         min(max_x, max_x // 2 + max_jitter) + 1))
    y = int(rng.integers(max(0, max_y // 2 - max_jitter),
                         min(max_y, max_y // 2 + max_jitter) + 1))
    canvas.paste(glyph, (x, y))

    angle = float(rng.uniform(-max_angle, max_angle))
    canvas = canvas.rotate(angle, resample=Image.BILINEAR, fillcolor=0)
    canvas = canvas.filter(ImageFilter.GaussianBlur(radius=float(rng.uniform(0.4, 0.8))))

    img = np.asarray(canvas, dtype=np.float64) / 255.0
    img *= rng.uniform(0.8, 1.0)
    img += rng.normal(0.0, noise_sigma, img.shape)
    img = np.clip(img, 0.0, 1.0)
    # snap to the uint8 grid the IDX files will carry
    return np.round(img * 255.0) / 255.0


def build_dataset(chars, per_class_train, per_class_test, seed, noise_sigma,
                  max_angle, max_jitter):
    rng = np.random.default_rng(seed)
    splits = {}
    for split, per_class in (("train", per_class_train), ("t10k", per_class_test)):
        images, labels = [], []
        for ci, ch in enumerate(chars):
            for _ in range(per_class):
                images.append(render_glyph(ch, rng, noise_sigma, max_angle, max_jitter))
                labels.append(ci)
        images = np.stack(images)
        labels = np.asarray(labels, dtype=np.int64)
        order = rng.permutation(len(labels))
        splits[split] = (images[order], labels[order])
    return splits


def write_idx_images(path: Path, images: np.ndarray) -> None:
    n = images.shape[0]
    body = struct.pack(">IIII", 0x00000803, n, 28, 28)
    pixels = np.round(images * 255.0).astype(np.uint8).reshape(n, -1)
    payload = body + pixels.tobytes()
    _write_gz(path, payload)


def write_idx_labels(path: Path, labels: np.ndarray, label_base: int) -> None:
    body = struct.pack(">II", 0x00000801, labels.shape[0])
    payload = body + (labels + label_base).astype(np.uint8).tobytes()
    _write_gz(path, payload)


def _write_gz(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.BytesIO()
    with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
        gz.write(payload)
    path.write_bytes(buf.getvalue())


# ---------------------------------------------------------------- training

def train_mlp(splits, layer_dims, seed, epochs=30, train_noise=0.06):
    torch.manual_seed(seed)
    train_x, train_y = splits["train"]
    test_x, test_y = splits["t10k"]
    xt = torch.tensor(train_x.reshape(len(train_y), -1), dtype=torch.float32)
    yt = torch.tensor(train_y)
    xe = torch.tensor(test_x.reshape(len(test_y), -1), dtype=torch.float32)
    ye = torch.tensor(test_y)

    layers = []
    for i in range(len(layer_dims) - 1):
        layers.append(nn.Linear(layer_dims[i], layer_dims[i + 1], bias=False))
        if i < len(layer_dims) - 2:
            layers.append(nn.ReLU())
    model = nn.Sequential(*layers)

    opt = torch.optim.Adam(model.parameters(), lr=2e-3)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=10, gamma=0.4)
    loss_fn = nn.CrossEntropyLoss()
    batch = 128
    for _ in range(epochs):
        perm = torch.randperm(len(yt))
        for i in range(0, len(yt), batch):
            idx = perm[i : i + batch]
            xb = xt[idx]
            # input noise during training for robustness on the analog path
            xb = torch.clamp(xb + train_noise * torch.randn_like(xb), 0.0, 1.0)
            opt.zero_grad()
            loss = loss_fn(model(xb), yt[idx])
            loss.backward()
            opt.step()
        sched.step()

    with torch.no_grad():
        acc = (model(xe).argmax(dim=1) == ye).float().mean().item()
    weights = [m.weight.detach().numpy().T.astype(np.float32)
               for m in model if isinstance(m, nn.Linear)]
    return weights, acc


def write_htwt(path: Path, weights, activations) -> None:
    out = bytearray(b"HTWT")
    out += struct.pack("<HH", 1, len(weights))
    for w, act in zip(weights, activations):
        rows, cols = w.shape
        out += struct.pack("<IIB", rows, cols, act)
        out += w.astype("<f4").tobytes(order="C")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(bytes(out))


# ---------------------------------------------------------------- misc fixtures

def write_misc_fixtures() -> None:
    misc = FIXTURES / "misc"
    misc.mkdir(parents=True, exist_ok=True)
    _write_gz(misc / "hello.txt.gz", b"hello, time-integrated world\n")
    (misc / "crosstalk_eps01.csv").write_text(_crosstalk_csv(7, 0.01))


def _crosstalk_csv(m: int, eps: float) -> str:
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == j:
                row.append(1.0 - eps * (2 if 0 < i < m - 1 else 1))
            elif abs(i - j) == 1:
                row.append(eps)
            else:
                row.append(0.0)
        rows.append(",".join(repr(v) for v in row))
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------- main

DIGITS = [str(d) for d in range(10)]
FASHION_GLYPHS = list("#@%&$*+=~?")  # denser, more confusable marks
LETTERS = [chr(ord("a") + i) for i in range(26)]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--force", action="store_true", help="rebuild even if outputs exist")
    args = parser.parse_args()

    manifest_path = FIXTURES / "manifest.json"
    if manifest_path.exists() and not args.force:
        print("fixtures already present; use --force to rebuild")
        return

    jobs = [
        # name, chars, noise, angle, jitter, label_base, models: (file, dims, seed)
        ("digits10", DIGITS, 0.12, 8.0, 2, 0, [
            ("mnist_784x10.htwt", [784, 10], 11),
            ("mnist_784x100x10.htwt", [784, 100, 10], 12),
        ]),
        ("fashion10", FASHION_GLYPHS, 0.18, 12.0, 3, 0, [
            ("fashion_784x100x10.htwt", [784, 100, 10], 13),
        ]),
        ("letters26", LETTERS, 0.10, 8.0, 2, 1, [
            ("emnist_784x500x26.htwt", [784, 500, 26], 14),
        ]),
    ]

    manifest = {"datasets": {}, "models": {}}
    for name, chars, noise, max_angle, max_jitter, label_base, models in jobs:
        print(f"building dataset {name} ...")
        per_train = 2000 if len(chars) == 10 else 700
        per_test = 200 if len(chars) == 10 else 100
        splits = build_dataset(chars, per_train, per_test, seed=zlib.crc32(name.encode()),
                               noise_sigma=noise, max_angle=max_angle, max_jitter=max_jitter)
        ddir = FIXTURES / "datasets" / name
        for split, (images, labels) in splits.items():
            if split == "train":
                continue  # only the test split ships; training is reproducible
            write_idx_images(ddir / f"{split}-images-idx3-ubyte.gz", images)
            write_idx_labels(ddir / f"{split}-labels-idx1-ubyte.gz", labels, label_base)
        manifest["datasets"][name] = {
            "dir": f"fixtures/datasets/{name}",
            "stem": "t10k",
            "classes": len(chars),
            "label_base": label_base,
            "test_images": len(splits["t10k"][1]),
        }

        for fname, dims, seed in models:
            print(f"  training {fname} {dims} ...")
            weights, acc = train_mlp(splits, dims, seed)
            acts = [1] * (len(weights) - 1) + [0]
            write_htwt(FIXTURES / "weights" / fname, weights, acts)
            params = sum(int(w.shape[0] * w.shape[1]) for w in weights)
            manifest["models"][fname] = {
                "file": f"fixtures/weights/{fname}",
                "dataset": name,
                "dims": dims,
                "parameters": params,
                "digital_accuracy_float32": round(acc, 4),
            }
            print(f"    digital test accuracy {acc:.4f}, {params} parameters")

    write_misc_fixtures()
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print("wrote", manifest_path)


if __name__ == "__main__":
    main()
