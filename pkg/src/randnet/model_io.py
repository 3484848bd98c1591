"""Versioned binary container for trained models.

Layout: the 8-byte magic ``RNMODEL1``, an 8-byte little-endian length,
a JSON header (sorted keys, no whitespace), then each array's raw bytes
as little-endian float64 in row-major order, in header order. Nothing
time- or platform-dependent goes into the file, so retraining with the
same seed and config reproduces it byte for byte.
"""

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .autoencoders import AutoencoderSpec, CorruptionSpec, EncoderWeights, KernelDecoder
from .data import ScalingStats
from .deep import DeepConfig, DeepModel
from .shallow import RandomLayer, ShallowModel
from .solvers import ElasticNetConfig, KernelSpec, L1Config, RidgeConfig

MAGIC = b"RNMODEL1"
FORMAT_VERSION = 1


def save_model(model, path):
    """Write a ShallowModel or DeepModel; see the module docstring for layout."""
    arrays = []

    def put(arr):
        if arr is None:
            return None
        a = np.ascontiguousarray(arr, dtype=np.float64)
        arrays.append(a)
        return {"idx": len(arrays) - 1, "shape": list(a.shape)}

    if isinstance(model, ShallowModel):
        kind, payload = "shallow", _shallow_payload(model, put)
    elif isinstance(model, DeepModel):
        kind, payload = "deep", _deep_payload(model, put)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    header = {"format": "randnet-model", "version": FORMAT_VERSION,
              "kind": kind, "payload": payload}
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for a in arrays:
            fh.write(a.astype("<f8", copy=False).tobytes())


def load_model(path):
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: not a model container")
    (hlen,) = struct.unpack("<Q", raw[8:16])
    header = json.loads(raw[16:16 + hlen].decode())
    if header.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported container version {header.get('version')}")
    offset = 16 + hlen
    buf = raw[offset:]

    def take(ref):
        if ref is None:
            return None
        shape = tuple(ref["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = ref["_start"]
        a = np.frombuffer(buf, dtype="<f8", count=count, offset=start)
        return a.reshape(shape).astype(np.float64)

    # arrays were written in index order; recover byte offsets from shapes
    refs = _collect_refs(header["payload"])
    refs.sort(key=lambda r: r["idx"])
    pos = 0
    for r in refs:
        r["_start"] = pos
        pos += int(np.prod(r["shape"])) * 8

    payload = header["payload"]
    if header["kind"] == "shallow":
        return _shallow_from_payload(payload, take)
    return _deep_from_payload(payload, take)


def _collect_refs(obj):
    out = []
    if isinstance(obj, dict):
        if "idx" in obj and "shape" in obj and len(obj) == 2:
            out.append(obj)
        else:
            for v in obj.values():
                out.extend(_collect_refs(v))
    elif isinstance(obj, list):
        for v in obj:
            out.extend(_collect_refs(v))
    return out


def _kernel_payload(spec):
    return None if spec is None else asdict(spec)


def _kernel_from_payload(doc):
    return None if doc is None else KernelSpec(**doc)


def _shallow_payload(m, put):
    return {
        "kind": m.kind,
        "n_classes": m.n_classes,
        "direct_links": m.direct_links,
        "output_bias": m.output_bias,
        "lam": m.lam,
        "seed": m.seed,
        "weights": put(m.weights),
        "layer": None if m.layer is None else {
            "W": put(m.layer.W), "b": put(m.layer.b),
            "activation": m.layer.activation,
        },
        "kernel": _kernel_payload(m.kernel),
        "train_X": put(m.train_X),
    }


def _shallow_from_payload(doc, take):
    layer = None
    if doc["layer"] is not None:
        layer = RandomLayer(take(doc["layer"]["W"]), take(doc["layer"]["b"]),
                            doc["layer"]["activation"])
    return ShallowModel(
        kind=doc["kind"],
        n_classes=doc["n_classes"],
        layer=layer,
        weights=take(doc["weights"]),
        direct_links=doc["direct_links"],
        output_bias=doc["output_bias"],
        kernel=_kernel_from_payload(doc["kernel"]),
        train_X=take(doc["train_X"]),
        lam=doc["lam"],
        seed=doc["seed"],
    )


def _reg_payload(reg):
    if isinstance(reg, RidgeConfig):
        return {"kind": "l2", "lam": reg.lam, "mode": reg.mode}
    if isinstance(reg, L1Config):
        return {"kind": "l1", "lam": reg.lam, "max_iters": reg.max_iters,
                "tol": reg.tol}
    if isinstance(reg, ElasticNetConfig):
        return {"kind": "elastic", "lam": reg.lam, "alpha_mix": reg.alpha_mix,
                "rho": reg.rho, "max_iters": reg.max_iters,
                "tol_primal": reg.tol_primal, "tol_dual": reg.tol_dual}
    return {"kind": "kernel", "lam": reg.lam, "spec": _kernel_payload(reg.spec)}


def _reg_from_payload(doc):
    kind = doc["kind"]
    if kind == "l2":
        return RidgeConfig(lam=doc["lam"], mode=doc["mode"])
    if kind == "l1":
        return L1Config(lam=doc["lam"], max_iters=doc["max_iters"], tol=doc["tol"])
    if kind == "elastic":
        return ElasticNetConfig(lam=doc["lam"], alpha_mix=doc["alpha_mix"],
                                rho=doc["rho"], max_iters=doc["max_iters"],
                                tol_primal=doc["tol_primal"],
                                tol_dual=doc["tol_dual"])
    return KernelDecoder(_kernel_from_payload(doc["spec"]), doc["lam"])


def _ae_spec_payload(spec):
    return {
        "width": spec.width,
        "reg": _reg_payload(spec.reg),
        "activation": spec.activation,
        "corruption": asdict(spec.corruption),
        "weight_range": list(spec.weight_range),
    }


def _ae_spec_from_payload(doc):
    return AutoencoderSpec(
        width=doc["width"],
        reg=_reg_from_payload(doc["reg"]),
        activation=doc["activation"],
        corruption=CorruptionSpec(**doc["corruption"]),
        weight_range=tuple(doc["weight_range"]),
    )


def _deep_payload(m, put):
    cfg = m.config
    return {
        "config": {
            "layers": [_ae_spec_payload(s) for s in cfg.layers],
            "connectivity": cfg.connectivity,
            "classifier": cfg.classifier,
            "clf_width": cfg.clf_width,
            "clf_lam": cfg.clf_lam,
            "clf_activation": cfg.clf_activation,
            "clf_kernel": _kernel_payload(cfg.clf_kernel),
            "clf_weight_range": list(cfg.clf_weight_range),
            "seed": cfg.seed,
            "corrupt_all_layers": cfg.corrupt_all_layers,
        },
        "encoders": [
            {
                "variant": e.variant,
                "activation": e.activation,
                "decoder": put(e.decoder),
                "train_repr": put(e.train_repr),
                "alpha": put(e.alpha),
                "kernel": _kernel_payload(e.kernel),
                "converged": e.converged,
            }
            for e in m.encoders
        ],
        "scalers": [
            {"method": s.method, "center": put(s.center), "spread": put(s.spread)}
            for s in m.scalers
        ],
        "classifier": _shallow_payload(m.classifier, put),
        "input_dim": m.input_dim,
    }


def _deep_from_payload(doc, take):
    cdoc = doc["config"]
    cfg = DeepConfig(
        layers=[_ae_spec_from_payload(s) for s in cdoc["layers"]],
        connectivity=cdoc["connectivity"],
        classifier=cdoc["classifier"],
        clf_width=cdoc["clf_width"],
        clf_lam=cdoc["clf_lam"],
        clf_activation=cdoc["clf_activation"],
        clf_kernel=_kernel_from_payload(cdoc["clf_kernel"]),
        clf_weight_range=tuple(cdoc["clf_weight_range"]),
        seed=cdoc["seed"],
        corrupt_all_layers=cdoc["corrupt_all_layers"],
    )
    encoders = [
        EncoderWeights(
            variant=e["variant"],
            activation=e["activation"],
            decoder=take(e["decoder"]),
            train_repr=take(e["train_repr"]),
            alpha=take(e["alpha"]),
            kernel=_kernel_from_payload(e["kernel"]),
            converged=e["converged"],
        )
        for e in doc["encoders"]
    ]
    scalers = [
        ScalingStats(s["method"], take(s["center"]), take(s["spread"]))
        for s in doc["scalers"]
    ]
    classifier = _shallow_from_payload(doc["classifier"], take)
    return DeepModel(cfg, encoders, scalers, classifier, doc["input_dim"])
