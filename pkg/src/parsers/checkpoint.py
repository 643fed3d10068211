"""
Checkpoint Parser - reads and writes HRCK v1 network checkpoints

    HRCK 1
    arch dense:tanh:32:128 hr:tanh:128:128 dense:identity:128:2
    layer0.A
    128 32
    <rows*cols floats, one per line, 17 significant digits>
    layer0.b
    128 1
    ...

Vectors are written with dims `n 1`. The whole file is parsed before a Network
is built, so a malformed file never yields a partial network.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from src.errors import CheckpointParseError, HrLabError, UnsupportedVersionError
from src.network.activations import ActivationKind
from src.network.model import Network, build_layer

logger = logging.getLogger(__name__)

MAGIC = "HRCK"
VERSION = "1"
FLOAT_FORMAT = ".17g"

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write to a temp file in the target directory, then rename over `path`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_checkpoint(net: Network) -> str:
    lines = [f"{MAGIC} {VERSION}", "arch " + " ".join(net.describe())]
    for name, p in net.parameters().items():
        rows, cols = (p.shape[0], 1) if p.ndim == 1 else p.shape
        lines.append(name)
        lines.append(f"{rows} {cols}")
        lines.extend(format_float(v) for v in p.ravel())
    return "\n".join(lines) + "\n"


def save_checkpoint(net: Network, path: PathLike) -> None:
    atomic_write_text(path, dump_checkpoint(net))
    logger.info("Saved checkpoint %s (%d parameters)", path, net.parameter_count())


def _parse_arch(line: str) -> List[Tuple[str, ActivationKind, int, int, bool]]:
    if not line.startswith("arch "):
        raise CheckpointParseError("Missing 'arch' line", block="arch")
    layers = []
    for descriptor in line[len("arch "):].split():
        parts = descriptor.split(":")
        try:
            kind, activation, in_dim, out_dim = parts[:4]
            layer_norm = parts[4:] == ["ln"]
            if len(parts) > 5 or (len(parts) == 5 and not layer_norm):
                raise ValueError(descriptor)
            layers.append((kind, ActivationKind(activation), int(in_dim), int(out_dim), layer_norm))
        except ValueError:
            raise CheckpointParseError(f"Malformed layer descriptor '{descriptor}'", block="arch")
    if not layers:
        raise CheckpointParseError("Architecture lists no layers", block="arch")
    return layers


def _parse_blocks(lines: List[str]) -> Dict[str, np.ndarray]:
    tensors: Dict[str, np.ndarray] = {}
    i = 0
    while i < len(lines):
        name = lines[i].strip()
        if not name:
            raise CheckpointParseError("Empty block name", block=f"line {i + 3}")
        if i + 1 >= len(lines):
            raise CheckpointParseError("Missing dims line", block=name)
        try:
            rows, cols = (int(tok) for tok in lines[i + 1].split())
        except ValueError:
            raise CheckpointParseError(f"Malformed dims line '{lines[i + 1]}'", block=name)
        if rows <= 0 or cols <= 0:
            raise CheckpointParseError(f"Non-positive dims {rows} {cols}", block=name)
        count = rows * cols
        values = lines[i + 2:i + 2 + count]
        if len(values) != count:
            raise CheckpointParseError(f"Truncated block: expected {count} values, found {len(values)}", block=name)
        try:
            data = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError:
            raise CheckpointParseError("Non-numeric value", block=name)
        if not np.all(np.isfinite(data)):
            raise CheckpointParseError("Non-finite value", block=name)
        if name in tensors:
            raise CheckpointParseError("Duplicate block", block=name)
        tensors[name] = data.reshape(rows, cols)
        i += 2 + count
    return tensors


def parse_checkpoint(text: str) -> Network:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines:
        raise CheckpointParseError("Empty checkpoint", block="header")

    header = lines[0].split()
    if len(header) != 2 or header[0] != MAGIC:
        raise CheckpointParseError(f"Bad header '{lines[0]}'", block="header")
    if header[1] != VERSION:
        raise UnsupportedVersionError(header[1])
    if len(lines) < 2:
        raise CheckpointParseError("Missing 'arch' line", block="arch")

    arch = _parse_arch(lines[1])
    tensors = _parse_blocks(lines[2:])

    try:
        net = Network([build_layer(kind, in_dim, out_dim, act, ln) for kind, act, in_dim, out_dim, ln in arch])
    except HrLabError as e:
        raise CheckpointParseError(str(e), block="arch")

    expected = net.parameters()
    for name, p in expected.items():
        if name not in tensors:
            raise CheckpointParseError("Missing parameter block", block=name)
        data = tensors[name]
        if data.size != p.size or (p.ndim == 2 and data.shape != p.shape):
            raise CheckpointParseError(f"Shape {data.shape} does not match layer parameter {p.shape}", block=name)
        p[...] = data.reshape(p.shape)
    unexpected = sorted(set(tensors) - set(expected))
    if unexpected:
        raise CheckpointParseError("Unexpected parameter block", block=unexpected[0])
    return net


def load_checkpoint(path: PathLike) -> Network:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_checkpoint(handle.read())
