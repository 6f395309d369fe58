"""Metric providers: the adapter boundary around external NR-IQA models.

The toolkit never embeds pretrained metric weights. A provider is anything
with a name, a direction, and an evaluate(image_path) -> float method.
External metrics speak a one-image-in, one-scalar-out line protocol over a
child process's standard streams: each request is a JSON line
{"image_path": ...} and each response a JSON line {"value": ...}.
"""

from __future__ import annotations

import json
import select
import subprocess

from ..errors import ScoringError
from .score import compute_pi


class MetricProvider:
    """Base adapter; subclasses implement evaluate()."""

    def __init__(self, name: str, direction: str):
        self.name = name
        self.direction = direction

    def evaluate(self, image_path) -> float:
        raise NotImplementedError

    def close(self):
        pass


class CallableProvider(MetricProvider):
    def __init__(self, name, direction, fn):
        super().__init__(name, direction)
        self.fn = fn

    def evaluate(self, image_path) -> float:
        return float(self.fn(image_path))


class ConstantProvider(MetricProvider):
    """Deterministic stub returning one fixed value; handy in tests and CI."""

    def __init__(self, name, direction, value):
        super().__init__(name, direction)
        self.value = float(value)

    def evaluate(self, image_path) -> float:
        return self.value


class MeanPixelProvider(MetricProvider):
    """Deterministic stub scoring an image by its mean intensity."""

    def __init__(self, name="mean_pixel", direction="higher_better"):
        super().__init__(name, direction)

    def evaluate(self, image_path) -> float:
        from ..images import load_image

        return float(load_image(image_path).mean())


class CommandProvider(MetricProvider):
    """Adapter speaking the JSON-lines protocol with a long-lived child process."""

    def __init__(self, name, direction, command, timeout: float = 30.0):
        super().__init__(name, direction)
        self.command = list(command)
        self.timeout = timeout
        self._proc = None

    def _ensure_proc(self):
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
        return self._proc

    def evaluate(self, image_path) -> float:
        proc = self._ensure_proc()
        proc.stdin.write(json.dumps({"image_path": str(image_path)}) + "\n")
        proc.stdin.flush()
        ready, _, _ = select.select([proc.stdout], [], [], self.timeout)
        if not ready:
            proc.kill()
            self._proc = None
            raise ScoringError(f"provider {self.name!r} timed out after {self.timeout}s")
        line = proc.stdout.readline()
        if not line:
            self._proc = None
            raise ScoringError(f"provider {self.name!r} closed its stream")
        reply = json.loads(line)
        if "value" not in reply:
            raise ScoringError(f"provider {self.name!r} reply missing 'value': {reply}")
        return float(reply["value"])

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.terminate()
            self._proc.wait(timeout=5)
        self._proc = None


class ComposedPIProvider(MetricProvider):
    """Perceptual Index assembled from separate Ma-score and NIQE adapters."""

    def __init__(self, ma_provider: MetricProvider, niqe_provider: MetricProvider,
                 name="PI"):
        super().__init__(name, "lower_better")
        self.ma_provider = ma_provider
        self.niqe_provider = niqe_provider

    def evaluate(self, image_path) -> float:
        return compute_pi(self.ma_provider.evaluate(image_path),
                          self.niqe_provider.evaluate(image_path))

    def close(self):
        self.ma_provider.close()
        self.niqe_provider.close()


def providers_from_config(config: dict) -> list[MetricProvider]:
    """Build providers from a config mapping: {providers: [{name, direction, kind, ...}]}."""
    out = []
    for entry in config.get("providers", []):
        kind = entry.get("kind", "stub")
        name = entry["name"]
        direction = entry.get("direction") or \
            {"PI": "lower_better"}.get(name, "higher_better")
        if kind == "stub":
            out.append(ConstantProvider(name, direction, entry.get("value", 1.0)))
        elif kind == "mean_pixel":
            out.append(MeanPixelProvider(name, direction))
        elif kind == "command":
            out.append(CommandProvider(name, direction, entry["command"],
                                       timeout=float(entry.get("timeout", 30.0))))
        else:
            raise ScoringError(f"unknown provider kind {kind!r}")
    return out
