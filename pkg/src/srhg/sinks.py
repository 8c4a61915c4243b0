"""Edge sinks: writers, fingerprint and degree accumulators."""

from __future__ import annotations

from typing import BinaryIO, Iterator

import numpy as np

BINARY_MAGIC = b"RHGE0001"


class FingerprintSink:
    """Wrapping 64-bit sum of all endpoint ids."""

    def __init__(self):
        self._acc = np.uint64(0)
        self.edges = 0

    def push(self, edges: np.ndarray) -> None:
        if len(edges):
            with np.errstate(over="ignore"):
                self._acc = np.uint64(self._acc + edges.astype(np.uint64).sum(dtype=np.uint64))
            self.edges += len(edges)

    @property
    def value(self) -> int:
        return int(self._acc)


class DegreeSink:
    def __init__(self, n: int):
        self.degrees = np.zeros(n, dtype=np.int64)
        self.n = n

    def push(self, edges: np.ndarray) -> None:
        if len(edges):
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("vertex id out of range")
            self.degrees += np.bincount(edges.ravel(), minlength=self.n)


class CollectSink:
    def __init__(self):
        self.blocks: list[np.ndarray] = []

    def push(self, edges: np.ndarray) -> None:
        self.blocks.append(edges)

    def edges(self) -> np.ndarray:
        if not self.blocks:
            return np.empty((0, 2), dtype=np.int64)
        return np.concatenate(self.blocks)


class TeeSink:
    def __init__(self, *sinks):
        self.sinks = [s for s in sinks if s is not None]

    def push(self, edges: np.ndarray) -> None:
        for s in self.sinks:
            s.push(edges)


class TextWriter:
    """One ``u v`` line per edge."""

    def __init__(self, stream: BinaryIO):
        self.stream = stream

    def push(self, edges: np.ndarray) -> None:
        if len(edges):
            lines = "\n".join(f"{u} {v}" for u, v in edges.tolist())
            self.stream.write(lines.encode("ascii") + b"\n")


class BinaryWriter:
    """Magic header followed by little-endian u64 pairs."""

    def __init__(self, stream: BinaryIO):
        self.stream = stream
        stream.write(BINARY_MAGIC)

    def push(self, edges: np.ndarray) -> None:
        if len(edges):
            self.stream.write(np.ascontiguousarray(edges, dtype="<u8").tobytes())


def read_binary_edges(stream: BinaryIO) -> np.ndarray:
    magic = stream.read(len(BINARY_MAGIC))
    if magic != BINARY_MAGIC:
        raise ValueError("not a binary edge stream (bad magic)")
    data = stream.read()
    if len(data) % 16:
        raise ValueError("truncated binary edge stream")
    return np.frombuffer(data, dtype="<u8").astype(np.int64).reshape(-1, 2)


def read_text_edges(lines: Iterator[str]) -> np.ndarray:
    pairs = [tuple(map(int, ln.split())) for ln in lines if ln.strip()]
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


__all__ = ["BINARY_MAGIC", "BinaryWriter", "CollectSink", "DegreeSink", "FingerprintSink",
           "TeeSink", "TextWriter", "read_binary_edges", "read_text_edges"]
