"""Bounded universality certificates: per-word jet witnesses and whole-curve reports."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exact import q_str
from .jets import FLOAT_THRESHOLD, first_departure
from .paths import PlanarPath
from .signature import Signature, path_signature, return_map_jet
from .topology import (
    CurveGraph,
    Word,
    canonical_word,
    enumerate_words,
    free_reduce,
    generator_walks,
    graph_hash,
    realize_word,
    word_text,
)

TRIVIAL = "trivial"
NONIDENTITY = "nonidentity"
UNKNOWN = "unknown"


class NotClosedError(ValueError):
    pass


def area_obstruction(a: PlanarPath) -> Fraction:
    """I_{1,2} of a closed path, i.e. the signed area integral of x dy."""
    if not a.is_closed():
        raise NotClosedError(f"path runs from {a.start} to {a.end}; the area obstruction needs a loop")
    if a.is_constant():
        return Fraction(0)
    return path_signature(a, 2)[(1, 2)]


@dataclass(frozen=True)
class Certificate:
    word: Word
    outcome: str
    index: int | None = None
    value: Fraction | float | None = None
    order: int = 0
    max_len: int | None = None
    threshold: float | None = None

    @property
    def exact(self) -> bool:
        return self.value is None or isinstance(self.value, Fraction)

    def to_json(self) -> dict:
        out = {"word": word_text(self.word), "outcome": self.outcome, "N": self.order}
        if self.max_len is not None:
            out["L"] = self.max_len
        if self.outcome == NONIDENTITY:
            out["index"] = self.index
            out["value"] = q_str(self.value) if self.exact else float(self.value)
            out["exact"] = self.exact
        if self.threshold is not None:
            out["threshold"] = self.threshold
        return out


def witness(sig: Signature, order: int, threshold: float | None = None):
    """(index, value) of the first nonvanishing return-map coefficient, or None."""
    jet = return_map_jet(sig, order)
    i = first_departure(jet, threshold)
    return None if i is None else (i, jet.c(i))


def certify_signature(word: Word, sig_fn: Callable[[Word, int], Signature], order: int, threshold: float | None = None) -> Certificate:
    w = free_reduce(word)
    if not w:
        return Certificate(w, TRIVIAL, order=order)
    sig = sig_fn(w, order)
    thr = None if sig.exact else (FLOAT_THRESHOLD if threshold is None else threshold)
    hit = witness(sig, order, thr)
    if hit is None:
        return Certificate(w, UNKNOWN, order=order, threshold=thr)
    return Certificate(w, NONIDENTITY, hit[0], hit[1], order=order, threshold=thr)


def certify_word(g: CurveGraph, w: Sequence[int], order: int) -> Certificate:
    """Reduce ``w``; if nontrivial, look for a nonzero jet coefficient of its realizing loop."""
    walks = generator_walks(g)

    def sig_fn(word: Word, depth: int) -> Signature:
        return path_signature(realize_word(g, word, walks), depth)

    return certify_signature(tuple(w), sig_fn, order)


@dataclass
class CurveReport:
    curve: str
    max_len: int
    order: int
    certificates: list[Certificate] = field(default_factory=list)
    rank: int = 0

    @property
    def unknown(self) -> list[Certificate]:
        return [c for c in self.certificates if c.outcome == UNKNOWN]

    @property
    def status(self) -> str:
        return "unknown_words" if self.unknown else "certified"

    @property
    def certified(self) -> bool:
        return not self.unknown

    def to_json(self) -> dict:
        return {
            "curve": self.curve,
            "rank": self.rank,
            "L": self.max_len,
            "N": self.order,
            "status": self.status,
            "words_checked": len(self.certificates),
            "witnesses": [
                {k: v for k, v in c.to_json().items() if k in ("word", "index", "value", "exact", "threshold")}
                for c in self.certificates
                if c.outcome == NONIDENTITY
            ],
            "unknown": [word_text(c.word) for c in self.unknown],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _certify_chunk(args) -> list[Certificate]:
    g, words, order = args
    walks = generator_walks(g)
    out = []
    for w in words:
        out.append(certify_signature(w, lambda word, depth: path_signature(realize_word(g, word, walks), depth), order))
    return out


def certify_words(words: Sequence[Word], sig_fn: Callable[[Word, int], Signature], order: int, threshold: float | None = None) -> list[Certificate]:
    return [certify_signature(w, sig_fn, order, threshold) for w in words]


def certify_curve(g: CurveGraph, max_len: int, order: int, workers: int = 1, sig_fn: Callable[[Word, int], Signature] | None = None,
                  threshold: float | None = None, label: str | None = None) -> CurveReport:
    """Certify every canonical cyclically reduced word of length <= max_len.

    ``sig_fn`` overrides how a word's signature is obtained (smoothed curves
    supply float signatures).  Output order is canonical regardless of workers.
    """
    if max_len < 1:
        raise ValueError("max word length must be >= 1")
    if order < 3:
        raise ValueError("jet order must be >= 3")
    words = enumerate_words(g.rank, max_len)
    report = CurveReport(label or graph_hash(g), max_len, order, rank=g.rank)
    if sig_fn is not None:
        certs = certify_words(words, sig_fn, order, threshold)
    elif workers > 1 and len(words) > 1:
        chunks = [words[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_certify_chunk, [(g, c, order) for c in chunks]))
        by_word = {c.word: c for part in results for c in part}
        certs = [by_word[w] for w in words]
    else:
        certs = _certify_chunk((g, words, order))
    report.certificates = [Certificate(c.word, c.outcome, c.index, c.value, c.order, max_len, c.threshold) for c in certs]
    return report


def recheck(g: CurveGraph, cert: Certificate) -> bool:
    """Recompute a NonIdentity certificate's coefficient from scratch."""
    if cert.outcome != NONIDENTITY:
        return cert.outcome == TRIVIAL and not free_reduce(cert.word)
    sig = path_signature(realize_word(g, cert.word), cert.order)
    jet = return_map_jet(sig, cert.order)
    return jet.c(cert.index) == cert.value and cert.value != 0


__all__ = [
    "Certificate",
    "CurveReport",
    "NotClosedError",
    "area_obstruction",
    "canonical_word",
    "certify_curve",
    "certify_word",
    "recheck",
]
