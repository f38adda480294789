"""Persistent evaluation cache.

One JSON object per line, keyed by the canonical evaluation signature
"prefix|tail|precision|truncation".  Values are stored bit-exactly as
sign, hexadecimal significand and binary exponent, so a cache hit
reproduces the original enclosure down to the last bit and re-running a
command against a warm cache is byte-identical.  Writes go through a
temporary file and an atomic rename; corrupt lines are dropped and their
keys recomputed.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

import gmpy2

from .balls import Enclosure
from .errors import CorruptCache
from .indices import ConstTail, TailedIndex

__all__ = ["CacheEntry", "EvalCache", "decode_mpfr", "encode_mpfr", "eval_key"]


def encode_mpfr(x) -> str:
    """Bit-exact text form: sign, hex significand, binary exponent, precision."""
    if gmpy2.is_nan(x):
        raise CorruptCache("refusing to encode NaN")
    if gmpy2.is_infinite(x):
        return "+inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    m, e = x.as_mantissa_exp()
    sign = "-" if m < 0 else "+"
    return f"{sign}{abs(int(m)):x}p{int(e)}b{x.precision}"


def decode_mpfr(text: str):
    if text == "0":
        return gmpy2.mpfr(0)
    if text in ("+inf", "-inf"):
        return gmpy2.mpfr(text)
    try:
        sign = text[0]
        body, prec_part = text[1:].rsplit("b", 1)
        hex_m, exp_part = body.split("p")
        m = int(hex_m, 16)
        e = int(exp_part)
        prec = int(prec_part)
    except (ValueError, IndexError) as exc:
        raise CorruptCache(f"bad number encoding {text!r}") from exc
    ctx = gmpy2.context(precision=max(prec, m.bit_length() + 1))
    val = ctx.add(gmpy2.mpfr(0), gmpy2.mpz(m))
    val = ctx.mul_2exp(val, e) if e >= 0 else ctx.div_2exp(val, -e)
    if sign == "-":
        val = ctx.minus(val)
    elif sign != "+":
        raise CorruptCache(f"bad sign in {text!r}")
    # the value fits in prec bits, so this restores the original precision
    # (and hence the canonical mantissa/exponent pair) without rounding
    return gmpy2.context(precision=prec).add(val, 0)


def eval_key(t: TailedIndex, precision: int, truncation: int) -> str:
    prefix = ",".join(str(k) for k in t.prefix.parts)
    tail = f"q{t.tail.q}" if isinstance(t.tail, ConstTail) else "none"
    return f"{prefix}|{tail}|{precision}|{truncation}"


@dataclass
class CacheEntry:
    key: str
    mid_hex: str
    rad_hex: str
    created_at: float

    @classmethod
    def from_enclosure(cls, key: str, value: Enclosure) -> "CacheEntry":
        mid_hex = "+inf" if value.upper_infinite else encode_mpfr(value.mid)
        rad_hex = "0" if value.upper_infinite else encode_mpfr(value.rad)
        return cls(key, mid_hex, rad_hex, time.time())

    def to_enclosure(self, precision: int) -> Enclosure:
        if self.mid_hex == "+inf":
            return Enclosure.infinite(precision)
        mid = decode_mpfr(self.mid_hex)
        rad = decode_mpfr(self.rad_hex)
        if rad < 0:
            raise CorruptCache("negative radius")
        return Enclosure(mid, rad, precision)

    def to_json(self) -> str:
        return json.dumps(
            {
                "key": self.key,
                "mid_hex": self.mid_hex,
                "rad_hex": self.rad_hex,
                "created_at": self.created_at,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "CacheEntry":
        try:
            obj = json.loads(line)
            return cls(obj["key"], obj["mid_hex"], obj["rad_hex"], float(obj["created_at"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptCache(f"unreadable cache line: {line[:60]!r}") from exc


class EvalCache:
    """Line-per-entry store with atomic rewrite and corrupt-line recovery."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self.entries: dict[str, CacheEntry] = {}
        self.dropped = 0
        self._dirty = False
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        for line in self.path.read_text().splitlines():
            if not line.strip():
                continue
            try:
                entry = CacheEntry.from_json(line)
                # round-trip the encoding now so a bad value never hits a caller
                entry.to_enclosure(64)
                self.entries[entry.key] = entry
            except CorruptCache:
                self.dropped += 1
                self._dirty = True

    def get(self, key: str, precision: int) -> Enclosure | None:
        entry = self.entries.get(key)
        if entry is None:
            return None
        try:
            return entry.to_enclosure(precision)
        except CorruptCache:
            del self.entries[key]
            self.dropped += 1
            self._dirty = True
            return None

    def put(self, key: str, value: Enclosure) -> None:
        self.entries[key] = CacheEntry.from_enclosure(key, value)
        self._dirty = True

    def save(self) -> None:
        if not self._dirty:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(self.path.suffix + f".tmp{os.getpid()}")
        body = "\n".join(e.to_json() for e in self.entries.values())
        tmp.write_text(body + ("\n" if body else ""))
        os.replace(tmp, self.path)
        self._dirty = False

    def clear(self) -> int:
        n = len(self.entries)
        self.entries.clear()
        if self.path.exists():
            self.path.unlink()
        self._dirty = False
        return n

    def stats(self) -> dict:
        size = self.path.stat().st_size if self.path.exists() else 0
        return {
            "path": str(self.path),
            "entries": len(self.entries),
            "file_bytes": size,
            "dropped_corrupt": self.dropped,
        }
