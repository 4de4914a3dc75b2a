"""Fixed-layout 230-bit chromosome <-> EvalParams codec."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evalfn import NUM_MATERIAL, PARAM_NAMES, EvalParams

MATERIAL_BITS = 10
POSITIONAL_BITS = 6


@dataclass(frozen=True)
class Field:
    name: str
    offset: int
    width: int


def _build_layout() -> tuple[Field, ...]:
    fields, offset = [], 0
    for i, name in enumerate(PARAM_NAMES):
        width = MATERIAL_BITS if i < NUM_MATERIAL else POSITIONAL_BITS
        fields.append(Field(name, offset, width))
        offset += width
    return tuple(fields)


LAYOUT = _build_layout()
CHROMOSOME_BITS = LAYOUT[-1].offset + LAYOUT[-1].width
assert CHROMOSOME_BITS == 230

# bit j contributes PLACE_VALUE[j] to parameter FIELD_OF_BIT[j] (big-endian within a field)
FIELD_OF_BIT = np.concatenate([np.full(f.width, i) for i, f in enumerate(LAYOUT)])
PLACE_VALUE = np.concatenate([1 << np.arange(f.width - 1, -1, -1) for f in LAYOUT]).astype(np.int64)
_DECODE = np.zeros((CHROMOSOME_BITS, len(LAYOUT)), np.int64)
_DECODE[np.arange(CHROMOSOME_BITS), FIELD_OF_BIT] = PLACE_VALUE


@dataclass(frozen=True)
class Chromosome:
    """Genotype: 230 bits stored as bytes of 0/1."""

    bits: bytes

    def __post_init__(self):
        if len(self.bits) != CHROMOSOME_BITS:
            raise ValueError(f"chromosome must have {CHROMOSOME_BITS} bits, got {len(self.bits)}")
        if self.bits.translate(None, b"\x00\x01"):
            raise ValueError("chromosome bits must be 0 or 1")

    @classmethod
    def from_array(cls, arr) -> Chromosome:
        return cls(np.asarray(arr, dtype=np.uint8).tobytes())

    def array(self) -> np.ndarray:
        return np.frombuffer(self.bits, dtype=np.uint8)

    def to_text(self) -> str:
        return self.bits.translate(bytes.maketrans(b"\x00\x01", b"01")).decode()

    @classmethod
    def from_text(cls, text: str) -> Chromosome:
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise ValueError("chromosome text must contain only 0 and 1")
        return cls(text.encode().translate(bytes.maketrans(b"01", b"\x00\x01")))

    def __len__(self) -> int:
        return CHROMOSOME_BITS

    def __getitem__(self, i: int) -> int:
        return self.bits[i]


def decode(c: Chromosome) -> EvalParams:
    return EvalParams(c.array().astype(np.int64) @ _DECODE)


def decode_many(bits: np.ndarray) -> np.ndarray:
    """Decode a (n, 230) 0/1 matrix into an (n, 35) parameter matrix."""
    return np.asarray(bits, dtype=np.int64) @ _DECODE


def encode(params: EvalParams) -> Chromosome:
    # EvalParams already enforces the ranges; re-check so raw iterables fail loudly too
    bits = np.zeros(CHROMOSOME_BITS, np.uint8)
    for field, v in zip(LAYOUT, params):
        if not 0 <= v < (1 << field.width):
            raise ValueError(f"{field.name}={v} does not fit in {field.width} bits")
        for k in range(field.width):
            bits[field.offset + k] = (v >> (field.width - 1 - k)) & 1
    return Chromosome.from_array(bits)


def random_chromosome(rng: np.random.Generator | int | None) -> Chromosome:
    rng = np.random.default_rng(rng)
    return Chromosome.from_array(rng.integers(0, 2, CHROMOSOME_BITS, dtype=np.uint8))


def write_chromosome(path, c: Chromosome) -> None:
    with open(path, "w") as fh:
        fh.write(c.to_text() + "\n")


def read_chromosome(path) -> Chromosome:
    with open(path) as fh:
        return Chromosome.from_text(fh.read())
