"""Rank-1 constraint systems: variable allocation, sparse constraints,
direct satisfiability checking, and label-grouped constraint accounting.

A constraint is (a, b, c, label) with a, b, c sparse linear combinations;
an assignment z satisfies it iff <a,z> * <b,z> = <c,z> (mod p). The
assignment layout is z = (public inputs, 1, witness); internally variables
are flat integer ids with the constant-one variable fixed at id 0, and the
(x, 1, w) ordering is recovered from per-variable kinds.

Every constraint carries a provenance label ("dwt.threshold[0][3]", ...).
Labels drive the per-stage constraint accounting and failure diagnosis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from ezdps.field import RISTRETTO_ORDER

PUBLIC = 0
ONE = 1
WITNESS = 2

_KIND_CHAR = {PUBLIC: "x", ONE: "1", WITNESS: "w"}

# A linear combination is a list of (var_id, coefficient) terms with
# canonical coefficients in [0, p). Duplicate variables are permitted in
# transit and merged by normalize().
LC = list


class R1CSError(ValueError):
    pass


@dataclass
class Counts:
    """Total constraint count plus a per-label-prefix breakdown."""

    total: int
    groups: dict

    def __getitem__(self, prefix: str) -> int:
        return self.groups.get(prefix, 0)


class ConstraintSystem:
    def __init__(self, modulus: int = RISTRETTO_ORDER):
        self.modulus = modulus
        self._kinds = [ONE]  # var id 0 is the constant one
        self._ordinals = [0]
        self.num_public = 0
        self.num_witness = 0
        self._a: list = []
        self._b: list = []
        self._c: list = []
        self.labels: list = []
        self.frozen = False

    # ---- allocation ----

    def alloc(self, kind: int) -> int:
        if self.frozen:
            raise R1CSError("allocation after freeze")
        if kind == PUBLIC:
            ordinal = self.num_public
            self.num_public += 1
        elif kind == WITNESS:
            ordinal = self.num_witness
            self.num_witness += 1
        else:
            raise R1CSError("the constant-one variable exists exactly once")
        vid = len(self._kinds)
        self._kinds.append(kind)
        self._ordinals.append(ordinal)
        return vid

    def alloc_public(self) -> int:
        return self.alloc(PUBLIC)

    def alloc_witness(self) -> int:
        return self.alloc(WITNESS)

    @property
    def one(self) -> int:
        return 0

    @property
    def num_variables(self) -> int:
        return len(self._kinds)

    def kind_of(self, vid: int) -> int:
        return self._kinds[vid]

    def ordinal_of(self, vid: int) -> int:
        return self._ordinals[vid]

    def describe(self, vid: int) -> str:
        k = self._kinds[vid]
        return "1" if k == ONE else f"{_KIND_CHAR[k]}{self._ordinals[vid]}"

    # ---- constraints ----

    def enforce(self, a: LC, b: LC, c: LC, label: str) -> None:
        if self.frozen:
            raise R1CSError("constraint added after freeze")
        if not label:
            raise R1CSError("constraint labels are mandatory")
        n = len(self._kinds)
        for terms in (a, b, c):
            for vid, _ in terms:
                if not 0 <= vid < n:
                    raise R1CSError(f"unallocated variable {vid} in constraint {label!r}")
        self._a.append(a)
        self._b.append(b)
        self._c.append(c)
        self.labels.append(label)

    def enforce_linear(self, left: LC, right: LC, label: str) -> None:
        """left == right, encoded as <left,z> * 1 = <right,z>."""
        self.enforce(left, [(0, 1)], right, label)

    def freeze(self) -> None:
        self.frozen = True

    def __len__(self) -> int:
        return len(self.labels)

    # ---- evaluation ----

    def eval_lc(self, terms: LC, values: Sequence[int]) -> int:
        s = 0
        for vid, coef in terms:
            s += coef * values[vid]
        return s % self.modulus

    def is_satisfied(self, assignment: "Assignment") -> tuple:
        """(True, None) or (False, first failing constraint's label)."""
        values = assignment.values
        if len(values) != len(self._kinds):
            raise R1CSError(
                f"assignment length {len(values)} != variable count {len(self._kinds)}"
            )
        if values[0] != 1:
            raise R1CSError("constant-one slot must hold 1")
        p = self.modulus
        for a, b, c, label in zip(self._a, self._b, self._c, self.labels):
            av = 0
            for vid, coef in a:
                av += coef * values[vid]
            bv = 0
            for vid, coef in b:
                bv += coef * values[vid]
            cv = 0
            for vid, coef in c:
                cv += coef * values[vid]
            if (av % p) * (bv % p) % p != cv % p:
                return False, label
        return True, None

    # ---- accounting ----

    def counts(self) -> Counts:
        groups: dict = {}
        for label in self.labels:
            prefix = label.split(".", 1)[0].split("[", 1)[0]
            groups[prefix] = groups.get(prefix, 0) + 1
        return Counts(total=len(self.labels), groups=groups)

    def count_prefix(self, prefix: str) -> int:
        """Constraints whose label is `prefix` or extends it at a boundary."""
        n = 0
        plen = len(prefix)
        for label in self.labels:
            if label.startswith(prefix) and (
                len(label) == plen or label[plen] in ".[/"
            ):
                n += 1
        return n

    # ---- debug dump ----

    def _dump_lc(self, terms: LC) -> str:
        merged = normalize(terms)
        return " + ".join(f"{coef}*{self.describe(vid)}" for vid, coef in merged) or "0"

    def dump(self) -> str:
        """One constraint per line: label | a | b | c (for diffing)."""
        lines = []
        for a, b, c, label in zip(self._a, self._b, self._c, self.labels):
            lines.append(
                f"{label} | {self._dump_lc(a)} | {self._dump_lc(b)} | {self._dump_lc(c)}"
            )
        return "\n".join(lines) + ("\n" if lines else "")

    # ---- dense form (for the matrix oracle in tests) ----

    def dense_matrices(self):
        """A, B, C as dense rows over the z = (x, 1, w) ordering."""
        order = self.z_order()
        pos = {vid: i for i, vid in enumerate(order)}
        nv = len(order)

        def densify(rows):
            out = []
            for terms in rows:
                row = [0] * nv
                for vid, coef in terms:
                    row[pos[vid]] = (row[pos[vid]] + coef) % self.modulus
                out.append(row)
            return out

        return densify(self._a), densify(self._b), densify(self._c)

    def z_order(self) -> list:
        """Variable ids in (public inputs, 1, witness) order."""
        pubs = [0] * self.num_public
        wits = [0] * self.num_witness
        for vid, kind in enumerate(self._kinds):
            if kind == PUBLIC:
                pubs[self._ordinals[vid]] = vid
            elif kind == WITNESS:
                wits[self._ordinals[vid]] = vid
        return pubs + [0] + wits


def normalize(terms: LC) -> LC:
    """Merge duplicate variables; drop zero coefficients; sort by var id."""
    acc: dict = {}
    for vid, coef in terms:
        acc[vid] = acc.get(vid, 0) + coef
    return [(vid, coef) for vid, coef in sorted(acc.items()) if coef != 0]


@dataclass
class Assignment:
    """Full variable assignment, indexed by flat variable id.

    Length equals num_public + 1 + num_witness; slot 0 (constant one) is 1.
    """

    values: list

    @staticmethod
    def for_system(cs: ConstraintSystem, values_by_id: Sequence[int]) -> "Assignment":
        vals = list(values_by_id)
        if len(vals) != cs.num_variables:
            raise R1CSError("assignment length mismatch")
        return Assignment(vals)

    def z_vector(self, cs: ConstraintSystem) -> list:
        return [self.values[vid] for vid in cs.z_order()]


class Builder:
    """Single-writer construction context pairing a ConstraintSystem with
    its variable values.

    Three modes share one emission code path so prover and verifier build
    byte-identical systems:
      - proving:  witness values are computed at each allocation site;
      - feed:     witness values are drawn positionally from a received
                  assignment (verifier rebuild);
      - structure: values stay None (constraint accounting only).
    """

    def __init__(self, cs: ConstraintSystem, proving: bool = False,
                 feed: Optional[Iterator] = None):
        self.cs = cs
        self.proving = proving
        self._feed = feed
        self.values: list = [1]  # slot for the constant one

    # -- allocation --

    def pub(self, value: Optional[int]) -> int:
        vid = self.cs.alloc_public()
        self.values.append(None if value is None else value % self.cs.modulus)
        return vid

    def wit(self, value: Optional[int] = None) -> int:
        vid = self.cs.alloc_witness()
        if self.proving:
            if value is None:
                raise R1CSError("proving mode requires a witness value")
            self.values.append(value % self.cs.modulus)
        elif self._feed is not None:
            try:
                self.values.append(next(self._feed) % self.cs.modulus)
            except StopIteration:
                raise R1CSError("witness feed exhausted") from None
        else:
            self.values.append(None)
        return vid

    def value(self, vid: int) -> int:
        v = self.values[vid]
        if v is None:
            raise R1CSError("no value tracked for variable")
        return v

    @property
    def has_values(self) -> bool:
        return self.proving or self._feed is not None

    def eval_lc(self, terms: LC) -> int:
        s = 0
        for vid, coef in terms:
            s += coef * self.values[vid]
        return s % self.cs.modulus

    def const_lc(self, c: int) -> LC:
        return [(0, c % self.cs.modulus)]

    def assignment(self) -> Assignment:
        return Assignment.for_system(self.cs, self.values)
