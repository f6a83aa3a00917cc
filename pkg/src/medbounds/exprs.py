"""Affine expressions in observed-probability symbols.

A bound term is an affine function of the observed joint probabilities

    setting 1:  p<y><m>_<a>   = Pr(Y=y, M=m | A=a)
    setting 2:  p<y><m><l>_<a> = Pr(Y=y, M=m, L=l | A=a)

Because each arm's probabilities sum to one, affine functions on the set of
valid distributions have many equivalent spellings.  We store a canonical
representative: the coefficient of the all-ones cell (y=m[=l]=1) of each arm
is folded into the constant, so two expressions are equal as functions on
valid distributions iff their canonical forms are identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SymbolMismatch

Q = Fraction

#: storage order is lexicographic in (y, m[, l], a): arm varies fastest.
_SYMBOLS = {
    1: tuple(
        f"p{y}{m}_{a}" for y in (0, 1) for m in (0, 1) for a in (0, 1)
    ),
    2: tuple(
        f"p{y}{m}{l}_{a}"
        for y in (0, 1)
        for m in (0, 1)
        for l in (0, 1)
        for a in (0, 1)
    ),
}

_SYMBOL_INDEX = {
    s: {name: i for i, name in enumerate(syms)} for s, syms in _SYMBOLS.items()
}


def n_cells(setting: int) -> int:
    """Number of within-arm observation cells (4 in setting 1, 8 in setting 2)."""
    check_setting(setting)
    return 4 if setting == 1 else 8


def check_setting(setting: int) -> None:
    if setting not in (1, 2):
        raise ValueError(f"setting must be 1 or 2, got {setting!r}")


def symbols(setting: int) -> tuple[str, ...]:
    check_setting(setting)
    return _SYMBOLS[setting]


def cell_of(setting: int, y: int, m: int, l: int | None = None) -> int:
    """Within-arm cell index in (y, m[, l]) lexicographic order."""
    check_setting(setting)
    if setting == 1:
        if l is not None:
            raise ValueError("setting 1 has no L variable")
        return y * 2 + m
    if l is None:
        raise ValueError("setting 2 requires an L value")
    return y * 4 + m * 2 + l


def flat_index(setting: int, cell: int, a: int) -> int:
    """Index into the flat symbol/cell vector for (cell, arm)."""
    return cell * 2 + a


def dropped_cell(setting: int) -> int:
    """Within-arm cell whose coefficient is eliminated by normalization."""
    return n_cells(setting) - 1  # the all-ones cell (y=m[=l]=1)


_TERM_RE = re.compile(
    r"""^\s*
        (?P<coef>[0-9]+(?:/[0-9]+)?)?      # optional rational coefficient
        \s*\*?\s*
        (?P<sym>p[01]{2,3}_[01])?          # optional symbol
        \s*$""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class LinearExpr:
    """Canonical affine expression over one setting's observed probabilities."""

    setting: int
    constant: Fraction
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        check_setting(self.setting)
        want = 2 * n_cells(self.setting)
        if len(self.coeffs) != want:
            raise ValueError(
                f"expected {want} coefficients for setting {self.setting}, "
                f"got {len(self.coeffs)}"
            )
        drop = dropped_cell(self.setting)
        for a in (0, 1):
            if self.coeffs[flat_index(self.setting, drop, a)] != 0:
                raise ValueError("expression is not in canonical reduced form")

    # -- construction -------------------------------------------------------

    @classmethod
    def make(
        cls,
        setting: int,
        constant: Fraction | int,
        coeffs: Sequence[Fraction | int],
    ) -> "LinearExpr":
        """Build from an arbitrary coefficient vector, canonicalizing.

        The coefficient of each arm's all-ones cell is folded into the
        constant via the per-arm normalization identity sum_cells p = 1.
        """
        check_setting(setting)
        want = 2 * n_cells(setting)
        if len(coeffs) != want:
            raise ValueError(f"expected {want} coefficients, got {len(coeffs)}")
        const = Q(constant)
        vec = [Q(c) for c in coeffs]
        drop = dropped_cell(setting)
        for a in (0, 1):
            d = vec[flat_index(setting, drop, a)]
            if d != 0:
                const += d
                for cell in range(n_cells(setting)):
                    vec[flat_index(setting, cell, a)] -= d
        return cls(setting, const, tuple(vec))

    @classmethod
    def parse(cls, text: str, setting: int) -> "LinearExpr":
        """Parse text like ``-2*p00_1 + p01_0 - 1/2`` into an expression."""
        check_setting(setting)
        index = _SYMBOL_INDEX[setting]
        vec = [Q(0)] * (2 * n_cells(setting))
        const = Q(0)
        body = text.strip()
        if not body:
            raise ValueError("empty expression")
        # split into signed chunks
        chunks: list[tuple[int, str]] = []
        sign = 1
        pos = 0
        if body[0] in "+-":
            sign = -1 if body[0] == "-" else 1
            pos = 1
        start = pos
        while pos <= len(body):
            if pos == len(body) or body[pos] in "+-":
                chunk = body[start:pos]
                chunks.append((sign, chunk))
                if pos < len(body):
                    sign = -1 if body[pos] == "-" else 1
                start = pos + 1
            pos += 1
        for sgn, chunk in chunks:
            m = _TERM_RE.match(chunk)
            if not m or (m.group("coef") is None and m.group("sym") is None):
                raise ValueError(f"cannot parse term {chunk!r} in {text!r}")
            coef = Q(m.group("coef")) if m.group("coef") else Q(1)
            sym = m.group("sym")
            if sym is None:
                const += sgn * coef
            else:
                if sym not in index:
                    raise SymbolMismatch(
                        f"symbol {sym!r} does not belong to setting {setting}"
                    )
                vec[index[sym]] += sgn * coef
        return cls.make(setting, const, vec)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, cells: Sequence[Fraction]) -> Fraction:
        """Evaluate on a flat cell-probability vector (same index order)."""
        if len(cells) != len(self.coeffs):
            raise SymbolMismatch(
                f"expected {len(self.coeffs)} cells, got {len(cells)}"
            )
        total = self.constant
        for c, p in zip(self.coeffs, cells):
            if c != 0:
                total += c * p
        return total

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LinearExpr") -> "LinearExpr":
        self._check_same(other)
        return LinearExpr.make(
            self.setting,
            self.constant + other.constant,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __sub__(self, other: "LinearExpr") -> "LinearExpr":
        self._check_same(other)
        return LinearExpr.make(
            self.setting,
            self.constant - other.constant,
            [a - b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __neg__(self) -> "LinearExpr":
        return LinearExpr.make(
            self.setting, -self.constant, [-a for a in self.coeffs]
        )

    def _check_same(self, other: "LinearExpr") -> None:
        if self.setting != other.setting:
            raise SymbolMismatch("expressions belong to different settings")

    # -- ordering key (deterministic canonical order of term lists) ---------

    def sort_key(self) -> tuple:
        return (self.constant, self.coeffs)

    # -- formatting ---------------------------------------------------------

    @staticmethod
    def _coef_str(c: Fraction) -> str:
        return str(c) if c.denominator != 1 else str(c.numerator)

    def format_text(self) -> str:
        parts: list[str] = []
        if self.constant != 0:
            parts.append(("-" if self.constant < 0 else "", self._coef_str(abs(self.constant))))
        syms = symbols(self.setting)
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            body = syms[i] if mag == 1 else f"{self._coef_str(mag)}*{syms[i]}"
            parts.append(("-" if c < 0 else "", body))
        if not parts:
            return "0"
        out = []
        for k, (sgn, body) in enumerate(parts):
            if k == 0:
                out.append(f"-{body}" if sgn == "-" else body)
            else:
                out.append(f"- {body}" if sgn == "-" else f"+ {body}")
        return " ".join(out)

    def format_latex(self) -> str:
        parts: list[str] = []
        if self.constant != 0:
            parts.append(("-" if self.constant < 0 else "", self._coef_str(abs(self.constant))))
        syms = symbols(self.setting)
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            name = syms[i]
            digits, arm = name[1:].split("_")
            tex = "p_{" + " ".join(digits) + r" \cdot " + arm + "}"
            mag = abs(c)
            body = tex if mag == 1 else f"{self._coef_str(mag)} {tex}"
            parts.append(("-" if c < 0 else "", body))
        if not parts:
            return "0"
        out = []
        for k, (sgn, body) in enumerate(parts):
            if k == 0:
                out.append(f"-{body}" if sgn == "-" else body)
            else:
                out.append(f"- {body}" if sgn == "-" else f"+ {body}")
        return " ".join(out)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.format_text()


def parse_terms(texts: Iterable[str], setting: int) -> tuple[LinearExpr, ...]:
    return tuple(LinearExpr.parse(t, setting) for t in texts)


@dataclass(frozen=True)
class BoundExpr:
    """A max-of-affine lower bound and min-of-affine upper bound pair.

    ``evaluate`` returns the exact (lower, upper) endpoint pair; callers keep
    the estimand itself and wrap endpoints into intervals as needed.
    """

    setting: int
    estimand_label: str
    lower_terms: tuple[LinearExpr, ...]
    upper_terms: tuple[LinearExpr, ...]

    def __post_init__(self) -> None:
        check_setting(self.setting)
        if not self.lower_terms or not self.upper_terms:
            raise ValueError("bound needs at least one term per side")
        for t in self.lower_terms + self.upper_terms:
            if t.setting != self.setting:
                raise SymbolMismatch("term setting mismatch")

    def evaluate(self, cells: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        lo = max(t.evaluate(cells) for t in self.lower_terms)
        hi = min(t.evaluate(cells) for t in self.upper_terms)
        return lo, hi

    def sorted(self) -> "BoundExpr":
        """Terms in canonical deterministic order."""
        return BoundExpr(
            self.setting,
            self.estimand_label,
            tuple(sorted(self.lower_terms, key=LinearExpr.sort_key)),
            tuple(sorted(self.upper_terms, key=LinearExpr.sort_key)),
        )

    def format_text(self) -> str:
        lows = " ; ".join(t.format_text() for t in self.lower_terms)
        highs = " ; ".join(t.format_text() for t in self.upper_terms)
        return f"max{{ {lows} }} <= {self.estimand_label} <= min{{ {highs} }}"

    def format_latex(self) -> str:
        lows = r" \\ ".join(t.format_latex() for t in self.lower_terms)
        highs = r" \\ ".join(t.format_latex() for t in self.upper_terms)
        return (
            r"\max\left\{\begin{array}{l} "
            + lows
            + r" \end{array}\right\} \leq \mathrm{"
            + self.estimand_label
            + r"} \leq \min\left\{\begin{array}{l} "
            + highs
            + r" \end{array}\right\}"
        )
