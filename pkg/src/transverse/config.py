"""Run-wide resource caps and shared error types."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Caps:
    """Hard limits honoured by every field construction and enumeration.

    max_field_bits: a field of order Q may be built only if Q <= 2**max_field_bits.
    max_enum: largest number of projective points a single scan may visit.
    max_form_degree: largest total degree a polynomial power may produce.
    """

    max_field_bits: int = 40
    max_enum: int = 5_000_000
    max_form_degree: int = 5_000

    def field_order_ok(self, p: int, degree: int) -> bool:
        return p**degree <= (1 << self.max_field_bits)

    def check_field(self, p: int, degree: int) -> None:
        if not self.field_order_ok(p, degree):
            raise CapExceededError(
                f"field order {p}^{degree} exceeds 2^{self.max_field_bits} cap"
            )

    def check_enum(self, count: int, what: str = "enumeration") -> None:
        if count > self.max_enum:
            raise CapExceededError(f"{what} of size {count} exceeds cap {self.max_enum}")

    def check_form_degree(self, degree: int) -> None:
        if degree > self.max_form_degree:
            raise CapExceededError(
                f"form degree {degree} exceeds cap {self.max_form_degree}"
            )


_current = Caps()


def current_caps() -> Caps:
    return _current


def set_caps(caps: Caps) -> None:
    # replaces the process-wide caps; used by the CLI at startup
    global _current
    _current = caps


class CapExceededError(RuntimeError):
    """A configured resource cap would be exceeded."""


class NotProperError(ValueError):
    """A section is not proper: the subspace lies inside the hypersurface."""


class SearchInfeasibleError(RuntimeError):
    """An exact decision procedure ran out of its work budget."""


class TheoremViolationError(AssertionError):
    """A search exhausted its candidates although the counting threshold
    guaranteeing success was met and every rejection was exact.

    This cannot happen if the implementation is correct; it indicates a
    transcription or arithmetic bug, and tests treat it as a failure."""
