"""Compact control-plane wire format.

Frames carry four unsigned 32-bit fields (source, destination, message ID,
action ID). Each non-zero field is emitted as a single key byte (field number
shifted left three bits, low bits zero) followed by the value as a base-128
little-endian varint. Zero-valued fields are omitted and decode back to zero,
so a fully-defaulted frame encodes to zero bytes and a maxed-out frame to 24.

Query responses travel as a single packed integer: action_id * 100 + value,
with value < 100.
"""

from __future__ import annotations

from dataclasses import dataclass

U32_MAX = 0xFFFFFFFF
BROADCAST_ID = 0
RESPONSE_RADIX = 100

# Field numbers, in canonical emission order.
_FIELDS = (("src_id", 1), ("dst_id", 2), ("msg_id", 3), ("action_id", 4))
MAX_ENCODED_LEN = 24


class WireError(Exception):
    """Base class for codec failures."""


class MalformedVarint(WireError):
    """Varint truncated: continuation bit set on the final byte."""


class UnknownField(WireError):
    """Key byte does not name one of the four schema fields."""


class TrailingBytes(WireError):
    """Input ends with a key byte that has no value."""


class Overflow(WireError):
    """Value does not fit in 32 bits (or a packed code would not)."""


class ValueOutOfRange(WireError):
    """Argument outside its documented range."""


@dataclass(frozen=True)
class ControlFrame:
    """The 4-field control message. dst_id 0 addresses the whole network."""

    src_id: int = 0
    dst_id: int = 0
    msg_id: int = 0
    action_id: int = 0

    def __post_init__(self) -> None:
        for name in ("src_id", "dst_id", "msg_id", "action_id"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= U32_MAX:
                raise ValueOutOfRange(f"{name} must be an int in [0, 2^32), got {v!r}")

    def as_dict(self) -> dict:
        return {
            "src": self.src_id,
            "dst": self.dst_id,
            "msg": self.msg_id,
            "action": self.action_id,
        }


@dataclass(frozen=True)
class PackedResponse:
    """Decoded (action, value) pair of a packed response code."""

    action_id: int
    value: int


def _encode_varint(value: int) -> bytes:
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def encode_frame(frame: ControlFrame) -> bytes:
    """Canonical byte encoding; pure, at most 24 bytes."""
    out = bytearray()
    for name, number in _FIELDS:
        value = getattr(frame, name)
        if value == 0:
            continue
        out.append(number << 3)
        out += _encode_varint(value)
    return bytes(out)


def decode_frame(data: bytes) -> ControlFrame:
    """Inverse of encode_frame; omitted fields come back as zero."""
    values = {1: 0, 2: 0, 3: 0, 4: 0}
    i = 0
    n = len(data)
    last_number = 0
    while i < n:
        key = data[i]
        number, wire_type = key >> 3, key & 0x07
        if wire_type != 0 or number not in values:
            raise UnknownField(f"bad key byte 0x{key:02x} at offset {i}")
        if number <= last_number:
            raise WireError(f"non-canonical field order at offset {i}")
        i += 1
        if i >= n:
            raise TrailingBytes("key byte without a value at end of input")
        value = 0
        shift = 0
        while True:
            if i >= n:
                raise MalformedVarint("continuation bit set on final byte")
            b = data[i]
            i += 1
            value |= (b & 0x7F) << shift
            if not b & 0x80:
                break
            shift += 7
            if shift > 31:
                raise Overflow("varint longer than a 32-bit value allows")
        if value > U32_MAX:
            raise Overflow(f"field {number} value {value} exceeds 2^32-1")
        values[number] = value
        last_number = number
    return ControlFrame(values[1], values[2], values[3], values[4])


def pack_response(action_id: int, value: int) -> int:
    """Pack (action, value) into one response code: action_id * 100 + value."""
    if not 0 <= value < RESPONSE_RADIX:
        raise ValueOutOfRange(f"value must be in [0, {RESPONSE_RADIX}), got {value}")
    if action_id < 0:
        raise ValueOutOfRange(f"action_id must be unsigned, got {action_id}")
    code = action_id * RESPONSE_RADIX + value
    if code > U32_MAX:
        raise Overflow(f"packed code {code} exceeds 2^32-1")
    return code


def unpack_response(code: int) -> PackedResponse:
    """Split a response code back into (action, value)."""
    if code < 0:
        raise ValueOutOfRange(f"code must be unsigned, got {code}")
    return PackedResponse(code // RESPONSE_RADIX, code % RESPONSE_RADIX)


_BASELINE_TEMPLATE = '{{"source":{},"destination":{},"messageId":{},"actionId":{}}}'


def baseline_verbose_size(frame: ControlFrame) -> int:
    """Length of the verbose text rendering the compact format replaces."""
    return len(
        _BASELINE_TEMPLATE.format(
            frame.src_id, frame.dst_id, frame.msg_id, frame.action_id
        )
    )
