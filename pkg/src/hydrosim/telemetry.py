"""Frame codec and link emulation for the long-range telemetry channel.

Wire format (all header integers big-endian):

    sync     2 B   0xA5 0x5A
    version  1 B   0x01
    msg_type 1 B
    seq      2 B
    len      2 B   payload byte count, <= 240 (radio-class MTU)
    payload  n B   per-type layout, little-endian fields, float32 floats
    crc      2 B   CRC-16/CCITT-FALSE over version..payload

Payload layouts:

    0x01 Telemetry     x, y, theta, v, i, soc (6 x f32), mission_state u8,
                       motor_bitmap u32
    0x02 Command       mode u8 (0 manual / 1 auto), v_x f32, w_z f32
    0x03 MotorCommand  module u8, motor u8, action u8 (sampler wire bytes)
    0x04 EStop         engage u8
    0x05 Ack           acked_seq u16
    0x06 SampleRecord  label 8 B NUL-padded ASCII, volume f32, t_start f32,
                       t_end f32, lat f32, lon f32

The codec is pure; link endpoints are driven by the simulation clock.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import BadCrc, BadLength, BadSync, UnknownType
from .sampler import MotorCommand, decode_motor_command, encode_motor_command

SYNC = b"\xa5\x5a"
VERSION = 1
MTU = 240

MODE_MANUAL = 0
MODE_AUTO = 1


def crc16_ccitt_false(data: bytes) -> int:
    """Polynomial 0x1021, init 0xFFFF, no reflection, no final xor."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) & 0xFFFF if crc & 0x8000 else (crc << 1) & 0xFFFF
    return crc


# ---------------------------------------------------------------------------
# message types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Telemetry:
    x: float
    y: float
    theta: float
    v: float
    i: float
    soc: float
    mission_state: int
    motor_bitmap: int

    TYPE = 0x01
    _FMT = "<ffffffBI"

    def pack(self) -> bytes:
        return struct.pack(
            self._FMT, self.x, self.y, self.theta, self.v, self.i, self.soc,
            self.mission_state, self.motor_bitmap,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "Telemetry":
        return cls(*struct.unpack(cls._FMT, data))

    def to_dict(self) -> dict:
        return {
            "type": "telemetry", "x": self.x, "y": self.y, "theta": self.theta,
            "v": self.v, "i": self.i, "soc": self.soc,
            "mission_state": self.mission_state, "motor_bitmap": self.motor_bitmap,
        }


@dataclass(frozen=True)
class Command:
    mode: int
    v_x: float
    w_z: float

    TYPE = 0x02
    _FMT = "<Bff"

    def pack(self) -> bytes:
        return struct.pack(self._FMT, self.mode, self.v_x, self.w_z)

    @classmethod
    def unpack(cls, data: bytes) -> "Command":
        return cls(*struct.unpack(cls._FMT, data))

    def to_dict(self) -> dict:
        return {"type": "command", "mode": self.mode, "v_x": self.v_x, "w_z": self.w_z}


@dataclass(frozen=True)
class EStop:
    engage: bool

    TYPE = 0x04

    def pack(self) -> bytes:
        return bytes([1 if self.engage else 0])

    @classmethod
    def unpack(cls, data: bytes) -> "EStop":
        if len(data) != 1:
            raise BadLength("EStop payload must be 1 byte")
        return cls(engage=bool(data[0]))

    def to_dict(self) -> dict:
        return {"type": "estop", "engage": self.engage}


@dataclass(frozen=True)
class Ack:
    acked_seq: int

    TYPE = 0x05
    _FMT = "<H"

    def pack(self) -> bytes:
        return struct.pack(self._FMT, self.acked_seq)

    @classmethod
    def unpack(cls, data: bytes) -> "Ack":
        return cls(*struct.unpack(cls._FMT, data))

    def to_dict(self) -> dict:
        return {"type": "ack", "acked_seq": self.acked_seq}


@dataclass(frozen=True)
class SampleRecordMsg:
    label: str
    volume_ml: float
    t_start: float
    t_end: float
    lat: float
    lon: float

    TYPE = 0x06
    _FMT = "<8sfffff"

    def pack(self) -> bytes:
        raw = self.label.encode("ascii")[:8]
        return struct.pack(
            self._FMT, raw.ljust(8, b"\x00"), self.volume_ml,
            self.t_start, self.t_end, self.lat, self.lon,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "SampleRecordMsg":
        raw, vol, t0, t1, lat, lon = struct.unpack(cls._FMT, data)
        return cls(raw.rstrip(b"\x00").decode("ascii"), vol, t0, t1, lat, lon)

    def to_dict(self) -> dict:
        return {
            "type": "sample_record", "label": self.label, "volume_ml": self.volume_ml,
            "t_start": self.t_start, "t_end": self.t_end, "lat": self.lat, "lon": self.lon,
        }


Message = Telemetry | Command | MotorCommand | EStop | Ack | SampleRecordMsg

_MOTOR_TYPE = 0x03


def _pack_message(msg: Message) -> tuple[int, bytes]:
    if isinstance(msg, MotorCommand):
        return _MOTOR_TYPE, encode_motor_command(msg)
    return msg.TYPE, msg.pack()


_UNPACKERS = {
    Telemetry.TYPE: Telemetry.unpack,
    Command.TYPE: Command.unpack,
    _MOTOR_TYPE: decode_motor_command,
    EStop.TYPE: EStop.unpack,
    Ack.TYPE: Ack.unpack,
    SampleRecordMsg.TYPE: SampleRecordMsg.unpack,
}


def message_to_dict(msg: Message) -> dict:
    """JSON mirror of a message, field-for-field."""
    if isinstance(msg, MotorCommand):
        return {
            "type": "motor_command", "module": msg.module, "motor": msg.motor,
            "action": int(msg.action),
        }
    return msg.to_dict()


# ---------------------------------------------------------------------------
# framing
# ---------------------------------------------------------------------------


def encode_frame(msg: Message, seq: int) -> bytes:
    payload_type, payload = _pack_message(msg)
    if len(payload) > MTU:
        raise BadLength(f"payload {len(payload)} exceeds MTU {MTU}")
    body = struct.pack(">BBHH", VERSION, payload_type, seq & 0xFFFF, len(payload)) + payload
    return SYNC + body + struct.pack(">H", crc16_ccitt_false(body))


def decode_frame(data: bytes) -> tuple[Message, int]:
    """Inverse of encode_frame; raises BadSync/BadLength/BadCrc/UnknownType."""
    if len(data) < 10:
        raise BadLength(f"frame too short: {len(data)} bytes")
    if data[:2] != SYNC:
        raise BadSync(f"bad sync {data[:2]!r}")
    version, payload_type, seq, length = struct.unpack(">BBHH", data[2:8])
    if length > MTU or len(data) != 10 + length:
        raise BadLength(f"declared {length}, frame is {len(data)} bytes")
    body = data[2 : 8 + length]
    (crc,) = struct.unpack(">H", data[8 + length :])
    if crc != crc16_ccitt_false(body):
        raise BadCrc("checksum mismatch")
    if version != VERSION:
        raise UnknownType(f"unsupported version {version}")
    unpack = _UNPACKERS.get(payload_type)
    if unpack is None:
        raise UnknownType(f"unknown message type 0x{payload_type:02x}")
    try:
        return unpack(data[8 : 8 + length]), seq
    except struct.error as exc:
        raise BadLength(str(exc)) from exc


# ---------------------------------------------------------------------------
# link model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkModel:
    """Distance-dependent channel: lossless with constant latency inside the
    reliable range; beyond it latency grows with the excess distance and
    frames drop with a fixed probability."""

    reliable_range_m: float = 66.8
    base_latency_s: float = 0.05
    latency_slope_s_per_m: float = 0.01
    drop_prob_beyond: float = 0.3

    def __post_init__(self):
        if self.reliable_range_m <= 0:
            raise ValueError("reliable range must be positive")
        if not 0.0 <= self.drop_prob_beyond <= 1.0:
            raise ValueError("drop probability must lie in [0, 1]")


@dataclass(frozen=True)
class LinkResult:
    delivered: bool
    latency_s: float | None = None


def link_transmit(
    frame: bytes, distance_m: float, model: LinkModel, rng: np.random.Generator | None = None
) -> LinkResult:
    """Channel verdict for one frame at the given station-vehicle distance.

    Within the reliable range (boundary inclusive) delivery is certain and
    consumes no randomness.
    """
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    if distance_m <= model.reliable_range_m:
        return LinkResult(delivered=True, latency_s=model.base_latency_s)
    excess = distance_m - model.reliable_range_m
    if model.drop_prob_beyond > 0:
        draw = rng.random() if rng is not None else 0.0
        if draw < model.drop_prob_beyond:
            return LinkResult(delivered=False)
    return LinkResult(
        delivered=True,
        latency_s=model.base_latency_s + model.latency_slope_s_per_m * excess,
    )


# ---------------------------------------------------------------------------
# sequence numbers
# ---------------------------------------------------------------------------


class Channel:
    """One direction of the link: a wrapping sender counter and a
    duplicate-suppressing receive window."""

    def __init__(self, window: int = 4096):
        self._tx_seq = 0
        self._seen: deque[int] = deque(maxlen=window)
        self._seen_set: set[int] = set()

    def next_seq(self) -> int:
        seq = self._tx_seq
        self._tx_seq = (self._tx_seq + 1) & 0xFFFF
        return seq

    def accept(self, seq: int) -> bool:
        """True the first time a sequence number is seen in the window."""
        if seq in self._seen_set:
            return False
        if len(self._seen) == self._seen.maxlen:
            self._seen_set.discard(self._seen[0])
        self._seen.append(seq)
        self._seen_set.add(seq)
        return True
