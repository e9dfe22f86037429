from __future__ import annotations

import numpy as np
import pytest

from hydrosim import telemetry as tm
from hydrosim.errors import BadCrc, BadLength, BadSync, UnknownType
from hydrosim.sampler import (
    MotorAction,
    MotorCommand,
    SamplerState,
    apply_command,
    motor_activity_bitmap,
)


def f32(x: float) -> float:
    return float(np.float32(x))


def random_message(rng: np.random.Generator) -> tm.Message:
    """Random instance of every wire message type, f32-exact floats."""
    kind = rng.integers(0, 6)
    if kind == 0:
        return tm.Telemetry(
            x=f32(rng.uniform(-1e4, 1e4)),
            y=f32(rng.uniform(-1e4, 1e4)),
            theta=f32(rng.uniform(-3.2, 3.2)),
            v=f32(rng.uniform(0, 30)),
            i=f32(rng.uniform(-100, 100)),
            soc=f32(rng.uniform(0, 2000)),
            mission_state=int(rng.integers(0, 256)),
            motor_bitmap=int(rng.integers(0, 1 << 24)),
        )
    if kind == 1:
        return tm.Command(
            mode=int(rng.integers(0, 2)),
            v_x=f32(rng.uniform(-3, 3)),
            w_z=f32(rng.uniform(-3, 3)),
        )
    if kind == 2:
        return MotorCommand(
            module=int(rng.integers(0, 6)),
            motor=int(rng.integers(0, 4)),
            action=MotorAction(int(rng.integers(0, 3))),
        )
    if kind == 3:
        return tm.EStop(engage=bool(rng.integers(0, 2)))
    if kind == 4:
        return tm.Ack(acked_seq=int(rng.integers(0, 65536)))
    label = f"{'ABCDEF'[rng.integers(0, 6)]}{rng.integers(1, 5)}_S{rng.integers(1, 4)}"
    return tm.SampleRecordMsg(
        label=label,
        volume_ml=f32(rng.uniform(0, 45)),
        t_start=f32(rng.uniform(0, 4000)),
        t_end=f32(rng.uniform(0, 4000)),
        lat=f32(rng.uniform(-90, 90)),
        lon=f32(rng.uniform(-180, 180)),
    )


# ---------------------------------------------------------------------------
# CRC and framing
# ---------------------------------------------------------------------------


def test_crc_reference_vector():
    assert tm.crc16_ccitt_false(b"123456789") == 0x29B1


def test_estop_frame_deterministic_and_roundtrips():
    frame = tm.encode_frame(tm.EStop(engage=True), seq=7)
    assert frame == tm.encode_frame(tm.EStop(engage=True), seq=7)
    assert frame[:2] == tm.SYNC
    msg, seq = tm.decode_frame(frame)
    assert msg == tm.EStop(engage=True)
    assert seq == 7


def test_roundtrip_identity_fuzzed():
    rng = np.random.default_rng(123)
    for _ in range(500):
        msg = random_message(rng)
        seq = int(rng.integers(0, 65536))
        out, out_seq = tm.decode_frame(tm.encode_frame(msg, seq))
        assert out == msg
        assert out_seq == seq


def test_payload_bit_flip_detected():
    rng = np.random.default_rng(9)
    for _ in range(200):
        msg = random_message(rng)
        frame = bytearray(tm.encode_frame(msg, int(rng.integers(0, 65536))))
        payload_len = len(frame) - 10
        if payload_len == 0:
            continue
        pos = 8 + int(rng.integers(0, payload_len))
        frame[pos] ^= 1 << int(rng.integers(0, 8))
        with pytest.raises(BadCrc):
            tm.decode_frame(bytes(frame))


def test_bad_sync():
    frame = bytearray(tm.encode_frame(tm.Ack(1), 0))
    frame[0] = 0x00
    with pytest.raises(BadSync):
        tm.decode_frame(bytes(frame))


def test_bad_length():
    frame = tm.encode_frame(tm.Ack(1), 0)
    with pytest.raises(BadLength):
        tm.decode_frame(frame[:-1])


def test_unknown_type():
    frame = bytearray(tm.encode_frame(tm.EStop(True), 0))
    frame[3] = 0x7F
    # recompute the CRC so only the type field is wrong
    body = bytes(frame[2:-2])
    frame[-2:] = tm.crc16_ccitt_false(body).to_bytes(2, "big")
    with pytest.raises(UnknownType):
        tm.decode_frame(bytes(frame))


def test_mtu_enforced():
    class Oversize(tm.Ack):
        def pack(self):
            return b"\x00" * 241

    with pytest.raises(BadLength):
        tm.encode_frame(Oversize(0), 0)


def test_sampler_status_roundtrips_through_codec():
    state = SamplerState()
    apply_command(state, MotorCommand(0, 2, MotorAction.FORWARD))
    apply_command(state, MotorCommand(5, 3, MotorAction.REVERSE))
    bitmap = motor_activity_bitmap(state)
    msg = tm.Telemetry(0, 0, 0, 0, 0, 0, mission_state=1, motor_bitmap=bitmap)
    out, _ = tm.decode_frame(tm.encode_frame(msg, 3))
    assert out.motor_bitmap == bitmap
    assert out.motor_bitmap & (1 << 2)  # module 0 motor 2
    assert out.motor_bitmap & (1 << 23)  # module 5 motor 3


# ---------------------------------------------------------------------------
# link model
# ---------------------------------------------------------------------------


def test_link_within_range_constant_latency():
    model = tm.LinkModel()
    out = tm.link_transmit(b"x", 10.0, model)
    assert out == tm.LinkResult(True, model.base_latency_s)


def test_link_boundary_inclusive():
    model = tm.LinkModel()
    out = tm.link_transmit(b"x", 66.8, model)
    assert out.delivered
    assert out.latency_s == model.base_latency_s


def test_link_forced_drop_beyond_range():
    model = tm.LinkModel(drop_prob_beyond=1.0)
    out = tm.link_transmit(b"x", 120.0, model, np.random.default_rng(0))
    assert not out.delivered


def test_link_latency_strictly_increases_beyond_range():
    model = tm.LinkModel(drop_prob_beyond=0.0)
    latencies = [tm.link_transmit(b"x", d, model).latency_s for d in (70.0, 90.0, 150.0)]
    assert latencies[0] > model.base_latency_s
    assert latencies == sorted(latencies)
    assert latencies[0] < latencies[1] < latencies[2]


def test_link_lossless_within_range_many_frames():
    model = tm.LinkModel()
    rng = np.random.default_rng(4)
    assert all(
        tm.link_transmit(b"x", float(rng.uniform(0, 66.8)), model, rng).delivered
        for _ in range(2000)
    )


# ---------------------------------------------------------------------------
# sequence numbers
# ---------------------------------------------------------------------------


def test_next_seq_increments_and_wraps():
    ch = tm.Channel()
    assert ch.next_seq() == 0
    assert ch.next_seq() == 1
    ch._tx_seq = 65535
    assert ch.next_seq() == 65535
    assert ch.next_seq() == 0


def test_duplicate_delivery_suppressed_once():
    ch = tm.Channel()
    assert ch.accept(17)
    assert not ch.accept(17)
    assert ch.accept(18)
