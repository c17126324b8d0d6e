"""Binary wire protocol for external planners.

Frame: u32 LE length (bytes that follow), u8 message type, u8 protocol
version, payload. Poses travel as f64, sensor grids as f32, all
little-endian. The byte-exact layout table lives in docs/protocol.md.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import AgentProtocolError, VersionMismatch
from ..scene import Trajectory
from ..sensors import EgoStatus
from .types import COMMAND_CODES, COMMANDS, Observation

PROTOCOL_VERSION = 1

MSG_HELLO = 1
MSG_HELLO_OK = 2
MSG_ERROR = 3
MSG_OBSERVATION = 4
MSG_PLAN = 5
MSG_BYE = 6

ERR_VERSION_MISMATCH = 1
ERR_DUPLICATE_AGENT = 2
ERR_UNKNOWN_AGENT = 3
ERR_MALFORMED = 4


def frame(msg_type: int, payload: bytes = b"",
          version: int = PROTOCOL_VERSION) -> bytes:
    return struct.pack("<IBB", len(payload) + 2, msg_type, version) + payload


def parse_frame(data: bytes):
    """(msg_type, version, payload) from one complete frame body."""
    if len(data) < 2:
        raise AgentProtocolError("frame shorter than its header")
    return data[0], data[1], data[2:]


class FrameReader:
    """Incremental length-prefixed frame splitter over a byte stream."""

    def __init__(self, recv):
        self._recv = recv
        self._buf = b""

    def next_frame(self):
        while True:
            if len(self._buf) >= 4:
                (n,) = struct.unpack_from("<I", self._buf, 0)
                if n < 2:
                    raise AgentProtocolError(f"malformed length prefix {n}")
                if len(self._buf) >= 4 + n:
                    body = self._buf[4:4 + n]
                    self._buf = self._buf[4 + n:]
                    return parse_frame(body)
            chunk = self._recv()
            if not chunk:
                raise AgentProtocolError("connection closed mid-frame")
            self._buf += chunk


# ---------------------------------------------------------------------------
# payload codecs


def encode_hello(agent_id: str) -> bytes:
    raw = agent_id.encode("utf-8")
    return frame(MSG_HELLO, struct.pack("<H", len(raw)) + raw)


def decode_hello(payload: bytes) -> str:
    (n,) = struct.unpack_from("<H", payload, 0)
    return payload[2:2 + n].decode("utf-8")


def encode_error(code: int, message: str) -> bytes:
    raw = message.encode("utf-8")
    return frame(MSG_ERROR, struct.pack("<BH", code, len(raw)) + raw)


def decode_error(payload: bytes):
    code, n = struct.unpack_from("<BH", payload, 0)
    return code, payload[3:3 + n].decode("utf-8")


def encode_observation(obs: Observation) -> bytes:
    e = obs.ego
    parts = [struct.pack("<6dB", e.t, e.x, e.y, e.heading, e.v, e.a,
                         COMMAND_CODES[e.command])]
    bev = obs.bev if obs.bev is not None else np.zeros((0, 0, 2), dtype=np.float32)
    cx, cy = bev.shape[0], bev.shape[1]
    parts.append(struct.pack("<HHff", cx, cy, obs.bev_extent, obs.bev_split_height))
    parts.append(np.ascontiguousarray(bev, dtype="<f4").tobytes())
    names = sorted(obs.cameras)
    parts.append(struct.pack("<B", len(names)))
    for name in names:
        img = np.ascontiguousarray(obs.cameras[name], dtype="<f4")
        raw = name.encode("ascii")
        parts.append(struct.pack("<BHH", len(raw), img.shape[1], img.shape[0]))
        parts.append(raw)
        parts.append(img.tobytes())
    pts = obs.lidar_points
    if pts is None:
        parts.append(struct.pack("<I", 0))
    else:
        arr = np.ascontiguousarray(pts, dtype="<f4")
        parts.append(struct.pack("<I", arr.shape[0]))
        parts.append(arr.tobytes())
    return frame(MSG_OBSERVATION, b"".join(parts))


def decode_observation(payload: bytes) -> Observation:
    off = 0
    t, x, y, heading, v, a, cmd = struct.unpack_from("<6dB", payload, off)
    off += 49
    cx, cy, extent, split = struct.unpack_from("<HHff", payload, off)
    off += 12
    n = cx * cy * 2
    bev = np.frombuffer(payload, dtype="<f4", count=n, offset=off).reshape(cx, cy, 2) \
        if n else None
    off += 4 * n
    (n_cams,) = struct.unpack_from("<B", payload, off)
    off += 1
    cameras = {}
    for _ in range(n_cams):
        name_len, w, h = struct.unpack_from("<BHH", payload, off)
        off += 5
        name = payload[off:off + name_len].decode("ascii")
        off += name_len
        img = np.frombuffer(payload, dtype="<f4", count=w * h * 3,
                            offset=off).reshape(h, w, 3)
        off += 4 * w * h * 3
        cameras[name] = img
    (n_pts,) = struct.unpack_from("<I", payload, off)
    off += 4
    pts = np.frombuffer(payload, dtype="<f4", count=n_pts * 4,
                        offset=off).reshape(n_pts, 4) if n_pts else None
    ego = EgoStatus(t=t, x=x, y=y, heading=heading, v=v, a=a,
                    command=COMMANDS[cmd])
    return Observation(ego=ego, bev=bev, bev_extent=extent,
                       bev_split_height=split, cameras=cameras,
                       lidar_points=pts)


def encode_plan(plan: Trajectory) -> bytes:
    n = len(plan)
    body = struct.pack("<H", n)
    wp = np.stack([plan.t, plan.x, plan.y, plan.heading, plan.v], axis=1)
    body += np.ascontiguousarray(wp, dtype="<f8").tobytes()
    return frame(MSG_PLAN, body)


def decode_plan(payload: bytes) -> Trajectory:
    (n,) = struct.unpack_from("<H", payload, 0)
    wp = np.frombuffer(payload, dtype="<f8", count=n * 5, offset=2).reshape(n, 5).copy()
    return Trajectory(wp[:, 0], wp[:, 1], wp[:, 2], wp[:, 3], wp[:, 4])


def check_version(version: int):
    if version != PROTOCOL_VERSION:
        raise VersionMismatch(
            f"protocol version {version} != {PROTOCOL_VERSION}")
