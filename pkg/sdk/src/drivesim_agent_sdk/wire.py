"""Byte-exact codec for the drivesim agent protocol (docs/protocol.md).

Standard library only: struct for scalars, array('f'/'d') for bulk data.
All values little-endian; this module assumes a little-endian host for the
array fast path and byteswaps otherwise.
"""

from __future__ import annotations

import struct
import sys
from array import array
from dataclasses import dataclass, field

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

COMMANDS = ("left", "right", "straight", "unknown")

_SWAP = sys.byteorder != "little"


class ProtocolError(Exception):
    """Framing or message-content violation."""


class VersionMismatch(ProtocolError):
    pass


class DuplicateAgentId(ProtocolError):
    pass


class SessionClosed(ProtocolError):
    pass


def _f32(values) -> array:
    arr = array("f", values)
    if _SWAP:
        arr.byteswap()
    return arr


def _from_f32(raw: bytes) -> array:
    arr = array("f")
    arr.frombytes(raw)
    if _SWAP:
        arr.byteswap()
    return arr


def frame(msg_type: int, payload: bytes = b"",
          version: int = PROTOCOL_VERSION) -> bytes:
    return struct.pack("<IBB", len(payload) + 2, msg_type, version) + payload


@dataclass
class EgoStatus:
    t: float
    x: float
    y: float
    heading: float
    v: float
    a: float = 0.0
    command: str = "unknown"


@dataclass
class Observation:
    ego: EgoStatus
    bev_shape: tuple = (0, 0)          # (cells_x, cells_y)
    bev_extent: float = 32.0
    bev_split_height: float = 0.2
    bev: array = None                  # flat f32, [x][y][bin] row-major
    cameras: dict = field(default_factory=dict)  # name -> (w, h, flat f32 rgb)
    lidar_points: array = None         # flat f32, 4 per point

    def bev_count(self, ix: int, iy: int, high: bool) -> float:
        cells_y = self.bev_shape[1]
        return self.bev[(ix * cells_y + iy) * 2 + (1 if high else 0)]


@dataclass
class Plan:
    waypoints: list   # of (t, x, y, heading, v)


def encode_hello(agent_id: str) -> bytes:
    raw = agent_id.encode("utf-8")
    return frame(MSG_HELLO, struct.pack("<H", len(raw)) + raw)


def decode_error(payload: bytes):
    code, n = struct.unpack_from("<BH", payload, 0)
    return code, payload[3:3 + n].decode("utf-8")


def encode_plan(plan: Plan) -> bytes:
    flat = array("d")
    for wp in plan.waypoints:
        if len(wp) != 5:
            raise ProtocolError("waypoints are (t, x, y, heading, v)")
        flat.extend(wp)
    if _SWAP:
        flat.byteswap()
    return frame(MSG_PLAN, struct.pack("<H", len(plan.waypoints)) + flat.tobytes())


def decode_plan(payload: bytes) -> Plan:
    (n,) = struct.unpack_from("<H", payload, 0)
    flat = array("d")
    flat.frombytes(payload[2:2 + n * 40])
    if _SWAP:
        flat.byteswap()
    return Plan([tuple(flat[5 * i:5 * i + 5]) for i in range(n)])


def decode_observation(payload: bytes) -> Observation:
    off = 0
    t, x, y, heading, v, a, cmd = struct.unpack_from("<6dB", payload, off)
    off += 49
    cx, cy, extent, split = struct.unpack_from("<HHff", payload, off)
    off += 12
    n = cx * cy * 2
    bev = _from_f32(payload[off:off + 4 * n])
    off += 4 * n
    (n_cams,) = struct.unpack_from("<B", payload, off)
    off += 1
    cameras = {}
    for _ in range(n_cams):
        name_len, w, h = struct.unpack_from("<BHH", payload, off)
        off += 5
        name = payload[off:off + name_len].decode("ascii")
        off += name_len
        img = _from_f32(payload[off:off + 4 * w * h * 3])
        off += 4 * w * h * 3
        cameras[name] = (w, h, img)
    (n_pts,) = struct.unpack_from("<I", payload, off)
    off += 4
    pts = _from_f32(payload[off:off + 16 * n_pts]) if n_pts else None
    if cmd >= len(COMMANDS):
        raise ProtocolError(f"unknown command code {cmd}")
    return Observation(
        ego=EgoStatus(t=t, x=x, y=y, heading=heading, v=v, a=a,
                      command=COMMANDS[cmd]),
        bev_shape=(cx, cy), bev_extent=extent, bev_split_height=split,
        bev=bev, cameras=cameras, lidar_points=pts)


def encode_observation(obs: Observation) -> bytes:
    parts = [struct.pack("<6dB", obs.ego.t, obs.ego.x, obs.ego.y,
                         obs.ego.heading, obs.ego.v, obs.ego.a,
                         COMMANDS.index(obs.ego.command))]
    cx, cy = obs.bev_shape
    parts.append(struct.pack("<HHff", cx, cy, obs.bev_extent,
                             obs.bev_split_height))
    bev = obs.bev if obs.bev is not None else array("f")
    parts.append(_f32(bev).tobytes())
    parts.append(struct.pack("<B", len(obs.cameras)))
    for name in sorted(obs.cameras):
        w, h, img = obs.cameras[name]
        raw = name.encode("ascii")
        parts.append(struct.pack("<BHH", len(raw), w, h))
        parts.append(raw)
        parts.append(_f32(img).tobytes())
    if obs.lidar_points is None:
        parts.append(struct.pack("<I", 0))
    else:
        parts.append(struct.pack("<I", len(obs.lidar_points) // 4))
        parts.append(_f32(obs.lidar_points).tobytes())
    return frame(MSG_OBSERVATION, b"".join(parts))


class FrameReader:
    """Incremental length-prefixed frame splitter over a recv callable."""

    def __init__(self, recv):
        self._recv = recv
        self._buf = b""

    def next_frame(self):
        """(msg_type, version, payload); None on clean EOF between frames."""
        while True:
            if len(self._buf) >= 4:
                (n,) = struct.unpack_from("<I", self._buf, 0)
                if n < 2:
                    raise ProtocolError(f"malformed length prefix {n}")
                if len(self._buf) >= 4 + n:
                    body = self._buf[4:4 + n]
                    self._buf = self._buf[4 + n:]
                    return body[0], body[1], body[2:]
            chunk = self._recv()
            if not chunk:
                if self._buf:
                    raise ProtocolError("connection closed mid-frame")
                return None
            self._buf += chunk
