"""Node positions, Lambertian order, link angles, coverage discs, placement sampling.

The LED emission axis is fixed vertically downward (ceiling luminaire); the
BD photodetector orientation is a single 3D unit normal whose tilt from
vertical plays the role of the orientation angle alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


# ===== domain types =====

@dataclass(frozen=True)
class Point3:
    """A point in room coordinates, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"Point3.{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class DevicePose:
    """Position plus acceptance-cone axis (unit normal) of a receiver."""

    position: Point3
    normal: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        n = self.normal
        norm = math.sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2])
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("DevicePose.normal must be a unit vector (1e-12)")
        if n[2] < 0.0:
            raise ValueError("DevicePose.normal must not point below horizontal")

    @cached_property
    def tilt_alpha(self) -> float:
        """Angle of the normal from vertical, radians in [0, pi/2]."""
        return math.acos(min(1.0, max(-1.0, self.normal[2])))

    @staticmethod
    def upright(position: Point3) -> "DevicePose":
        return DevicePose(position, (0.0, 0.0, 1.0))

    @staticmethod
    def tilted(position: Point3, tilt: float, azimuth: float) -> "DevicePose":
        """Pose with the normal tilted `tilt` rad from vertical toward `azimuth`."""
        if not 0.0 <= tilt < math.pi / 2:
            raise ValueError("tilt must be in [0, pi/2)")
        n = (math.sin(tilt) * math.cos(azimuth),
             math.sin(tilt) * math.sin(azimuth),
             math.cos(tilt))
        return DevicePose(position, n)


@dataclass(frozen=True)
class LedAp:
    """One ceiling LED access point."""

    position: Point3
    semi_angle_phi_max: float
    lambertian_index_nu: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "lambertian_index_nu", lambertian_index(self.semi_angle_phi_max)
        )


@dataclass(frozen=True)
class Scenario:
    """Static world description: room, LED grid, RF source, device heights."""

    room_w: float
    room_l: float
    leds: tuple
    rfs_position: Point3
    dedicated_led_index: int
    bd_height: float
    ue_height: float
    fov_semi_angle_psi: float

    def __post_init__(self):
        if self.room_w <= 0 or self.room_l <= 0:
            raise ValueError("room_w and room_l must be positive")
        if not self.leds:
            raise ValueError("leds must be nonempty")
        if not 0 <= self.dedicated_led_index < len(self.leds):
            raise ValueError("dedicated_led_index out of range")
        if not 0.0 < self.fov_semi_angle_psi <= math.pi / 2:
            raise ValueError("fov_semi_angle_psi must be in (0, pi/2]")
        for i, led in enumerate(self.leds):
            p = led.position
            if not (0 <= p.x <= self.room_w and 0 <= p.y <= self.room_l):
                raise ValueError(f"leds[{i}] position outside the room")
            if p.z < self.bd_height:
                raise ValueError(f"leds[{i}] must not sit below the BD plane")
        rp = self.rfs_position
        if not (0 <= rp.x <= self.room_w and 0 <= rp.y <= self.room_l):
            raise ValueError("rfs_position outside the room")
        if self.bd_height < 0 or self.ue_height < 0:
            raise ValueError("device heights must be nonnegative")

    @property
    def dedicated_led(self) -> LedAp:
        return self.leds[self.dedicated_led_index]


# ===== operations =====

def lambertian_index(semi_angle: float) -> float:
    """Lambertian order nu = -1/log2(cos(semi_angle)) of an LED."""
    if not 0.0 < semi_angle < math.pi / 2:
        raise ValueError("semi_angle must be in (0, pi/2)")
    return -1.0 / math.log2(math.cos(semi_angle))


def link_geometry(dx, dy, dz, nx, ny, nz):
    """Distance and direction cosines for BD->LED offsets against a BD normal.

    Broadcasts over arrays. Returns (d, cos_phi, cos_psi) where phi is the
    irradiance angle at the (vertically down-facing) LED and psi the
    incidence angle at the receiver normal.
    """
    d = np.sqrt(dx * dx + dy * dy + dz * dz)
    cos_phi = np.clip(dz / d, -1.0, 1.0)
    cos_psi = np.clip((dx * nx + dy * ny + dz * nz) / d, -1.0, 1.0)
    return d, cos_phi, cos_psi


def link_angles(led: LedAp, bd: DevicePose):
    """(distance, irradiance angle phi, incidence angle psi) for one LED/BD pair."""
    p, q = led.position, bd.position
    if p.z <= q.z:
        raise ValueError("LED must be strictly above the BD")
    dx, dy, dz = p.x - q.x, p.y - q.y, p.z - q.z
    d, cos_phi, cos_psi = link_geometry(dx, dy, dz, *bd.normal)
    if d == 0.0:
        raise ValueError("degenerate link: zero distance")
    return float(d), math.acos(cos_phi), math.acos(cos_psi)


def coverage_radius(h_led: float, h_bd: float, tilt_alpha: float, psi: float) -> float:
    """Radius of the 2D coverage disc, (h_led - h_bd) * tan(psi + alpha)."""
    if h_led < h_bd:
        raise ValueError("h_led must not be below h_bd")
    angle = psi + tilt_alpha
    if not 0.0 < angle < math.pi / 2:
        raise ValueError("psi + tilt_alpha must be in (0, pi/2)")
    return (h_led - h_bd) * math.tan(angle)


def disc_xy(u_radial, u_angle, center_x, center_y, radius):
    """Area-uniform point in a disc from two unit uniforms; broadcasts."""
    r = radius * np.sqrt(u_radial)
    theta = 2.0 * np.pi * u_angle
    return center_x + r * np.cos(theta), center_y + r * np.sin(theta)


def sample_bd_position(rng, led: LedAp, radius: float, bd_height: float) -> Point3:
    """Uniform point on the coverage disc under `led`, at bd_height.

    Draw order: radial uniform first, then angle uniform.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    x, y = disc_xy(rng.random(), rng.random(), led.position.x, led.position.y, radius)
    return Point3(float(x), float(y), bd_height)


def sample_ue_position(rng, scenario: Scenario) -> Point3:
    """Uniform point over the room floor area at ue_height (x drawn, then y)."""
    return Point3(
        scenario.room_w * rng.random(),
        scenario.room_l * rng.random(),
        scenario.ue_height,
    )
