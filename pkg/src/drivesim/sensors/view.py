"""What a sensor sees: split background/foreground geometry plus shadow casters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geom import FlatScene, build_scene


@dataclass
class ShadowCaster:
    scene: FlatScene          # the casting participant's mesh alone
    center: np.ndarray        # world position of the participant
    radius: float             # shadow influence culling radius


@dataclass
class SceneView:
    """Immutable per-step geometry for one observer.

    Background is shaded unlit; foreground participants are relit and
    composited. The observer's own mesh is excluded by the builder.
    """

    background: FlatScene
    foreground: FlatScene
    casters: list = field(default_factory=list)    # list[ShadowCaster]

    @staticmethod
    def build(background_instances, participant_instances,
              shadow_radius_scale: float = 2.5) -> "SceneView":
        """instances: (mesh, pose, mesh_id) triples; participants cast shadows."""
        bg = build_scene(background_instances)
        fg = build_scene(participant_instances)
        casters = []
        for mesh, pose, mid in participant_instances:
            radius = mesh.bounding_radius() * shadow_radius_scale
            casters.append(ShadowCaster(build_scene([(mesh, pose, mid)]),
                                        np.asarray(pose.translation), radius))
        return SceneView(bg, fg, casters)
