"""Top-down SVG drawings of a scene with its importance scores."""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import drawsvg as draw

from .evaluation import object_score
from .kinds import AgentKind
from .models.report import SceneReport
from .models.scene import AgentState, Scene
from .utils.errors import SceneValidationError


class Theme:
    """Color theme for scene drawings."""

    def __init__(
        self,
        background: str = "#ffffff",
        route_color: str = "#94a3b8",
        ego_fill: str = "#3b82f6",
        vehicle_fill: str = "#e2e8f0",
        pedestrian_fill: str = "#fde68a",
        object_stroke: str = "#64748b",
        important_stroke: str = "#dc2626",
        text_color: str = "#1e293b",
    ):
        self.background = background
        self.route_color = route_color
        self.ego_fill = ego_fill
        self.vehicle_fill = vehicle_fill
        self.pedestrian_fill = pedestrian_fill
        self.object_stroke = object_stroke
        self.important_stroke = important_stroke
        self.text_color = text_color


DEFAULT_THEME = Theme()


def _fmt(value: float) -> float:
    # fixed precision keeps the file byte-stable
    return round(value, 3) + 0.0


def box_corners(agent: AgentState) -> List[Tuple[float, float]]:
    """Corners of an agent's oriented bounding box, counter-clockwise."""
    c, s = math.cos(agent.heading), math.sin(agent.heading)
    hx, hy = agent.half_extent.x, agent.half_extent.y
    corners = []
    for lx, ly in ((hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy)):
        corners.append(
            (agent.position.x + c * lx - s * ly, agent.position.y + s * lx + c * ly)
        )
    return corners


class SceneRenderer:
    """Draws the route, the ego and every object, outlining important ones."""

    def __init__(
        self,
        theme: Optional[Theme] = None,
        pixels_per_meter: float = 8.0,
        margin: float = 12.0,
    ):
        """Initialize the renderer.

        Args:
            theme: Colors to draw with
            pixels_per_meter: Drawing scale
            margin: Meters of context around the ego and agents
        """
        self.theme = theme or DEFAULT_THEME
        self.scale = pixels_per_meter
        self.margin = margin
        self.logger = logging.getLogger(__name__)

    def _bounds(self, scene: Scene) -> Tuple[float, float, float, float]:
        xs, ys = [], []
        for agent in (scene.ego,) + tuple(scene.agents):
            for x, y in box_corners(agent):
                xs.append(x)
                ys.append(y)
        return (
            min(xs) - self.margin,
            min(ys) - self.margin,
            max(xs) + self.margin,
            max(ys) + self.margin,
        )

    def render(
        self,
        scene: Scene,
        report: SceneReport,
        threshold: float,
        method: str = "ours",
    ) -> str:
        """Render one scene as SVG text.

        Args:
            scene: Scene to draw
            report: Normalized scores for the same scene
            threshold: Objects scoring at least this are outlined as important
            method: Which report score to show (see ``object_score``)

        Returns:
            SVG document
        """
        if report.scene_id != scene.scene_id:
            raise SceneValidationError(
                f"Report is for scene '{report.scene_id}', not '{scene.scene_id}'"
            )
        scores: Dict[str, float] = {
            record.id: object_score(record, method) for record in report.objects
        }
        mismatched = sorted(set(scores) ^ set(scene.agent_ids()))
        if mismatched:
            raise SceneValidationError(
                f"Scene and report objects differ: {', '.join(mismatched)}"
            )
        min_x, min_y, max_x, max_y = self._bounds(scene)
        width = _fmt((max_x - min_x) * self.scale)
        height = _fmt((max_y - min_y) * self.scale)

        def to_px(x: float, y: float) -> Tuple[float, float]:
            return _fmt((x - min_x) * self.scale), _fmt((max_y - y) * self.scale)

        def flat(points: Sequence[Tuple[float, float]]) -> List[float]:
            coords: List[float] = []
            for x, y in points:
                coords.extend(to_px(x, y))
            return coords

        theme = self.theme
        drawing = draw.Drawing(width, height, origin=(0, 0))
        drawing.append(draw.Rectangle(0, 0, width, height, fill=theme.background))

        route = [(p.x, p.y) for p in scene.route]
        drawing.append(
            draw.Lines(
                *flat(route),
                close=False,
                fill="none",
                stroke=theme.route_color,
                stroke_width=_fmt(scene.lane_width * self.scale),
                stroke_opacity=0.35,
            )
        )

        drawing.append(
            draw.Lines(
                *flat(box_corners(scene.ego)),
                close=True,
                fill=theme.ego_fill,
                stroke=theme.object_stroke,
            )
        )

        highlighted = 0
        for agent in scene.agents:
            score = scores[agent.id]
            important = score >= threshold
            highlighted += important
            fill = (
                theme.pedestrian_fill
                if agent.kind == AgentKind.PEDESTRIAN
                else theme.vehicle_fill
            )
            drawing.append(
                draw.Lines(
                    *flat(box_corners(agent)),
                    close=True,
                    fill=fill,
                    stroke=theme.important_stroke if important else theme.object_stroke,
                    stroke_width=3 if important else 1,
                )
            )
            label_x, label_y = to_px(
                agent.position.x, agent.position.y + agent.half_extent.y + 1.0
            )
            drawing.append(
                draw.Text(
                    f"{agent.id} {score:.3f}",
                    11,
                    label_x,
                    label_y,
                    fill=theme.text_color,
                    text_anchor="middle",
                )
            )

        legend = [f"{scene.scene_id}  method={method}  threshold={threshold:g}"]
        legend += [f"{agent.id}: {scores[agent.id]:.3f}" for agent in scene.agents]
        for i, line in enumerate(legend):
            drawing.append(
                draw.Text(line, 12, 8, 16 + 14 * i, fill=theme.text_color)
            )

        self.logger.debug(
            f"Rendered {scene.scene_id}: {highlighted}/{len(scene.agents)} "
            f"objects at or above {threshold}"
        )
        return drawing.as_svg()
