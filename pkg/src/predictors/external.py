"""Ego prediction delegated to an external process.

Protocol: the child reads one JSON line
``{"scene": {...}, "agent_id": "...", "horizon": K, "dt": dt}`` from stdin and
writes one JSON line ``{"waypoints": [[x, y], ...]}`` with exactly K entries.
"""

import json
import logging
import shlex
import subprocess
from typing import List, Optional

from tenacity import Retrying, retry_if_exception_type, stop_after_attempt
from tenacity import wait_exponential

from ..models.scene import Scene, Trajectory
from ..utils.errors import PredictorError


class ExternalPredictor:
    """Runs a predictor command once per request over a stdin/stdout pipe."""

    def __init__(
        self,
        command: str,
        timeout: float = 10.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
    ):
        """Initialize the external predictor.

        Args:
            command: Shell-style command line of the predictor process
            timeout: Seconds allowed per request
            max_attempts: Attempts before giving up
            backoff: Base of the exponential wait between attempts, seconds
        """
        if not command:
            raise ValueError("command must not be empty")
        self.argv: List[str] = shlex.split(command)
        self.timeout = timeout
        self.logger = logging.getLogger(__name__)
        self._retrying = Retrying(
            stop=stop_after_attempt(max_attempts),
            wait=wait_exponential(multiplier=backoff, min=0, max=10 * backoff),
            retry=retry_if_exception_type(PredictorError),
            reraise=True,
        )

    def plan(self, scene: Scene, agent_id: Optional[str] = None) -> Trajectory:
        """Ask the external process for a trajectory (the ego's by default)."""
        return self._retrying(self._request, scene, agent_id or scene.ego.id)

    def _request(self, scene: Scene, agent_id: str) -> Trajectory:
        message = json.dumps(
            {
                "scene": scene.model_dump(mode="json"),
                "agent_id": agent_id,
                "horizon": scene.horizon,
                "dt": scene.dt,
            }
        )
        self.logger.debug(f"Requesting trajectory for {agent_id} from {self.argv[0]}")

        try:
            completed = subprocess.run(
                self.argv,
                input=message + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout,
                check=False,
            )
        except subprocess.TimeoutExpired as e:
            self.logger.warning(f"External predictor timed out after {self.timeout}s")
            raise PredictorError(
                f"External predictor timed out after {self.timeout}s"
            ) from e
        except OSError as e:
            raise PredictorError(f"Cannot start external predictor: {e}") from e

        if completed.returncode != 0:
            self.logger.warning(
                f"External predictor exited with {completed.returncode}: "
                f"{completed.stderr.strip()}"
            )
            raise PredictorError(
                f"External predictor exited with status {completed.returncode}"
            )

        lines = [line for line in completed.stdout.splitlines() if line.strip()]
        if not lines:
            raise PredictorError("External predictor returned no response")
        try:
            response = json.loads(lines[0])
            waypoints = response["waypoints"]
            trajectory = Trajectory(waypoints, scene.dt)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise PredictorError(f"Malformed external predictor response: {e}") from e

        if len(trajectory) != scene.horizon:
            raise PredictorError(
                f"External predictor returned {len(trajectory)} waypoints, "
                f"expected {scene.horizon}"
            )
        return trajectory
