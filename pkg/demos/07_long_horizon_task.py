"""Long-horizon scenario: decompose a compound instruction over the skill
library, execute the subgoals against the bundled synthetic scene, and print
the per-subgoal verdicts."""

import os
import tempfile

from quadkit.bench import asset_path, cmd_task

scenario = asset_path("scenarios", "long_horizon.json")
out_dir = os.path.join(tempfile.gettempdir(), "quadkit_task_demo")

trace, plan, world = cmd_task(scenario, out_dir=out_dir)

print("subgoals:")
for i, sg in enumerate(plan):
    args = f"({', '.join(f'{k}={v!r}' for k, v in sg.args.items())})" if sg.args else "()"
    print(f"  {i + 1}. {sg.skill_name}{args:40s} -> {sg.status}")

print(f"\ntask complete: {trace.task_complete}")
print(f"final pose: ({world.pose[0]:.2f}, {world.pose[1]:.2f}) m, "
      f"posture: {world.state.posture}, greeted: {world.state.greeted}")
print(f"distance to the blue clothes: {world.distance_to('blue clothes'):.2f} m")
print(f"trace and verdicts in {out_dir}")
