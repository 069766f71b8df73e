"""Write OBJ/CSV meshes of a 3-D cone and its Dikin ellipsoid.

Run: python demos/04_mesh.py [outdir]
Open the .obj in any mesh viewer; the CSV is handy for scatter plots.
"""
import sys
from pathlib import Path

import numpy as np

import dikincone as dc
from dikincone.mesh import cone_mesh, ellipsoid_mesh, write_csv, write_obj

out = Path(sys.argv[1] if len(sys.argv) > 1 else "mesh_out")
out.mkdir(parents=True, exist_ok=True)

cases = {
    "axis": dc.construct_axis([1.0, 2.0, 1.5], 0),
    "tilted": dc.construct_general(dc.DikinEllipsoid([1.0, 2.0, 1.5]),
                                   dc.Hyperplane.through([1.0, 1.0, 0.3], [1.0, 2.0, 1.5])),
    "sphere": dc.construct_tangent_sphere([0.5, 1.0, 2.5]),
}

for name, cc in cases.items():
    meshes = [cone_mesh(cc, resolution=6), ellipsoid_mesh(cc, resolution=6)]
    write_obj(out / f"{name}.obj", meshes)
    write_csv(out / f"{name}.csv", meshes)
    cone_v = meshes[0].vertices
    worst = np.abs(cc.quadratic(cone_v)).max()
    print(f"{name:7s} cone verts {len(cone_v):4d}  max |x^T Q x| on surface {worst:.1e}  "
          f"ellipsoid verts {len(meshes[1].vertices)}")

print("written to", out.resolve())
