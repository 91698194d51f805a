"""Build the L-shaped meshes and look at their sizes.

Run with ``python3 demos/01_mesh.py``.
"""
# %%
# Each refinement level halves the cell size, starting from h = 1/32.
from eikonal_fem import build_lshape

for level in range(3):
    m = build_lshape(level)
    print(f"level {level}: h = 1/{round(1 / m.h)}, {m.n_vertices} vertices, {m.n_triangles} triangles")

# %%
# All triangles are counter-clockwise, and every boundary edge is Dirichlet.
m = build_lshape(0)
print("min signed area:", m.signed_areas().min())
print("boundary edges:", len(m.boundary_edges), "dirichlet:", len(m.dirichlet_edges))
