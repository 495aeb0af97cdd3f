"""Random connected plane multigraphs built by planarity-preserving moves."""

import random

from planarvcsp.plane import PlaneGraph, trace_faces


def random_plane_graph(rng: random.Random, moves: int) -> PlaneGraph:
    # start from one vertex with one loop
    dart_vertex = [0, 0]
    twin = [1, 0]
    rot = [[0, 1]]
    for _ in range(moves):
        g = PlaneGraph(len(rot), dart_vertex, twin, rot)
        faces = trace_faces(g)
        face = rng.choice(faces)
        a = rng.choice(face.boundary)
        if rng.random() < 0.4:
            # pendant edge to a new vertex in the corner of a
            v, w = dart_vertex[a], len(rot)
            e1, e2 = len(dart_vertex), len(dart_vertex) + 1
            dart_vertex += [v, w]
            twin += [e2, e1]
            rot[v].insert(rot[v].index(a) + 1, e1)
            rot.append([e2])
        else:
            # chord (possibly a loop) between two corners of the same face
            b = rng.choice(face.boundary)
            e1, e2 = len(dart_vertex), len(dart_vertex) + 1
            dart_vertex += [dart_vertex[a], dart_vertex[b]]
            twin += [e2, e1]
            if a == b:
                r = rot[dart_vertex[a]]
                k = r.index(a) + 1
                r[k:k] = [e1, e2]
            else:
                ra = rot[dart_vertex[a]]
                ra.insert(ra.index(a) + 1, e1)
                rb = rot[dart_vertex[b]]
                rb.insert(rb.index(b) + 1, e2)
    return PlaneGraph(len(rot), dart_vertex, twin, rot)
