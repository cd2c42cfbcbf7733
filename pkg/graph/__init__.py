from graph.topology import (
    Topology,
    build_topology,
    random_geometric_sphere,
    path_graph,
    ring_graph,
    complete_graph,
    build_fm,
    read_edge_list,
    write_edge_list,
    edges_to_adjacency,
)

__all__ = [
    "Topology",
    "build_topology",
    "random_geometric_sphere",
    "path_graph",
    "ring_graph",
    "complete_graph",
    "build_fm",
    "read_edge_list",
    "write_edge_list",
    "edges_to_adjacency",
]
