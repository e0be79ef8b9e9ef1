#pragma once

namespace balfield::mc {

// Corner numbering: 0..3 counterclockwise on the z=0 face starting at the
// cell origin, 4..7 the same on the z=1 face. Edge e joins
// edge_corner[e][0] and edge_corner[e][1].
extern const int tri_table[256][16];
extern const int corner_offset[8][3];
extern const int edge_corner[12][2];
extern const int face_corner[6][4];
extern const int face_edge[6][4];

}  // namespace balfield::mc
