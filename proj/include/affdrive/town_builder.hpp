#pragma once

#include <string>
#include <utility>
#include <vector>

#include "affdrive/town.hpp"

namespace affdrive {

/// Parameters of a rectilinear town: intersections on a grid (irregular
/// spacing allowed), one lane per direction, turn arcs inside square
/// intersection boxes.
struct GridTownParams {
  std::string name = "grid";
  std::vector<double> xs;  // intersection x coordinates, increasing
  std::vector<double> ys;  // intersection y coordinates, increasing
  double lane_width = 4.0;
  double box_half_size = 10.0;
  double sidewalk_width = 3.0;
  double arc_spacing = 0.25;
  double light_trigger_length = 40.0;  // for a 30 km/h approach, scaled with the limit
  double sign_distance = 15.0;  // from lane start
  LightCycle light_cycle;
  int default_limit_kmh = 30;

  // Roads given by grid indices ((i0, j0), (i1, j1)) of adjacent nodes.
  using GridEdge = std::pair<std::pair<int, int>, std::pair<int, int>>;
  std::vector<GridEdge> removed_roads;
  std::vector<std::pair<GridEdge, int>> road_limits;
};

Town build_grid_town(const GridTownParams& params);

GridTownParams town_a_params();
GridTownParams town_b_params();

/// Built-in towns: "town-a" (tuning) and "town-b" (held out).
Town builtin_town(const std::string& name);
bool is_builtin_town(const std::string& name);

}  // namespace affdrive
