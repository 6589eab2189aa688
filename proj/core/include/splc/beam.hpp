#ifndef SPLC_BEAM_HPP
#define SPLC_BEAM_HPP

#include "splc/coupling.hpp"

namespace splc::beam {

/// Interface load of the vertical-beam verification case: a constant
/// distributed load of 5e3 along the out-of-plane axis, or one that varies
/// linearly with the normalized height coordinate.
enum class LoadCase { constant, linear_in_height };

struct Config {
  double width = 0.5;    // m
  double height = 1.0;   // m
  int degree = 2;        // structure interface patch
  int spans = 4;         // per direction
  int fluid_refinement = 1;        // extra uniform levels of the fluid spline space
  int cloud_per_direction = 9;     // fluid vertex grid
  RbfKernel kernel = RbfKernel::thin_plate_spline();
};

double load_value(LoadCase load, double normalized_height);

/// Relative sup-norm round-trip error of the load at the fluid vertices
/// after a forward-and-back transfer per strategy.
struct RoundTripErrors {
  double vertex_vertex = 0.0;
  double spline_vertex = 0.0;
  double spline_spline = 0.0;
};

RoundTripErrors run_round_trips(const Config& config, LoadCase load);

}  // namespace splc::beam

#endif
