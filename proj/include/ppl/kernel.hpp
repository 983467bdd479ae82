#pragma once

#include <optional>
#include <vector>

#include "ppl/geometry.hpp"

namespace ppl {

enum class EdgeCorrection { None, Local };

// Isotropic bivariate Gaussian density with standard deviation
// `bandwidth`, as a function of the squared offset.
double gaussian_kernel(double squared_offset, double bandwidth);

// Mass of the kernel centred at x that falls inside the window.
double local_edge_weight(Point x, double bandwidth, const Window& w);

// Kernel estimate sum over x in pattern of k(u - x) / w(x), with w = 1 or
// the local weight. `exclude` drops one point of the pattern.
double kernel_intensity(const PointPattern& x, double bandwidth, Point u,
                        EdgeCorrection edge = EdgeCorrection::None,
                        std::optional<std::size_t> exclude = std::nullopt);

// Estimate at every cell centre of the grid (row-major).
std::vector<double> kernel_surface(const PointPattern& x, double bandwidth,
                                   const QuadratureGrid& grid,
                                   EdgeCorrection edge = EdgeCorrection::Local);

}  // namespace ppl
