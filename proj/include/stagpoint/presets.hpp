#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stagpoint/initial_data.hpp"

namespace stagpoint {

/// u0 = a (a - 1)(a - 1/2), Dirichlet.
InitialDatum example1();
/// u0 = sin(2 pi a) / (2 pi), periodic.
InitialDatum example2();
InitialDatum zero_datum();
/// u0 = a (1 - a), Dirichlet.
InitialDatum quadratic_datum();

/// Periodic, odd datum with u0' = mean - cos^(k+1)(pi a) for odd k: a single
/// interior maximizer at 1/2 with M0 = C(k+1, (k+1)/2) / 2^(k+1) and
/// C1 = -pi^(k+1).
InitialDatum synthetic_order(int k);

/// u0 = a - a^(q+1), Dirichlet: u0' = 1 - (q+1) a^q peaks at a = 0 with
/// exponent q and C1 = -(q+1).
InitialDatum power_datum(double q);

/// example1, example2, zero, quadratic, order1, order3, order5, power1.5
InitialDatum preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace stagpoint
