#pragma once

#include <string>

#include "fgscan/cif.hpp"

namespace fgscan::cli {

/// Step-line plot of the CIF estimate with its interval and band curves.
std::string cif_svg(const CifEstimate& cif, double alpha);

}  // namespace fgscan::cli
