#pragma once

// Text serializations of run products. Floating point values are written as
// the shortest decimal that reads back to the same double.

#include <span>
#include <string>

#include "fbg/config.hpp"
#include "fbg/dispersion.hpp"
#include "fbg/solver.hpp"
#include "fbg/types.hpp"

namespace fbg {

/// t_ps,norm,hamiltonian,peak_a,transmitted_fraction
std::string observables_csv(const RunObservables& obs);

/// z,re_a,im_a,re_b,im_b
std::string snapshot_csv(const FieldState& s, const SimGrid& grid);

/// z,re_fa,im_fa,re_fb,im_fb
std::string projection_csv(const ProjectionFunction& f, const SimGrid& grid);

/// delta,re_q,im_q
std::string band_csv(std::span<const BandPoint> band);

/// delta,t2,r2 for a uniform grating of the given length.
std::string transfer_csv(double kappa, double length, std::span<const double> deltas);

/// Parameter record as a JSON object keyed by section.
std::string params_json(const RunConfig& c);

/// Result record with the full parameter record under "params".
std::string squeeze_json(const SqueezeResult& r, const RunConfig& c);

}  // namespace fbg
