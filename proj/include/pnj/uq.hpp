#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pnj/helmholtz.hpp"
#include "pnj/mesh.hpp"

namespace pnj {

struct FeatureOptions {
  /// Leave vertices of LENS triangles out of the peak search.
  bool exclude_lens = true;
  /// x of the vertical transect used for the FWHM, physical frame.
  double transect_x = 8.5;
};

struct PnjFeatures {
  std::size_t vertex = 0;
  Point peak;  // physical frame
  double peak_value = 0.0;
  double fwhm = 0.0;
  bool fwhm_defined = false;
};

/// Width at half maximum of a sampled profile, measured around its largest
/// sample with linear interpolation of the crossings. Returns false when the
/// half level is not crossed on both sides.
bool half_max_width(std::span<const double> s, std::span<const double> values, double& width);

/// FWHM of a nodal intensity along the vertical line x = transect_x across
/// the physical square, sampled every h/2 with P1 interpolation.
bool transect_fwhm(const Eigen::VectorXd& intensity, const Mesh& mesh, double transect_x, double& width);

/// Peak of |u|^2 over physical vertices (ties to the lowest index) and the
/// FWHM along the transect.
PnjFeatures extract_features(const ComplexField& total, const Mesh& mesh, const FeatureOptions& options = {});

enum class Feature { PeakX, PeakY, PeakValue, Fwhm };

struct UqSummary {
  std::vector<PnjFeatures> features;
  double mean_x = 0.0;
  double variance_x = 0.0;
  double mean_y = 0.0;
  double variance_y = 0.0;
  double mean_value = 0.0;
  double variance_value = 0.0;

  std::vector<double> values(Feature feature) const;
};

UqSummary summarize(std::vector<PnjFeatures> features);

/// Features of the design polluted by each realization in turn. The same
/// realizations can be replayed against any design on the same mesh.
UqSummary forward_uq(const HelmholtzAssembler& assembler, const DesignField& tau,
                     std::span<const NoiseRealization> realizations, const FeatureOptions& options = {},
                     unsigned threads = 1);

struct LocationBin {
  std::size_t vertex = 0;
  Point location;
  std::size_t count = 0;
};

/// Peak locations as categories (one per attained vertex), ordered by vertex index.
std::vector<LocationBin> location_histogram(const UqSummary& summary);

struct ValueBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins spanning [min, max] of the values; the last bin is closed.
std::vector<ValueBin> value_histogram(std::span<const double> values, std::size_t bins);

}  // namespace pnj
